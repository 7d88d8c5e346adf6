//! Brute-force ground truth for coverage, support, the subepisode relation
//! and tiny-scale frequent-episode enumeration.
//!
//! Everything here is deliberately naive and independent of the mining code
//! paths; the test suites compare the fast implementations against these.
//! All searches carry a work counter and panic loudly when a budget is
//! exceeded rather than hanging.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::episode::Episode;
use crate::sequence::Sequence;

const COVER_BUDGET: u64 = 50_000_000;
const WITNESS_BUDGET: u64 = 5_000_000;
const ENUMERATION_BUDGET: usize = 5_000_000;

/// Does `s` cover `G`: is there an injective, label-respecting mapping from
/// episode events to sequence events such that events sharing a node map to
/// one time stamp and every (proper) descendant relation holds (strictly)?
///
/// Plain backtracking over episode events. Worst-case exponential; coverage
/// testing is NP-complete so that is the deal.
pub fn covers(s: &Sequence, g: &Episode) -> bool {
    if g.event_count() == 0 {
        return true;
    }
    let (any, strict) = g.reachability();
    // weak cycles force equality; a strict self-reach is unsatisfiable
    if (0..g.node_count()).any(|i| strict[i][i]) {
        return false;
    }
    let mut by_label: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, e) in s.events().iter().enumerate() {
        by_label.entry(e.label.as_str()).or_default().push(i);
    }
    let mut node_ts: Vec<Option<i64>> = vec![None; g.node_count()];
    let mut used = vec![false; s.len()];
    let mut budget = COVER_BUDGET;
    search_cover(g, s, &by_label, &any, &strict, 0, &mut node_ts, &mut used, &mut budget)
}

#[allow(clippy::too_many_arguments)]
fn search_cover(
    g: &Episode,
    s: &Sequence,
    by_label: &HashMap<&str, Vec<usize>>,
    any: &[Vec<bool>],
    strict: &[Vec<bool>],
    event: usize,
    node_ts: &mut Vec<Option<i64>>,
    used: &mut Vec<bool>,
    budget: &mut u64,
) -> bool {
    if event == g.event_count() {
        return true;
    }
    *budget = budget
        .checked_sub(1)
        .unwrap_or_else(|| panic!("coverage oracle budget exceeded"));
    let node = g.node_of_event(event);
    let Some(candidates) = by_label.get(g.event_label(event)) else {
        return false;
    };
    for &c in candidates {
        if used[c] {
            continue;
        }
        let ts = s.events()[c].ts;
        let prev = node_ts[node];
        if let Some(t) = prev {
            if t != ts {
                continue;
            }
        } else {
            if !timing_consistent(g, any, strict, node, ts, node_ts) {
                continue;
            }
            node_ts[node] = Some(ts);
        }
        used[c] = true;
        if search_cover(g, s, by_label, any, strict, event + 1, node_ts, used, budget) {
            used[c] = false;
            node_ts[node] = prev;
            return true;
        }
        used[c] = false;
        node_ts[node] = prev;
    }
    false
}

fn timing_consistent(
    g: &Episode,
    any: &[Vec<bool>],
    strict: &[Vec<bool>],
    node: usize,
    ts: i64,
    node_ts: &[Option<i64>],
) -> bool {
    for other in 0..g.node_count() {
        if other == node {
            continue;
        }
        let Some(ot) = node_ts[other] else { continue };
        if strict[other][node] && ot >= ts {
            return false;
        }
        if strict[node][other] && ts >= ot {
            return false;
        }
        if any[other][node] && ot > ts {
            return false;
        }
        if any[node][other] && ts > ot {
            return false;
        }
    }
    true
}

/// The number of windows of size `rho` covering `g`, by sliding the window
/// start over every position that intersects the sequence.
pub fn brute_support(s: &Sequence, g: &Episode, rho: u64) -> u64 {
    let (Some(min), Some(max)) = (s.min_ts(), s.max_ts()) else {
        return 0;
    };
    let rho = rho as i64;
    let mut count = 0;
    for t in (min - rho + 1)..=max {
        if covers(&s.subsequence(t, t + rho - 1), g) {
            count += 1;
        }
    }
    count
}

/// Decides `G` ⪯ `H` (every sequence covering `H` covers `G`) by enumerating
/// canonical witness sequences of `H`: every surjective assignment of `H`'s
/// nodes to time slots `1..=k` consistent with the edges, realised as a
/// sequence of `H`'s events. `G` is a subepisode iff every witness covers it.
///
/// Any sequence covering `H` embeds one of these arrangements, and coverage
/// of `G` inside the arrangement lifts to the full sequence, so the finite
/// check decides the relation. Both inputs must be transitively closed.
pub fn brute_subepisode(g: &Episode, h: &Episode) -> bool {
    debug_assert!(g.is_transitively_closed() && h.is_transitively_closed());
    let mut budget = WITNESS_BUDGET;
    let mut slots = vec![0usize; h.node_count()];
    witnesses_all_cover(g, h, 0, &mut slots, &mut budget)
}

fn witnesses_all_cover(
    g: &Episode,
    h: &Episode,
    node: usize,
    slots: &mut Vec<usize>,
    budget: &mut u64,
) -> bool {
    if node == h.node_count() {
        let k = slots.iter().copied().max().unwrap_or(0);
        let used: BTreeSet<usize> = slots.iter().copied().collect();
        if used.len() != k {
            return true; // gap in the slots: not a canonical witness
        }
        return covers(&realize_witness(h, slots), g);
    }
    *budget = budget
        .checked_sub(1)
        .unwrap_or_else(|| panic!("subepisode oracle budget exceeded"));
    for slot in 1..=h.node_count() {
        let mut ok = true;
        for prev in 0..node {
            let (a, b) = (slots[prev], slot);
            if h.proper_edges().contains(&(prev, node)) && a >= b {
                ok = false;
            }
            if h.proper_edges().contains(&(node, prev)) && b >= a {
                ok = false;
            }
            if h.weak_edges().contains(&(prev, node)) && a > b {
                ok = false;
            }
            if h.weak_edges().contains(&(node, prev)) && b > a {
                ok = false;
            }
            if !ok {
                break;
            }
        }
        if !ok {
            continue;
        }
        slots[node] = slot;
        if !witnesses_all_cover(g, h, node + 1, slots, budget) {
            return false;
        }
    }
    true
}

fn realize_witness(h: &Episode, slots: &[usize]) -> Sequence {
    let mut pairs: Vec<(i64, String)> = (0..h.event_count())
        .map(|e| (slots[h.node_of_event(e)] as i64, h.event_label(e).to_string()))
        .collect();
    pairs.sort();
    Sequence::from_pairs(pairs).expect("slot order is non-decreasing")
}

/// All transitively closed, acyclic episode structures over `n` anonymous
/// nodes, as `(proper, weak)` edge sets.
fn tcl_edge_structures(n: usize) -> Vec<(BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>)> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    let mut assignment = vec![0u8; pairs.len()]; // 0 none, 1 weak, 2 proper
    loop {
        let proper: BTreeSet<(usize, usize)> = pairs
            .iter()
            .zip(&assignment)
            .filter(|(_, &k)| k == 2)
            .map(|(&p, _)| p)
            .collect();
        let weak: BTreeSet<(usize, usize)> = pairs
            .iter()
            .zip(&assignment)
            .filter(|(_, &k)| k == 1)
            .map(|(&p, _)| p)
            .collect();
        let probe = probe_episode(n, &proper, &weak);
        if !probe.has_cycle() && probe.is_transitively_closed() {
            out.push((proper, weak));
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < 3 {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

fn probe_episode(
    n: usize,
    proper: &BTreeSet<(usize, usize)>,
    weak: &BTreeSet<(usize, usize)>,
) -> Episode {
    let labels: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let nodes: Vec<&[&str]> = refs.iter().map(std::slice::from_ref).collect();
    let pe: Vec<(usize, usize)> = proper.iter().copied().collect();
    let we: Vec<(usize, usize)> = weak.iter().copied().collect();
    Episode::new(&nodes, &pe, &we).expect("structure enumeration is well formed")
}

/// Enumerates every transitively closed, acyclic episode over the given
/// labels within the size bounds, deduplicated up to node renumbering.
pub fn enumerate_episodes(labels: &[&str], max_nodes: usize, max_events: usize) -> Vec<Episode> {
    assert!(max_nodes <= 4, "enumeration bounds are meant to stay tiny");
    let mut structures: HashMap<usize, Vec<_>> = HashMap::new();
    for n in 1..=max_nodes {
        structures.insert(n, tcl_edge_structures(n));
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut out: Vec<Episode> = Vec::new();
    let mut multiset: Vec<usize> = Vec::new();
    enumerate_multisets(labels.len(), max_events, &mut multiset, &mut |ms| {
        let events: Vec<&str> = ms.iter().map(|&i| labels[i]).collect();
        for partition in set_partitions(events.len(), max_nodes) {
            let node_count = partition.iter().copied().max().map_or(0, |m| m + 1);
            for (proper, weak) in &structures[&node_count] {
                let mut nodes: Vec<Vec<&str>> = vec![Vec::new(); node_count];
                for (e, &n) in partition.iter().enumerate() {
                    nodes[n].push(events[e]);
                }
                let slices: Vec<&[&str]> = nodes.iter().map(|v| v.as_slice()).collect();
                let pe: Vec<(usize, usize)> = proper.iter().copied().collect();
                let we: Vec<(usize, usize)> = weak.iter().copied().collect();
                let ep = Episode::new(&slices, &pe, &we).expect("valid structure");
                if seen.insert(ep.canonical_code()) {
                    out.push(ep);
                }
                assert!(seen.len() <= ENUMERATION_BUDGET, "episode enumeration exploded");
            }
        }
    });
    out
}

fn enumerate_multisets(
    alphabet: usize,
    max_events: usize,
    current: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if !current.is_empty() {
        f(current);
    }
    if current.len() == max_events {
        return;
    }
    let start = current.last().copied().unwrap_or(0);
    for i in start..alphabet {
        current.push(i);
        enumerate_multisets(alphabet, max_events, current, f);
        current.pop();
    }
}

/// All partitions of `0..n` into at most `max_parts` blocks, encoded as a
/// block index per element (restricted growth strings).
fn set_partitions(n: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max_parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next_block = cur.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..=next_block.min(max_parts - 1) {
            cur.push(b);
            rec(n, max_parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, max_parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Brute-force frequent-episode enumeration: every episode within the bounds
/// with `brute_support >= sigma`, deduplicated up to similarity. Supports are
/// attached to the returned episodes.
pub fn brute_frequent(
    s: &Sequence,
    rho: u64,
    sigma: u64,
    max_nodes: usize,
    max_events: usize,
) -> Vec<Episode> {
    let alphabet = s.alphabet();
    let mut frequent: Vec<Episode> = Vec::new();
    for mut ep in enumerate_episodes(&alphabet, max_nodes, max_events) {
        let support = brute_support(s, &ep, rho);
        if support < sigma {
            continue;
        }
        // similar episodes share support and label multiset
        let labels = ep.label_multiset();
        if frequent.iter().any(|f| {
            f.support() == Some(support)
                && f.label_multiset() == labels
                && brute_subepisode(f, &ep)
                && brute_subepisode(&ep, f)
        }) {
            continue;
        }
        ep.set_support(support);
        frequent.push(ep);
    }
    frequent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::episode::LabelMultiset;

    fn compact(text: &str) -> Sequence {
        let mut pairs: Vec<(i64, String)> = Vec::new();
        let mut ts = 0i64;
        let mut group = false;
        for ch in text.chars() {
            match ch {
                '(' => {
                    group = true;
                    ts += 1;
                }
                ')' => group = false,
                c => {
                    if !group {
                        ts += 1;
                    }
                    pairs.push((ts, c.to_string()));
                }
            }
        }
        Sequence::from_pairs(pairs).unwrap()
    }

    fn fig1_g1() -> Episode {
        Episode::new(&[&["a"], &["b"], &["c"], &["d"]], &[(0, 3)], &[]).unwrap()
    }

    fn fig1_g2() -> Episode {
        Episode::new(
            &[&["a"], &["b"], &["c"], &["d"]],
            &[(0, 2), (0, 3), (2, 3), (1, 3)],
            &[(0, 1)],
        )
        .unwrap()
    }

    fn fig1_g3() -> Episode {
        Episode::new(&[&["a"], &["b"], &["c", "d"]], &[(0, 2), (1, 2)], &[(0, 1)]).unwrap()
    }

    #[test]
    fn coverage_fixtures() {
        let ab_cd = compact("ab(cd)");
        assert!(covers(&ab_cd, &fig1_g1()));
        assert!(!covers(&ab_cd, &fig1_g2()));
        assert!(covers(&ab_cd, &fig1_g3()));

        let abcd = compact("(ab)cd");
        assert!(covers(&abcd, &fig1_g1()));
        assert!(covers(&abcd, &fig1_g2()));
        assert!(!covers(&abcd, &fig1_g3()));

        assert!(covers(&Sequence::default(), &Episode::empty()));
        assert!(covers(&ab_cd, &Episode::empty()));
    }

    #[test]
    fn injectivity_matters() {
        let one_a = compact("a");
        let two_a = Episode::new(&[&["a"], &["a"]], &[], &[]).unwrap();
        assert!(!covers(&one_a, &two_a));
        assert!(covers(&compact("aa"), &two_a));
    }

    #[test]
    fn support_fixture_from_worked_example() {
        let s = compact("abcdacbd");
        assert_eq!(brute_support(&s, &fig1_g1(), 4), 2);
    }

    #[test]
    fn support_of_absent_label_is_zero() {
        let s = compact("abcdacbd");
        let z = Episode::singleton("z");
        assert_eq!(brute_support(&s, &z, 4), 0);
    }

    #[test]
    fn subepisode_fixtures() {
        let g1 = fig1_g1();
        let g2 = fig1_g2();
        let g3 = fig1_g3();
        assert!(brute_subepisode(&g1, &g2));
        assert!(brute_subepisode(&g1, &g3));
        assert!(!brute_subepisode(&g2, &g3));
        assert!(!brute_subepisode(&g3, &g2));
        assert!(brute_subepisode(&g2, &g2));
        assert!(brute_subepisode(&Episode::empty(), &g1));
        assert!(!brute_subepisode(&g1, &Episode::empty()));
    }

    #[test]
    fn closure_is_similar_to_the_original() {
        let chain = Episode::new(&[&["a"], &["b"], &["c"]], &[(0, 1), (1, 2)], &[]).unwrap();
        let tcl = chain.transitive_closure().unwrap();
        assert!(brute_subepisode(&tcl, &tcl));
        // compare against a structurally different but similar episode
        let serial = Episode::new(&[&["a"], &["b"], &["c"]], &[(0, 1), (1, 2), (0, 2)], &[]).unwrap();
        assert!(brute_subepisode(&serial, &tcl));
        assert!(brute_subepisode(&tcl, &serial));
    }

    #[test]
    fn enumeration_is_deduplicated_and_closed() {
        let eps = enumerate_episodes(&["a", "b"], 2, 2);
        assert!(eps.iter().all(|e| e.is_transitively_closed()));
        let codes: HashSet<String> = eps.iter().map(|e| e.canonical_code()).collect();
        assert_eq!(codes.len(), eps.len());
        // {a},{a} with one weak edge: both directions are the same episode
        let aa_weak = eps
            .iter()
            .filter(|e| {
                e.node_count() == 2
                    && e.label_multiset() == LabelMultiset::new(["a", "a"])
                    && e.weak_edges().len() == 1
            })
            .count();
        assert_eq!(aa_weak, 1);
    }

    #[test]
    fn brute_frequent_on_the_toy_sequence() {
        let s = compact("(aa)ba");
        let frequent = brute_frequent(&s, 2, 2, 2, 2);
        let find = |nodes: &[&[&str]], pe: &[(usize, usize)], we: &[(usize, usize)]| {
            let target = Episode::new(nodes, pe, we).unwrap();
            frequent
                .iter()
                .find(|e| e.canonical_code() == target.canonical_code())
                .and_then(|e| e.support())
        };
        assert_eq!(find(&[&["a"]], &[], &[]), Some(4));
        assert_eq!(find(&[&["a", "a"]], &[], &[]), Some(2));
        assert_eq!(find(&[&["b"]], &[], &[]), Some(2));
        assert_eq!(find(&[&["a"], &["b"]], &[], &[]), Some(2));
        // sigma above every support leaves nothing
        assert!(brute_frequent(&s, 2, 5, 2, 2).is_empty());
    }
}
