//! Deciding the subepisode relation `G ⪯ H`: does every sequence covering
//! `H` also cover `G`?
//!
//! The relation is NP-hard in general, but most comparisons met in practice
//! resolve through a linear test: when every label of `G` occurs exactly once
//! in `H` there is only one label-honouring event mapping, and `G ⪯ H`
//! reduces to three structural conditions on it. The remaining cases recurse
//! over the earliest time slot of `H`: whatever set of nodes `V` can occupy
//! it (a *prefix subgraph* — non-empty, parent-closed, free of internal
//! proper edges), some member of the candidate set must place a maximal
//! label-fitting prefix of its own into that slot, and the rest of the
//! episodes must relate on what remains.

use std::collections::{BTreeSet, HashMap};

use crate::episode::{Episode, EpisodeError, LabelMultiset};

/// Outcome of the unique-label fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniqueLabelOutcome {
    IsSub,
    NotSub,
    /// The precondition fails (labels missing from `H` or repeated there);
    /// the test says nothing and the recursion has to decide.
    Inapplicable,
}

/// The linear-time test: applicable when `lab(G) ⊆ lab(H)` as multisets and
/// every label of `G` occurs exactly once in `H`. The unique label-honouring
/// mapping then decides the relation: same-node events must stay same-node,
/// proper descendants must stay proper descendants, and descendants must map
/// to descendants or to the same node.
pub fn unique_label_test(g: &Episode, h: &Episode) -> UniqueLabelOutcome {
    let lg = g.label_multiset();
    let lh = h.label_multiset();
    if !lg.subset_of(&lh) {
        return UniqueLabelOutcome::Inapplicable;
    }
    let mut label_node: HashMap<&str, usize> = HashMap::new();
    for l in lg.labels() {
        if lh.count(l) != 1 {
            return UniqueLabelOutcome::Inapplicable;
        }
        let event = (0..h.event_count())
            .find(|&e| h.event_label(e) == l)
            .expect("containment guarantees the label exists");
        label_node.insert(l, h.node_of_event(event));
    }
    // condition 1: events sharing a node in G share a node under the mapping
    let mut phi: Vec<Option<usize>> = vec![None; g.node_count()];
    for e in 0..g.event_count() {
        let target = label_node[g.event_label(e)];
        let n = g.node_of_event(e);
        match phi[n] {
            None => phi[n] = Some(target),
            Some(t) if t == target => {}
            Some(_) => return UniqueLabelOutcome::NotSub,
        }
    }
    let (g_any, g_strict) = g.reachability();
    let (h_any, h_strict) = h.reachability();
    for u in 0..g.node_count() {
        for v in 0..g.node_count() {
            if u == v {
                continue;
            }
            let (pu, pv) = (phi[u].expect("surjective"), phi[v].expect("surjective"));
            // condition 2: proper descendants stay proper descendants
            if g_strict[u][v] && !h_strict[pu][pv] {
                return UniqueLabelOutcome::NotSub;
            }
            // condition 3: descendants stay descendants or collapse
            if g_any[u][v] && !(h_any[pu][pv] || pu == pv) {
                return UniqueLabelOutcome::NotSub;
            }
        }
    }
    UniqueLabelOutcome::IsSub
}

/// Removes every node of `h` whose labels are disjoint from `keep`. The
/// relation `G ⪯ H` is unaffected as long as `keep` covers `lab(G)`: a cover
/// of the reduced host extends to a cover of `h` with events `G` cannot use.
pub fn reduce_host(h: &Episode, keep: &LabelMultiset) -> Episode {
    let drop: BTreeSet<usize> = (0..h.node_count())
        .filter(|&n| !h.node_labels(n).intersects(keep))
        .collect();
    if drop.is_empty() {
        h.clone()
    } else {
        h.remove_nodes(&drop)
    }
}

/// A weak-edge-only view over a subset of an episode's nodes.
struct WeakView<'a> {
    host: &'a Episode,
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl<'a> WeakView<'a> {
    fn whole(host: &'a Episode) -> Self {
        debug_assert!(host.proper_edges().is_empty());
        WeakView {
            host,
            nodes: (0..host.node_count()).collect(),
            edges: host.weak_edges().iter().copied().collect(),
        }
    }

    /// The induced subgraph on the proper sources (nodes without proper
    /// ancestors). For transitively closed hosts the induced weak edges
    /// capture all ancestry inside the view.
    fn proper_sources(host: &'a Episode) -> Self {
        let (_, strict) = host.reachability();
        let nodes: Vec<usize> = (0..host.node_count())
            .filter(|&n| (0..host.node_count()).all(|u| !strict[u][n]))
            .collect();
        let edges = host
            .weak_edges()
            .iter()
            .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
            .copied()
            .collect();
        WeakView { host, nodes, edges }
    }

    fn sources(&self, alive: &BTreeSet<usize>) -> Vec<usize> {
        alive
            .iter()
            .filter(|&&n| !self.edges.iter().any(|&(a, b)| b == n && alive.contains(&a)))
            .copied()
            .collect()
    }

    fn descendants(&self, start: usize, alive: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            for &(a, b) in &self.edges {
                if a == n && alive.contains(&b) && out.insert(b) {
                    stack.push(b);
                }
            }
        }
        out.remove(&start);
        out
    }

    fn labels(&self, n: usize) -> LabelMultiset {
        self.host.node_labels(n)
    }

    fn labels_of(&self, set: &BTreeSet<usize>) -> LabelMultiset {
        set.iter()
            .fold(LabelMultiset::default(), |acc, &n| acc.union(&self.labels(n)))
    }
}

/// All prefix subgraphs of a proper-edge-free episode: the non-empty,
/// parent-closed node sets, each exactly once.
pub fn generate_prefix_subgraphs(g: &Episode) -> Vec<BTreeSet<usize>> {
    let view = WeakView::whole(g);
    let alive: BTreeSet<usize> = view.nodes.iter().copied().collect();
    let mut out = Vec::new();
    generate_rec(&view, alive, &BTreeSet::new(), &mut out);
    out
}

fn generate_rec(
    view: &WeakView,
    alive: BTreeSet<usize>,
    prefix: &BTreeSet<usize>,
    out: &mut Vec<BTreeSet<usize>>,
) {
    let mut remaining = alive.clone();
    for n in view.sources(&alive) {
        let mut grown = prefix.clone();
        grown.insert(n);
        out.push(grown.clone());
        let mut without_n = remaining.clone();
        without_n.remove(&n);
        generate_rec(view, without_n, &grown, out);
        // this source stays excluded: its descendants can never join later
        for d in view.descendants(n, &remaining) {
            remaining.remove(&d);
        }
        remaining.remove(&n);
    }
}

/// The *maximal* prefix subgraphs whose labels fit in `labels`, each exactly
/// once. The empty-prefix case (`labels` admits no source at all) yields an
/// empty list; [`tail`] treats that as "remove nothing".
pub fn consume(g: &Episode, labels: &LabelMultiset) -> Vec<BTreeSet<usize>> {
    let view = WeakView::whole(g);
    consume_view(&view, labels)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect()
}

fn consume_view(view: &WeakView, labels: &LabelMultiset) -> Vec<BTreeSet<usize>> {
    let alive: BTreeSet<usize> = view.nodes.iter().copied().collect();
    let mut out = consume_rec(view, alive, labels.clone(), BTreeSet::new());
    out.sort();
    out.dedup();
    out
}

fn consume_rec(
    view: &WeakView,
    mut alive: BTreeSet<usize>,
    mut budget: LabelMultiset,
    mut prefix: BTreeSet<usize>,
) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    loop {
        let sources = view.sources(&alive);
        let Some(&n) = sources.first() else { break };
        let lab_n = view.labels(n);
        if !lab_n.subset_of(&budget) {
            for d in view.descendants(n, &alive) {
                alive.remove(&d);
            }
            alive.remove(&n);
            continue;
        }
        let shares_label = alive
            .iter()
            .any(|&m| m != n && view.labels(m).intersects(&lab_n));
        if shares_label {
            // branch: the maximal prefixes that skip n entirely
            let mut without = alive.clone();
            for d in view.descendants(n, &alive) {
                without.remove(&d);
            }
            without.remove(&n);
            for w in consume_rec(view, without, budget.clone(), prefix.clone()) {
                // drop results n could still join: those are not maximal
                let extra: BTreeSet<usize> = w.difference(&prefix).copied().collect();
                let used = view.labels_of(&extra).union(&lab_n);
                if !used.subset_of(&budget) {
                    out.push(w);
                }
            }
        }
        prefix.insert(n);
        budget = budget.minus(&lab_n);
        alive.remove(&n);
    }
    out.push(prefix);
    out
}

/// `tail(G, L)`: the episodes left over after removing each maximal
/// label-fitting prefix subgraph of `G`'s proper-source subgraph. When no
/// prefix fits, `G` itself is the single element — the episode still has to
/// be covered by what follows the consumed slot.
pub fn tail(g: &Episode, labels: &LabelMultiset) -> Vec<Episode> {
    if g.is_empty() {
        return vec![g.clone()];
    }
    let view = WeakView::proper_sources(g);
    let prefixes = consume_view(&view, labels);
    let mut out: Vec<Episode> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for w in prefixes {
        let reduced = if w.is_empty() { g.clone() } else { g.remove_nodes(&w) };
        if seen.insert(reduced.canonical_code()) {
            out.push(reduced);
        }
    }
    if out.is_empty() {
        out.push(g.clone());
    }
    out
}

/// Decides `𝒢 ⪯ H` for an episode set: does every sequence covering `H`
/// cover some member? All episodes must be transitively closed.
pub fn step(candidates: &[Episode], host: &Episode) -> bool {
    debug_assert!(candidates.iter().all(Episode::is_transitively_closed));
    debug_assert!(host.is_transitively_closed());
    let mut memo: HashMap<String, bool> = HashMap::new();
    step_rec(candidates.to_vec(), host.clone(), &mut memo)
}

fn step_rec(candidates: Vec<Episode>, host: Episode, memo: &mut HashMap<String, bool>) -> bool {
    // the empty episode is covered by everything
    if candidates.iter().any(Episode::is_empty) {
        return true;
    }
    // a member can only be covered if its labels fit into the host's
    let host_labels = host.label_multiset();
    let candidates: Vec<Episode> = candidates
        .into_iter()
        .filter(|g| g.label_multiset().subset_of(&host_labels))
        .collect();
    if candidates.is_empty() {
        return false;
    }
    if host.is_empty() {
        return false;
    }
    for g in &candidates {
        match unique_label_test(g, &host) {
            UniqueLabelOutcome::IsSub => return true,
            UniqueLabelOutcome::NotSub if candidates.len() == 1 => return false,
            _ => {}
        }
    }
    let mut codes: Vec<String> = candidates.iter().map(Episode::canonical_code).collect();
    codes.sort();
    codes.dedup();
    let key = format!("{}=>{}", codes.join("&"), host.canonical_code());
    if let Some(&hit) = memo.get(&key) {
        return hit;
    }

    let keep = candidates
        .iter()
        .fold(LabelMultiset::default(), |acc, g| acc.union(&g.label_multiset()));
    let host = reduce_host(&host, &keep);
    debug_assert!(!host.is_empty());

    let y = WeakView::proper_sources(&host);
    let alive: BTreeSet<usize> = y.nodes.iter().copied().collect();
    let mut slots = Vec::new();
    generate_rec(&y, alive, &BTreeSet::new(), &mut slots);

    let mut result = true;
    'outer: for v in slots {
        let slot_labels = y.labels_of(&v);
        let remainder = host.remove_nodes(&v);
        let mut next: Vec<Episode> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for g in &candidates {
            for t in tail(g, &slot_labels) {
                if seen.insert(t.canonical_code()) {
                    next.push(t);
                }
            }
        }
        if !step_rec(next, remainder, memo) {
            result = false;
            break 'outer;
        }
    }
    memo.insert(key, result);
    result
}

/// `G ⪯ H`: every sequence covering `H` covers `G`. Inputs are transitively
/// closed first (an episode and its closure are interchangeable); cyclic
/// graphs are rejected.
pub fn subepisode(g: &Episode, h: &Episode) -> Result<bool, EpisodeError> {
    let g = g.transitive_closure()?;
    let h = h.transitive_closure()?;
    Ok(step(std::slice::from_ref(&g), &h))
}

/// Mutual subepisodes: `G` and `H` are covered by exactly the same
/// sequences.
pub fn similar(g: &Episode, h: &Episode) -> Result<bool, EpisodeError> {
    Ok(subepisode(g, h)? && subepisode(h, g)?)
}
