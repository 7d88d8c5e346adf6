//! Episodes: labelled events partitioned into the nodes of a graph with weak
//! and proper edges, plus the graph utilities the miner needs (transitive
//! closure, cycle detection, canonical text).
//!
//! Weak edge `(a, b)`: the events of `b` occur at the same time as those of
//! `a` or later. Proper edge: strictly later. Events sharing a node occur
//! simultaneously.

use std::collections::BTreeSet;
use std::fmt;

/// A multiset of labels, kept sorted in ascending order.
///
/// The order used throughout is plain lexicographic comparison of the
/// ascending representations, a prefix being smaller than its extensions.
/// So `{b,a} <= {b}` (it reads `ab`) while `{b} <= {b,a}` is false. The
/// miner depends on two consequences: a node grown by appending ever larger
/// labels moves monotonically up in this order, and sorting node multisets
/// in descending order also sorts their minimum labels in descending order,
/// which is exactly what the new-node rule consumes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelMultiset(Vec<String>);

impl LabelMultiset {
    pub fn new(labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let mut v: Vec<String> = labels.into_iter().map(Into::into).collect();
        v.sort();
        LabelMultiset(v)
    }

    /// Labels in ascending order.
    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_label(&self) -> Option<&str> {
        self.0.last().map(String::as_str)
    }

    pub fn min_label(&self) -> Option<&str> {
        self.0.first().map(String::as_str)
    }

    pub fn count(&self, label: &str) -> usize {
        self.0.iter().filter(|l| l.as_str() == label).count()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.count(label) > 0
    }

    pub fn insert(&mut self, label: impl Into<String>) {
        let label = label.into();
        let pos = self.0.partition_point(|l| *l < label);
        self.0.insert(pos, label);
    }

    /// Multiset containment: every label occurs in `other` at least as often.
    pub fn subset_of(&self, other: &LabelMultiset) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        // both ascending: greedy merge
        let mut oi = 0;
        for l in &self.0 {
            while oi < other.0.len() && other.0[oi] < *l {
                oi += 1;
            }
            if oi >= other.0.len() || other.0[oi] != *l {
                return false;
            }
            oi += 1;
        }
        true
    }

    /// Multiset sum.
    pub fn union(&self, other: &LabelMultiset) -> LabelMultiset {
        LabelMultiset::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// Multiset difference (removes one occurrence per matching label).
    pub fn minus(&self, other: &LabelMultiset) -> LabelMultiset {
        let mut rest = self.0.clone();
        for l in &other.0 {
            if let Some(pos) = rest.iter().position(|r| r == l) {
                rest.remove(pos);
            }
        }
        LabelMultiset(rest)
    }

    pub fn intersects(&self, other: &LabelMultiset) -> bool {
        self.0.iter().any(|l| other.contains(l))
    }
}

/// `X <=_lex Y` on label multisets.
pub fn lex_leq(x: &LabelMultiset, y: &LabelMultiset) -> bool {
    x <= y
}

impl fmt::Display for LabelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let asc: Vec<&str> = self.0.iter().map(String::as_str).collect();
        write!(f, "{{{}}}", asc.join(","))
    }
}

/// An episode: events with labels, a surjective event-to-node assignment and
/// two edge sets over the nodes.
///
/// Events and nodes are indexed from 0 in creation order; the node created
/// last has the highest index. The graph is *not* required to be acyclic at
/// all times — the instance-closure can transiently produce weak cycles, and
/// callers detect those with [`Episode::has_cycle`].
#[derive(Debug, Clone)]
pub struct Episode {
    labels: Vec<String>,
    node_of: Vec<usize>,
    node_count: usize,
    proper: BTreeSet<(usize, usize)>,
    weak: BTreeSet<(usize, usize)>,
    support: Option<u64>,
}

impl PartialEq for Episode {
    fn eq(&self, other: &Self) -> bool {
        // support is an annotation, not part of the episode identity
        self.labels == other.labels
            && self.node_of == other.node_of
            && self.node_count == other.node_count
            && self.proper == other.proper
            && self.weak == other.weak
    }
}

impl Eq for Episode {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpisodeError {
    #[error("edge ({0}, {1}) references a node out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("({0}, {1}) is both a weak and a proper edge")]
    DuplicateEdge(usize, usize),
    #[error("node {0} has no events")]
    EmptyNode(usize),
    #[error("the episode graph has a cycle")]
    Cyclic,
    #[error("parse error at position {pos}: {reason}")]
    Parse { pos: usize, reason: String },
}

impl Episode {
    /// Builds an episode from per-node label lists and 0-based edge lists.
    pub fn new(
        nodes: &[&[&str]],
        proper: &[(usize, usize)],
        weak: &[(usize, usize)],
    ) -> Result<Self, EpisodeError> {
        let mut labels = Vec::new();
        let mut node_of = Vec::new();
        for (n, ls) in nodes.iter().enumerate() {
            if ls.is_empty() {
                return Err(EpisodeError::EmptyNode(n));
            }
            for l in *ls {
                labels.push((*l).to_string());
                node_of.push(n);
            }
        }
        let ep = Episode {
            labels,
            node_of,
            node_count: nodes.len(),
            proper: proper.iter().copied().collect(),
            weak: weak.iter().copied().collect(),
            support: None,
        };
        ep.validate()?;
        Ok(ep)
    }

    fn validate(&self) -> Result<(), EpisodeError> {
        for &(a, b) in self.proper.iter().chain(self.weak.iter()) {
            if a >= self.node_count || b >= self.node_count {
                return Err(EpisodeError::EdgeOutOfRange(a, b));
            }
            if a == b {
                return Err(EpisodeError::SelfLoop(a));
            }
        }
        if let Some(&(a, b)) = self.proper.intersection(&self.weak).next() {
            return Err(EpisodeError::DuplicateEdge(a, b));
        }
        Ok(())
    }

    pub fn empty() -> Self {
        Episode {
            labels: Vec::new(),
            node_of: Vec::new(),
            node_count: 0,
            proper: BTreeSet::new(),
            weak: BTreeSet::new(),
            support: None,
        }
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        Episode {
            labels: vec![label.into()],
            node_of: vec![0],
            node_count: 1,
            proper: BTreeSet::new(),
            weak: BTreeSet::new(),
            support: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn event_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn event_label(&self, event: usize) -> &str {
        &self.labels[event]
    }

    pub fn node_of_event(&self, event: usize) -> usize {
        self.node_of[event]
    }

    pub fn events_of_node(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels.len()).filter(move |&e| self.node_of[e] == node)
    }

    /// `lab(n)`: the multiset of labels of the events assigned to `n`.
    pub fn node_labels(&self, node: usize) -> LabelMultiset {
        LabelMultiset::new(self.events_of_node(node).map(|e| self.labels[e].clone()))
    }

    /// `lab(G)`: the multiset of all labels.
    pub fn label_multiset(&self) -> LabelMultiset {
        LabelMultiset::new(self.labels.iter().cloned())
    }

    pub fn proper_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.proper
    }

    pub fn weak_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.weak
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.proper.contains(&(a, b)) || self.weak.contains(&(a, b))
    }

    pub fn support(&self) -> Option<u64> {
        self.support
    }

    pub fn set_support(&mut self, support: u64) {
        self.support = Some(support);
    }

    /// Copy with an extra event with `label` appended to `node`.
    pub fn with_event_on_node(&self, node: usize, label: impl Into<String>) -> Episode {
        debug_assert!(node < self.node_count);
        let mut ep = self.clone();
        ep.labels.push(label.into());
        ep.node_of.push(node);
        ep.support = None;
        ep
    }

    /// Copy with a fresh node holding a single event with `label`.
    pub fn with_new_node(&self, label: impl Into<String>) -> Episode {
        let mut ep = self.clone();
        ep.labels.push(label.into());
        ep.node_of.push(ep.node_count);
        ep.node_count += 1;
        ep.support = None;
        ep
    }

    /// Copy with the given edge sets (used by the instance-closure).
    pub fn with_edges(
        &self,
        proper: BTreeSet<(usize, usize)>,
        weak: BTreeSet<(usize, usize)>,
    ) -> Episode {
        let mut ep = self.clone();
        ep.proper = proper;
        ep.weak = weak;
        ep.support = None;
        ep
    }

    /// Induced episode after deleting a set of nodes (and their events).
    /// Remaining nodes and events keep their relative order.
    pub fn remove_nodes(&self, drop: &BTreeSet<usize>) -> Episode {
        let mut remap = vec![usize::MAX; self.node_count];
        let mut next = 0;
        for n in 0..self.node_count {
            if !drop.contains(&n) {
                remap[n] = next;
                next += 1;
            }
        }
        let mut labels = Vec::new();
        let mut node_of = Vec::new();
        for e in 0..self.labels.len() {
            let n = self.node_of[e];
            if remap[n] != usize::MAX {
                labels.push(self.labels[e].clone());
                node_of.push(remap[n]);
            }
        }
        let keep_edge = |set: &BTreeSet<(usize, usize)>| {
            set.iter()
                .filter(|(a, b)| remap[*a] != usize::MAX && remap[*b] != usize::MAX)
                .map(|(a, b)| (remap[*a], remap[*b]))
                .collect::<BTreeSet<_>>()
        };
        Episode {
            labels,
            node_of,
            node_count: next,
            proper: keep_edge(&self.proper),
            weak: keep_edge(&self.weak),
            support: None,
        }
    }

    /// Reachability over the combined edge relation: `any[a][b]` iff a path
    /// `a -> b` of length >= 1 exists, `strict[a][b]` iff some such path uses
    /// a proper edge.
    pub(crate) fn reachability(&self) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
        let n = self.node_count;
        let mut any = vec![vec![false; n]; n];
        for &(a, b) in self.proper.iter().chain(self.weak.iter()) {
            any[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if any[i][k] {
                    for j in 0..n {
                        if any[k][j] {
                            any[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut strict = vec![vec![false; n]; n];
        for &(u, v) in &self.proper {
            for i in 0..n {
                if i != u && !any[i][u] {
                    continue;
                }
                for j in 0..n {
                    if j != v && !any[v][j] {
                        continue;
                    }
                    strict[i][j] = true;
                }
            }
        }
        (any, strict)
    }

    /// True iff the combined edge relation has a directed cycle.
    pub fn has_cycle(&self) -> bool {
        let (any, _) = self.reachability();
        (0..self.node_count).any(|i| any[i][i])
    }

    /// The transitive closure: an edge from every node to each of its
    /// descendants, proper when some path to the descendant uses a proper
    /// edge. Fails on cyclic graphs.
    pub fn transitive_closure(&self) -> Result<Episode, EpisodeError> {
        let (any, strict) = self.reachability();
        let n = self.node_count;
        if (0..n).any(|i| any[i][i]) {
            return Err(EpisodeError::Cyclic);
        }
        let mut proper = BTreeSet::new();
        let mut weak = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !any[a][b] {
                    continue;
                }
                if strict[a][b] {
                    proper.insert((a, b));
                } else {
                    weak.insert((a, b));
                }
            }
        }
        Ok(self.with_edges(proper, weak))
    }

    pub fn is_transitively_closed(&self) -> bool {
        match self.transitive_closure() {
            Ok(tcl) => tcl.proper == self.proper && tcl.weak == self.weak,
            Err(_) => false,
        }
    }

    /// Would `G` plus the weak edge `(a, b)` still equal its own transitive
    /// closure? False when the addition creates a cycle.
    pub fn is_closed_with_weak(&self, a: usize, b: usize) -> bool {
        debug_assert!(!self.has_edge(a, b));
        let mut weak = self.weak.clone();
        weak.insert((a, b));
        self.with_edges(self.proper.clone(), weak).is_transitively_closed()
    }

    /// Would promoting the weak edge `(a, b)` to proper keep the graph
    /// transitively closed?
    pub fn is_closed_with_promotion(&self, a: usize, b: usize) -> bool {
        debug_assert!(self.weak.contains(&(a, b)));
        let mut weak = self.weak.clone();
        weak.remove(&(a, b));
        let mut proper = self.proper.clone();
        proper.insert((a, b));
        self.with_edges(proper, weak).is_transitively_closed()
    }

    /// `a(G) = 3^|pe| * 2^|we|`: the number of subepisodes (transitively
    /// closed or not) sharing this episode's events and nodes.
    pub fn count_same_node_subepisodes(&self) -> u128 {
        let p = self.proper.len() as u32;
        let w = self.weak.len() as u32;
        3u128.saturating_pow(p).saturating_mul(2u128.saturating_pow(w))
    }

    /// Node order used by the textual forms: ascending by label multiset,
    /// ties by original index.
    fn display_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.node_count).collect();
        order.sort_by_key(|&n| (self.node_labels(n), n));
        order
    }

    /// Canonical text, e.g. `nodes: 1{a} 2{b} 3{c} 4{d}; proper: 1>4; weak: -`.
    ///
    /// Nodes are renumbered 1..M in display order; edges are listed
    /// lexicographically, `-` standing for an empty edge set.
    pub fn canonical_text(&self) -> String {
        let order = self.display_order();
        let mut pos = vec![0usize; self.node_count];
        for (i, &n) in order.iter().enumerate() {
            pos[n] = i + 1;
        }
        let nodes = order
            .iter()
            .enumerate()
            .map(|(i, &n)| format!("{}{}", i + 1, self.node_labels(n)))
            .collect::<Vec<_>>()
            .join(" ");
        let fmt_edges = |set: &BTreeSet<(usize, usize)>, sep: char| {
            if set.is_empty() {
                return "-".to_string();
            }
            let mut pairs: Vec<(usize, usize)> =
                set.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
            pairs.sort_unstable();
            pairs
                .iter()
                .map(|(a, b)| format!("{a}{sep}{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "nodes: {}; proper: {}; weak: {}",
            nodes,
            fmt_edges(&self.proper, '>'),
            fmt_edges(&self.weak, '~')
        )
    }

    /// Parses the canonical text form.
    pub fn parse(text: &str) -> Result<Episode, EpisodeError> {
        let err = |pos: usize, reason: &str| EpisodeError::Parse {
            pos,
            reason: reason.to_string(),
        };
        let sections: Vec<&str> = text.split(';').collect();
        if sections.len() != 3 {
            return Err(err(0, "expected `nodes: ...; proper: ...; weak: ...`"));
        }
        let expect_prefix = |section: &str, prefix: &str| -> Result<String, EpisodeError> {
            let trimmed = section.trim_start();
            let off = text.find(section.trim_start()).unwrap_or(0);
            trimmed
                .strip_prefix(prefix)
                .map(|rest| rest.trim().to_string())
                .ok_or_else(|| err(off, &format!("expected section `{prefix}`")))
        };
        let nodes_part = expect_prefix(sections[0], "nodes:")?;
        let proper_part = expect_prefix(sections[1], "proper:")?;
        let weak_part = expect_prefix(sections[2], "weak:")?;

        let mut nodes: Vec<Vec<&str>> = Vec::new();
        for tok in nodes_part.split_whitespace() {
            let pos = text.find(tok).unwrap_or(0);
            let open = tok.find('{').ok_or_else(|| err(pos, "missing `{`"))?;
            if !tok.ends_with('}') {
                return Err(err(pos, "missing `}`"));
            }
            let idx: usize = tok[..open]
                .parse()
                .map_err(|_| err(pos, "bad node index"))?;
            if idx != nodes.len() + 1 {
                return Err(err(pos, "node indices must run 1..M in order"));
            }
            let inner = &tok[open + 1..tok.len() - 1];
            if inner.is_empty() {
                return Err(err(pos, "node without labels"));
            }
            let labels: Vec<&str> = inner.split(',').collect();
            if labels.iter().any(|l| l.is_empty() || l.contains(char::is_whitespace)) {
                return Err(err(pos, "bad label list"));
            }
            nodes.push(labels);
        }

        let parse_edges = |part: &str, sep: char| -> Result<Vec<(usize, usize)>, EpisodeError> {
            if part == "-" || part.is_empty() {
                return Ok(Vec::new());
            }
            let mut edges = Vec::new();
            for tok in part.split_whitespace() {
                let pos = text.find(tok).unwrap_or(0);
                let (a, b) = tok
                    .split_once(sep)
                    .ok_or_else(|| err(pos, &format!("expected `i{sep}j`")))?;
                let a: usize = a.parse().map_err(|_| err(pos, "bad edge source"))?;
                let b: usize = b.parse().map_err(|_| err(pos, "bad edge target"))?;
                if a == 0 || b == 0 || a > nodes.len() || b > nodes.len() {
                    return Err(err(pos, "edge endpoint out of range"));
                }
                edges.push((a - 1, b - 1));
            }
            Ok(edges)
        };
        let proper = parse_edges(&proper_part, '>')?;
        let weak = parse_edges(&weak_part, '~')?;
        let node_slices: Vec<&[&str]> = nodes.iter().map(|v| v.as_slice()).collect();
        Episode::new(&node_slices, &proper, &weak)
    }

    /// A canonical string that is identical for episodes differing only in
    /// node or event numbering. Nodes with distinct label multisets are
    /// ordered by the multiset; within groups of equal multisets every
    /// permutation is tried and the lexicographically smallest encoding wins.
    pub fn canonical_code(&self) -> String {
        let order = self.display_order();
        // group boundaries over equal label multisets
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len()
                && self.node_labels(order[end]) == self.node_labels(order[start])
            {
                end += 1;
            }
            groups.push((start, end));
            start = end;
        }
        let mut best: Option<String> = None;
        let mut perm = order.clone();
        self.canon_rec(&groups, 0, &mut perm, &mut best);
        best.expect("at least one permutation")
    }

    fn canon_rec(
        &self,
        groups: &[(usize, usize)],
        gi: usize,
        perm: &mut Vec<usize>,
        best: &mut Option<String>,
    ) {
        if gi == groups.len() {
            let code = self.encode_with(perm);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        let (s, e) = groups[gi];
        if e - s <= 1 {
            self.canon_rec(groups, gi + 1, perm, best);
            return;
        }
        permute_range(perm, s, e, &mut |p| self.canon_rec(groups, gi + 1, p, best));
    }

    fn encode_with(&self, order: &[usize]) -> String {
        let mut pos = vec![0usize; self.node_count];
        for (i, &n) in order.iter().enumerate() {
            pos[n] = i;
        }
        let nodes = order
            .iter()
            .map(|&n| self.node_labels(n).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let edges = |set: &BTreeSet<(usize, usize)>| {
            let mut pairs: Vec<(usize, usize)> =
                set.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
            pairs.sort_unstable();
            pairs
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("{nodes}|{}|{}", edges(&self.proper), edges(&self.weak))
    }
}

/// Heap's algorithm over `perm[start..end]`, invoking `f` for every
/// permutation (including the identity).
fn permute_range(perm: &mut Vec<usize>, start: usize, end: usize, f: &mut impl FnMut(&mut Vec<usize>)) {
    fn rec(perm: &mut Vec<usize>, start: usize, k: usize, f: &mut impl FnMut(&mut Vec<usize>)) {
        if k <= 1 {
            f(perm);
            return;
        }
        for i in 0..k {
            rec(perm, start, k - 1, f);
            if k % 2 == 0 {
                perm.swap(start + i, start + k - 1);
            } else {
                perm.swap(start, start + k - 1);
            }
        }
    }
    let k = end - start;
    rec(perm, start, k, f);
}

impl fmt::Display for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}
