//! Instance sets: all concrete embeddings of an episode into the sequence
//! within one window span. They play the role of a projected database — the
//! miner never rescans the sequence, it only refines instance sets.
//!
//! An instance maps every episode event to a distinct sequence event with the
//! same label, events on one node to one time stamp, and honours every weak
//! (`<=`) and proper (`<`) constraint. Its span `last - first` stays below
//! the window size. When several sequence events share a label and a time
//! stamp, only the mapping using the smallest ids is kept (the
//! non-redundancy rule): of `k` interchangeable events an instance always
//! uses the `k` with the smallest ids.

use std::collections::BTreeSet;

use crate::episode::Episode;
use crate::sequence::Sequence;

/// One embedding: `map[e]` is the index (into `Sequence::events`) of the
/// sequence event that episode event `e` maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    map: Vec<u32>,
    first: i64,
    last: i64,
}

impl Instance {
    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.last
    }

    /// Mapped sequence event indices in episode-event order.
    pub fn mapping(&self) -> &[u32] {
        &self.map
    }

    fn sort_key(&self) -> (i64, i64, &[u32]) {
        (self.first, self.last, &self.map)
    }
}

/// The ordered list of all instances of one episode.
///
/// Instances are kept sorted by `(first, last, mapping)`; the primary
/// `first` order is what the support computation requires, the rest pins a
/// deterministic output order.
#[derive(Debug, Clone)]
pub struct InstanceSet {
    episode: Episode,
    instances: Vec<Instance>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance-closure of an empty instance set is undefined")]
    EmptyClosure,
}

impl InstanceSet {
    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Replaces the episode, keeping the instances. Valid only when the new
    /// episode has the same events and nodes (e.g. after an instance-closure
    /// added edges that already hold in every instance).
    pub fn with_episode(&self, episode: Episode) -> InstanceSet {
        debug_assert_eq!(episode.event_count(), self.episode.event_count());
        debug_assert_eq!(episode.node_count(), self.episode.node_count());
        InstanceSet {
            episode,
            instances: self.instances.clone(),
        }
    }

    /// The time stamp node `n` takes under instance `i`.
    pub fn node_ts(&self, s: &Sequence, i: &Instance, node: usize) -> i64 {
        let event = (0..self.episode.event_count())
            .find(|&e| self.episode.node_of_event(e) == node)
            .expect("nodes are never empty");
        s.events()[i.map[event] as usize].ts
    }

    /// Mapped sequence-event ids (1-based) of each instance, for fixtures.
    pub fn mapped_ids(&self, s: &Sequence) -> Vec<Vec<u32>> {
        self.instances
            .iter()
            .map(|i| i.map.iter().map(|&c| s.events()[c as usize].id).collect())
            .collect()
    }

    fn normalize(&mut self) {
        self.instances
            .sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.instances.dedup();
    }
}

fn make_instance(s: &Sequence, map: Vec<u32>) -> Instance {
    let mut first = i64::MAX;
    let mut last = i64::MIN;
    for &c in &map {
        let ts = s.events()[c as usize].ts;
        first = first.min(ts);
        last = last.max(ts);
    }
    Instance { map, first, last }
}

/// All sequence events with `label` whose smaller-id twins (same label and
/// time stamp) are all contained in `used`.
fn non_redundant(s: &Sequence, e: usize, used: &[u32]) -> bool {
    let ev = &s.events()[e];
    // equal-ts events are contiguous in id order; scan left
    for c in (0..e).rev() {
        let other = &s.events()[c];
        if other.ts != ev.ts {
            break;
        }
        if other.label == ev.label && !used.contains(&(c as u32)) {
            return false;
        }
    }
    true
}

/// Instances of the singleton episode with `label`: one per occurrence,
/// except occurrences shadowed by an equal-label simultaneous event with a
/// smaller id.
pub fn build_singletons(s: &Sequence, label: &str, rho: u64) -> InstanceSet {
    debug_assert!(rho >= 1);
    let episode = Episode::singleton(label);
    let mut set = InstanceSet {
        episode,
        instances: Vec::new(),
    };
    for (idx, e) in s.events().iter().enumerate() {
        if e.label == label && non_redundant(s, idx, &[]) {
            set.instances.push(make_instance(s, vec![idx as u32]));
        }
    }
    set.normalize();
    debug_assert!(validate_set(s, &set, rho));
    set
}

/// Adds an event with `label` to the existing node `node`: each instance is
/// joined with every simultaneous unused occurrence of the label. Spans do
/// not change.
pub fn augment_equal(s: &Sequence, iset: &InstanceSet, node: usize, label: &str) -> InstanceSet {
    let episode = iset.episode.with_event_on_node(node, label);
    let mut out = InstanceSet {
        episode,
        instances: Vec::new(),
    };
    for inst in &iset.instances {
        let ts = iset.node_ts(s, inst, node);
        for idx in s.ts_index_range(ts, ts) {
            let e = &s.events()[idx];
            if e.label != label {
                continue;
            }
            let idx32 = idx as u32;
            if inst.map.contains(&idx32) || !non_redundant(s, idx, &inst.map) {
                continue;
            }
            let mut map = inst.map.clone();
            map.push(idx32);
            out.instances.push(Instance {
                map,
                first: inst.first,
                last: inst.last,
            });
        }
    }
    out.normalize();
    out
}

/// Adds a fresh node with a single event labelled `label`: each instance is
/// joined with every occurrence that keeps the span within the window.
pub fn augment(s: &Sequence, iset: &InstanceSet, label: &str, rho: u64) -> InstanceSet {
    let episode = iset.episode.with_new_node(label);
    let span = rho as i64 - 1;
    let mut out = InstanceSet {
        episode,
        instances: Vec::new(),
    };
    for inst in &iset.instances {
        // an addition keeps the span iff its ts lies in this range
        for idx in s.ts_index_range(inst.last - span, inst.first + span) {
            let e = &s.events()[idx];
            if e.label != label {
                continue;
            }
            let first = inst.first.min(e.ts);
            let last = inst.last.max(e.ts);
            debug_assert!(last - first <= span);
            let idx32 = idx as u32;
            if inst.map.contains(&idx32) || !non_redundant(s, idx, &inst.map) {
                continue;
            }
            let mut map = inst.map.clone();
            map.push(idx32);
            out.instances.push(Instance { map, first, last });
        }
    }
    out.normalize();
    debug_assert!(validate_set(s, &out, rho));
    out
}

/// Keeps the instances with `ts(i(a)) <= ts(i(b))`.
pub fn filter_weak(s: &Sequence, iset: &InstanceSet, a: usize, b: usize) -> InstanceSet {
    filter_by(s, iset, a, b, false)
}

/// Keeps the instances with `ts(i(a)) < ts(i(b))`.
pub fn filter_proper(s: &Sequence, iset: &InstanceSet, a: usize, b: usize) -> InstanceSet {
    filter_by(s, iset, a, b, true)
}

fn filter_by(s: &Sequence, iset: &InstanceSet, a: usize, b: usize, strict: bool) -> InstanceSet {
    debug_assert!(a != b);
    let instances = iset
        .instances
        .iter()
        .filter(|i| {
            let (ta, tb) = (iset.node_ts(s, i, a), iset.node_ts(s, i, b));
            if strict {
                ta < tb
            } else {
                ta <= tb
            }
        })
        .cloned()
        .collect();
    InstanceSet {
        episode: iset.episode.clone(),
        instances,
    }
}

/// The number of windows of size `rho` containing at least one instance.
///
/// First pass (reverse): drop any instance that contains another one, i.e.
/// keep a strictly decreasing `last` while `first` decreases. Second pass:
/// each survivor contributes the windows that hold it, minus the overlap
/// with its predecessor's windows.
pub fn support(iset: &InstanceSet, rho: u64) -> u64 {
    let rho = rho as i64;
    let mut kept: Vec<&Instance> = Vec::new();
    let mut l = i64::MAX;
    for inst in iset.instances.iter().rev() {
        if inst.last < l {
            kept.push(inst);
            l = inst.last;
        }
    }
    kept.reverse();
    let mut total: i64 = 0;
    let mut prev_first: Option<i64> = None;
    for inst in kept {
        let mut d = rho - (inst.last - inst.first);
        let a = 1 + inst.last - rho;
        if let Some(pf) = prev_first {
            d -= (1 + pf - a).max(0);
        }
        debug_assert!(d >= 0);
        total += d;
        prev_first = Some(inst.first);
    }
    total as u64
}

/// The instance-closure: the episode with the same events and nodes whose
/// proper edges are the node pairs strictly ordered in *every* instance and
/// whose weak edges are the pairs weakly ordered in every instance (minus
/// the proper ones). May contain weak cycles when two nodes always coincide;
/// the caller checks with [`Episode::has_cycle`].
pub fn instance_closure(s: &Sequence, iset: &InstanceSet) -> Result<Episode, InstanceError> {
    if iset.is_empty() {
        return Err(InstanceError::EmptyClosure);
    }
    let n = iset.episode.node_count();
    let mut proper = BTreeSet::new();
    let mut weak = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut all_lt = true;
            let mut all_le = true;
            for inst in &iset.instances {
                let (ta, tb) = (iset.node_ts(s, inst, a), iset.node_ts(s, inst, b));
                all_lt &= ta < tb;
                all_le &= ta <= tb;
                if !all_le {
                    break;
                }
            }
            if all_lt {
                proper.insert((a, b));
            } else if all_le {
                weak.insert((a, b));
            }
        }
    }
    Ok(iset.episode.with_edges(proper, weak))
}

/// Enumerates `inst(G)` directly by backtracking, independent of the
/// augmentation route. Intended for tests and one-shot queries.
pub fn instances_of(s: &Sequence, episode: &Episode, rho: u64) -> InstanceSet {
    let mut out = InstanceSet {
        episode: episode.clone(),
        instances: Vec::new(),
    };
    if episode.event_count() == 0 {
        return out;
    }
    let (any, strict) = episode.reachability();
    let mut node_ts: Vec<Option<i64>> = vec![None; episode.node_count()];
    let mut map: Vec<u32> = Vec::new();
    enumerate_rec(
        s,
        episode,
        &any,
        &strict,
        rho as i64 - 1,
        &mut node_ts,
        &mut map,
        &mut out.instances,
    );
    out.normalize();
    debug_assert!(validate_set(s, &out, rho));
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    s: &Sequence,
    ep: &Episode,
    any: &[Vec<bool>],
    strict: &[Vec<bool>],
    span: i64,
    node_ts: &mut Vec<Option<i64>>,
    map: &mut Vec<u32>,
    out: &mut Vec<Instance>,
) {
    let event = map.len();
    if event == ep.event_count() {
        out.push(make_instance(s, map.clone()));
        return;
    }
    let node = ep.node_of_event(event);
    for (idx, e) in s.events().iter().enumerate() {
        if e.label != ep.event_label(event) {
            continue;
        }
        let idx32 = idx as u32;
        if map.contains(&idx32) || !non_redundant(s, idx, map) {
            continue;
        }
        let within_span = |ts: i64| {
            map.iter().all(|&c| (s.events()[c as usize].ts - ts).abs() <= span)
        };
        if !within_span(e.ts) {
            continue;
        }
        let prev = node_ts[node];
        if let Some(t) = prev {
            if t != e.ts {
                continue;
            }
        } else {
            if !edge_consistent(ep, any, strict, node, e.ts, node_ts) {
                continue;
            }
            node_ts[node] = Some(e.ts);
        }
        map.push(idx32);
        enumerate_rec(s, ep, any, strict, span, node_ts, map, out);
        map.pop();
        node_ts[node] = prev;
    }
}

fn edge_consistent(
    ep: &Episode,
    any: &[Vec<bool>],
    strict: &[Vec<bool>],
    node: usize,
    ts: i64,
    node_ts: &[Option<i64>],
) -> bool {
    for other in 0..ep.node_count() {
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

/// Full invariant check for every instance of a set (debug builds and tests).
pub(crate) fn validate_set(s: &Sequence, iset: &InstanceSet, rho: u64) -> bool {
    let ep = &iset.episode;
    let (any, strict) = ep.reachability();
    iset.instances.iter().all(|inst| {
        let distinct: BTreeSet<u32> = inst.map.iter().copied().collect();
        if distinct.len() != inst.map.len() || inst.map.len() != ep.event_count() {
            return false;
        }
        if inst.last - inst.first > rho as i64 - 1 {
            return false;
        }
        for (e, &c) in inst.map.iter().enumerate() {
            if s.events()[c as usize].label != ep.event_label(e) {
                return false;
            }
            if !non_redundant_within(s, c as usize, &inst.map) {
                return false;
            }
        }
        let ts_of = |n: usize| iset.node_ts(s, inst, n);
        for e in 0..ep.event_count() {
            if s.events()[inst.map[e] as usize].ts != ts_of(ep.node_of_event(e)) {
                return false;
            }
        }
        for a in 0..ep.node_count() {
            for b in 0..ep.node_count() {
                if a == b {
                    continue;
                }
                if strict[a][b] && ts_of(a) >= ts_of(b) {
                    return false;
                }
                if any[a][b] && ts_of(a) > ts_of(b) {
                    return false;
                }
            }
        }
        true
    })
}

fn non_redundant_within(s: &Sequence, e: usize, used: &[u32]) -> bool {
    non_redundant(s, e, used)
}
