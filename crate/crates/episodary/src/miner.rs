//! The depth-first mining engine.
//!
//! Three levels or search: the event level grows episodes by adding an event
//! to the newest node or opening a fresh node (labels per node descending
//! across nodes, ascending within a node, so each parallel shape is built
//! along one canonical path); the weak-edge level inserts weak edges; the
//! proper-edge level promotes weak edges to proper ones. Edge levels only
//! take steps that keep the episode transitively closed, and forbidden sets
//! make sibling branches disjoint.
//!
//! Every candidate passes through [`Search::test_episode`]: support first,
//! then the instance-closure, whose result is dropped when it has weak
//! cycles (two nodes that always coincide — the merged episode is found on
//! another branch) or reintroduces an edge a previous branch owns. Survivors
//! maintain the store of discovered episodes: an episode is suppressed by a
//! stored superepisode of equal support and evicts stored subepisodes of
//! equal support. A final filter over the store guarantees that only closed
//! episodes leave the miner.

use std::collections::{BTreeSet, HashSet};

use crate::episode::{lex_leq, Episode, LabelMultiset};
use crate::instance::{self, InstanceSet};
use crate::sequence::Sequence;
use crate::subepisode;

/// Mining parameters.
#[derive(Debug, Clone)]
pub struct MinerConfig {
    /// Sliding window size in time units (>= 1).
    pub window: u64,
    /// Support threshold: minimum number of covering windows (>= 1).
    pub min_support: u64,
    /// Hard cap on the size of any materialised instance set.
    pub instance_abort: usize,
}

impl MinerConfig {
    pub const DEFAULT_INSTANCE_ABORT: usize = 10_000_000;

    pub fn new(window: u64, min_support: u64) -> Self {
        MinerConfig {
            window,
            min_support,
            instance_abort: Self::DEFAULT_INSTANCE_ABORT,
        }
    }
}

/// Counters reported after a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinerStats {
    /// Number of support computations (sequence scans).
    pub scans: u64,
    /// Distinct instance-closed episodes that passed every test.
    pub i_closed: u64,
    /// Size of the final closed output.
    pub closed: u64,
    /// Lower bound on the number of frequent episodes: among the i-closed
    /// episodes the maximal `a(G) = 3^|pe| * 2^|we|` is found, and every
    /// distinct event-label multiset attaining it contributes `a(G)`
    /// pairwise different subepisodes.
    pub frequent_estimate: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MinerError {
    #[error("invalid miner configuration: {0}")]
    InvalidConfig(String),
    #[error("instance set for branch `{branch}` exceeded the abort threshold ({count} instances)")]
    ResourceAbort { branch: String, count: usize },
}

/// Result of a mining run: the closed episodes (supports attached, sorted by
/// descending support then canonical text) plus every distinct i-closed
/// episode the search visited.
#[derive(Debug, Clone)]
pub struct MineOutcome {
    pub closed: Vec<Episode>,
    pub i_closed: Vec<Episode>,
    pub stats: MinerStats,
}

/// Mines all frequent closed episodes of `s` under `cfg`.
pub fn mine(s: &Sequence, cfg: &MinerConfig) -> Result<MineOutcome, MinerError> {
    if cfg.window < 1 {
        return Err(MinerError::InvalidConfig("window must be at least 1".into()));
    }
    if cfg.min_support < 1 {
        return Err(MinerError::InvalidConfig(
            "min-support must be at least 1".into(),
        ));
    }
    let alphabet: Vec<String> = s.alphabet().iter().map(|l| l.to_string()).collect();
    let mut search = Search {
        seq: s,
        cfg,
        store: Vec::new(),
        visited: HashSet::new(),
        i_closed: Vec::new(),
        scans: 0,
    };
    for label in &alphabet {
        let iset = instance::build_singletons(s, label, cfg.window);
        search.check_abort(&iset)?;
        if let Some(ep) = search.test_episode(&iset, &BTreeSet::new(), &BTreeSet::new()) {
            search.mine_parallel(&iset.with_episode(ep), &alphabet)?;
        }
    }

    let closed = post_filter(std::mem::take(&mut search.store));
    let mut closed: Vec<Episode> = closed
        .into_iter()
        .map(|st| {
            let mut ep = st.episode;
            ep.set_support(st.support);
            ep
        })
        .collect();
    sort_output(&mut closed);
    let mut i_closed = std::mem::take(&mut search.i_closed);
    sort_output(&mut i_closed);

    let stats = MinerStats {
        scans: search.scans,
        i_closed: i_closed.len() as u64,
        closed: closed.len() as u64,
        frequent_estimate: frequent_estimate(&i_closed),
    };
    log::info!(
        "mined {} closed / {} i-closed episodes in {} scans",
        stats.closed,
        stats.i_closed,
        stats.scans
    );
    Ok(MineOutcome {
        closed,
        i_closed,
        stats,
    })
}

fn sort_output(eps: &mut [Episode]) {
    eps.sort_by(|a, b| {
        b.support()
            .cmp(&a.support())
            .then_with(|| a.canonical_text().cmp(&b.canonical_text()))
    });
}

struct Stored {
    episode: Episode,
    support: u64,
    labels: LabelMultiset,
}

struct Search<'a> {
    seq: &'a Sequence,
    cfg: &'a MinerConfig,
    store: Vec<Stored>,
    visited: HashSet<String>,
    i_closed: Vec<Episode>,
    scans: u64,
}

type EdgeSet = BTreeSet<(usize, usize)>;

impl Search<'_> {
    fn check_abort(&self, iset: &InstanceSet) -> Result<(), MinerError> {
        if iset.len() > self.cfg.instance_abort {
            return Err(MinerError::ResourceAbort {
                branch: iset.episode().canonical_text(),
                count: iset.len(),
            });
        }
        Ok(())
    }

    /// Event level: first explore edges of the current episode, then extend
    /// the newest node with equal-time events of labels `>=` its maximum,
    /// then open a new node for labels `<=` its minimum.
    fn mine_parallel(&mut self, iset: &InstanceSet, alphabet: &[String]) -> Result<(), MinerError> {
        self.mine_weak(iset, &EdgeSet::new())?;
        let g = iset.episode();
        let last = g.node_count() - 1;
        let last_labels = g.node_labels(last);
        let max_label = last_labels.max_label().expect("nodes are never empty").to_string();
        let min_label = last_labels.min_label().expect("nodes are never empty").to_string();

        for x in alphabet.iter().filter(|x| x.as_str() >= max_label.as_str()) {
            if g.node_count() > 1 {
                let mut grown = last_labels.clone();
                grown.insert(x.clone());
                if !lex_leq(&grown, &g.node_labels(last - 1)) {
                    continue;
                }
            }
            let j = instance::augment_equal(self.seq, iset, last, x);
            self.check_abort(&j)?;
            if let Some(h) = self.test_episode(&j, &EdgeSet::new(), &EdgeSet::new()) {
                self.mine_parallel(&j.with_episode(h), alphabet)?;
            }
        }

        for x in alphabet.iter().filter(|x| x.as_str() <= min_label.as_str()) {
            let j = instance::augment(self.seq, iset, x, self.cfg.window);
            self.check_abort(&j)?;
            if let Some(h) = self.test_episode(&j, &EdgeSet::new(), &EdgeSet::new()) {
                self.mine_parallel(&j.with_episode(h), alphabet)?;
            }
        }
        Ok(())
    }

    /// Weak-edge level. `forbidden` holds the weak edges explored by earlier
    /// sibling branches; the closure reintroducing one of them means the
    /// episode was already reachable there.
    fn mine_weak(&mut self, iset: &InstanceSet, forbidden: &EdgeSet) -> Result<(), MinerError> {
        let g = iset.episode();
        let n = g.node_count();
        // every present non-edge is off limits for the proper phase: a
        // closure-added weak edge there means the episode belongs to a
        // weak-level branch instead
        let all_non_edges: EdgeSet = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && !g.has_edge(a, b))
            .collect();
        self.mine_proper(iset, &all_non_edges, &EdgeSet::new())?;

        let mut forbidden = forbidden.clone();
        let candidates: Vec<(usize, usize)> = all_non_edges
            .iter()
            .filter(|e| !forbidden.contains(e))
            .copied()
            .collect();
        for (a, b) in candidates {
            if !g.is_closed_with_weak(a, b) {
                continue;
            }
            let j = instance::filter_weak(self.seq, iset, a, b);
            if let Some(h) = self.test_episode(&j, &forbidden, &EdgeSet::new()) {
                self.mine_weak(&j.with_episode(h), &forbidden)?;
            }
            forbidden.insert((a, b));
        }
        Ok(())
    }

    /// Proper-edge level: promotes weak edges that keep the closure intact.
    fn mine_proper(
        &mut self,
        iset: &InstanceSet,
        forbidden_weak: &EdgeSet,
        forbidden_proper: &EdgeSet,
    ) -> Result<(), MinerError> {
        let g = iset.episode();
        let mut forbidden_proper = forbidden_proper.clone();
        let candidates: Vec<(usize, usize)> = g
            .weak_edges()
            .iter()
            .filter(|e| !forbidden_proper.contains(e))
            .copied()
            .collect();
        for (a, b) in candidates {
            if !g.is_closed_with_promotion(a, b) {
                continue;
            }
            let j = instance::filter_proper(self.seq, iset, a, b);
            if let Some(h) = self.test_episode(&j, forbidden_weak, &forbidden_proper) {
                self.mine_proper(&j.with_episode(h), forbidden_weak, &forbidden_proper)?;
            }
            forbidden_proper.insert((a, b));
        }
        Ok(())
    }

    /// The four tests plus store maintenance. Returns the instance-closure
    /// when the branch stays alive, `None` when it dies.
    fn test_episode(&mut self, iset: &InstanceSet, w: &EdgeSet, p: &EdgeSet) -> Option<Episode> {
        self.scans += 1;
        let support = instance::support(iset, self.cfg.window);
        if support < self.cfg.min_support {
            return None;
        }
        let mut g = instance::instance_closure(self.seq, iset)
            .expect("a frequent instance set is never empty");
        if g.has_cycle() {
            return None;
        }
        if g.weak_edges().iter().any(|e| w.contains(e))
            || g.proper_edges().iter().any(|e| p.contains(e))
        {
            return None;
        }
        g.set_support(support);
        debug_assert!(node_order_invariant(&g), "{}", g.canonical_text());

        // one visit per episode: a second route here would re-explore an
        // identical subtree
        if !self.visited.insert(g.canonical_code()) {
            return None;
        }
        self.i_closed.push(g.clone());
        log::debug!("i-closed {} support {}", g.canonical_text(), support);

        let g_labels = g.label_multiset();
        let mut doomed: Vec<usize> = Vec::new();
        for (idx, stored) in self.store.iter().enumerate() {
            if stored.support != support {
                continue;
            }
            if g_labels.subset_of(&stored.labels)
                && subepisode::step(std::slice::from_ref(&g), &stored.episode)
            {
                // a superepisode with the same support is already known;
                // continue the branch but do not store this episode
                debug_assert!(doomed.is_empty());
                return Some(g);
            }
            if stored.labels.subset_of(&g_labels)
                && subepisode::step(std::slice::from_ref(&stored.episode), &g)
            {
                doomed.push(idx);
            }
        }
        if !doomed.is_empty() {
            let mut idx = 0;
            self.store.retain(|_| {
                let keep = !doomed.contains(&idx);
                idx += 1;
                keep
            });
        }
        self.store.push(Stored {
            episode: g.clone(),
            support,
            labels: g_labels,
        });
        Some(g)
    }
}

/// Node label multisets never increase along the creation order.
fn node_order_invariant(g: &Episode) -> bool {
    (1..g.node_count()).all(|i| lex_leq(&g.node_labels(i), &g.node_labels(i - 1)))
}

/// Removes every episode dominated by another stored episode of the same
/// support. The store maintenance already keeps this near-empty; the filter
/// is the definitive guarantee regardless of discovery order.
fn post_filter(store: Vec<Stored>) -> Vec<Stored> {
    #[cfg(debug_assertions)]
    if store.len() <= 64 {
        // a superepisode with strictly higher support would contradict
        // support monotonicity
        for g in &store {
            for h in &store {
                if h.support > g.support && g.labels.subset_of(&h.labels) {
                    debug_assert!(!subepisode::step(std::slice::from_ref(&g.episode), &h.episode));
                }
            }
        }
    }
    let dominated: Vec<bool> = store
        .iter()
        .enumerate()
        .map(|(i, g)| {
            store.iter().enumerate().any(|(j, h)| {
                i != j
                    && g.support == h.support
                    && g.labels.subset_of(&h.labels)
                    && subepisode::step(std::slice::from_ref(&g.episode), &h.episode)
                    && !subepisode::step(std::slice::from_ref(&h.episode), &g.episode)
            })
        })
        .collect();
    store
        .into_iter()
        .zip(dominated)
        .filter(|(_, dead)| !dead)
        .map(|(st, _)| st)
        .collect()
}

/// The lower-bound estimate for the number of frequent episodes.
fn frequent_estimate(i_closed: &[Episode]) -> u128 {
    let Some(max_a) = i_closed
        .iter()
        .map(Episode::count_same_node_subepisodes)
        .max()
    else {
        return 0;
    };
    let sets: HashSet<LabelMultiset> = i_closed
        .iter()
        .filter(|e| e.count_same_node_subepisodes() == max_a)
        .map(Episode::label_multiset)
        .collect();
    sets.len() as u128 * max_a
}
