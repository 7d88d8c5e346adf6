//! Event sequences: the data model, text ingestion and the synthetic
//! planted-pattern generator.
//!
//! A sequence is a list of events `(id, label, ts)` ordered by id, where a
//! larger id never has a smaller time stamp. Several events may share a time
//! stamp, which is how simultaneity enters the picture.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Characters that would collide with the episode text format; labels
/// containing them are rejected at parse time.
const FORBIDDEN_LABEL_CHARS: &[char] = &['{', '}', ',', ';', '#'];

/// A single event of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceEvent {
    /// Unique id, 1-based, increasing with time.
    pub id: u32,
    pub label: String,
    pub ts: i64,
}

/// An id-ordered list of events. Ids increase while time stamps never
/// decrease, so events with equal time stamps sit next to each other.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sequence {
    events: Vec<SequenceEvent>,
}

/// Error raised when sequence text or event data is malformed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("line {line}: malformed event line (expected `<ts> <label>`): {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: time stamp {ts} is smaller than the previous one ({prev})")]
    OrderViolation { line: usize, ts: i64, prev: i64 },
}

impl Sequence {
    /// Builds a sequence from `(ts, label)` pairs in file order, assigning ids
    /// `1..=N`. Fails if the time stamps ever decrease.
    pub fn from_pairs<L: Into<String>>(
        pairs: impl IntoIterator<Item = (i64, L)>,
    ) -> Result<Self, SequenceError> {
        let mut events = Vec::new();
        let mut prev: Option<i64> = None;
        for (pos, (ts, label)) in pairs.into_iter().enumerate() {
            if let Some(p) = prev {
                if ts < p {
                    return Err(SequenceError::OrderViolation {
                        line: pos + 1,
                        ts,
                        prev: p,
                    });
                }
            }
            prev = Some(ts);
            events.push(SequenceEvent {
                id: (pos + 1) as u32,
                label: label.into(),
                ts,
            });
        }
        Ok(Sequence { events })
    }

    /// Parses the sequence file format: one `<ts> <label>` per line, `#`
    /// starting a comment line, blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        let mut events: Vec<SequenceEvent> = Vec::new();
        let mut prev: Option<i64> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let ts_tok = parts.next().expect("non-empty line has a token");
            let ts: i64 = ts_tok.parse().map_err(|_| SequenceError::Malformed {
                line,
                reason: format!("bad time stamp `{ts_tok}`"),
            })?;
            let label = parts
                .next()
                .ok_or_else(|| SequenceError::Malformed {
                    line,
                    reason: "missing label".into(),
                })?
                .to_string();
            if parts.next().is_some() {
                return Err(SequenceError::Malformed {
                    line,
                    reason: "trailing tokens after label".into(),
                });
            }
            if label.contains(FORBIDDEN_LABEL_CHARS) {
                return Err(SequenceError::Malformed {
                    line,
                    reason: format!("label `{label}` contains a reserved character"),
                });
            }
            if let Some(p) = prev {
                if ts < p {
                    return Err(SequenceError::OrderViolation { line, ts, prev: p });
                }
            }
            prev = Some(ts);
            events.push(SequenceEvent {
                id: (events.len() + 1) as u32,
                label,
                ts,
            });
        }
        Ok(Sequence { events })
    }

    /// Renders the sequence in its file format. `parse(serialize(s)) == s`
    /// modulo id renumbering, which is the identity for 1-based sequences.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{} {}\n", e.ts, e.label));
        }
        out
    }

    pub fn events(&self) -> &[SequenceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Distinct labels in ascending byte order; this is the total order the
    /// miner iterates over.
    pub fn alphabet(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.events.iter().map(|e| e.label.as_str()).collect();
        set.into_iter().collect()
    }

    /// All events with `i <= ts <= j`, ids and time stamps preserved.
    /// `i > j` yields the empty sequence.
    pub fn subsequence(&self, i: i64, j: i64) -> Sequence {
        Sequence {
            events: self
                .events
                .iter()
                .filter(|e| i <= e.ts && e.ts <= j)
                .cloned()
                .collect(),
        }
    }

    pub fn min_ts(&self) -> Option<i64> {
        self.events.first().map(|e| e.ts)
    }

    pub fn max_ts(&self) -> Option<i64> {
        self.events.last().map(|e| e.ts)
    }

    /// Index range of the events with `lo <= ts <= hi` (events are ts-sorted).
    pub fn ts_index_range(&self, lo: i64, hi: i64) -> std::ops::Range<usize> {
        let start = self.events.partition_point(|e| e.ts < lo);
        let end = self.events.partition_point(|e| e.ts <= hi);
        start..end.max(start)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Parameters for the synthetic generator.
///
/// The planted pattern `(s1 s2)(s3 s4)...(s_{2N-1} s_{2N})` consists of
/// `nodes` groups of two simultaneous events. Repetition `r` places group `k`
/// at `ts = r * gap + k`. Noise events get labels drawn uniformly from
/// `t1..t_<noise_alphabet>` and time stamps drawn uniformly from
/// `[1, reps * gap]`; noise and pattern labels never overlap.
#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub nodes: u32,
    pub reps: u32,
    pub gap: u32,
    pub noise_count: u32,
    pub noise_alphabet: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlantedError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
}

/// Generates a sequence with the planted pattern plus uniform noise.
///
/// Ids are assigned in time-stamp order; at equal time stamps pattern events
/// come before noise events, further ties break by label and then by
/// generation order. With `noise_count == 0` the output is seed-independent.
pub fn gen_planted(cfg: &PlantedConfig) -> Result<Sequence, PlantedError> {
    if cfg.nodes < 1 || cfg.reps < 1 || cfg.gap < 1 {
        return Err(PlantedError::Invalid(
            "nodes, reps and gap must all be at least 1".into(),
        ));
    }
    if cfg.noise_count > 0 && cfg.noise_alphabet == 0 {
        return Err(PlantedError::Invalid(
            "noise events requested but the noise alphabet is empty".into(),
        ));
    }

    // class 0 = pattern, 1 = noise; the class ranks pattern first on ts ties.
    let mut raw: Vec<(i64, u8, String, usize)> = Vec::new();
    for r in 0..cfg.reps as i64 {
        for k in 1..=cfg.nodes as i64 {
            let ts = r * cfg.gap as i64 + k;
            raw.push((ts, 0, format!("s{}", 2 * k - 1), raw.len()));
            raw.push((ts, 0, format!("s{}", 2 * k), raw.len()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = cfg.reps as i64 * cfg.gap as i64;
    for _ in 0..cfg.noise_count {
        let label = format!("t{}", rng.random_range(1..=cfg.noise_alphabet));
        let ts = rng.random_range(1..=span);
        raw.push((ts, 1, label, raw.len()));
    }
    raw.sort_by(|a, b| (a.0, a.1, &a.2, a.3).cmp(&(b.0, b.1, &b.2, b.3)));
    Ok(Sequence::from_pairs(raw.into_iter().map(|(ts, _, l, _)| (ts, l)))
        .expect("sorted pairs satisfy the ordering invariant"))
}
