//! Frequent closed episode mining over a single event sequence.
//!
//! An *episode* is a multiset of labelled events partitioned into the nodes of
//! a DAG. Two kinds of edges constrain relative timing: a *weak* edge states
//! that the target occurs at the same time as the source or later, a *proper*
//! edge states that it occurs strictly later. Events sharing a node must occur
//! simultaneously, which makes the pattern type expressive enough for streams
//! where several sensors fire at the same tick.
//!
//! The miner walks the pattern space depth first, keeps instance sets (all
//! concrete embeddings of the current episode into the sequence) as its
//! projected database, counts support as the number of sliding windows that
//! cover the episode, and prunes with the instance-closure: the episode whose
//! edges are exactly the timing relations holding in every instance. Closed
//! episodes — those with no strict superepisode of equal support — are
//! obtained from the instance-closed candidates by a final filter built on an
//! exact subepisode decision procedure.
//!
//! ```
//! use episodary::{mine, MinerConfig, Sequence};
//!
//! let seq = Sequence::parse("1 a\n1 a\n2 b\n3 a").unwrap();
//! let out = mine(&seq, &MinerConfig::new(2, 2)).unwrap();
//! assert_eq!(out.stats.closed, 3);
//! ```

pub mod cli;
pub mod episode;
pub mod instance;
pub mod miner;
pub mod oracle;
pub mod sequence;
pub mod subepisode;

pub use episode::{Episode, LabelMultiset};
pub use instance::InstanceSet;
pub use miner::{mine, MineOutcome, MinerConfig, MinerStats};
pub use sequence::{gen_planted, PlantedConfig, Sequence, SequenceEvent};
pub use subepisode::{similar, subepisode};
