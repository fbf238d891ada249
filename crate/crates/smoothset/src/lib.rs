//! Dynamic predecessor search for word-sized integer keys, with expected
//! O(log log n) operations in linear space when inserts are drawn from a
//! smooth distribution.
//!
//! The construction cuts each key asymmetrically: the most significant `p`
//! bits go into a hashed van Emde Boas trie (with cluster indirection for
//! linear space), the remaining bits into per-prefix buckets whose expected
//! size is constant under smoothness. A full rebuild every `n0/4`
//! modifications keeps `p` tracking the set size.
//!
//! The crate also ships a distribution laboratory ([`dist`]) for validating
//! the occupancy and smoothness properties empirically, and a workload /
//! benchmark harness ([`workload`], [`bench`]) driven by the `smoothset`
//! CLI.
//!
//! ```
//! use smoothset::{LayeredSet, SmoothParams};
//!
//! let mut set = LayeredSet::new(64, Some(SmoothParams::new(1.0, 1.0)));
//! set.insert(5);
//! set.insert(9);
//! assert_eq!(set.predecessor(9), Some(5));
//! ```

pub mod bench;
pub mod bucket;
pub mod clustered;
pub mod dist;
pub mod maybe_rayon;
pub mod oracle;
pub mod split;
pub mod veb;
pub mod workload;

pub mod layered;

pub use bench::{run_bench, run_equivalence, BenchConfig, RunReport, Verdict};
pub use dist::{occupancy_experiment, sample_key, smoothness_estimate, Distribution, OccupancyReport};
pub use layered::{LayeredSet, SpaceTimeReport};
pub use oracle::Oracle;
pub use split::{split_key, split_width, OpMetrics, SmoothParams, SplitConfig};
pub use veb::{DepthGauge, VebNode};
pub use workload::{gen_workload, Mix, WorkloadOp};
