//! Workload generation for the i.i.d.-insert / uniform-delete input model.
//!
//! Insert keys are drawn from the configured density; deletes carry no key
//! and are resolved at execution time by drawing uniformly from the live
//! set, which is what keeps the stored set distributed like a fresh sample.
//! Query points default to the insert distribution so they land in the
//! populated region; that choice is overridable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dist::{sample_key, Distribution};

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("workload must contain at least one operation")]
    Empty,
    #[error("mix percentages must sum to 100, got {0}")]
    BadMix(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkloadOp {
    Insert(u64),
    /// Victim chosen uniformly from the live set when executed.
    DeleteRandomContained,
    Predecessor(u64),
}

/// Operation mix in percent; must sum to 100.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mix {
    pub insert_pct: u32,
    pub delete_pct: u32,
    pub query_pct: u32,
}

impl Mix {
    pub fn new(insert_pct: u32, delete_pct: u32, query_pct: u32) -> Result<Self, WorkloadError> {
        let sum = insert_pct + delete_pct + query_pct;
        if sum != 100 {
            return Err(WorkloadError::BadMix(sum));
        }
        Ok(Mix { insert_pct, delete_pct, query_pct })
    }

    /// Deletion-heavy mixes mostly hit an empty set; flag them for the CLI.
    pub fn delete_exceeds_insert(&self) -> bool {
        self.delete_pct > self.insert_pct
    }
}

impl std::fmt::Display for Mix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.insert_pct, self.delete_pct, self.query_pct)
    }
}

/// Deterministic operation sequence for `seed`.
pub fn gen_workload(
    d: &Distribution,
    n_ops: usize,
    mix: Mix,
    seed: u64,
    w: u32,
    query_dist: Option<Distribution>,
) -> Result<Vec<WorkloadOp>, WorkloadError> {
    if n_ops == 0 {
        return Err(WorkloadError::Empty);
    }
    let qd = query_dist.unwrap_or(*d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Vec::with_capacity(n_ops);
    for _ in 0..n_ops {
        let r = rng.random_range(0..100u32);
        let op = if r < mix.insert_pct {
            WorkloadOp::Insert(sample_key(d, &mut rng, w))
        } else if r < mix.insert_pct + mix.delete_pct {
            WorkloadOp::DeleteRandomContained
        } else {
            WorkloadOp::Predecessor(sample_key(&qd, &mut rng, w))
        };
        ops.push(op);
    }
    Ok(ops)
}
