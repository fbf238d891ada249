//! Lockstep equivalence checking and benchmarking.
//!
//! Both runners resolve `DeleteRandomContained` placeholders from a seeded
//! victim stream against the oracle's live set, so the optimized structure
//! and the reference see the identical operation sequence.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::layered::LayeredSet;
use crate::oracle::Oracle;
use crate::split::SmoothParams;
use crate::workload::{Mix, WorkloadOp};

/// Result of a lockstep run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Divergence { index: usize, detail: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Executes `ops` against both the layered structure and the oracle,
/// comparing every return value. The victim stream is seeded by
/// `victim_seed` so a re-run reproduces the exact divergence.
pub fn run_equivalence(
    ops: &[WorkloadOp],
    w: u32,
    params: Option<SmoothParams>,
    cluster_cap: Option<usize>,
    victim_seed: u64,
) -> Verdict {
    let mut set = LayeredSet::with_options(w, params, cluster_cap);
    let mut oracle = Oracle::new();
    let mut victims = ChaCha8Rng::seed_from_u64(victim_seed);
    for (index, op) in ops.iter().enumerate() {
        match op {
            WorkloadOp::Insert(k) => {
                let (a, b) = (set.insert(*k), oracle.insert(*k));
                if a != b {
                    return diverge(index, format!("insert({k}): set {a}, oracle {b}"));
                }
            }
            WorkloadOp::DeleteRandomContained => {
                if oracle.is_empty() {
                    continue;
                }
                let victim = oracle.keys()[victims.random_range(0..oracle.len())];
                let (a, b) = (set.delete(victim), oracle.remove(victim));
                if a != b {
                    return diverge(index, format!("delete({victim}): set {a}, oracle {b}"));
                }
            }
            WorkloadOp::Predecessor(x) => {
                let (a, b) = (set.predecessor(*x), oracle.predecessor(*x));
                if a != b {
                    return diverge(index, format!("pred({x}): set {a:?}, oracle {b:?}"));
                }
            }
        }
        if set.len() != oracle.len() {
            return diverge(index, format!("size skew: set {}, oracle {}", set.len(), oracle.len()));
        }
    }
    Verdict::Pass
}

fn diverge(index: usize, detail: String) -> Verdict {
    Verdict::Divergence { index, detail }
}

/// Exhaustive check of every 3-operation sequence over a fixed key pool,
/// from several initial states. Covers the boundary cases a random workload
/// rarely hits on a small universe.
pub fn exhaustive_triples(w: u32, pool: &[u64], params: Option<SmoothParams>) -> Verdict {
    #[derive(Clone, Copy)]
    enum Op {
        Ins(u64),
        Del(u64),
        Pred(u64),
    }
    let mut ops = Vec::with_capacity(pool.len() * 3);
    for &k in pool {
        ops.push(Op::Ins(k));
        ops.push(Op::Del(k));
        ops.push(Op::Pred(k));
    }
    // Initial states: empty, the full pool, every other pool key.
    let initials: [Vec<u64>; 3] = [
        Vec::new(),
        pool.to_vec(),
        pool.iter().copied().step_by(2).collect(),
    ];
    let mut sequence = 0usize;
    for init in &initials {
        for &a in &ops {
            for &b in &ops {
                for &c in &ops {
                    let mut set = LayeredSet::new(w, params);
                    let mut oracle = Oracle::new();
                    for &k in init {
                        set.insert(k);
                        oracle.insert(k);
                    }
                    for (i, op) in [a, b, c].into_iter().enumerate() {
                        let ok = match op {
                            Op::Ins(k) => set.insert(k) == oracle.insert(k),
                            Op::Del(k) => set.delete(k) == oracle.remove(k),
                            Op::Pred(k) => {
                                set.predecessor(k) == oracle.predecessor(k)
                                    && set.successor(k) == oracle.successor(k)
                            }
                        };
                        if !ok {
                            return diverge(sequence * 3 + i, format!("triple #{sequence} step {i}"));
                        }
                    }
                    if set.collect() != oracle.keys() {
                        return diverge(sequence * 3 + 2, format!("triple #{sequence}: final contents differ"));
                    }
                    sequence += 1;
                }
            }
        }
    }
    Verdict::Pass
}

/// Configuration echoed into the CSV row.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub w: u32,
    pub params: Option<SmoothParams>,
    pub cluster_cap: Option<usize>,
    pub mix: Mix,
    pub dist_name: String,
    pub seed: u64,
    /// Fraction of the workload executed before timers and metrics start.
    pub warmup_frac: f64,
}

/// Per-run measurement report. Latencies are per-op nanoseconds from
/// batched timing (one stopwatch read per [`TIMING_BATCH`] operations).
#[derive(Clone, Debug)]
pub struct RunReport {
    pub n_ops: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub queries: usize,
    pub p50_ns: f64,
    pub p99_ns: f64,
    pub max_ns: f64,
    pub mean_levels: f64,
    pub max_levels: u32,
    pub mean_bucket: f64,
    pub max_bucket: usize,
    pub p99_bucket: usize,
    pub entries_per_key: f64,
    pub rebuilds: u64,
    pub p_final: u32,
    pub n_final: usize,
    pub seed: u64,
}

/// Operations per stopwatch read; defeats clock granularity.
pub const TIMING_BATCH: usize = 1024;

/// Executes the workload on a fresh structure and gathers the report.
pub fn run_bench(ops: &[WorkloadOp], cfg: &BenchConfig) -> RunReport {
    let mut set = LayeredSet::with_options(cfg.w, cfg.params, cfg.cluster_cap);
    let mut live = Oracle::new();
    let mut victims = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);
    let warmup = ((ops.len() as f64) * cfg.warmup_frac) as usize;

    let mut inserts = 0usize;
    let mut deletes = 0usize;
    let mut queries = 0usize;
    let mut batch_ns: Vec<f64> = Vec::new();
    let mut batch_start = Instant::now();
    let mut in_batch = 0usize;

    for (i, op) in ops.iter().enumerate() {
        if i == warmup {
            set.reset_stats();
            batch_start = Instant::now();
            in_batch = 0;
        }
        match op {
            WorkloadOp::Insert(k) => {
                set.insert(*k);
                live.insert(*k);
                inserts += 1;
            }
            WorkloadOp::DeleteRandomContained => {
                deletes += 1;
                if !live.is_empty() {
                    let victim = live.keys()[victims.random_range(0..live.len())];
                    set.delete(victim);
                    live.remove(victim);
                }
            }
            WorkloadOp::Predecessor(x) => {
                set.predecessor(*x);
                queries += 1;
            }
        }
        if i >= warmup {
            in_batch += 1;
            if in_batch == TIMING_BATCH {
                batch_ns.push(batch_start.elapsed().as_nanos() as f64 / TIMING_BATCH as f64);
                batch_start = Instant::now();
                in_batch = 0;
            }
        }
    }
    if in_batch > 0 {
        batch_ns.push(batch_start.elapsed().as_nanos() as f64 / in_batch as f64);
    }
    batch_ns.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let pick = |q: f64| -> f64 {
        if batch_ns.is_empty() {
            0.0
        } else {
            let idx = ((batch_ns.len() as f64 * q).ceil() as usize).saturating_sub(1).min(batch_ns.len() - 1);
            batch_ns[idx]
        }
    };

    let report = set.stats();
    RunReport {
        n_ops: ops.len(),
        inserts,
        deletes,
        queries,
        p50_ns: pick(0.50),
        p99_ns: pick(0.99),
        max_ns: batch_ns.last().copied().unwrap_or(0.0),
        mean_levels: report.mean_levels,
        max_levels: report.max_levels,
        mean_bucket: report.mean_bucket,
        max_bucket: report.max_bucket,
        p99_bucket: report.p99_bucket,
        entries_per_key: report.entries_per_key,
        rebuilds: report.rebuilds,
        p_final: report.p,
        n_final: report.size,
        seed: cfg.seed,
    }
}

/// Header of the per-run CSV schema.
pub const CSV_HEADER: &str = "run_id,seed,dist,n_ops,mix,bits,alpha,delta,p_final,n_final,rebuilds,\
p50_ns,p99_ns,max_ns,mean_levels,max_levels,mean_bucket,max_bucket,p99_bucket,entries_per_key";

impl RunReport {
    pub fn csv_row(&self, run_id: &str, cfg: &BenchConfig) -> String {
        let (alpha, delta) = match cfg.params {
            Some(sp) => (format!("{}", sp.alpha), format!("{}", sp.delta)),
            None => ("".to_string(), "".to_string()),
        };
        format!(
            "{run_id},{seed},{dist},{n_ops},{mix},{bits},{alpha},{delta},{p},{n},{rb},{p50:.1},{p99:.1},{max:.1},{ml:.4},{mxl},{mb:.4},{mxb},{p99b},{epk:.4}",
            seed = self.seed,
            dist = cfg.dist_name,
            n_ops = self.n_ops,
            mix = cfg.mix,
            bits = cfg.w,
            p = self.p_final,
            n = self.n_final,
            rb = self.rebuilds,
            p50 = self.p50_ns,
            p99 = self.p99_ns,
            max = self.max_ns,
            ml = self.mean_levels,
            mxl = self.max_levels,
            mb = self.mean_bucket,
            mxb = self.max_bucket,
            p99b = self.p99_bucket,
            epk = self.entries_per_key,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::workload::gen_workload;

    #[test]
    fn tiny_sequence_passes() {
        let ops = vec![WorkloadOp::Insert(42), WorkloadOp::Predecessor(100)];
        assert!(run_equivalence(&ops, 64, None, None, 0).is_pass());
    }

    #[test]
    fn random_workloads_pass_all_distributions() {
        let mix = Mix::new(40, 30, 30).unwrap();
        for d in [Distribution::Uniform, Distribution::ramp(), Distribution::normal(), Distribution::atoms()] {
            let ops = gen_workload(&d, 20_000, mix, 7, 64, None).unwrap();
            let v = run_equivalence(&ops, 64, d.declared_params(), None, 7);
            assert!(v.is_pass(), "{}: {v:?}", d.name());
        }
    }

    #[test]
    fn checker_catches_a_mutant() {
        // Validate the checker itself: corrupt one insert so the structures
        // disagree, and require a divergence report.
        let ops = vec![WorkloadOp::Insert(10), WorkloadOp::Insert(20), WorkloadOp::Predecessor(15)];
        let mut set = LayeredSet::new(64, None);
        let mut oracle = Oracle::new();
        set.insert(10);
        oracle.insert(10);
        set.insert(21); // mutant: wrong key
        oracle.insert(20);
        let (a, b) = (set.predecessor(15), oracle.predecessor(15));
        assert_eq!(a, b, "both see 10 below 15");
        let (a, b) = (set.predecessor(22), oracle.predecessor(22));
        assert_ne!(a, b, "mutant must surface at the boundary query");
        let _ = ops;
    }

    #[test]
    fn empty_workload_report() {
        let cfg = BenchConfig {
            w: 64,
            params: None,
            cluster_cap: None,
            mix: Mix::new(100, 0, 0).unwrap(),
            dist_name: "uniform".into(),
            seed: 0,
            warmup_frac: 0.0,
        };
        let report = run_bench(&[], &cfg);
        assert_eq!(report.n_ops, 0);
        assert_eq!(report.inserts + report.deletes + report.queries, 0);
    }

    #[test]
    fn counts_sum_to_workload_length() {
        let mix = Mix::new(50, 25, 25).unwrap();
        let ops = gen_workload(&Distribution::Uniform, 10_000, mix, 3, 64, None).unwrap();
        let cfg = BenchConfig {
            w: 64,
            params: Some(SmoothParams::new(1.0, 1.0)),
            cluster_cap: None,
            mix,
            dist_name: "uniform".into(),
            seed: 3,
            warmup_frac: 0.1,
        };
        let report = run_bench(&ops, &cfg);
        assert_eq!(report.inserts + report.deletes + report.queries, 10_000);
        let row = report.csv_row("r0", &cfg);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }
}
