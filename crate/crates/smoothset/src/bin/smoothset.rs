//! Command-line surface: benchmarking, equivalence verification, the
//! interval-occupancy experiment, and the smoothness estimator.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use smoothset::bench::{exhaustive_triples, run_bench, run_equivalence, BenchConfig, CSV_HEADER};
use smoothset::dist::{lemma_intervals, smoothness_estimate, Distribution};
use smoothset::maybe_rayon::*;
use smoothset::workload::{gen_workload, Mix};
use smoothset::SmoothParams;

#[derive(Parser)]
#[command(name = "smoothset", version, about = "Predecessor search on smooth inputs: bench & validation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistKind {
    Uniform,
    Ramp,
    Normal,
    Atoms,
}

impl DistKind {
    fn build(self) -> Distribution {
        match self {
            DistKind::Uniform => Distribution::Uniform,
            DistKind::Ramp => Distribution::ramp(),
            DistKind::Normal => Distribution::normal(),
            DistKind::Atoms => Distribution::atoms(),
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Smoothness parameter alpha (use together with --delta).
    #[arg(long)]
    alpha: Option<f64>,
    /// Smoothness parameter delta.
    #[arg(long)]
    delta: Option<f64>,
    /// Run the parameter-oblivious log^2(n) split policy.
    #[arg(long, conflicts_with_all = ["alpha", "delta"])]
    unknown_params: bool,
}

impl ParamArgs {
    fn resolve(&self) -> Result<Option<SmoothParams>, String> {
        match (self.alpha, self.delta) {
            (Some(a), Some(d)) => {
                if a <= 0.0 || d <= 0.0 {
                    return Err("alpha and delta must be positive".into());
                }
                Ok(Some(SmoothParams::new(a, d)))
            }
            (None, None) => Ok(None),
            _ => Err("--alpha and --delta must be given together".into()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a workload and append one CSV row of measurements.
    Bench {
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistKind,
        #[arg(long, default_value_t = 100_000)]
        n_ops: usize,
        /// Insert/delete/query percentages, e.g. 34,33,33.
        #[arg(long, default_value = "34,33,33")]
        mix: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Key width in bits.
        #[arg(long, default_value_t = 64)]
        bits: u32,
        #[command(flatten)]
        params: ParamArgs,
        /// Override the top layer's cluster capacity.
        #[arg(long)]
        cluster_cap: Option<usize>,
        /// Draw query points from this distribution instead of the insert one.
        #[arg(long, value_enum)]
        query_dist: Option<DistKind>,
        /// Fraction of ops executed before timing starts.
        #[arg(long, default_value_t = 0.1)]
        warmup: f64,
        /// CSV file to append to (header written when the file is new).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lockstep equivalence suite against the sorted-array oracle.
    Verify {
        #[arg(long, default_value_t = 64)]
        universe_bits: u32,
        /// Operations per randomized run.
        #[arg(long, default_value_t = 100_000)]
        ops: usize,
        /// Number of randomized seeds per distribution.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Interval-occupancy experiment (seed-swept).
    Lemma {
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistKind,
        #[arg(long)]
        n: usize,
        /// Interval count; defaults to ceil(n^(alpha/delta)) from the
        /// distribution's declared parameters.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo lower bound on the smoothness constant beta.
    Smoothness {
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistKind,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Samples drawn per trial.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_mix(s: &str) -> Result<Mix, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("mix must be I,D,Q, got '{s}'"));
    }
    let nums: Result<Vec<u32>, _> = parts.iter().map(|p| p.trim().parse::<u32>()).collect();
    let nums = nums.map_err(|e| format!("bad mix '{s}': {e}"))?;
    Mix::new(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

fn append_csv(path: &Option<PathBuf>, header: &str, rows: &[String]) -> std::io::Result<()> {
    match path {
        Some(p) => {
            let fresh = !p.exists();
            let mut f = OpenOptions::new().create(true).append(true).open(p)?;
            if fresh {
                writeln!(f, "{header}")?;
            }
            for row in rows {
                writeln!(f, "{row}")?;
            }
        }
        None => {
            println!("{header}");
            for row in rows {
                println!("{row}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Bench { dist, n_ops, mix, seed, bits, params, cluster_cap, query_dist, warmup, out } => {
            let mix = parse_mix(&mix)?;
            if mix.delete_exceeds_insert() {
                eprintln!("warning: delete% exceeds insert%; most deletes will hit an empty set");
            }
            let d = dist.build();
            let params = params.resolve()?;
            let ops = gen_workload(&d, n_ops, mix, seed, bits, query_dist.map(DistKind::build))
                .map_err(|e| e.to_string())?;
            let cfg = BenchConfig {
                w: bits,
                params,
                cluster_cap,
                mix,
                dist_name: d.name().to_string(),
                seed,
                warmup_frac: warmup,
            };
            let report = run_bench(&ops, &cfg);
            let run_id = format!("{}-{}-n{}-s{}", d.name(), bits, n_ops, seed);
            let row = report.csv_row(&run_id, &cfg);
            append_csv(&out, CSV_HEADER, &[row]).map_err(|e| e.to_string())?;
            eprintln!(
                "bench done: n_final={} p={} rebuilds={} mean_levels={:.3} entries/key={:.3}",
                report.n_final, report.p_final, report.rebuilds, report.mean_levels, report.entries_per_key
            );
            Ok(true)
        }
        Command::Verify { universe_bits, ops, seeds } => {
            let mut all_pass = true;
            if universe_bits <= 10 {
                // 16-key pool rich in shared prefixes and adjacent values.
                let top = (1u64 << universe_bits) - 1;
                let pool: Vec<u64> = [0, 1, 15, 16, 17, 31, 32, 63, 64, 100, 127, 128, 129, 191, top - 1, top]
                    .into_iter()
                    .map(|k: u64| k.min(top))
                    .collect();
                for params in [None, Some(SmoothParams::new(1.0, 1.0))] {
                    let verdict = exhaustive_triples(universe_bits, &pool, params);
                    let tag = if params.is_some() { "known-params" } else { "unknown-params" };
                    match &verdict {
                        smoothset::Verdict::Pass => println!("exhaustive triples ({tag}): pass"),
                        smoothset::Verdict::Divergence { index, detail } => {
                            println!("exhaustive triples ({tag}): FAIL at op {index}: {detail}");
                            all_pass = false;
                        }
                    }
                }
            }
            let dists = [Distribution::Uniform, Distribution::ramp(), Distribution::normal(), Distribution::atoms()];
            let mix = Mix::new(40, 30, 30).unwrap();
            let jobs: Vec<(Distribution, u64)> = dists
                .iter()
                .flat_map(|d| (0..seeds).map(move |s| (*d, s)))
                .collect();
            let results: Vec<(String, u64, smoothset::Verdict)> = jobs
                .into_par_iter()
                .map(|(d, seed)| {
                    let w = gen_workload(&d, ops, mix, seed, universe_bits, None).expect("nonempty workload");
                    let v = run_equivalence(&w, universe_bits, d.declared_params(), None, seed);
                    (d.name().to_string(), seed, v)
                })
                .collect();
            for (name, seed, v) in &results {
                match v {
                    smoothset::Verdict::Pass => println!("randomized {name} seed {seed}: pass"),
                    smoothset::Verdict::Divergence { index, detail } => {
                        println!("randomized {name} seed {seed}: FAIL at op {index}: {detail}");
                        all_pass = false;
                    }
                }
            }
            Ok(all_pass)
        }
        Command::Lemma { dist, n, k, seeds, out } => {
            let d = dist.build();
            let k = match k {
                Some(k) => k,
                None => lemma_intervals(&d, n).map_err(|e| {
                    format!("{e}; pass --k explicitly for this distribution")
                })?,
            };
            let reports = smoothset::dist::occupancy_sweep(&d, n, k, seeds, 0).map_err(|e| e.to_string())?;
            let rows: Vec<String> = reports
                .iter()
                .enumerate()
                .map(|(seed, rep)| {
                    format!(
                        "lemma-{name}-n{n}-s{seed},{seed},{name},{n},{k},{mean:.4},{max},{p99}",
                        name = d.name(), mean = rep.mean, max = rep.max, p99 = rep.p99
                    )
                })
                .collect();
            append_csv(&out, "run_id,seed,dist,n,k,mean_occ,max_occ,p99_occ", &rows)
                .map_err(|e| e.to_string())?;
            Ok(true)
        }
        Command::Smoothness { dist, alpha, delta, trials, samples, seed } => {
            if alpha <= 0.0 || delta <= 0.0 {
                return Err("alpha and delta must be positive".into());
            }
            let d = dist.build();
            let rep = smoothness_estimate(&d, alpha, delta, trials, samples, seed)
                .map_err(|e| e.to_string())?;
            println!(
                "dist={} alpha={alpha} delta={delta} trials={trials} samples={samples} beta_hat={:.4} evaluated={} skipped_trials={}",
                d.name(), rep.beta_hat, rep.evaluated, rep.skipped_trials
            );
            Ok(true)
        }
    }
}
