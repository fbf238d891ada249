//! End-to-end checks of the `smoothset` binary: subcommands, CSV schemas,
//! and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smoothset"))
}

#[test]
fn verify_small_universe_passes() {
    let out = bin()
        .args(["verify", "--universe-bits", "8", "--ops", "2000", "--seeds", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("exhaustive triples"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn bench_appends_csv_with_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    for seed in ["1", "2"] {
        let out = bin()
            .args([
                "bench", "--dist", "uniform", "--n-ops", "20000", "--mix", "34,33,33",
                "--seed", seed, "--bits", "64", "--alpha", "1", "--delta", "1",
                "--out", csv.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header + two rows");
    assert!(lines[0].starts_with("run_id,seed,dist,n_ops,mix,bits,alpha,delta,p_final,n_final,rebuilds"));
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), lines[0].split(',').count());
    }
}

#[test]
fn lemma_writes_rows_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lemma.csv");
    let out = bin()
        .args(["lemma", "--dist", "uniform", "--n", "4096", "--seeds", "5", "--out", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6, "header + five seed rows");
    assert!(text.starts_with("run_id,seed,dist,n,k,mean_occ,max_occ,p99_occ"));
}

#[test]
fn lemma_refuses_atoms_without_k() {
    let out = bin().args(["lemma", "--dist", "atoms", "--n", "1024", "--seeds", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // With an explicit k it runs as plain binning.
    let out = bin()
        .args(["lemma", "--dist", "atoms", "--n", "1024", "--k", "1024", "--seeds", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn smoothness_reports_beta() {
    let out = bin()
        .args(["smoothness", "--dist", "uniform", "--alpha", "1", "--delta", "1", "--trials", "10", "--samples", "20000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("beta_hat="));
}

#[test]
fn bad_arguments_exit_2() {
    let out = bin().args(["bench", "--mix", "50,50,50"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["bench", "--n-ops", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
