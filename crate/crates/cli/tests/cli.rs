//! Black-box tests of the installed binary: argument handling, file
//! output, config-file overlay, exit codes, and row-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shufflecode"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shufflecode-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

fn data_rows(output: &str) -> Vec<&str> {
    output.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn simulate_smoke_writes_provenance_and_rows() {
    let out = run(&["simulate", "--trials", "10", "--delta", "0.04", "--seed", "3"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).expect("utf8");
    assert!(text.lines().next().is_some_and(|l| l.starts_with("# shufflecode-cli")));
    assert!(text.lines().any(|l| l == "# seed: 3"));
    let rows = data_rows(&text);
    assert_eq!(rows[0], "delta,indexing,channel_mode,N,k_o,fer,fer_ci_lo,fer_ci_hi,ber,misdetect_rate,trials,seed");
    assert_eq!(rows.len(), 2, "one header plus one sweep point: {rows:?}");
    assert!(rows[1].starts_with("0.04,coset,shuffling,32,225,"));
}

#[test]
fn simulate_rows_identical_across_worker_counts() {
    let run_with = |workers: &str| {
        let out = run(&[
            "simulate", "--trials", "40", "--delta", "0.05,0.06", "--workers", workers,
        ]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).expect("utf8");
        data_rows(&text).join("\n")
    };
    assert_eq!(run_with("1"), run_with("4"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let path = scratch("overlay.toml");
    std::fs::write(&path, "trials = 12\ndelta = \"0.06\"\nko = \"235\"\n").expect("write config");
    let cfg = path.to_str().expect("utf8 path");

    let out = run(&["simulate", "--config", cfg]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).expect("utf8");
    let row = data_rows(&text)[1].to_string();
    assert!(row.starts_with("0.06,coset,shuffling,32,235,"), "config ignored: {row}");
    assert!(row.ends_with(",12,0"), "trials from config ignored: {row}");

    let out = run(&["simulate", "--config", cfg, "--delta", "0.05"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).expect("utf8");
    let row = data_rows(&text)[1].to_string();
    assert!(row.starts_with("0.05,"), "flag should beat config: {row}");
}

#[test]
fn analyze_reads_residual_table_and_reports_curve() {
    let table = scratch("pb.csv");
    std::fs::write(&table, "delta,p_b\n0.03,0.0013\n0.04,0.0044\n").expect("write table");
    let out_path = scratch("curve.csv");
    let out = run(&[
        "analyze",
        "--delta", "0.03,0.04",
        "--pb-table", table.to_str().expect("utf8 path"),
        "--out", out_path.to_str().expect("utf8 path"),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).expect("output written");
    let rows = data_rows(&text);
    assert_eq!(rows[0], "delta,f,one_minus_f,pd_raw,pd_clamped,p_b,p_s,fer_approx");
    assert_eq!(rows.len(), 3);
    let last: Vec<&str> = rows[2].split(',').collect();
    let fer: f64 = last[7].parse().expect("numeric");
    assert!((0.0..=1.0).contains(&fer));
}

#[test]
fn analyze_degenerate_m_and_oracle_agree_on_detection_bound() {
    let table = scratch("toy-pb.csv");
    std::fs::write(&table, "delta,p_b\n0.03,0.001\n").expect("write table");
    let toy = |m: &str| {
        let out = run(&[
            "analyze", "--ni", "10", "--rate", "0.3", "--M", m, "--q", "4", "--ko", "9",
            "--delta", "0.03", "--pb-table", table.to_str().expect("utf8 path"),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).expect("utf8");
        let row: Vec<f64> = data_rows(&text)[1].split(',').map(|v| v.parse().expect("numeric")).collect();
        row
    };

    // With a single coset there is nothing to confuse: pd degenerates to 1 - f.
    let single = toy("1");
    assert_eq!(single[3], single[2], "pd_raw must equal one_minus_f at M = 1");
    assert_eq!(single[4], single[2], "pd_clamped must equal one_minus_f at M = 1");

    // The oracle's bound column is the same quantity analyze reports, so the
    // two subcommands must agree exactly on a shared configuration.
    let from_analyze = toy("4")[2];
    let out = run(&["oracle", "--n", "10", "--rate", "0.3", "--M", "4", "--trials", "100", "--delta", "0.03"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).expect("utf8");
    let from_oracle: f64 = data_rows(&text)[1].split(',').nth(4).expect("bound column").parse().expect("numeric");
    assert!((from_analyze - from_oracle).abs() < 1e-15, "{from_analyze} vs {from_oracle}");
}

#[test]
fn oracle_bound_tightens_with_block_length() {
    let sweep = |n: &str| {
        let out = run(&["oracle", "--n", n, "--rate", "0.5", "--M", "4", "--trials", "2000", "--delta", "0,0.03"]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).expect("utf8");
        data_rows(&text)
            .iter()
            .skip(1)
            .map(|row| {
                let cols: Vec<f64> = row.split(',').map(|v| v.parse().expect("numeric")).collect();
                (cols[1], cols[4]) // (empirical, bound)
            })
            .collect::<Vec<_>>()
    };
    let short = sweep("8");
    let long = sweep("10");

    // Noiseless misdetections still occur when independently drawn codes share
    // codewords; the bound covers that regime rather than degenerating to zero.
    assert!(long[0].1 > 0.0);
    assert!(long[0].0 <= long[0].1, "delta = 0: empirical {} above bound {}", long[0].0, long[0].1);

    // At fixed rate, longer blocks separate random codes better, so both the
    // bound and the measured misdetection rate drop from n = 8 to n = 10.
    assert!(long[1].1 < short[1].1, "bound: {} !< {}", long[1].1, short[1].1);
    assert!(long[1].0 < short[1].0, "empirical: {} !< {}", long[1].0, short[1].0);
}

#[test]
fn oracle_smoke_and_budget_exit_code() {
    let out = run(&["oracle", "--trials", "200", "--delta", "0.02"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).expect("utf8");
    assert!(data_rows(&text)[0].starts_with("delta,empirical,"));

    // 14-bit codes with M = 17 exceed the exhaustive-search budget.
    let out = run(&["oracle", "--n", "14", "--rate", "0.857142857142857", "--M", "17"]);
    assert_eq!(out.status.code(), Some(2), "budget exhaustion must exit 2");
}

#[test]
fn config_errors_exit_1() {
    for args in [
        &["simulate", "--delta", "0.7"][..],
        &["analyze", "--delta", "0.03"][..], // no residual-BER source
        &["simulate", "--no", "100"][..],    // outer length must be 2^q - 1
        &["frobnicate"][..],                 // clap usage error
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "args {args:?} must exit 1");
    }
}
