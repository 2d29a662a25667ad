//! End-to-end checks of the command surface: spec building, rendered
//! outputs, determinism across worker counts, and binary exit codes.

use clap::Parser;
use mixcsit_cli::args::{build_spec, Cli};
use mixcsit_cli::runner::render;
use std::process::Command;

fn spec_from(argv: &[&str]) -> mixcsit_cli::ExperimentSpec {
    let mut full = vec!["mixcsit"];
    full.extend_from_slice(argv);
    build_spec(&Cli::try_parse_from(full).unwrap().command).unwrap()
}

#[test]
fn analyze_row_count_matches_grid() {
    let spec = spec_from(&["analyze", "--k-list", "2..4", "--alpha-grid", "0:1:0.05"]);
    let bytes = render(&spec, Some(1)).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "K,M,alpha,lower,upper,sum_dof");
    assert_eq!(lines.count(), 63);
    assert!(!text.contains('\r'), "LF line endings only");
}

#[test]
fn analyze_csv_round_trips_through_column_contract() {
    let spec = spec_from(&["analyze", "--k-list", "2,5", "--alpha-grid", "0:1:0.25", "--m", "2"]);
    let text = String::from_utf8(render(&spec, Some(1)).unwrap()).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        let k: usize = cols[0].parse().unwrap();
        let m: usize = cols[1].parse().unwrap();
        let alpha: f64 = cols[2].parse().unwrap();
        let sum: f64 = cols[5].parse().unwrap();
        assert_eq!(m, 2);
        assert_eq!(sum, mixcsit_core::analysis::sum_dof(k, m, alpha));
        assert_eq!(cols[3].parse::<f64>().unwrap(), sum);
        assert_eq!(cols[4].parse::<f64>().unwrap(), sum);
    }
}

#[test]
fn simulate_summary_hits_closed_form_target() {
    let spec = spec_from(&[
        "simulate", "--k", "2", "--alpha", "0", "--p-grid", "1e4:1e12:9", "--trials", "150",
        "--seed", "7",
    ]);
    let text = String::from_utf8(render(&spec, None).unwrap()).unwrap();
    let field = |key: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with("summary,") && l.contains(key))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let slope = field("fitted_slope");
    let target = field("target_sum_dof");
    assert!((target - 4.0 / 3.0).abs() < 1e-12);
    assert!(
        (slope - target).abs() < 0.05,
        "slope {slope} vs target {target}"
    );
}

#[test]
fn output_is_byte_identical_across_worker_counts() {
    for argv in [
        vec![
            "simulate", "--k", "3", "--alpha", "0.3", "--p-grid", "1e4:1e10:4", "--trials",
            "40", "--seed", "11",
        ],
        vec![
            "verify-lemma1", "--m", "2", "--alpha", "0.5", "--p-grid", "1e2:1e6:4", "--outer",
            "4", "--seed", "3",
        ],
    ] {
        let spec = spec_from(&argv);
        let one = render(&spec, Some(1)).unwrap();
        let eight = render(&spec, Some(8)).unwrap();
        assert_eq!(one, eight, "worker count changed bytes for {argv:?}");
    }
}

#[test]
fn record_stream_emits_one_json_object_per_trial() {
    let spec = spec_from(&[
        "simulate", "--k", "2", "--alpha", "0.5", "--p-grid", "1e4:1e8:3", "--trials", "5",
        "--seed", "1", "--format", "record-stream",
    ]);
    let text = String::from_utf8(render(&spec, Some(2)).unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3 * 5);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["mode"], "power_level");
        assert_eq!(v["messages"].as_array().unwrap().len(), 2);
        assert!(v["sum_rate"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn region_vertices_table() {
    let spec = spec_from(&["region", "--k", "2", "--alpha", "1"]);
    let text = String::from_utf8(render(&spec, Some(1)).unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d_1,d_2");
    // The alpha = 1 region is the unit square.
    assert_eq!(lines.len(), 5);
    assert!(lines.contains(&"0,0"));
    assert!(lines.contains(&"1,1"));
}

#[test]
fn lemma_table_has_verdict_columns() {
    let spec = spec_from(&[
        "verify-lemma1", "--m", "1", "--alpha", "0.5", "--p-grid", "1e2:1e6:4", "--outer", "2",
        "--seed", "5",
    ]);
    let text = String::from_utf8(render(&spec, Some(2)).unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,mean_max_objective_bits,fitted_slope,bound,pass");
    assert_eq!(lines.len(), 5);
    for data in &lines[1..] {
        assert!(data.ends_with(",true") || data.ends_with(",false"));
        // bound column is (m-1)/m * alpha = 0 for m = 1
        assert!(data.contains(",0,"));
    }
}

#[test]
fn binary_exit_codes_and_file_output() {
    let bin = env!("CARGO_BIN_EXE_mixcsit");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");

    let ok = Command::new(bin)
        .args([
            "analyze",
            "--k-list",
            "2,3",
            "--alpha-grid",
            "0:1:0.5",
            "-o",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{:?}", ok);
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(written.starts_with("K,M,alpha"));
    assert_eq!(written.lines().count(), 7);

    // Validation failure: exit code 2 and the offending field named.
    let bad = Command::new(bin)
        .args(["simulate", "--k", "2", "--alpha", "1.5", "--p-grid", "1e4:1e8:5", "--trials", "1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("alpha"));

    // IO failure: exit code 1.
    let io = Command::new(bin)
        .args([
            "analyze",
            "--k-list",
            "2",
            "--alpha-grid",
            "0:1:0.5",
            "-o",
            "/nonexistent-dir/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(1));
}

#[test]
fn worker_env_variable_is_honored() {
    let bin = env!("CARGO_BIN_EXE_mixcsit");
    let run = |workers: &str| -> Vec<u8> {
        Command::new(bin)
            .env("MIXCSIT_MAX_WORKERS", workers)
            .args([
                "simulate", "--k", "2", "--alpha", "0.2", "--p-grid", "1e4:1e8:4", "--trials",
                "25", "--seed", "9",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("8"));
}

#[test]
fn config_file_drives_a_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "\
# simulate setup
[system]
k = 2
m = 2
alpha = 0.5
accounting = joint_mac

[experiment]
p_grid = 1e4:1e8:3
trials = 10
seed = 2
",
    )
    .unwrap();
    let spec = spec_from(&["simulate", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(render(&spec, Some(1)).unwrap()).unwrap();
    assert!(text.contains(",joint_mac,"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("rate,")).count(),
        3 * 4 // per point: w1, w2, sum, sum_uncapped
    );
    // Grid too thin for a slope fit: the slope summary is omitted.
    assert!(!text.contains("fitted_slope"));
    assert!(text.contains("target_sum_dof"));
}
