//! Black-box tests of the `lpball` binary: exit codes, output formats,
//! atomicity, and the determinism contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpball"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lpball-cli-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn constants_emits_one_csv_row() {
    let out = run(&["constants", "--p", "2", "--q", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,q,m_p,clt_variance,cov_c11,cov_c12,cov_c22"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    let m_p: f64 = row[2].parse().unwrap();
    assert!((m_p - 0.797_884_560_802_865_4).abs() < 1e-12);
    let sigma2: f64 = row[3].parse().unwrap();
    assert!((sigma2 - (std::f64::consts::FRAC_PI_2 - 1.5)).abs() < 1e-12);
}

#[test]
fn constants_with_lambda_appends_projection_columns() {
    let out = run(&["constants", "--p", "1", "--q", "2", "--lambda", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("proj_variance_random,proj_variance_det"));
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    let vr: f64 = cols[7].parse().unwrap();
    let vd: f64 = cols[8].parse().unwrap();
    assert!((vr - 0.375).abs() < 1e-12);
    assert!((vd - 0.75).abs() < 1e-12);
}

#[test]
fn bad_flags_exit_one() {
    let out = run(&["constants", "--p", "-1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error["), "stderr: {err}");

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rate_grid_renders_inf_below_lln_point() {
    let out = run(&[
        "rate",
        "--kind",
        "ldp_qgtp",
        "--p",
        "1",
        "--q",
        "2",
        "--grid",
        "1.0:2.0:100",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,rate,speed_kind");
    assert_eq!(lines.len(), 101);
    // rows below sqrt(2) are inf, rows above are finite and increasing
    let mut last_finite = -1.0f64;
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let x: f64 = cols[0].parse().unwrap();
        assert_eq!(cols[2], "n^(p/q)");
        if x < std::f64::consts::SQRT_2 {
            assert_eq!(cols[1], "inf", "x={x}");
        } else {
            let v: f64 = cols[1].parse().unwrap();
            assert!(v >= last_finite);
            last_finite = v;
        }
    }
}

#[test]
fn contraction_rate_grid_runs_in_parallel() {
    // the q < p branch evaluates each grid point through the conjugate
    // solver; zero rate at the LLN point M_2(1)^(1/1) = sqrt(2/pi)
    let out = run(&[
        "rate",
        "--kind",
        "ldp_qltp",
        "--p",
        "2",
        "--q",
        "1",
        "--grid",
        "0.7978845608028654:1.0:4",
        "--mixing",
        "dirac",
        "--threads",
        "2",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "n");
    let at_lln: f64 = rows[0][1].parse().unwrap();
    assert!(at_lln.abs() < 1e-7, "rate at the LLN point: {at_lln}");
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(
        vals.windows(2).all(|w| w[1] >= w[0] - 1e-9),
        "nondecreasing: {vals:?}"
    );
    assert!(vals[3] > 1e-3);
}

#[test]
fn mdp_rate_grid_is_quadratic() {
    let out = run(&[
        "rate",
        "--kind",
        "mdp",
        "--p",
        "2",
        "--q",
        "1",
        "--grid",
        "-1.0:1.0:5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][2], "bn2");
    let v_neg: f64 = rows[0][1].parse().unwrap();
    let v_mid: f64 = rows[2][1].parse().unwrap();
    let v_pos: f64 = rows[4][1].parse().unwrap();
    assert!((v_neg - v_pos).abs() < 1e-12);
    assert!(v_mid.abs() < 1e-15);
}

#[test]
fn degenerate_rate_exits_two() {
    // p = q has no nontrivial MDP rate: a numeric-domain failure, exit 2
    let out = run(&[
        "rate",
        "--kind",
        "mdp",
        "--p",
        "2",
        "--q",
        "2",
        "--grid",
        "0.0:1.0:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[degenerate]:"), "stderr: {err}");
}

#[test]
fn conjugate_reports_convergence_flag() {
    let out = run(&[
        "conjugate",
        "--p",
        "2",
        "--q",
        "1",
        "--s1",
        "0.8",
        "--s2",
        "1.05",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    assert_eq!(row[5], "true");
    let value: f64 = row[2].parse().unwrap();
    assert!((0.0..1.0).contains(&value));

    // diverging direction: inf, not converged
    let out = run(&[
        "conjugate",
        "--p",
        "2",
        "--q",
        "1",
        "--s1",
        "-0.3",
        "--s2",
        "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "inf");
    assert_eq!(row[5], "false");
}

#[test]
fn sample_output_is_seed_deterministic() {
    let args = [
        "sample",
        "--p",
        "1.5",
        "--n",
        "4",
        "--law",
        "gamma:2:0.5",
        "--draws",
        "50",
        "--seed",
        "99",
        "--emit",
        "coords",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let header = stdout(&a).lines().next().unwrap().to_string();
    assert_eq!(header, "draw_index,x1,x2,x3,x4");

    let c = run(&[
        "sample",
        "--p",
        "1.5",
        "--n",
        "4",
        "--law",
        "gamma:2:0.5",
        "--draws",
        "50",
        "--seed",
        "100",
        "--emit",
        "coords",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sample_norm_emission_stays_in_unit_ball() {
    let out = run(&[
        "sample",
        "--p",
        "2",
        "--n",
        "8",
        "--law",
        "exponential:0.5",
        "--draws",
        "200",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v > 0.0 && v <= 1.0 + 1e-12);
    }
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn verify_runs_a_small_clt_config() {
    let dir = tmp_dir("verify-ok");
    let cfg = write_config(
        &dir,
        "clt_small.json",
        r#"{
            "kind": "clt",
            "params": {"p": 2.0, "q": 1.0, "n": 2048},
            "law": {"kind": "dirac0"},
            "n_grid": [],
            "samples_per_n": 20000,
            "seed": 11,
            "beta": 0.25,
            "thresholds": []
        }"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--output-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("n,statistic,empirical,target,stderr,verdict"));
    assert!(text.contains("PASS"));
    let report = std::fs::read_to_string(dir.join("clt_small_report.csv")).unwrap();
    assert_eq!(report, text);
    let summary = std::fs::read_to_string(dir.join("clt_small_summary.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(parsed["kind"], "clt");
    assert_eq!(parsed["passed"], true);
    assert_eq!(parsed["config"]["seed"], 11);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_is_byte_identical_across_thread_counts() {
    let dir = tmp_dir("verify-threads");
    let cfg = write_config(
        &dir,
        "mdp_small.json",
        r#"{
            "kind": "mdp",
            "params": {"p": 2.0, "q": 1.0, "n": 256},
            "law": {"kind": "dirac0"},
            "n_grid": [128, 256],
            "samples_per_n": 5000,
            "seed": 5,
            "beta": 0.25,
            "thresholds": [0.1]
        }"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = bin()
            .args(["verify", "--config"])
            .arg(&cfg)
            .args(["--output-dir"])
            .arg(&dir)
            .args(["--threads", threads])
            .output()
            .unwrap();
        assert!(out.status.code() == Some(0) || out.status.code() == Some(3));
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_uses_env_var_for_default_output_dir() {
    let dir = tmp_dir("verify-env");
    let cfg = write_config(
        &dir,
        "tiny.json",
        r#"{
            "kind": "clt",
            "params": {"p": 1.5, "q": 1.5, "n": 64},
            "law": {"kind": "dirac0"},
            "samples_per_n": 1000,
            "seed": 2,
            "beta": 0.25,
            "thresholds": []
        }"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .env("LPBALL_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("tiny_report.csv").exists());
    assert!(dir.join("tiny_summary.json").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_malformed_config_exits_one_without_outputs() {
    let dir = tmp_dir("verify-bad");
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"kind": "clt", "params": {"p": -2.0}}"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--output-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.join("bad_report.csv").exists());
    assert!(!dir.join("bad_summary.json").exists());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[config]:"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let dir = tmp_dir("outflag");
    let path = dir.join("constants.csv");
    let out = bin()
        .args(["constants", "--p", "2", "--q", "1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,q,m_p"));
    // no temp litter
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).ok();
}
