//! Behavior of the experiment runners at desk scale: verdict wiring,
//! degenerate flags, tail bookkeeping, and the determinism contract.

use lpball::harness::{
    run_experiment, ExperimentConfig, ExperimentKind, KRule, MixingFamily, MuRule, Verdict,
};
use lpball::specfun::BallParams;

fn config(kind: ExperimentKind, p: f64, q: f64, n: usize) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        params: BallParams { p, q, n },
        law: MixingFamily::Dirac0,
        n_grid: vec![],
        samples_per_n: 4000,
        seed: 20_240_601,
        beta: 0.25,
        thresholds: vec![],
        mu_n_rule: None,
        k_rule: None,
    }
}

#[test]
fn clt_run_passes_at_moderate_scale() {
    let mut cfg = config(ExperimentKind::Clt, 2.0, 1.0, 1024);
    cfg.samples_per_n = 20_000;
    let report = run_experiment(&cfg, None).unwrap();
    let var = report.cell("variance", 1024).expect("variance cell");
    assert_eq!(var.verdict, Verdict::Pass, "{var:?}");
    assert!(report.cell("ks_normal", 1024).is_some());
    assert!(report.passed(), "{}", report.to_csv());
}

#[test]
fn clt_run_flags_degenerate_diagonal() {
    let cfg = config(ExperimentKind::Clt, 1.5, 1.5, 256);
    let report = run_experiment(&cfg, None).unwrap();
    let cell = report
        .cell("variance_degenerate", 256)
        .expect("degenerate cell");
    // Dirac mixing and p = q: the statistic collapses to exactly zero
    assert_eq!(cell.verdict, Verdict::Pass);
    assert!(cell.empirical < 1e-20, "{}", cell.empirical);
    assert!(report.notes.iter().any(|n| n.contains("p = q")));
}

#[test]
fn gen_clt_zero_rule_reduces_to_clt() {
    let mut clt = config(ExperimentKind::Clt, 1.0, 2.0, 512);
    clt.law = MixingFamily::Exponential { rate: 1.0 };
    clt.samples_per_n = 20_000;
    let mut gen = clt.clone();
    gen.kind = ExperimentKind::GenClt;
    gen.mu_n_rule = Some(MuRule::Zero);
    let a = run_experiment(&clt, None).unwrap();
    let b = run_experiment(&gen, None).unwrap();
    let va = a.cell("variance", 512).unwrap();
    let vb = b.cell("variance", 512).unwrap();
    // same seed, same statistic, same target: identical numbers
    assert_eq!(va.empirical, vb.empirical);
    assert_eq!(va.target, vb.target);
}

#[test]
fn gen_clt_law_mean_rule_hits_generalized_target() {
    let mut cfg = config(ExperimentKind::GenClt, 1.0, 2.0, 2048);
    cfg.law = MixingFamily::GammaLinear {
        shape_per_n: 0.5,
        rate: 1.0,
        shape_offset: 0.0,
    };
    cfg.samples_per_n = 20_000;
    let report = run_experiment(&cfg, None).unwrap();
    let var = report.cell("variance", 2048).unwrap();
    assert_eq!(var.verdict, Verdict::Pass, "{var:?}");
    // 7/12 target
    assert!((var.target - 7.0 / 12.0).abs() < 1e-12);
}

#[test]
fn gen_clt_rejects_zero_rule_with_growing_mixing() {
    let mut cfg = config(ExperimentKind::GenClt, 1.0, 2.0, 512);
    cfg.law = MixingFamily::GammaLinear {
        shape_per_n: 0.5,
        rate: 1.0,
        shape_offset: 0.0,
    };
    cfg.mu_n_rule = Some(MuRule::Zero);
    assert!(run_experiment(&cfg, None).is_err());
}

#[test]
fn mdp_run_measures_reachable_tails() {
    let mut cfg = config(ExperimentKind::Mdp, 2.0, 1.0, 1024);
    cfg.n_grid = vec![1024, 4096];
    cfg.samples_per_n = 200_000;
    cfg.thresholds = vec![0.05, 0.08];
    let report = run_experiment(&cfg, None).unwrap();
    // both thresholds reachable at these b_n
    for &n in &[1024usize, 4096] {
        for t in ["y[t=0.05]", "y[t=0.08]"] {
            let cell = report.cell(t, n).unwrap();
            assert!(
                cell.empirical.is_finite(),
                "{t} at n={n} should be measurable"
            );
            assert_ne!(cell.verdict, Verdict::Insufficient);
        }
    }
    // prefactor-cancelled slope at the largest n matches the quadratic rate
    let slope = report.cell("slope[t=0.05,t=0.08]", 4096).unwrap();
    assert_eq!(slope.verdict, Verdict::Pass, "{slope:?}");
}

#[test]
fn mdp_run_marks_unreachable_tails_insufficient() {
    let mut cfg = config(ExperimentKind::Mdp, 2.0, 1.0, 4096);
    cfg.samples_per_n = 2000;
    cfg.thresholds = vec![1.0]; // V >= b_n = 8: astronomically rare
    let report = run_experiment(&cfg, None).unwrap();
    let cell = report.cell("y[t=1]", 4096).unwrap();
    assert_eq!(cell.verdict, Verdict::Insufficient);
    assert_eq!(cell.empirical, f64::NEG_INFINITY);
    // insufficient cells do not fail the report
    assert!(report.passed());
}

#[test]
fn ldp_run_tracks_z_and_u_statistics() {
    let mut cfg = config(ExperimentKind::Ldp, 1.0, 2.0, 64);
    cfg.n_grid = vec![64, 144, 256];
    cfg.samples_per_n = 100_000;
    let x = 1.05 * 2.0f64.sqrt();
    cfg.thresholds = vec![x];
    let report = run_experiment(&cfg, None).unwrap();
    let key_z = format!("y_z[x={x}]");
    let key_u = format!("y_u[x={x}]");
    let key_gap = format!("equiv_gap[x={x}]");
    for &n in &[64usize, 144, 256] {
        assert!(report.cell(&key_z, n).is_some());
        assert!(report.cell(&key_u, n).is_some());
        assert!(report.cell(&key_gap, n).is_some());
    }
    let z64 = report.cell(&key_z, 64).unwrap();
    assert!(z64.empirical.is_finite());
    assert!(z64.target > 0.0);
    // trend rows exist (run-level, n = 0)
    assert!(report
        .cells
        .iter()
        .any(|c| c.statistic.starts_with("trend[")));
}

#[test]
fn ldp_run_q_below_p_uses_contraction_targets() {
    let mut cfg = config(ExperimentKind::Ldp, 2.0, 1.0, 64);
    cfg.samples_per_n = 50_000;
    // LLN point of n^(1/2 - 1)||Z||_1 is M_2(1) = sqrt(2/pi) ~ 0.7979
    cfg.thresholds = vec![0.85];
    let report = run_experiment(&cfg, None).unwrap();
    let cell = report.cell("y_z[x=0.85]", 64).unwrap();
    assert!(cell.target > 0.0 && cell.target.is_finite(), "{cell:?}");
    // q < p has no exponential-equivalence claim
    assert!(!report
        .cells
        .iter()
        .any(|c| c.statistic.starts_with("equiv_gap")));
}

#[test]
fn ldp_run_q_below_p_converges_to_numeric_rate() {
    // quantitative check of the contraction-principle target: the empirical
    // tail slope approaches the numerically minimized rate from above
    let mut cfg = config(ExperimentKind::Ldp, 2.0, 1.0, 49);
    cfg.n_grid = vec![49, 100, 196];
    cfg.samples_per_n = 200_000;
    cfg.thresholds = vec![0.85];
    let report = run_experiment(&cfg, None).unwrap();
    let mut errs = Vec::new();
    let mut target = 0.0;
    for &n in &[49usize, 100, 196] {
        let cell = report.cell("y_z[x=0.85]", n).unwrap();
        assert!(
            cell.empirical.is_finite(),
            "tail must be reachable at n={n}"
        );
        assert!(
            cell.empirical > cell.target,
            "approach is from above at n={n}"
        );
        target = cell.target;
        errs.push((cell.empirical - cell.target).abs());
    }
    assert!(target > 0.0);
    assert!(
        errs.windows(2).all(|w| w[1] < w[0]),
        "|y - target| should shrink along the ladder: {errs:?}"
    );
    let final_cell = report.cell("y_z[x=0.85]", 196).unwrap();
    assert!(
        (final_cell.empirical - target).abs() / target < 0.35,
        "y(196) = {} vs numeric rate {target}",
        final_cell.empirical
    );
}

#[test]
fn proj_compare_matches_distinct_targets_at_half_lambda() {
    let mut cfg = config(ExperimentKind::ProjCompare, 1.0, 2.0, 2048);
    cfg.law = MixingFamily::Exponential { rate: 1.0 };
    cfg.k_rule = Some(KRule::Fraction { lambda: 0.5 });
    cfg.samples_per_n = 6000;
    let report = run_experiment(&cfg, None).unwrap();
    let haar = report.cell("variance_haar", 2048).unwrap();
    let coord = report.cell("variance_coord", 2048).unwrap();
    assert!((haar.target - 0.375).abs() < 1e-12);
    assert!((coord.target - 0.75).abs() < 1e-12);
    assert_eq!(haar.verdict, Verdict::Pass, "{haar:?}");
    assert_eq!(coord.verdict, Verdict::Pass, "{coord:?}");
    // distinct targets means no agreement cell
    assert!(report.cell("variance_agreement", 2048).is_none());
}

#[test]
fn proj_compare_emits_agreement_cell_at_lambda_one() {
    let mut cfg = config(ExperimentKind::ProjCompare, 1.0, 2.0, 1024);
    cfg.law = MixingFamily::Exponential { rate: 1.0 };
    cfg.k_rule = Some(KRule::SqrtGap);
    cfg.samples_per_n = 4000;
    let report = run_experiment(&cfg, None).unwrap();
    assert!(report.cell("variance_agreement", 1024).is_some());
}

#[test]
fn proj_compare_requires_uniform_law() {
    let mut cfg = config(ExperimentKind::ProjCompare, 1.0, 2.0, 256);
    cfg.k_rule = Some(KRule::Identity);
    // Dirac law is not the uniform distribution
    assert!(run_experiment(&cfg, None).is_err());
}

#[test]
fn width_run_selects_branches_by_conjugate_exponent() {
    // q = 4 -> q* = 4/3 < 2: MDP branch
    let mut cfg = config(ExperimentKind::Width1d, 2.0, 4.0, 512);
    cfg.samples_per_n = 20_000;
    cfg.thresholds = vec![0.1];
    let report = run_experiment(&cfg, None).unwrap();
    assert!(report.notes.iter().any(|n| n.contains("MDP")));
    assert!((report.cell("branch_qstar", 0).unwrap().empirical - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(
        report.cell("width_constant_identity", 0).unwrap().verdict,
        Verdict::Pass
    );
    assert_eq!(report.cell("variance", 512).unwrap().verdict, Verdict::Pass);
    assert!(report.cell("y[t=0.1]", 512).is_some());

    // q = 3/2 -> q* = 3 > 2: LDP branch with speed n^(2/3)
    let mut cfg = config(ExperimentKind::Width1d, 2.0, 1.5, 512);
    cfg.samples_per_n = 20_000;
    let x = 0.97; // M_2(3)^(1/3) ~ 0.9044
    cfg.thresholds = vec![x];
    let report = run_experiment(&cfg, None).unwrap();
    assert!(report.notes.iter().any(|n| n.contains("LDP")));
    let cell = report.cell(&format!("y_z[x={x}]"), 512).unwrap();
    assert!(cell.target > 0.0);
}

#[test]
fn reports_are_byte_identical_across_worker_counts() {
    let mut cfg = config(ExperimentKind::Mdp, 2.0, 1.0, 512);
    cfg.n_grid = vec![256, 512];
    cfg.samples_per_n = 20_000;
    cfg.thresholds = vec![0.1, 0.2];
    let r1 = run_experiment(&cfg, Some(1)).unwrap();
    let r4 = run_experiment(&cfg, Some(4)).unwrap();
    let r8 = run_experiment(&cfg, Some(8)).unwrap();
    assert_eq!(r1.to_csv(), r4.to_csv());
    assert_eq!(r1.to_csv(), r8.to_csv());
    assert_eq!(r1.to_json(), r8.to_json());

    // and across repeated runs in the same pool
    let again = run_experiment(&cfg, Some(4)).unwrap();
    assert_eq!(r4.to_csv(), again.to_csv());
}

#[test]
fn seed_changes_the_numbers() {
    let mut cfg = config(ExperimentKind::Clt, 2.0, 1.0, 256);
    let a = run_experiment(&cfg, None).unwrap();
    cfg.seed ^= 0xdeadbeef;
    let b = run_experiment(&cfg, None).unwrap();
    assert_ne!(
        a.cell("variance", 256).unwrap().empirical,
        b.cell("variance", 256).unwrap().empirical
    );
}
