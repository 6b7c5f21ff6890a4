//! Experiment reports: one row per checked quantity, with the empirical
//! value, the theoretical target, a standard error, and a verdict.

use serde_json::json;

use crate::textio::{fmt_float, json_float};

use super::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The tail had no exceedances at this sample size; the cell is not
    /// evidence against the theory, just out of Monte Carlo reach.
    Insufficient,
    /// Diagnostic row without a pass/fail meaning.
    Info,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Insufficient => "INSUFFICIENT",
            Verdict::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportCell {
    pub n: usize,
    pub statistic: String,
    pub empirical: f64,
    pub target: f64,
    pub stderr: f64,
    pub verdict: Verdict,
}

impl ReportCell {
    pub fn info(
        n: usize,
        statistic: impl Into<String>,
        empirical: f64,
        target: f64,
        stderr: f64,
    ) -> Self {
        ReportCell {
            n,
            statistic: statistic.into(),
            empirical,
            target,
            stderr,
            verdict: Verdict::Info,
        }
    }
}

/// Full result of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<ReportCell>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    /// True when no cell failed (insufficient-samples cells do not fail a
    /// report, they mark unreachable tails).
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn cell(&self, statistic: &str, n: usize) -> Option<&ReportCell> {
        self.cells
            .iter()
            .find(|c| c.statistic == statistic && c.n == n)
    }

    pub const CSV_HEADER: &'static str = "n,statistic,empirical,target,stderr,verdict";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.n,
                c.statistic,
                fmt_float(c.empirical),
                fmt_float(c.target),
                fmt_float(c.stderr),
                c.verdict.label()
            ));
        }
        out
    }

    /// JSON summary: verdicts plus a config echo.  Non-finite numbers are
    /// emitted as the strings "inf"/"-inf".
    pub fn to_json(&self) -> String {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|c| {
                json!({
                    "n": c.n,
                    "statistic": c.statistic,
                    "empirical": json_float(c.empirical),
                    "target": json_float(c.target),
                    "stderr": json_float(c.stderr),
                    "verdict": c.verdict.label(),
                })
            })
            .collect();
        let doc = json!({
            "kind": self.config.kind.label(),
            "passed": self.passed(),
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            "cells": cells,
            "notes": self.notes,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentKind, MixingFamily};
    use crate::specfun::BallParams;

    fn report() -> ExperimentReport {
        ExperimentReport {
            config: ExperimentConfig {
                kind: ExperimentKind::Clt,
                params: BallParams {
                    p: 2.0,
                    q: 1.0,
                    n: 64,
                },
                law: MixingFamily::Dirac0,
                n_grid: vec![],
                samples_per_n: 2000,
                seed: 1,
                beta: 0.25,
                thresholds: vec![],
                mu_n_rule: None,
                k_rule: None,
            },
            cells: vec![
                ReportCell {
                    n: 64,
                    statistic: "variance".into(),
                    empirical: 0.07,
                    target: 0.0708,
                    stderr: 0.001,
                    verdict: Verdict::Pass,
                },
                ReportCell {
                    n: 64,
                    statistic: "y[t=1]".into(),
                    empirical: f64::NEG_INFINITY,
                    target: -7.06,
                    stderr: f64::INFINITY,
                    verdict: Verdict::Insufficient,
                },
            ],
            notes: vec!["note".into()],
        }
    }

    #[test]
    fn csv_renders_inf_tokens() {
        let r = report();
        let csv = r.to_csv();
        assert!(csv.starts_with("n,statistic,empirical,target,stderr,verdict\n"));
        assert!(csv.contains(",-inf,"));
        assert!(csv.contains(",inf,"));
        assert!(csv.contains("INSUFFICIENT"));
    }

    #[test]
    fn insufficient_does_not_fail_report() {
        let r = report();
        assert!(r.passed());
        let json_text = r.to_json();
        assert!(json_text.contains("\"-inf\""));
        assert!(json_text.contains("\"passed\": true"));
    }
}
