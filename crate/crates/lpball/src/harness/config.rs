//! Experiment configuration: JSON documents with snake_case keys matching
//! the field names below.  One example file per experiment kind ships in
//! the repository's `configs/` directory.

use serde::{Deserialize, Serialize};

use crate::distributions::MixingLaw;
use crate::error::{Error, Result};
use crate::specfun::BallParams;

/// Which verification experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Clt,
    GenClt,
    Mdp,
    Ldp,
    ProjCompare,
    Width1d,
}

impl ExperimentKind {
    pub fn label(&self) -> &'static str {
        match self {
            ExperimentKind::Clt => "clt",
            ExperimentKind::GenClt => "gen_clt",
            ExperimentKind::Mdp => "mdp",
            ExperimentKind::Ldp => "ldp",
            ExperimentKind::ProjCompare => "proj_compare",
            ExperimentKind::Width1d => "width_1d",
        }
    }
}

/// A family of mixing laws, possibly n-dependent (the generalized CLT runs
/// use gamma shapes growing linearly with the dimension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingFamily {
    Dirac0,
    Exponential {
        rate: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    /// W_n = Gamma(shape_per_n * n + shape_offset, rate); satisfies the
    /// generalized-CLT normalization with mu = shape_per_n/rate and
    /// tau^2 = shape_per_n/rate^2.
    GammaLinear {
        shape_per_n: f64,
        rate: f64,
        #[serde(default)]
        shape_offset: f64,
    },
}

impl MixingFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MixingFamily::Dirac0 => true,
            MixingFamily::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            MixingFamily::Gamma { shape, rate } => {
                shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
            MixingFamily::GammaLinear {
                shape_per_n,
                rate,
                shape_offset,
            } => shape_per_n > 0.0 && rate > 0.0 && shape_offset >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid mixing family parameters: {self:?}"
            )))
        }
    }

    /// The concrete law at dimension n.
    pub fn law_for(&self, n: usize) -> Result<MixingLaw> {
        match *self {
            MixingFamily::Dirac0 => Ok(MixingLaw::Dirac0),
            MixingFamily::Exponential { rate } => MixingLaw::exponential(rate),
            MixingFamily::Gamma { shape, rate } => MixingLaw::gamma(shape, rate),
            MixingFamily::GammaLinear {
                shape_per_n,
                rate,
                shape_offset,
            } => MixingLaw::gamma(shape_per_n * n as f64 + shape_offset, rate),
        }
    }

    /// E W_n, used as the centering sequence mu_n.
    pub fn mean_for(&self, n: usize) -> f64 {
        match *self {
            MixingFamily::Dirac0 => 0.0,
            MixingFamily::Exponential { rate } => 1.0 / rate,
            MixingFamily::Gamma { shape, rate } => shape / rate,
            MixingFamily::GammaLinear {
                shape_per_n,
                rate,
                shape_offset,
            } => (shape_per_n * n as f64 + shape_offset) / rate,
        }
    }

    /// mu = lim mu_n / n.
    pub fn mu_limit(&self) -> f64 {
        match *self {
            MixingFamily::GammaLinear {
                shape_per_n, rate, ..
            } => shape_per_n / rate,
            _ => 0.0,
        }
    }

    /// tau^2 = lim Var(W_n) / n.
    pub fn tau2_limit(&self) -> f64 {
        match *self {
            MixingFamily::GammaLinear {
                shape_per_n, rate, ..
            } => shape_per_n / (rate * rate),
            _ => 0.0,
        }
    }

    /// True if W_n does not depend on n.
    pub fn is_fixed(&self) -> bool {
        !matches!(self, MixingFamily::GammaLinear { .. })
    }
}

/// Centering rule for the generalized CLT statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuRule {
    /// mu_n = 0 (reduces the generalized statistic to the plain one).
    Zero,
    /// mu_n = E W_n.
    LawMean,
}

/// Projection dimension rule k_n for the projection experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KRule {
    /// k_n = n.
    Identity,
    /// k_n = ceil(lambda n).
    Fraction { lambda: f64 },
    /// k_n = n - ceil(sqrt(n)); has k_n/n -> 1 with a nontrivial gap.
    SqrtGap,
}

impl KRule {
    pub fn k_for(&self, n: usize) -> Result<usize> {
        let k = match *self {
            KRule::Identity => n,
            KRule::Fraction { lambda } => {
                if !(lambda > 0.0 && lambda <= 1.0) {
                    return Err(Error::Config(format!(
                        "k-rule fraction must lie in (0,1], got {lambda}"
                    )));
                }
                (lambda * n as f64).ceil() as usize
            }
            KRule::SqrtGap => n.saturating_sub((n as f64).sqrt().ceil() as usize),
        };
        if k == 0 || k > n {
            return Err(Error::Config(format!(
                "k-rule produced k = {k} outside 1..={n}"
            )));
        }
        Ok(k)
    }

    /// The limit of k_n/n.
    pub fn lambda_limit(&self) -> f64 {
        match *self {
            KRule::Identity | KRule::SqrtGap => 1.0,
            KRule::Fraction { lambda } => lambda,
        }
    }
}

fn default_beta() -> f64 {
    0.25
}

/// Full experiment description.  Serialized as JSON with exactly these
/// field names.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Ball/statistic exponents and the base dimension (used when `n_grid`
    /// is empty).
    pub params: BallParams,
    pub law: MixingFamily,
    /// Strictly increasing dimension ladder; empty means `[params.n]`.
    #[serde(default)]
    pub n_grid: Vec<usize>,
    pub samples_per_n: usize,
    pub seed: u64,
    /// Exponent of the moderate-deviation scale b_n = n^beta, in (0, 1/2).
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Thresholds for tail experiments (statistic scale depends on kind).
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub mu_n_rule: Option<MuRule>,
    #[serde(default)]
    pub k_rule: Option<KRule>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dimensions(&self) -> Vec<usize> {
        if self.n_grid.is_empty() {
            vec![self.params.n]
        } else {
            self.n_grid.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.law.validate()?;
        if !self.n_grid.is_empty() && self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if self.samples_per_n < 1000 {
            return Err(Error::Config(format!(
                "samples_per_n must be at least 1000, got {}",
                self.samples_per_n
            )));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::Config(format!(
                "beta must lie in (0, 1/2), got {}",
                self.beta
            )));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("thresholds must be finite".into()));
        }
        match self.kind {
            ExperimentKind::Mdp => {
                if self.thresholds.is_empty() {
                    return Err(Error::Config(
                        "mdp experiments need at least one threshold".into(),
                    ));
                }
                if !(self.params.q < self.params.p) {
                    return Err(Error::Config(format!(
                        "the MDP requires q < p, got p = {}, q = {}",
                        self.params.p, self.params.q
                    )));
                }
            }
            ExperimentKind::Ldp => {
                if self.thresholds.is_empty() {
                    return Err(Error::Config(
                        "ldp experiments need at least one threshold".into(),
                    ));
                }
                if self.params.p == self.params.q {
                    return Err(Error::Config("the LDP harness covers p != q".into()));
                }
            }
            ExperimentKind::ProjCompare => {
                if self.k_rule.is_none() {
                    return Err(Error::Config("proj_compare needs a k_rule".into()));
                }
                let uniform_rate = 1.0 / self.params.p;
                match self.law {
                    MixingFamily::Exponential { rate }
                        if (rate - uniform_rate).abs() <= 1e-12 * uniform_rate => {}
                    _ => {
                        return Err(Error::Config(format!(
                            "proj_compare is stated for the uniform distribution; \
                             use law = exponential with rate 1/p = {uniform_rate}"
                        )))
                    }
                }
            }
            ExperimentKind::Width1d => {
                let q = self.params.q;
                if !(q > 1.0) || q == 2.0 {
                    return Err(Error::Config(format!(
                        "width_1d needs q > 1 and q != 2 (Hoelder conjugate), got {q}"
                    )));
                }
            }
            ExperimentKind::Clt | ExperimentKind::GenClt => {}
        }
        Ok(())
    }
}
