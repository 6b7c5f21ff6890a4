//! Sampling and limit-theorem verification for the Barthe-Guedon-Mendelson-
//! Naor family of probability measures on l_p^n balls.
//!
//! The crate has five parts:
//!
//! * [`specfun`] - closed-form constants: moments of the p-generalized
//!   Gaussian, CLT/projection variances, the 2x2 moment covariance.
//! * [`distributions`] - exact samplers (Gaussian/mixing representation) and
//!   the radial density h(r), plus coordinate and Haar projections.
//! * [`statistics`] - mergeable moment summaries, normalized limit
//!   statistics, tail log-probabilities, Kolmogorov-Smirnov distances.
//! * [`ratefun`] - moderate- and large-deviation rate functions, the
//!   quadrature-defined log-MGF and its numerical Legendre-Fenchel
//!   transform, and the contraction-principle minimizations.
//! * [`harness`] - reproducible chunk-parallel Monte Carlo experiments that
//!   test the CLT/MDP/LDP predictions against the closed-form targets.

// Negated float comparisons like `!(x > 0.0)` are deliberate: they reject
// NaN along with the out-of-domain values.  Frozen reference constants keep
// their full published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod distributions;
pub mod error;
pub mod harness;
pub mod quadrature;
pub mod ratefun;
pub mod specfun;
pub mod statistics;
pub mod textio;

pub use distributions::{BallPoint, ExternalLaw, GgVector, MixingLaw, PGeneralizedGaussian};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, Verdict};
pub use ratefun::{ConjugatePoint, ExtReal, MixingRate, RateGrid, SpeedKind};
pub use specfun::{BallParams, CovMatrix2};
pub use statistics::MomentSummary;
