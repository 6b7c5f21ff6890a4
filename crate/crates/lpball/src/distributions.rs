//! Exact samplers and density evaluators for the measure family on l_p^n
//! balls: p-generalized Gaussians, the mixing laws W, ball points via the
//! Gaussian/mixing representation Z = Y / (||Y||_p^p + W)^(1/p), and
//! coordinate / Haar-subspace projections.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution, Exp, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::integrate_half_line;
use crate::specfun::{ln_gamma, BallParams};
use crate::statistics::CompensatedSum;

/// Sampler hook type for user-supplied mixing laws.
pub type MixingSampler = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;
/// Density hook type for user-supplied mixing laws.
pub type MixingDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampler hook for a user-supplied mixing law.  The density is optional; it
/// is required only by [`radial_density`].
#[derive(Clone)]
pub struct ExternalLaw {
    pub sampler: MixingSampler,
    pub density: Option<MixingDensity>,
}

impl fmt::Debug for ExternalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalLaw")
            .field("density", &self.density.is_some())
            .finish()
    }
}

/// Distribution of the radial mixing variable W on [0, infinity).
///
/// Dirac0 yields the cone measure on the sphere, Exponential(1/p) the uniform
/// distribution on the ball, Gamma(alpha, 1/p) the beta-type measures.  Any
/// other Borel law can be plugged in through `External`, but assumptions on
/// its tails (needed by the individual limit theorems) are then the caller's
/// responsibility.
#[derive(Debug, Clone)]
pub enum MixingLaw {
    Dirac0,
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    External(ExternalLaw),
}

impl MixingLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        if rate > 0.0 && rate.is_finite() {
            Ok(MixingLaw::Exponential { rate })
        } else {
            Err(Error::Domain(format!(
                "exponential rate must be positive, got {rate}"
            )))
        }
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite() {
            Ok(MixingLaw::Gamma { shape, rate })
        } else {
            Err(Error::Domain(format!(
                "gamma parameters must be positive, got shape {shape}, rate {rate}"
            )))
        }
    }

    /// W({0}): 1 for the Dirac mass, 0 for the absolutely continuous laws.
    pub fn mass_at_zero(&self) -> f64 {
        match self {
            MixingLaw::Dirac0 => 1.0,
            _ => 0.0,
        }
    }
}

/// One draw from the mixing law.  Dirac0 returns exactly 0.
pub fn sample_mixing<R: Rng>(law: &MixingLaw, rng: &mut R) -> Result<f64> {
    match law {
        MixingLaw::Dirac0 => Ok(0.0),
        MixingLaw::Exponential { rate } => Ok(Exp::new(*rate)
            .map_err(|e| Error::Domain(format!("exponential rate: {e}")))?
            .sample(rng)),
        MixingLaw::Gamma { shape, rate } => Ok(Gamma::new(*shape, 1.0 / rate)
            .map_err(|e| Error::Domain(format!("gamma parameters: {e}")))?
            .sample(rng)),
        MixingLaw::External(ext) => {
            let w = (ext.sampler)(rng);
            if w >= 0.0 && w.is_finite() {
                Ok(w)
            } else {
                Err(Error::Contract(format!(
                    "external mixing sampler returned {w}"
                )))
            }
        }
    }
}

enum PggKind {
    /// p = 2 is the standard Gaussian.
    Gaussian,
    /// p = 1 is the Laplace law (sign times a unit exponential).
    Laplace,
    /// General p via |Y| = (p G)^(1/p), G ~ Gamma(1/p, 1), exact for every p.
    General {
        gamma: Gamma<f64>,
        inv_p: f64,
        p: f64,
    },
}

/// The p-generalized Gaussian with density exp(-|x|^p / p) / c_p.
///
/// Sampling uses the gamma transform (no rejection), with the p = 1 and
/// p = 2 cases routed to the matching standard samplers.
pub struct PGeneralizedGaussian {
    p: f64,
    kind: PggKind,
}

impl PGeneralizedGaussian {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        let kind = if p == 2.0 {
            PggKind::Gaussian
        } else if p == 1.0 {
            PggKind::Laplace
        } else {
            let gamma = Gamma::new(1.0 / p, 1.0)
                .map_err(|e| Error::Domain(format!("gamma shape 1/p: {e}")))?;
            PggKind::General {
                gamma,
                inv_p: 1.0 / p,
                p,
            }
        };
        Ok(PGeneralizedGaussian { p, kind })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Magnitude-only draw |Y|; the harness inner loops use this since the
    /// norm statistics never see the signs.
    #[inline]
    pub fn sample_abs<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            PggKind::Gaussian => {
                let x: f64 = StandardNormal.sample(rng);
                x.abs()
            }
            PggKind::Laplace => Exp1.sample(rng),
            PggKind::General { gamma, inv_p, p } => (p * gamma.sample(rng)).powf(*inv_p),
        }
    }

    /// Density f_p(x) = exp(-|x|^p/p) / (2 p^(1/p) Gamma(1 + 1/p)).
    pub fn density(&self, x: f64) -> f64 {
        let p = self.p;
        let ln_c = std::f64::consts::LN_2 + p.ln() / p + ln_gamma(1.0 + 1.0 / p);
        (-x.abs().powf(p) / p - ln_c).exp()
    }
}

impl Distribution<f64> for PGeneralizedGaussian {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            PggKind::Gaussian => StandardNormal.sample(rng),
            PggKind::Laplace => {
                let e: f64 = Exp1.sample(rng);
                if rng.random::<bool>() {
                    e
                } else {
                    -e
                }
            }
            PggKind::General { gamma, inv_p, p } => {
                let mag = (p * gamma.sample(rng)).powf(*inv_p);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
        }
    }
}

/// Vector of independent p-generalized Gaussian coordinates.
#[derive(Debug, Clone)]
pub struct GgVector {
    pub coords: Vec<f64>,
    pub p: f64,
}

impl GgVector {
    /// l_r norm of the coordinates, compensated summation.
    pub fn norm(&self, r: f64) -> f64 {
        lp_norm(&self.coords, r)
    }
}

/// A point of the unit l_p ball together with the exponent it was built for.
#[derive(Debug, Clone)]
pub struct BallPoint {
    pub coords: Vec<f64>,
    pub p: f64,
}

impl BallPoint {
    pub fn norm(&self, r: f64) -> f64 {
        lp_norm(&self.coords, r)
    }

    pub fn norm_p(&self) -> f64 {
        self.norm(self.p)
    }
}

/// l_r norm with compensated accumulation of the power sum.
pub fn lp_norm(coords: &[f64], r: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &c in coords {
        acc.add(pow_abs(c.abs(), r));
    }
    acc.value().powf(1.0 / r)
}

/// |x|^e with fast paths for the exponents that dominate the Monte Carlo
/// loops.
#[inline(always)]
pub fn pow_abs(x_abs: f64, e: f64) -> f64 {
    if e == 2.0 {
        x_abs * x_abs
    } else if e == 1.0 {
        x_abs
    } else {
        x_abs.powf(e)
    }
}

/// n independent p-generalized Gaussian draws.
pub fn sample_gg_vector<R: Rng>(p: f64, n: usize, rng: &mut R) -> Result<GgVector> {
    if n == 0 {
        return Err(Error::Domain("dimension n must be at least 1".into()));
    }
    let dist = PGeneralizedGaussian::new(p)?;
    let coords = (0..n).map(|_| dist.sample(rng)).collect();
    Ok(GgVector { coords, p })
}

/// Power sums of one Gaussian/mixing draw, the sufficient statistics for all
/// norm experiments: sum |Y_i|^q, sum |Y_i|^p and the mixing draw W.
#[derive(Debug, Clone, Copy)]
pub struct NormPowerSums {
    pub sum_q: f64,
    pub sum_p: f64,
    pub w: f64,
}

impl NormPowerSums {
    /// ||Z||_q of the represented ball point.
    pub fn norm_q(&self, p: f64, q: f64) -> f64 {
        self.sum_q.powf(1.0 / q) / (self.sum_p + self.w).powf(1.0 / p)
    }
}

/// Draw the power sums without materializing the vector.
pub fn sample_norm_power_sums<R: Rng>(
    params: &BallParams,
    law: &MixingLaw,
    rng: &mut R,
) -> Result<NormPowerSums> {
    params.validate()?;
    let dist = PGeneralizedGaussian::new(params.p)?;
    let (p, q) = (params.p, params.q);
    let mut sum_q = CompensatedSum::new();
    let mut sum_p = CompensatedSum::new();
    for _ in 0..params.n {
        let a = dist.sample_abs(rng);
        sum_q.add(pow_abs(a, q));
        sum_p.add(pow_abs(a, p));
    }
    let w = sample_mixing(law, rng)?;
    Ok(NormPowerSums {
        sum_q: sum_q.value(),
        sum_p: sum_p.value(),
        w,
    })
}

/// One draw from the ball measure via Z = Y / (||Y||_p^p + W)^(1/p).
pub fn sample_ball<R: Rng>(params: &BallParams, law: &MixingLaw, rng: &mut R) -> Result<BallPoint> {
    params.validate()?;
    let gg = sample_gg_vector(params.p, params.n, rng)?;
    let w = sample_mixing(law, rng)?;
    let mut sum_p = CompensatedSum::new();
    for &y in &gg.coords {
        sum_p.add(pow_abs(y.abs(), params.p));
    }
    let denom_p = sum_p.value() + w;
    if denom_p <= 0.0 {
        return Err(Error::Inconsistent(
            "||Y||_p^p + W vanished; cannot normalize the Gaussian vector".into(),
        ));
    }
    let scale = denom_p.powf(1.0 / params.p);
    let coords: Vec<f64> = gg.coords.iter().map(|&y| y / scale).collect();
    let point = BallPoint {
        coords,
        p: params.p,
    };
    #[cfg(debug_assertions)]
    {
        let norm = point.norm_p();
        debug_assert!(norm <= 1.0 + 1e-12, "ball point escaped: ||Z||_p = {norm}");
        if matches!(law, MixingLaw::Dirac0) {
            debug_assert!(
                (norm - 1.0).abs() <= 1e-12,
                "sphere point off the sphere: {norm}"
            );
        }
    }
    Ok(point)
}

/// Radial density h(r) of the ball measure with respect to the uniform
/// distribution:
///
///   h(r) = (p^(n/p) Gamma(1+n/p))^-1 (1-r^p)^(-1-n/p)
///          * integral of s^(n/p) exp(-s r^p (1-r^p)^-1 / p) W(ds).
///
/// Closed form for the exponential and gamma families (a gamma integral);
/// adaptive quadrature against the supplied density for external laws.  The
/// Dirac mass carries no density part, so h is identically 0 there.  r = 1
/// is outside the domain (the prefactor is singular).
pub fn radial_density(r: f64, params: &BallParams, law: &MixingLaw) -> Result<f64> {
    params.validate()?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!(
            "radial density defined for 0 <= r < 1, got {r}"
        )));
    }
    let (p, n) = (params.p, params.n as f64);
    match law {
        MixingLaw::Dirac0 => Ok(0.0),
        MixingLaw::Exponential { rate } => gamma_mixing_density(r, p, n, 1.0, *rate),
        MixingLaw::Gamma { shape, rate } => gamma_mixing_density(r, p, n, *shape, *rate),
        MixingLaw::External(ext) => {
            let density = ext.density.as_ref().ok_or_else(|| {
                Error::Unsupported(
                    "external mixing law supplies only a sampler; h(r) needs its density".into(),
                )
            })?;
            let rp = r.powf(p);
            let u = rp / (p * (1.0 - rp));
            // peak of s^(n/p) e^(-u s) at s* = n/(p u); factor it out
            let log_peak = if u > 0.0 {
                let s_star = n / (p * u);
                n / p * s_star.ln() - u * s_star
            } else {
                0.0
            };
            let integral = integrate_half_line(
                |s| {
                    if s <= 0.0 {
                        return 0.0;
                    }
                    let ln_val = n / p * s.ln() - u * s - log_peak;
                    ln_val.exp() * density(s)
                },
                1e-13,
                1e-11,
            )?;
            let ln_prefactor =
                -(n / p) * p.ln() - ln_gamma(1.0 + n / p) - (1.0 + n / p) * (1.0 - rp).ln();
            Ok((ln_prefactor + log_peak).exp() * integral.value)
        }
    }
}

/// Closed form of h(r) for W = Gamma(shape, rate); Exponential(rate) is
/// shape = 1.  The mixing integral is a gamma integral:
///
///   integral s^(n/p + shape - 1) e^(-(rate + u) s) ds
///     = Gamma(n/p + shape) / (rate + u)^(n/p + shape).
fn gamma_mixing_density(r: f64, p: f64, n: f64, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::Domain(
            "gamma mixing needs positive shape and rate".into(),
        ));
    }
    let rp = r.powf(p);
    let u = rp / (p * (1.0 - rp));
    let ln_h = -(n / p) * p.ln() - ln_gamma(1.0 + n / p) - (1.0 + n / p) * (1.0 - rp).ln()
        + shape * rate.ln()
        + ln_gamma(n / p + shape)
        - ln_gamma(shape)
        - (n / p + shape) * (rate + u).ln();
    Ok(ln_h.exp())
}

/// First k coordinates of a point (the orthogonal projection onto the
/// leading coordinate subspace).
pub fn project_coordinates(point: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > point.len() {
        return Err(Error::Domain(format!(
            "projection dimension k = {k} must satisfy 1 <= k <= n = {}",
            point.len()
        )));
    }
    Ok(point[..k].to_vec())
}

/// Euclidean norm of the projection of `point` onto a Haar-random
/// k-dimensional subspace, realized by orthonormalizing a k x n standard
/// Gaussian matrix (modified Gram-Schmidt with reorthogonalization) and
/// applying it.  Rank-deficient draws (probability zero) are retried.
pub fn project_haar<R: Rng>(point: &[f64], k: usize, rng: &mut R) -> Result<f64> {
    let n = point.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "projection dimension k = {k} must satisfy 1 <= k <= n = {n}"
        )));
    }
    'retry: for attempt in 0..8 {
        let mut rows: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        for i in 0..k {
            let (done, rest) = rows.split_at_mut(i);
            let row = &mut rest[0];
            for _pass in 0..2 {
                for prev in done.iter() {
                    let r: f64 = row.iter().zip(prev).map(|(a, b)| a * b).sum();
                    for (a, b) in row.iter_mut().zip(prev) {
                        *a -= r * b;
                    }
                }
            }
            let nrm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                if attempt == 7 {
                    return Err(Error::Nonconvergence(
                        "Gaussian matrix persistently rank deficient in Haar projection".into(),
                    ));
                }
                continue 'retry;
            }
            for a in row.iter_mut() {
                *a /= nrm;
            }
        }
        let mut acc = 0.0;
        for row in &rows {
            let d: f64 = row.iter().zip(point).map(|(a, b)| a * b).sum();
            acc += d * d;
        }
        return Ok(acc.sqrt());
    }
    unreachable!()
}

/// Squared-norm fraction ||P_E x||^2 / ||x||^2 for a Haar-random k-subspace:
/// Beta(k/2, (n-k)/2) in distribution.  Scalable route for the experiment
/// harness; agrees with [`project_haar`] in law.
pub fn haar_norm_sq_fraction<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "projection dimension k = {k} must satisfy 1 <= k <= n = {n}"
        )));
    }
    if k == n {
        return Ok(1.0);
    }
    let beta = Beta::new(k as f64 / 2.0, (n - k) as f64 / 2.0)
        .map_err(|e| Error::Domain(format!("beta parameters: {e}")))?;
    Ok(beta.sample(rng))
}
