//! Rate functions for the moderate- and large-deviation principles: the
//! quadratic MDP rates built from the moment covariance, the closed-form
//! LDP rate for q > p, the quadrature-defined log-MGF with its numerical
//! Legendre-Fenchel transform for q < p, and the contraction-principle
//! infima that push those rates through the norm mapping.

mod conjugate;
mod extreal;
mod lambda;
mod minimize;

pub use conjugate::{legendre_fenchel, legendre_fenchel_warm, ConjugatePoint};
pub use extreal::ExtReal;

use crate::error::{Error, Result};
use crate::specfun::{abs_moment, clt_variance, covariance_matrix, ln_gamma};

use minimize::{coordinate_descent_2d, golden_section, scan_then_golden};

/// Speed sequence attached to a tabulated rate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedKind {
    /// Speed n (classical LDP scale).
    N,
    /// Speed b_n^2 (moderate deviations).
    BnSquared,
    /// Speed n^(p/q) (the q > p LDP).
    NPowPOverQ,
}

impl SpeedKind {
    /// Token used in CSV emission.
    pub fn label(&self) -> &'static str {
        match self {
            SpeedKind::N => "n",
            SpeedKind::BnSquared => "bn2",
            SpeedKind::NPowPOverQ => "n^(p/q)",
        }
    }
}

/// A rate function tabulated on a strictly increasing grid, together with
/// the speed it applies at.  Evaluation interpolates linearly and returns
/// +inf outside the support.
#[derive(Debug, Clone)]
pub struct RateGrid {
    xs: Vec<f64>,
    values: Vec<ExtReal>,
    pub speed: SpeedKind,
}

impl RateGrid {
    pub fn new(xs: Vec<f64>, values: Vec<ExtReal>, speed: SpeedKind) -> Result<Self> {
        if xs.len() != values.len() || xs.is_empty() {
            return Err(Error::Config(
                "rate grid needs equally many nodes and values".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "rate grid nodes must be strictly increasing".into(),
            ));
        }
        Ok(RateGrid { xs, values, speed })
    }

    pub fn nodes(&self) -> (&[f64], &[ExtReal]) {
        (&self.xs, &self.values)
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return ExtReal::PosInf;
        }
        let idx = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        match (self.values[idx - 1], self.values[idx]) {
            (ExtReal::Finite(y0), ExtReal::Finite(y1)) => {
                ExtReal::new(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
            _ => ExtReal::PosInf,
        }
    }
}

/// Rate function of the mixing sequence W_n / n.
#[derive(Debug, Clone)]
pub enum MixingRate {
    /// Dirac mass at zero: 0 at x = 0, +inf elsewhere.
    Dirac,
    /// Exponential(1/p) mixing: x/p on x >= 0, +inf below.
    Exponential { p: f64 },
    /// User-tabulated rate, +inf outside the grid support.
    UserGrid(RateGrid),
}

impl MixingRate {
    pub fn eval(&self, x: f64) -> ExtReal {
        match self {
            MixingRate::Dirac => {
                if x == 0.0 {
                    ExtReal::new(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
            MixingRate::Exponential { p } => {
                if x >= 0.0 {
                    ExtReal::new(x / p)
                } else {
                    ExtReal::PosInf
                }
            }
            MixingRate::UserGrid(grid) => grid.eval(x),
        }
    }
}

fn require_q_below_p(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::Domain("exponents must be positive".into()));
    }
    if q == p {
        return Err(Error::Degenerate(
            "p = q: the centered statistic collapses and no nontrivial MDP rate exists".into(),
        ));
    }
    if q > p {
        return Err(Error::Domain(format!(
            "this rate requires q < p, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// MDP rate t^2 / (2 sigma^2) for the scaled statistic V_n / b_n, valid for
/// q < p (the p = q case is refused: sigma^2 vanishes).
pub fn mdp_rate(t: f64, p: f64, q: f64) -> Result<f64> {
    require_q_below_p(p, q)?;
    let sigma2 = clt_variance(p, q)?;
    if sigma2 <= 0.0 {
        return Err(Error::Degenerate("vanishing CLT variance".into()));
    }
    Ok(t * t / (2.0 * sigma2))
}

/// Bivariate MDP rate 1/2 <(x,y), C^-1 (x,y)> for the pair of normalized
/// power sums, with C the moment covariance matrix.
pub fn mdp_rate_bivariate(x: f64, y: f64, p: f64, q: f64) -> Result<f64> {
    require_q_below_p(p, q)?;
    let cov = covariance_matrix(p, q)?;
    let det = cov.det();
    if det < 1e-14 {
        return Err(Error::SingularCovariance { det });
    }
    Ok(0.5 * (cov.c22 * x * x + cov.c11 * y * y - 2.0 * cov.c12 * x * y) / det)
}

/// The explicit printed form of the bivariate rate,
///
///   -p^(1-2q/p) G(1/p)^2/(2c) x^2 - (G(1/p) G((1+2q)/p) - G((1+q)/p)^2)/(2c) y^2
///     + p^(-q/p) G(1/p) G((1+q)/p)/c xy,
///   c = (p + q^2) G((1+q)/p)^2 - p G(1/p) G((1+2q)/p),
///
/// kept as a second route: [`compare_bivariate_forms`] checks it against the
/// quadratic form above, which is what the moderate-deviations principle for
/// sums of i.i.d. vectors delivers and therefore authoritative.
pub fn mdp_rate_bivariate_closed(x: f64, y: f64, p: f64, q: f64) -> Result<f64> {
    require_q_below_p(p, q)?;
    let g1 = gamma_pos(1.0 / p);
    let g1q = gamma_pos((1.0 + q) / p);
    let g12q = gamma_pos((1.0 + 2.0 * q) / p);
    let c = (p + q * q) * g1q * g1q - p * g1 * g12q;
    if c.abs() < 1e-300 {
        return Err(Error::SingularCovariance { det: c });
    }
    Ok(-p.powf(1.0 - 2.0 * q / p) * g1 * g1 / (2.0 * c) * x * x
        - (g1 * g12q - g1q * g1q) / (2.0 * c) * y * y
        + p.powf(-q / p) * g1 * g1q / c * x * y)
}

fn gamma_pos(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Outcome of checking the printed closed form against the quadratic form.
#[derive(Debug, Clone, Copy)]
pub struct BivariateFormComparison {
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    pub agrees: bool,
}

/// Compare the two bivariate-rate routes on the given points.
pub fn compare_bivariate_forms(
    p: f64,
    q: f64,
    points: &[(f64, f64)],
) -> Result<BivariateFormComparison> {
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for &(x, y) in points {
        let a = mdp_rate_bivariate(x, y, p, q)?;
        let b = mdp_rate_bivariate_closed(x, y, p, q)?;
        let diff = (a - b).abs();
        max_abs = max_abs.max(diff);
        max_rel = max_rel.max(diff / (1.0 + a.abs()));
    }
    Ok(BivariateFormComparison {
        max_abs_diff: max_abs,
        max_rel_diff: max_rel,
        agrees: max_rel < 1e-8,
    })
}

/// Constrained minimum of the bivariate rate over the contraction line
/// { (x, y) : x/(q M_p(q)) - y/p = t }.  Numerically reproduces
/// [`mdp_rate`]; the agreement is the contraction identity check.
pub fn mdp_rate_via_contraction(t: f64, p: f64, q: f64) -> Result<f64> {
    require_q_below_p(p, q)?;
    let m = abs_moment(p, q)?;
    let cov = covariance_matrix(p, q)?;
    if cov.det() < 1e-14 {
        return Err(Error::SingularCovariance { det: cov.det() });
    }
    // eliminate x on the line: x = q M_p(q) (t + y/p)
    let objective = |y: f64| {
        let x = q * m * (t + y / p);
        mdp_rate_bivariate(x, y, p, q).unwrap_or(f64::INFINITY)
    };
    let span = 50.0 * (1.0 + t.abs()) * (1.0 + cov.c22.sqrt());
    let (_, value) = golden_section(&objective, -span, span, 1e-13, 400);
    Ok(value)
}

/// Closed-form LDP rate for q > p at speed n^(p/q):
///
///   (1/p) (x^q - M_p(q))^(p/q)  for x >= M_p(q)^(1/q),  +inf otherwise.
pub fn ldp_rate_q_above_p(x: f64, p: f64, q: f64) -> Result<ExtReal> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::Domain("exponents must be positive".into()));
    }
    if !(p < q) {
        return Err(Error::Domain(format!(
            "the universal LDP rate requires p < q, got p = {p}, q = {q}"
        )));
    }
    let m = abs_moment(p, q)?;
    if x >= m.powf(1.0 / q) {
        Ok(ExtReal::new((x.powf(q) - m).max(0.0).powf(p / q) / p))
    } else {
        Ok(ExtReal::PosInf)
    }
}

/// Log-moment-generating function Lambda(t1, t2) of (|Y|^q, |Y|^p); finite
/// on R x (-inf, 1/p) for q < p, +inf at and beyond the boundary.
pub fn log_mgf(t1: f64, t2: f64, p: f64, q: f64) -> Result<ExtReal> {
    require_q_below_p(p, q)?;
    if t2 >= 1.0 / p {
        return Ok(ExtReal::PosInf);
    }
    let ti = lambda::tilted_integrals(t1, t2, p, q, &[])?;
    Ok(ExtReal::new(ti.log_mass))
}

/// Gradient of the log-MGF, (E_t |Y|^q, E_t |Y|^p) under the tilted law.
pub fn log_mgf_gradient(t1: f64, t2: f64, p: f64, q: f64) -> Result<(f64, f64)> {
    require_q_below_p(p, q)?;
    if t2 >= 1.0 / p {
        return Err(Error::Domain(format!("t2 must lie below 1/p, got {t2}")));
    }
    let ti = lambda::tilted_integrals(t1, t2, p, q, &[q, p])?;
    Ok((ti.means[0], ti.means[1]))
}

/// Radial log-MGF for the p = q case:
///
///   LambdaTilde(t) = log integral exp((t - 1/p) x^p) dx / (p^(1/p) Gamma(1+1/p))
///                  = -(1/p) log(1 - p t)   for t < 1/p,  +inf otherwise
///
/// (the integral is a gamma integral).
pub fn radial_log_mgf(t: f64, p: f64) -> Result<ExtReal> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain("p must be positive".into()));
    }
    if t >= 1.0 / p {
        return Ok(ExtReal::PosInf);
    }
    Ok(ExtReal::new(-(1.0 - p * t).ln() / p))
}

/// Conjugate of the radial log-MGF, in closed form:
///
///   LambdaTilde*(s) = (s - 1 - log s)/p  for s > 0,  +inf otherwise.
pub fn radial_conjugate(s: f64, p: f64) -> Result<ExtReal> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain("p must be positive".into()));
    }
    if s > 0.0 {
        Ok(ExtReal::new(((s - 1.0) - s.ln()) / p))
    } else {
        Ok(ExtReal::PosInf)
    }
}

/// Rates from iterative infima carry solver noise around 1e-10; a rate is
/// nonnegative by definition, so tiny negative values are zeroed and larger
/// ones escalate.
fn finish_rate(v: f64) -> Result<ExtReal> {
    if v == f64::INFINITY {
        Ok(ExtReal::PosInf)
    } else if v >= 0.0 {
        Ok(ExtReal::new(v))
    } else if v > -1e-8 {
        Ok(ExtReal::new(0.0))
    } else {
        Err(Error::Inconsistent(format!(
            "contraction infimum came out negative: {v}"
        )))
    }
}

/// LDP rate for q < p at speed n, by the contraction principle:
///
///   I(x) = inf { Lambda*(t1, t2) + I_W(t3) :
///                t1 > 0, t2 > 0, t3 >= 0, t1^(1/q) (t2 + t3)^(-1/p) = x }.
///
/// On the level set t1 = x^q (t2 + t3)^(q/p), leaving a minimization over
/// (t2, t3); the Dirac mixing pins t3 = 0 and the problem becomes
/// one-dimensional.
pub fn ldp_rate_q_below_p(x: f64, p: f64, q: f64, iw: &MixingRate) -> Result<ExtReal> {
    require_q_below_p(p, q)?;
    if !(x > 0.0) {
        return Ok(ExtReal::PosInf);
    }

    let conj_cache = std::cell::RefCell::new(None::<(f64, f64)>);
    let level_objective = |t2: f64, t3: f64| -> f64 {
        if !(t2 > 0.0) || t3 < 0.0 {
            return f64::INFINITY;
        }
        let t1 = x.powf(q) * (t2 + t3).powf(q / p);
        if !(t1 > 0.0) || !t1.is_finite() {
            return f64::INFINITY;
        }
        let warm = *conj_cache.borrow();
        match legendre_fenchel_warm(t1, t2, p, q, warm) {
            Ok(cp) => {
                let star = match cp.value {
                    ExtReal::Finite(v) if cp.converged => {
                        *conj_cache.borrow_mut() = Some(cp.argmax);
                        v
                    }
                    ExtReal::Finite(_) | ExtReal::PosInf => return f64::INFINITY,
                };
                match iw.eval(t3) {
                    ExtReal::Finite(w) => star + w,
                    ExtReal::PosInf => f64::INFINITY,
                }
            }
            Err(_) => f64::INFINITY,
        }
    };

    let best = match iw {
        MixingRate::Dirac => {
            // t3 is forced to 0
            let f = |z: f64| level_objective(z.exp(), 0.0);
            let (_, v) = scan_then_golden(&f, -8.0, 5.0, 53, 1e-10);
            v
        }
        _ => {
            let mut best = f64::INFINITY;
            let starts = [
                (0.0f64, 0.0f64),
                (0.0, 0.5),
                (-1.5, 0.0),
                (1.5, 0.0),
                (-1.5, 1.0),
                (1.5, 1.0),
                (0.7, 2.0),
                (-0.7, 0.1),
            ];
            for &(z0, w0) in &starts {
                let f = |z: f64, w: f64| level_objective(z.exp(), w);
                let ((_, _), v) =
                    coordinate_descent_2d(&f, (z0, w0), (-8.0, 5.0), (0.0, 8.0), 1e-10, 24);
                if v < best {
                    best = v;
                }
            }
            best
        }
    };
    finish_rate(best)
}

/// LDP rate in the p = q case at speed n:
///
///   I(x) = inf { LambdaTilde*(t1) + I_W(t2) :
///                t1 > 0, t2 >= 0, t1/(t1 + t2) = x^p },   0 < x <= 1,
///
/// reduced on the level set to a one-dimensional infimum over t1 with
/// t2 = t1 (1 - x^p)/x^p.
pub fn ldp_rate_q_equals_p(x: f64, p: f64, iw: &MixingRate) -> Result<ExtReal> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain("p must be positive".into()));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Ok(ExtReal::PosInf);
    }
    let xp = x.powf(p);
    let c = (1.0 - xp) / xp; // t2 = c * t1 on the level set
    let objective = |t1: f64| -> f64 {
        if !(t1 > 0.0) {
            return f64::INFINITY;
        }
        let star = match radial_conjugate(t1, p) {
            Ok(ExtReal::Finite(v)) => v,
            _ => return f64::INFINITY,
        };
        match iw.eval(c * t1) {
            ExtReal::Finite(w) => star + w,
            ExtReal::PosInf => f64::INFINITY,
        }
    };
    let f = |z: f64| objective(z.exp());
    let (_, v) = scan_then_golden(&f, -30.0, 8.0, 115, 1e-12);
    finish_rate(v)
}
