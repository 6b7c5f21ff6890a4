//! Quadrature for the log-moment-generating function
//!
//!   Lambda(t1, t2) = log integral_0^inf exp(t1 x^q + (t2 - 1/p) x^p) dx
//!                    / (p^(1/p) Gamma(1 + 1/p)),
//!
//! finite on R x (-inf, 1/p) when q < p, together with the moments of the
//! tilted density needed for gradients and Hessians of Lambda.
//!
//! Scheme: the exponent is normalized by its maximum, the x-integral is
//! split at x = 1, and the outer piece is taken in u = x^p coordinates where
//! the integrand is a gamma-type kernel; the remaining tail beyond the
//! adaptive window is controlled by an analytic exponential bound.

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::specfun::ln_gamma;

/// Log of the total tilted mass plus the tilted means E[x^r] for each
/// requested order r.
#[derive(Debug, Clone)]
pub(crate) struct TiltedIntegrals {
    pub log_mass: f64,
    pub means: Vec<f64>,
}

const TAIL_LOG_CUT: f64 = -45.0;

/// Evaluate log integral exp(t1 x^q - a x^p) x^r dx over [0, inf) for each
/// order r (a = 1/p - t2 > 0), all relative to the shared peak value, and
/// return the log-mass (r = 0 term, including the normalizing constant) and
/// the mean ratios.
pub(crate) fn tilted_integrals(
    t1: f64,
    t2: f64,
    p: f64,
    q: f64,
    orders: &[f64],
) -> Result<TiltedIntegrals> {
    if !(q < p) {
        return Err(Error::Domain(format!(
            "log-MGF quadrature requires q < p, got p = {p}, q = {q}"
        )));
    }
    let a = 1.0 / p - t2;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("t2 must lie below 1/p, got {t2}")));
    }

    // peak of g(x) = t1 x^q - a x^p; g(0) = 0
    let peak = if t1 > 0.0 {
        let x_star = (q * t1 / (a * p)).powf(1.0 / (p - q));
        (t1 * x_star.powf(q) - a * x_star.powf(p)).max(0.0)
    } else {
        0.0
    };

    let integral_for = |r: f64| -> Result<f64> {
        // inner piece in x-coordinates: no singularity since r >= 0
        let inner = integrate(
            |x: f64| {
                if x <= 0.0 {
                    return 0.0;
                }
                let ln_v = t1 * x.powf(q) - a * x.powf(p) + r * x.ln() - peak;
                ln_v.exp()
            },
            0.0,
            1.0,
            1e-14,
            1e-12,
        )?;

        // outer piece in u = x^p coordinates: x^r dx = (1/p) u^((r+1)/p - 1) du
        let s = q / p;
        let e = (r + 1.0) / p - 1.0;
        let phi = |u: f64| t1 * u.powf(s) - a * u + e * u.ln() - peak;
        let phi_prime = |u: f64| s * t1 * u.powf(s - 1.0) - a + e / u;

        // window end: slope safely negative and integrand negligible
        let mut upper = 2.0f64;
        loop {
            if phi_prime(upper) <= -0.5 * a && phi(upper) <= TAIL_LOG_CUT {
                break;
            }
            upper *= 2.0;
            if upper > 1e13 {
                return Err(Error::Quadrature(format!(
                    "tail window for the log-MGF integral did not close \
                     (t1={t1}, t2={t2}, p={p}, q={q}, r={r})"
                )));
            }
        }
        let outer = integrate(|u: f64| phi(u).exp() / p, 1.0, upper, 1e-14, 1e-12)?;
        // with phi' <= -a/2 beyond `upper`, the tail is below e^phi(upper) * 2/(a p)
        let tail_bound = phi(upper).exp() * 2.0 / (a * p);

        let total = (inner.value + outer.value).max(0.0);
        if !(total > 0.0) {
            return Err(Error::Quadrature(
                "tilted mass evaluated to zero; exponent normalization failed".into(),
            ));
        }
        if tail_bound > 1e-13 * total {
            return Err(Error::Quadrature(format!(
                "tail bound {tail_bound:.3e} not negligible against integral {total:.3e}"
            )));
        }
        Ok(total)
    };

    let mass = integral_for(0.0)?;
    let mut means = Vec::with_capacity(orders.len());
    for &r in orders {
        if !(r > 0.0) {
            return Err(Error::Domain("moment orders must be positive".into()));
        }
        means.push(integral_for(r)? / mass);
    }

    let ln_norm = p.ln() / p + ln_gamma(1.0 + 1.0 / p);
    Ok(TiltedIntegrals {
        log_mass: peak + mass.ln() - ln_norm,
        means,
    })
}
