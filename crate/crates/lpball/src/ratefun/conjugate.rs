//! Numerical Legendre-Fenchel transform of the log-MGF:
//!
//!   Lambda*(s) = sup { t1 s1 + t2 s2 - Lambda(t1, t2) : t2 < 1/p }.
//!
//! The objective is smooth and strictly concave inside the domain; the sup
//! is found by a coarse grid warm start followed by damped Newton ascent
//! under a logarithmic barrier against the t2 -> 1/p boundary, with the
//! barrier weight shrunk geometrically.  Gradients and Hessians come from
//! the tilted moments (differentiation under the integral), not finite
//! differences.
//!
//! The sup diverges exactly when s leaves the closure of the gradient range
//! (for instance any s with a nonpositive component); escaping iterates are
//! reported as `value = PosInf, converged = false`, never as a spurious
//! finite number.

use crate::error::{Error, Result};

use super::extreal::ExtReal;
use super::lambda::tilted_integrals;

/// Result of one conjugate evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatePoint {
    /// The supremum; `PosInf` when the objective is unbounded above.
    pub value: ExtReal,
    /// Maximizing (t1, t2) when finite.
    pub argmax: (f64, f64),
    /// True only if the gradient norm of t . s - Lambda(t) at `argmax` is
    /// below 1e-8.
    pub converged: bool,
    pub iterations: u32,
}

const GRAD_TOL: f64 = 1e-9;
const CONVERGED_TOL: f64 = 1e-8;
const ESCAPE: f64 = 3e4;

struct Objective {
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
}

struct Evaluated {
    phi: f64,
    grad: (f64, f64),
    hess: (f64, f64, f64), // Hessian of Lambda: (h11, h12, h22), positive definite
}

impl Objective {
    /// phi(t) = <t, s> - Lambda(t); also returns grad phi and Hess Lambda.
    fn eval(&self, t1: f64, t2: f64) -> Result<Evaluated> {
        let orders = [self.q, self.p, 2.0 * self.q, self.p + self.q, 2.0 * self.p];
        let ti = tilted_integrals(t1, t2, self.p, self.q, &orders)?;
        let (eq, ep, eqq, epq, epp) = (
            ti.means[0],
            ti.means[1],
            ti.means[2],
            ti.means[3],
            ti.means[4],
        );
        Ok(Evaluated {
            phi: t1 * self.s1 + t2 * self.s2 - ti.log_mass,
            grad: (self.s1 - eq, self.s2 - ep),
            hess: (eqq - eq * eq, epq - eq * ep, epp - ep * ep),
        })
    }

    fn phi_only(&self, t1: f64, t2: f64) -> f64 {
        match tilted_integrals(t1, t2, self.p, self.q, &[]) {
            Ok(ti) => t1 * self.s1 + t2 * self.s2 - ti.log_mass,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Legendre-Fenchel transform at (s1, s2) for exponents q < p.
pub fn legendre_fenchel(s1: f64, s2: f64, p: f64, q: f64) -> Result<ConjugatePoint> {
    legendre_fenchel_warm(s1, s2, p, q, None)
}

/// Same, with an optional warm-start point (used by grid sweeps).
pub fn legendre_fenchel_warm(
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
    warm: Option<(f64, f64)>,
) -> Result<ConjugatePoint> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::Domain("exponents must be positive".into()));
    }
    if !(q < p) {
        return Err(Error::Domain(format!(
            "the Legendre-Fenchel transform of Lambda needs q < p, got p = {p}, q = {q}"
        )));
    }
    if !(s1.is_finite() && s2.is_finite()) {
        return Err(Error::Domain("conjugate arguments must be finite".into()));
    }
    let obj = Objective { s1, s2, p, q };

    // The gradient range of Lambda is contained in (0, inf)^2; outside its
    // closure the sup diverges along an explicit ray.
    if s1 <= 0.0 || s2 <= 0.0 {
        return Ok(ConjugatePoint {
            value: ExtReal::PosInf,
            argmax: (0.0, 0.0),
            converged: false,
            iterations: 0,
        });
    }

    let boundary = 1.0 / p;
    let (mut t1, mut t2) = match warm {
        Some((w1, w2)) if w2 < boundary - 1e-10 => (w1, w2),
        _ => {
            let mut best = (0.0, 0.0);
            let mut best_phi = f64::NEG_INFINITY;
            let mut t2_grid: Vec<f64> = (0..13)
                .map(|i| -20.0 + i as f64 * (boundary - 1e-3 + 20.0) / 12.0)
                .collect();
            t2_grid.push(boundary - 1e-2);
            t2_grid.push(boundary - 1e-4);
            for i in 0..17 {
                let c1 = -20.0 + 2.5 * i as f64;
                for &c2 in &t2_grid {
                    let phi = obj.phi_only(c1, c2);
                    if phi > best_phi {
                        best_phi = phi;
                        best = (c1, c2);
                    }
                }
            }
            best
        }
    };

    let mut iterations = 0u32;
    for &kappa in &[1e-3f64, 1e-5, 1e-7, 0.0] {
        let stage_tol = if kappa > 0.0 {
            (kappa * 10.0).max(GRAD_TOL)
        } else {
            GRAD_TOL
        };
        for _ in 0..60 {
            iterations += 1;
            let ev = obj.eval(t1, t2)?;
            let gap = boundary - t2;
            let g = (ev.grad.0, ev.grad.1 - kappa / gap);
            let gnorm = (g.0 * g.0 + g.1 * g.1).sqrt();
            if gnorm < stage_tol {
                break;
            }

            // Newton direction: (HessLambda + barrier) delta = grad
            let (h11, h12, h22b) = (ev.hess.0, ev.hess.1, ev.hess.2 + kappa / (gap * gap));
            let det = h11 * h22b - h12 * h12;
            let (mut d1, mut d2) = if det > 1e-300 && h11 > 0.0 {
                (
                    (h22b * g.0 - h12 * g.1) / det,
                    (h11 * g.1 - h12 * g.0) / det,
                )
            } else {
                // fall back to a scaled gradient step
                (g.0 / (1.0 + h11.abs()), g.1 / (1.0 + h22b.abs()))
            };

            // keep t2 strictly inside the domain
            if d2 > 0.0 {
                let max_step = 0.95 * gap / d2;
                if max_step < 1.0 {
                    d1 *= max_step;
                    d2 *= max_step;
                }
            }

            let phi0 = ev.phi + kappa * gap.ln();
            let slope = g.0 * d1 + g.1 * d2;
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha > 1e-12 {
                let (n1, n2) = (t1 + alpha * d1, t2 + alpha * d2);
                if n2 < boundary {
                    let phi = obj.phi_only(n1, n2) + kappa * (boundary - n2).ln();
                    if phi.is_finite() && phi >= phi0 + 1e-4 * alpha * slope {
                        t1 = n1;
                        t2 = n2;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            if t1.abs() > ESCAPE || t2 < -ESCAPE {
                // the sup is running away: diverging conjugate
                return Ok(ConjugatePoint {
                    value: ExtReal::PosInf,
                    argmax: (t1, t2),
                    converged: false,
                    iterations,
                });
            }
        }
    }

    let ev = obj.eval(t1, t2)?;
    let gnorm = (ev.grad.0 * ev.grad.0 + ev.grad.1 * ev.grad.1).sqrt();
    Ok(ConjugatePoint {
        value: ExtReal::new(ev.phi),
        argmax: (t1, t2),
        converged: gnorm < CONVERGED_TOL,
        iterations,
    })
}
