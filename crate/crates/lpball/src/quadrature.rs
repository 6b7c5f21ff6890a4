//! Adaptive Gauss-Kronrod quadrature (15-point rule with bisection driven by
//! the per-interval error estimate).  Used for the log-moment-generating
//! integrals, external mixing densities, and assorted cross-checks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with the
// embedded 7-point Gauss weights.  Values from QUADPACK's qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if !j.is_multiple_of(2) {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    // the classical (200 err)^1.5 sharpening of the raw difference
    let err = if err != 0.0 {
        err * (200.0 * err / value.abs().max(1e-300)).sqrt().min(1.0)
    } else {
        err
    };
    (value, err.max(f64::EPSILON * value.abs()))
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Integrate `f` over the finite interval [a, b] to the requested absolute or
/// relative tolerance (whichever is weaker at the current estimate).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_INTERVALS: usize = 4096;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integrate requires finite endpoints".into()));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }

    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total_value = v;
    let mut total_error = e;
    let mut subdivisions = 1usize;

    while total_error > abs_tol.max(rel_tol * total_value.abs()) {
        if subdivisions >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "tolerance not reached after {MAX_INTERVALS} subdivisions \
                 (value {total_value:.6e}, error {total_error:.3e})"
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // the dominant interval is at floating-point resolution, so no
            // further bisection can reduce the error
            return Err(Error::Quadrature(format!(
                "interval [{:.6e}, {:.6e}] reached floating-point resolution with \
                 error {:.3e} still above tolerance",
                worst.a, worst.b, worst.error
            )));
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }

    if !total_value.is_finite() {
        return Err(Error::Quadrature(
            "integrand produced a non-finite value".into(),
        ));
    }
    Ok(QuadResult {
        value: total_value,
        abs_error: total_error,
        subdivisions,
    })
}

/// Integrate `f` over [0, infinity) via the substitution s = t/(1-t), which
/// maps the half-line onto [0, 1).
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    integrate(
        |t| {
            let one_minus = 1.0 - t;
            let s = t / one_minus;
            let jac = 1.0 / (one_minus * one_minus);
            let v = f(s) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0 - 1e-14,
        abs_tol,
        rel_tol,
    )
}
