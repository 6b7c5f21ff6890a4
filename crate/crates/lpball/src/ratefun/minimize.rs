//! Small derivative-free minimizers used by the contraction-principle
//! infima.  Objectives may return `f64::INFINITY` outside their effective
//! domain; the searches treat such points as arbitrarily bad.

/// Golden-section search on [a, b].  Returns (argmin, min).
pub(crate) fn golden_section<F: Fn(f64) -> f64>(
    f: &F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() < tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coarse scan followed by golden-section refinement around the best grid
/// point.  Robust for the unimodal-after-domain-restriction objectives here.
pub(crate) fn scan_then_golden<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    tol: f64,
) -> (f64, f64) {
    assert!(scan_points >= 3 && hi > lo);
    let step = (hi - lo) / (scan_points - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..scan_points {
        let v = f(lo + i as f64 * step);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (x, v) = golden_section(f, a, b, tol, 200);
    if v <= best_v {
        (x, v)
    } else {
        (lo + best_i as f64 * step, best_v)
    }
}

/// Alternating 1-D golden searches over a rectangle, with a few sweeps; the
/// multi-start driver sits at the call sites.
pub(crate) fn coordinate_descent_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    start: (f64, f64),
    bounds_x: (f64, f64),
    bounds_y: (f64, f64),
    obj_tol: f64,
    max_sweeps: usize,
) -> ((f64, f64), f64) {
    let (mut x, mut y) = start;
    let mut fv = f(x, y);
    for _ in 0..max_sweeps {
        let (nx, fx) = scan_then_golden(&|t| f(t, y), bounds_x.0, bounds_x.1, 33, 1e-11);
        if fx < fv {
            x = nx;
            fv = fx;
        }
        let (ny, fy) = scan_then_golden(&|t| f(x, t), bounds_y.0, bounds_y.1, 33, 1e-11);
        let improved = fv - fy;
        if fy < fv {
            y = ny;
            fv = fy;
        }
        if improved.abs() < obj_tol * (1.0 + fv.abs()) {
            break;
        }
    }
    ((x, y), fv)
}
