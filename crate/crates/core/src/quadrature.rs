//! Adaptive Simpson quadrature for piecewise-smooth integrands.
//!
//! CDF-based integrands jump at atoms. Each piece between consecutive
//! breakpoints is integrated separately with its endpoints nudged one ulp
//! inwards, so the rule only ever sees one-sided limits of a right-continuous
//! function.

const MAX_DEPTH: u32 = 48;

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates `f` over `[a, b]`, assuming `f` is smooth on the open interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let ia = a.next_up().min(b);
    let ib = b.next_down().max(a);
    let fa = f(ia);
    let fb = f(ib);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integrates over `[a, b]`, splitting at every breakpoint strictly inside it.
/// Tolerance is shared across pieces in proportion to their length.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut lo = a;
    let pieces = cuts.len() + 1;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        total += adaptive_simpson(f, lo, hi, tol / pieces as f64);
        lo = hi;
    }
    total
}

/// Integrates `f` over `[a, ∞)` through `s = a + x/(1-x)`.
///
/// Suitable for integrands with exponential decay; power-law tails should be
/// handled in closed form by the caller.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> f64 {
    let g = |x: f64| {
        if x >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - x;
        let s = a + x / one_minus;
        let v = f(s) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    adaptive_simpson(&g, 0.0, 1.0, tol)
}
