//! Small numerical helpers shared across modules.

/// Survival level that defines the right end of an evaluation grid.
pub const SF_TAIL: f64 = 1e-6;

/// Largest cumulative hazard for which `exp(-h)` is still representable.
pub const MAX_CUM_HAZARD: f64 = 745.0;

/// `exp(-h)` with the underflow policy applied: exactly zero past 745.
#[inline]
pub fn exp_neg(h: f64) -> f64 {
    if h > MAX_CUM_HAZARD {
        0.0
    } else {
        (-h).exp()
    }
}

/// `ln(1 - exp(x))` for `x <= 0`, accurate at both ends.
#[inline]
pub fn log1mexp(x: f64) -> f64 {
    if x >= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^t - 1)` for `t > 0` without overflow.
#[inline]
pub fn ln_expm1(t: f64) -> f64 {
    if t <= 0.0 {
        f64::NEG_INFINITY
    } else if t > 36.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

/// Correctly rounded sum of a slice (Shewchuk's partials).
///
/// The result depends only on the exact real sum of the inputs, so two
/// vectors with the same exact total produce bit-identical results.
pub fn exact_sum(values: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(8);
    for &v in values {
        let mut x = v;
        let mut kept = 0;
        for k in 0..partials.len() {
            let mut y = partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    // Round the expansion to nearest, with the half-way correction.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

/// Smallest `x > 0` with `log_sf(x) < ln(tail)`, by doubling then bisection.
///
/// `log_sf` must be non-increasing with `log_sf(0) = 0`.
pub fn tail_point(log_sf: impl Fn(f64) -> f64, tail: f64) -> f64 {
    let target = tail.ln();
    let below = |x: f64| log_sf(x) < target;
    let mut hi = 1.0_f64;
    let mut lo;
    if below(hi) {
        lo = 0.5;
        while below(lo) && lo > 1e-300 {
            hi = lo;
            lo *= 0.5;
        }
        if below(lo) {
            return lo;
        }
    } else {
        lo = hi;
        while !below(hi) {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::MAX;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}
