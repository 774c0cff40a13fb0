//! Principal branch of the Lambert W function on the real line.

use crate::error::{Error, Result};
use std::f64::consts::E;

const MAX_HALLEY_ITERS: usize = 100;
const REL_TOL: f64 = 1e-12;

/// `W_0(x)`: the solution `w ≥ -1` of `w·e^w = x`, for `x ≥ -1/e`.
///
/// Halley iteration from `ln(1+x)` (or the branch-point series near `-1/e`),
/// with bisection as a fallback when Halley fails to settle.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(Error::Domain(format!("Lambert W0 requires x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x - branch < 1e-300 {
        return Ok(-1.0);
    }
    let mut w = if x >= 0.0 {
        x.ln_1p()
    } else {
        // series about the branch point in p = sqrt(2(ex+1))
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    };
    for _ in 0..MAX_HALLEY_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= REL_TOL * (1.0 + w.abs()) * 1e-3 {
            return Ok(w);
        }
    }
    if residual_ok(w, x) {
        return Ok(w);
    }
    bisection_w0(x)
}

fn residual_ok(w: f64, x: f64) -> bool {
    w.is_finite() && w >= -1.0 && (w * w.exp() - x).abs() <= REL_TOL * x.abs().max(1e-300)
}

fn bisection_w0(x: f64) -> Result<f64> {
    // w e^w is increasing on [-1, ∞)
    let mut lo = -1.0;
    let mut hi = if x > 1.0 { x.ln().max(1.0) } else { 1.0 };
    while hi * hi.exp() < x {
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
