//! Markov-minimized tail bounds `P(O ≥ k)` for independent families with
//! power-law or geometric tails, both built on the `δ = 2` rate-aware bound.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::optimize::golden_section;
use crate::series::lambert_w0;

/// Tail bound `2·exp(inf_{r>0} (−kr + A r e^{r/p}))` with `A = (2c)^{1/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambertTail {
    /// Bound evaluated at the closed-form minimizer.
    pub value: f64,
    /// `r* = p(W(e·k/A) − 1)`.
    pub minimizer: f64,
    /// Same bound from golden-section search on the exponent.
    pub numeric: f64,
    pub numeric_minimizer: f64,
    /// Leading-order form `exp(−pk(ln k − ln ln k))` without its constant.
    pub asymptotic: f64,
}

/// Stationarity of `−kr + A r e^{r/p}` gives `(1 + r/p) e^{1 + r/p} = e·k/A`,
/// so `r* = p(W(e·k/A) − 1)` and the minimum is `−kp(u − 1)²/u` with
/// `u = W(e·k/A)`.
pub fn powerlaw_tail_asymptotic(k: u64, c: f64, p: f64) -> Result<LambertTail> {
    if k < 8 {
        return domain(format!("the power-law tail bound needs k >= 8 (k > e^2), got {k}"));
    }
    if !(c > 0.0 && p > 1.0) {
        return domain(format!(
            "the power-law tail bound needs c > 0 and p > 1, got c={c}, p={p}"
        ));
    }
    let kf = k as f64;
    let a = (2.0 * c).powf(1.0 / p);
    if kf <= a {
        return domain(format!(
            "k = {k} does not exceed (2c)^(1/p) = {a}; the minimizing r is not positive"
        ));
    }
    let u = lambert_w0(std::f64::consts::E * kf / a)?;
    let r_star = p * (u - 1.0);
    let exponent = |r: f64| -kf * r + a * r * (r / p).exp();
    let closed_min = -kf * p * (u - 1.0).powi(2) / u;
    let m = golden_section(exponent, 0.0, 2.0 * r_star + p + 1.0, 1e-14);
    Ok(LambertTail {
        value: 2.0 * closed_min.exp(),
        minimizer: r_star,
        numeric: 2.0 * m.value.exp(),
        numeric_minimizer: m.x,
        asymptotic: (-p * kf * (kf.ln() - kf.ln().ln())).exp(),
    })
}

/// Tail bound `2·inf_{r>0} exp((r² + r[ln(2c) − k|ln b|])/|ln b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticTail {
    /// `2·exp(−(|ln b|/4)(k − ln(2c)/|ln b|)²)`, or 2 when the vertex is at `r ≤ 0`.
    pub value: f64,
    /// `r* = (k|ln b| − ln 2c)/2`, clipped at 0.
    pub minimizer: f64,
    pub numeric: f64,
}

pub fn geometric_tail_bound(k: u64, c: f64, b: f64) -> Result<QuadraticTail> {
    if k == 0 {
        return domain("tail index k must be >= 1");
    }
    if !(c > 0.0 && b > 0.0 && b < 1.0) {
        return domain(format!(
            "geometric tail bound needs c > 0 and 0 < b < 1, got c={c}, b={b}"
        ));
    }
    let kf = k as f64;
    let lb = -b.ln();
    let l2c = (2.0 * c).ln();
    let exponent = |r: f64| (r * r + r * (l2c - kf * lb)) / lb;
    let vertex = (kf * lb - l2c) / 2.0;
    let (value, minimizer) = if vertex > 0.0 {
        (2.0 * (-(lb / 4.0) * (kf - l2c / lb).powi(2)).exp(), vertex)
    } else {
        (2.0, 0.0)
    };
    let m = golden_section(exponent, 0.0, 2.0 * vertex.max(0.0) + 1.0, 1e-14);
    Ok(QuadraticTail {
        value,
        minimizer,
        numeric: 2.0 * m.value.exp(),
    })
}
