//! Riemann and Hurwitz zeta values with certified truncation error.
//!
//! `Σ_{n≥a} n^{-s}` is evaluated by summing the first few terms directly and
//! replacing the rest by the Euler–Maclaurin expansion at a shift point `M`:
//!
//! ```text
//! Σ_{n≥M} n^{-s} = M^{1-s}/(s-1) + M^{-s}/2
//!                + Σ_{k=1}^{K} B_{2k}/(2k)! · s(s+1)…(s+2k-2) · M^{-s-2k+1} + R_K
//! ```
//!
//! For real `s > 1` all derivatives of `x^{-s}` keep a constant sign, so the
//! remainder is bounded by the first omitted term: `|R_K| ≤ |T_{K+1}|`. That
//! bound is reported as the truncation error. The leading integral term is the
//! classical integral tail `M^{1-s}/(s-1)`; the rest refines it.

use super::faulhaber::even_bernoulli_f64;
use super::SeriesValue;
use crate::error::{Error, Result};

const MIN_SHIFT: u64 = 12;

/// Euler–Maclaurin correction term `T_k` (k ≥ 1) at shift `m`.
pub(crate) fn em_term(s: f64, m: f64, k: usize) -> f64 {
    let b2k = even_bernoulli_f64()[k];
    // B_{2k}/(2k)! · (s)_{2k-1} · m^{-s-2k+1}, built incrementally to avoid overflow
    let mut coef = b2k;
    for i in 1..=(2 * k) {
        coef /= i as f64;
    }
    let mut rising = 1.0;
    for i in 0..(2 * k - 1) {
        rising *= (s + i as f64) / m;
    }
    coef * rising * m.powf(-s)
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥a} n^{-s}` for integer `a ≥ 1` and `s > 1`.
pub fn hurwitz_zeta(s: f64, a: u64) -> Result<SeriesValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Divergent(format!("zeta series requires s > 1, got s = {s}")));
    }
    if a == 0 {
        return Err(Error::Domain("Hurwitz zeta needs a starting index a >= 1".into()));
    }
    let shift = a.max(MIN_SHIFT);
    let mut direct = 0.0;
    // add small terms first
    for n in (a..shift).rev() {
        direct += (n as f64).powf(-s);
    }
    let m = shift as f64;
    let integral = m.powf(1.0 - s) / (s - 1.0);
    let half = 0.5 * m.powf(-s);
    let scale = integral + half + direct;
    let kmax = even_bernoulli_f64().len() - 1;
    let mut corr = 0.0;
    let mut err = f64::INFINITY;
    let mut terms = 0usize;
    for k in 1..kmax {
        let t = em_term(s, m, k);
        let next = em_term(s, m, k + 1);
        corr += t;
        terms = k;
        err = next.abs();
        if err <= 1e-17 * scale.abs().max(f64::MIN_POSITIVE) || next.abs() > t.abs() {
            break;
        }
    }
    let value = direct + integral + half + corr;
    Ok(SeriesValue {
        value,
        truncation_error: err,
        terms_used: (shift - a) + terms as u64 + 2,
        converged: err <= 1e-10_f64.max(1e-9 * value.abs()),
    })
}

/// Riemann zeta `ζ(s)` for real `s > 1 + 1e-6`.
pub fn zeta(s: f64) -> Result<SeriesValue> {
    if !(s > 1.0 + 1e-6) {
        return Err(Error::Divergent(format!(
            "zeta(s) diverges or is out of range for s = {s} (needs s > 1 + 1e-6)"
        )));
    }
    hurwitz_zeta(s, 1)
}
