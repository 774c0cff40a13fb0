//! Rate functions: the Cramér rate by a numeric Legendre transform and the
//! Sanov rate on finite alphabets by exponential tilting.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::optimize::golden_section;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Argmin {
    Point(f64),
    Distribution(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFunctionResult {
    pub rate: f64,
    pub argmin: Argmin,
    pub method: RateMethod,
}

const LAMBDA_CAP: f64 = 1e8;

/// `Λ*(x) = sup_λ (λx − Λ(λ))` and the maximizing `λ`.
///
/// `Λ` is convex with `Λ(0) = 0`, so `λ ↦ λx − Λ(λ)` is concave and the
/// supremum is found by doubling a bracket on each side of 0 and refining by
/// golden section. Non-finite values of `Λ` count as `+∞`. When the supremum
/// is only approached as `|λ| → ∞` the returned `λ` is the last bracket point.
pub fn legendre_transform(lambda: &dyn Fn(f64) -> f64, x: f64) -> Result<(f64, f64)> {
    let g = |l: f64| {
        let v = l * x - lambda(l);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut best = (0.0, 0.0);
    for side in [1.0, -1.0] {
        let mut h = 1.0;
        while h < LAMBDA_CAP && g(side * 2.0 * h) > g(side * h) {
            h *= 2.0;
        }
        let lo = if h > 1.0 { h / 2.0 } else { 0.0 };
        let m = golden_section(|l| -g(side * l), lo, 2.0 * h, 1e-13);
        if -m.value > best.0 {
            best = (-m.value, side * m.x);
        }
    }
    Ok(best)
}

fn check_log_mgf(lambda: &dyn Fn(f64) -> f64) -> Result<()> {
    let at0 = lambda(0.0);
    if !(at0.abs() <= 1e-12) {
        return domain(format!("a log moment generating function has L(0) = 0, got {at0}"));
    }
    for l in [-1.0, -0.5, 0.5, 1.0] {
        let v = lambda(l);
        if !v.is_finite() {
            return domain(format!("L({l}) = {v} is not finite; the rate needs L finite around 0"));
        }
    }
    Ok(())
}

/// `inf_{|x − mean| ≥ ε} Λ*(x) = min(Λ*(mean + ε), Λ*(mean − ε))` by convexity.
pub fn cramer_rate(lambda: &dyn Fn(f64) -> f64, mean: f64, eps: f64) -> Result<RateFunctionResult> {
    if !(eps >= 0.0) {
        return domain(format!("eps must be >= 0, got {eps}"));
    }
    check_log_mgf(lambda)?;
    if eps == 0.0 {
        return Ok(RateFunctionResult {
            rate: 0.0,
            argmin: Argmin::Point(mean),
            method: RateMethod::ClosedForm,
        });
    }
    let (up, _) = legendre_transform(lambda, mean + eps)?;
    let (down, _) = legendre_transform(lambda, mean - eps)?;
    let (rate, x) = if up <= down {
        (up, mean + eps)
    } else {
        (down, mean - eps)
    };
    Ok(RateFunctionResult {
        rate,
        argmin: Argmin::Point(x),
        method: RateMethod::Numeric,
    })
}

/// `D(ν‖μ) = Σ ν_i ln(ν_i/μ_i)` with `0 ln 0 = 0`.
pub fn kl_divergence(nu: &[f64], mu: &[f64]) -> f64 {
    nu.iter()
        .zip(mu)
        .map(|(&n, &m)| {
            if n == 0.0 {
                0.0
            } else if m == 0.0 {
                f64::INFINITY
            } else {
                n * (n / m).ln()
            }
        })
        .sum()
}

/// Relative entropy of Bernoulli(t) with respect to Bernoulli(p).
pub fn binary_kl(t: f64, p: f64) -> f64 {
    kl_divergence(&[t, 1.0 - t], &[p, 1.0 - p])
}

/// `inf {D(ν‖μ) : ν(a) ≥ t}` over distributions on the alphabet of `mu`.
///
/// The minimizer is the exponential tilt `ν_θ ∝ μ·e^{θ·1{a}}` with
/// `ν_θ(a) = t`: it keeps the ratios between the other letters and puts the
/// remaining mass `1 − t` on them in proportion to `μ`. The tilt equation is
/// solved in closed form, `e^θ = t(1 − μ_a)/(μ_a(1 − t))`.
pub fn sanov_rate(mu: &[f64], symbol: usize, t: f64) -> Result<RateFunctionResult> {
    if mu.len() < 2 {
        return domain("the alphabet needs at least two letters");
    }
    if let Some(m) = mu.iter().find(|&&m| !(m > 0.0)) {
        return domain(format!("mu must be strictly positive, found {m}"));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return domain(format!("mu must sum to 1, sums to {total}"));
    }
    let Some(&ma) = mu.get(symbol) else {
        return domain(format!(
            "symbol {symbol} is outside an alphabet of {} letters",
            mu.len()
        ));
    };
    if !(t <= 1.0) {
        return domain(format!("threshold t = {t} exceeds 1"));
    }
    if t <= ma {
        return Ok(RateFunctionResult {
            rate: 0.0,
            argmin: Argmin::Distribution(mu.to_vec()),
            method: RateMethod::ClosedForm,
        });
    }
    let scale = (1.0 - t) / (1.0 - ma);
    let nu: Vec<f64> = mu
        .iter()
        .enumerate()
        .map(|(i, &m)| if i == symbol { t } else { m * scale })
        .collect();
    Ok(RateFunctionResult {
        rate: binary_kl(t, ma),
        argmin: Argmin::Distribution(nu),
        method: RateMethod::ClosedForm,
    })
}
