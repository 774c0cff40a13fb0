//! Closed-form MDF bounds: first order, polynomial, exponential, large
//! deviations and the VC inequality.

use crate::bounds::{exp_moment_bound, poly_moment_bound, BoundResult, FormulaId, TailRule};
use crate::error::{domain, Error, Result};
use crate::series::{DecayModel, SeriesValue};

/// `E[O_ε] = φ(ε) = Σ_{n≥1} P(E_n)`, with tail `P(O_ε ≥ k) ≤ φ(ε)/k`.
pub fn mdf_first_order(model: &DecayModel) -> Result<BoundResult> {
    if !model.is_summable() {
        return Err(Error::Divergent(format!(
            "{model} is not summable, so the deviation count has no finite mean"
        )));
    }
    let c1 = model.tail_sum(1)?;
    Ok(BoundResult::new(
        FormulaId::MdfFirstOrder,
        c1.value,
        "equality E[O] = sum of P(E_n); needs the sum finite",
    )
    .input("decay", model.describe())
    .with_truncation_error(c1.truncation_error)
    .with_tail_rule(TailRule::Power { order: 1.0 }))
}

/// `E[O_ε^{p+1}] ≤ (p+1)·Σ_{n≥1} n^p C_n`.
pub fn mdf_polynomial(p: f64, model: &DecayModel) -> Result<BoundResult> {
    let mut b = poly_moment_bound(p, model)?;
    b.formula = FormulaId::MdfPolynomial;
    Ok(b)
}

/// `E[e^{pO_ε}] ≤ Σ_{n≥0} e^{pn} C_n + 1`.
pub fn mdf_exponential(p: f64, model: &DecayModel) -> Result<BoundResult> {
    let mut b = exp_moment_bound(p, model)?;
    b.formula = FormulaId::MdfExponential;
    Ok(b)
}

/// Two-sided Hoeffding bound `2·exp(−2nε²)` for a mean of `n` variables in `[0, 1]`.
pub fn hoeffding_bound(n: u64, eps: f64) -> Result<f64> {
    if n == 0 {
        return domain("Hoeffding bound needs n >= 1");
    }
    if !(eps >= 0.0) {
        return domain(format!("Hoeffding bound needs eps >= 0, got {eps}"));
    }
    Ok(2.0 * (-2.0 * n as f64 * eps * eps).exp())
}

/// `C·(1 − e^{−J})^{-1}·(1 − e^{−(J−p)})^{-1}` for a rate `J` and `0 ≤ p < J`.
///
/// This is the geometric-decay exponential bound with `b = e^{−J}` minus its
/// additive 1.
pub fn ldp_mdf_bound(rate: f64, p: f64, c: f64) -> Result<BoundResult> {
    if !(rate > 0.0) || !rate.is_finite() {
        return domain(format!("the rate must be positive and finite, got {rate}"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return domain(format!("the constant C must be positive, got {c}"));
    }
    if !(p >= 0.0 && p < rate) {
        return domain(format!("needs 0 < p < inf J = {rate}, got p = {p}"));
    }
    let value = c / ((-(-rate).exp_m1()) * (-(p - rate).exp_m1()));
    Ok(BoundResult::new(
        FormulaId::LdpMdf,
        value,
        "needs 0 < p < inf J and P(E_n) <= C·exp(-n·inf J)",
    )
    .input("rate", rate)
    .input("p", p)
    .input("c", c)
    .with_tail_rule(TailRule::Exponential { rate: p }))
}

/// `P(π^{(ℓ)} > ε) ≤ 4·m^S(2ℓ)·e^{−ε²ℓ/8}`, valid for `ℓ ≥ 2/ε²`.
pub fn vc_bound(ell: u64, eps: f64, growth: &dyn Fn(f64) -> f64) -> Result<f64> {
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let min_ell = 2.0 / (eps * eps);
    if (ell as f64) < min_ell {
        return domain(format!(
            "the VC inequality requires l >= 2/eps^2 = {min_ell}, got l = {ell}"
        ));
    }
    let m = growth(2.0 * ell as f64);
    if !(m >= 0.0) {
        return domain(format!("growth function m(2l) = {m} must be nonnegative"));
    }
    Ok(4.0 * m * (-eps * eps * ell as f64 / 8.0).exp())
}

/// Partial sum `Σ_{ℓ=N}^{H} e^{ε²ℓ/8}/(ℓ^{1+δ} m^S(2ℓ))` up to `horizon = H`.
///
/// The terms eventually grow without bound for polynomial growth functions,
/// so the infinite series never converges; the result always carries
/// `converged = false` and an infinite truncation error.
pub fn vc_lambda_series(
    n: u64,
    eps: f64,
    delta: f64,
    growth: &dyn Fn(f64) -> f64,
    horizon: u64,
) -> Result<SeriesValue> {
    if n == 0 {
        return domain("the series starts at l >= 1");
    }
    if !(delta > 0.0) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    if horizon < n {
        return domain(format!("horizon {horizon} is below the start index {n}"));
    }
    let mut acc = 0.0;
    for ell in n..=horizon {
        let l = ell as f64;
        let term = (eps * eps * l / 8.0 - (1.0 + delta) * l.ln()).exp() / growth(2.0 * l);
        if !term.is_finite() {
            return Err(Error::Overflow(format!("term l = {ell} overflows; lower the horizon")));
        }
        acc += term;
    }
    Ok(SeriesValue {
        value: acc,
        truncation_error: f64::INFINITY,
        terms_used: horizon - n + 1,
        converged: false,
    })
}
