//! Exponential-moment and tail bounds for independent families.

use serde::Serialize;

use super::{BoundResult, FormulaId, TailRule};
use crate::error::{divergent, domain, Error, Result};
use crate::optimize::{bracketed_minimum, golden_section};
use crate::series::{DecayModel, TailFunction};

/// Upper end of the `ln δ` search interval.
const MAX_LOG_DELTA: f64 = 50.0;
const MIN_LOG_DELTA: f64 = 1e-8;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be a positive finite number, got {v}"))
    }
}

/// `E[O²] ≤ C₁(1 + C₁)`.
pub fn second_moment_bound(c1: f64) -> Result<f64> {
    check_positive("C1", c1)?;
    Ok(c1 * (1.0 + c1))
}

/// `E[e^{rO}] ≤ exp(C₁(e^r − 1))`, independent events with `Σ P(E_n) = C₁`.
pub fn freedman_exp_bound(r: f64, c1: f64) -> Result<BoundResult> {
    check_positive("r", r)?;
    check_positive("C1", c1)?;
    Ok(BoundResult::new(
        FormulaId::UniversalExponential,
        (c1 * r.exp_m1()).exp(),
        "independent events with sum of probabilities C1; any r > 0",
    )
    .input("r", r)
    .input("c1", c1)
    .with_tail_rule(TailRule::Exponential { rate: r }))
}

/// Markov-optimized universal tail bound on `P(O ≥ k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreedmanTail {
    /// `exp(−k ln k + k(ln C₁ + 1) − C₁)`, or 1 when `k ≤ C₁`.
    pub closed_form: f64,
    /// `inf_{r>0} exp(−kr + C₁(e^r − 1))` by golden-section search.
    pub numeric: f64,
    /// `ln(k/C₁)`, or 0 when the infimum sits at `r → 0`.
    pub minimizer: f64,
}

pub fn freedman_tail_bound(k: u64, c1: f64) -> Result<FreedmanTail> {
    if k == 0 {
        return domain("tail index k must be >= 1");
    }
    check_positive("C1", c1)?;
    let kf = k as f64;
    let exponent = |r: f64| -kf * r + c1 * r.exp_m1();
    if kf <= c1 {
        // exponent is increasing on r > 0
        return Ok(FreedmanTail {
            closed_form: 1.0,
            numeric: exponent(0.0).exp(),
            minimizer: 0.0,
        });
    }
    let r_star = (kf / c1).ln();
    let closed = (-kf * kf.ln() + kf * (c1.ln() + 1.0) - c1).exp();
    let m = golden_section(exponent, 0.0, 2.0 * r_star + 1.0, 1e-13);
    Ok(FreedmanTail {
        closed_form: closed,
        numeric: m.value.exp(),
        minimizer: r_star,
    })
}

/// `E[e^{rO}] ≤ (1 − C₁e^r)^{-1}` for independent events with `C₁ < 1`, `r < |ln C₁|`.
pub fn improved_exp_bound(r: f64, c1: f64) -> Result<BoundResult> {
    if !(c1 > 0.0 && c1 < 1.0) {
        return domain(format!(
            "the improved bound requires independent events with C1 < 1 (got C1 = {c1})"
        ));
    }
    if !r.is_finite() || c1 * r.exp() >= 1.0 {
        return domain(format!(
            "the improved bound requires r < |ln C1| = {} (got r = {r})",
            -c1.ln()
        ));
    }
    Ok(BoundResult::new(
        FormulaId::ImprovedExponential,
        1.0 / (1.0 - c1 * r.exp()),
        "independent events with C1 < 1 and r < |ln C1|",
    )
    .input("r", r)
    .input("c1", c1)
    .with_tail_rule(TailRule::Exponential { rate: r }))
}

/// `inf_{δ>1} δ/(δ−1) · exp(r · L⁻¹(e^{−r}/δ))` for independent events whose
/// tail `C_m` is majorized by `L` at the integers.
///
/// The search runs over `ln δ ∈ (0, 50]`: a coarse grid brackets the minimum
/// and golden-section search refines it. Any `δ` gives a valid bound, so a
/// missed global minimum only loosens the result.
pub fn rate_aware_exp_bound(r: f64, tail: &TailFunction) -> Result<BoundResult> {
    check_positive("r", r)?;
    let (lo, hi) = tail.domain();
    let log_objective = |x: f64| {
        let m = tail.inverse((-r - x).exp());
        if !m.is_finite() || m > hi || m < lo.min(0.0) {
            return f64::INFINITY;
        }
        // C_m < s once m > L⁻¹(s), and the bound's e^{r(m-1)} form needs m-1 ≥ 0
        // δ/(δ−1) = 1/(1 − e^{−x})
        -(-(-x).exp_m1()).ln() + r * m.max(0.0)
    };
    let best = bracketed_minimum(log_objective, MIN_LOG_DELTA, MAX_LOG_DELTA, 2000, 1e-13)
        .filter(|m| m.value.is_finite())
        .ok_or_else(|| Error::Divergent("the δ-infimum is unbounded on (1, e^50]".into()))?;
    if best.value > 700.0 {
        return divergent(format!("rate-aware bound overflows (log value {})", best.value));
    }
    let at_two = log_objective(2f64.ln()).exp();
    Ok(BoundResult::new(
        FormulaId::RateAwareExponential,
        best.value.exp(),
        "independent events; L nonincreasing, invertible with L(m) >= C_m at integers",
    )
    .input("r", r)
    .input("tail", tail.describe())
    .with_minimizer(best.x.exp())
    .with_tail_rule(TailRule::Exponential { rate: r })
    .aux("delta_two", at_two))
}

/// `N_r(δ) = inf{m ≥ 1 : C_m < e^{−r}/δ}`.
pub fn threshold_index(model: &DecayModel, r: f64, delta: f64) -> Result<u64> {
    check_positive("r", r)?;
    if !(delta > 1.0) {
        return domain(format!("δ must exceed 1, got {delta}"));
    }
    let target = (-r).exp() / delta;
    // C_m is nonincreasing: bracket then bisect over integers
    let below = |m: u64| model.tail_sum(m).map(|c| c.upper() < target);
    if below(1)? {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !below(hi)? {
        if hi > 1 << 50 {
            return divergent("tail sum never drops below e^{-r}/δ");
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `inf_{m ≥ 1, C_m e^r < 1} e^{rm} (1 − C_m e^r)^{-1}`, the integer-tail form.
pub fn integer_tail_exp_bound(r: f64, model: &DecayModel) -> Result<BoundResult> {
    check_positive("r", r)?;
    let er = r.exp();
    let mut best = (f64::INFINITY, 0u64);
    let mut m = 1u64;
    loop {
        let cm = model.tail_sum(m)?.upper();
        let lead = (r * m as f64).exp();
        if lead >= best.0 || !lead.is_finite() {
            break;
        }
        if cm * er < 1.0 {
            let v = lead / (1.0 - cm * er);
            if v < best.0 {
                best = (v, m);
            }
        }
        m += 1;
    }
    if !best.0.is_finite() {
        return divergent("no tail index m with C_m·e^r < 1 before e^{rm} overflows");
    }
    Ok(BoundResult::new(
        FormulaId::RateAwareExponential,
        best.0,
        "independent events; integer-tail form inf over m of e^(rm)/(1 - C_m e^r)",
    )
    .input("r", r)
    .input("decay", model.describe())
    .with_minimizer(best.1 as f64)
    .with_tail_rule(TailRule::Exponential { rate: r }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn freedman_values() {
        assert!((freedman_exp_bound(LN_2, 1.0).unwrap().value - E).abs() < 1e-14);
        assert!((freedman_exp_bound(1e-12, 3.0).unwrap().value - 1.0).abs() < 1e-10);
        let v = freedman_exp_bound(1.0, 0.5).unwrap().value;
        assert!((v - (0.5 * (E - 1.0)).exp()).abs() < 1e-14);
        assert!((v - 2.3611).abs() < 1e-4);
    }

    #[test]
    fn freedman_tail_values() {
        let t = freedman_tail_bound(1, 1.0).unwrap();
        assert_eq!(t.closed_form, 1.0);
        let t = freedman_tail_bound(2, 1.0).unwrap();
        assert!((t.closed_form - E / 4.0).abs() < 1e-15);
        let t = freedman_tail_bound(5, 0.5).unwrap();
        assert!(((t.numeric - t.closed_form) / t.closed_form).abs() < 1e-10);
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(second_moment_bound(1.0).unwrap(), 2.0);
        assert_eq!(second_moment_bound(0.5).unwrap(), 0.75);
    }

    #[test]
    fn improved_bound_examples() {
        assert!((improved_exp_bound(1e-12, 0.5).unwrap().value - 2.0).abs() < 1e-10);
        let v = improved_exp_bound(0.1, 0.5).unwrap().value;
        assert!((v - 1.0 / (1.0 - 0.5 * 0.1f64.exp())).abs() < 1e-15);
        assert!((v - 2.2351).abs() < 1e-4);
        assert!(improved_exp_bound(LN_2, 0.5).is_err());
        let err = improved_exp_bound(0.1, 1.5).unwrap_err();
        assert!(err.to_string().contains("C1 < 1"));
    }

    #[test]
    fn rate_aware_delta_two_matches_closed_forms() {
        let (r, c, p) = (1.0, 1.0, 2.0);
        let pow = rate_aware_exp_bound(r, &TailFunction::power(c, p).unwrap()).unwrap();
        let expect = 2.0 * ((2.0 * c).powf(1.0 / p) * r * (r / p).exp()).exp();
        assert!((pow.auxiliary["delta_two"] - expect).abs() < 1e-12 * expect);
        assert!(pow.value <= expect);
        let b = 0.5f64;
        let geo = rate_aware_exp_bound(r, &TailFunction::geometric(c, b).unwrap()).unwrap();
        let expect = 2.0 * ((r * r + r * (2.0 * c).ln()) / b.ln().abs()).exp();
        assert!((geo.auxiliary["delta_two"] - expect).abs() < 1e-12 * expect);
        assert!(geo.value <= expect);
    }

    #[test]
    fn rate_aware_infimum_against_grid() {
        // independent grid over δ ∈ (1, 100]
        let l = TailFunction::power(1.0, 2.0).unwrap();
        let f = |d: f64| d / (d - 1.0) * (l.inverse((-1.0f64).exp() / d)).exp();
        let grid = (1..=100_000)
            .map(|i| 1.0 + 99.0 * i as f64 / 100_000.0)
            .map(f)
            .fold(f64::INFINITY, f64::min);
        let v = rate_aware_exp_bound(1.0, &l).unwrap().value;
        assert!(v <= grid * (1.0 + 1e-9), "{v} vs {grid}");
        assert!(v >= grid * (1.0 - 1e-4));
    }

    #[test]
    fn threshold_index_geometric() {
        // C_m = 2^{1-m}; need 2^{1-m} < e^{-1}/2
        let g = DecayModel::geometric(1.0, 0.5).unwrap();
        let n = threshold_index(&g, 1.0, 2.0).unwrap();
        let target = (-1.0f64).exp() / 2.0;
        assert!(2f64.powi(1 - n as i32) < target);
        assert!(2f64.powi(2 - n as i32) >= target);
    }

    #[test]
    fn integer_form_is_valid_for_tiny_family() {
        let m = DecayModel::explicit(vec![0.1, 0.05]).unwrap();
        let b = integer_tail_exp_bound(0.5, &m).unwrap();
        let exact = (1.0 + 0.1 * 0.5f64.exp_m1()) * (1.0 + 0.05 * 0.5f64.exp_m1());
        assert!(b.value >= exact);
    }
}
