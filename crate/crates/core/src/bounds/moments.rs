//! Moment bounds for general and nested families.
//!
//! With `S(N) = Σ_{n=0}^{N} a_n` and `O` counting events `E_1, E_2, …`,
//! summation by parts gives `E[S(O)] = a_0 + Σ_{n≥1} a_n P(O ≥ n)`. For a nested
//! family `P(O ≥ n) = P(E_n)`; in general `P(O ≥ n) ≤ P(∪_{m≥n} E_m) ≤ C_n`.

use super::{BoundResult, FormulaId, TailRule};
use crate::error::{divergent, domain, Error, Result};
use crate::series::{
    certified_sum, geometric_envelope_tail, hurwitz_zeta, monomial_power_law_envelope, weighted_tail_series,
    DecayModel, Envelope, SeriesValue, WeightSequence,
};

const MAX_TERMS: u64 = 2_000_000;

fn zeroth_weight(weights: &WeightSequence) -> f64 {
    if weights.start() == 0 {
        weights.weight(0)
    } else {
        0.0
    }
}

/// First index `n ≥ from` at which the unclamped probability is at most 1.
fn first_unclamped(model: &DecayModel, from: u64) -> u64 {
    let mut n = from;
    while model.raw(n) > 1.0 {
        n += 1;
    }
    n
}

/// `Σ_{n≥1} a_n · min(1, P(E_n))` over the weights' index range.
pub fn clamped_weighted_sum(weights: &WeightSequence, model: &DecayModel) -> Result<SeriesValue> {
    model.validate()?;
    let from = weights.start().max(1);
    let finite = |last: u64| {
        let acc: f64 = (from..=last)
            .map(|n| weights.weight(n) * model.probability(n).unwrap_or(0.0))
            .sum();
        SeriesValue::exact(acc, (last + 1).saturating_sub(from))
    };
    match model {
        DecayModel::Explicit(p) => Ok(finite(p.len() as u64)),
        DecayModel::Geometric { c, b } => {
            let n0 = first_unclamped(model, from);
            let head: f64 = (from..n0).map(|n| weights.weight(n)).sum();
            let tail = match weights {
                WeightSequence::Exponential(r) => {
                    let ratio = r.exp() * b;
                    if ratio >= 1.0 {
                        return divergent(format!(
                            "exponential weights of rate {r} need rate < |ln b| = {}",
                            -b.ln()
                        ));
                    }
                    SeriesValue::exact(c * ratio.powf(n0 as f64) / (1.0 - ratio), 0)
                }
                _ => {
                    let env = weights.envelope();
                    if let Envelope::Finite { last } = env {
                        return Ok(finite(last));
                    }
                    if let Envelope::Exponential { rate, .. } = env {
                        if rate.exp() * b >= 1.0 {
                            return divergent(format!("weight envelope rate {rate} is not below |ln b|"));
                        }
                    }
                    certified_sum(
                        n0,
                        |n| weights.weight(n) * c * b.powf(n as f64),
                        |n| geometric_envelope_tail(env, *c, *b, n),
                        MAX_TERMS,
                    )?
                }
            };
            Ok(SeriesValue {
                value: head + tail.value,
                terms_used: tail.terms_used + (n0 - from),
                ..tail
            })
        }
        DecayModel::PowerLaw { c, q } => {
            let p = match weights.envelope() {
                Envelope::Finite { last } => return Ok(finite(last)),
                Envelope::Exponential { rate, .. } => {
                    return divergent(format!(
                        "exponential weights (rate {rate}) against a power law of exponent {q} diverge"
                    ))
                }
                Envelope::Monomial { p, .. } => p,
            };
            if !(p < q - 1.0) {
                return divergent(format!("weights n^{p} against P(E_n) ~ n^-{q} need p < q - 1"));
            }
            let n0 = first_unclamped(model, from);
            let head: f64 = (from..n0).map(|n| weights.weight(n)).sum();
            match weights {
                WeightSequence::Monomial(_) => {
                    // beyond n0 the clamp is inactive: Σ_{n≥n0} c n^{p-q} = c ζ(q-p, n0)
                    let z = hurwitz_zeta(q - p, n0)?.scaled(*c);
                    Ok(SeriesValue {
                        value: head + z.value,
                        terms_used: z.terms_used + (n0 - from),
                        ..z
                    })
                }
                _ => {
                    let scale = match weights.envelope() {
                        Envelope::Monomial { scale, .. } => scale,
                        _ => 1.0,
                    };
                    let tail = certified_sum(
                        n0,
                        |n| weights.weight(n) * model.raw(n),
                        |n| {
                            hurwitz_zeta(q - p, n + 1)
                                .map(|z| scale * c * z.upper())
                                .unwrap_or(f64::INFINITY)
                        },
                        MAX_TERMS,
                    )?;
                    Ok(SeriesValue {
                        value: head + tail.value,
                        ..tail
                    })
                }
            }
        }
        DecayModel::CustomTail(_) => match weights.envelope() {
            Envelope::Finite { last } => Ok(finite(last)),
            _ => Err(Error::Input(
                "custom tails support only finitely supported weights here".into(),
            )),
        },
    }
}

/// `E[S(O)] = a_0 + Σ_{n≥1} a_n P(E_n)` for a nested family (an equality).
pub fn nested_moment_identity(weights: &WeightSequence, model: &DecayModel) -> Result<BoundResult> {
    if let DecayModel::Explicit(p) = model {
        if let Some(w) = p.windows(2).position(|w| w[1] > w[0]) {
            return domain(format!(
                "a nested family needs nonincreasing probabilities, but P(E_{}) < P(E_{})",
                w + 1,
                w + 2
            ));
        }
    }
    let a0 = zeroth_weight(weights);
    let s = clamped_weighted_sum(weights, model)?;
    Ok(BoundResult::new(
        FormulaId::NestedIdentity,
        a0 + s.value,
        "nested family E_n ⊃ E_(n+1); exact value of E[S(O)] whenever the series is finite",
    )
    .input("weights", weights.describe())
    .input("decay", model.describe())
    .with_truncation_error(s.truncation_error))
}

/// `E[S(O)] ≤ a_0 + Σ_{n≥1} a_n C_n`, for any dependence between the events.
pub fn general_moment_bound(weights: &WeightSequence, model: &DecayModel) -> Result<BoundResult> {
    let series = weighted_tail_series(weights, model)?;
    let a0 = zeroth_weight(weights);
    // the series carries a_0·C_0; the count's zeroth weight is paid in full
    let c0 = if a0 > 0.0 {
        model.tail_sum_from_zero()?.value
    } else {
        0.0
    };
    let value = a0 + series.value - a0 * c0;
    let mut result = BoundResult::new(
        FormulaId::GeneralMoment,
        value,
        "arbitrary family; upper bound on E[S(O)] whenever the double series is finite",
    )
    .input("weights", weights.describe())
    .input("decay", model.describe())
    .with_truncation_error(series.truncation_error);
    if let (WeightSequence::Monomial(p), DecayModel::PowerLaw { c, q }) = (weights, model) {
        let env = monomial_power_law_envelope(*p, *c, *q)?;
        result = result.aux("closed_lower", env.lower).aux("closed_upper", env.upper);
    }
    Ok(result)
}

/// `E[O^{p+1}] ≤ (p+1)·K₁(p)` with `K₁(p) = Σ_{n≥1} n^p C_n`.
pub fn poly_moment_bound(p: f64, model: &DecayModel) -> Result<BoundResult> {
    let weights = WeightSequence::monomial(p)?;
    let k1 = weighted_tail_series(&weights, model)?;
    let mut result = BoundResult::new(
        FormulaId::PolynomialMoment,
        (p + 1.0) * k1.value,
        format!("bounds E[O^{}] for any dependence; needs K1(p) finite", p + 1.0),
    )
    .input("p", p)
    .input("decay", model.describe())
    .with_truncation_error((p + 1.0) * k1.truncation_error)
    .with_tail_rule(TailRule::Power { order: p + 1.0 })
    .aux("k1", k1.value);
    if let DecayModel::PowerLaw { c, q } = model {
        let env = monomial_power_law_envelope(p, *c, *q)?;
        let reference = c * hurwitz_zeta(q - 1.0 - p, 1)?.value;
        result = result
            .aux("closed_form_certified", (p + 1.0) * env.upper)
            .aux("closed_form_reference", reference);
    }
    Ok(result)
}

/// `E[e^{pO}] ≤ K₂(p) + 1` with `K₂(p) = Σ_{n≥0} e^{pn} C_n`.
pub fn exp_moment_bound(p: f64, model: &DecayModel) -> Result<BoundResult> {
    let weights = WeightSequence::exponential(p)?;
    let k2 = weighted_tail_series(&weights, model)?;
    let mut result = BoundResult::new(
        FormulaId::ExponentialMoment,
        k2.value + 1.0,
        "bounds E[exp(p·O)] for any dependence; needs K2(p) finite (p < |ln b| for geometric decay)",
    )
    .input("p", p)
    .input("decay", model.describe())
    .with_truncation_error(k2.truncation_error)
    .with_tail_rule(TailRule::Exponential { rate: p })
    .aux("k2", k2.value);
    if let DecayModel::Geometric { c, b } = model {
        result = result.aux("closed_form", c / ((1.0 - b) * (1.0 - p.exp() * b)) + 1.0);
    }
    Ok(result)
}
