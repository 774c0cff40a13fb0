//! The weighted tail series `Σ_n a_n C_n` with `C_n = Σ_{m≥n} P(E_m)`.
//!
//! Summation starts at the weight sequence's own start index. A series that
//! starts at 0 uses `C_0 = P(E_0) + C_1`, where `P(E_0)` is the model's zeroth
//! mass (see [`DecayModel::zeroth_mass`]).

use super::decay::DecayModel;
use super::weights::{Envelope, WeightSequence};
use super::zeta::hurwitz_zeta;
use super::{certified_sum, tail_tolerance, SeriesValue};
use crate::error::{divergent, Error, Result};

const MAX_TERMS: u64 = 2_000_000;
/// Cut-off for the direct part of the monomial/power-law series.
const POWER_LAW_SPLIT: u64 = 256;

/// Closed lower and upper envelopes of `Σ_{n≥1} n^p C_n` under a power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedEnvelope {
    /// `c·ζ(q-1-p)/(q-1)`.
    pub lower: f64,
    /// `c·(ζ(q-p) + ζ(q-1-p)/(q-1))`.
    pub upper: f64,
}

/// Closed-form envelopes from `m^{1-q}/(q-1) ≤ Σ_{n≥m} n^{-q} ≤ m^{-q} + m^{1-q}/(q-1)`.
pub fn monomial_power_law_envelope(p: f64, c: f64, q: f64) -> Result<ClosedEnvelope> {
    if !(p < q - 2.0) {
        return divergent(format!(
            "monomial weights of power p over a power law of exponent q need p < q - 2 (got p={p}, q={q})"
        ));
    }
    let a = hurwitz_zeta(q - 1.0 - p, 1)?;
    let b = hurwitz_zeta(q - p, 1)?;
    Ok(ClosedEnvelope {
        lower: c * a.value / (q - 1.0),
        upper: c * (b.upper() + a.upper() / (q - 1.0)),
    })
}

/// `Σ_{n ≥ start} a_n C_n` with a certified truncation error.
pub fn weighted_tail_series(weights: &WeightSequence, model: &DecayModel) -> Result<SeriesValue> {
    model.validate()?;
    match model {
        DecayModel::Explicit(p) => Ok(finite_series(weights, model, p.len() as u64)),
        DecayModel::Geometric { c, b } => geometric_series(weights, *c, *b),
        DecayModel::PowerLaw { c, q } => power_law_series(weights, *c, *q),
        DecayModel::CustomTail(_) => match weights.envelope() {
            Envelope::Finite { last } => Ok(finite_series(weights, model, last)),
            _ => Err(Error::Input(
                "a custom tail has no certified tail bound for infinitely many weights; \
                 use a power-law or geometric majorant"
                    .into(),
            )),
        },
    }
}

fn tail_at(model: &DecayModel, n: u64) -> f64 {
    if n == 0 {
        model.tail_sum_from_zero().map(|v| v.value).unwrap_or(f64::NAN)
    } else {
        model.tail_sum(n).map(|v| v.value).unwrap_or(f64::NAN)
    }
}

fn finite_series(weights: &WeightSequence, model: &DecayModel, last: u64) -> SeriesValue {
    let start = weights.start();
    let mut acc = 0.0;
    for n in start..=last {
        acc += weights.weight(n) * tail_at(model, n);
    }
    SeriesValue::exact(acc, (last + 1).saturating_sub(start))
}

fn geometric_series(weights: &WeightSequence, c: f64, b: f64) -> Result<SeriesValue> {
    // C_n = c b^n / (1-b) for every n ≥ 0, including the zeroth mass.
    let tail = |n: u64| c * b.powf(n as f64) / (1.0 - b);
    match weights {
        WeightSequence::Exponential(r) => {
            let ratio = r.exp() * b;
            if ratio >= 1.0 {
                return divergent(format!(
                    "exponential weights of rate p over geometric decay b need p < |ln b| (got p={r}, |ln b|={})",
                    -b.ln()
                ));
            }
            Ok(SeriesValue::exact(c / ((1.0 - b) * (1.0 - ratio)), 0))
        }
        _ => {
            let bound = match weights.envelope() {
                Envelope::Finite { last } => return Ok(finite_geometric(weights, last, &tail)),
                Envelope::Exponential { rate, .. } if rate.exp() * b >= 1.0 => {
                    return divergent(format!("weight envelope rate {rate} is not below |ln b| = {}", -b.ln()))
                }
                env => env,
            };
            let start = weights.start();
            certified_sum(
                start,
                |n| weights.weight(n) * tail(n),
                |n| geometric_envelope_tail(bound, c / (1.0 - b), b, n),
                MAX_TERMS,
            )
        }
    }
}

fn finite_geometric(weights: &WeightSequence, last: u64, tail: &impl Fn(u64) -> f64) -> SeriesValue {
    let start = weights.start();
    let acc = (start..=last).map(|n| weights.weight(n) * tail(n)).sum();
    SeriesValue::exact(acc, (last + 1).saturating_sub(start))
}

/// Bound on `Σ_{n>N} env(n) · k b^n`.
pub(crate) fn geometric_envelope_tail(env: Envelope, k: f64, b: f64, n_cut: u64) -> f64 {
    match env {
        Envelope::Finite { .. } => 0.0,
        Envelope::Exponential { rate, scale } => {
            let ratio = rate.exp() * b;
            scale * k * ratio.powf(n_cut as f64 + 1.0) / (1.0 - ratio)
        }
        Envelope::Monomial { p, scale } => {
            // terms n^p b^n have ratios ((n+1)/n)^p b, decreasing in n
            let n1 = n_cut as f64 + 1.0;
            let rho = ((n1 + 1.0) / n1).powf(p) * b;
            if rho >= 1.0 {
                return f64::INFINITY;
            }
            scale * k * n1.powf(p) * b.powf(n1) / (1.0 - rho)
        }
    }
}

fn power_law_series(weights: &WeightSequence, c: f64, q: f64) -> Result<SeriesValue> {
    if q <= 1.0 {
        return divergent(format!("power-law tails need q > 1 (got q={q})"));
    }
    match weights {
        WeightSequence::Monomial(p) => monomial_power_law(*p, c, q),
        WeightSequence::Exponential(r) => divergent(format!(
            "exponential weights (rate {r}) against a power law of exponent {q} diverge"
        )),
        WeightSequence::Custom(_) => match weights.envelope() {
            Envelope::Finite { last } => {
                let model = DecayModel::PowerLaw { c, q };
                Ok(finite_series(weights, &model, last))
            }
            Envelope::Exponential { rate, .. } => divergent(format!(
                "exponential weight envelope (rate {rate}) against a power law diverges"
            )),
            Envelope::Monomial { p, scale } => {
                if !(p < q - 2.0) {
                    return divergent(format!("weight envelope n^{p} over power law q={q} needs p < q - 2"));
                }
                let model = DecayModel::PowerLaw { c, q };
                certified_sum(
                    weights.start(),
                    |n| weights.weight(n) * tail_at(&model, n),
                    |n| {
                        let a = hurwitz_zeta(q - p, n + 1).map(|v| v.upper()).unwrap_or(f64::INFINITY);
                        let b = hurwitz_zeta(q - 1.0 - p, n + 1)
                            .map(|v| v.upper())
                            .unwrap_or(f64::INFINITY);
                        scale * c * (a + b / (q - 1.0))
                    },
                    MAX_TERMS,
                )
            }
        },
    }
}

/// `Σ_{n≥1} n^p · c·ζ(q, n)`.
///
/// The first `POWER_LAW_SPLIT` terms are summed directly. Beyond that the
/// Hurwitz tail is replaced by its expansion
/// `ζ(q,n) = n^{1-q}/(q-1) + n^{-q}/2 + q n^{-q-1}/12 + R`, with
/// `|R| ≤ q(q+1)(q+2) n^{-q-3}/720`, which turns the remaining double sum into
/// three Hurwitz zeta values plus a certified error.
fn monomial_power_law(p: f64, c: f64, q: f64) -> Result<SeriesValue> {
    if !(p < q - 2.0) {
        return divergent(format!(
            "monomial weights of power p over a power law of exponent q need p < q - 2 (got p={p}, q={q})"
        ));
    }
    let split = POWER_LAW_SPLIT;
    let c_next = hurwitz_zeta(q, split + 1)?;
    let mut tail = c_next.value;
    let mut direct = 0.0;
    let mut weight_sum = 0.0;
    for n in (1..=split).rev() {
        let x = n as f64;
        tail += x.powf(-q);
        let w = if p == 0.0 { 1.0 } else { x.powf(p) };
        direct += w * tail;
        weight_sum += w;
    }
    let z1 = hurwitz_zeta(q - 1.0 - p, split + 1)?;
    let z2 = hurwitz_zeta(q - p, split + 1)?;
    let z3 = hurwitz_zeta(q + 1.0 - p, split + 1)?;
    let zr = hurwitz_zeta(q + 3.0 - p, split + 1)?;
    let far = z1.value / (q - 1.0) + z2.value / 2.0 + q * z3.value / 12.0;
    let err = weight_sum * c_next.truncation_error
        + z1.truncation_error / (q - 1.0)
        + z2.truncation_error / 2.0
        + q * z3.truncation_error / 12.0
        + q * (q + 1.0) * (q + 2.0) / 720.0 * zr.upper();
    let value = c * (direct + far);
    let truncation_error = c * err;
    Ok(SeriesValue {
        value,
        truncation_error,
        terms_used: split + 4,
        converged: truncation_error <= tail_tolerance(value),
    })
}
