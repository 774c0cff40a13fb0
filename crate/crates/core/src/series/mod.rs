//! Decay models, weight sequences and certified series primitives.

mod decay;
mod faulhaber;
mod lambert;
mod weighted;
mod weights;
mod zeta;

pub use decay::{DecayModel, TailFunction};
pub use faulhaber::{bernoulli_numbers, faulhaber_coefficients, faulhaber_sum, MAX_FAULHABER_POWER};
pub use lambert::lambert_w0;
pub(crate) use weighted::geometric_envelope_tail;
pub use weighted::{monomial_power_law_envelope, weighted_tail_series, ClosedEnvelope};
pub use weights::{Envelope, WeightSequence};
pub use zeta::{hurwitz_zeta, zeta};

use serde::Serialize;

use crate::error::{Error, Result};

/// A series value together with a certified bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_error: f64,
    pub terms_used: u64,
    pub converged: bool,
}

impl SeriesValue {
    pub fn exact(value: f64, terms_used: u64) -> Self {
        Self {
            value,
            truncation_error: 0.0,
            terms_used,
            converged: true,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            truncation_error: self.truncation_error * factor.abs(),
            ..self
        }
    }

    /// Certified upper end `value + truncation_error`.
    pub fn upper(&self) -> f64 {
        self.value + self.truncation_error
    }
}

/// Stopping threshold shared by every infinite sum: `max(1e-12, 1e-9·|partial|)`.
pub fn tail_tolerance(partial: f64) -> f64 {
    1e-12_f64.max(1e-9 * partial.abs())
}

/// Sums `Σ_{n≥start} term(n)` for nonnegative terms, growing the cut-off until
/// `tail_bound(N)`, a certified bound on `Σ_{n>N} term(n)`, meets the shared
/// tolerance. Gives up at `max_terms` and reports `converged = false`.
pub fn certified_sum(
    start: u64,
    term: impl Fn(u64) -> f64,
    tail_bound: impl Fn(u64) -> f64,
    max_terms: u64,
) -> Result<SeriesValue> {
    let mut partial = 0.0;
    let mut n = start;
    let mut next_check = start + 16;
    loop {
        let t = term(n);
        if !t.is_finite() {
            return Err(Error::Numeric(format!("series term {n} evaluated to {t}")));
        }
        partial += t;
        if n >= next_check || n - start + 1 >= max_terms {
            let tail = tail_bound(n);
            if tail.is_nan() {
                return Err(Error::Numeric(format!("tail bound after {n} is NaN")));
            }
            let used = n - start + 1;
            if tail <= tail_tolerance(partial) || used >= max_terms {
                return Ok(SeriesValue {
                    value: partial,
                    truncation_error: tail,
                    terms_used: used,
                    converged: tail <= tail_tolerance(partial),
                });
            }
            next_check = n + (n - start + 1).max(16);
        }
        n += 1;
    }
}
