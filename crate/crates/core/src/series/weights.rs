//! Nonnegative weight sequences `a_n` and their partial sums `S(N)`.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::faulhaber::{faulhaber_sum, MAX_FAULHABER_POWER};
use crate::error::{domain, Error, Result};

/// A growth majorant `a_n ≤ scale · g(n)` for custom weights, used to certify tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// `a_n = 0` for `n > last`.
    Finite { last: u64 },
    /// `a_n ≤ scale · n^p`.
    Monomial { p: f64, scale: f64 },
    /// `a_n ≤ scale · e^{rate·n}`.
    Exponential { rate: f64, scale: f64 },
}

#[derive(Clone)]
pub struct CustomWeights {
    pub label: String,
    pub start: u64,
    pub eval: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    pub envelope: Envelope,
}

/// Weights `a_n`, each variant carrying its canonical start index.
#[derive(Clone)]
pub enum WeightSequence {
    /// `a_n = n^p`, indexed from 1.
    Monomial(f64),
    /// `a_n = e^{p·n}`, indexed from 0 (so `a_0 = 1`).
    Exponential(f64),
    Custom(CustomWeights),
}

impl WeightSequence {
    pub fn monomial(p: f64) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return domain(format!("monomial weights need p >= 0, got {p}"));
        }
        Ok(Self::Monomial(p))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return domain(format!("exponential weights need a positive rate, got {rate}"));
        }
        Ok(Self::Exponential(rate))
    }

    pub fn custom(
        label: impl Into<String>,
        start: u64,
        envelope: Envelope,
        eval: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom(CustomWeights {
            label: label.into(),
            start,
            eval: Arc::new(eval),
            envelope,
        })
    }

    /// Index of the first weight.
    pub fn start(&self) -> u64 {
        match self {
            Self::Monomial(_) => 1,
            Self::Exponential(_) => 0,
            Self::Custom(c) => c.start,
        }
    }

    /// `a_n`; zero below the start index.
    pub fn weight(&self, n: u64) -> f64 {
        if n < self.start() {
            return 0.0;
        }
        match self {
            Self::Monomial(p) => {
                if *p == 0.0 {
                    1.0
                } else {
                    (n as f64).powf(*p)
                }
            }
            Self::Exponential(r) => (r * n as f64).exp(),
            Self::Custom(c) => (c.eval)(n),
        }
    }

    /// Growth majorant used for tail certification.
    pub fn envelope(&self) -> Envelope {
        match self {
            Self::Monomial(p) => Envelope::Monomial { p: *p, scale: 1.0 },
            Self::Exponential(r) => Envelope::Exponential { rate: *r, scale: 1.0 },
            Self::Custom(c) => c.envelope,
        }
    }

    /// `S(N) = Σ_{n=start}^{N} a_n` (zero when `N < start`).
    ///
    /// Integer monomial powers go through the exact Faulhaber polynomial.
    pub fn partial_sum(&self, n_max: u64) -> Result<f64> {
        let start = self.start();
        if n_max < start {
            return Ok(0.0);
        }
        match self {
            Self::Monomial(p) if p.fract() == 0.0 && *p <= MAX_FAULHABER_POWER as f64 => {
                let exact = faulhaber_sum(*p as u32, n_max)?;
                exact
                    .to_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Overflow(format!("S({n_max}) overflows f64")))
            }
            Self::Exponential(r) => {
                // (e^{r(N+1)} - 1) / (e^r - 1)
                let v = (r * (n_max as f64 + 1.0)).exp_m1() / r.exp_m1();
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Overflow(format!("S({n_max}) overflows f64")))
                }
            }
            _ => {
                let mut acc = 0.0;
                for n in start..=n_max {
                    acc += self.weight(n);
                }
                Ok(acc)
            }
        }
    }

    /// Checks `a_n ≥ 0` on `start..=n_max`.
    pub fn validate(&self, n_max: u64) -> Result<()> {
        for n in self.start()..=n_max {
            let a = self.weight(n);
            if !(a >= 0.0) {
                return domain(format!("weight a_{n} = {a} is negative or not a number"));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Monomial(p) => format!("monomial:{p}"),
            Self::Exponential(r) => format!("exponential:{r}"),
            Self::Custom(c) => format!("custom:{}", c.label),
        }
    }
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
