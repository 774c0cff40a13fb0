//! Monte Carlo estimates of moments of the overlap count.

use std::fmt;

use serde::Serialize;

use super::simulate::OverlapSample;
use crate::error::{Error, Result};
use crate::series::WeightSequence;

/// A function of the count whose mean is estimated.
#[derive(Debug, Clone)]
pub enum Functional {
    /// `O^p`, with `0^0 = 1`.
    Power(f64),
    /// `e^{rO}`.
    Exp(f64),
    /// `1{O ≥ k}`.
    Tail(u64),
    /// `S(O) = Σ_{n=start}^{O} a_n`.
    WeightSum(WeightSequence),
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(p) => write!(f, "O^{p}"),
            Self::Exp(r) => write!(f, "exp({r}*O)"),
            Self::Tail(k) => write!(f, "1{{O>={k}}}"),
            Self::WeightSum(w) => write!(f, "S(O) with {}", w.describe()),
        }
    }
}

/// Sample mean of a functional and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoment {
    pub estimate: f64,
    pub stderr: f64,
    pub reps: u64,
    pub functional: String,
}

/// Mean of `functional` over the sample, with standard error `s/√reps`
/// (`s` the unbiased sample deviation, 0 for a single replication).
pub fn empirical_moment(sample: &OverlapSample, functional: &Functional) -> Result<EmpiricalMoment> {
    moment_of_counts(&sample.counts, functional)
}

/// [`empirical_moment`] for a bare list of counts.
pub fn moment_of_counts(counts: &[u64], functional: &Functional) -> Result<EmpiricalMoment> {
    if counts.is_empty() {
        return Err(Error::Input("no replications to average".into()));
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let table: Vec<f64> = match functional {
        Functional::Power(p) => (0..=max).map(|k| (k as f64).powf(*p)).collect(),
        Functional::Exp(r) => {
            if *r == 0.0 {
                vec![1.0; max as usize + 1]
            } else {
                let t: Vec<f64> = (0..=max).map(|k| (r * k as f64).exp()).collect();
                if t.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Overflow(format!(
                        "e^(r·O) overflows for r = {r} and O = {max}; use a smaller r"
                    )));
                }
                t
            }
        }
        Functional::Tail(k) => (0..=max).map(|c| if c >= *k { 1.0 } else { 0.0 }).collect(),
        Functional::WeightSum(w) => {
            w.validate(max)?;
            let mut acc = 0.0;
            (0..=max)
                .map(|k| {
                    acc += w.weight(k);
                    acc
                })
                .collect()
        }
    };
    let values: Vec<f64> = counts.iter().map(|&c| table[c as usize]).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if !mean.is_finite() {
        return Err(Error::Overflow(format!("the mean of {functional} is not finite")));
    }
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EmpiricalMoment {
        estimate: mean,
        stderr,
        reps: counts.len() as u64,
        functional: functional.to_string(),
    })
}

/// Empirical `P(O ≥ k)` for `k = 0..=k_max`.
pub fn empirical_tail(counts: &[u64], k_max: u64) -> Vec<f64> {
    let n = counts.len().max(1) as f64;
    (0..=k_max)
        .map(|k| counts.iter().filter(|&&c| c >= k).count() as f64 / n)
        .collect()
}
