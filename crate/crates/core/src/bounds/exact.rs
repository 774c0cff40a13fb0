//! Exact law of the overlap count for a finite independent family.

use serde::Serialize;

use crate::error::{domain, Result};

/// Largest family handled by the dynamic program.
pub const MAX_EXACT_EVENTS: usize = 10_000;

/// `P(O_N = k)` for independent events together with the elementary
/// symmetric sums `Q_n = Σ_{|J|=n} Π_{j∈J} p_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactOverlapDistribution {
    pub probabilities: Vec<f64>,
    pub event_probs: Vec<f64>,
    pub elementary_symmetric: Vec<f64>,
}

/// Poisson-binomial law by convolving one Bernoulli at a time, and the
/// coefficients of `Π (1 + p_j x)`.
pub fn sn_exact_distribution(event_probs: &[f64]) -> Result<ExactOverlapDistribution> {
    if event_probs.len() > MAX_EXACT_EVENTS {
        return domain(format!(
            "exact distribution supports at most {MAX_EXACT_EVENTS} events, got {}",
            event_probs.len()
        ));
    }
    if let Some((i, p)) = event_probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return domain(format!("event probability p_{} = {p} is outside [0, 1]", i + 1));
    }
    let n = event_probs.len();
    let mut dist = vec![0.0; n + 1];
    let mut esym = vec![0.0; n + 1];
    dist[0] = 1.0;
    esym[0] = 1.0;
    for (j, &p) in event_probs.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
            esym[k] += esym[k - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    Ok(ExactOverlapDistribution {
        probabilities: dist,
        event_probs: event_probs.to_vec(),
        elementary_symmetric: esym,
    })
}

impl ExactOverlapDistribution {
    pub fn len(&self) -> usize {
        self.event_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.event_probs.is_empty()
    }

    pub fn c1(&self) -> f64 {
        self.event_probs.iter().sum()
    }

    /// `Σ_k f(k) P(O_N = k)`.
    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probabilities.iter().enumerate().map(|(k, p)| f(k) * p).sum()
    }

    pub fn exp_moment(&self, r: f64) -> f64 {
        self.expectation(|k| (r * k as f64).exp())
    }

    /// `Σ_n Q_n Δ^n a_0`, with `Δ^n a_0 = Σ_j (−1)^{n−j} C(n,j) a_j`.
    ///
    /// This equals `Σ_k a_k P(O_N = k)` (the Schuette–Nesbitt identity). The
    /// forward differences cancel heavily, so use it for small families only.
    pub fn schuette_nesbitt(&self, a: &[f64]) -> f64 {
        let n = self.len();
        assert!(a.len() > n, "need weights a_0..=a_N");
        let mut diff: Vec<f64> = a[..=n].to_vec();
        let mut acc = 0.0;
        for q in &self.elementary_symmetric {
            acc += q * diff[0];
            for j in 0..diff.len().saturating_sub(1) {
                diff[j] = diff[j + 1] - diff[j];
            }
            diff.pop();
        }
        acc
    }

    /// Schuette–Nesbitt for `a_k = e^{rk}`, where `Δ^n a_0 = (e^r − 1)^n`.
    pub fn schuette_nesbitt_exp(&self, r: f64) -> f64 {
        let d = r.exp_m1();
        self.elementary_symmetric
            .iter()
            .enumerate()
            .map(|(n, q)| q * d.powi(n as i32))
            .sum()
    }

    /// Checks `Q_n ≤ C₁^n` for every `n`.
    pub fn symmetric_sums_dominated(&self) -> bool {
        let c1 = self.c1();
        self.elementary_symmetric
            .iter()
            .enumerate()
            .all(|(n, q)| *q <= c1.powi(n as i32) * (1.0 + 1e-12) + 1e-300)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_fair_coins() {
        let d = sn_exact_distribution(&[0.5, 0.5]).unwrap();
        assert_eq!(d.probabilities, vec![0.25, 0.5, 0.25]);
        assert_eq!(d.elementary_symmetric, vec![1.0, 1.0, 0.25]);
    }

    #[test]
    fn sure_event() {
        let d = sn_exact_distribution(&[1.0]).unwrap();
        assert_eq!(d.probabilities, vec![0.0, 1.0]);
    }

    #[test]
    fn exp_moment_two_quarters() {
        let d = sn_exact_distribution(&[0.25, 0.25]).unwrap();
        let expect = (1.0 + 0.25 * 0.1f64.exp_m1()).powi(2);
        assert!((d.exp_moment(0.1) - expect).abs() < 1e-15);
        assert!((expect - 1.0533).abs() < 1e-4);
        assert!((d.schuette_nesbitt_exp(0.1) - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(sn_exact_distribution(&[0.5, 1.5]).is_err());
        assert!(sn_exact_distribution(&[f64::NAN]).is_err());
    }

    #[test]
    fn literal_difference_form_is_not_an_identity() {
        // Σ_n Q_n (a_n − a_0) vs E[a_O] for a_k = k and two fair coins:
        // E[O] = 1 while Q_1·1 + Q_2·2 = 1.5
        let d = sn_exact_distribution(&[0.5, 0.5]).unwrap();
        let a = [0.0, 1.0, 2.0];
        let literal: f64 = d
            .elementary_symmetric
            .iter()
            .zip(a)
            .map(|(q, ak)| q * (ak - a[0]))
            .sum();
        let truth = d.expectation(|k| a[k]);
        assert!((truth - 1.0).abs() < 1e-15);
        assert!((literal - 1.5).abs() < 1e-15);
        assert!((d.schuette_nesbitt(&a) - truth).abs() < 1e-15);
    }
}
