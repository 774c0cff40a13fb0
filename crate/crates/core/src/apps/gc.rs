//! Deviation counts of the Kolmogorov–Smirnov statistic along a growing sample.

use rand::Rng;
use serde::Serialize;

use super::mdf::hoeffding_bound;
use super::{MdfEntry, MdfReport};
use crate::bounds::{BoundResult, FormulaId, TailRule};
use crate::error::{domain, Result};
use crate::mc::{empirical_tail, map_replications, moment_of_counts, Functional};

pub const DEFAULT_TESTED_N: [u64; 11] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000];

/// A continuous law with an exactly computable distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GcDistribution {
    Uniform,
    Exponential { rate: f64 },
}

impl GcDistribution {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform => x.clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random();
        match *self {
            Self::Uniform => u,
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcConfig {
    pub distribution: GcDistribution,
    pub eps: f64,
    /// Exponent parameter of the reported moment `E[e^{2η²O_ε}]`, `η < ε`.
    pub eta: f64,
    pub n_max: u64,
    pub reps: u64,
    pub seed: u64,
    /// Sample sizes at which `P(D_n ≥ ε)` is estimated.
    pub tested_n: Vec<u64>,
}

/// Empirical `P(D_n ≥ ε)` against `M·2e^{−2nε²}` with `M = ⌈1/ε⌉` cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcCheck {
    pub n: u64,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    pub cells: u64,
}

impl GcCheck {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound + 4.0 * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcReport {
    pub report: MdfReport,
    pub checks: Vec<GcCheck>,
    /// Empirical `P(O_ε ≥ k)` for `k = 0..=tail_len`.
    pub tail: Vec<f64>,
    pub counts: Vec<u64>,
}

/// `D_n = max_i max(i/n − u_(i), u_(i) − (i−1)/n)` for sorted `u = F(X)`.
pub(crate) fn ks_statistic(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let i = i as f64;
            ((i + 1.0) / n - u).max(u - i / n)
        })
        .fold(0.0, f64::max)
}

/// Indicators `1{D_n ≥ ε}` for `n = 1..=u.len()`.
///
/// `D_n` is evaluated exactly only where needed: adding `j` observations moves
/// the empirical distribution function by at most `j/(n+j)` everywhere, so
/// once `D_n` is computed every `n' ∈ (n, n+j]` with `j/(n+j) < ε − D_n`
/// (resp. `≤ D_n − ε`) is known to be below (resp. at or above) `ε`.
pub(crate) fn exceedances(u: &[f64], eps: f64) -> Vec<bool> {
    let total = u.len();
    let mut out = vec![false; total];
    let mut sorted: Vec<f64> = Vec::with_capacity(total);
    let mut n = 1usize;
    while n <= total {
        let fresh = sorted.len();
        sorted.extend_from_slice(&u[fresh..n]);
        sorted[fresh..].sort_unstable_by(f64::total_cmp);
        merge_tail(&mut sorted, fresh);
        let d = ks_statistic(&sorted);
        let hit = d >= eps;
        let gap = if hit { d - eps } else { eps - d };
        let nf = n as f64;
        let mut j = if gap >= 1.0 {
            total
        } else {
            (nf * gap / (1.0 - gap)).floor() as usize
        };
        let ok = |j: usize| {
            let step = j as f64 / (nf + j as f64);
            if hit {
                step <= gap
            } else {
                step < gap
            }
        };
        while j > 0 && !ok(j) {
            j -= 1;
        }
        let last = (n + j).min(total);
        for slot in &mut out[n - 1..last] {
            *slot = hit;
        }
        n = last + 1;
    }
    out
}

/// Merges the sorted run `v[split..]` into the sorted prefix `v[..split]`.
fn merge_tail(v: &mut Vec<f64>, split: usize) {
    if split == 0 || split == v.len() || v[split - 1] <= v[split] {
        return;
    }
    let right = v.split_off(split);
    let left = std::mem::take(v);
    let (mut i, mut j) = (0, 0);
    v.reserve(left.len() + right.len());
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            v.push(left[i]);
            i += 1;
        } else {
            v.push(right[j]);
            j += 1;
        }
    }
    v.extend_from_slice(&left[i..]);
    v.extend_from_slice(&right[j..]);
}

/// Explicit exponential-moment bound built from the cell-wise Hoeffding bound
/// `P(D_m ≥ ε) ≤ (4/ε)·e^{−2mε²}`:
/// `1 + Σ_{n≥0} e^{2η²n} Σ_{m≥max(n,1)} (4/ε)e^{−2mε²}`.
pub fn gc_chain_bound(eps: f64, eta: f64) -> Result<BoundResult> {
    if !(eps > 0.0 && eps <= 1.0) {
        return domain(format!("eps must lie in (0, 1], got {eps}"));
    }
    if !(eta >= 0.0 && eta < eps) {
        return domain(format!("needs 0 <= eta < eps = {eps}, got eta = {eta}"));
    }
    let b = (-2.0 * eps * eps).exp();
    let one_minus_b = -(-2.0 * eps * eps).exp_m1();
    let g = (2.0 * (eta * eta - eps * eps)).exp();
    let one_minus_g = -(2.0 * (eta * eta - eps * eps)).exp_m1();
    let scale = 4.0 / eps / one_minus_b;
    let phi = scale * (b + g / one_minus_g);
    Ok(BoundResult::new(
        FormulaId::MdfExponential,
        phi + 1.0,
        "bounds E[exp(2 eta^2 O)] for 0 <= eta < eps <= 1",
    )
    .input("eps", eps)
    .input("eta", eta)
    .with_tail_rule(TailRule::Exponential { rate: 2.0 * eta * eta })
    .aux("phi", phi))
}

const TAIL_POINTS: u64 = 10;

/// Simulates `O_ε = #{n ≤ n_max : D_n ≥ ε}` and `P(D_n ≥ ε)` at the tested
/// sizes, one i.i.d. stream per replication.
pub fn gc_simulate(cfg: &GcConfig) -> Result<GcReport> {
    let theory = gc_chain_bound(cfg.eps, cfg.eta)?;
    if cfg.reps == 0 || cfg.n_max == 0 {
        return domain("reps and n_max must be >= 1");
    }
    if let GcDistribution::Exponential { rate } = cfg.distribution {
        if !(rate > 0.0 && rate.is_finite()) {
            return domain(format!("exponential rate must be positive, got {rate}"));
        }
    }
    let tested: Vec<u64> = cfg
        .tested_n
        .iter()
        .copied()
        .filter(|&n| n >= 1 && n <= cfg.n_max)
        .collect();
    let dist = cfg.distribution;
    let runs = map_replications(cfg.reps, cfg.seed, |_, rng| {
        let u: Vec<f64> = (0..cfg.n_max).map(|_| dist.cdf(dist.sample(rng))).collect();
        let hits = exceedances(&u, cfg.eps);
        let count = hits.iter().filter(|&&h| h).count() as u64;
        let at: Vec<bool> = tested.iter().map(|&n| hits[n as usize - 1]).collect();
        (count, at)
    });
    let counts: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let cells = (1.0 / cfg.eps).ceil() as u64;
    let reps = cfg.reps as f64;
    let checks = tested
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let p = runs.iter().filter(|r| r.1[i]).count() as f64 / reps;
            Ok(GcCheck {
                n,
                empirical: p,
                stderr: (p * (1.0 - p) / reps).sqrt(),
                bound: cells as f64 * hoeffding_bound(n, cfg.eps)?,
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = 2.0 * cfg.eta * cfg.eta;
    let empirical = moment_of_counts(&counts, &Functional::Exp(rate))?;
    let tail = empirical_tail(&counts, TAIL_POINTS);
    let mut report = MdfReport::new("gc", cfg.reps, cfg.seed);
    report.push(MdfEntry {
        epsilon: cfg.eps,
        order: format!("exp({rate}*O)"),
        theoretical: Some(theory),
        empirical,
        tail: tail.clone(),
    });
    report.diagnostics.insert("eta".into(), cfg.eta);
    report.diagnostics.insert("n_max".into(), cfg.n_max as f64);
    report.diagnostics.insert("cells".into(), cells as f64);
    Ok(GcReport {
        report,
        checks,
        tail,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::stream_rng;

    fn brute(u: &[f64], eps: f64) -> Vec<bool> {
        (1..=u.len())
            .map(|n| {
                let mut s = u[..n].to_vec();
                s.sort_by(f64::total_cmp);
                ks_statistic(&s) >= eps
            })
            .collect()
    }

    #[test]
    fn single_point_statistic() {
        for u in [0.1, 0.5, 0.93] {
            assert_eq!(ks_statistic(&[u]), u.max(1.0 - u));
        }
    }

    #[test]
    fn skipping_matches_brute_force() {
        let mut rng = stream_rng(11, 0);
        for eps in [0.05, 0.1, 0.2, 0.35] {
            for _ in 0..20 {
                let u: Vec<f64> = (0..400).map(|_| rng.random()).collect();
                assert_eq!(exceedances(&u, eps), brute(&u, eps), "eps = {eps}");
            }
        }
    }

    #[test]
    fn chain_bound_closed_form() {
        let (eps, eta) = (0.2, 0.1);
        let b = gc_chain_bound(eps, eta).unwrap();
        let direct: f64 = 1.0
            + (0..20_000u64)
                .map(|n| {
                    let inner: f64 = (n.max(1)..n.max(1) + 20_000)
                        .map(|m| 4.0 / eps * (-2.0 * m as f64 * eps * eps).exp())
                        .sum();
                    (2.0 * eta * eta * n as f64).exp() * inner
                })
                .take_while(|t| *t > 1e-14)
                .sum::<f64>();
        assert!((b.value - direct).abs() < 1e-8 * direct, "{} vs {direct}", b.value);
        assert!(gc_chain_bound(0.2, 0.2).is_err());
    }

    #[test]
    fn large_epsilon_is_rarely_hit() {
        let cfg = GcConfig {
            distribution: GcDistribution::Uniform,
            eps: 0.9,
            eta: 0.5,
            n_max: 100,
            reps: 2_000,
            seed: 3,
            tested_n: vec![1, 50],
        };
        let r = gc_simulate(&cfg).unwrap();
        // D_1 = max(U, 1 − U) ≥ 0.9 with probability exactly 0.2; later sizes rarely reach it
        assert!((r.checks[0].empirical - 0.2).abs() < 4.0 * (0.16f64 / 2_000.0).sqrt());
        let beyond_first = r.counts.iter().filter(|&&c| c >= 2).count() as f64 / 2_000.0;
        assert!(beyond_first < 0.05);
        assert_eq!(r.checks[1].empirical, 0.0);
    }

    #[test]
    fn tested_sizes_respect_cell_bound() {
        let cfg = GcConfig {
            distribution: GcDistribution::Exponential { rate: 2.0 },
            eps: 0.2,
            eta: 0.1,
            n_max: 200,
            reps: 2_000,
            seed: 8,
            tested_n: vec![1, 2, 10, 50, 200],
        };
        let r = gc_simulate(&cfg).unwrap();
        assert_eq!(r.checks[0].empirical, 1.0);
        assert!(r.checks.iter().all(GcCheck::holds));
        assert!(r.report.violations().is_empty());
    }
}
