//! Moment bound for sums of centred variables and deviation counts of
//! running means.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{MdfEntry, MdfReport};
use crate::error::{domain, Error, Result};
use crate::mc::{empirical_tail, map_replications, moment_of_counts, Functional};

/// Partitions of `total` into parts `≥ 2`, each listed in nonincreasing order.
pub fn strict_partitions(total: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (2..=max_part.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, &mut Vec::new(), &mut out);
    out
}

/// `k^q·((2q)!/2^q)·Σ_π Π_m |E[X^{b_m}]|` over partitions `π` of `2q` into
/// parts `b_m ≥ 2`. `abs_moments[j − 2]` holds `E[X^j]` for `j = 2..=2q`.
///
/// Bounds `E[S_k^{2q}]` for i.i.d. centred summands when `k ≥ 2`. Absolute
/// values keep every partition's contribution on the safe side when odd
/// moments have mixed signs; for symmetric laws they change nothing.
pub fn slln_partition_bound(q: u32, abs_moments: &[f64], k: u64) -> Result<f64> {
    if q == 0 {
        return domain("q must be >= 1");
    }
    if k == 0 {
        return domain("k must be >= 1");
    }
    let needed = 2 * q as usize - 1;
    if abs_moments.len() < needed {
        return Err(Error::Input(format!(
            "need moments E[X^j] for j = 2..={}, got {} values",
            2 * q,
            abs_moments.len()
        )));
    }
    let sum: f64 = strict_partitions(2 * q)
        .iter()
        .map(|pi| pi.iter().map(|&b| abs_moments[b as usize - 2]).product::<f64>().abs())
        .sum();
    let fact: f64 = (1..=2 * q).map(f64::from).product();
    Ok((k as f64).powi(q as i32) * fact / 2f64.powi(q as i32) * sum)
}

/// Centred summands for running-mean simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SllnSampler {
    Rademacher,
    Gaussian { sd: f64 },
    Uniform { half_width: f64 },
    Zero,
}

impl SllnSampler {
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Gaussian { sd } => sd * rng.sample::<f64, _>(StandardNormal),
            Self::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Self::Zero => 0.0,
        }
    }

    /// `E[X^j]`.
    pub fn moment(&self, j: u32) -> f64 {
        if j % 2 == 1 {
            return 0.0;
        }
        match *self {
            Self::Rademacher => 1.0,
            Self::Gaussian { sd } => (1..j).step_by(2).map(f64::from).product::<f64>() * sd.powi(j as i32),
            Self::Uniform { half_width } => half_width.powi(j as i32) / f64::from(j + 1),
            Self::Zero => 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Rademacher => "rademacher".into(),
            Self::Gaussian { sd } => format!("gaussian:{sd}"),
            Self::Uniform { half_width } => format!("uniform:{half_width}"),
            Self::Zero => "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SllnConfig {
    pub sampler: SllnSampler,
    pub q: u32,
    pub p: f64,
    pub eps: f64,
    pub n_max: u64,
    pub reps: u64,
    pub seed: u64,
}

const TAIL_POINTS: u64 = 10;

/// Simulates `O_ε = #{n ≤ n_max : |S_n/n| ≥ ε}` and reports `E[O_ε^p]` and
/// the tail `P(O_ε ≥ k)`. The constant in the polynomial bound is not
/// explicit, so the theoretical column is left empty.
pub fn slln_mdf_report(cfg: &SllnConfig) -> Result<MdfReport> {
    if cfg.q < 2 {
        return domain(format!("needs a finite 2q-th moment with q >= 2, got q = {}", cfg.q));
    }
    if !(cfg.p > 0.0 && cfg.p < f64::from(cfg.q) - 1.0) {
        return domain(format!(
            "order p must lie in (0, q-1) = (0, {}), got {}",
            cfg.q - 1,
            cfg.p
        ));
    }
    if !(cfg.eps > 0.0) {
        return domain(format!("eps must be positive, got {}", cfg.eps));
    }
    if cfg.reps == 0 || cfg.n_max == 0 {
        return domain("reps and n_max must be >= 1");
    }
    let sampler = cfg.sampler;
    let counts = map_replications(cfg.reps, cfg.seed, |_, rng| {
        let mut s = 0.0;
        let mut count = 0;
        for n in 1..=cfg.n_max {
            s += sampler.sample(rng);
            if (s / n as f64).abs() >= cfg.eps {
                count += 1;
            }
        }
        count
    });
    let mut report = MdfReport::new("slln", cfg.reps, cfg.seed);
    let empirical = moment_of_counts(&counts, &Functional::Power(cfg.p))?;
    report.push(MdfEntry {
        epsilon: cfg.eps,
        order: format!("O^{}", cfg.p),
        theoretical: None,
        empirical,
        tail: empirical_tail(&counts, TAIL_POINTS),
    });
    report
        .diagnostics
        .insert("max_count".into(), counts.iter().copied().max().unwrap_or(0) as f64);
    report.diagnostics.insert("n_max".into(), cfg.n_max as f64);
    Ok(report)
}
