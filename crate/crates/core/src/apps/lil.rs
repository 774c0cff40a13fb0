//! Exceedances of the iterated-logarithm envelope on a geometric time grid.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{MdfEntry, MdfReport};
use crate::error::{domain, Result};
use crate::mc::{empirical_tail, map_replications, moment_of_counts, Functional};

/// Maximum of a Brownian bridge from `a` to `b` over a time span `dt`, by
/// inverting `P(max ≥ m) = exp(−2(m−a)(m−b)/dt)`, `m ≥ max(a, b)`, at the
/// uniform `u ∈ [0, 1)`.
pub fn bridge_max(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let log_v = (-u).ln_1p();
    0.5 * (a + b + ((b - a) * (b - a) - 2.0 * dt * log_v).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilConfig {
    pub alpha: f64,
    pub n_max: u64,
    pub reps: u64,
    pub seed: u64,
}

/// First grid index with `α^n > e`, where `ln ln α^n > 0`.
pub(crate) fn first_index(alpha: f64) -> u64 {
    let mut n = (1.0 / alpha.ln()).floor().max(1.0) as u64;
    while alpha.powf(n as f64) <= std::f64::consts::E {
        n += 1;
    }
    n
}

/// Envelope level `√α·√(2α^n ln ln α^n)` on `(α^n, α^{n+1}]`.
pub(crate) fn level(alpha: f64, n: u64) -> f64 {
    let t = alpha.powf(n as f64);
    alpha.sqrt() * (2.0 * t * t.ln().ln()).sqrt()
}

const TAIL_POINTS: u64 = 10;

/// Counts `O_α = #{n : sup_{(α^n, α^{n+1}]} W > √α·√(2α^n ln ln α^n)}` for
/// `n` from the first index with `α^n > e` up to `n_max`.
///
/// `W` is sampled only on the grid; each interval supremum is drawn exactly
/// from its Brownian-bridge law given the endpoints.
pub fn lil_simulate(cfg: &LilConfig) -> Result<MdfReport> {
    let alpha = cfg.alpha;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return domain(format!("alpha must be > 1, got {alpha}"));
    }
    if cfg.reps == 0 {
        return domain("reps must be >= 1");
    }
    let n0 = first_index(alpha);
    if n0 > cfg.n_max {
        return domain(format!(
            "n_max = {} is below the first admissible index {n0}",
            cfg.n_max
        ));
    }
    if !alpha.powf(cfg.n_max as f64 + 1.0).is_finite() {
        return domain(format!(
            "alpha^(n_max+1) overflows for alpha = {alpha}, n_max = {}",
            cfg.n_max
        ));
    }
    let levels: Vec<f64> = (n0..=cfg.n_max).map(|n| level(alpha, n)).collect();
    let counts = map_replications(cfg.reps, cfg.seed, |_, rng| {
        let mut t = alpha.powf(n0 as f64);
        let mut w = t.sqrt() * rng.sample::<f64, _>(StandardNormal);
        let mut count = 0;
        for (i, lvl) in levels.iter().enumerate() {
            let t_next = alpha.powf((n0 + i as u64 + 1) as f64);
            let dt = t_next - t;
            let w_next = w + dt.sqrt() * rng.sample::<f64, _>(StandardNormal);
            if bridge_max(w, w_next, dt, rng.random()) > *lvl {
                count += 1;
            }
            t = t_next;
            w = w_next;
        }
        count
    });
    let mut report = MdfReport::new("lil", cfg.reps, cfg.seed);
    let tail = empirical_tail(&counts, TAIL_POINTS);
    let order = 1.0 + (alpha - 2.0).max(0.0);
    for p in [1.0, order] {
        report.push(MdfEntry {
            epsilon: alpha,
            order: format!("O^{p}"),
            theoretical: None,
            empirical: moment_of_counts(&counts, &Functional::Power(p))?,
            tail: tail.clone(),
        });
        if order == 1.0 {
            break;
        }
    }
    report.diagnostics.insert("first_index".into(), n0 as f64);
    report.diagnostics.insert("n_max".into(), cfg.n_max as f64);
    Ok(report)
}
