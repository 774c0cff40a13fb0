//! Strong-error measurement against the exact solution on the same Brownian path.

use std::io::Write;

use serde::Serialize;

use super::scheme::{sde15_step, SchemeStepInputs, SdeProblem};
use crate::error::{Error, Result};
use crate::mc::map_replications;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongErrorPoint {
    pub delta: f64,
    pub mean_abs_error: f64,
    pub stderr: f64,
    pub reps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongErrorReport {
    pub points: Vec<StrongErrorPoint>,
    /// Least-squares slope of `ln error` against `ln δ`.
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub seed: u64,
}

pub const SWEEP_COLUMNS: [&str; 4] = ["delta", "mean_abs_error", "stderr", "reps"];

impl StrongErrorReport {
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", SWEEP_COLUMNS.join(","))?;
        for p in &self.points {
            writeln!(out, "{},{},{},{}", p.delta, p.mean_abs_error, p.stderr, p.reps)?;
        }
        Ok(())
    }

    /// True when the mean error falls strictly as `δ` shrinks.
    pub fn is_monotone(&self) -> bool {
        let mut pts: Vec<&StrongErrorPoint> = self.points.iter().collect();
        pts.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        pts.windows(2).all(|w| w[0].mean_abs_error < w[1].mean_abs_error)
    }
}

/// Ordinary least squares `y = c + s·x`, returning `(s, se(s), c)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, se, intercept)
}

/// Number of steps of size `delta` in `[0, T]`, if it is a whole number.
fn step_count(horizon: f64, delta: f64) -> Option<usize> {
    let n = (horizon / delta).round();
    ((n * delta - horizon).abs() <= 1e-9 * horizon && n >= 1.0).then_some(n as usize)
}

/// Monte-Carlo `E|X(T) − Y_T^δ|` for each step size, all driven by one
/// Brownian path per replication.
///
/// Each replication samples `(ΔW, ΔZ)` on the finest grid; coarser
/// increments are aggregated from them, so every scheme run and the exact
/// solution `X(T) = exact(T, W_T)` see the same path. The finest step must
/// divide every other step.
pub fn strong_error_estimate(problem: &SdeProblem, deltas: &[f64], reps: u64, seed: u64) -> Result<StrongErrorReport> {
    if deltas.len() < 3 {
        return Err(Error::Input(format!(
            "a slope regression needs at least 3 step sizes, got {}",
            deltas.len()
        )));
    }
    if reps == 0 {
        return Err(Error::Input("reps must be >= 1".into()));
    }
    let exact = problem
        .exact
        .clone()
        .ok_or_else(|| Error::Input(format!("problem '{}' has no exact solution", problem.label)))?;
    let horizon = problem.horizon;
    let mut steps = Vec::with_capacity(deltas.len());
    for &d in deltas {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("step size must be positive, got {d}")));
        }
        steps.push(
            step_count(horizon, d)
                .ok_or_else(|| Error::Input(format!("step size {d} does not divide the horizon {horizon}")))?,
        );
    }
    let finest = *steps.iter().max().unwrap();
    let mut factors = Vec::with_capacity(steps.len());
    for &n in &steps {
        if finest % n != 0 {
            return Err(Error::Input(format!(
                "{n} steps do not nest in the finest grid of {finest} steps"
            )));
        }
        factors.push(finest / n);
    }
    let h = horizon / finest as f64;

    let runs = map_replications(reps, seed, |_, rng| -> Result<Vec<f64>> {
        let fine: Vec<SchemeStepInputs> = (0..finest).map(|_| SchemeStepInputs::sample(h, rng)).collect();
        let w_t: f64 = fine.iter().map(|s| s.dw).sum();
        let target = exact(horizon, w_t);
        factors
            .iter()
            .map(|&f| {
                let mut y = problem.x0;
                for (i, chunk) in fine.chunks(f).enumerate() {
                    let inputs = chunk[1..].iter().fold(chunk[0], |acc, &s| acc.combine(s));
                    y = sde15_step(problem, i as f64 * inputs.delta, y, inputs)?;
                }
                Ok((target - y).abs())
            })
            .collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let rf = reps as f64;
    let points: Vec<StrongErrorPoint> = deltas
        .iter()
        .enumerate()
        .map(|(j, &delta)| {
            let mean = runs.iter().map(|r| r[j]).sum::<f64>() / rf;
            let stderr = if reps > 1 {
                let ss: f64 = runs.iter().map(|r| (r[j] - mean).powi(2)).sum();
                (ss / (rf - 1.0)).sqrt() / rf.sqrt()
            } else {
                0.0
            };
            StrongErrorPoint {
                delta,
                mean_abs_error: mean,
                stderr,
                reps,
            }
        })
        .collect();
    if let Some(p) = points.iter().find(|p| !(p.mean_abs_error > 0.0)) {
        return Err(Error::Numeric(format!(
            "mean error {} at delta = {} leaves no logarithm to regress",
            p.mean_abs_error, p.delta
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_abs_error.ln()).collect();
    let (slope, slope_stderr, intercept) = linear_fit(&x, &y);
    Ok(StrongErrorReport {
        points,
        slope,
        slope_stderr,
        intercept,
        seed,
    })
}

/// Dyadic step sizes `2^{-lo}, …, 2^{-hi}`.
pub fn dyadic_deltas(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| 0.5f64.powi(k as i32)).collect()
}
