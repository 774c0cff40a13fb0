//! Explicit strong order-1.5 scheme for scalar SDEs `dX = a(t,X)dt + b(t,X)dW`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mc::stream_rng;

pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Exact solution `X_t` as a function of `(t, W_t)`.
pub type ExactSolution = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SdeProblem {
    pub label: String,
    pub drift: Coefficient,
    pub diffusion: Coefficient,
    pub x0: f64,
    pub horizon: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for SdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeProblem")
            .field("label", &self.label)
            .field("x0", &self.x0)
            .field("horizon", &self.horizon)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl SdeProblem {
    pub fn new(
        label: impl Into<String>,
        drift: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        x0: f64,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon T must be positive, got {horizon}")));
        }
        if !x0.is_finite() {
            return Err(Error::Domain(format!("initial value must be finite, got {x0}")));
        }
        Ok(Self {
            label: label.into(),
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            x0,
            horizon,
            exact: None,
        })
    }

    pub fn with_exact(mut self, exact: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    /// Geometric Brownian motion `dX = μX dt + σX dW`, solved by
    /// `X_t = x0·exp((μ − σ²/2)t + σW_t)`.
    pub fn gbm(mu: f64, sigma: f64, x0: f64, horizon: f64) -> Result<Self> {
        Ok(Self::new(
            format!("gbm:{mu},{sigma}"),
            move |_, x| mu * x,
            move |_, x| sigma * x,
            x0,
            horizon,
        )?
        .with_exact(move |t, w| x0 * ((mu - 0.5 * sigma * sigma) * t + sigma * w).exp()))
    }

    fn eval(&self, which: &str, f: &Coefficient, t: f64, x: f64) -> Result<f64> {
        let v = f(t, x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("{which}(t = {t}, x = {x}) evaluated to {v}")))
        }
    }
}

/// Increments over one step: `ΔW ~ N(0, Δ)` and `ΔZ = ∫ (W_s − W_t) ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeStepInputs {
    pub delta: f64,
    pub dw: f64,
    pub dz: f64,
}

impl SchemeStepInputs {
    /// `ΔZ = ½Δ(ΔW + ΔŴ/√3)` with an independent `ΔŴ ~ N(0, Δ)`, which gives
    /// `Var ΔZ = Δ³/3` and `Cov(ΔW, ΔZ) = Δ²/2`.
    pub fn sample(delta: f64, rng: &mut impl Rng) -> Self {
        let s = delta.sqrt();
        let dw = s * rng.sample::<f64, _>(StandardNormal);
        let dw_hat = s * rng.sample::<f64, _>(StandardNormal);
        Self {
            delta,
            dw,
            dz: 0.5 * delta * (dw + dw_hat / 3f64.sqrt()),
        }
    }

    /// Increments of two consecutive steps over their union.
    pub fn combine(self, next: Self) -> Self {
        Self {
            delta: self.delta + next.delta,
            dw: self.dw + next.dw,
            dz: self.dz + next.dz + next.delta * self.dw,
        }
    }
}

/// One step of the explicit order-1.5 strong Taylor scheme.
///
/// With `Υ± = y + aΔ ± b√Δ` and `Φ± = Υ₊ ± b(Υ₊)√Δ`:
///
/// ```text
/// y' = y + bΔW + (a(Υ₊) − a(Υ₋))ΔZ/(2√Δ) + (a(Υ₊) + 2a + a(Υ₋))Δ/4
///        + (b(Υ₊) − b(Υ₋))((ΔW)² − Δ)/(4√Δ)
///        + (b(Υ₊) − 2b + b(Υ₋))(ΔWΔ − ΔZ)/(2Δ)
///        + (b(Φ₊) − b(Φ₋) − b(Υ₊) + b(Υ₋))((ΔW)²/3 − Δ)ΔW/(4Δ)
/// ```
///
/// Supporting values are evaluated at time `t`. Explicit time dependence adds
/// `(a(t+Δ, y) − a(t, y))Δ/2 + (b(t+Δ, y) − b(t, y))(ΔW − ΔZ/Δ)`, the
/// difference quotients of `∂a/∂t·Δ²/2` and `∂b/∂t·(ΔWΔ − ΔZ)`.
///
/// Compared with the commonly printed display, the first difference term is
/// `a(Υ₊) − a(Υ₋)` (not `a(Υ₊) − Υ₋`), the drift average carries `+2a`, the
/// second-difference term of `b` multiplies `ΔWΔ − ΔZ` only, and the last
/// term is divided by `4Δ`.
pub fn sde15_step(problem: &SdeProblem, t: f64, y: f64, inputs: SchemeStepInputs) -> Result<f64> {
    let SchemeStepInputs { delta, dw, dz } = inputs;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {delta}")));
    }
    let a_fn = &problem.drift;
    let b_fn = &problem.diffusion;
    let a = problem.eval("a", a_fn, t, y)?;
    let b = problem.eval("b", b_fn, t, y)?;
    let sq = delta.sqrt();
    let ups_p = y + a * delta + b * sq;
    let ups_m = y + a * delta - b * sq;
    let a_p = problem.eval("a", a_fn, t, ups_p)?;
    let a_m = problem.eval("a", a_fn, t, ups_m)?;
    let b_p = problem.eval("b", b_fn, t, ups_p)?;
    let b_m = problem.eval("b", b_fn, t, ups_m)?;
    let phi_p = ups_p + b_p * sq;
    let phi_m = ups_p - b_p * sq;
    let bphi_p = problem.eval("b", b_fn, t, phi_p)?;
    let bphi_m = problem.eval("b", b_fn, t, phi_m)?;

    let dw2 = dw * dw;
    let mut next = y
        + b * dw
        + (a_p - a_m) * dz / (2.0 * sq)
        + 0.25 * (a_p + 2.0 * a + a_m) * delta
        + (b_p - b_m) * (dw2 - delta) / (4.0 * sq)
        + (b_p - 2.0 * b + b_m) * (dw * delta - dz) / (2.0 * delta)
        + (bphi_p - bphi_m - b_p + b_m) * (dw2 / 3.0 - delta) * dw / (4.0 * delta);

    let a_next = problem.eval("a", a_fn, t + delta, y)?;
    let b_next = problem.eval("b", b_fn, t + delta, y)?;
    next += 0.5 * (a_next - a) * delta + (b_next - b) * (dw - dz / delta);

    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::Numeric(format!("scheme produced {next} at t = {t}, y = {y}")))
    }
}

/// Node values of the scheme, linearly interpolated in between.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SchemePath {
    /// Linear interpolation at `t ∈ [τ₀, τ_N]`.
    pub fn at(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if !(t >= first && t <= last) {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 >= self.times.len() {
            return self.values.last().copied();
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Some(self.values[i] + w * (self.values[i + 1] - self.values[i]))
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("a path has at least one node")
    }
}

pub(crate) fn check_partition(problem: &SdeProblem, partition: &[f64]) -> Result<()> {
    if partition.len() < 2 {
        return Err(Error::Input("a partition needs at least two nodes".into()));
    }
    if partition[0] != 0.0 {
        return Err(Error::Input(format!("a partition starts at 0, got {}", partition[0])));
    }
    if let Some(w) = partition.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Input(format!(
            "partition is not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    let end = *partition.last().unwrap();
    if (end - problem.horizon).abs() > 1e-12 * problem.horizon.max(1.0) {
        return Err(Error::Input(format!(
            "partition ends at {end}, horizon is {}",
            problem.horizon
        )));
    }
    Ok(())
}

/// Runs the scheme over `partition` with noise from substream 0 of `seed`.
pub fn sde15_solve(problem: &SdeProblem, partition: &[f64], seed: u64) -> Result<SchemePath> {
    check_partition(problem, partition)?;
    let mut rng = stream_rng(seed, 0);
    let mut values = Vec::with_capacity(partition.len());
    let mut y = problem.x0;
    values.push(y);
    for w in partition.windows(2) {
        let inputs = SchemeStepInputs::sample(w[1] - w[0], &mut rng);
        y = sde15_step(problem, w[0], y, inputs)?;
        values.push(y);
    }
    Ok(SchemePath {
        times: partition.to_vec(),
        values,
    })
}

/// Uniform partition of `[0, T]` into `n` steps.
pub fn uniform_partition(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(delta: f64, dw: f64, dz: f64) -> SchemeStepInputs {
        SchemeStepInputs { delta, dw, dz }
    }

    #[test]
    fn frozen_system() {
        let p = SdeProblem::new("zero", |_, _| 0.0, |_, _| 0.0, 1.3, 1.0).unwrap();
        assert_eq!(sde15_step(&p, 0.0, 1.3, inputs(0.1, 0.4, 0.01)).unwrap(), 1.3);
    }

    #[test]
    fn unit_drift() {
        let p = SdeProblem::new("drift", |_, _| 1.0, |_, _| 0.0, 0.0, 1.0).unwrap();
        let y = sde15_step(&p, 0.0, 2.0, inputs(0.125, -0.3, 0.02)).unwrap();
        assert_eq!(y, 2.125);
    }

    #[test]
    fn additive_noise() {
        let p = SdeProblem::new("additive", |_, _| 0.0, |_, _| 0.7, 0.0, 1.0).unwrap();
        for (dw, dz) in [(0.3, 0.01), (-1.2, -0.2), (0.0, 0.05)] {
            let y = sde15_step(&p, 0.0, 0.5, inputs(0.25, dw, dz)).unwrap();
            assert!((y - (0.5 + 0.7 * dw)).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_drift_additive_noise_expansion() {
        // a = λx, b = σ: Υ± = y(1+λΔ) ± σ√Δ, so the ΔZ term is λσΔZ and the
        // drift average is λy(1 + λΔ/2)Δ; all b differences vanish
        let (lam, sigma): (f64, f64) = (-0.8, 0.3);
        let p = SdeProblem::new("ou", move |_, x| lam * x, move |_, _| sigma, 0.0, 1.0).unwrap();
        let (y, d, dw, dz) = (1.1, 0.1, 0.2, 0.015);
        let expect = y + sigma * dw + lam * sigma * dz + lam * y * (1.0 + lam * d / 2.0) * d;
        let got = sde15_step(&p, 0.0, y, inputs(d, dw, dz)).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn time_dependent_drift() {
        // dX = t dt: Heun-type time correction integrates exactly
        let p = SdeProblem::new("t", |t, _| t, |_, _| 0.0, 0.0, 1.0).unwrap();
        let path = sde15_solve(&p, &uniform_partition(1.0, 7), 0).unwrap();
        assert!((path.terminal() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn non_finite_coefficient_is_reported() {
        let p = SdeProblem::new("bad", |_, x| 1.0 / x, |_, _| 0.0, 0.0, 1.0).unwrap();
        let err = sde15_step(&p, 0.0, 0.0, inputs(0.1, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Numeric(ref m) if m.contains("t = 0")));
    }

    #[test]
    fn increment_moments() {
        let d: f64 = 0.3;
        let n = 1_000_000;
        let mut rng = stream_rng(17, 0);
        let (mut sw, mut sz, mut sww, mut szz, mut swz) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut sq = [0.0f64; 3];
        for _ in 0..n {
            let s = SchemeStepInputs::sample(d, &mut rng);
            sw += s.dw;
            sz += s.dz;
            sww += s.dw * s.dw;
            szz += s.dz * s.dz;
            swz += s.dw * s.dz;
            sq[0] += (s.dw * s.dw - d).powi(2);
            sq[1] += (s.dz * s.dz - d.powi(3) / 3.0).powi(2);
            sq[2] += (s.dw * s.dz - d * d / 2.0).powi(2);
        }
        let nf = n as f64;
        let check = |est: f64, target: f64, var: f64| {
            let se = (var / nf).sqrt();
            assert!((est - target).abs() <= 4.0 * se, "{est} vs {target} (se {se})");
        };
        check(sw / nf, 0.0, d);
        check(sz / nf, 0.0, d.powi(3) / 3.0);
        check(sww / nf, d, sq[0] / nf);
        check(szz / nf, d.powi(3) / 3.0, sq[1] / nf);
        check(swz / nf, d * d / 2.0, sq[2] / nf);
    }

    #[test]
    fn combined_increments_are_consistent() {
        // for a linear path W_s = c·s, ΔZ over [0, h] is c·h²/2
        let c = 0.7;
        let step = |h: f64| SchemeStepInputs {
            delta: h,
            dw: c * h,
            dz: c * h * h / 2.0,
        };
        let both = step(0.2).combine(step(0.2));
        let whole = step(0.4);
        assert!((both.dw - whole.dw).abs() < 1e-15);
        assert!((both.dz - whole.dz).abs() < 1e-15);
    }

    #[test]
    fn determinism_and_seed_independence_without_noise() {
        let gbm = SdeProblem::gbm(0.5, 0.1, 1.0, 1.0).unwrap();
        let part = uniform_partition(1.0, 16);
        assert_eq!(
            sde15_solve(&gbm, &part, 4).unwrap(),
            sde15_solve(&gbm, &part, 4).unwrap()
        );
        let ode = SdeProblem::gbm(0.5, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(
            sde15_solve(&ode, &part, 4).unwrap(),
            sde15_solve(&ode, &part, 99).unwrap()
        );
    }

    #[test]
    fn single_step_solve() {
        let gbm = SdeProblem::gbm(0.5, 0.1, 1.0, 1.0).unwrap();
        let path = sde15_solve(&gbm, &[0.0, 1.0], 3).unwrap();
        let mut rng = stream_rng(3, 0);
        let inputs = SchemeStepInputs::sample(1.0, &mut rng);
        assert_eq!(path.terminal(), sde15_step(&gbm, 0.0, 1.0, inputs).unwrap());
        assert_eq!(path.at(0.5), Some(0.5 * (1.0 + path.terminal())));
    }

    #[test]
    fn decay_ode_accuracy() {
        let p = SdeProblem::new("decay", |_, x| -x, |_, _| 0.0, 1.0, 1.0).unwrap();
        let err =
            |n: usize| (sde15_solve(&p, &uniform_partition(1.0, n), 0).unwrap().terminal() - (-1.0f64).exp()).abs();
        let (e1, e2) = (err(32), err(64));
        assert!(e1 < 1e-4);
        // second-order convergence for the deterministic part
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn bad_partitions() {
        let p = SdeProblem::gbm(0.5, 0.1, 1.0, 1.0).unwrap();
        assert!(matches!(
            sde15_solve(&p, &[0.0, 0.6, 0.4, 1.0], 0),
            Err(Error::Input(_))
        ));
        assert!(sde15_solve(&p, &[0.0, 0.5], 0).is_err());
        assert!(sde15_solve(&p, &[0.0], 0).is_err());
    }
}
