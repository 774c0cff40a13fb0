//! Explicit strong order-1.5 scheme for scalar SDEs, strong-error sweeps and
//! the deviation-count bound for scheme endpoints along a refining sequence.

mod scheme;
mod strong;

pub use scheme::{
    sde15_solve, sde15_step, uniform_partition, Coefficient, ExactSolution, SchemePath, SchemeStepInputs, SdeProblem,
};
pub use strong::{dyadic_deltas, strong_error_estimate, StrongErrorPoint, StrongErrorReport, SWEEP_COLUMNS};

use crate::bounds::{BoundResult, FormulaId, TailRule};
use crate::error::{domain, Result};
use crate::series::zeta;

/// `E[O_ε] ≤ K₁ = K_T(CT)^{3/2}/ε · ζ(3/2)` for grids with `δ_N ≤ CT/N`,
/// given `E|X(T) − Y_T^δ| ≤ K_T δ^{3/2}`. Tail `P(O_ε ≥ k) ≤ K₁/k`.
pub fn sde_mdf_bound(k_t: f64, c: f64, horizon: f64, eps: f64) -> Result<BoundResult> {
    for (name, v) in [("K_T", k_t), ("C", c), ("T", horizon), ("eps", eps)] {
        if !(v > 0.0 && v.is_finite()) {
            return domain(format!("{name} must be positive, got {v}"));
        }
    }
    let z = zeta(1.5)?;
    let scale = k_t * (c * horizon).powf(1.5) / eps;
    Ok(BoundResult::new(
        FormulaId::SchemeMdf,
        scale * z.value,
        "needs E|X(T) - Y| <= K_T delta^(3/2) and delta_N <= C T / N",
    )
    .input("K_T", k_t)
    .input("C", c)
    .input("T", horizon)
    .input("eps", eps)
    .with_truncation_error(scale * z.truncation_error)
    .with_tail_rule(TailRule::Power { order: 1.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_scale_is_zeta() {
        let b = sde_mdf_bound(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((b.value - 2.612_375_348_685_488).abs() < 1e-12);
        let half = sde_mdf_bound(1.0, 1.0, 1.0, 2.0).unwrap();
        assert!((half.value - b.value / 2.0).abs() < 1e-15);
        assert!((b.tail_bound(10).unwrap() - b.upper() / 10.0).abs() < 1e-15);
        assert!(sde_mdf_bound(0.0, 1.0, 1.0, 1.0).is_err());
    }
}
