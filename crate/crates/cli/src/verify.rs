//! `bcm verify`: a bound against Monte Carlo estimates or the exact
//! Poisson-binomial distribution of the truncated independent family.

use std::collections::BTreeMap;

use bc_moments::bounds::{sn_exact_distribution, BoundResult, FormulaId};
use bc_moments::mc::{
    empirical_moment, simulate_overlap, EventFamilySpec, FamilyKind, Functional, DEFAULT_TAIL_TOLERANCE,
};
use bc_moments::series::{DecayModel, TailFunction, WeightSequence};
use serde_json::json;

use crate::bound::{decay, evaluate, grid_names, points};
use crate::config::{Grid, RunConfig};
use crate::output::{num, Table};
use crate::{parse, CliError, Outcome};

const DEFAULT_REPS: u64 = 100_000;

enum Oracle {
    /// Simulation of `functional`; `two_sided` for identities.
    MonteCarlo { functional: Functional, two_sided: bool },
    /// Exact expectation of `O_N` under independence.
    Exact,
}

fn oracle(id: FormulaId, pt: &BTreeMap<&str, f64>, weights: &WeightSequence) -> Result<Oracle, CliError> {
    use FormulaId::*;
    let mc = |functional, two_sided| Ok(Oracle::MonteCarlo { functional, two_sided });
    match id {
        NestedIdentity => mc(Functional::WeightSum(weights.clone()), true),
        GeneralMoment => mc(Functional::WeightSum(weights.clone()), false),
        PolynomialMoment | MdfPolynomial => mc(Functional::Power(pt["p"] + 1.0), false),
        ExponentialMoment | MdfExponential => mc(Functional::Exp(pt["p"]), false),
        MdfFirstOrder => mc(Functional::Power(1.0), true),
        SecondMoment | UniversalExponential | UniversalTail | ImprovedExponential | RateAwareExponential
        | PowerLawTail | GeometricTail => Ok(Oracle::Exact),
        LdpMdf | VcDeviation | SchemeMdf => Err(CliError::Usage(format!(
            "{} has no verification oracle; the `app` subcommand simulates the matching application",
            id.as_str()
        ))),
    }
}

/// Model the events are drawn from: the decay model, or for the tail
/// bounds the family whose tail is exactly `L`.
fn model_for(id: FormulaId, cfg: &RunConfig) -> Result<DecayModel, CliError> {
    match (id, &cfg.tail) {
        (FormulaId::PowerLawTail | FormulaId::GeometricTail, Some(t)) => Ok(DecayModel::CustomTail(parse::tail(t)?)),
        (FormulaId::PowerLawTail | FormulaId::GeometricTail, None) => Err(CliError::Usage(format!(
            "{} needs --tail (the tail function L)",
            id.as_str()
        ))),
        _ => decay(cfg),
    }
}

/// Bound parameters implied by the model when not given explicitly.
fn implied(id: FormulaId, cfg: &RunConfig, model: &DecayModel) -> Result<RunConfig, CliError> {
    let mut cfg = cfg.clone();
    match model {
        DecayModel::CustomTail(TailFunction::Power { c, p }) => {
            cfg.c.get_or_insert(Grid(vec![*c]));
            cfg.p.get_or_insert(Grid(vec![*p]));
        }
        DecayModel::CustomTail(TailFunction::Geometric { c, b }) => {
            cfg.c.get_or_insert(Grid(vec![*c]));
            cfg.b.get_or_insert(Grid(vec![*b]));
        }
        _ => {}
    }
    if cfg.c1.is_none() && grid_names(id).contains(&"c1") {
        cfg.c1 = Some(Grid(vec![model.tail_sum(1)?.upper()]));
    }
    Ok(cfg)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let id = crate::bound::formula_id(cfg)?;
    let reps = cfg.reps_or(DEFAULT_REPS)?;
    let tol = cfg.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE);
    let model = model_for(id, cfg)?;
    let bound_cfg = implied(id, cfg, &model)?;
    let weights = parse::weights(cfg.weights.as_deref().unwrap_or("monomial:1"))?;
    let kind = match (id, cfg.family.as_deref()) {
        (FormulaId::NestedIdentity, None | Some("nested")) => FamilyKind::Nested,
        (FormulaId::NestedIdentity, Some(other)) => {
            return Err(CliError::Usage(format!(
                "prop2.1 holds for nested families, not '{other}'"
            )))
        }
        (_, Some(f)) => f.parse::<FamilyKind>()?,
        (_, None) => FamilyKind::Independent,
    };

    let mut table = Table::new(&[
        "formula",
        "family",
        "decay",
        "functional",
        "method",
        "theoretical",
        "empirical",
        "stderr",
        "reps",
        "seed",
        "pass",
    ]);
    let mut failures = 0;
    for pt in points(&bound_cfg, &grid_names(id))? {
        let bound: BoundResult = evaluate(id, &bound_cfg, &pt)?;
        let (functional, method, estimate, stderr, ok, used_reps) = match oracle(id, &pt, &weights)? {
            Oracle::MonteCarlo { functional, two_sided } => {
                let mut spec = EventFamilySpec::new(kind, model.clone(), tol)?;
                let rate = match &functional {
                    Functional::Exp(r) | Functional::WeightSum(WeightSequence::Exponential(r)) => Some(*r),
                    _ => None,
                };
                if let Some(r) = rate {
                    spec = spec.for_exponential(r)?;
                }
                let sample = simulate_overlap(&spec, reps, cfg.seed)?;
                let m = empirical_moment(&sample, &functional)?;
                let slack = 4.0 * m.stderr + bound.truncation_error;
                let ok = if two_sided {
                    (m.estimate - bound.value).abs() <= slack
                } else {
                    m.estimate <= bound.upper() + 4.0 * m.stderr
                };
                (
                    functional.to_string(),
                    "monte_carlo",
                    m.estimate,
                    m.stderr,
                    ok,
                    Some(reps),
                )
            }
            Oracle::Exact => {
                if kind != FamilyKind::Independent {
                    return Err(CliError::Usage(format!(
                        "{} is a bound for independent events",
                        id.as_str()
                    )));
                }
                let spec = EventFamilySpec::new(kind, model.clone(), tol)?;
                let exact = sn_exact_distribution(&spec.probabilities())?;
                let (label, value) = exact_functional(id, &pt, &exact)?;
                (label, "exact", value, 0.0, value <= bound.upper() * (1.0 + 1e-12), None)
            }
        };
        if !ok {
            failures += 1;
        }
        table.push(vec![
            json!(id.as_str()),
            json!(kind.as_str()),
            json!(model.describe()),
            json!(functional),
            json!(method),
            num(bound.upper()),
            num(estimate),
            num(stderr),
            json!(used_reps),
            json!(used_reps.map(|_| cfg.seed)),
            json!(ok),
        ]);
    }
    table.summary.insert("checks".into(), json!(table.rows.len()));
    table.summary.insert("failures".into(), json!(failures));
    Ok(Outcome {
        table,
        passed: failures == 0,
    })
}

fn exact_functional(
    id: FormulaId,
    pt: &BTreeMap<&str, f64>,
    exact: &bc_moments::bounds::ExactOverlapDistribution,
) -> Result<(String, f64), CliError> {
    use FormulaId::*;
    Ok(match id {
        SecondMoment => ("O^2".into(), exact.expectation(|k| (k * k) as f64)),
        UniversalExponential | ImprovedExponential | RateAwareExponential => {
            let r = pt["r"];
            (format!("exp({r}*O)"), exact.exp_moment(r))
        }
        UniversalTail | PowerLawTail | GeometricTail => {
            let k = pt["k"] as usize;
            (
                format!("1{{O>={k}}}"),
                exact.expectation(|j| if j >= k { 1.0 } else { 0.0 }),
            )
        }
        _ => unreachable!("only exact-oracle formulas reach here"),
    })
}
