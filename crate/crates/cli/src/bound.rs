//! `bcm bound`: evaluates one formula over the cartesian product of its grids.

use std::collections::BTreeMap;

use bc_moments::apps::{ldp_mdf_bound, mdf_exponential, mdf_first_order, mdf_polynomial, vc_bound};
use bc_moments::bounds::{
    allow_divergent, exp_moment_bound, freedman_exp_bound, freedman_tail_bound, general_moment_bound,
    geometric_tail_bound, improved_exp_bound, integer_tail_exp_bound, nested_moment_identity, poly_moment_bound,
    powerlaw_tail_asymptotic, rate_aware_exp_bound, second_moment_bound, BoundResult, FormulaId, TailRule,
};
use bc_moments::sde::sde_mdf_bound;
use bc_moments::series::DecayModel;
use serde_json::{json, Value};

use crate::config::{flag, RunConfig};
use crate::output::{num, opt_num, Table};
use crate::{parse, CliError};

pub fn formula_id(cfg: &RunConfig) -> Result<FormulaId, CliError> {
    let name = cfg
        .formula
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing --formula (one of {})", known_ids())))?;
    name.parse::<FormulaId>()
        .map_err(|_| CliError::Usage(format!("unknown formula id '{name}' (one of {})", known_ids())))
}

fn known_ids() -> String {
    FormulaId::ALL.map(FormulaId::as_str).join(", ")
}

pub fn decay(cfg: &RunConfig) -> Result<DecayModel, CliError> {
    Ok(cfg.string(&cfg.decay, "decay")?.parse::<DecayModel>()?)
}

/// Grid parameters each formula reads.
pub fn grid_names(id: FormulaId) -> Vec<&'static str> {
    use FormulaId::*;
    match id {
        NestedIdentity | GeneralMoment | MdfFirstOrder => vec![],
        PolynomialMoment | ExponentialMoment | MdfPolynomial | MdfExponential => vec!["p"],
        SecondMoment => vec!["c1"],
        UniversalExponential | ImprovedExponential => vec!["r", "c1"],
        UniversalTail => vec!["k", "c1"],
        RateAwareExponential => vec!["r"],
        PowerLawTail => vec!["k", "c", "p"],
        GeometricTail => vec!["k", "c", "b"],
        LdpMdf => vec!["rate", "p", "c"],
        VcDeviation => vec!["ell", "eps", "vc_dim"],
        SchemeMdf => vec!["k_t", "c", "horizon", "eps"],
    }
}

/// Cartesian product of the named grids, in the given order. `c1` may be
/// omitted when a decay model supplies it.
pub fn points(cfg: &RunConfig, names: &[&'static str]) -> Result<Vec<BTreeMap<&'static str, f64>>, CliError> {
    let mut out = vec![BTreeMap::new()];
    for &name in names {
        let values = match cfg.grid(name) {
            Some(g) => g.0.clone(),
            None if name == "c1" && cfg.decay.is_some() => vec![decay(cfg)?.tail_sum(1)?.upper()],
            None => return Err(CliError::Usage(format!("missing --{}", flag(name)))),
        };
        out = out
            .into_iter()
            .flat_map(|pt| {
                values.iter().map(move |&v| {
                    let mut next = pt.clone();
                    next.insert(name, v);
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

fn integer(name: &str, v: f64) -> Result<u64, CliError> {
    if v >= 0.0 && v.fract() == 0.0 && v < 9.0e15 {
        Ok(v as u64)
    } else {
        Err(CliError::Usage(format!(
            "--{} must be a nonnegative integer, got {v}",
            flag(name)
        )))
    }
}

/// Sauer–Shelah growth bound `m(n) ≤ (n + 1)^d`.
fn sauer_growth(d: f64) -> impl Fn(f64) -> f64 {
    move |n| (n + 1.0).powf(d)
}

pub fn evaluate(id: FormulaId, cfg: &RunConfig, pt: &BTreeMap<&str, f64>) -> Result<BoundResult, CliError> {
    use FormulaId::*;
    let g = |name: &str| pt[name];
    let weights = || parse::weights(cfg.weights.as_deref().unwrap_or("monomial:1"));
    let result = match id {
        NestedIdentity => nested_moment_identity(&weights()?, &decay(cfg)?),
        GeneralMoment => general_moment_bound(&weights()?, &decay(cfg)?),
        PolynomialMoment => poly_moment_bound(g("p"), &decay(cfg)?),
        ExponentialMoment => exp_moment_bound(g("p"), &decay(cfg)?),
        SecondMoment => second_moment_bound(g("c1")).map(|v| {
            BoundResult::new(
                SecondMoment,
                v,
                "independent events with sum of probabilities C1; bounds E[O^2]",
            )
            .input("c1", g("c1"))
            .with_tail_rule(TailRule::Power { order: 2.0 })
        }),
        UniversalExponential => freedman_exp_bound(g("r"), g("c1")),
        UniversalTail => {
            let k = integer("k", g("k"))?;
            freedman_tail_bound(k, g("c1")).map(|t| {
                BoundResult::new(
                    UniversalTail,
                    t.closed_form,
                    "independent events; bounds P(O >= k), vacuous for k <= C1",
                )
                .input("k", k)
                .input("c1", g("c1"))
                .with_minimizer(t.minimizer)
                .aux("numeric", t.numeric)
            })
        }
        ImprovedExponential => improved_exp_bound(g("r"), g("c1")),
        RateAwareExponential => match &cfg.tail {
            Some(t) => rate_aware_exp_bound(g("r"), &parse::tail(t)?),
            None if cfg.decay.is_some() => integer_tail_exp_bound(g("r"), &decay(cfg)?),
            None => return Err(CliError::Usage("cor2.10 needs --tail or --decay".into())),
        },
        PowerLawTail => {
            let k = integer("k", g("k"))?;
            powerlaw_tail_asymptotic(k, g("c"), g("p")).map(|t| {
                BoundResult::new(
                    PowerLawTail,
                    t.value,
                    "independent events with C_m <= c/m^p, p > 1; bounds P(O >= k), k >= 8",
                )
                .input("k", k)
                .input("c", g("c"))
                .input("p", g("p"))
                .with_minimizer(t.minimizer)
                .aux("numeric", t.numeric)
                .aux("numeric_minimizer", t.numeric_minimizer)
                .aux("asymptotic", t.asymptotic)
            })
        }
        GeometricTail => {
            let k = integer("k", g("k"))?;
            geometric_tail_bound(k, g("c"), g("b")).map(|t| {
                BoundResult::new(
                    GeometricTail,
                    t.value,
                    "independent events with C_m <= c b^m; bounds P(O >= k)",
                )
                .input("k", k)
                .input("c", g("c"))
                .input("b", g("b"))
                .with_minimizer(t.minimizer)
                .aux("numeric", t.numeric)
            })
        }
        MdfFirstOrder => mdf_first_order(&decay(cfg)?),
        MdfPolynomial => mdf_polynomial(g("p"), &decay(cfg)?),
        MdfExponential => mdf_exponential(g("p"), &decay(cfg)?),
        LdpMdf => ldp_mdf_bound(g("rate"), g("p"), g("c")),
        VcDeviation => {
            let ell = integer("ell", g("ell"))?;
            vc_bound(ell, g("eps"), &sauer_growth(g("vc_dim"))).map(|v| {
                BoundResult::new(VcDeviation, v, "l >= 2/eps^2; growth function m(n) <= (n+1)^d")
                    .input("ell", ell)
                    .input("eps", g("eps"))
                    .input("vc_dim", g("vc_dim"))
            })
        }
        SchemeMdf => sde_mdf_bound(g("k_t"), g("c"), g("horizon"), g("eps")),
    };
    Ok(allow_divergent(result, id, cfg.allow_divergent)?)
}

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let id = formula_id(cfg)?;
    let names = grid_names(id);
    let strings: Vec<(&str, Option<&String>)> = vec![
        ("decay", cfg.decay.as_ref()),
        ("weights", cfg.weights.as_ref()),
        ("tail", cfg.tail.as_ref()),
    ];
    let strings: Vec<(&str, &String)> = strings.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    let mut columns = vec!["formula"];
    columns.extend(strings.iter().map(|s| s.0));
    columns.extend(names.iter().copied());
    columns.extend([
        "value",
        "truncation_error",
        "upper",
        "minimizer",
        "infinite",
        "validity",
        "auxiliary",
    ]);
    let mut table = Table::new(&columns);
    for pt in points(cfg, &names)? {
        let b = evaluate(id, cfg, &pt)?;
        let mut row = vec![json!(id.as_str())];
        row.extend(strings.iter().map(|s| json!(s.1)));
        row.extend(names.iter().map(|n| num(pt[n])));
        let aux: serde_json::Map<String, Value> = b.auxiliary.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        row.extend([
            num(b.value),
            num(b.truncation_error),
            num(b.upper()),
            opt_num(b.minimizer),
            json!(b.infinite),
            json!(b.validity),
            if aux.is_empty() {
                Value::Null
            } else {
                json!(Value::Object(aux).to_string())
            },
        ]);
        table.push(row);
    }
    table.summary.insert("rows".into(), json!(table.rows.len()));
    Ok(table)
}
