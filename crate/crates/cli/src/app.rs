//! `bcm app`: the application runs.

use bc_moments::apps::{
    cramer_rate, gc_simulate, lil_simulate, rare_segments, sanov_rate, slln_mdf_report, Argmin, GcConfig, LilConfig,
    MdfReport, RareSegmentConfig, RateFunctionResult, SllnConfig, DEFAULT_TESTED_N, REPORT_COLUMNS,
};
use bc_moments::sde::{dyadic_deltas, strong_error_estimate, SdeProblem, SWEEP_COLUMNS};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{num, opt_num, Table};
use crate::parse::{self, Law};
use crate::{CliError, Outcome};

const DEFAULT_REPS: u64 = 1_000;
const APPS: &str = "gc, slln, cramer, sanov, lil, segments, sde";

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let app = cfg
        .app
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing application name (one of {APPS})")))?;
    match app {
        "gc" => gc(cfg),
        "slln" => slln(cfg).map(Outcome::from),
        "cramer" => cramer(cfg).map(Outcome::from),
        "sanov" => sanov(cfg).map(Outcome::from),
        "lil" => lil(cfg).map(Outcome::from),
        "segments" => segments(cfg).map(Outcome::from),
        "sde" => sde(cfg),
        other => Err(CliError::Usage(format!(
            "unknown application '{other}' (one of {APPS})"
        ))),
    }
}

fn binomial_stderr(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// Report rows, then one `P(O>=k)` row per tail point, with the Markov
/// tail of the theoretical bound where there is one. Entries sharing the
/// same counts share one tail block.
fn report_table(report: &MdfReport) -> Table {
    let mut table = Table::new(&REPORT_COLUMNS);
    for row in report.csv_rows() {
        table.push(row.into_iter().map(|c| cell(&c)).collect());
    }
    let mut last_tail: Option<&Vec<f64>> = None;
    for e in &report.entries {
        if last_tail == Some(&e.tail) {
            continue;
        }
        last_tail = Some(&e.tail);
        for (k, &p) in e.tail.iter().enumerate().skip(1) {
            let theo = e.theoretical.as_ref().and_then(|b| b.tail_bound(k as u64));
            table.push(vec![
                json!(report.application),
                num(e.epsilon),
                json!(format!("P(O>={k})")),
                opt_num(theo),
                num(p),
                num(binomial_stderr(p, report.reps)),
                json!(report.reps),
                json!(report.seed),
            ]);
        }
    }
    for (k, v) in &report.diagnostics {
        table.summary.insert(k.clone(), num(*v));
    }
    table
        .summary
        .insert("violations".into(), json!(report.violations().len()));
    table
}

/// Cells of [`MdfReport::csv_rows`] back as typed values.
fn cell(s: &str) -> Value {
    if s == "NA" {
        return Value::Null;
    }
    match s.parse::<f64>() {
        Ok(x) if s.parse::<u64>().is_ok() => json!(x as u64),
        Ok(x) => num(x),
        Err(_) => json!(s),
    }
}

fn gc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tested_n = match &cfg.tested_n {
        Some(s) => parse::integers(s, "tested-n")?,
        None => DEFAULT_TESTED_N.to_vec(),
    };
    let gc_cfg = GcConfig {
        distribution: parse::distribution(cfg.distribution.as_deref().unwrap_or("uniform"))?,
        eps: cfg.scalar_or("eps", Some(0.2))?,
        eta: cfg.scalar_or("eta", Some(0.1))?,
        n_max: cfg.n_max.unwrap_or(2_000),
        reps: cfg.reps_or(DEFAULT_REPS)?,
        seed: cfg.seed,
        tested_n,
    };
    let r = gc_simulate(&gc_cfg)?;
    let mut table = report_table(&r.report);
    for c in &r.checks {
        table.push(vec![
            json!("gc"),
            num(gc_cfg.eps),
            json!(format!("P(D_n>=eps) n={}", c.n)),
            num(c.bound),
            num(c.empirical),
            num(c.stderr),
            json!(gc_cfg.reps),
            json!(gc_cfg.seed),
        ]);
    }
    let failed = r.checks.iter().filter(|c| !c.holds()).count();
    table.summary.insert("cell_check_failures".into(), json!(failed));
    let passed = failed == 0 && r.report.violations().is_empty();
    Ok(Outcome { table, passed })
}

fn slln(cfg: &RunConfig) -> Result<Table, CliError> {
    let q = cfg.scalar_or("q", Some(4.0))?;
    if !(q >= 2.0 && q.fract() == 0.0 && q <= 64.0) {
        return Err(CliError::Usage(format!("--q must be an integer in 2..=64, got {q}")));
    }
    let s = SllnConfig {
        sampler: parse::sampler(cfg.sampler.as_deref().unwrap_or("rademacher"))?,
        q: q as u32,
        p: cfg.scalar_or("p", Some(1.0))?,
        eps: cfg.scalar_or("eps", Some(0.2))?,
        n_max: cfg.n_max.unwrap_or(1_000),
        reps: cfg.reps_or(DEFAULT_REPS)?,
        seed: cfg.seed,
    };
    Ok(report_table(&slln_mdf_report(&s)?))
}

fn argmin_value(a: &Argmin) -> Value {
    match a {
        Argmin::Point(x) => num(*x),
        Argmin::Distribution(v) => json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")),
    }
}

fn rate_row(r: &RateFunctionResult) -> [Value; 3] {
    [num(r.rate), argmin_value(&r.argmin), json!(r.method)]
}

fn cramer(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.law.clone().unwrap_or_else(|| "gaussian:1".into());
    let law = Law::parse(&spec)?;
    let eps = cfg.eps.clone().map_or(vec![1.0], |g| g.0);
    let mut table = Table::new(&["law", "mean", "eps", "rate", "argmin", "method"]);
    for e in eps {
        let r = cramer_rate(&|l| law.log_mgf(l), law.mean(), e)?;
        let mut row = vec![json!(spec), num(law.mean()), num(e)];
        row.extend(rate_row(&r));
        table.push(row);
    }
    Ok(table)
}

fn sanov(cfg: &RunConfig) -> Result<Table, CliError> {
    let mu_spec = cfg.mu.clone().unwrap_or_else(|| "0.5,0.5".into());
    let mu = parse::reals(&mu_spec, "mu")?;
    let symbol = cfg.symbol.unwrap_or(0);
    let ts = cfg.t.clone().ok_or_else(|| CliError::Usage("missing --t".into()))?.0;
    let mut table = Table::new(&["mu", "symbol", "t", "rate", "argmin", "method"]);
    for t in ts {
        let r = sanov_rate(&mu, symbol as usize, t)?;
        let mut row = vec![json!(mu_spec), json!(symbol), num(t)];
        row.extend(rate_row(&r));
        table.push(row);
    }
    Ok(table)
}

fn lil(cfg: &RunConfig) -> Result<Table, CliError> {
    let l = LilConfig {
        alpha: cfg.scalar_or("alpha", Some(2.0))?,
        n_max: cfg.n_max.unwrap_or(40),
        reps: cfg.reps_or(DEFAULT_REPS)?,
        seed: cfg.seed,
    };
    Ok(report_table(&lil_simulate(&l)?))
}

fn segments(cfg: &RunConfig) -> Result<Table, CliError> {
    let s = RareSegmentConfig {
        p_head: cfg.scalar_or("p_head", Some(0.5))?,
        threshold: cfg.scalar_or("threshold", Some(0.75))?,
        eps: cfg.scalar_or("eps", Some(0.1))?,
        n_max: cfg.n_max.unwrap_or(10_000),
        reps: cfg.reps_or(DEFAULT_REPS)?,
        seed: cfg.seed,
    };
    Ok(report_table(&rare_segments(&s)?))
}

fn sde(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (lo, hi) = parse::sweep(cfg.sweep.as_deref().unwrap_or("dyadic:4..9"))?;
    let problem = SdeProblem::gbm(
        cfg.scalar_or("drift", Some(0.5))?,
        cfg.scalar_or("vol", Some(0.1))?,
        cfg.scalar_or("x0", Some(1.0))?,
        cfg.scalar_or("horizon", Some(1.0))?,
    )?;
    let reps = cfg.reps_or(10_000)?;
    let r = strong_error_estimate(&problem, &dyadic_deltas(lo, hi), reps, cfg.seed)?;
    let mut table = Table::new(&SWEEP_COLUMNS);
    for p in &r.points {
        table.push(vec![num(p.delta), num(p.mean_abs_error), num(p.stderr), json!(p.reps)]);
    }
    table.summary.insert("slope".into(), num(r.slope));
    table.summary.insert("slope_stderr".into(), num(r.slope_stderr));
    table.summary.insert("intercept".into(), num(r.intercept));
    table.summary.insert("monotone".into(), json!(r.is_monotone()));
    table.summary.insert("problem".into(), json!(problem.label));
    Ok(table.into())
}
