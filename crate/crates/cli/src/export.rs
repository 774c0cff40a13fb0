//! `bcm export`: raw overlap counts, one row per replication.

use bc_moments::mc::{simulate_overlap, EventFamilySpec, FamilyKind, DEFAULT_TAIL_TOLERANCE};
use serde_json::json;

use crate::bound::decay;
use crate::config::RunConfig;
use crate::output::{num, Table};
use crate::CliError;

const DEFAULT_REPS: u64 = 1_000;

pub fn run(cfg: &RunConfig) -> Result<Table, CliError> {
    let kind = match cfg.family.as_deref() {
        Some(f) => f.parse::<FamilyKind>()?,
        None => FamilyKind::Independent,
    };
    let model = decay(cfg)?;
    let tol = cfg.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE);
    let mut spec = EventFamilySpec::new(kind, model, tol)?;
    if cfg.r.is_some() {
        spec = spec.for_exponential(cfg.scalar("r")?)?;
    }
    let sample = simulate_overlap(&spec, cfg.reps_or(DEFAULT_REPS)?, cfg.seed)?;

    let mut table = Table::new(&["rep", "count"]);
    for (i, c) in sample.counts.iter().enumerate() {
        table.push(vec![json!(i), json!(c)]);
    }
    table.summary.insert("family".into(), json!(sample.family.as_str()));
    table.summary.insert("decay".into(), json!(sample.decay));
    table.summary.insert("truncation".into(), json!(sample.truncation));
    table
        .summary
        .insert("tail_tolerance".into(), num(sample.tail_tolerance));
    table.summary.insert("seed".into(), json!(sample.seed));
    Ok(table)
}
