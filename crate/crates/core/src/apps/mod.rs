//! Mean-deviation-frequency applications: empirical processes, laws of large
//! numbers, large deviations, the iterated logarithm and rare segments.

mod gc;
mod lil;
mod mdf;
mod rates;
mod segments;
mod slln;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::bounds::BoundResult;
use crate::error::{Error, Result};
use crate::mc::EmpiricalMoment;

pub use gc::{gc_simulate, GcCheck, GcConfig, GcDistribution, GcReport, DEFAULT_TESTED_N};
pub use lil::{bridge_max, lil_simulate, LilConfig};
pub use mdf::{
    hoeffding_bound, ldp_mdf_bound, mdf_exponential, mdf_first_order, mdf_polynomial, vc_bound, vc_lambda_series,
};
pub use rates::{
    binary_kl, cramer_rate, kl_divergence, legendre_transform, sanov_rate, Argmin, RateFunctionResult, RateMethod,
};
pub use segments::{first_occurrence_times, longest_rare_segments, rare_segments, RareSegmentConfig};
pub use slln::{slln_mdf_report, slln_partition_bound, strict_partitions, SllnConfig, SllnSampler};

/// One row of a report: the theoretical side (if the bound is explicit)
/// against the Monte Carlo estimate of the same moment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdfEntry {
    pub epsilon: f64,
    /// The moment functional `Λ_ε`, e.g. `exp(0.02*O)`.
    pub order: String,
    pub theoretical: Option<BoundResult>,
    pub empirical: EmpiricalMoment,
    /// Empirical `P(O ≥ k)` for `k = 0, 1, …`.
    pub tail: Vec<f64>,
}

impl MdfEntry {
    /// `empirical ≤ theoretical + 4·stderr`; vacuous without an explicit bound.
    pub fn holds(&self) -> bool {
        match &self.theoretical {
            Some(b) if !b.infinite => self.empirical.estimate <= b.upper() + 4.0 * self.empirical.stderr,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdfReport {
    pub application: String,
    pub epsilon_grid: Vec<f64>,
    pub entries: Vec<MdfEntry>,
    pub reps: u64,
    pub seed: u64,
    /// Application-specific scalars (limits, rates, constants).
    pub diagnostics: BTreeMap<String, f64>,
}

pub const REPORT_COLUMNS: [&str; 8] = [
    "application",
    "epsilon",
    "order",
    "theoretical",
    "empirical",
    "stderr",
    "reps",
    "seed",
];

impl MdfReport {
    pub(crate) fn new(application: &str, reps: u64, seed: u64) -> Self {
        Self {
            application: application.to_string(),
            epsilon_grid: Vec::new(),
            entries: Vec::new(),
            reps,
            seed,
            diagnostics: BTreeMap::new(),
        }
    }

    pub(crate) fn push(&mut self, entry: MdfEntry) {
        if !self.epsilon_grid.contains(&entry.epsilon) {
            self.epsilon_grid.push(entry.epsilon);
        }
        self.entries.push(entry);
    }

    /// Entries whose estimate exceeds the bound by more than 4 standard errors.
    pub fn violations(&self) -> Vec<&MdfEntry> {
        self.entries.iter().filter(|e| !e.holds()).collect()
    }

    /// Rows in [`REPORT_COLUMNS`] order; a missing bound is written as `NA`.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|e| {
                let theo = match &e.theoretical {
                    Some(b) => fmt_f64(b.upper()),
                    None => "NA".to_string(),
                };
                vec![
                    self.application.clone(),
                    fmt_f64(e.epsilon),
                    e.order.clone(),
                    theo,
                    fmt_f64(e.empirical.estimate),
                    fmt_f64(e.empirical.stderr),
                    self.reps.to_string(),
                    self.seed.to_string(),
                ]
            })
            .collect()
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Input(format!("cannot write report: {e}"));
        writeln!(out, "{}", REPORT_COLUMNS.join(",")).map_err(io)?;
        for row in self.csv_rows() {
            writeln!(
                out,
                "{}",
                row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",")
            )
            .map_err(io)?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation; `inf`/`-inf`/`nan` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
