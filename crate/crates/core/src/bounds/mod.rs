//! Moment and tail bounds for the overlap count, and exact small-instance oracles.

mod exact;
mod independent;
mod moments;
mod tails;

pub use exact::{sn_exact_distribution, ExactOverlapDistribution};
pub use independent::{
    freedman_exp_bound, freedman_tail_bound, improved_exp_bound, integer_tail_exp_bound, rate_aware_exp_bound,
    second_moment_bound, threshold_index, FreedmanTail,
};
pub use moments::{
    clamped_weighted_sum, exp_moment_bound, general_moment_bound, nested_moment_identity, poly_moment_bound,
};
pub use tails::{geometric_tail_bound, powerlaw_tail_asymptotic, LambertTail, QuadraticTail};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Identifier of each bound formula, as used on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaId {
    NestedIdentity,
    GeneralMoment,
    PolynomialMoment,
    ExponentialMoment,
    SecondMoment,
    UniversalExponential,
    UniversalTail,
    ImprovedExponential,
    RateAwareExponential,
    PowerLawTail,
    GeometricTail,
    MdfFirstOrder,
    MdfPolynomial,
    MdfExponential,
    LdpMdf,
    VcDeviation,
    SchemeMdf,
}

impl FormulaId {
    pub const ALL: [FormulaId; 17] = [
        Self::NestedIdentity,
        Self::GeneralMoment,
        Self::PolynomialMoment,
        Self::ExponentialMoment,
        Self::SecondMoment,
        Self::UniversalExponential,
        Self::UniversalTail,
        Self::ImprovedExponential,
        Self::RateAwareExponential,
        Self::PowerLawTail,
        Self::GeometricTail,
        Self::MdfFirstOrder,
        Self::MdfPolynomial,
        Self::MdfExponential,
        Self::LdpMdf,
        Self::VcDeviation,
        Self::SchemeMdf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NestedIdentity => "prop2.1",
            Self::GeneralMoment => "thm2.2",
            Self::PolynomialMoment => "cor2.3.poly",
            Self::ExponentialMoment => "cor2.3.exp",
            Self::SecondMoment => "lem2.6",
            Self::UniversalExponential => "thm2.7",
            Self::UniversalTail => "freedman.tail",
            Self::ImprovedExponential => "thm2.9",
            Self::RateAwareExponential => "cor2.10",
            Self::PowerLawTail => "ex2.12.tail",
            Self::GeometricTail => "ex2.13.tail",
            Self::MdfFirstOrder => "cor3.2",
            Self::MdfPolynomial => "cor3.4",
            Self::MdfExponential => "cor3.5",
            Self::LdpMdf => "thm3.16",
            Self::VcDeviation => "vc.bound",
            Self::SchemeMdf => "sde.mdf",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown formula id '{s}'")))
    }
}

impl Serialize for FormulaId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// How a moment bound turns into a tail bound `P(O ≥ k)` by Markov's inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRule {
    /// `P(O ≥ k) ≤ value / k^order`.
    Power { order: f64 },
    /// `P(O ≥ k) ≤ value · e^{-rate·k}`.
    Exponential { rate: f64 },
}

/// A computed bound with its validity domain and an echo of its inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub formula: FormulaId,
    pub value: f64,
    pub infinite: bool,
    pub validity: String,
    pub inputs: BTreeMap<String, String>,
    pub minimizer: Option<f64>,
    pub truncation_error: f64,
    pub tail_rule: Option<TailRule>,
    pub auxiliary: BTreeMap<String, f64>,
}

impl BoundResult {
    pub fn new(formula: FormulaId, value: f64, validity: impl Into<String>) -> Self {
        Self {
            formula,
            value,
            infinite: value.is_infinite(),
            validity: validity.into(),
            inputs: BTreeMap::new(),
            minimizer: None,
            truncation_error: 0.0,
            tail_rule: None,
            auxiliary: BTreeMap::new(),
        }
    }

    /// A structurally valid bound whose series diverges.
    pub fn infinite(formula: FormulaId, reason: impl Into<String>) -> Self {
        Self::new(formula, f64::INFINITY, reason)
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn aux(mut self, key: &str, value: f64) -> Self {
        self.auxiliary.insert(key.to_string(), value);
        self
    }

    pub fn with_minimizer(mut self, x: f64) -> Self {
        self.minimizer = Some(x);
        self
    }

    pub fn with_truncation_error(mut self, err: f64) -> Self {
        self.truncation_error = err;
        self
    }

    pub fn with_tail_rule(mut self, rule: TailRule) -> Self {
        self.tail_rule = Some(rule);
        self
    }

    /// Certified upper end `value + truncation_error`.
    pub fn upper(&self) -> f64 {
        self.value + self.truncation_error
    }

    /// Markov tail bound `P(O ≥ k)`, capped at 1.
    pub fn tail_bound(&self, k: u64) -> Option<f64> {
        let v = self.upper();
        let raw = match self.tail_rule? {
            TailRule::Power { order } => v / (k as f64).powf(order),
            TailRule::Exponential { rate } => v * (-rate * k as f64).exp(),
        };
        Some(raw.min(1.0))
    }
}

/// Maps a divergence error to an infinite result when `allow` is set.
pub fn allow_divergent(result: Result<BoundResult>, formula: FormulaId, allow: bool) -> Result<BoundResult> {
    match result {
        Err(Error::Divergent(reason)) if allow => Ok(BoundResult::infinite(formula, reason)),
        other => other,
    }
}
