//! Event-family specifications and truncation control.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::series::DecayModel;

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;
const MAX_TRUNCATION: u64 = 50_000_000;

/// How the events `E_1..E_N` depend on each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Independent indicators `{U_n < p_n}`.
    Independent,
    /// Comonotone events `{U < p_n}` driven by one uniform: every event is a
    /// level set of the same variable, the most overlapping family.
    Nested,
    /// The nested majorant with `P(Ẽ_n) = min(1, C_n)`, coupled so its count
    /// dominates the independent count path by path.
    UnionDominated,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Independent => "independent",
            Self::Nested => "nested",
            Self::UnionDominated => "union_dominated",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Self::Independent),
            "nested" | "identical" => Ok(Self::Nested),
            "union_dominated" | "union" => Ok(Self::UnionDominated),
            _ => Err(Error::Input(format!(
                "unknown family '{s}' (expected independent, nested or union_dominated)"
            ))),
        }
    }
}

/// A simulable family: dependence structure, decay model and truncation `N`.
#[derive(Debug, Clone)]
pub struct EventFamilySpec {
    pub kind: FamilyKind,
    pub model: DecayModel,
    pub truncation: u64,
    pub tail_tolerance: f64,
}

impl EventFamilySpec {
    /// Chooses the smallest admissible truncation for `tail_tolerance`.
    pub fn new(kind: FamilyKind, model: DecayModel, tail_tolerance: f64) -> Result<Self> {
        let truncation = choose_truncation(&model, tail_tolerance)?.max(1);
        Self::with_truncation(kind, model, truncation, tail_tolerance)
    }

    /// Uses the given truncation after checking `C_{N+1} ≤ tail_tolerance`.
    pub fn with_truncation(kind: FamilyKind, model: DecayModel, truncation: u64, tail_tolerance: f64) -> Result<Self> {
        model.validate()?;
        if truncation == 0 {
            return Err(Error::Truncation("truncation N must be >= 1".into()));
        }
        let tail = model.tail_sum(truncation + 1)?.upper();
        if tail > tail_tolerance {
            return Err(Error::Truncation(format!(
                "C_(N+1) = {tail:e} exceeds the tail tolerance {tail_tolerance:e} at N = {truncation}"
            )));
        }
        if kind == FamilyKind::Nested {
            let mut prev = 1.0;
            for n in 1..=truncation {
                let p = model.probability(n)?;
                if p > prev {
                    return domain(format!(
                        "a nested family needs nonincreasing probabilities, but P(E_{n}) > P(E_{})",
                        n - 1
                    ));
                }
                prev = p;
            }
        }
        Ok(Self {
            kind,
            model,
            truncation,
            tail_tolerance,
        })
    }

    /// Extends the truncation until `e^{rN}·C_{N+1} ≤ tail_tolerance`, needed
    /// before estimating `E[e^{rO}]` from truncated counts.
    pub fn for_exponential(mut self, r: f64) -> Result<Self> {
        let ok = |n: u64| -> Result<bool> {
            Ok((r * n as f64).exp() * self.model.tail_sum(n + 1)?.upper() <= self.tail_tolerance)
        };
        let mut n = self.truncation;
        while !ok(n)? {
            n += 1;
            if n > MAX_TRUNCATION || (r * n as f64).exp().is_infinite() {
                return Err(Error::Truncation(format!(
                    "no truncation makes e^(rN)·C_(N+1) <= {} for r = {r}",
                    self.tail_tolerance
                )));
            }
        }
        self.truncation = n;
        Ok(self)
    }

    /// Clamped probabilities `p_1..p_N`.
    pub fn probabilities(&self) -> Vec<f64> {
        (1..=self.truncation)
            .map(|n| self.model.probability(n).unwrap_or(0.0))
            .collect()
    }
}

/// Smallest `N` with `C_{N+1} + error ≤ tail_tolerance`.
pub fn choose_truncation(model: &DecayModel, tail_tolerance: f64) -> Result<u64> {
    model.validate()?;
    if !(tail_tolerance >= 0.0) {
        return domain(format!("tail tolerance must be >= 0, got {tail_tolerance}"));
    }
    if !model.is_summable() {
        return Err(Error::Divergent(format!(
            "{model} is not summable; no finite truncation exists"
        )));
    }
    let fits = |n: u64| -> Result<bool> { Ok(model.tail_sum(n + 1)?.upper() <= tail_tolerance) };
    if let Some(len) = model.support_len() {
        if fits(0)? {
            return Ok(0);
        }
        // C_{N+1} is nonincreasing: bisect on 1..=len
        let (mut lo, mut hi) = (0u64, len);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(hi);
    }
    if fits(0)? {
        return Ok(0);
    }
    let mut hi = 1u64;
    while !fits(hi)? {
        hi *= 2;
        if hi > MAX_TRUNCATION {
            return Err(Error::Truncation(format!(
                "tail tolerance {tail_tolerance:e} needs more than {MAX_TRUNCATION} events"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
