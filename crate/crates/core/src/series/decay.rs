//! Decay models for `P(E_n)` and tail functions `L(m) ≈ Σ_{n≥m} P(E_n)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::zeta::hurwitz_zeta;
use super::SeriesValue;
use crate::error::{domain, Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nonincreasing, invertible tail function `L` with `L(m) = C_m` at integers.
#[derive(Clone)]
pub enum TailFunction {
    /// `L(m) = c / m^p`.
    Power { c: f64, p: f64 },
    /// `L(m) = c · b^m`.
    Geometric { c: f64, b: f64 },
    /// User-supplied pair `(L, L⁻¹)` valid on `domain`.
    Custom {
        label: String,
        eval: RealFn,
        inverse: RealFn,
        domain: (f64, f64),
    },
}

impl TailFunction {
    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && p > 0.0) {
            return domain(format!("power tail needs c > 0 and p > 0, got c={c}, p={p}"));
        }
        Ok(Self::Power { c, p })
    }

    pub fn geometric(c: f64, b: f64) -> Result<Self> {
        if !(c > 0.0 && b > 0.0 && b < 1.0) {
            return domain(format!("geometric tail needs c > 0 and 0 < b < 1, got c={c}, b={b}"));
        }
        Ok(Self::Geometric { c, b })
    }

    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Self {
        Self::Custom {
            label: label.into(),
            eval: Arc::new(eval),
            inverse: Arc::new(inverse),
            domain,
        }
    }

    pub fn evaluate(&self, m: f64) -> f64 {
        match self {
            Self::Power { c, p } => c * m.powf(-p),
            Self::Geometric { c, b } => c * b.powf(m),
            Self::Custom { eval, .. } => eval(m),
        }
    }

    /// `L⁻¹(s)` for `s > 0`.
    pub fn inverse(&self, s: f64) -> f64 {
        match self {
            Self::Power { c, p } => (c / s).powf(1.0 / p),
            Self::Geometric { c, b } => (s / c).ln() / b.ln(),
            Self::Custom { inverse, .. } => inverse(s),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Custom { domain, .. } => *domain,
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Checks monotonicity and `L(L⁻¹(s)) = s` (relative 1e-10) on `points` in the domain.
    pub fn check_consistency(&self, points: &[f64]) -> Result<()> {
        let mut prev: Option<(f64, f64)> = None;
        for &m in points {
            let v = self.evaluate(m);
            if !(v >= 0.0) {
                return Err(Error::Numeric(format!("tail L({m}) = {v} is not a nonnegative real")));
            }
            if let Some((pm, pv)) = prev {
                if m > pm && v > pv * (1.0 + 1e-12) {
                    return Err(Error::Domain(format!(
                        "tail function increases between m={pm} and m={m}"
                    )));
                }
            }
            prev = Some((m, v));
            if v > 0.0 {
                let back = self.evaluate(self.inverse(v));
                if (back - v).abs() > 1e-10 * v {
                    return Err(Error::Numeric(format!("L(L^-1({v})) = {back} differs from {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Power { c, p } => format!("power-tail:{c},{p}"),
            Self::Geometric { c, b } => format!("geometric-tail:{c},{b}"),
            Self::Custom { label, .. } => format!("custom-tail:{label}"),
        }
    }
}

impl fmt::Debug for TailFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// How the event probabilities `P(E_n)`, `n ≥ 1`, decay.
#[derive(Clone, Debug)]
pub enum DecayModel {
    /// `P(E_n) = probabilities[n-1]`; zero beyond the list.
    Explicit(Vec<f64>),
    /// `P(E_n) ≤ c / n^q`.
    PowerLaw { c: f64, q: f64 },
    /// `P(E_n) ≤ c · b^n`; this family also defines `P(E_0) = c`.
    Geometric { c: f64, b: f64 },
    /// Probabilities given through their tail: `P(E_n) = L(n) - L(n+1)`.
    CustomTail(TailFunction),
}

impl DecayModel {
    pub fn explicit(probabilities: Vec<f64>) -> Result<Self> {
        let model = Self::Explicit(probabilities);
        model.validate()?;
        Ok(model)
    }

    pub fn power_law(c: f64, q: f64) -> Result<Self> {
        let model = Self::PowerLaw { c, q };
        model.validate()?;
        Ok(model)
    }

    pub fn geometric(c: f64, b: f64) -> Result<Self> {
        let model = Self::Geometric { c, b };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Explicit(p) => {
                if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                    return domain(format!("probability P(E_{}) = {v} is outside [0, 1]", i + 1));
                }
            }
            Self::PowerLaw { c, q } => {
                if !(*c > 0.0 && *q > 0.0 && c.is_finite() && q.is_finite()) {
                    return domain(format!("power law needs c > 0 and q > 0, got c={c}, q={q}"));
                }
            }
            Self::Geometric { c, b } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return domain(format!("geometric decay needs c > 0, got {c}"));
                }
                if !(*b > 0.0 && *b < 1.0) {
                    return domain(format!("geometric decay needs 0 < b < 1, got {b}"));
                }
            }
            Self::CustomTail(_) => {}
        }
        Ok(())
    }

    /// Unclamped majorant `P(E_n)` as given by the decay formula (`n ≥ 1`).
    pub fn raw(&self, n: u64) -> f64 {
        match self {
            Self::Explicit(p) => p.get((n as usize).wrapping_sub(1)).copied().unwrap_or(0.0),
            Self::PowerLaw { c, q } => c * (n as f64).powf(-q),
            Self::Geometric { c, b } => c * b.powf(n as f64),
            Self::CustomTail(l) => (l.evaluate(n as f64) - l.evaluate(n as f64 + 1.0)).max(0.0),
        }
    }

    /// `P(E_n)` clamped into `[0, 1]`.
    pub fn probability(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return domain("event index must be >= 1 (events are indexed from 1)");
        }
        Ok(self.raw(n).clamp(0.0, 1.0))
    }

    /// Mass assigned to a zeroth event when a series is indexed from 0.
    ///
    /// Only the geometric family defines one (`c · b^0 = c`); for the others
    /// the zeroth event is empty.
    pub fn zeroth_mass(&self) -> f64 {
        match self {
            Self::Geometric { c, .. } => *c,
            _ => 0.0,
        }
    }

    /// Number of events with nonzero probability, if finite.
    pub fn support_len(&self) -> Option<u64> {
        match self {
            Self::Explicit(p) => Some(p.len() as u64),
            _ => None,
        }
    }

    pub fn is_summable(&self) -> bool {
        !matches!(self, Self::PowerLaw { q, .. } if *q <= 1.0)
    }

    /// `C_m = Σ_{n≥m} P(E_n)` using the unclamped formula, `m ≥ 1`.
    pub fn tail_sum(&self, m: u64) -> Result<SeriesValue> {
        self.validate()?;
        if m == 0 {
            return domain("tail index m must be >= 1");
        }
        match self {
            Self::Explicit(p) => {
                let start = (m - 1) as usize;
                let value = p.iter().skip(start).rev().sum();
                Ok(SeriesValue::exact(value, p.len().saturating_sub(start) as u64))
            }
            Self::Geometric { c, b } => Ok(SeriesValue::exact(c * b.powf(m as f64) / (1.0 - b), 0)),
            Self::PowerLaw { c, q } => {
                if *q <= 1.0 {
                    return Err(Error::Divergent(format!(
                        "power-law tail sum requires q > 1, got q = {q}"
                    )));
                }
                Ok(hurwitz_zeta(*q, m)?.scaled(*c))
            }
            Self::CustomTail(l) => Ok(SeriesValue::exact(l.evaluate(m as f64), 0)),
        }
    }

    /// `C_0 = P(E_0) + C_1`, used by series indexed from 0.
    pub fn tail_sum_from_zero(&self) -> Result<SeriesValue> {
        let c1 = self.tail_sum(1)?;
        Ok(SeriesValue {
            value: c1.value + self.zeroth_mass(),
            ..c1
        })
    }

    /// A tail function `L` with `L(m) ≥ C_m` for all integers `m ≥ 1`.
    ///
    /// Power laws use `Σ_{n≥m} n^{-q} ≤ m^{-q} + m^{1-q}/(q-1) ≤ q/(q-1) · m^{1-q}`.
    pub fn tail_majorant(&self) -> Result<TailFunction> {
        match self {
            Self::Geometric { c, b } => TailFunction::geometric(c / (1.0 - b), *b),
            Self::PowerLaw { c, q } => {
                if *q <= 1.0 {
                    return Err(Error::Divergent(format!(
                        "power law with q = {q} <= 1 has no finite tail"
                    )));
                }
                TailFunction::power(c * q / (q - 1.0), q - 1.0)
            }
            Self::CustomTail(l) => Ok(l.clone()),
            Self::Explicit(_) => Err(Error::Input(
                "explicit lists have no invertible tail function; use the integer-tail form".into(),
            )),
        }
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit(p) => {
                let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            Self::PowerLaw { c, q } => write!(f, "powerlaw:{c},{q}"),
            Self::Geometric { c, b } => write!(f, "geometric:{c},{b}"),
            Self::CustomTail(l) => write!(f, "{}", l.describe()),
        }
    }
}

impl FromStr for DecayModel {
    type Err = Error;

    /// Parses `explicit:p1,p2,...`, `powerlaw:c,q` or `geometric:c,b`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("decay spec '{s}' lacks ':' (e.g. powerlaw:1,4)")))?;
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Input(format!("'{t}' is not a number in decay spec '{s}'")))
                })
                .collect::<Result<_>>()?
        };
        match (kind.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("explicit", _) => Self::explicit(nums),
            ("powerlaw", [c, q]) => Self::power_law(*c, *q),
            ("geometric", [c, b]) => Self::geometric(*c, *b),
            _ => Err(Error::Input(format!(
                "unrecognised decay spec '{s}' (expected explicit:…, powerlaw:c,q or geometric:c,b)"
            ))),
        }
    }
}
