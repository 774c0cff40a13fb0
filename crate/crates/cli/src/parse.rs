//! Parsers for the string-valued parameters.

use bc_moments::apps::{GcDistribution, SllnSampler};
use bc_moments::series::{TailFunction, WeightSequence};

use crate::CliError;

fn split_spec(s: &str, what: &str) -> Result<(String, Vec<f64>), CliError> {
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let nums = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("'{t}' is not a number in {what} '{s}'")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok((kind.trim().to_ascii_lowercase(), nums))
}

fn unknown(what: &str, s: &str, expected: &str) -> CliError {
    CliError::Usage(format!("unrecognised {what} '{s}' (expected {expected})"))
}

/// `monomial:p` or `exponential:r`.
pub fn weights(s: &str) -> Result<WeightSequence, CliError> {
    match split_spec(s, "weights")? {
        (k, v) if k == "monomial" && v.len() == 1 => Ok(WeightSequence::monomial(v[0])?),
        (k, v) if (k == "exponential" || k == "exp") && v.len() == 1 => Ok(WeightSequence::exponential(v[0])?),
        _ => Err(unknown("weights", s, "monomial:p or exponential:r")),
    }
}

/// `powerlaw:c,p` (`L(m) = c/m^p`) or `geometric:c,b` (`L(m) = c·b^m`).
pub fn tail(s: &str) -> Result<TailFunction, CliError> {
    match split_spec(s, "tail")? {
        (k, v) if k == "powerlaw" && v.len() == 2 => Ok(TailFunction::power(v[0], v[1])?),
        (k, v) if k == "geometric" && v.len() == 2 => Ok(TailFunction::geometric(v[0], v[1])?),
        _ => Err(unknown("tail", s, "powerlaw:c,p or geometric:c,b")),
    }
}

/// A law with a closed-form log moment generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Gaussian { sd: f64 },
    Rademacher,
    Bernoulli { p: f64 },
    Poisson { lambda: f64 },
    Exponential { rate: f64 },
}

impl Law {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let law = match split_spec(s, "law")? {
            (k, v) if k == "gaussian" && v.is_empty() => Self::Gaussian { sd: 1.0 },
            (k, v) if k == "gaussian" && v.len() == 1 => Self::Gaussian { sd: v[0] },
            (k, v) if k == "rademacher" && v.is_empty() => Self::Rademacher,
            (k, v) if k == "bernoulli" && v.len() == 1 => Self::Bernoulli { p: v[0] },
            (k, v) if k == "poisson" && v.len() == 1 => Self::Poisson { lambda: v[0] },
            (k, v) if k == "exponential" && v.len() == 1 => Self::Exponential { rate: v[0] },
            _ => {
                return Err(unknown(
                    "law",
                    s,
                    "gaussian[:sd], rademacher, bernoulli:p, poisson:lambda or exponential:rate",
                ))
            }
        };
        let ok = match law {
            Self::Gaussian { sd } => sd > 0.0,
            Self::Rademacher => true,
            Self::Bernoulli { p } => p > 0.0 && p < 1.0,
            Self::Poisson { lambda } => lambda > 0.0,
            Self::Exponential { rate } => rate > 0.0,
        };
        if ok && law_params_finite(&law) {
            Ok(law)
        } else {
            Err(CliError::Lib(bc_moments::Error::Domain(format!(
                "invalid parameters in law '{s}'"
            ))))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Gaussian { .. } | Self::Rademacher => 0.0,
            Self::Bernoulli { p } => p,
            Self::Poisson { lambda } => lambda,
            Self::Exponential { rate } => 1.0 / rate,
        }
    }

    /// `Λ(λ) = ln E[e^{λX}]`, `+∞` outside its domain.
    pub fn log_mgf(&self, l: f64) -> f64 {
        match *self {
            Self::Gaussian { sd } => 0.5 * sd * sd * l * l,
            Self::Rademacher => l.abs() + (-2.0 * l.abs()).exp().ln_1p() - std::f64::consts::LN_2,
            Self::Bernoulli { p } => (p * l.exp_m1()).ln_1p(),
            Self::Poisson { lambda } => lambda * l.exp_m1(),
            Self::Exponential { rate } => {
                if l < rate {
                    -(-l / rate).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

fn law_params_finite(law: &Law) -> bool {
    match *law {
        Law::Gaussian { sd } => sd.is_finite(),
        Law::Rademacher => true,
        Law::Bernoulli { p } => p.is_finite(),
        Law::Poisson { lambda } => lambda.is_finite(),
        Law::Exponential { rate } => rate.is_finite(),
    }
}

/// Comma-separated reals.
pub fn reals(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("'{t}' is not a number in {what} '{s}'")))
        })
        .collect()
}

/// Comma-separated nonnegative integers.
pub fn integers(s: &str, what: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("'{t}' is not an integer in {what} '{s}'")))
        })
        .collect()
}

pub fn distribution(s: &str) -> Result<GcDistribution, CliError> {
    match split_spec(s, "distribution")? {
        (k, v) if k == "uniform" && v.is_empty() => Ok(GcDistribution::Uniform),
        (k, v) if k == "exponential" && v.len() == 1 => Ok(GcDistribution::Exponential { rate: v[0] }),
        _ => Err(unknown("distribution", s, "uniform or exponential:rate")),
    }
}

pub fn sampler(s: &str) -> Result<SllnSampler, CliError> {
    match split_spec(s, "sampler")? {
        (k, v) if k == "rademacher" && v.is_empty() => Ok(SllnSampler::Rademacher),
        (k, v) if k == "gaussian" && v.is_empty() => Ok(SllnSampler::Gaussian { sd: 1.0 }),
        (k, v) if k == "gaussian" && v.len() == 1 => Ok(SllnSampler::Gaussian { sd: v[0] }),
        (k, v) if k == "uniform" && v.len() == 1 => Ok(SllnSampler::Uniform { half_width: v[0] }),
        _ => Err(unknown("sampler", s, "rademacher, gaussian[:sd] or uniform:h")),
    }
}

/// `dyadic:lo..hi`, the step sizes `2^-lo, …, 2^-hi`.
pub fn sweep(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || unknown("sweep", s, "dyadic:lo..hi, e.g. dyadic:4..10");
    let rest = s.trim().strip_prefix("dyadic:").ok_or_else(bad)?;
    let (lo, hi) = rest.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi || hi > 24 {
        return Err(CliError::Usage(format!("sweep '{s}' needs lo <= hi <= 24")));
    }
    Ok((lo, hi))
}
