//! Run configuration: command-line flags layered over an optional JSON file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Jsonl,
}

/// A list of reals given as `x`, `x1,x2,...` or `lo:hi:count` (inclusive, evenly spaced).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = |t: &str| format!("'{t}' is not a number in grid '{s}'");
        if let Some((lo, rest)) = s.split_once(':') {
            let (hi, count) = rest
                .split_once(':')
                .ok_or_else(|| format!("range grid '{s}' must read lo:hi:count"))?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad(lo))?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad(hi))?;
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("grid count '{count}' is not a positive integer"))?;
            return match n {
                0 => Err(format!("grid '{s}' has no points")),
                1 => Ok(Self(vec![lo])),
                _ => Ok(Self(
                    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
                )),
            };
        }
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(t)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(values))
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.as_slice() {
            [x] => s.serialize_f64(*x),
            xs => xs.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::One(x) => Ok(Grid(vec![x])),
            Raw::Many(xs) if xs.is_empty() => Err(de::Error::custom("empty grid")),
            Raw::Many(xs) => Ok(Grid(xs)),
            Raw::Text(t) => Grid::parse(&t).map_err(de::Error::custom),
        }
    }
}

/// Command-line parameters shared by every subcommand. Flags override the
/// values of a `--config` file.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Params {
    /// JSON config file, or an earlier output whose header echoes one
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Worker threads; outputs do not depend on it
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Omit the timestamp from output headers
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub deterministic: bool,
    /// Report a divergent series as an infinite bound instead of failing
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub allow_divergent: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tolerance: Option<f64>,

    /// Decay model: explicit:p1,p2,... | powerlaw:c,q | geometric:c,b
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<String>,
    /// Weights: monomial:p | exponential:r
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    /// Event family: independent | nested | union_dominated
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Tail function: powerlaw:c,p | geometric:c,b
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
    /// Law for the Cramér rate: gaussian:sd | rademacher | bernoulli:p | poisson:lambda | exponential:rate
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    /// Distribution on a finite alphabet, e.g. 0.5,0.5
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    /// Sample law for the empirical-process run: uniform | exponential:rate
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    /// Summand law for running means: rademacher | gaussian:sd | uniform:h
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    /// Step-size sweep: dyadic:lo..hi
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    /// Sample sizes at which deviation probabilities are checked, e.g. 1,10,100
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tested_n: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<u64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc_dim: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_t: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_head: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vol: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// The fully resolved configuration, echoed into every output header.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub app: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default)]
    pub allow_divergent: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tested_n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc_dim: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_t: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_head: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vol: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Grid>,
}

impl RunConfig {
    /// Layers `params` over the config file (if any) for `command`.
    pub fn resolve(command: &str, selector: Option<(&str, Option<String>)>, params: &Params) -> Result<Self, CliError> {
        let mut map = match &params.config {
            Some(path) => load_config_file(path)?,
            None => Map::new(),
        };
        map.remove("timestamp");
        map.insert("command".into(), Value::String(command.into()));
        // a file written by another subcommand may carry the other selector
        for key in ["formula", "app"] {
            if selector.as_ref().map(|s| s.0) != Some(key) {
                map.remove(key);
            }
        }
        if let Some((key, Some(v))) = selector {
            map.insert(key.into(), Value::String(v));
        }
        let flags = serde_json::to_value(params).map_err(|e| CliError::Usage(e.to_string()))?;
        if let Value::Object(flags) = flags {
            for (k, v) in flags {
                map.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(format!("bad configuration: {e}")))
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn grid(&self, name: &str) -> Option<&Grid> {
        match name {
            "r" => self.r.as_ref(),
            "p" => self.p.as_ref(),
            "c1" => self.c1.as_ref(),
            "k" => self.k.as_ref(),
            "c" => self.c.as_ref(),
            "b" => self.b.as_ref(),
            "q" => self.q.as_ref(),
            "eps" => self.eps.as_ref(),
            "eta" => self.eta.as_ref(),
            "ell" => self.ell.as_ref(),
            "vc_dim" => self.vc_dim.as_ref(),
            "rate" => self.rate.as_ref(),
            "k_t" => self.k_t.as_ref(),
            "horizon" => self.horizon.as_ref(),
            "t" => self.t.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "p_head" => self.p_head.as_ref(),
            "threshold" => self.threshold.as_ref(),
            "drift" => self.drift.as_ref(),
            "vol" => self.vol.as_ref(),
            "x0" => self.x0.as_ref(),
            _ => None,
        }
    }

    /// A single-valued parameter, or `default` when absent.
    pub fn scalar_or(&self, name: &str, default: Option<f64>) -> Result<f64, CliError> {
        match self.grid(name) {
            Some(Grid(v)) if v.len() == 1 => Ok(v[0]),
            Some(_) => Err(CliError::Usage(format!("--{} takes a single value here", flag(name)))),
            None => default.ok_or_else(|| CliError::Usage(format!("missing --{}", flag(name)))),
        }
    }

    pub fn scalar(&self, name: &str) -> Result<f64, CliError> {
        self.scalar_or(name, None)
    }

    pub fn reps_or(&self, default: u64) -> Result<u64, CliError> {
        match self.reps.unwrap_or(default) {
            0 => Err(CliError::Usage("--reps must be at least 1".into())),
            n => Ok(n),
        }
    }

    pub fn string(&self, value: &Option<String>, name: &str) -> Result<String, CliError> {
        value
            .clone()
            .ok_or_else(|| CliError::Usage(format!("missing --{}", flag(name))))
    }
}

pub fn flag(name: &str) -> String {
    name.replace('_', "-")
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Jsonl => "jsonl",
        })
    }
}

/// Reads a JSON config object, or the config echoed in an earlier output:
/// a CSV `# config: {...}` line, a JSON report's `config` field, or a JSONL
/// file's leading config record.
pub fn load_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let bad = |why: String| CliError::Usage(format!("config {}: {why}", path.display()));
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix(crate::output::CONFIG_PREFIX)) {
        return match serde_json::from_str(line) {
            Ok(Value::Object(m)) => Ok(m),
            Ok(_) => Err(bad("the echoed config is not an object".into())),
            Err(e) => Err(bad(e.to_string())),
        };
    }
    let value = match serde_json::from_str::<Value>(&text) {
        Ok(v) => v,
        Err(e) => {
            // JSONL output: config record on the first line
            let first = text.lines().next().unwrap_or_default();
            serde_json::from_str::<Value>(first).map_err(|_| bad(e.to_string()))?
        }
    };
    let Value::Object(mut map) = value else {
        return Err(bad("expected a JSON object".into()));
    };
    if let Some(Value::Object(inner)) = map.remove("config") {
        return Ok(inner);
    }
    if map.get("type").and_then(Value::as_str) == Some("config") {
        map.remove("type");
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(Grid::parse("0.5").unwrap().0, vec![0.5]);
        assert_eq!(Grid::parse("1, 2,3").unwrap().0, vec![1.0, 2.0, 3.0]);
        assert_eq!(Grid::parse("0:1:5").unwrap().0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Grid::parse("0:1").is_err());
        assert!(Grid::parse("x").is_err());
        let g: Grid = serde_json::from_str("[0.1, 0.2]").unwrap();
        assert_eq!(g.0, vec![0.1, 0.2]);
        let g: Grid = serde_json::from_str("\"0.1,0.2\"").unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[0.1,0.2]");
        assert_eq!(serde_json::to_string(&Grid(vec![2.0])).unwrap(), "2.0");
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"r": 0.2, "c1": 0.5, "seed": 9, "timestamp": 5}"#).unwrap();
        let params = Params {
            config: Some(path),
            r: Some("0.3".into()),
            ..Params::default()
        };
        let cfg = RunConfig::resolve("bound", Some(("formula", Some("thm2.7".into()))), &params).unwrap();
        assert_eq!(cfg.r, Some(Grid(vec![0.3])));
        assert_eq!(cfg.c1, Some(Grid(vec![0.5])));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.formula.as_deref(), Some("thm2.7"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"colour": 1}"#).unwrap();
        let params = Params {
            config: Some(path),
            ..Params::default()
        };
        assert!(matches!(
            RunConfig::resolve("bound", None, &params),
            Err(CliError::Usage(_))
        ));
    }
}
