//! Replicated simulation of truncated overlap counts `O_N = Σ_{n≤N} 1{E_n}`.
//!
//! Every replication reads its own ChaCha substream. The first `N` uniforms
//! `U_1..U_N` drive the independent indicators `{U_n < p_n}`; the
//! union-dominated family reuses exactly those uniforms, which is what makes
//! its count dominate the independent one path by path.

use std::io::Write;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::family::{EventFamilySpec, FamilyKind};
use super::rng::map_replications;
use crate::error::{domain, Error, Result};

/// Counts from `reps` replications of one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapSample {
    pub family: FamilyKind,
    pub decay: String,
    pub counts: Vec<u64>,
    pub reps: u64,
    pub seed: u64,
    pub truncation: u64,
    pub tail_tolerance: f64,
}

/// Survival `S(n) = P(max{m ≤ N : U_m < p_m} ≥ n) = 1 − Π_{m=n}^{N} (1 − p_m)`,
/// indexed `0..=N+1` with `S(0) = 1` and `S(N+1) = 0`.
fn last_hit_survival(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut s = vec![0.0; n + 2];
    let mut log_miss = 0.0;
    for m in (1..=n).rev() {
        log_miss += (-p[m - 1]).ln_1p();
        s[m] = -log_miss.exp_m1();
    }
    s[0] = 1.0;
    s
}

/// Probabilities `min(1, C_n)` of the nested majorant, `n = 1..=N`.
fn union_probabilities(spec: &EventFamilySpec) -> Result<Vec<f64>> {
    (1..=spec.truncation)
        .map(|n| Ok(spec.model.tail_sum(n)?.value.min(1.0)))
        .collect()
}

fn independent_count(p: &[f64], rng: &mut impl Rng) -> (u64, usize) {
    let mut count = 0;
    let mut last = 0;
    for (i, &pn) in p.iter().enumerate() {
        let u: f64 = rng.random();
        if u < pn {
            count += 1;
            last = i + 1;
        }
    }
    (count, last)
}

/// Simulates `reps` replications of `spec` from `seed`.
///
/// The output depends only on `(spec, reps, seed)`, never on the number of
/// worker threads.
pub fn simulate_overlap(spec: &EventFamilySpec, reps: u64, seed: u64) -> Result<OverlapSample> {
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    let p = spec.probabilities();
    let counts = match spec.kind {
        FamilyKind::Independent => map_replications(reps, seed, |_, rng| independent_count(&p, rng).0),
        FamilyKind::Nested => map_replications(reps, seed, |_, rng| {
            let u: f64 = rng.random();
            p.iter().filter(|&&pn| pn > u).count() as u64
        }),
        FamilyKind::UnionDominated => {
            let q = union_probabilities(spec)?;
            let s = last_hit_survival(&p);
            map_replications(reps, seed, |_, rng| {
                let (_, last) = independent_count(&p, rng);
                // V is uniform given nothing and lands in [S(L+1), S(L)), so
                // {V < S(n)} = {L ≥ n}; the majorant q_n ≥ S(n) only adds hits
                let w: f64 = rng.random();
                let v = s[last + 1] + w * (s[last] - s[last + 1]);
                q.iter().filter(|&&qn| v < qn).count() as u64
            })
        }
    };
    Ok(OverlapSample {
        family: spec.kind,
        decay: spec.model.describe(),
        counts,
        reps,
        seed,
        truncation: spec.truncation,
        tail_tolerance: spec.tail_tolerance,
    })
}

impl OverlapSample {
    /// Writes a header record followed by one `{"rep", "count"}` record per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Input(format!("cannot write samples: {e}"));
        let header = json!({
            "type": "header",
            "family": self.family,
            "decay": self.decay,
            "seed": self.seed,
            "reps": self.reps,
            "truncation": self.truncation,
            "tail_tolerance": self.tail_tolerance,
        });
        writeln!(out, "{header}").map_err(io)?;
        for (rep, count) in self.counts.iter().enumerate() {
            writeln!(out, "{}", json!({ "rep": rep, "count": count })).map_err(io)?;
        }
        Ok(())
    }

    /// Empirical `P(O_N = k)` for `k = 0..=N`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.truncation as usize + 1];
        for &c in &self.counts {
            h[c as usize] += 1;
        }
        h
    }
}
