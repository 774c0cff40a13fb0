//! Longest segments of a coin-tossing walk whose empirical mean reaches a
//! threshold.

use rand::Rng;
use serde::Serialize;

use super::rates::binary_kl;
use super::{MdfEntry, MdfReport};
use crate::error::{domain, Result};
use crate::mc::{empirical_tail, map_replications, moment_of_counts, Functional};

/// Writes `t = m / 2^e` with `m` odd (or zero) and `e ≤ 64`.
fn dyadic(t: f64) -> Result<(i128, u32)> {
    let mut m = t;
    let mut e = 0u32;
    while m.fract() != 0.0 {
        m *= 2.0;
        e += 1;
        if e > 64 {
            return domain(format!("threshold {t} needs more than 64 binary digits"));
        }
    }
    Ok((m as i128, e))
}

/// `R_n = max{ℓ − k : 0 ≤ k < ℓ ≤ n, (S_ℓ − S_k)/(ℓ − k) ≥ t}` (0 if no such
/// segment) for `n = 1..=heads.len()`.
///
/// With `T_j = 2^e S_j − m j` (exact integers for `t = m/2^e`) a segment
/// qualifies iff `T_k ≤ T_ℓ`. For each `ℓ` the earliest such `k` is the first
/// running-minimum record of `T` at or below `T_ℓ`, found by binary search
/// over the strictly decreasing record values.
pub fn longest_rare_segments(heads: &[bool], t: f64) -> Result<Vec<u64>> {
    let (m, e) = dyadic(t)?;
    let scale = 1i128 << e;
    let mut records: Vec<(i128, u64)> = vec![(0, 0)];
    let mut tj = 0i128;
    let mut best = 0u64;
    let mut out = Vec::with_capacity(heads.len());
    for (i, &h) in heads.iter().enumerate() {
        let ell = i as u64 + 1;
        tj += if h { scale - m } else { -m };
        // records are strictly decreasing: find the first with value <= tj
        let idx = records.partition_point(|&(v, _)| v > tj);
        if let Some(&(_, k)) = records.get(idx) {
            best = best.max(ell - k);
        }
        if tj < records.last().map_or(i128::MAX, |r| r.0) {
            records.push((tj, ell));
        }
        out.push(best);
    }
    Ok(out)
}

/// `τ_r = min{n : R_n ≥ r}` for `r = 1..=max R`, from the sequence `R_1, R_2, …`.
pub fn first_occurrence_times(r_seq: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, &r) in r_seq.iter().enumerate() {
        while (out.len() as u64) < r {
            out.push(i as u64 + 1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RareSegmentConfig {
    pub p_head: f64,
    pub threshold: f64,
    pub eps: f64,
    pub n_max: u64,
    pub reps: u64,
    pub seed: u64,
}

const TAIL_POINTS: u64 = 10;

/// Simulates `R_n/ln n` against `1/J` with `J = D(t‖p)`, and the one-sided
/// deviation counts over `2 ≤ n ≤ n_max`:
/// `O⁺ = #{R_n/ln n ≥ 1/(J − ε)}` (none when `ε ≥ J`) and
/// `O⁻ = #{R_n/ln n ≤ 1/(J + ε)}`.
pub fn rare_segments(cfg: &RareSegmentConfig) -> Result<MdfReport> {
    let (p, t) = (cfg.p_head, cfg.threshold);
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p_head must lie in (0, 1), got {p}"));
    }
    if !(t > p) {
        return domain(format!("threshold {t} is not above the mean {p}: the rate is zero"));
    }
    if t > 1.0 {
        return domain(format!("threshold {t} exceeds 1"));
    }
    if !(cfg.eps > 0.0) {
        return domain(format!("eps must be positive, got {}", cfg.eps));
    }
    if cfg.reps == 0 || cfg.n_max < 2 {
        return domain("needs reps >= 1 and n_max >= 2");
    }
    dyadic(t)?;
    let rate = binary_kl(t, p);
    let upper = if cfg.eps < rate {
        1.0 / (rate - cfg.eps)
    } else {
        f64::INFINITY
    };
    let lower = 1.0 / (rate + cfg.eps);
    let runs = map_replications(cfg.reps, cfg.seed, |_, rng| {
        let heads: Vec<bool> = (0..cfg.n_max).map(|_| rng.random::<f64>() < p).collect();
        let r = longest_rare_segments(&heads, t).expect("threshold checked above");
        let (mut plus, mut minus) = (0u64, 0u64);
        for n in 2..=cfg.n_max {
            let ratio = r[n as usize - 1] as f64 / (n as f64).ln();
            if ratio >= upper {
                plus += 1;
            }
            if ratio <= lower {
                minus += 1;
            }
        }
        (plus, minus, r[cfg.n_max as usize - 1])
    });
    let plus: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let minus: Vec<u64> = runs.iter().map(|r| r.1).collect();
    let mut report = MdfReport::new("segments", cfg.reps, cfg.seed);
    for (label, counts) in [("O+", &plus), ("O-", &minus)] {
        report.push(MdfEntry {
            epsilon: cfg.eps,
            order: label.to_string(),
            theoretical: None,
            empirical: moment_of_counts(counts, &Functional::Power(1.0))?,
            tail: empirical_tail(counts, TAIL_POINTS),
        });
    }
    let ln_n = (cfg.n_max as f64).ln();
    let mean_ratio = runs.iter().map(|r| r.2 as f64 / ln_n).sum::<f64>() / cfg.reps as f64;
    report.diagnostics.insert("rate".into(), rate);
    report.diagnostics.insert("limit".into(), 1.0 / rate);
    report.diagnostics.insert("mean_r_over_ln_n".into(), mean_ratio);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::stream_rng;

    fn quadratic(heads: &[bool], t: f64) -> Vec<u64> {
        let s: Vec<u64> = std::iter::once(0)
            .chain(heads.iter().scan(0u64, |acc, &h| {
                *acc += h as u64;
                Some(*acc)
            }))
            .collect();
        (1..=heads.len())
            .map(|n| {
                let mut best = 0;
                for ell in 1..=n {
                    for k in 0..ell {
                        let len = (ell - k) as f64;
                        if (s[ell] - s[k]) as f64 >= t * len && ell - k > best {
                            best = ell - k;
                        }
                    }
                }
                best as u64
            })
            .collect()
    }

    #[test]
    fn scan_matches_quadratic_definition() {
        let mut rng = stream_rng(21, 0);
        for t in [0.5, 0.625, 0.75, 1.0] {
            for len in [1usize, 2, 7, 60, 500] {
                let heads: Vec<bool> = (0..len).map(|_| rng.random::<bool>()).collect();
                assert_eq!(
                    longest_rare_segments(&heads, t).unwrap(),
                    quadratic(&heads, t),
                    "t = {t}"
                );
            }
        }
    }

    #[test]
    fn single_toss() {
        assert_eq!(longest_rare_segments(&[true], 1.0).unwrap(), vec![1]);
        assert_eq!(longest_rare_segments(&[false], 1.0).unwrap(), vec![0]);
    }

    #[test]
    fn all_heads_runs() {
        let heads = [true, true, false, true, true, true, false];
        assert_eq!(longest_rare_segments(&heads, 1.0).unwrap(), vec![1, 2, 2, 2, 2, 3, 3]);
    }

    #[test]
    fn duality_on_sampled_paths() {
        let mut rng = stream_rng(2, 0);
        for _ in 0..10_000 {
            let heads: Vec<bool> = (0..64).map(|_| rng.random::<f64>() < 0.5).collect();
            let r = longest_rare_segments(&heads, 0.75).unwrap();
            let tau = first_occurrence_times(&r);
            assert!(tau.windows(2).all(|w| w[0] <= w[1]));
            for (n, &rn) in r.iter().enumerate() {
                for (ri, &tr) in tau.iter().enumerate() {
                    assert_eq!(rn > ri as u64, tr <= n as u64 + 1);
                }
            }
        }
    }

    #[test]
    fn longest_run_law() {
        let r = rare_segments(&RareSegmentConfig {
            p_head: 0.5,
            threshold: 1.0,
            eps: 0.2,
            n_max: 100_000,
            reps: 200,
            seed: 1,
        })
        .unwrap();
        assert!((r.diagnostics["rate"] - 2f64.ln()).abs() < 1e-15);
        // E[R_n] ≈ log2(n) − 2/3 for fair coins
        let n = 100_000f64;
        let expect = (n.log2() - 2.0 / 3.0) / n.ln();
        assert!(
            (r.diagnostics["mean_r_over_ln_n"] - expect).abs() < 0.05,
            "{:?}",
            r.diagnostics
        );
    }

    #[test]
    fn threshold_at_mean_is_rejected() {
        let cfg = RareSegmentConfig {
            p_head: 0.5,
            threshold: 0.5,
            eps: 0.1,
            n_max: 10,
            reps: 1,
            seed: 0,
        };
        assert!(rare_segments(&cfg).is_err());
    }
}
