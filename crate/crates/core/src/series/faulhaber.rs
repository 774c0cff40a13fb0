//! Exact Bernoulli numbers and Faulhaber power sums.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest exponent accepted by [`faulhaber_sum`].
pub const MAX_FAULHABER_POWER: u32 = 30;

/// Bernoulli numbers `B_0..=B_n` by the Akiyama–Tanigawa recurrence.
///
/// The recurrence yields the `B_1 = +1/2` convention, which is the one under
/// which `Σ_{k=1}^N k^p = 1/(p+1) Σ_j C(p+1, j) B_j N^{p+1-j}`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    out
}

/// `B_{2k}` as `f64` for `k = 0..=20`, cached.
pub(crate) fn even_bernoulli_f64() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        bernoulli_numbers(40)
            .iter()
            .step_by(2)
            .map(|b| b.to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients `c_0..=c_{p+1}` of the Faulhaber polynomial with
/// `Σ_{n=1}^N n^p = Σ_k c_k N^k`.
pub fn faulhaber_coefficients(p: u32) -> Vec<BigRational> {
    let p = p as u64;
    let bern = bernoulli_numbers(p as usize);
    let mut coeffs = vec![BigRational::zero(); p as usize + 2];
    let scale = BigRational::new(BigInt::one(), BigInt::from(p + 1));
    for (j, b) in bern.iter().enumerate() {
        let j = j as u64;
        let term = BigRational::from_integer(binomial(p + 1, j)) * b * &scale;
        coeffs[(p + 1 - j) as usize] += term;
    }
    coeffs
}

/// `Σ_{n=1}^N n^p` evaluated exactly through the Faulhaber polynomial.
pub fn faulhaber_sum(p: u32, n: u64) -> Result<BigUint> {
    if p > MAX_FAULHABER_POWER {
        return Err(Error::Range(format!(
            "power {p} exceeds the exact range p <= {MAX_FAULHABER_POWER}"
        )));
    }
    let coeffs = faulhaber_coefficients(p);
    let x = BigRational::from_integer(BigInt::from(n));
    // Horner
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &x + c;
    }
    if !acc.is_integer() || acc.is_negative() {
        return Err(Error::Numeric(format!(
            "Faulhaber polynomial produced non-integer {acc} for p={p}, N={n}"
        )));
    }
    acc.to_integer()
        .to_biguint()
        .ok_or_else(|| Error::Numeric("negative power sum".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_bernoulli_numbers() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[0], rat(1, 1));
        assert_eq!(b[1], rat(1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat(0, 1));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[12], rat(-691, 2730));
    }

    #[test]
    fn small_sums() {
        assert_eq!(faulhaber_sum(1, 4).unwrap(), BigUint::from(10u32));
        assert_eq!(faulhaber_sum(3, 3).unwrap(), BigUint::from(36u32));
        assert_eq!(faulhaber_sum(0, 7).unwrap(), BigUint::from(7u32));
        assert_eq!(faulhaber_sum(5, 0).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn leading_coefficient_is_reciprocal_degree() {
        for p in 0..12 {
            let c = faulhaber_coefficients(p);
            assert_eq!(c[p as usize + 1], rat(1, p as i64 + 1));
            assert!(c[0].is_zero());
        }
    }

    #[test]
    fn power_above_range_is_rejected() {
        assert!(matches!(faulhaber_sum(31, 3), Err(Error::Range(_))));
        assert!(faulhaber_sum(30, 1000).is_ok());
    }
}
