//! Exact integer arithmetic for cross-checks: factorials, binomial
//! coefficients and rational binomial / hypergeometric masses.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u64) -> BigUint {
    let mut f = BigUint::one();
    for k in 2..=n {
        f *= k;
    }
    f
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// A non-negative rational `num/den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: BigUint,
    pub den: BigUint,
}

impl Rational {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }
}

/// `num/den` correctly scaled even when both overflow `f64`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = (num.bits() as i64 - den.bits() as i64) - 60;
    let (n, d) = if shift > 0 {
        (num.clone(), den << (shift as usize))
    } else {
        (num << ((-shift) as usize), den.clone())
    };
    let q = (&n / &d).to_f64().unwrap_or(f64::INFINITY);
    libm::ldexp(q, shift as i32)
}

/// Masses of `Bin(n, a/b)` as numerators over the common denominator `bⁿ`.
pub fn binomial_masses(n: u64, a: u64, b: u64) -> (Vec<BigUint>, BigUint) {
    assert!(a <= b && b > 0);
    let den = BigUint::from(b).pow(n as u32);
    let nums = (0..=n)
        .map(|k| binomial(n, k) * BigUint::from(a).pow(k as u32) * BigUint::from(b - a).pow((n - k) as u32))
        .collect();
    (nums, den)
}

/// `Pr[Bin(n, a/b) ≥ k]` exactly.
pub fn binomial_tail_ge(n: u64, a: u64, b: u64, k: u64) -> Rational {
    let (nums, den) = binomial_masses(n, a, b);
    let num = nums.into_iter().skip(k as usize).fold(BigUint::zero(), |s, x| s + x);
    Rational { num, den }
}

/// `Pr[X = k]` for the hypergeometric law with parameters `(N, n, m)`.
pub fn hypergeom_mass(big_n: u64, n: u64, m: u64, k: u64) -> Rational {
    if k > n || k > m || n - k > big_n - m {
        return Rational { num: BigUint::zero(), den: BigUint::one() };
    }
    Rational { num: binomial(m, k) * binomial(big_n - m, n - k), den: binomial(big_n, n) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        assert_eq!(binomial(20, 10), BigUint::from(184_756u32));
        let t = binomial_tail_ge(20, 1, 2, 12);
        assert_eq!(t.num, BigUint::from(263_950u32));
        assert_eq!(t.den, BigUint::from(1_048_576u32));
        let h = hypergeom_mass(4, 2, 2, 1);
        assert!((h.to_f64() - 2.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn huge_ratio_scaled() {
        let f = factorial(200);
        let g = factorial(199);
        assert!((ratio_to_f64(&f, &g) - 200.0).abs() < 1e-12);
        assert_eq!(ratio_to_f64(&BigUint::one(), &BigUint::from(4u8)), 0.25);
    }
}
