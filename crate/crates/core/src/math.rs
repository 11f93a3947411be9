//! Scalar helpers on top of `libm` (the crate is `no_std`, so `f64::exp` and
//! friends are unavailable).

pub use libm::{ceil, exp, expm1, fabs, floor, lgamma, log1p, pow, round, sqrt};

/// Natural logarithm.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub const E: f64 = core::f64::consts::E;
pub const PI: f64 = core::f64::consts::PI;
pub const LN_2: f64 = core::f64::consts::LN_2;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if fabs(self.sum) >= fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a sequence.
pub fn sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::new();
    for x in xs {
        s.add(x);
    }
    s.value()
}

/// `x^y` with the convention `0^0 = 1`.
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        pow(x, y)
    }
}

/// `x ln y` with `0 ln 0 = 0`.
#[inline]
pub fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln(y)
    }
}

/// `ln n!`, exact summation below 256 and `lgamma` above.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        let mut s = CompensatedSum::new();
        for k in 2..=n {
            s.add(ln(k as f64));
        }
        return s.value();
    }
    lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`; `-inf` outside `0 ≤ k ≤ n`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `C(n, k)` as a float.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 1000 {
        // Multiplicative form is exact for small results and accurate otherwise.
        let mut c = 1.0f64;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        return round_if_integral(c);
    }
    exp(ln_choose(n, k))
}

fn round_if_integral(c: f64) -> f64 {
    if c < 9.0e15 {
        round(c)
    } else {
        c
    }
}

/// Harmonic number `H_n = Σ_{k=1}^n 1/k`, compensated, summed small terms first.
pub fn harmonic(n: u64) -> f64 {
    let mut s = CompensatedSum::new();
    let mut k = n;
    while k >= 1 {
        s.add(1.0 / k as f64);
        k -= 1;
    }
    s.value()
}

/// `n(1-1/n)^t`-style helper: `(1 - x)^t` computed through `log1p`.
#[inline]
pub fn one_minus_pow(x: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return if x == 1.0 { 0.0 } else { f64::NAN };
    }
    exp(t * log1p(-x))
}

/// Relative-or-absolute closeness used by tests and the harness.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    let scale = fabs(a).max(fabs(b)).max(1.0);
    fabs(a - b) <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_small() {
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn choose_exact_small() {
        assert_eq!(choose(10, 5), 252.0);
        assert_eq!(choose(20, 10), 184756.0);
        assert_eq!(choose(5, 7), 0.0);
    }

    #[test]
    fn ln_factorial_matches_product() {
        let mut p = 1.0f64;
        for n in 1..=170u64 {
            p *= n as f64;
            assert!((ln_factorial(n) - ln(p)).abs() < 1e-12 * ln(p).max(1.0));
        }
        // Continuity across the lgamma switch.
        let a = ln_factorial(255) + ln(256.0);
        assert!((ln_factorial(256) - a).abs() < 1e-10);
    }

    #[test]
    fn conventions() {
        assert_eq!(powf(0.0, 0.0), 1.0);
        assert_eq!(xlny(0.0, 0.0), 0.0);
        assert_eq!(one_minus_pow(1.0, 3.0), 0.0);
    }
}
