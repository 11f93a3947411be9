//! Elementary inequalities (exponential estimates, harmonic numbers, binomial
//! coefficients, Stirling–Robbins) checked pointwise on grids.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::exact;
use crate::math::{exp, ln, ln_factorial, log1p, CompensatedSum, E, PI};

pub const IDS: [&str; 18] = [
    "one_plus_x",
    "exp_le_inv",
    "exp_neg_le_1_minus_half",
    "exp_quadratic",
    "one_minus_x_pow_y",
    "log_sandwich",
    "pow_sandwich",
    "exp_neg_x_x2",
    "one_minus_inv_r",
    "sbm_sandwich",
    "monotone_r",
    "bernoulli",
    "weierstrass",
    "harmonic",
    "binom_coeff",
    "factorial_bounds",
    "robbins",
    "robbins_const",
];

/// Relative slack for floating-point comparisons.
pub const SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    /// Which inequality of the statement failed.
    pub part: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` (negative for a violation).
    pub margin: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub id: String,
    pub evaluated: usize,
    /// Points outside the statement's domain; not evaluated.
    pub rejected: Vec<Vec<f64>>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Checker<'a> {
    point: &'a [f64],
    out: &'a mut Vec<Violation>,
}

impl Checker<'_> {
    /// Records a violation of `lhs ≤ rhs` beyond the slack.
    fn le(&mut self, part: &str, lhs: f64, rhs: f64) {
        let margin = rhs - lhs;
        if !(margin >= -SLACK * rhs.abs().max(1.0)) {
            self.out.push(Violation { point: self.point.to_vec(), part: part.to_string(), lhs, rhs, margin });
        }
    }

    /// Exact comparison result.
    fn holds(&mut self, part: &str, ok: bool) {
        if !ok {
            self.out.push(Violation {
                point: self.point.to_vec(),
                part: part.to_string(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                margin: f64::NEG_INFINITY,
            });
        }
    }
}

/// `(1 − a)^y` with `0⁰ = 1`, accurate for large `y`.
fn pow1m(a: f64, y: f64) -> f64 {
    if a >= 1.0 {
        if y == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        exp(y * log1p(-a))
    }
}

fn is_nat(x: f64) -> bool {
    x >= 1.0 && x < 9.0e15 && crate::math::floor(x) == x
}

fn in_domain(id: &str, p: &[f64]) -> bool {
    let fin = p.iter().all(|x| x.is_finite());
    if !fin {
        return false;
    }
    let a = |i: usize| p.get(i).copied().unwrap_or(f64::NAN);
    match id {
        "one_plus_x" => p.len() == 1,
        "exp_le_inv" => p.len() == 1 && a(0) < 1.0,
        "exp_neg_le_1_minus_half" => p.len() == 1 && (0.0..=1.0).contains(&a(0)),
        "exp_quadratic" => p.len() == 1 && a(0) < 1.79,
        "one_minus_x_pow_y" => p.len() == 2 && (0.0..=1.0).contains(&a(0)) && a(1) > 0.0,
        "log_sandwich" => p.len() == 1 && a(0) > -1.0,
        "pow_sandwich" => p.len() == 2 && a(0) > 0.0 && a(1) > 0.0,
        "exp_neg_x_x2" => p.len() == 1 && (0.0..=2.0 / 3.0).contains(&a(0)),
        "one_minus_inv_r" => p.len() == 1 && a(0) >= 1.0,
        "sbm_sandwich" => p.len() == 2 && a(0) >= 1.0 && (0.0..=a(0)).contains(&a(1)),
        "monotone_r" => p.len() == 2 && a(0) >= 1.0 && a(0) <= a(1),
        "bernoulli" => p.len() == 2 && a(0) >= -1.0 && (a(1) == 0.0 || a(1) >= 1.0),
        "weierstrass" => !p.is_empty() && p.iter().all(|x| (0.0..=1.0).contains(x)),
        "harmonic" | "robbins" | "robbins_const" | "factorial_bounds" => p.len() == 1 && is_nat(a(0)),
        "binom_coeff" => p.len() == 2 && is_nat(a(0)) && is_nat(a(1)) && a(1) <= a(0),
        _ => false,
    }
}

/// Values of the Weierstrass product inequalities for `p ∈ [0,1]ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassBounds {
    pub product: f64,
    /// `1 − P`
    pub lower: f64,
    /// `1 − P + Σ_{i<j} pᵢpⱼ`
    pub upper_pairwise: f64,
    /// `1 − P + P²/2`
    pub upper_quad: f64,
    /// `∏(1 + pᵢ)`
    pub plus_product: f64,
    /// `1 + P`
    pub plus_lower: f64,
    /// `1/(1 − P)`; `None` when `P ≥ 1`.
    pub upper_plusform: Option<f64>,
    pub plus_valid: bool,
}

pub fn weierstrass_bounds(p: &[f64]) -> WeierstrassBounds {
    let mut big_p = CompensatedSum::new();
    let mut pairs = CompensatedSum::new();
    let mut ln_prod = CompensatedSum::new();
    let mut ln_plus = CompensatedSum::new();
    for &x in p {
        pairs.add(x * big_p.value());
        big_p.add(x);
        ln_prod.add(log1p(-x));
        ln_plus.add(log1p(x));
    }
    let pp = big_p.value();
    let plus_valid = pp < 1.0;
    WeierstrassBounds {
        product: exp(ln_prod.value()),
        lower: 1.0 - pp,
        upper_pairwise: 1.0 - pp + pairs.value(),
        upper_quad: 1.0 - pp + 0.5 * pp * pp,
        plus_product: exp(ln_plus.value()),
        plus_lower: 1.0 + pp,
        upper_plusform: if plus_valid { Some(1.0 / (1.0 - pp)) } else { None },
        plus_valid,
    }
}

/// `ln Rₙ` for `n ∈ [1..max]` where `n! = √(2πn)(n/e)ⁿ Rₙ`.
pub fn ln_robbins_table(max: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(f64::NAN);
    if max == 0 {
        return out;
    }
    let mut acc = CompensatedSum::new();
    acc.add(1.0 - 0.5 * ln(2.0 * PI));
    out.push(acc.value());
    for n in 2..=max {
        // ln Rₙ − ln Rₙ₋₁ = −Σ_{j≥2} (j−1)/(2j(j+1)) n^{−j}
        let inv = 1.0 / n as f64;
        let mut pw = inv;
        let mut inc = CompensatedSum::new();
        for j in 2..400u32 {
            pw *= inv;
            let jf = j as f64;
            let term = (jf - 1.0) / (2.0 * jf * (jf + 1.0)) * pw;
            inc.add(-term);
            if term < 1e-34 {
                break;
            }
        }
        acc.add(inc.value());
        out.push(acc.value());
    }
    out
}

fn ln_robbins_exact(n: u64) -> f64 {
    let f = exact::factorial(n);
    let lf = ln(exact::ratio_to_f64(&f, &BigUint::one()));
    let nf = n as f64;
    lf - 0.5 * ln(2.0 * PI * nf) - nf * ln(nf) + nf
}

/// Evaluates one elementary inequality on `grid`. Unknown ids give `None`.
pub fn elementary_suite(id: &str, grid: &[Vec<f64>]) -> Option<SuiteReport> {
    if !IDS.contains(&id) {
        return None;
    }
    let mut rep = SuiteReport { id: id.to_string(), ..Default::default() };
    let robbins_max = if id == "robbins" {
        grid.iter().filter(|p| in_domain(id, p)).map(|p| p[0] as u64).max().unwrap_or(0)
    } else {
        0
    };
    let table = if robbins_max > 170 { ln_robbins_table(robbins_max) } else { Vec::new() };
    let mut violations = Vec::new();
    for p in grid {
        if !in_domain(id, p) {
            rep.rejected.push(p.clone());
            continue;
        }
        rep.evaluated += 1;
        let mut c = Checker { point: p, out: &mut violations };
        let x = p[0];
        let y = p.get(1).copied().unwrap_or(0.0);
        match id {
            "one_plus_x" => c.le("1+x ≤ e^x", 1.0 + x, exp(x)),
            "exp_le_inv" => c.le("e^x ≤ 1/(1−x)", exp(x), 1.0 / (1.0 - x)),
            "exp_neg_le_1_minus_half" => c.le("e^{−x} ≤ 1 − x/2", exp(-x), 1.0 - x / 2.0),
            "exp_quadratic" => c.le("e^x ≤ 1+x+x²", exp(x), 1.0 + x + x * x),
            "one_minus_x_pow_y" => c.le("(1−x)^y ≤ 1/(1+xy)", pow1m(x, y), 1.0 / (1.0 + x * y)),
            "log_sandwich" => {
                c.le("e^{x/(1+x)} ≤ 1+x", exp(x / (1.0 + x)), 1.0 + x);
                c.le("1+x ≤ e^x", 1.0 + x, exp(x));
            }
            "pow_sandwich" => {
                let mid = exp(y * log1p(x / y));
                c.le("e^{xy/(x+y)} ≤ (1+x/y)^y", exp(x * y / (x + y)), mid);
                c.le("(1+x/y)^y ≤ e^x", mid, exp(x));
            }
            "exp_neg_x_x2" => c.le("e^{−x−x²} ≤ 1−x", exp(-x - x * x), 1.0 - x),
            "one_minus_inv_r" => {
                c.le("(1−1/r)^r ≤ 1/e", pow1m(1.0 / x, x), 1.0 / E);
                c.le("1/e ≤ (1−1/r)^{r−1}", 1.0 / E, pow1m(1.0 / x, x - 1.0));
            }
            "sbm_sandwich" => {
                let (r, s) = (x, y);
                c.le("(1−s/r)^r ≤ e^{−s}", pow1m(s / r, r), exp(-s));
                c.le("e^{−s} ≤ (1−s/r)^{r−s}", exp(-s), pow1m(s / r, r - s));
            }
            "monotone_r" => {
                let (s, r) = (x, y);
                c.le("(1−1/s)^s ≤ (1−1/r)^r", pow1m(1.0 / s, s), pow1m(1.0 / r, r));
                c.le("(1−1/r)^{r−1} ≤ (1−1/s)^{s−1}", pow1m(1.0 / r, r - 1.0), pow1m(1.0 / s, s - 1.0));
            }
            "bernoulli" => c.le("1+rx ≤ (1+x)^r", 1.0 + y * x, pow1m(-x, y)),
            "weierstrass" => {
                let w = weierstrass_bounds(p);
                c.le("1−P ≤ ∏(1−pᵢ)", w.lower, w.product);
                c.le("∏(1−pᵢ) ≤ 1−P+Σpᵢpⱼ", w.product, w.upper_pairwise);
                c.le("1−P+Σpᵢpⱼ ≤ 1−P+P²/2", w.upper_pairwise, w.upper_quad);
                if let Some(u) = w.upper_plusform {
                    c.le("1+P ≤ ∏(1+pᵢ)", w.plus_lower, w.plus_product);
                    c.le("∏(1+pᵢ) ≤ 1/(1−P)", w.plus_product, u);
                }
            }
            "harmonic" => {
                let n = x as u64;
                let h = crate::math::harmonic(n);
                c.le("ln n < Hₙ", ln(x), h);
                c.le("Hₙ ≤ 1 + ln n", h, 1.0 + ln(x));
                if n >= 2 {
                    // (Hₙ − ln n) − (Hₙ₋₁ − ln(n−1)) = 1/n + ln(1 − 1/n)
                    c.le("Hₙ − ln n decreasing", 1.0 / x + log1p(-1.0 / x), 0.0);
                }
            }
            "binom_coeff" => {
                let (n, k) = (x as u64, y as u64);
                let cnk = exact::binomial(n, k);
                let two_n = BigUint::one() << n as usize;
                let nk = BigUint::from(n).pow(k as u32);
                let kk = BigUint::from(k).pow(k as u32);
                c.holds("C(n,k) ≤ 2ⁿ", cnk <= two_n);
                c.holds("(n/k)^k ≤ C(n,k)", nk <= &cnk * &kk);
                c.holds("C(n,k) ≤ n^k", cnk <= nk);
                c.holds("C(n,k) ≤ n^k/k!", &cnk * exact::factorial(k) <= nk);
                let kf = k as f64;
                c.le("n^k/k! ≤ (ne/k)^k", kf * ln(x) - ln_factorial(k), kf * (ln(x) + 1.0 - ln(kf)));
                let mid = exact::binomial(n, n / 2);
                c.holds("C(n,k) ≤ C(n,⌊n/2⌋)", cnk <= mid);
                c.holds("C(n,⌊n/2⌋) ≤ 2ⁿ√(2/n)", &mid * &mid * BigUint::from(n) <= BigUint::one() << (2 * n as usize + 1));
            }
            "factorial_bounds" => {
                let k = x as u64;
                if k <= 500 {
                    c.holds("k! ≤ k^k", exact::factorial(k) <= BigUint::from(k).pow(k as u32));
                } else {
                    c.le("k! ≤ k^k", ln_factorial(k), x * ln(x));
                }
                c.le("(k/e)^k ≤ k!", x * ln(x) - x, ln_factorial(k));
            }
            "robbins" => {
                let n = x as u64;
                let lr = if n <= 170 { ln_robbins_exact(n) } else { table[n as usize] };
                c.le("e^{1/(12n+1)} < Rₙ", 1.0 / (12.0 * x + 1.0), lr);
                c.le("Rₙ < e^{1/(12n)}", lr, 1.0 / (12.0 * x));
                c.le("1 < e^{1/(12n+1)}", 0.0, 1.0 / (12.0 * x + 1.0));
            }
            "robbins_const" => {
                c.le("e^{1/(12n)} ≤ e^{1/12}", exp(1.0 / (12.0 * x)), exp(1.0 / 12.0));
                c.holds("e^{1/12} < 1.08690405", exp(1.0 / 12.0) < 1.08690405);
            }
            _ => unreachable!(),
        }
    }
    rep.violations = violations;
    Some(rep)
}

fn lin(a: f64, b: f64, k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |i| a + (b - a) * i as f64 / (k - 1) as f64)
}

/// A dense grid (≥ 10⁴ points) inside the stated domain of `id`.
pub fn default_grid(id: &str) -> Vec<Vec<f64>> {
    let one = |a: f64, b: f64| lin(a, b, 20_001).map(|x| vec![x]).collect::<Vec<_>>();
    let two = |xs: Vec<f64>, ys: Vec<f64>| {
        let mut v = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                v.push(vec![x, y]);
            }
        }
        v
    };
    let nat = |max: u64| (1..=max).map(|n| vec![n as f64]).collect::<Vec<_>>();
    match id {
        "one_plus_x" => one(-50.0, 50.0),
        "exp_le_inv" => lin(-30.0, 1.0 - 1e-9, 20_001).map(|x| vec![x]).collect(),
        "exp_neg_le_1_minus_half" => one(0.0, 1.0),
        "exp_quadratic" => lin(-30.0, 1.79 - 1e-12, 20_001).map(|x| vec![x]).collect(),
        "one_minus_x_pow_y" => two(lin(0.0, 1.0, 101).collect(), lin(1e-3, 100.0, 201).collect()),
        "log_sandwich" => lin(-1.0 + 1e-9, 50.0, 20_001).map(|x| vec![x]).collect(),
        "pow_sandwich" => two(lin(1e-3, 40.0, 101).collect(), lin(1e-3, 100.0, 201).collect()),
        "exp_neg_x_x2" => one(0.0, 2.0 / 3.0),
        "one_minus_inv_r" => one(1.0, 1e4),
        "sbm_sandwich" => {
            let mut v = Vec::new();
            for r in lin(1.0, 200.0, 200) {
                for t in lin(0.0, 1.0, 101) {
                    v.push(vec![r, t * r]);
                }
            }
            v
        }
        "monotone_r" => {
            let mut v = Vec::new();
            for s in lin(1.0, 100.0, 150) {
                for t in lin(0.0, 1.0, 101) {
                    v.push(vec![s, s + t * (1000.0 - s)]);
                }
            }
            v
        }
        "bernoulli" => {
            let mut rs: Vec<f64> = vec![0.0];
            rs.extend(lin(1.0, 50.0, 140));
            two(lin(-1.0, 3.0, 101).collect(), rs)
        }
        "weierstrass" => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            let mut v = Vec::with_capacity(12_000);
            for i in 0..12_000usize {
                let len = 1 + i % 12;
                let scale = [1.0, 0.5, 0.1, 0.02][i % 4];
                v.push((0..len).map(|_| rng.random::<f64>() * scale).collect());
            }
            v
        }
        "harmonic" | "robbins" | "robbins_const" | "factorial_bounds" => nat(10_000),
        "binom_coeff" => {
            let mut v = Vec::new();
            for n in 1..=150u64 {
                for k in 1..=n {
                    v.push(vec![n as f64, k as f64]);
                }
            }
            v
        }
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_plus_x_equality_at_zero() {
        let r = elementary_suite("one_plus_x", &[vec![0.0]]).unwrap();
        assert_eq!(r.evaluated, 1);
        assert!(r.passed());
    }

    #[test]
    fn robbins_ten() {
        let r = elementary_suite("robbins", &[vec![10.0]]).unwrap();
        assert!(r.passed());
        let exact = 3628800.0f64;
        let base = (20.0 * PI).sqrt() * (10.0 / E).powi(10);
        assert!(base * (1.0f64 / 121.0).exp() < exact && exact < base * (1.0f64 / 120.0).exp());
    }

    #[test]
    fn robbins_series_matches_exact() {
        let t = ln_robbins_table(170);
        for n in [1u64, 2, 5, 50, 170] {
            assert!((t[n as usize] - ln_robbins_exact(n)).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn robbins_const() {
        let r = elementary_suite("robbins_const", &[vec![1.0]]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn domain_rejection() {
        let r = elementary_suite("exp_quadratic", &[vec![1.8], vec![1.0]]).unwrap();
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.evaluated, 1);
        let r = elementary_suite("exp_neg_x_x2", &[vec![0.7]]).unwrap();
        assert_eq!(r.rejected.len(), 1);
        assert!(elementary_suite("nope", &[]).is_none());
    }

    #[test]
    fn detects_false_inequality_outside_domain_when_forced() {
        // Just beyond 1.79 the quadratic bound fails; the suite must reject
        // such points rather than report them.
        assert!((1.8f64).exp() > 1.0 + 1.8 + 1.8 * 1.8);
    }

    #[test]
    fn weierstrass_examples() {
        let w = weierstrass_bounds(&[0.0, 0.0]);
        assert_eq!((w.product, w.lower, w.upper_pairwise, w.upper_quad), (1.0, 1.0, 1.0, 1.0));
        let w = weierstrass_bounds(&[0.1, 0.2]);
        assert!((w.product - 0.72).abs() < 1e-15);
        assert!((w.lower - 0.70).abs() < 1e-15);
        assert!((w.upper_pairwise - 0.72).abs() < 1e-15);
        assert!((w.upper_quad - 0.745).abs() < 1e-15);
        let w = weierstrass_bounds(&[0.5, 0.5]);
        assert!(!w.plus_valid && w.upper_plusform.is_none());
        assert!((w.plus_product - 2.25).abs() < 1e-15);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(crate::math::harmonic(1), 1.0);
        assert!((crate::math::harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn grids_are_dense_and_in_domain() {
        for id in IDS {
            let g = default_grid(id);
            assert!(g.len() >= 10_000, "{id}: {}", g.len());
            assert!(g.iter().all(|p| in_domain(id, p)), "{id}");
        }
    }
}
