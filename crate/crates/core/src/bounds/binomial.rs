//! Tail and point-probability estimates specific to `Bin(n, p)`.

use alloc::format;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event};
use crate::math::{exp, ln, ln_choose, sqrt, xlny, PI};

pub const ANCHOR_TAIL: &str = "binomial tails via the point probability";
pub const ANCHOR_POINT: &str = "binomial point probabilities";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinomialVariant {
    UnionCoeff,
    Klar,
    Feller,
    BollobasUp,
    BollobasLow,
    MaxPmf,
    MaxPmfSharp,
}

impl BinomialVariant {
    pub const ALL: [BinomialVariant; 7] = [
        BinomialVariant::UnionCoeff,
        BinomialVariant::Klar,
        BinomialVariant::Feller,
        BinomialVariant::BollobasUp,
        BinomialVariant::BollobasLow,
        BinomialVariant::MaxPmf,
        BinomialVariant::MaxPmfSharp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinomialVariant::UnionCoeff => "union_coeff",
            BinomialVariant::Klar => "klar",
            BinomialVariant::Feller => "feller",
            BinomialVariant::BollobasUp => "bollobas_up",
            BinomialVariant::BollobasLow => "bollobas_low",
            BinomialVariant::MaxPmf => "max_pmf",
            BinomialVariant::MaxPmfSharp => "max_pmf_sharp",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// `ln Pr[Bin(n,p) = k]` with `0·ln 0 = 0`.
pub fn ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    ln_choose(n, k) + xlny(k as f64, p) + xlny((n - k) as f64, 1.0 - p)
}

pub fn pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    exp(ln_pmf(n, p, k))
}

pub fn binomial_bounds(n: u64, p: f64, k: u64, variant: BinomialVariant) -> BoundResult {
    use BinomialVariant::*;
    let id = format!("binomial.{}", variant.name());
    let nf = n as f64;
    let kf = k as f64;
    let q = 1.0 - p;
    let mut e = match variant {
        UnionCoeff | Klar | Feller => Eval::new(id, ANCHOR_TAIL).event(Event::Ge { t: kf }),
        BollobasLow => Eval::new(id, ANCHOR_POINT).lower().event(Event::Eq { k: kf }),
        _ => Eval::new(id, ANCHOR_POINT).event(Event::Eq { k: kf }),
    };
    e.check("p", p, |x| (0.0..=1.0).contains(&x), "in [0,1]");
    e.require(k <= n, "need k ≤ n");
    if !e.ok() {
        return e.finish(f64::NAN);
    }
    let np = nf * p;
    let point = pmf(n, p, k);
    let raw = match variant {
        UnionCoeff => exp(ln_choose(n, k) + xlny(kf, p)),
        Klar | Feller => {
            e.require(kf >= np * (1.0 - 1e-12), "needs k ∈ [np..n]");
            if !e.ok() {
                f64::NAN
            } else if p >= 1.0 {
                1.0
            } else {
                let factor = if variant == Klar {
                    (kf + 1.0) * q / (kf + 1.0 - (nf + 1.0) * p)
                } else if kf - np <= 0.0 {
                    e.note("k = np: factor is infinite");
                    f64::INFINITY
                } else {
                    (kf - kf * p) / (kf - np)
                };
                e.extra("factor", factor);
                factor * point
            }
        }
        BollobasUp | BollobasLow => {
            let h = kf - np;
            e.require(np >= 1.0, "needs np ≥ 1");
            e.require(h > 0.0, "needs h = k − np > 0");
            e.require(q > 0.0, "needs p < 1");
            if variant == BollobasUp {
                e.require(h * q * nf / 3.0 >= 1.0, "needs hqn/3 ≥ 1");
            } else {
                e.require(k < n, "needs k < n");
            }
            e.extra("h", h);
            if !e.ok() {
                f64::NAN
            } else {
                let pre = -0.5 * ln(2.0 * PI * p * q * nf);
                let base = -h * h / (2.0 * p * q * nf);
                let corr = if variant == BollobasUp {
                    h / (q * nf) + h * h * h / (p * p * nf * nf)
                } else {
                    -h * h * h / (2.0 * q * q * nf * nf)
                        - h * h * h * h / (3.0 * p * p * p * nf * nf * nf)
                        - h / (2.0 * p * nf)
                        - 1.0 / (12.0 * kf)
                        - 1.0 / (12.0 * (nf - kf))
                };
                exp(pre + base + corr)
            }
        }
        MaxPmf => pmf(n, kf / nf.max(1.0), k),
        MaxPmfSharp => {
            e.require(k >= 1 && k < n, "needs k ∈ [1..n−1]");
            sqrt(nf / (kf * (nf - kf))) / sqrt(2.0 * PI)
        }
    };
    e.extra("pmf", point);
    let raw = if e.ok() { raw } else { f64::NAN };
    e.finish(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::pmf_binomial;

    #[test]
    fn union_coeff_edge() {
        let r = binomial_bounds(7, 0.3, 7, BinomialVariant::UnionCoeff);
        assert!((r.value - 0.3f64.powi(7)).abs() < 1e-18);
    }

    #[test]
    fn klar_example() {
        let r = binomial_bounds(10, 0.3, 5, BinomialVariant::Klar);
        assert!((r.extra("factor").unwrap() - 14.0 / 9.0).abs() < 1e-14);
        assert!((r.value - 0.16010).abs() < 5e-5);
        let exact = pmf_binomial(10, 0.3).unwrap().tail_ge(5.0);
        assert!((exact - 0.15027).abs() < 5e-5);
        assert!(r.value >= exact);
    }

    #[test]
    fn klar_rate_one_over_n() {
        let n = 50u64;
        for k in 1..=n {
            let r = binomial_bounds(n, 1.0 / n as f64, k, BinomialVariant::Klar);
            assert!(r.extra("factor").unwrap() <= (k as f64 + 1.0) / k as f64 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn feller_at_mean_clamps() {
        let r = binomial_bounds(10, 0.5, 5, BinomialVariant::Feller);
        assert!(r.valid);
        assert_eq!(r.value, 1.0);
        assert!(!binomial_bounds(10, 0.5, 4, BinomialVariant::Feller).valid);
    }

    #[test]
    fn bollobas_brackets_pmf() {
        let (n, p) = (200u64, 0.3);
        for k in 61..120u64 {
            let exact = pmf(n, p, k);
            let up = binomial_bounds(n, p, k, BinomialVariant::BollobasUp);
            if up.valid {
                assert!(up.value >= exact, "k={k}");
            }
            let lo = binomial_bounds(n, p, k, BinomialVariant::BollobasLow);
            assert!(lo.valid);
            assert!(lo.value <= exact, "k={k}");
        }
    }

    #[test]
    fn max_pmf_variants() {
        for k in 1..20u64 {
            let a = binomial_bounds(20, 0.37, k, BinomialVariant::MaxPmf);
            let b = binomial_bounds(20, 0.37, k, BinomialVariant::MaxPmfSharp);
            assert!(a.value >= pmf(20, 0.37, k));
            assert!(b.value >= a.value * (1.0 - 1e-12));
        }
        assert!(!binomial_bounds(20, 0.37, 0, BinomialVariant::MaxPmfSharp).valid);
    }
}
