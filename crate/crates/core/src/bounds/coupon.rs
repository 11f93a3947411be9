//! Coupon collector time `Tₙ = Σ_{k=0}^{n−1} Geom((n−k)/n)`.

use serde::{Deserialize, Serialize};

use super::geometric::{geom_sum_bound, GeomVariant};
use super::{BoundResult, Eval, Event};
use crate::dist::GeomSumSpec;
use crate::math::{exp, harmonic, ln, PI};
use crate::query::TailQuery;

pub const ANCHOR: &str = "coupon collector";

/// Which coupon-collector tail statement to evaluate; `eps` is ε ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CouponTail {
    /// `Pr[T ≥ n ln n + εn] ≤ e^{−ε}`
    Upper { eps: f64 },
    /// `Pr[T ≥ (1+ε) n ln n] ≤ n^{−ε}`
    UpperMult { eps: f64 },
    /// `Pr[T ≤ (n−1) ln n − ε(n−1)] ≤ exp(−e^ε)`
    Lower { eps: f64 },
    /// `Pr[T ≤ (1−ε)(n−1) ln n] ≤ exp(−n^ε)`
    LowerMult { eps: f64 },
    /// `Pr[T ≥ λ nHₙ] ≤ 1/λ`, λ ≥ 1
    Markov { lambda: f64 },
    /// `Pr[|T − nHₙ| ≥ εn] ≤ π²/(6ε²)`, ε ≥ 6/π²
    Chebyshev { eps: f64 },
    /// `Pr[T ≥ nHₙ + εn]` via the variance-sensitive geometric bound
    WittUpper { eps: f64 },
    /// `Pr[T ≤ nHₙ − εn]` via the variance-sensitive geometric bound
    WittLower { eps: f64 },
    /// `Pr[T > t] ≤ n(1 − 1/n)^t`
    Union { t: f64 },
}

impl CouponTail {
    pub fn id(&self) -> &'static str {
        match self {
            CouponTail::Upper { .. } => "coupon.upper",
            CouponTail::UpperMult { .. } => "coupon.upper.mult",
            CouponTail::Lower { .. } => "coupon.lower",
            CouponTail::LowerMult { .. } => "coupon.lower.mult",
            CouponTail::Markov { .. } => "coupon.markov",
            CouponTail::Chebyshev { .. } => "coupon.chebyshev",
            CouponTail::WittUpper { .. } => "coupon.witt_upper",
            CouponTail::WittLower { .. } => "coupon.witt_lower",
            CouponTail::Union { .. } => "coupon.union",
        }
    }
}

/// `E[Tₙ] = nHₙ`.
pub fn coupon_expectation(n: u64) -> f64 {
    n as f64 * harmonic(n)
}

/// Returns `(nHₙ, bound)`.
pub fn coupon_bounds(n: u64, tail: CouponTail) -> (f64, BoundResult) {
    let ex = coupon_expectation(n);
    let nf = n as f64;
    let lnn = if n == 0 { 0.0 } else { ln(nf) };
    let mut e = Eval::new(tail.id(), ANCHOR);
    e.require(n >= 1, "need n ≥ 1");
    if n == 0 {
        return (0.0, e.finish(f64::NAN));
    }
    let raw = match tail {
        CouponTail::Upper { eps } => {
            e.set_event(Event::Ge { t: nf * lnn + eps * nf });
            e.check("eps", eps, |x| x >= 0.0, "≥ 0");
            exp(-eps)
        }
        CouponTail::UpperMult { eps } => {
            e.set_event(Event::Ge { t: (1.0 + eps) * nf * lnn });
            e.check("eps", eps, |x| x >= 0.0, "≥ 0");
            exp(-eps * lnn)
        }
        CouponTail::Lower { eps } => {
            e.set_event(Event::Le { t: (nf - 1.0) * lnn - eps * (nf - 1.0) });
            e.check("eps", eps, |x| x >= 0.0, "≥ 0");
            exp(-exp(eps))
        }
        CouponTail::LowerMult { eps } => {
            e.set_event(Event::Le { t: (1.0 - eps) * (nf - 1.0) * lnn });
            e.check("eps", eps, |x| x >= 0.0, "≥ 0");
            exp(-exp(eps * lnn))
        }
        CouponTail::Markov { lambda } => {
            e.set_event(Event::Ge { t: lambda * ex });
            e.check("lambda", lambda, |x| x >= 1.0, "≥ 1");
            1.0 / lambda
        }
        CouponTail::Chebyshev { eps } => {
            e.set_event(Event::AbsDevGe { center: ex, lambda: eps * nf });
            e.check("eps", eps, |x| x >= 6.0 / (PI * PI), "≥ 6/π²");
            PI * PI / (6.0 * eps * eps)
        }
        CouponTail::WittUpper { eps } | CouponTail::WittLower { eps } => {
            let upper = matches!(tail, CouponTail::WittUpper { .. });
            let ok = e.check("eps", eps, |x| x >= 0.0, "≥ 0");
            e.set_event(if upper { Event::Ge { t: ex + eps * nf } } else { Event::Le { t: ex - eps * nf } });
            let closed = if upper {
                if eps <= PI * PI / 6.0 {
                    exp(-3.0 * eps * eps / (2.0 * PI * PI))
                } else {
                    exp(-eps / 4.0)
                }
            } else {
                exp(-3.0 * eps * eps / (PI * PI))
            };
            e.extra("closed_form", closed);
            if ok {
                let spec = GeomSumSpec::coupon(n as usize).expect("coupon spec");
                let (q, v) = if upper {
                    (TailQuery::upper_add(spec.mu(), eps * nf), GeomVariant::WittUpper)
                } else {
                    (TailQuery::lower_add(spec.mu(), eps * nf), GeomVariant::WittLower)
                };
                let r = geom_sum_bound(&spec, &q, v);
                e.extra("s", r.extra("s").unwrap_or(f64::NAN));
                r.raw
            } else {
                f64::NAN
            }
        }
        CouponTail::Union { t } => {
            e.set_event(Event::Gt { t });
            e.check("t", t, |x| x >= 0.0, "≥ 0");
            if n == 1 {
                if t >= 1.0 { 0.0 } else { 1.0 }
            } else {
                // T is integer-valued, so T > t is the event T > ⌊t⌋.
                nf * exp(crate::math::floor(t) * crate::math::log1p(-1.0 / nf))
            }
        }
    };
    e.extra("expectation", ex);
    let raw = if e.ok() { raw } else { f64::NAN };
    (ex, e.finish(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::geom_sum_dist;

    #[test]
    fn expectations() {
        assert_eq!(coupon_expectation(1), 1.0);
        let direct: f64 = (0..10).map(|k| 10.0 / (10 - k) as f64).sum();
        assert!((coupon_expectation(10) - direct).abs() < 1e-12);
        assert!((coupon_expectation(10) - 29.28968).abs() < 1e-5);
        assert!((coupon_expectation(20) - 71.95479).abs() < 1e-5);
    }

    #[test]
    fn upper_mult_is_power() {
        let (_, r) = coupon_bounds(10, CouponTail::UpperMult { eps: 2.0 });
        assert!((r.value - 0.01).abs() < 1e-15);
    }

    #[test]
    fn n_one_trivial() {
        for t in [
            CouponTail::Upper { eps: 1.0 },
            CouponTail::UpperMult { eps: 1.0 },
            CouponTail::Lower { eps: 1.0 },
            CouponTail::LowerMult { eps: 1.0 },
        ] {
            let (ex, r) = coupon_bounds(1, t);
            assert_eq!(ex, 1.0);
            assert!(r.valid);
        }
    }

    #[test]
    fn bounds_hold_against_exact_distribution() {
        for n in [2u64, 5, 12, 20] {
            let d = geom_sum_dist(&GeomSumSpec::coupon(n as usize).unwrap(), 1e-14).unwrap();
            for eps in [0.0, 0.5, 1.0, 2.0, 3.0] {
                for t in [
                    CouponTail::Upper { eps },
                    CouponTail::UpperMult { eps },
                    CouponTail::Lower { eps },
                    CouponTail::LowerMult { eps },
                    CouponTail::Markov { lambda: 1.0 + eps },
                    CouponTail::Chebyshev { eps: eps.max(0.7) },
                    CouponTail::WittUpper { eps },
                    CouponTail::WittLower { eps },
                    CouponTail::Union { t: eps * 10.0 },
                ] {
                    let (_, r) = coupon_bounds(n, t);
                    assert!(r.valid, "{t:?}");
                    let (_, hi) = r.event.as_ref().unwrap().prob_interval(&d).unwrap();
                    assert!(r.value + 1e-9 >= hi, "n={n} {t:?}: {} < {hi}", r.value);
                }
            }
        }
    }

    #[test]
    fn witt_wrapper_at_least_closed_form_strength() {
        let (_, r) = coupon_bounds(30, CouponTail::WittUpper { eps: 1.0 });
        assert!(r.value <= r.extra("closed_form").unwrap() + 1e-15);
        let (_, r) = coupon_bounds(30, CouponTail::WittLower { eps: 1.0 });
        assert!(r.value <= r.extra("closed_form").unwrap() + 1e-15);
    }
}
