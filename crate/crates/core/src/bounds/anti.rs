//! Anti-concentration: guaranteed deviation probabilities and point caps.
//! All results except `point_cap` are lower bounds on a probability.

use alloc::string::ToString;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event};
use crate::math::{floor, sqrt, PI};

pub const ANCHOR_FAIR: &str = "anti-concentration, fair coins";
pub const ANCHOR_GENERAL: &str = "anti-concentration, poisson-binomial";
pub const ANCHOR_FEIGE: &str = "feige inequality";
pub const ANCHOR_EXCEED: &str = "binomial exceeds its expectation";

/// `Bin(n, ½)` deviates by `½√E[X]` in the chosen direction with probability
/// at least 1/8.
pub fn sqrtn12(n: u64, p: f64, upper: bool) -> BoundResult {
    let mu = n as f64 * p;
    let d = 0.5 * sqrt(mu.max(0.0));
    let (id, ev) = if upper {
        ("anti.sqrtn12_upper", Event::Ge { t: mu + d })
    } else {
        ("anti.sqrtn12_lower", Event::Le { t: mu - d })
    };
    let mut e = Eval::new(id, ANCHOR_FAIR).lower().event(ev);
    e.require(n >= 1, "need n ≥ 1");
    e.require(p == 0.5, "needs p = 1/2");
    let raw = if e.ok() { 0.125 } else { f64::NAN };
    e.finish(raw)
}

/// The existence statement with unspecified constants `c, C`: valid only
/// when the caller supplies both, and even then not certified.
pub fn general_sqrt(mean: f64, var: f64, v0: f64, c: Option<f64>, big_c: Option<f64>, upper: bool) -> BoundResult {
    let sd = sqrt(var.max(0.0));
    let cc = c.unwrap_or(f64::NAN);
    let ev = if upper { Event::Ge { t: mean + cc * sd } } else { Event::Le { t: mean - cc * sd } };
    let mut e = Eval::new("anti.general_sqrt", ANCHOR_GENERAL).lower().event(ev);
    e.check("v0", v0, |x| x > 0.0, "> 0");
    e.require(var >= v0, "needs Var[X] ≥ v0");
    e.require(c.is_some() && big_c.is_some(), "constants c, C are not explicit; supply both to evaluate");
    if let (Some(c), Some(k)) = (c, big_c) {
        e.check("c", c, |x| x > 0.0, "> 0");
        e.check("C", k, |x| x > 0.0 && x <= 1.0, "in (0,1]");
    }
    e.note("caller-supplied constants are not certified");
    let raw = if e.ok() { big_c.unwrap() } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[X = k] ≤ 2/√Var[X]` for Poisson-binomial `X` with `Var[X] ≥ 1`, for
/// every `k` (event recorded as the maximal point mass unless `k` is given).
pub fn point_cap(var: f64, k: Option<f64>) -> BoundResult {
    let ev = match k {
        Some(k) => Event::Eq { k },
        None => Event::Described { text: "max_k Pr[X = k]".to_string() },
    };
    let mut e = Eval::new("anti.point_cap", ANCHOR_GENERAL).event(ev);
    e.check("var", var, |x| x >= 1.0, "≥ 1");
    let raw = if e.ok() { 2.0 / sqrt(var) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[X ≤ E[X] + δ] ≥ min{1/13, δ/(δ+1)}` for independent non-negative
/// summands with means at most 1.
pub fn feige(mean: f64, delta: f64, max_mu_i: f64) -> BoundResult {
    let mut e = Eval::new("anti.feige", ANCHOR_FEIGE).lower().event(Event::Le { t: mean + delta });
    e.check("delta", delta, |x| x >= 0.0, "≥ 0");
    e.check("max_mu_i", max_mu_i, |x| (0.0..=1.0).contains(&x), "in [0,1]");
    let raw = if e.ok() { (1.0 / 13.0f64).min(delta / (delta + 1.0)) } else { f64::NAN };
    e.finish(raw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exceed {
    A,
    B,
    C,
    D,
    E,
}

impl Exceed {
    pub const ALL: [Exceed; 5] = [Exceed::A, Exceed::B, Exceed::C, Exceed::D, Exceed::E];

    pub fn name(self) -> &'static str {
        match self {
            Exceed::A => "a",
            Exceed::B => "b",
            Exceed::C => "c",
            Exceed::D => "d",
            Exceed::E => "e",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    /// Whether the variant's p-range admits `(n, p)`.
    pub fn admits(self, n: u64, p: f64) -> bool {
        let nf = n as f64;
        match self {
            Exceed::A => p > 1.0 / nf && p <= 1.0,
            Exceed::B => p >= 0.29 / nf && p < 1.0,
            Exceed::C => p >= 1.0 / nf && p <= 1.0 - 1.0 / nf,
            Exceed::D => p >= 1.0 / nf && p < 1.0,
            Exceed::E => p >= 1.0 / nf && p < 1.0 - 1.0 / nf,
        }
    }
}

/// Lower bounds on `Bin(n, p)` reaching or exceeding its mean.
pub fn exceed_mean(n: u64, p: f64, v: Exceed) -> BoundResult {
    let nf = n as f64;
    let mu = nf * p;
    let ev = match v {
        Exceed::A | Exceed::C => Event::Ge { t: mu },
        Exceed::B | Exceed::D => Event::Gt { t: mu },
        Exceed::E => Event::Gt { t: mu + 1.0 },
    };
    let mut e = Eval::new(alloc::format!("anti.exceed_{}", v.name()), ANCHOR_EXCEED).lower().event(ev);
    e.require(n >= 1, "need n ≥ 1");
    e.require(v.admits(n, p), "p outside the admissible range for this variant");
    let raw = if !e.ok() {
        f64::NAN
    } else {
        match v {
            Exceed::A | Exceed::B => 0.25,
            Exceed::C => {
                let s = sqrt(mu * (1.0 - p));
                s / ((sqrt(mu * (1.0 - p) + 1.0) + 1.0) * 2.0 * sqrt(2.0))
            }
            Exceed::D => {
                let k = floor(mu);
                0.5 - sqrt(nf / (2.0 * PI * k * (nf - k)))
            }
            Exceed::E => 0.037,
        }
    };
    e.finish(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::pmf_binomial;

    #[test]
    fn fair_coin_example() {
        let r = sqrtn12(4, 0.5, true);
        assert_eq!(r.value, 0.125);
        let d = pmf_binomial(4, 0.5).unwrap();
        let (lo, _) = r.event.as_ref().unwrap().prob_interval(&d).unwrap();
        assert!((lo - 5.0 / 16.0).abs() < 1e-15);
        assert!(!sqrtn12(4, 0.4, true).valid);
    }

    #[test]
    fn feige_zero() {
        assert_eq!(feige(3.0, 0.0, 1.0).value, 0.0);
        assert!((feige(3.0, 100.0, 1.0).value - 1.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn point_cap_example() {
        let r = point_cap(1.0, None);
        assert!(r.valid);
        assert_eq!(r.raw, 2.0);
        assert_eq!(r.value, 1.0);
        assert!(pmf_binomial(4, 0.5).unwrap().max_mass() <= r.value);
        assert!(!point_cap(0.5, None).valid);
    }

    #[test]
    fn general_needs_constants() {
        assert!(!general_sqrt(5.0, 2.0, 1.0, None, None, true).valid);
        assert!(general_sqrt(5.0, 2.0, 1.0, Some(0.1), Some(0.01), true).valid);
    }

    #[test]
    fn exceed_ranges() {
        assert!(!exceed_mean(10, 0.1, Exceed::A).valid);
        assert!(exceed_mean(10, 0.1, Exceed::C).valid);
        assert!(!exceed_mean(10, 0.95, Exceed::E).valid);
        for v in Exceed::ALL {
            let r = exceed_mean(30, 0.3, v);
            let d = pmf_binomial(30, 0.3).unwrap();
            let (lo, _) = r.event.as_ref().unwrap().prob_interval(&d).unwrap();
            assert!(r.value <= lo, "{v:?}");
        }
    }
}
