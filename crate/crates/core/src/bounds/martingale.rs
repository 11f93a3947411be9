//! Concentration for functions of independent variables and martingales.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event};
use crate::math::{exp, sum};
use crate::query::Direction;

pub const ANCHOR: &str = "bounded differences and martingales";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MartingaleVariant {
    BoundedDiff,
    BoundedCondExp,
    Azuma,
}

impl MartingaleVariant {
    pub const ALL: [MartingaleVariant; 3] =
        [MartingaleVariant::BoundedDiff, MartingaleVariant::BoundedCondExp, MartingaleVariant::Azuma];

    pub fn name(self) -> &'static str {
        match self {
            MartingaleVariant::BoundedDiff => "bounded_diff",
            MartingaleVariant::BoundedCondExp => "bounded_cond_exp",
            MartingaleVariant::Azuma => "azuma",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// One-sided bound on `f(X₁..Xₙ)` deviating from its mean by λ, where `c`
/// are the per-coordinate influences. `azuma` uses the classical martingale
/// constant, a factor 4 weaker in the exponent.
pub fn martingale_bounds(c: &[f64], lambda: f64, variant: MartingaleVariant, dir: Direction, mean: Option<f64>) -> BoundResult {
    let mut e = Eval::new(alloc::format!("martingale.{}", variant.name()), ANCHOR);
    e.require(!c.is_empty(), "need at least one influence bound");
    e.require(c.iter().all(|&x| x > 0.0 && x.is_finite()), "all cᵢ must be > 0");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    if let Some(m) = mean {
        e.set_event(match dir {
            Direction::Upper => Event::Ge { t: m + lambda },
            Direction::Lower => Event::Le { t: m - lambda },
        });
    }
    let c2 = sum(c.iter().map(|x| x * x));
    e.extra("sum_c2", c2);
    let raw = if !e.ok() {
        f64::NAN
    } else {
        match variant {
            MartingaleVariant::BoundedDiff | MartingaleVariant::BoundedCondExp => exp(-2.0 * lambda * lambda / c2),
            MartingaleVariant::Azuma => exp(-lambda * lambda / (2.0 * c2)),
        }
    };
    e.finish(raw)
}

pub fn uniform_influences(n: usize, c: f64) -> Vec<f64> {
    alloc::vec![c; n]
}

/// Probability that a neutral cGA frequency reaches 0 or 1 within `T`
/// iterations: at most `2exp(−K²/(32T))`.
pub fn cga_neutral(k: u64, t: u64) -> BoundResult {
    let mut e = Eval::new("martingale.cga", ANCHOR).event(Event::Described {
        text: "neutral frequency absorbed at 0 or 1 within T iterations".to_string(),
    });
    e.require(k >= 2 && k % 2 == 0, "K must be an even integer ≥ 2");
    e.require(t >= 1, "need T ≥ 1");
    let (kf, tf) = (k as f64, t as f64);
    let raw = if e.ok() { 2.0 * exp(-kf * kf / (32.0 * tf)) } else { f64::NAN };
    e.finish(raw)
}
