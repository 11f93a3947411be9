//! First- and second-moment inequalities.

use super::{BoundResult, Eval, Event};
use crate::math::sqrt;
use crate::query::{Deviation, Direction, Reference, TailQuery};

pub const ANCHOR_MARKOV: &str = "markov inequality";
pub const ANCHOR_CHEBYSHEV: &str = "chebyshev and cantelli inequalities";
pub const ANCHOR_SECOND: &str = "second moment method";

/// `Pr[X ≥ t] ≤ μ/t` for non-negative `X`. A multiplicative query
/// `X ≥ (1+δ)μ` yields `1/(1+δ)`.
pub fn markov(q: &TailQuery) -> BoundResult {
    let mu = q.mu();
    let t = q.threshold();
    let id = if matches!(q.deviation, Deviation::Multiplicative(_)) { "markov.mult" } else { "markov" };
    let mut e = Eval::new(id, ANCHOR_MARKOV).event(Event::Ge { t });
    e.require(q.direction == Direction::Upper, "markov only bounds deviations above the expectation");
    e.require(!matches!(q.reference, Reference::LowerEstimate(_)), "needs the exact mean or an upper estimate");
    e.check("mu", mu, |x| x >= 0.0, "≥ 0 (X non-negative)");
    e.check("t", t, |x| x > 0.0, "> 0");
    let raw = if e.ok() { mu / t } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[X ≥ λ·E[X]] ≤ 1/λ`.
pub fn markov_factor(mu: f64, factor: f64) -> BoundResult {
    let mut e = Eval::new("markov.mult", ANCHOR_MARKOV).event(Event::Ge { t: factor * mu });
    e.check("mu", mu, |x| x >= 0.0, "≥ 0 (X non-negative)");
    e.check("lambda", factor, |x| x > 0.0, "> 0");
    let raw = if e.ok() { 1.0 / factor } else { f64::NAN };
    e.finish(raw)
}

/// For `X ≤ u`: `Pr[X ≤ t] ≤ (u − μ)/(u − t)`.
pub fn reverse_markov(mu: f64, u: f64, t: f64) -> BoundResult {
    let mut e = Eval::new("reverse_markov", ANCHOR_MARKOV).event(Event::Le { t });
    e.require(mu.is_finite() && u.is_finite() && t.is_finite(), "parameters must be finite");
    e.require(t < u, "need t < u");
    e.require(mu <= u, "need μ ≤ u");
    let raw = if e.ok() { (u - mu) / (u - t) } else { f64::NAN };
    e.finish(raw)
}

/// Companion form: `Pr[X > t] ≥ (μ − t)/(u − t)`.
pub fn reverse_markov_gt(mu: f64, u: f64, t: f64) -> BoundResult {
    let mut e = Eval::new("reverse_markov.gt", ANCHOR_MARKOV).lower().event(Event::Gt { t });
    e.require(mu.is_finite() && u.is_finite() && t.is_finite(), "parameters must be finite");
    e.require(t < u, "need t < u");
    e.require(mu <= u, "need μ ≤ u");
    let raw = if e.ok() { (mu - t) / (u - t) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[|X − μ| ≥ λ] ≤ Var/λ²`.
pub fn chebyshev(mu: f64, var: f64, lambda: f64) -> BoundResult {
    let mut e = Eval::new("chebyshev", ANCHOR_CHEBYSHEV).event(Event::AbsDevGe { center: mu, lambda });
    e.check("var", var, |x| x >= 0.0, "≥ 0");
    e.check("lambda", lambda, |x| x > 0.0, "> 0");
    let raw = if e.ok() { var / (lambda * lambda) } else { f64::NAN };
    e.finish(raw)
}

/// One-sided `Pr[X ≥ μ + λσ] ≤ 1/(λ²+1)` (mirrored for the lower tail), λ in
/// units of the standard deviation.
pub fn cantelli(mu: f64, var: f64, lambda: f64, dir: Direction) -> BoundResult {
    let sd = sqrt(var.max(0.0));
    let event = match dir {
        Direction::Upper => Event::Ge { t: mu + lambda * sd },
        Direction::Lower => Event::Le { t: mu - lambda * sd },
    };
    let mut e = Eval::new("cantelli", ANCHOR_CHEBYSHEV).event(event);
    e.check("var", var, |x| x > 0.0, "> 0");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    let raw = if e.ok() { 1.0 / (lambda * lambda + 1.0) } else { f64::NAN };
    e.finish(raw)
}

/// `(Pr[X=0] ≤ Var/μ², Pr[X=0] ≤ Var/E[X²])`; `ex2` defaults to `Var + μ²`.
pub fn second_moment(mu: f64, var: f64, ex2: Option<f64>) -> (BoundResult, BoundResult) {
    let ex2 = ex2.unwrap_or(var + mu * mu);
    let mut a = Eval::new("second_moment.mean", ANCHOR_SECOND).event(Event::Le { t: 0.0 });
    let mut b = Eval::new("second_moment.ex2", ANCHOR_SECOND).event(Event::Eq { k: 0.0 });
    for e in [&mut a, &mut b] {
        e.require(mu.is_finite() && mu != 0.0, "need E[X] ≠ 0");
        e.check("var", var, |x| x >= 0.0, "≥ 0");
    }
    b.require(ex2 >= mu * mu * (1.0 - 1e-12), "need E[X²] ≥ E[X]²");
    let ra = if a.ok() { var / (mu * mu) } else { f64::NAN };
    let rb = if b.ok() { if var == 0.0 { 0.0 } else { var / ex2 } } else { f64::NAN };
    (a.finish(ra), b.finish(rb))
}

/// For a sum of pairwise independent indicators with mean `μ`:
/// `Pr[X > 0] ≥ 1 − 1/μ`.
pub fn second_moment_indicators(mu: f64) -> BoundResult {
    let mut e = Eval::new("second_moment.indicators", ANCHOR_SECOND).lower().event(Event::Gt { t: 0.0 });
    e.check("mu", mu, |x| x > 0.0, "> 0");
    let raw = if e.ok() { 1.0 - 1.0 / mu } else { f64::NAN };
    e.finish(raw)
}
