//! Chernoff–Hoeffding bounds for sums of independent (or negatively
//! correlated) bounded variables.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event};
use crate::math::{exp, ln, log1p, powf};
use crate::query::{Direction, Reference};

pub const ANCHOR_MULT_UPPER: &str = "multiplicative chernoff, upper tail";
pub const ANCHOR_MULT_LOWER: &str = "multiplicative chernoff, lower tail";
pub const ANCHOR_ADDITIVE: &str = "additive chernoff (hoeffding)";
pub const ANCHOR_VARIANCE: &str = "variance-based chernoff (bernstein)";

/// Variants of the upper multiplicative bound, from strongest to weakest
/// (`eA`, `eB` and `two_pow` are convenient relaxations of `strong`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultUpper {
    #[serde(rename = "strongest")]
    Strongest,
    #[serde(rename = "strong")]
    Strong,
    #[serde(rename = "lin1")]
    Lin1,
    #[serde(rename = "lin2")]
    Lin2,
    #[serde(rename = "easy")]
    Easy,
    #[serde(rename = "eA")]
    EA,
    #[serde(rename = "eB")]
    EB,
    #[serde(rename = "two_pow")]
    TwoPow,
}

impl MultUpper {
    pub const ALL: [MultUpper; 8] = [
        MultUpper::Strongest,
        MultUpper::Strong,
        MultUpper::Lin1,
        MultUpper::Lin2,
        MultUpper::Easy,
        MultUpper::EA,
        MultUpper::EB,
        MultUpper::TwoPow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MultUpper::Strongest => "strongest",
            MultUpper::Strong => "strong",
            MultUpper::Lin1 => "lin1",
            MultUpper::Lin2 => "lin2",
            MultUpper::Easy => "easy",
            MultUpper::EA => "eA",
            MultUpper::EB => "eB",
            MultUpper::TwoPow => "two_pow",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultLower {
    Strongest,
    Strong,
    Easy,
}

impl MultLower {
    pub const ALL: [MultLower; 3] = [MultLower::Strongest, MultLower::Strong, MultLower::Easy];

    pub fn name(self) -> &'static str {
        match self {
            MultLower::Strongest => "strongest",
            MultLower::Strong => "strong",
            MultLower::Easy => "easy",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

const EDGE_TOL: f64 = 1e-12;

/// `(μ/t)^t ((n−μ)/(n−t))^{n−t}` for `μ ≤ t`: 1 at `t ≤ μ`, `(μ/n)ⁿ` at the
/// edge `t = n` and 0 beyond it.
pub fn strongest_upper_at(mu: f64, n: f64, t: f64) -> f64 {
    if t <= mu {
        return 1.0;
    }
    if t > n * (1.0 + EDGE_TOL) {
        return 0.0;
    }
    if (t - n).abs() <= EDGE_TOL * n {
        return powf(mu / n, n);
    }
    let a = t * ln(mu / t);
    let b = (n - t) * log1p((t - mu) / (n - t));
    exp(a + b)
}

/// Lower-tail analogue for `t ≤ μ`; `(1 − μ/n)ⁿ` at `t = 0`.
pub fn strongest_lower_at(mu: f64, n: f64, t: f64) -> f64 {
    if t >= mu {
        return 1.0;
    }
    if t < 0.0 {
        return 0.0;
    }
    let a = if t == 0.0 { 0.0 } else { t * ln(mu / t) };
    let b = if n - t <= 0.0 { 0.0 } else { (n - t) * log1p(-(mu - t) / (n - t)) };
    exp(a + b)
}

/// Raw (unclamped) value of an upper multiplicative variant; `n` is only used
/// by `strongest`.
pub fn mult_upper_raw(mu: f64, n: f64, delta: f64, v: MultUpper) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    match v {
        MultUpper::Strongest => strongest_upper_at(mu, n, (1.0 + delta) * mu),
        MultUpper::Strong => exp(-mu * ((1.0 + delta) * log1p(delta) - delta)),
        MultUpper::Lin1 => exp(-delta * delta * mu / (2.0 + 2.0 * delta / 3.0)),
        MultUpper::Lin2 => exp(-(delta * delta).min(delta) * mu / 3.0),
        MultUpper::Easy => exp(-delta * delta * mu / 3.0),
        MultUpper::EA => exp((1.0 + delta) * mu * (1.0 - log1p(delta))),
        MultUpper::EB => exp(delta * mu * (1.0 - ln(delta))),
        MultUpper::TwoPow => exp(-(1.0 + delta) * mu * core::f64::consts::LN_2),
    }
}

pub fn mult_lower_raw(mu: f64, n: f64, delta: f64, v: MultLower) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    match v {
        MultLower::Strongest => strongest_lower_at(mu, n, (1.0 - delta) * mu),
        MultLower::Strong => {
            if delta >= 1.0 {
                exp(-mu)
            } else {
                exp(-mu * (delta + (1.0 - delta) * log1p(-delta)))
            }
        }
        MultLower::Easy => exp(-delta * delta * mu / 2.0),
    }
}

fn check_reference(e: &mut Eval, r: Reference, dir: Direction) {
    match (dir, r) {
        (_, Reference::Exact(_)) => {}
        (Direction::Upper, Reference::UpperEstimate(_)) => {
            e.note("μ is an upper estimate μ⁺; event measured from (1+δ)μ⁺")
        }
        (Direction::Lower, Reference::LowerEstimate(_)) => {
            e.note("μ is a lower estimate μ⁻; event measured from (1−δ)μ⁻")
        }
        (Direction::Upper, _) => {
            e.require(false, "upper tail needs the exact expectation or an upper estimate μ⁺");
        }
        (Direction::Lower, _) => {
            e.require(false, "lower tail needs the exact expectation or a lower estimate μ⁻");
        }
    }
}

/// `Pr[X ≥ (1+δ)μ]` for `X` a sum of `n` independent `[0,1]` variables.
pub fn chernoff_mult_upper(mu: Reference, n: Option<u64>, delta: f64, variant: MultUpper) -> BoundResult {
    let m = mu.mu();
    let mut e = Eval::new(format!("chernoff.mult.upper.{}", variant.name()), ANCHOR_MULT_UPPER)
        .event(Event::Ge { t: (1.0 + delta) * m });
    check_reference(&mut e, mu, Direction::Upper);
    e.check("mu", m, |x| x >= 0.0, "≥ 0");
    e.check("delta", delta, |x| x >= 0.0, "≥ 0");
    let nf = n.map(|n| n as f64).unwrap_or(f64::INFINITY);
    match variant {
        MultUpper::Strongest => {
            if e.require(n.is_some(), "strongest form needs the number of variables n") {
                e.require(m <= nf * (1.0 + EDGE_TOL), "need μ ≤ n");
            }
        }
        MultUpper::Easy => {
            e.require(delta <= 1.0, "easy form needs δ ≤ 1");
        }
        MultUpper::TwoPow => {
            let k = (1.0 + delta) * m;
            e.extra("k", k);
            e.require(
                k >= 2.0 * crate::math::E * m * (1.0 - EDGE_TOL),
                "2^{-k} form needs k ≥ 2e·μ",
            );
        }
        _ => {}
    }
    if let Some(n) = n {
        if (1.0 + delta) * m > n as f64 {
            e.note("threshold exceeds n: event impossible");
        }
    }
    let raw = if e.ok() { mult_upper_raw(m, nf, delta, variant) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[X ≥ k] ≤ 2^{-k}` for `k ≥ 2eμ`.
pub fn chernoff_two_pow(mu: Reference, k: f64) -> BoundResult {
    let m = mu.mu();
    let delta = if m > 0.0 { k / m - 1.0 } else { f64::INFINITY };
    let mut e = Eval::new("chernoff.mult.upper.two_pow", ANCHOR_MULT_UPPER).event(Event::Ge { t: k });
    check_reference(&mut e, mu, Direction::Upper);
    e.check("mu", m, |x| x >= 0.0, "≥ 0");
    e.check("k", k, |x| x >= 0.0, "≥ 0");
    e.require(k >= 2.0 * crate::math::E * m * (1.0 - EDGE_TOL), "2^{-k} form needs k ≥ 2e·μ");
    e.extra("k", k);
    if delta.is_infinite() {
        e.note("μ = 0");
    }
    let raw = if e.ok() { exp(-k * core::f64::consts::LN_2) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[X ≤ (1−δ)μ]`, `δ ∈ [0,1]`.
pub fn chernoff_mult_lower(mu: Reference, n: Option<u64>, delta: f64, variant: MultLower) -> BoundResult {
    let m = mu.mu();
    let mut e = Eval::new(format!("chernoff.mult.lower.{}", variant.name()), ANCHOR_MULT_LOWER)
        .event(Event::Le { t: (1.0 - delta) * m });
    check_reference(&mut e, mu, Direction::Lower);
    e.check("mu", m, |x| x >= 0.0, "≥ 0");
    e.check("delta", delta, |x| (0.0..=1.0).contains(&x), "in [0,1]");
    let nf = n.map(|n| n as f64).unwrap_or(f64::INFINITY);
    if variant == MultLower::Strongest && e.require(n.is_some(), "strongest form needs the number of variables n") {
        e.require(m <= nf * (1.0 + EDGE_TOL), "need μ ≤ n");
    }
    let raw = if e.ok() { mult_lower_raw(m, nf.min(f64::MAX), delta, variant) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[|X − μ| ≥ δμ] ≤ 2exp(−δ²μ/3)`, `δ ∈ [0,1]`.
pub fn chernoff_two_sided(mu: f64, delta: f64) -> BoundResult {
    let mut e = Eval::new("chernoff.mult.two_sided", ANCHOR_MULT_UPPER)
        .event(Event::AbsDevGe { center: mu, lambda: delta * mu });
    e.check("mu", mu, |x| x >= 0.0, "≥ 0");
    e.check("delta", delta, |x| (0.0..=1.0).contains(&x), "in [0,1]");
    let raw = if e.ok() { 2.0 * exp(-delta * delta * mu / 3.0) } else { f64::NAN };
    e.finish(raw)
}

/// The multiplicative bounds restated with an additive deviation λ:
/// `Pr[X ≥ μ + λ]` (upper) / `Pr[X ≤ μ − λ]` (lower). Only the forms listed
/// for the additive statement are accepted.
pub fn chernoff_mult_additive(mu: Reference, n: Option<u64>, lambda: f64, dir: Direction, variant: &str) -> BoundResult {
    let m = mu.mu();
    let id = match dir {
        Direction::Upper => format!("chernoff.add.upper.{variant}"),
        Direction::Lower => format!("chernoff.add.lower.{variant}"),
    };
    let anchor = match dir {
        Direction::Upper => ANCHOR_MULT_UPPER,
        Direction::Lower => ANCHOR_MULT_LOWER,
    };
    let event = match dir {
        Direction::Upper => Event::Ge { t: m + lambda },
        Direction::Lower => Event::Le { t: m - lambda },
    };
    let mut e = Eval::new(id, anchor).event(event);
    check_reference(&mut e, mu, dir);
    e.check("mu", m, |x| x >= 0.0, "≥ 0");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    let nf = n.map(|n| n as f64).unwrap_or(f64::INFINITY);
    let up = match variant {
        "strongest" | "strong" | "lin1" | "lin2" if dir == Direction::Upper => MultUpper::from_name(variant),
        _ => None,
    };
    let lo = match variant {
        "strongest" | "strong" | "easy" if dir == Direction::Lower => MultLower::from_name(variant),
        _ => None,
    };
    e.require(up.is_some() || lo.is_some(), "variant has no additive form in this direction");
    if variant == "strongest" && e.require(n.is_some(), "strongest form needs the number of variables n") {
        e.require(m <= nf * (1.0 + EDGE_TOL), "need μ ≤ n");
    }
    if dir == Direction::Lower {
        e.require(lambda <= m * (1.0 + EDGE_TOL), "lower tail needs λ ≤ μ");
    }
    if !e.ok() {
        return e.finish(f64::NAN);
    }
    let raw = if lambda == 0.0 {
        1.0
    } else if m == 0.0 {
        0.0
    } else {
        let delta = (lambda / m).min(if dir == Direction::Lower { 1.0 } else { f64::INFINITY });
        match (up, lo) {
            (Some(MultUpper::Strongest), _) => strongest_upper_at(m, nf, m + lambda),
            (Some(v), _) => mult_upper_raw(m, nf, delta, v),
            (_, Some(MultLower::Strongest)) => strongest_lower_at(m, nf, m - lambda),
            (_, Some(v)) => mult_lower_raw(m, nf, delta, v),
            _ => unreachable!(),
        }
    };
    e.finish(raw)
}

/// Ranges of the summands for the additive bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranges {
    /// `n` variables in `[0,1]` (or any unit-length intervals).
    Unit(u64),
    /// Interval lengths `cᵢ = bᵢ − aᵢ`.
    Lengths(Vec<f64>),
}

/// `exp(−2λ²/Σcᵢ²)`, identical for both tails. With `mu` the event is
/// recorded as `X ≥ μ+λ` / `X ≤ μ−λ`.
pub fn chernoff_additive(ranges: &Ranges, lambda: f64, dir: Direction, mu: Option<f64>) -> BoundResult {
    let id = match ranges {
        Ranges::Unit(_) => "chernoff.additive",
        Ranges::Lengths(_) => "chernoff.additive.ranges",
    };
    let mut e = Eval::new(id, ANCHOR_ADDITIVE);
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    let c2 = match ranges {
        Ranges::Unit(n) => {
            e.require(*n >= 1, "need n ≥ 1");
            *n as f64
        }
        Ranges::Lengths(c) => {
            e.require(!c.is_empty(), "need at least one range");
            e.require(c.iter().all(|&x| x > 0.0 && x.is_finite()), "all ranges cᵢ must be > 0");
            crate::math::sum(c.iter().map(|x| x * x))
        }
    };
    if let Some(m) = mu {
        e.set_event(match dir {
            Direction::Upper => Event::Ge { t: m + lambda },
            Direction::Lower => Event::Le { t: m - lambda },
        });
    }
    e.extra("sum_c2", c2);
    let raw = if e.ok() { exp(-2.0 * lambda * lambda / c2) } else { f64::NAN };
    e.finish(raw)
}

/// Variance bound hypotheses: `σ² = Σ Var[Xᵢ]` and the one-sided range `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceInfo {
    pub sigma2: f64,
    pub b: f64,
}

/// Which one-sided range condition the caller asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeSide {
    /// `Xᵢ ≤ E[Xᵢ] + b`
    Above,
    /// `Xᵢ ≥ E[Xᵢ] − b`
    Below,
    Both,
}

impl RangeSide {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "above" => Some(RangeSide::Above),
            "below" => Some(RangeSide::Below),
            "both" => Some(RangeSide::Both),
            _ => None,
        }
    }

    fn covers(self, dir: Direction) -> bool {
        matches!(
            (self, dir),
            (RangeSide::Both, _) | (RangeSide::Above, Direction::Upper) | (RangeSide::Below, Direction::Lower)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarVariant {
    Strongest,
    Strong,
    Lin1,
    Lin2,
}

impl VarVariant {
    pub const ALL: [VarVariant; 4] = [VarVariant::Strongest, VarVariant::Strong, VarVariant::Lin1, VarVariant::Lin2];

    pub fn name(self) -> &'static str {
        match self {
            VarVariant::Strongest => "strongest",
            VarVariant::Strong => "strong",
            VarVariant::Lin1 => "lin1",
            VarVariant::Lin2 => "lin2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Raw variance-bound value for deviation λ.
pub fn variance_raw(v: VarianceInfo, lambda: f64, n: f64, variant: VarVariant) -> f64 {
    let VarianceInfo { sigma2: s2, b } = v;
    if lambda == 0.0 {
        return 1.0;
    }
    if s2 == 0.0 {
        return 0.0;
    }
    match variant {
        VarVariant::Strongest => {
            let nb = n * b;
            if lambda > nb * (1.0 + EDGE_TOL) {
                return 0.0;
            }
            let w = n * b * b + s2;
            if (lambda - nb).abs() <= EDGE_TOL * nb {
                return powf(s2 / w, n);
            }
            let r = b * lambda / s2;
            let u = lambda / nb;
            let log_inner = -(1.0 + r) * (s2 / w) * log1p(r) - (1.0 - u) * (n * b * b / w) * log1p(-u);
            exp(n * log_inner)
        }
        VarVariant::Strong => {
            let r = b * lambda / s2;
            exp(-(lambda / b) * ((1.0 + 1.0 / r) * log1p(r) - 1.0))
        }
        VarVariant::Lin1 => exp(-lambda * lambda / (2.0 * s2 + 2.0 / 3.0 * b * lambda)),
        VarVariant::Lin2 => exp(-(lambda * lambda / s2).min(lambda / b) / 3.0),
    }
}

/// `Pr[X ≥ E[X] + λ]` (or `≤ E[X] − λ`) from the total variance and a
/// one-sided range.
pub fn chernoff_variance(
    v: VarianceInfo,
    lambda: f64,
    n: Option<u64>,
    dir: Direction,
    declared: RangeSide,
    variant: VarVariant,
    mu: Option<f64>,
) -> BoundResult {
    let mut e = Eval::new(format!("chernoff.variance.{}", variant.name()), ANCHOR_VARIANCE);
    e.check("sigma2", v.sigma2, |x| x >= 0.0, "≥ 0");
    e.check("b", v.b, |x| x > 0.0, "> 0");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    e.require(
        declared.covers(dir),
        match dir {
            Direction::Upper => "upper tail needs Xᵢ ≤ E[Xᵢ] + b",
            Direction::Lower => "lower tail needs Xᵢ ≥ E[Xᵢ] − b",
        },
    );
    if variant == VarVariant::Strongest {
        e.require(n.map_or(false, |n| n >= 1), "strongest form needs the number of variables n");
    }
    if let Some(m) = mu {
        e.set_event(match dir {
            Direction::Upper => Event::Ge { t: m + lambda },
            Direction::Lower => Event::Le { t: m - lambda },
        });
    }
    let nf = n.unwrap_or(0) as f64;
    let raw = if e.ok() { variance_raw(v, lambda, nf, variant) } else { f64::NAN };
    e.finish(raw)
}

/// Multiplicative variance form `exp(−δ²μ²/(2σ² + ⅔bδμ))` for
/// `Pr[X ≥ (1+δ)μ]` (or `≤ (1−δ)μ`).
pub fn chernoff_variance_mult(mu: Reference, delta: f64, sigma2: f64, b: f64, dir: Direction, declared: RangeSide) -> BoundResult {
    let m = mu.mu();
    let event = match dir {
        Direction::Upper => Event::Ge { t: (1.0 + delta) * m },
        Direction::Lower => Event::Le { t: (1.0 - delta) * m },
    };
    let mut e = Eval::new("chernoff.variance.mult_lin", ANCHOR_VARIANCE).event(event);
    check_reference(&mut e, mu, dir);
    if !matches!(mu, Reference::Exact(_)) {
        e.note("estimated-expectation mode for the variance form is stated without proof; certified only by the empirical suite");
    }
    e.check("mu", m, |x| x >= 0.0, "≥ 0");
    e.check("delta", delta, |x| x >= 0.0, "≥ 0");
    e.check("sigma2", sigma2, |x| x >= 0.0, "≥ 0");
    e.check("b", b, |x| x > 0.0, "> 0");
    e.require(
        declared.covers(dir),
        match dir {
            Direction::Upper => "upper tail needs Xᵢ ≤ E[Xᵢ] + b",
            Direction::Lower => "lower tail needs Xᵢ ≥ E[Xᵢ] − b",
        },
    );
    let l = delta * m;
    let raw = if !e.ok() {
        f64::NAN
    } else if l == 0.0 {
        1.0
    } else {
        exp(-l * l / (2.0 * sigma2 + 2.0 / 3.0 * b * l))
    };
    e.finish(raw)
}

/// Names of all registered Chernoff ids (for coverage accounting).
pub fn ids() -> Vec<String> {
    let mut v: Vec<String> = MultUpper::ALL.iter().map(|x| format!("chernoff.mult.upper.{}", x.name())).collect();
    v.extend(MultLower::ALL.iter().map(|x| format!("chernoff.mult.lower.{}", x.name())));
    v.push("chernoff.mult.two_sided".into());
    for x in ["strongest", "strong", "lin1", "lin2"] {
        v.push(format!("chernoff.add.upper.{x}"));
    }
    for x in ["strongest", "strong", "easy"] {
        v.push(format!("chernoff.add.lower.{x}"));
    }
    v.push("chernoff.additive".into());
    v.push("chernoff.additive.ranges".into());
    v.extend(VarVariant::ALL.iter().map(|x| format!("chernoff.variance.{}", x.name())));
    v.push("chernoff.variance.mult_lin".into());
    v
}
