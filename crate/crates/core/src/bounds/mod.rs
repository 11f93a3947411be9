//! Closed-form tail bounds and related inequalities.
//!
//! Every evaluator returns a [`BoundResult`]: the numeric value, whether the
//! stated hypotheses hold for the given parameters, and the event the value
//! refers to. Precondition failures never panic; they produce
//! `valid = false` so sweeps can tabulate applicability.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::FiniteDist;

pub mod anti;
pub mod binomial;
pub mod chernoff;
pub mod coupon;
pub mod elementary;
pub mod geometric;
pub mod martingale;
pub mod misc;
pub mod moments;
pub mod registry;

pub use registry::{catalog, closest_ids, evaluate, BoundInfo, CatalogError, ParamValue, Params};

/// Whether `value` bounds its target from above or from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Upper,
    Lower,
}

/// What kind of number the evaluator returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// A probability; the value is clamped to `[0, 1]`.
    Probability,
    /// A bound on an expectation.
    Expectation,
    /// A derived parameter (e.g. a deviation δ or a bit count k).
    Parameter,
}

/// The event a probability bound speaks about.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Ge { t: f64 },
    Gt { t: f64 },
    Le { t: f64 },
    Lt { t: f64 },
    Eq { k: f64 },
    /// `|X − center| ≥ lambda`
    AbsDevGe { center: f64, lambda: f64 },
    /// `∃i: S_i ≥ E[S_i] + lambda` (or `≤ E[S_i] − lambda` for `upper = false`).
    PartialSums { lambda: f64, upper: bool },
    /// Anything not expressible on a single distribution.
    Described { text: String },
}

fn tol(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

impl Event {
    /// Whether the event contains the value `x`, with the same threshold
    /// snapping as `prob_interval`; `None` when not a function of one value.
    pub fn contains(&self, x: f64) -> Option<bool> {
        Some(match *self {
            Event::Ge { t } => x >= t - tol(t),
            Event::Gt { t } => x > t + tol(t),
            Event::Le { t } => x <= t + tol(t),
            Event::Lt { t } => x < t - tol(t),
            Event::Eq { k } => (x - k).abs() <= tol(k),
            Event::AbsDevGe { center, lambda } => {
                lambda <= 0.0 || x >= center + lambda - tol(center + lambda) || x <= center - lambda + tol(center - lambda)
            }
            Event::PartialSums { .. } | Event::Described { .. } => return None,
        })
    }

    /// `[lo, hi]` bracket of the event's probability under `dist`; `lo` ignores
    /// truncated mass, `hi` counts it wherever it could lie. `None` for events
    /// that are not a function of one distribution.
    pub fn prob_interval(&self, dist: &FiniteDist) -> Option<(f64, f64)> {
        let d = dist.tail_deficit();
        let floor_ok = |t: f64| dist.deficit_floor().map_or(true, |f| f <= t);
        let sum_if = |pred: &dyn Fn(f64) -> bool| crate::math::sum(dist.iter().filter(|(v, _)| pred(*v)).map(|(_, m)| m));
        let (lo, hi) = match *self {
            Event::Ge { t } => {
                let lo = sum_if(&|v| v >= t - tol(t));
                (lo, lo + d)
            }
            Event::Gt { t } => {
                let lo = sum_if(&|v| v > t + tol(t));
                (lo, lo + d)
            }
            Event::Le { t } => {
                let lo = sum_if(&|v| v <= t + tol(t));
                (lo, lo + if floor_ok(t + tol(t)) { d } else { 0.0 })
            }
            Event::Lt { t } => {
                let lo = sum_if(&|v| v < t - tol(t));
                (lo, lo + if floor_ok(t - tol(t)) { d } else { 0.0 })
            }
            Event::Eq { k } => {
                let lo = sum_if(&|v| (v - k).abs() <= tol(k));
                (lo, lo + if floor_ok(k + tol(k)) { d } else { 0.0 })
            }
            Event::AbsDevGe { center, lambda } => {
                if lambda <= 0.0 {
                    return Some((1.0, 1.0));
                }
                let hi_t = center + lambda;
                let lo_t = center - lambda;
                let lo = sum_if(&|v| v >= hi_t - tol(hi_t) || v <= lo_t + tol(lo_t));
                (lo, lo + d)
            }
            Event::PartialSums { .. } | Event::Described { .. } => return None,
        };
        Some((lo.min(1.0), hi.min(1.0)))
    }
}

/// One inequality's answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub bound_id: String,
    /// For probabilities: the formula value clamped to `[0, 1]`.
    pub value: f64,
    /// The unclamped formula value.
    pub raw: f64,
    pub clamped: bool,
    pub valid: bool,
    pub violated_preconditions: Vec<String>,
    /// Topic label grouping related results in reports.
    pub anchor: String,
    pub sense: Sense,
    pub quantity: Quantity,
    pub event: Option<Event>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundResult {
    /// True when the bound has no content: an upper probability bound ≥ 1 or a
    /// lower probability bound ≤ 0.
    pub fn is_vacuous(&self) -> bool {
        match (self.quantity, self.sense) {
            (Quantity::Probability, Sense::Upper) => self.value >= 1.0,
            (Quantity::Probability, Sense::Lower) => self.value <= 0.0,
            _ => false,
        }
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.get(key).copied()
    }
}

/// Builder used by all evaluators.
#[derive(Clone, Debug)]
pub(crate) struct Eval {
    id: String,
    anchor: &'static str,
    sense: Sense,
    quantity: Quantity,
    event: Option<Event>,
    violated: Vec<String>,
    notes: Vec<String>,
    extras: BTreeMap<String, f64>,
}

impl Eval {
    pub(crate) fn new(id: impl Into<String>, anchor: &'static str) -> Self {
        Eval {
            id: id.into(),
            anchor,
            sense: Sense::Upper,
            quantity: Quantity::Probability,
            event: None,
            violated: Vec::new(),
            notes: Vec::new(),
            extras: BTreeMap::new(),
        }
    }

    pub(crate) fn lower(mut self) -> Self {
        self.sense = Sense::Lower;
        self
    }

    pub(crate) fn quantity(mut self, q: Quantity) -> Self {
        self.quantity = q;
        self
    }

    pub(crate) fn event(mut self, e: Event) -> Self {
        self.event = Some(e);
        self
    }

    pub(crate) fn set_event(&mut self, e: Event) {
        self.event = Some(e);
    }

    /// Records `msg` as violated unless `cond` holds.
    pub(crate) fn require(&mut self, cond: bool, msg: &str) -> bool {
        if !cond {
            self.violated.push(msg.to_string());
        }
        cond
    }

    /// Requires a finite number satisfying `pred`.
    pub(crate) fn check(&mut self, name: &str, v: f64, pred: impl Fn(f64) -> bool, what: &str) -> bool {
        let ok = v.is_finite() && pred(v);
        if !ok {
            self.violated.push(alloc::format!("{name} = {v} must be {what}"));
        }
        ok
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub(crate) fn extra(&mut self, k: &str, v: f64) {
        self.extras.insert(k.to_string(), v);
    }

    pub(crate) fn ok(&self) -> bool {
        self.violated.is_empty()
    }

    pub(crate) fn finish(self, raw: f64) -> BoundResult {
        let (value, clamped) = match self.quantity {
            Quantity::Probability => {
                let fallback = match self.sense {
                    Sense::Upper => 1.0,
                    Sense::Lower => 0.0,
                };
                let v = if raw.is_nan() { fallback } else { raw.clamp(0.0, 1.0) };
                (v, v != raw)
            }
            _ => (raw, false),
        };
        let mut notes = self.notes;
        if clamped && self.quantity == Quantity::Probability && !raw.is_nan() {
            notes.push("clamped to [0,1]".to_string());
        }
        BoundResult {
            bound_id: self.id,
            value,
            raw,
            clamped,
            valid: self.violated.is_empty(),
            violated_preconditions: self.violated,
            anchor: self.anchor.to_string(),
            sense: self.sense,
            quantity: self.quantity,
            event: self.event,
            extras: self.extras,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{pmf_binomial, pmf_geometric_truncated};

    #[test]
    fn finish_clamps_and_flags() {
        let r = Eval::new("x", "t").finish(1.7);
        assert_eq!(r.value, 1.0);
        assert!(r.clamped && r.valid);
        let mut e = Eval::new("x", "t").lower();
        e.require(false, "nope");
        let r = e.finish(-0.2);
        assert_eq!(r.value, 0.0);
        assert!(!r.valid);
        assert_eq!(r.violated_preconditions.len(), 1);
    }

    #[test]
    fn event_intervals() {
        let d = pmf_binomial(10, 0.5).unwrap();
        let (lo, hi) = Event::Ge { t: 8.0 }.prob_interval(&d).unwrap();
        assert_eq!(lo, hi);
        assert!((lo - 56.0 / 1024.0).abs() < 1e-15);
        let (gt, _) = Event::Gt { t: 5.0 }.prob_interval(&d).unwrap();
        let (ge, _) = Event::Ge { t: 6.0 }.prob_interval(&d).unwrap();
        assert_eq!(gt, ge);
        let g = pmf_geometric_truncated(0.5, 1e-6).unwrap();
        let (lo, hi) = Event::Ge { t: 3.0 }.prob_interval(&g).unwrap();
        assert!(hi > lo);
        let (lo, hi) = Event::Le { t: 3.0 }.prob_interval(&g).unwrap();
        assert_eq!(lo, hi);
    }
}
