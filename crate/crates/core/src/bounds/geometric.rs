//! Tail bounds for sums of independent geometric variables (trials
//! convention, support `{1, 2, …}`).

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event};
use crate::dist::GeomSumSpec;
use crate::math::{exp, ln, log1p};
use crate::query::{Deviation, Direction, Reference, TailQuery};

pub const ANCHOR_IDENT: &str = "geometric sums, identical success probability";
pub const ANCHOR_HETERO: &str = "geometric sums, heterogeneous success probabilities";
pub const ANCHOR_WITT: &str = "geometric sums, variance-sensitive (witt)";
pub const ANCHOR_HARMONIC: &str = "geometric sums, harmonic success probabilities";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeomVariant {
    IdentUpper,
    IdentUpperMin,
    IdentLowerStrongest,
    IdentLowerExp,
    IdentLowerSimple,
    IdentLowerAdd1,
    IdentLowerAdd2,
    Janson1,
    Janson2,
    Scheideler,
    Weak,
    Jlower,
    JlowerMid,
    JlowerSimple,
    WittUpper,
    WittLower,
    Harmonic,
}

impl GeomVariant {
    pub const ALL: [GeomVariant; 17] = [
        GeomVariant::IdentUpper,
        GeomVariant::IdentUpperMin,
        GeomVariant::IdentLowerStrongest,
        GeomVariant::IdentLowerExp,
        GeomVariant::IdentLowerSimple,
        GeomVariant::IdentLowerAdd1,
        GeomVariant::IdentLowerAdd2,
        GeomVariant::Janson1,
        GeomVariant::Janson2,
        GeomVariant::Scheideler,
        GeomVariant::Weak,
        GeomVariant::Jlower,
        GeomVariant::JlowerMid,
        GeomVariant::JlowerSimple,
        GeomVariant::WittUpper,
        GeomVariant::WittLower,
        GeomVariant::Harmonic,
    ];

    pub fn name(self) -> &'static str {
        use GeomVariant::*;
        match self {
            IdentUpper => "ident_upper",
            IdentUpperMin => "ident_upper_min",
            IdentLowerStrongest => "ident_lower_strongest",
            IdentLowerExp => "ident_lower_exp",
            IdentLowerSimple => "ident_lower_simple",
            IdentLowerAdd1 => "ident_lower_add1",
            IdentLowerAdd2 => "ident_lower_add2",
            Janson1 => "janson1",
            Janson2 => "janson2",
            Scheideler => "scheideler",
            Weak => "weak",
            Jlower => "jlower",
            JlowerMid => "jlower_mid",
            JlowerSimple => "jlower_simple",
            WittUpper => "witt_upper",
            WittLower => "witt_lower",
            Harmonic => "harmonic",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn direction(self) -> Direction {
        use GeomVariant::*;
        match self {
            IdentUpper | IdentUpperMin | Janson1 | Janson2 | Scheideler | Weak | WittUpper | Harmonic => Direction::Upper,
            _ => Direction::Lower,
        }
    }

    pub fn needs_identical(self) -> bool {
        use GeomVariant::*;
        matches!(
            self,
            IdentUpper | IdentUpperMin | IdentLowerStrongest | IdentLowerExp | IdentLowerSimple | IdentLowerAdd1 | IdentLowerAdd2
        )
    }

    fn anchor(self) -> &'static str {
        use GeomVariant::*;
        match self {
            WittUpper | WittLower => ANCHOR_WITT,
            Harmonic => ANCHOR_HARMONIC,
            v if v.needs_identical() => ANCHOR_IDENT,
            _ => ANCHOR_HETERO,
        }
    }
}

/// Largest `C ≤ 1` with `p_(i) ≥ C·i/n` for the ascending order statistics.
pub fn harmonic_constant(spec: &GeomSumSpec) -> f64 {
    let mut p: Vec<f64> = spec.probs.clone();
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter().enumerate().map(|(i, &pi)| pi * n / (i + 1) as f64).fold(1.0, f64::min)
}

/// `(1−δ)ⁿ((1−δ)(μ−n)/((1−δ)μ−n))^{(1−δ)μ−n}`: `pⁿ` at `(1−δ)μ = n`, 0 below.
fn ident_lower_strongest(n: f64, p: f64, mu: f64, delta: f64) -> f64 {
    let t = (1.0 - delta) * mu;
    let edge = 1e-12 * n.max(1.0);
    if t < n - edge {
        return 0.0;
    }
    if (t - n).abs() <= edge {
        return exp(n * ln(p));
    }
    exp(n * log1p(-delta) + (t - n) * ln((1.0 - delta) * (mu - n) / (t - n)))
}

/// Raw value; `delta` and `lambda` describe the same deviation from `μ`.
fn raw_value(spec: &GeomSumSpec, variant: GeomVariant, delta: f64, lambda: f64, c: f64) -> f64 {
    use GeomVariant::*;
    let n = spec.n() as f64;
    let mu = spec.mu();
    let pm = spec.p_min();
    if lambda == 0.0 && variant != Harmonic {
        return 1.0;
    }
    match variant {
        IdentUpper => exp(-(delta * delta / 2.0) * (n - 1.0) / (1.0 + delta)),
        IdentUpperMin => exp(-0.25 * (delta * delta).min(delta) * (n - 1.0)),
        IdentLowerStrongest => ident_lower_strongest(n, pm, mu, delta),
        IdentLowerExp => {
            if delta >= 1.0 {
                0.0
            } else {
                exp(n * (log1p(-delta) + delta))
            }
        }
        IdentLowerSimple => exp(-delta * delta * n / (2.0 - 4.0 * delta / 3.0)),
        IdentLowerAdd1 => exp(-2.0 * delta * delta * pm * n / (1.0 - delta)),
        IdentLowerAdd2 => exp(-2.0 * pm * pm * pm * lambda * lambda / n),
        Janson1 => {
            let k = mu * (delta - log1p(delta));
            if pm >= 1.0 {
                0.0
            } else {
                exp(k * log1p(-pm)) / (1.0 + delta)
            }
        }
        Janson2 => exp(-pm * mu * (delta - log1p(delta))),
        Scheideler => {
            let x = delta * mu * pm;
            exp(n * log1p(x / n) - x)
        }
        Weak => {
            let x = delta * mu * pm;
            exp(-x * x / (2.0 * n * (1.0 + x / n)))
        }
        Jlower => {
            let x = pm * mu;
            if delta >= 1.0 {
                0.0
            } else {
                exp(x * (log1p(-delta) + delta))
            }
        }
        JlowerMid => exp(-delta * delta * mu * pm / (2.0 - 4.0 * delta / 3.0)),
        JlowerSimple => exp(-0.5 * delta * delta * mu * pm),
        WittUpper => exp(-0.25 * (lambda * lambda / spec.s()).min(lambda * pm)),
        WittLower => exp(-lambda * lambda / (2.0 * spec.s())),
        Harmonic => {
            let _ = c;
            exp(-delta * ln(n))
        }
    }
}

/// Tail bound for `X = Σ Geom(pᵢ)`. The query's reference must be `E[X]`.
/// For `harmonic` the query's δ scales `n ln n / C` rather than `μ`; `C` is
/// taken as the largest admissible constant unless supplied.
pub fn geom_sum_bound(spec: &GeomSumSpec, q: &TailQuery, variant: GeomVariant) -> BoundResult {
    geom_sum_bound_with(spec, q, variant, None)
}

pub fn geom_sum_bound_with(spec: &GeomSumSpec, q: &TailQuery, variant: GeomVariant, harmonic_c: Option<f64>) -> BoundResult {
    let id = format!("geom.{}", variant.name());
    let mu = spec.mu();
    let n = spec.n() as f64;
    let mut e = Eval::new(id, variant.anchor());
    e.require(spec.n() >= 1, "need at least one variable");
    e.require(q.direction == variant.direction(), "query direction does not match the variant");
    e.require(
        matches!(q.reference, Reference::Exact(r) if (r - mu).abs() <= 1e-9 * mu.max(1.0)),
        "query reference must be the exact expectation Σ1/pᵢ",
    );
    if variant.needs_identical() {
        e.require(spec.common_p().is_some(), "identical-p variant needs all pᵢ equal");
    }
    let lambda = q.lambda();
    let delta = q.delta();
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    match variant {
        GeomVariant::IdentLowerAdd1 => {
            e.check("delta", delta, |x| (0.0..1.0).contains(&x), "in [0,1)");
        }
        v if v.direction() == Direction::Lower => {
            e.check("delta", delta, |x| (0.0..=1.0).contains(&x), "in [0,1]");
        }
        _ => {}
    }
    let mut c = 1.0;
    if variant == GeomVariant::Harmonic {
        let cmax = harmonic_constant(spec);
        c = harmonic_c.unwrap_or(cmax);
        e.check("C", c, |x| x > 0.0 && x <= 1.0, "in (0,1]");
        e.require(c <= cmax * (1.0 + 1e-12), "need pᵢ ≥ C·i/n for the sorted probabilities");
        e.require(matches!(q.deviation, Deviation::Multiplicative(_)), "harmonic variant takes a multiplicative δ");
        e.extra("C", c);
        e.extra("expectation_bound", n * crate::math::harmonic(spec.n() as u64) / c);
        e.set_event(Event::Ge { t: (1.0 + delta) * n * ln(n) / c });
    } else {
        e.set_event(match q.direction {
            Direction::Upper => Event::Ge { t: q.threshold() },
            Direction::Lower => Event::Le { t: q.threshold() },
        });
    }
    if matches!(variant, GeomVariant::WittUpper | GeomVariant::WittLower) {
        e.extra("s", spec.s());
        e.extra("p_min", spec.p_min());
    }
    let raw = if e.ok() { raw_value(spec, variant, delta, lambda, c) } else { f64::NAN };
    e.finish(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{geom_sum_dist, tail};

    fn spec(p: &[f64]) -> GeomSumSpec {
        GeomSumSpec::new(p.to_vec()).unwrap()
    }

    #[test]
    fn zero_deviation_is_one() {
        let s = spec(&[0.3, 0.3, 0.3]);
        for v in GeomVariant::ALL {
            if v == GeomVariant::Harmonic {
                continue;
            }
            let q = match v.direction() {
                Direction::Upper => TailQuery::upper_mult(s.mu(), 0.0),
                Direction::Lower => TailQuery::lower_mult(s.mu(), 0.0),
            };
            assert_eq!(geom_sum_bound(&s, &q, v).value, 1.0, "{v:?}");
        }
    }

    #[test]
    fn witt_example() {
        let s = spec(&[0.5, 0.5, 0.5]);
        let q = TailQuery::upper_add(6.0, 4.0);
        let r = geom_sum_bound(&s, &q, GeomVariant::WittUpper);
        assert!((r.value - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        let d = geom_sum_dist(&s, 1e-15).unwrap();
        let exact = tail(&d, &q);
        assert!((exact - 0.08984375).abs() < 1e-9);
        assert!(r.value >= exact);
    }

    #[test]
    fn harmonic_example() {
        let n = 30usize;
        let p: Vec<f64> = (1..=n).map(|i| i as f64 / (crate::math::E * n as f64)).collect();
        let s = GeomSumSpec::new(p).unwrap();
        assert!((harmonic_constant(&s) - 1.0 / crate::math::E).abs() < 1e-12);
        let r = geom_sum_bound(&s, &TailQuery::upper_mult(s.mu(), 0.5), GeomVariant::Harmonic);
        assert!(r.valid);
        assert!((r.value - (n as f64).powf(-0.5)).abs() < 1e-12);
        let t = crate::math::E * n as f64 * (n as f64).ln() * 1.5;
        match r.event {
            Some(Event::Ge { t: got }) => assert!((got - t).abs() < 1e-9 * t),
            ref other => panic!("{other:?}"),
        }
        let r = geom_sum_bound_with(&s, &TailQuery::upper_mult(s.mu(), 0.5), GeomVariant::Harmonic, Some(0.5));
        assert!(!r.valid);
    }

    #[test]
    fn identical_checks() {
        let s = spec(&[0.5, 0.4]);
        let r = geom_sum_bound(&s, &TailQuery::upper_mult(s.mu(), 1.0), GeomVariant::IdentUpper);
        assert!(!r.valid);
        let s = GeomSumSpec::identical(10, 0.5).unwrap();
        let r = geom_sum_bound(&s, &TailQuery::lower_mult(20.0, 0.5), GeomVariant::IdentLowerStrongest);
        assert!(r.valid);
        assert!((r.value - 0.5f64.powi(10)).abs() < 1e-15);
        let beyond = geom_sum_bound(&s, &TailQuery::lower_mult(20.0, 0.6), GeomVariant::IdentLowerStrongest);
        assert_eq!(beyond.value, 0.0);
        let inner = geom_sum_bound(&s, &TailQuery::lower_mult(20.0, 0.2), GeomVariant::IdentLowerStrongest);
        assert!(inner.value > 0.0 && inner.value < 1.0);
    }

    #[test]
    fn janson_lower_matches_identical_exp() {
        let s = GeomSumSpec::identical(12, 0.3).unwrap();
        for d in [0.1, 0.4, 0.8] {
            let q = TailQuery::lower_mult(s.mu(), d);
            let a = geom_sum_bound(&s, &q, GeomVariant::Jlower).value;
            let b = geom_sum_bound(&s, &q, GeomVariant::IdentLowerExp).value;
            assert!((a - b).abs() < 1e-12 * b.max(1e-300));
        }
    }
}
