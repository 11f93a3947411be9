//! Assorted tools: union/Bonferroni, partial-sum maxima, the super-exponential
//! solver, standard-bit mutation, expectations from tails, and runtime
//! lower bounds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BoundResult, Eval, Event, Quantity};
use crate::math::{ceil, exp, ln, log1p, powf, sum, E, LN_2};

pub const ANCHOR_UNION: &str = "union bound and bonferroni inequalities";
pub const ANCHOR_MAXSUM: &str = "maxima of partial sums";
pub const ANCHOR_SUPEREXP: &str = "solving (e/δ)^δ ≤ 1/t";
pub const ANCHOR_SBM: &str = "standard-bit mutation flip counts";
pub const ANCHOR_TAILEXP: &str = "expectations from exponential tails";
pub const ANCHOR_RUNTIME: &str = "runtime lower bounds";
pub const ANCHOR_CONDBIN: &str = "conditional binomial expectation";
pub const ANCHOR_INITIAL: &str = "distance of random initial points";

/// Bound ids accepted as the base of [`max_partial_sums`]: additive-deviation
/// statements for sums of independent bounded variables.
pub const MAXSUM_BASES: [&str; 13] = [
    "chernoff.additive",
    "chernoff.additive.ranges",
    "chernoff.variance.strongest",
    "chernoff.variance.strong",
    "chernoff.variance.lin1",
    "chernoff.variance.lin2",
    "chernoff.add.upper.strongest",
    "chernoff.add.upper.strong",
    "chernoff.add.upper.lin1",
    "chernoff.add.upper.lin2",
    "chernoff.add.lower.strongest",
    "chernoff.add.lower.strong",
    "chernoff.add.lower.easy",
];

/// Re-scopes an additive bound on `S_n` to the event that some prefix sum
/// deviates by λ. Multiplicative requests have no such extension.
pub fn max_partial_sums(base: &BoundResult, lambda: f64, upper: bool) -> BoundResult {
    let mut e = Eval::new("maxsum", ANCHOR_MAXSUM).event(Event::PartialSums { lambda, upper });
    e.require(
        MAXSUM_BASES.contains(&base.bound_id.as_str()),
        "base must be an additive bound for independent sums; multiplicative forms do not extend to prefix maxima",
    );
    e.require(base.valid, "base bound is not valid");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    match base.event {
        Some(Event::Ge { .. }) if !upper => {
            e.require(false, "base bounds the upper tail");
        }
        Some(Event::Le { .. }) if upper => {
            e.require(false, "base bounds the lower tail");
        }
        _ => {}
    }
    e.note(format!("base: {}", base.bound_id));
    for v in &base.violated_preconditions {
        e.note(format!("base: {v}"));
    }
    let raw = if e.ok() { base.raw } else { f64::NAN };
    e.finish(raw)
}

/// δ with `(e/δ)^δ ≤ 1/t`, for `t ≥ e^{e^{1/e}}`.
pub fn solve_delta_superexp(t: f64) -> BoundResult {
    let mut e = Eval::new("superexp.solve", ANCHOR_SUPEREXP).quantity(Quantity::Parameter);
    let threshold = exp(exp(1.0 / E));
    e.require(t.is_finite() && t >= threshold * (1.0 - 1e-9), "needs t ≥ e^{e^{1/e}} ≈ 4.24044349");
    if !e.ok() {
        return e.finish(f64::NAN);
    }
    // Within tolerance below the threshold (e.g. its 9-digit rounding) the
    // formula undershoots; δ solved at the threshold still works for t.
    if t < threshold {
        e.note("t below e^{e^{1/e}} by rounding; solved at the threshold");
    }
    let lt = ln(t.max(threshold));
    let llt = ln(lt);
    let delta = lt / ln(lt / (E * llt));
    let guarantee = exp(delta * (1.0 - ln(delta)));
    e.extra("guarantee", guarantee);
    e.extra("target", 1.0 / t);
    e.finish(delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SbmQuery {
    /// `Pr[H ≥ k] ≤ (eα/k)^k`
    TailK { k: f64 },
    /// Smallest `k` with guarantee `Pr[H ≥ k] ≤ p`.
    QuantileP { p: f64 },
    /// Same, union-bounded over `T` independent mutations.
    QuantilePT { p: f64, t: u64 },
}

/// Flip-count bounds for standard-bit mutation with expected flip count α;
/// independent of `n`.
pub fn sbm_bounds(alpha: f64, q: SbmQuery) -> BoundResult {
    match q {
        SbmQuery::TailK { k } => {
            let mut e = Eval::new("sbm.tail_k", ANCHOR_SBM).event(Event::Ge { t: k });
            e.check("alpha", alpha, |x| x > 0.0, "> 0");
            e.check("k", k, |x| x > 0.0, "> 0");
            let raw = if e.ok() { powf(E * alpha / k, k) } else { f64::NAN };
            e.finish(raw)
        }
        SbmQuery::QuantileP { p } | SbmQuery::QuantilePT { p, .. } => {
            let (id, t) = match q {
                SbmQuery::QuantilePT { t, .. } => ("sbm.quantile_pT", t as f64),
                _ => ("sbm.quantile_p", 1.0),
            };
            let mut e = Eval::new(id, ANCHOR_SBM).quantity(Quantity::Parameter);
            e.check("alpha", alpha, |x| x > 0.0, "> 0");
            e.check("p", p, |x| x > 0.0 && x < 1.0, "in (0,1)");
            e.check("T", t, |x| x >= 1.0, "≥ 1");
            let limit = exp(-alpha * exp(1.0 / E)) / t;
            e.require(p <= limit * (1.0 + 1e-12), "needs p ≤ (1/T)·exp(−α e^{1/e})");
            if !e.ok() {
                return e.finish(f64::NAN);
            }
            let l = ln(t / p);
            let la = l / alpha;
            let kp = l / ln(la / (E * ln(la)));
            let k = ceil(kp - 1e-12 * kp);
            e.extra("k_p", kp);
            e.extra("guarantee", p);
            e.extra("per_mutation", p / t);
            e.extra("tail_at_k", powf(E * alpha / k, k));
            e.set_event(Event::Ge { t: k });
            e.finish(k)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailForm {
    AdditiveUp,
    AdditiveLow,
    MultUp,
    MultLow,
}

impl TailForm {
    pub const ALL: [TailForm; 4] = [TailForm::AdditiveUp, TailForm::AdditiveLow, TailForm::MultUp, TailForm::MultLow];

    pub fn name(self) -> &'static str {
        match self {
            TailForm::AdditiveUp => "additive_up",
            TailForm::AdditiveLow => "additive_low",
            TailForm::MultUp => "mult_up",
            TailForm::MultLow => "mult_low",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Expectation bound from a tail of the form `α·exp(−λ/β)`.
pub fn tail_to_expectation(alpha: f64, beta: f64, t: f64, form: TailForm) -> BoundResult {
    let mut e = Eval::new(format!("tail_to_expectation.{}", form.name()), ANCHOR_TAILEXP).quantity(Quantity::Expectation);
    if matches!(form, TailForm::AdditiveLow | TailForm::MultLow) {
        e = e.lower();
    }
    e.check("alpha", alpha, |x| x > 0.0, "> 0");
    e.check("beta", beta, |x| x > 0.0, "> 0");
    e.check("T", t, |x| x >= 0.0, "≥ 0");
    let ab = alpha * beta;
    let raw = match form {
        TailForm::AdditiveUp => t + ab,
        TailForm::AdditiveLow => t - ab,
        TailForm::MultUp => (1.0 + ab) * t,
        TailForm::MultLow => (1.0 - ab) * t,
    };
    if matches!(form, TailForm::AdditiveLow | TailForm::MultLow) && raw <= 0.0 {
        e.note("vacuous: lower bound ≤ 0");
        e.extra("vacuous", 1.0);
    }
    let raw = if e.ok() { raw } else { f64::NAN };
    e.finish(raw)
}

/// `(upper, lower)` from truncated inclusion–exclusion: `k = 1` gives the
/// union bound only; `k = 2` adds the second Bonferroni lower bound. `pairs`
/// lists `Pr[Eᵢ ∩ Eⱼ]` for `i < j` in lexicographic order.
pub fn union_bonferroni(probs: &[f64], pairs: Option<&[f64]>, k: u32) -> (BoundResult, Option<BoundResult>) {
    let ev = Event::Described { text: "union of the events".to_string() };
    let mut up = Eval::new("union.bound", ANCHOR_UNION).event(ev.clone());
    let valid_probs = probs.iter().all(|&p| (0.0..=1.0).contains(&p));
    up.require(valid_probs, "probabilities must lie in [0,1]");
    up.require(k == 1 || k == 2, "truncation order must be 1 or 2");
    let s1 = sum(probs.iter().copied());
    let upper = if up.ok() { s1 } else { f64::NAN };
    let upper = up.finish(upper);
    if k != 2 {
        return (upper, None);
    }
    let mut lo = Eval::new("bonferroni.second", ANCHOR_UNION).lower().event(ev);
    lo.require(valid_probs, "probabilities must lie in [0,1]");
    let n = probs.len();
    let need = n * n.saturating_sub(1) / 2;
    match pairs {
        None => {
            lo.require(false, "second order needs the pairwise intersection probabilities");
        }
        Some(p) => {
            lo.require(p.len() == need, "need one intersection probability per pair i < j");
            lo.require(p.iter().all(|&x| (0.0..=1.0).contains(&x)), "pair probabilities must lie in [0,1]");
        }
    }
    let raw = if lo.ok() { s1 - sum(pairs.unwrap().iter().copied()) } else { f64::NAN };
    (upper, Some(lo.finish(raw)))
}

/// Blind random search on `{0,1}ⁿ`: `Pr[T ≤ L] ≤ L·2⁻ⁿ`.
pub fn blind_union(n: u32, l: f64) -> BoundResult {
    let mut e = Eval::new("blind.union", ANCHOR_UNION).event(Event::Le { t: l });
    e.check("L", l, |x| x >= 0.0, "≥ 0");
    let raw = if e.ok() { l * powf(2.0, -(n as f64)) } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[T ≤ L] ≥ L·2⁻ⁿ − C(L,2)·2⁻²ⁿ`.
pub fn blind_bonferroni(n: u32, l: f64) -> BoundResult {
    let mut e = Eval::new("blind.bonferroni", ANCHOR_UNION).lower().event(Event::Le { t: l });
    e.check("L", l, |x| x >= 0.0, "≥ 0");
    let q = powf(2.0, -(n as f64));
    let raw = if e.ok() { l * q - l * (l - 1.0) / 2.0 * q * q } else { f64::NAN };
    e.finish(raw)
}

/// Probability that one of the first `2^{cn}` points of an unbiased algorithm
/// on a needle lies within distance `(½ − η)n`: at most `2^{(c − 2ln2·η²)n}`.
pub fn runtime_needle(n: u32, c: f64, eta: f64) -> BoundResult {
    let nf = n as f64;
    let mut e = Eval::new("runtime.needle", ANCHOR_RUNTIME).event(Event::Described {
        text: "some of the first 2^{cn} points lies within distance (1/2 − η)n of the optimum".to_string(),
    });
    e.check("c", c, |x| x > 0.0, "> 0");
    e.check("eta", eta, |x| x > 0.0, "> 0");
    e.extra("L", powf(2.0, c * nf));
    e.extra("distance", (0.5 - eta) * nf);
    let raw = if e.ok() { exp((c - 2.0 * LN_2 * eta * eta) * nf * LN_2) } else { f64::NAN };
    e.finish(raw)
}

/// `(1+1) EA` on any function with a unique optimum:
/// `Pr[T ≤ (1−ε)(n−1)ln(n/2)] ≤ exp(−n^ε)`.
pub fn runtime_oea_lower(n: u32, eps: f64) -> BoundResult {
    let nf = n as f64;
    let t = (1.0 - eps) * (nf - 1.0) * ln(nf / 2.0);
    let mut e = Eval::new("runtime.oea_lower", ANCHOR_RUNTIME).event(Event::Le { t });
    e.require(n >= 2, "need n ≥ 2");
    e.check("eps", eps, |x| x > 0.0, "> 0");
    if e.ok() {
        // Each initially wrong bit must be flipped within ⌊t⌋ iterations.
        let tt = crate::math::floor(t.max(0.0));
        let miss = 0.5 * exp(tt * log1p(-1.0 / nf));
        let product = exp(nf * log1p(-miss));
        e.extra("product_bound", product);
        let stated = exp(-powf(nf, eps));
        if product > stated {
            e.note("independent-bit product bound exceeds the stated value at these parameters");
        }
    }
    let raw = if e.ok() { exp(-powf(nf, eps)) } else { f64::NAN };
    e.finish(raw)
}

/// `E[X | X ≥ k] ≤ k + (n − k)p` for `X ~ Bin(n, p)`.
pub fn conditional_binomial_ub(n: u64, p: f64, k: u64) -> BoundResult {
    let mut e = Eval::new("cond_binomial", ANCHOR_CONDBIN).quantity(Quantity::Expectation).event(Event::Described {
        text: "E[X | X ≥ k]".to_string(),
    });
    e.check("p", p, |x| (0.0..=1.0).contains(&x), "in [0,1]");
    e.require(k <= n, "need k ≤ n");
    let raw = if e.ok() { k as f64 + (n - k) as f64 * p } else { f64::NAN };
    e.finish(raw)
}

/// `Pr[|H(x, x*) − n/2| ≥ λ] ≤ 2exp(−2λ²/n)` for uniform `x`.
pub fn initial_distance(n: u64, lambda: f64) -> BoundResult {
    let nf = n as f64;
    let mut e = Eval::new("initial_distance", ANCHOR_INITIAL).event(Event::AbsDevGe { center: nf / 2.0, lambda });
    e.require(n >= 1, "need n ≥ 1");
    e.check("lambda", lambda, |x| x >= 0.0, "≥ 0");
    let raw = if e.ok() { 2.0 * exp(-2.0 * lambda * lambda / nf) } else { f64::NAN };
    e.finish(raw)
}

pub fn ids() -> Vec<String> {
    let mut v: Vec<String> = [
        "maxsum",
        "superexp.solve",
        "sbm.tail_k",
        "sbm.quantile_p",
        "sbm.quantile_pT",
        "union.bound",
        "bonferroni.second",
        "blind.union",
        "blind.bonferroni",
        "runtime.needle",
        "runtime.oea_lower",
        "cond_binomial",
        "initial_distance",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    v.extend(TailForm::ALL.iter().map(|f| format!("tail_to_expectation.{}", f.name())));
    v
}
