//! Grid sweeps pairing registered bounds with exact or sampled oracles.
//!
//! A [`Suite`] holds any number of grids (model × query cells checked against
//! a list of bound ids), ordering checks between bound variants, and
//! empirical checks of process-level statements. Running a suite produces a
//! [`Report`] whose records are sorted by `(cell_id, bound_id)`, so the
//! serialized output does not depend on the degree of parallelism.

use std::collections::BTreeMap;

use conckit_core::bounds::{self, evaluate, Event, ParamValue, Params};
use conckit_core::dist::FiniteDist;
use conckit_core::mc::{stream_rng, MonteCarloEstimate, CHUNK};
use conckit_core::processes::{simulate_run, ProcessKind, ProcessSpec, Trace};
use conckit_core::{BoundResult, Quantity, Sense};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Model, Stats};
use crate::report::{Exclusion, Report, Summary};

pub const DEFAULT_SLACK: f64 = 1e-9;
pub const DEFAULT_CONFIDENCE: f64 = 0.999;
/// Minimum number of runs for an empirical check.
pub const MIN_RUNS: u64 = 1000;
/// Censoring above this fraction turns a mean comparison inconclusive.
pub const MAX_CENSORED: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OracleMode {
    Exact,
    MonteCarlo {
        trials: u64,
        #[serde(default = "default_confidence")]
        confidence: f64,
    },
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

/// Tail question asked of a cell; resolved against the model's mean and
/// standard deviation before binding bound parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    Upper { t: f64 },
    Lower { t: f64 },
    UpperMult { delta: f64 },
    LowerMult { delta: f64 },
    UpperAdd { lambda: f64 },
    LowerAdd { lambda: f64 },
    /// `X ≥ E[X] + kσ`.
    UpperSigma { k: f64 },
    /// `X ≤ E[X] − kσ`.
    LowerSigma { k: f64 },
    /// `X ≥ (1+δ)μ⁺` with the bound told only `μ⁺ = factor·E[X]`.
    UpperMultEstimate { delta: f64, factor: f64 },
    TwoSided { lambda: f64 },
    TwoSidedSigma { k: f64 },
    /// Point probability at `k` (default: the mean rounded).
    Point { k: Option<f64> },
    /// Bounds whose event is fixed by the model alone.
    Fixed,
}

impl Query {
    pub fn label(&self) -> String {
        match *self {
            Query::Upper { t } => format!("upper(t={t})"),
            Query::Lower { t } => format!("lower(t={t})"),
            Query::UpperMult { delta } => format!("upper_mult(delta={delta})"),
            Query::LowerMult { delta } => format!("lower_mult(delta={delta})"),
            Query::UpperAdd { lambda } => format!("upper_add(lambda={lambda})"),
            Query::LowerAdd { lambda } => format!("lower_add(lambda={lambda})"),
            Query::UpperSigma { k } => format!("upper_sigma(k={k})"),
            Query::LowerSigma { k } => format!("lower_sigma(k={k})"),
            Query::UpperMultEstimate { delta, factor } => format!("upper_mult_estimate(delta={delta},factor={factor})"),
            Query::TwoSided { lambda } => format!("two_sided(lambda={lambda})"),
            Query::TwoSidedSigma { k } => format!("two_sided_sigma(k={k})"),
            Query::Point { k: Some(k) } => format!("point(k={k})"),
            Query::Point { k: None } => "point(mean)".into(),
            Query::Fixed => "fixed".into(),
        }
    }

    pub fn resolve(&self, st: &Stats) -> Resolved {
        let mu = st.mean;
        let sd = st.var.sqrt();
        let up = |t: f64| Resolved::Upper { t: snap(t), mu_ref: mu, estimate: false };
        let low = |t: f64| Resolved::Lower { t: snap(t) };
        match *self {
            Query::Upper { t } => up(t),
            Query::Lower { t } => low(t),
            Query::UpperMult { delta } => up((1.0 + delta) * mu),
            Query::LowerMult { delta } => low((1.0 - delta) * mu),
            Query::UpperAdd { lambda } => up(mu + lambda),
            Query::LowerAdd { lambda } => low(mu - lambda),
            Query::UpperSigma { k } => up(mu + k * sd),
            Query::LowerSigma { k } => low(mu - k * sd),
            Query::UpperMultEstimate { delta, factor } => {
                let m = factor * mu;
                Resolved::Upper { t: snap((1.0 + delta) * m), mu_ref: m, estimate: true }
            }
            Query::TwoSided { lambda } => Resolved::TwoSided { lambda },
            Query::TwoSidedSigma { k } => Resolved::TwoSided { lambda: k * sd },
            Query::Point { k } => Resolved::Point { k: k.unwrap_or(mu.round()) },
            Query::Fixed => Resolved::Fixed,
        }
    }
}

/// Thresholds within 1e-7 of an integer are moved onto it, so that bounds and
/// oracles agree on which atoms an event contains.
fn snap(t: f64) -> f64 {
    if (t - t.round()).abs() < 1e-7 {
        t.round()
    } else {
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Resolved {
    /// `X ≥ t`; `mu_ref` is the mean handed to the bound.
    Upper { t: f64, mu_ref: f64, estimate: bool },
    Lower { t: f64 },
    TwoSided { lambda: f64 },
    Point { k: f64 },
    Fixed,
}

/// Cartesian parameter axes expanded into models.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub family: String,
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub p_vectors: Vec<Vec<f64>>,
    #[serde(default, rename = "N")]
    pub big_n: Vec<u64>,
    #[serde(default)]
    pub m: Vec<u64>,
}

impl Axes {
    pub fn expand(&self) -> Result<Vec<Model>, String> {
        let mut out = Vec::new();
        match self.family.as_str() {
            "binomial" => {
                for &n in &self.n {
                    for &p in &self.p {
                        out.push(Model::Binomial { n, p });
                    }
                }
            }
            "poisson_binomial" => {
                for &n in &self.n {
                    for &p in &self.p {
                        out.push(Model::PoissonBinomial { p: vec![p; n as usize] });
                    }
                }
                out.extend(self.p_vectors.iter().map(|p| Model::PoissonBinomial { p: p.clone() }));
            }
            "hypergeom" => {
                for &big_n in &self.big_n {
                    for &n in self.n.iter().filter(|&&n| n <= big_n) {
                        for &m in self.m.iter().filter(|&&m| m <= big_n) {
                            out.push(Model::Hypergeom { big_n, n, m });
                        }
                    }
                }
            }
            "geom_sum" => {
                for &n in &self.n {
                    for &p in &self.p {
                        out.push(Model::GeomSum { p: vec![p; n as usize] });
                    }
                }
                out.extend(self.p_vectors.iter().map(|p| Model::GeomSum { p: p.clone() }));
            }
            "coupon" => out.extend(self.n.iter().map(|&n| Model::Coupon { n })),
            f => return Err(format!("unknown model family `{f}` (binomial, poisson_binomial, hypergeom, geom_sum, coupon)")),
        }
        Ok(out)
    }
}

/// Model × query cells checked against a list of bound ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub name: String,
    /// Bound ids; a trailing `*` matches a prefix, `"*"` alone matches all.
    pub bounds: Vec<String>,
    #[serde(default)]
    pub models: Vec<Model>,
    #[serde(default)]
    pub axes: Vec<Axes>,
    pub queries: Vec<Query>,
    #[serde(default = "exact")]
    pub oracle: OracleMode,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn exact() -> OracleMode {
    OracleMode::Exact
}

impl GridSpec {
    pub fn models(&self) -> Result<Vec<Model>, String> {
        let mut ms = self.models.clone();
        for a in &self.axes {
            ms.extend(a.expand()?);
        }
        for m in &ms {
            m.validate().map_err(|e| format!("grid `{}`: {}: {e}", self.name, m.label()))?;
        }
        Ok(ms)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.bound_ids()?;
        if let OracleMode::MonteCarlo { trials, confidence } = self.oracle {
            if trials == 0 || !(confidence > 0.0 && confidence < 1.0) {
                return Err(format!("grid `{}`: Monte-Carlo mode needs trials ≥ 1 and confidence in (0,1)", self.name));
            }
        }
        if !(self.slack >= 0.0) {
            return Err(format!("grid `{}`: slack must be ≥ 0", self.name));
        }
        let models = self.models()?;
        if !self.bounds.is_empty() && (models.is_empty() || self.queries.is_empty()) {
            return Err(format!("grid `{}` has no cells", self.name));
        }
        Ok(())
    }

    pub fn bound_ids(&self) -> Result<Vec<String>, String> {
        expand_ids(&self.bounds)
    }
}

/// Expands id patterns against the registry, preserving catalog order.
pub fn expand_ids(patterns: &[String]) -> Result<Vec<String>, String> {
    let all = bounds::registry::ids();
    let mut keep = vec![false; all.len()];
    for pat in patterns {
        let hits: Vec<usize> = if pat == "*" {
            (0..all.len()).collect()
        } else if let Some(prefix) = pat.strip_suffix('*') {
            (0..all.len()).filter(|&i| all[i].starts_with(prefix)).collect()
        } else {
            (0..all.len()).filter(|&i| &all[i] == pat).collect()
        };
        if hits.is_empty() {
            let close = bounds::closest_ids(pat.trim_end_matches('*'), 3);
            return Err(format!("unknown bound id `{pat}`; closest: {}", close.join(", ")));
        }
        for i in hits {
            keep[i] = true;
        }
    }
    Ok(all.into_iter().zip(keep).filter_map(|(id, k)| k.then_some(id)).collect())
}

/// Pointwise order check of a family of variants on explicit parameter cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingSpec {
    pub name: String,
    /// Expected order, smallest first.
    pub family: Vec<String>,
    pub cells: Vec<Params>,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

/// What an empirical check measures on simulated traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stat {
    /// Frequency of the bound's own event on the runtime.
    Event,
    /// Frequency of absorption within the horizon.
    Converged,
    /// Frequency of some of the first `points` generated points lying within
    /// `distance` of the optimum; defaults come from the bound's extras `L`
    /// and `distance`.
    CloseWithin {
        #[serde(default)]
        points: Option<u64>,
        #[serde(default)]
        distance: Option<f64>,
    },
    /// Mean runtime against the bound extra of this name.
    Mean { extra: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSpec {
    pub name: String,
    pub process: ProcessSpec,
    pub bound: String,
    pub params: Params,
    pub stat: Stat,
    pub runs: u64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

/// A verification suite as read from JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    /// Required as soon as the suite has a stochastic part.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grids: Vec<GridSpec>,
    #[serde(default)]
    pub orderings: Vec<OrderingSpec>,
    #[serde(default)]
    pub empirical: Vec<EmpiricalSpec>,
    #[serde(default)]
    pub exclusions: Vec<Exclusion>,
}

impl Suite {
    pub fn validate(&self) -> Result<(), String> {
        for g in &self.grids {
            g.validate()?;
        }
        for o in &self.orderings {
            expand_ids(&o.family)?;
        }
        for e in &self.empirical {
            expand_ids(std::slice::from_ref(&e.bound))?;
            e.process.validate().map_err(|err| format!("empirical `{}`: {err}", e.name))?;
            if e.runs < MIN_RUNS {
                return Err(format!("empirical `{}`: needs at least {MIN_RUNS} runs", e.name));
            }
        }
        Ok(())
    }

    pub fn is_stochastic(&self) -> bool {
        !self.empirical.is_empty() || self.grids.iter().any(|g| matches!(g.oracle, OracleMode::MonteCarlo { .. }))
    }

    pub fn cells(&self) -> Result<usize, String> {
        let mut c = 0;
        for g in &self.grids {
            c += g.models()?.len() * g.queries.len();
        }
        Ok(c + self.orderings.iter().map(|o| o.cells.len()).sum::<usize>() + self.empirical.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Inapplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    MonteCarlo,
    /// Ordering checks: the "oracle" is the preceding family member.
    Ordering,
    None,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Exact => "exact",
            OracleKind::MonteCarlo => "monte_carlo",
            OracleKind::Ordering => "ordering",
            OracleKind::None => "none",
        }
    }
}

/// One `(cell, bound)` comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub cell_id: String,
    pub bound_id: String,
    pub anchor: String,
    pub model: String,
    pub query: String,
    pub params: Option<Params>,
    pub oracle: OracleKind,
    /// Exact probability (truncation-aware lower end) or sample frequency.
    pub oracle_value: Option<f64>,
    pub oracle_lo: Option<f64>,
    pub oracle_hi: Option<f64>,
    pub trials: Option<u64>,
    pub confidence: Option<f64>,
    pub bound: Option<f64>,
    pub sense: Option<Sense>,
    pub valid: bool,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl VerificationRecord {
    fn new(cell_id: &str, bound_id: &str, model: &str, query: &str) -> Self {
        VerificationRecord {
            cell_id: cell_id.to_string(),
            bound_id: bound_id.to_string(),
            anchor: String::new(),
            model: model.to_string(),
            query: query.to_string(),
            params: None,
            oracle: OracleKind::None,
            oracle_value: None,
            oracle_lo: None,
            oracle_hi: None,
            trials: None,
            confidence: None,
            bound: None,
            sense: None,
            valid: false,
            verdict: Verdict::Inapplicable,
            note: None,
        }
    }

    fn inapplicable(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::Inapplicable;
        self.note = Some(why.into());
        self
    }

    fn with_bound(mut self, r: &BoundResult) -> Self {
        self.anchor = r.anchor.clone();
        self.bound = Some(r.value);
        self.sense = Some(r.sense);
        self.valid = r.valid;
        self
    }
}

/// Verdict for an exact bracket `[lo, hi]` of the true probability.
pub fn judge_exact(sense: Sense, value: f64, lo: f64, hi: f64, slack: f64) -> Verdict {
    match sense {
        Sense::Upper if value < lo - slack => Verdict::Fail,
        Sense::Upper if value >= hi - slack => Verdict::Pass,
        Sense::Lower if value > hi + slack => Verdict::Fail,
        Sense::Lower if value <= lo + slack => Verdict::Pass,
        _ => Verdict::Inconclusive,
    }
}

/// Verdict against a confidence interval `[lo, hi]`: fail only when the
/// bound misses the whole interval, pass only when it covers it.
pub fn judge_ci(sense: Sense, value: f64, lo: f64, hi: f64, slack: f64) -> Verdict {
    match sense {
        Sense::Upper if value < lo - slack => Verdict::Fail,
        Sense::Upper if value >= hi => Verdict::Pass,
        Sense::Lower if value > hi + slack => Verdict::Fail,
        Sense::Lower if value <= lo => Verdict::Pass,
        _ => Verdict::Inconclusive,
    }
}

fn mix(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `i`-th unit of work of a named part of a suite.
pub fn derive_seed(seed: u64, part: &str, i: u64) -> u64 {
    let h = part.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    mix(seed ^ h, i)
}

// ---------------------------------------------------------------------------
// Parameter binding

fn na<T>(why: &str) -> Result<T, String> {
    Err(why.to_string())
}

fn need(cond: bool, why: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.to_string())
    }
}

fn dir_lambda(q: &Resolved, mu: f64) -> Result<(&'static str, f64), String> {
    match *q {
        Resolved::Upper { t, .. } => Ok(("upper", t - mu)),
        Resolved::Lower { t } => Ok(("lower", mu - t)),
        _ => na("needs a one-sided tail query"),
    }
}

fn reference(p: Params, estimate: bool) -> Params {
    if estimate {
        p.set("reference", "upper")
    } else {
        p
    }
}

/// Maps a model and resolved query onto the parameters of bound `id`, or
/// explains why the bound does not apply.
pub fn bind(id: &str, model: &Model, st: &Stats, q: &Resolved) -> Result<Params, String> {
    use Resolved::*;
    let mu = st.mean;
    let sd = st.var.sqrt();
    let binary = || need(st.binary, "needs a sum of binary variables");
    let indep = || need(st.independent, "needs independent summands");
    let nv = || st.n_vars.unwrap_or(0);
    let binomial = || match model {
        Model::Binomial { n, p } => Ok((*n, *p)),
        _ => na("needs a binomial model"),
    };
    let upper = || match *q {
        Upper { t, mu_ref, estimate } => Ok((t, mu_ref, estimate)),
        _ => na("needs an upper-tail query"),
    };
    let lower = || match *q {
        Lower { t } => Ok(t),
        _ => na("needs a lower-tail query"),
    };
    let two = || match *q {
        TwoSided { lambda } => Ok(lambda),
        _ => na("needs a two-sided query"),
    };
    let point = || match *q {
        Point { k } => Ok(k),
        _ => na("needs a point query"),
    };
    let fixed = || need(matches!(q, Fixed), "needs the fixed query");
    let plain = || match q {
        Upper { estimate: true, .. } => na("needs the exact mean"),
        _ => Ok(()),
    };
    let (head, tail) = id.split_once('.').unwrap_or((id, ""));
    match head {
        "markov" => {
            plain()?;
            let (t, ..) = upper()?;
            if tail == "mult" {
                need(mu > 0.0, "needs a positive mean")?;
                Ok(Params::new().set("mu", mu).set("lambda", t / mu))
            } else {
                Ok(Params::new().set("mu", mu).set("t", t))
            }
        }
        "reverse_markov" => {
            let u = model.max_value();
            need(u.is_finite(), "needs bounded support")?;
            let t = if tail == "gt" {
                plain()?;
                upper()?.0
            } else {
                lower()?
            };
            Ok(Params::new().set("mu", mu).set("u", u).set("t", t))
        }
        "chebyshev" => {
            plain()?;
            let lambda = match *q {
                Upper { t, .. } => t - mu,
                Lower { t } => mu - t,
                TwoSided { lambda } => lambda,
                _ => return na("needs a tail query"),
            };
            Ok(Params::new().set("mu", mu).set("var", st.var).set("lambda", lambda))
        }
        "cantelli" => {
            plain()?;
            need(sd > 0.0, "needs positive variance")?;
            let (d, l) = dir_lambda(q, mu)?;
            Ok(Params::new().set("mu", mu).set("var", st.var).set("lambda", l / sd).set("direction", d))
        }
        "second_moment" => {
            fixed()?;
            if tail == "indicators" {
                binary()?;
                indep()?;
                Ok(Params::new().set("mu", mu))
            } else {
                Ok(Params::new().set("mu", mu).set("var", st.var))
            }
        }
        "chernoff" => {
            binary()?;
            let n = nv();
            if let Some(v) = tail.strip_prefix("mult.upper.") {
                let (t, m, est) = upper()?;
                need(m > 0.0, "needs a positive mean")?;
                let p = if v == "two_pow" {
                    Params::new().set("mu", m).set("k", t)
                } else {
                    Params::new().set("mu", m).set("n", n).set("delta", t / m - 1.0)
                };
                Ok(reference(p, est))
            } else if tail.starts_with("mult.lower.") {
                let t = lower()?;
                need(mu > 0.0, "needs a positive mean")?;
                Ok(Params::new().set("mu", mu).set("n", n).set("delta", 1.0 - t / mu))
            } else if tail == "mult.two_sided" {
                need(mu > 0.0, "needs a positive mean")?;
                Ok(Params::new().set("mu", mu).set("delta", two()? / mu))
            } else if tail.starts_with("add.upper.") {
                let (t, m, est) = upper()?;
                Ok(reference(Params::new().set("mu", m).set("n", n).set("lambda", t - m), est))
            } else if tail.starts_with("add.lower.") {
                let t = lower()?;
                Ok(Params::new().set("mu", mu).set("n", n).set("lambda", mu - t))
            } else if tail == "additive" || tail == "additive.ranges" {
                plain()?;
                let (d, l) = dir_lambda(q, mu)?;
                let p = Params::new().set("lambda", l).set("direction", d).set("mu", mu);
                Ok(if tail == "additive" { p.set("n", n) } else { p.set("c", vec![1.0; n as usize]) })
            } else if tail == "variance.mult_lin" {
                plain()?;
                need(mu > 0.0, "needs a positive mean")?;
                let (d, l) = dir_lambda(q, mu)?;
                Ok(Params::new()
                    .set("mu", mu)
                    .set("delta", l / mu)
                    .set("sigma2", st.sum_var)
                    .set("b", 1.0)
                    .set("range", "both")
                    .set("direction", d))
            } else if tail.starts_with("variance.") {
                plain()?;
                let (d, l) = dir_lambda(q, mu)?;
                Ok(Params::new()
                    .set("sigma2", st.sum_var)
                    .set("b", 1.0)
                    .set("lambda", l)
                    .set("range", "both")
                    .set("n", n)
                    .set("direction", d)
                    .set("mu", mu))
            } else {
                na("no binder")
            }
        }
        "geom" => {
            plain()?;
            let probs = model.geom_probs().ok_or("needs a sum of geometric variables")?;
            let v = bounds::geometric::GeomVariant::from_name(tail).ok_or("unknown variant")?;
            let t = match v.direction() {
                conckit_core::Direction::Upper => upper()?.0,
                conckit_core::Direction::Lower => lower()?,
            };
            if v == bounds::geometric::GeomVariant::Harmonic {
                // Stated for thresholds (1+δ)·n·ln(n)/C only.
                let spec = conckit_core::GeomSumSpec::new(probs.clone()).map_err(|e| e.to_string())?;
                let c = bounds::geometric::harmonic_constant(&spec);
                let nf = probs.len() as f64;
                need(nf >= 2.0 && c > 0.0, "needs n ≥ 2 and a positive harmonic constant")?;
                let delta = t * c / (nf * nf.ln()) - 1.0;
                return Ok(Params::new().set("p", probs).set("delta", delta).set("C", c));
            }
            Ok(Params::new().set("p", probs).set("t", t))
        }
        "coupon" => {
            plain()?;
            let n = match model {
                Model::Coupon { n } => *n,
                _ => return na("needs the coupon collector model"),
            };
            let nf = n as f64;
            let lnn = nf.ln();
            let ex = crate::model::coupon_mean(n);
            let p = Params::new().set("n", n);
            match tail {
                "upper" => Ok(p.set("eps", (upper()?.0 - nf * lnn) / nf)),
                "upper.mult" => Ok(p.set("eps", upper()?.0 / (nf * lnn) - 1.0)),
                "witt_upper" => Ok(p.set("eps", (upper()?.0 - ex) / nf)),
                "markov" => Ok(p.set("lambda", upper()?.0 / ex)),
                "union" => Ok(p.set("t", upper()?.0)),
                "lower" => Ok(p.set("eps", ((nf - 1.0) * lnn - lower()?) / (nf - 1.0))),
                "lower.mult" => Ok(p.set("eps", 1.0 - lower()? / ((nf - 1.0) * lnn))),
                "witt_lower" => Ok(p.set("eps", (ex - lower()?) / nf)),
                "chebyshev" => Ok(p.set("eps", two()? / nf)),
                _ => na("no binder"),
            }
        }
        "binomial" => {
            let (n, p) = binomial()?;
            let k = match tail {
                "union_coeff" | "klar" | "feller" | "bollobas_up" => {
                    plain()?;
                    upper()?.0.ceil()
                }
                _ => point()?,
            };
            need(k >= 0.0 && k <= n as f64, "k outside the support")?;
            Ok(Params::new().set("n", n).set("p", p).set("k", k))
        }
        "anti" => match tail {
            "sqrtn12_upper" | "sqrtn12_lower" | "exceed_a" | "exceed_b" | "exceed_c" | "exceed_d" | "exceed_e" => {
                fixed()?;
                let (n, p) = binomial()?;
                Ok(Params::new().set("n", n).set("p", p))
            }
            "point_cap" => {
                binary()?;
                indep()?;
                Ok(Params::new().set("var", st.var).set("k", point()?))
            }
            "feige" => {
                binary()?;
                indep()?;
                plain()?;
                let (t, ..) = upper()?;
                let max_p = match model {
                    Model::Binomial { p, .. } => *p,
                    Model::PoissonBinomial { p } => p.iter().copied().fold(0.0, f64::max),
                    _ => 1.0,
                };
                Ok(Params::new().set("mean", mu).set("delta", t - mu).set("max_mu_i", max_p))
            }
            _ => na("checked outside exact grids"),
        },
        "martingale" => {
            binary()?;
            plain()?;
            if tail == "bounded_diff" {
                indep()?;
            }
            need(tail != "cga", "checked by simulation")?;
            let (d, l) = dir_lambda(q, mu)?;
            Ok(Params::new().set("c", 1.0).set("n", nv()).set("lambda", l).set("direction", d).set("mean", mu))
        }
        "initial_distance" => {
            let (n, p) = binomial()?;
            need(p == 0.5, "needs the distance of a uniform point, Bin(n, 1/2)")?;
            Ok(Params::new().set("n", n).set("lambda", two()?))
        }
        "sbm" if tail == "tail_k" => {
            plain()?;
            let (n, p) = binomial()?;
            Ok(Params::new().set("alpha", n as f64 * p).set("k", upper()?.0.ceil()))
        }
        _ => na("no exact-grid binder"),
    }
}

/// Ids with no binder on exact grids, with the reason and where they are
/// checked instead.
pub fn default_exclusions() -> Vec<Exclusion> {
    let rows: [(&str, &str); 15] = [
        ("maxsum", "prefix-maximum event is not a function of the final sum; checked by unit tests against simulated partial-sum paths"),
        ("union.bound", "speaks about a family of events; checked by unit tests against inclusion-exclusion on explicit events"),
        ("bonferroni.second", "speaks about a family of events; checked by unit tests against inclusion-exclusion on explicit events"),
        ("blind.union", "runtime of blind search; checked in the processes suite"),
        ("blind.bonferroni", "runtime of blind search; checked in the processes suite"),
        ("runtime.needle", "unbiased search on a needle; checked in the processes suite"),
        ("runtime.oea_lower", "(1+1) EA runtime; checked in the processes suite"),
        ("martingale.cga", "neutral cGA frequency; checked in the processes suite"),
        ("dom.", "runtime domination examples; dom.onemax and dom.generic_nn are checked in the processes suite, the others describe processes with no simulator"),
        ("anti.general_sqrt", "existence statement with caller-supplied constants; no fixed event to check"),
        ("cond_binomial", "conditional expectation, not a probability; checked by unit tests against exact conditioning"),
        ("tail_to_expectation.", "expectation of an abstract variable with an assumed tail; checked by unit tests by numerical integration"),
        ("superexp.solve", "returns a parameter, not a probability"),
        ("sbm.quantile_p", "returns a bit count, not a probability"),
        ("sbm.quantile_pT", "returns a bit count, not a probability"),
    ];
    let ids = bounds::registry::ids();
    let mut out = Vec::new();
    for (pat, why) in rows {
        for id in ids.iter().filter(|id| if pat.ends_with('.') { id.starts_with(pat) } else { id.as_str() == pat }) {
            out.push(Exclusion { bound_id: id.clone(), reason: why.to_string() });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Running

/// Histogram of samples (value, count), ascending.
struct Histogram {
    rows: Vec<(f64, u64)>,
    trials: u64,
}

impl Histogram {
    fn count(&self, ev: &Event) -> Option<u64> {
        let mut c = 0;
        for &(v, k) in &self.rows {
            if ev.contains(v)? {
                c += k;
            }
        }
        Some(c)
    }
}

fn sample_histogram(model: &Model, trials: u64, seed: u64) -> Histogram {
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<BTreeMap<u64, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            let mut h = BTreeMap::new();
            for run in lo..hi {
                let x = model.sample(&mut rng, run);
                *h.entry(x.to_bits()).or_insert(0u64) += 1;
            }
            h
        })
        .collect();
    let mut all: BTreeMap<u64, u64> = BTreeMap::new();
    for h in parts {
        for (k, v) in h {
            *all.entry(k).or_insert(0) += v;
        }
    }
    // Samples are non-negative, so bit order is numeric order.
    Histogram { rows: all.into_iter().map(|(b, c)| (f64::from_bits(b), c)).collect(), trials }
}

enum Law {
    Exact(FiniteDist),
    Sampled(Histogram, f64, u64),
    Missing(String),
}

fn check_cell(
    cell_id: &str,
    model: &Model,
    st: &Stats,
    query: &Query,
    law: &Law,
    ids: &[String],
    slack: f64,
) -> Vec<VerificationRecord> {
    let label = model.label();
    let qlabel = query.label();
    let rq = query.resolve(st);
    ids.iter()
        .map(|id| {
            let rec = VerificationRecord::new(cell_id, id, &label, &qlabel);
            let params = match bind(id, model, st, &rq) {
                Ok(p) => p,
                Err(why) => return rec.inapplicable(why),
            };
            let mut rec = VerificationRecord { params: Some(params.clone()), ..rec };
            let r = match evaluate(id, &params) {
                Ok(r) => r,
                Err(e) => return rec.inapplicable(e.to_string()),
            };
            rec = rec.with_bound(&r);
            if !r.valid {
                return rec.inapplicable(format!("preconditions: {}", r.violated_preconditions.join("; ")));
            }
            if r.quantity != Quantity::Probability {
                return rec.inapplicable("not a probability bound");
            }
            let Some(ev) = r.event.clone() else {
                return rec.inapplicable("bound has no event");
            };
            judge_record(rec, &r, &ev, law, slack)
        })
        .collect()
}

fn judge_record(mut rec: VerificationRecord, r: &BoundResult, ev: &Event, law: &Law, slack: f64) -> VerificationRecord {
    match law {
        Law::Exact(d) => {
            let Some((lo, hi)) = ev.prob_interval(d) else {
                return rec.inapplicable("event is not a function of the modelled variable");
            };
            rec.oracle = OracleKind::Exact;
            rec.oracle_value = Some(lo);
            rec.oracle_lo = Some(lo);
            rec.oracle_hi = Some(hi);
            rec.verdict = judge_exact(r.sense, r.value, lo, hi, slack);
            if rec.verdict == Verdict::Inconclusive {
                rec.note = Some("bound falls inside the truncation bracket".into());
            }
        }
        Law::Sampled(h, confidence, seed) => {
            let Some(k) = h.count(ev) else {
                return rec.inapplicable("event is not a function of the modelled variable");
            };
            let est = MonteCarloEstimate::from_counts(k, h.trials, *confidence, *seed);
            fill_mc(&mut rec, &est);
            rec.verdict = if r.is_vacuous() { Verdict::Pass } else { judge_ci(r.sense, r.value, est.ci_low, est.ci_high, slack) };
        }
        Law::Missing(why) => return rec.inapplicable(format!("no oracle: {why}")),
    }
    rec
}

fn fill_mc(rec: &mut VerificationRecord, est: &MonteCarloEstimate) {
    rec.oracle = OracleKind::MonteCarlo;
    rec.oracle_value = Some(est.point);
    rec.oracle_lo = Some(est.ci_low);
    rec.oracle_hi = Some(est.ci_high);
    rec.trials = Some(est.trials);
    rec.confidence = Some(est.confidence);
}

/// All records of one grid. `seed` feeds Monte-Carlo oracles.
pub fn run_grid(g: &GridSpec, seed: u64) -> Result<(Vec<VerificationRecord>, usize), String> {
    g.validate()?;
    let ids = g.bound_ids()?;
    if ids.is_empty() {
        return Ok((Vec::new(), 0));
    }
    let models = g.models()?;
    let cells = models.len() * g.queries.len();
    let recs: Vec<Vec<VerificationRecord>> = models
        .par_iter()
        .enumerate()
        .map(|(mi, model)| {
            let Some(st) = model.stats() else {
                return Vec::new();
            };
            let mseed = derive_seed(seed, &g.name, mi as u64);
            let law = match g.oracle {
                OracleMode::Exact => match model.exact() {
                    Ok(d) => Law::Exact(d),
                    Err(e) => Law::Missing(e),
                },
                OracleMode::MonteCarlo { trials, confidence } => {
                    Law::Sampled(sample_histogram(model, trials, mseed), confidence, mseed)
                }
            };
            let mut out = Vec::new();
            for (qi, q) in g.queries.iter().enumerate() {
                let cell = format!("{}/m{mi:05}/q{qi:02}", g.name);
                out.extend(check_cell(&cell, model, &st, q, &law, &ids, g.slack));
            }
            out
        })
        .collect();
    Ok((recs.into_iter().flatten().collect(), cells))
}

/// Pointwise monotonicity of `family` (smallest first) on every cell: one
/// record per cell and adjacent pair.
pub fn check_ordering(o: &OrderingSpec) -> Result<Vec<VerificationRecord>, String> {
    let family = &o.family;
    for id in family {
        expand_ids(std::slice::from_ref(id))?;
    }
    let recs: Vec<Vec<VerificationRecord>> = o
        .cells
        .par_iter()
        .enumerate()
        .map(|(ci, params)| {
            let cell = format!("{}/c{ci:05}", o.name);
            let vals: Vec<Result<BoundResult, String>> =
                family.iter().map(|id| evaluate(id, params).map_err(|e| e.to_string())).collect();
            let qlabel = params_label(params);
            let mut out = Vec::new();
            for i in 1..family.len() {
                let pair = format!("{}<={}", family[i - 1], family[i]);
                let mut rec = VerificationRecord::new(&cell, &pair, "", &qlabel);
                rec.params = Some(params.clone());
                rec.oracle = OracleKind::Ordering;
                match (&vals[i - 1], &vals[i]) {
                    (Ok(a), Ok(b)) if a.valid && b.valid => {
                        rec.anchor = b.anchor.clone();
                        rec.oracle_value = Some(a.raw);
                        rec.oracle_lo = Some(a.raw);
                        rec.oracle_hi = Some(a.raw);
                        rec.bound = Some(b.raw);
                        rec.sense = Some(Sense::Upper);
                        rec.valid = true;
                        rec.verdict = if b.raw >= a.raw - o.slack * a.raw.abs().max(1.0) { Verdict::Pass } else { Verdict::Fail };
                    }
                    (Err(e), _) | (_, Err(e)) => rec = rec.inapplicable(e.clone()),
                    _ => rec = rec.inapplicable("a member's preconditions fail on this cell"),
                }
                out.push(rec);
            }
            out
        })
        .collect();
    Ok(recs.into_iter().flatten().collect())
}

fn params_label(p: &Params) -> String {
    p.0.iter()
        .map(|(k, v)| match v {
            ParamValue::Num(x) => format!("{k}={x}"),
            ParamValue::List(xs) => format!("{k}=[{}]", xs.len()),
            ParamValue::Text(s) => format!("{k}={s}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Simulates `runs` traces of `spec` (run `r` uses stream `(spec.seed, r)`).
pub fn traces(spec: &ProcessSpec, runs: u64) -> Result<Vec<Trace>, String> {
    (0..runs).into_par_iter().map(|r| simulate_run(spec, r).map_err(|e| e.to_string())).collect()
}

/// Runtime event outcome, `None` when censoring leaves it undetermined.
fn runtime_in(ev: &Event, tr: &Trace) -> Option<bool> {
    let t = tr.runtime as f64;
    if !tr.censored {
        return ev.contains(t);
    }
    // The true runtime is strictly above the horizon `t`.
    match *ev {
        Event::Ge { t: thr } | Event::Gt { t: thr } if thr <= t => Some(true),
        Event::Le { t: thr } | Event::Lt { t: thr } if thr <= t => Some(false),
        Event::Eq { k } if k <= t => Some(false),
        _ => None,
    }
}

/// Simulates the process and compares the bound with a Wilson interval of the
/// measured frequency (or a normal interval of the mean runtime).
pub fn empirical_vs_bound(e: &EmpiricalSpec) -> Result<VerificationRecord, String> {
    if e.runs < MIN_RUNS {
        return Err(format!("empirical `{}`: needs at least {MIN_RUNS} runs", e.name));
    }
    let r = evaluate(&e.bound, &e.params).map_err(|err| err.to_string())?;
    let model = format!("process({},n={},objective={})", e.process.kind.name(), e.process.n, e.process.objective.name());
    let mut rec = VerificationRecord::new(&e.name, &e.bound, &model, &stat_label(&e.stat)).with_bound(&r);
    rec.params = Some(e.params.clone());
    if !r.valid {
        return Ok(rec.inapplicable(format!("preconditions: {}", r.violated_preconditions.join("; "))));
    }
    let mut spec = e.process.clone();
    if let Stat::CloseWithin { .. } = e.stat {
        spec.checkpoint_every = 1;
    }
    let trs = traces(&spec, e.runs)?;
    let censored = trs.iter().filter(|t| t.censored).count() as u64;
    let mut notes = Vec::new();
    if censored > 0 {
        notes.push(format!("{censored} of {} runs censored at horizon {}", e.runs, spec.horizon));
    }
    let hits: u64 = match &e.stat {
        Stat::Mean { extra } => {
            let b = if extra == "value" { Some(r.value) } else { r.extra(extra) };
            let Some(bound) = b else {
                return Ok(rec.inapplicable(format!("bound has no extra `{extra}`")));
            };
            let xs: Vec<f64> = trs.iter().filter(|t| !t.censored).map(|t| t.runtime as f64).collect();
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0).max(1.0);
            let z = conckit_core::mc::normal_quantile(0.5 + e.confidence / 2.0);
            let half = z * (var / m).sqrt();
            rec.bound = Some(bound);
            rec.sense = Some(Sense::Upper);
            rec.oracle = OracleKind::MonteCarlo;
            rec.oracle_value = Some(mean);
            rec.oracle_lo = Some(mean - half);
            rec.oracle_hi = Some(mean + half);
            rec.trials = Some(e.runs);
            rec.confidence = Some(e.confidence);
            rec.verdict = if censored as f64 > MAX_CENSORED * e.runs as f64 {
                notes.push("censoring above 1% of runs: mean comparison inconclusive".into());
                Verdict::Inconclusive
            } else {
                let sense = match r.sense {
                    Sense::Lower => Sense::Lower,
                    Sense::Upper => Sense::Upper,
                };
                rec.sense = Some(sense);
                judge_ci(sense, bound, mean - half, mean + half, e.slack)
            };
            rec.note = (!notes.is_empty()).then(|| notes.join("; "));
            return Ok(rec);
        }
        Stat::Event => {
            let Some(ev) = r.event.clone() else {
                return Ok(rec.inapplicable("bound has no event"));
            };
            if ev.contains(0.0).is_none() {
                return Ok(rec.inapplicable("event is not a function of the runtime"));
            }
            let mut undetermined = 0u64;
            let k = trs
                .iter()
                .filter(|t| match runtime_in(&ev, t) {
                    Some(b) => b,
                    None => {
                        undetermined += 1;
                        // Counted on the side that can only make an upper
                        // bound look worse (and a lower bound look better).
                        r.sense == Sense::Upper
                    }
                })
                .count() as u64;
            if undetermined > 0 {
                notes.push(format!("{undetermined} censored runs with undetermined outcome"));
            }
            k
        }
        Stat::Converged => trs.iter().filter(|t| !t.censored).count() as u64,
        Stat::CloseWithin { points, distance } => {
            let pts = points.or_else(|| r.extra("L").map(|l| l.floor() as u64)).ok_or("CloseWithin needs points")?;
            let d = distance.or_else(|| r.extra("distance")).ok_or("CloseWithin needs a distance")?;
            if spec.horizon + 1 < pts && censored > 0 {
                notes.push("horizon shorter than the point budget".into());
            }
            trs.iter()
                .filter(|t| {
                    t.checkpoints.iter().filter(|c| c.iteration < pts).any(|c| c.distance as f64 <= d + 1e-9)
                })
                .count() as u64
        }
    };
    let est = MonteCarloEstimate::from_counts(hits, e.runs, e.confidence, spec.seed);
    fill_mc(&mut rec, &est);
    rec.verdict = if r.is_vacuous() { Verdict::Pass } else { judge_ci(r.sense, r.value, est.ci_low, est.ci_high, e.slack) };
    rec.note = (!notes.is_empty()).then(|| notes.join("; "));
    Ok(rec)
}

fn stat_label(s: &Stat) -> String {
    match s {
        Stat::Event => "event".into(),
        Stat::Converged => "converged".into(),
        Stat::CloseWithin { .. } => "close_within".into(),
        Stat::Mean { extra } => format!("mean_vs({extra})"),
    }
}

/// Runs a whole suite on the current rayon pool.
pub fn run_suite(s: &Suite, invocation: Vec<String>) -> Result<Report, String> {
    s.validate()?;
    if s.is_stochastic() && s.seed.is_none() {
        return Err(format!("suite `{}` is stochastic and needs a seed", s.name));
    }
    let seed = s.seed.unwrap_or(0);
    let mut records = Vec::new();
    let mut cells = 0;
    for g in &s.grids {
        let (r, c) = run_grid(g, seed)?;
        records.extend(r);
        cells += c;
    }
    for o in &s.orderings {
        records.extend(check_ordering(o)?);
        cells += o.cells.len();
    }
    for e in &s.empirical {
        records.push(empirical_vs_bound(e)?);
        cells += 1;
    }
    records.sort_by(|a, b| (&a.cell_id, &a.bound_id).cmp(&(&b.cell_id, &b.bound_id)));
    let summary = Summary::of(&records, cells);
    Ok(Report {
        schema_version: crate::report::SCHEMA_VERSION,
        name: s.name.clone(),
        invocation,
        seed: s.seed,
        summary,
        exclusions: s.exclusions.clone(),
        records,
    })
}

/// Runs `f` on a pool with `jobs` threads (0: rayon's default).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| e.to_string())?;
    Ok(pool.install(f))
}

/// Kinds whose runtime distribution has no tractable oracle and whose
/// expected runtime can be astronomically large.
pub fn is_heavy(spec: &ProcessSpec) -> bool {
    use conckit_core::processes::Objective;
    match spec.kind {
        ProcessKind::Blind | ProcessKind::UnbiasedSearch => spec.n > 16,
        _ => matches!(spec.objective, Objective::Needle) && spec.n > 12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_cell(model: Model, query: Query, bounds: &[&str]) -> Vec<VerificationRecord> {
        let g = GridSpec {
            name: "t".into(),
            bounds: bounds.iter().map(|s| s.to_string()).collect(),
            models: vec![model],
            axes: vec![],
            queries: vec![query],
            oracle: OracleMode::Exact,
            slack: DEFAULT_SLACK,
        };
        run_grid(&g, 1).unwrap().0
    }

    #[test]
    fn additive_single_cell() {
        let r = one_cell(Model::Binomial { n: 10, p: 0.5 }, Query::UpperAdd { lambda: 3.0 }, &["chernoff.additive"]);
        assert_eq!(r.len(), 1);
        let r = &r[0];
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.bound.unwrap() - (-1.8f64).exp()).abs() < 1e-12);
        // Pr[Bin(10, 1/2) ≥ 8] = 56/1024
        assert!((r.oracle_value.unwrap() - 56.0 / 1024.0).abs() < 1e-12);
    }

    #[test]
    fn empty_bound_list() {
        let r = one_cell(Model::Binomial { n: 10, p: 0.5 }, Query::Fixed, &[]);
        assert!(r.is_empty());
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(judge_exact(Sense::Upper, 0.1, 0.1 + 2e-9, 0.1 + 2e-9, 1e-9), Verdict::Fail);
        assert_eq!(judge_exact(Sense::Upper, 0.1, 0.1 + 5e-10, 0.1 + 5e-10, 1e-9), Verdict::Pass);
        assert_eq!(judge_exact(Sense::Lower, 0.2, 0.1, 0.1, 1e-9), Verdict::Fail);
        assert_eq!(judge_ci(Sense::Upper, 0.5, 0.4, 0.6, 0.0), Verdict::Inconclusive);
        assert_eq!(judge_ci(Sense::Upper, 0.3, 0.4, 0.6, 0.0), Verdict::Fail);
        assert_eq!(judge_ci(Sense::Upper, 0.7, 0.4, 0.6, 0.0), Verdict::Pass);
        assert_eq!(judge_ci(Sense::Lower, 0.3, 0.4, 0.6, 0.0), Verdict::Pass);
    }

    #[test]
    fn false_bound_is_caught() {
        // Binding Markov with a wrong mean has to fail against the oracle.
        let d = Model::Binomial { n: 10, p: 0.5 }.exact().unwrap();
        let r = evaluate("markov", &Params::new().set("mu", 0.1).set("t", 8.0)).unwrap();
        let rec = judge_record(VerificationRecord::new("c", "markov", "", ""), &r, r.event.as_ref().unwrap(), &Law::Exact(d), 1e-9);
        assert_eq!(rec.verdict, Verdict::Fail);
    }

    #[test]
    fn ids_patterns() {
        let ids = expand_ids(&["chernoff.mult.lower.*".to_string()]).unwrap();
        assert_eq!(ids.len(), 3);
        assert!(expand_ids(&["chernof.additive".to_string()]).is_err());
    }

    #[test]
    fn censoring_rules() {
        let tr = Trace { runtime: 100, censored: true, checkpoints: vec![], seed: 0, run: 0 };
        assert_eq!(runtime_in(&Event::Ge { t: 50.0 }, &tr), Some(true));
        assert_eq!(runtime_in(&Event::Le { t: 50.0 }, &tr), Some(false));
        assert_eq!(runtime_in(&Event::Ge { t: 150.0 }, &tr), None);
        // Not found within the horizon means not found within exactly that many steps.
        assert_eq!(runtime_in(&Event::Le { t: 100.0 }, &tr), Some(false));
        assert_eq!(runtime_in(&Event::Gt { t: 100.0 }, &tr), Some(true));
        assert_eq!(runtime_in(&Event::Le { t: 101.0 }, &tr), None);
    }

    #[test]
    fn monte_carlo_cell() {
        let g = GridSpec {
            name: "mc".into(),
            bounds: vec!["geom.janson1".into(), "geom.witt_upper".into()],
            models: vec![Model::GeomSum { p: vec![0.2, 0.5, 0.7] }],
            axes: vec![],
            queries: vec![Query::UpperMult { delta: 1.0 }],
            oracle: OracleMode::MonteCarlo { trials: 50_000, confidence: 0.999 },
            slack: DEFAULT_SLACK,
        };
        let (a, _) = run_grid(&g, 5).unwrap();
        let (b, _) = run_grid(&g, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.verdict != Verdict::Fail), "{a:?}");
    }
}
