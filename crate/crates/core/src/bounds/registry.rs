//! String identifiers for every evaluator, their parameter schemas, and a
//! generic dispatcher used by the command line and the verification harness.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::anti::{self, Exceed};
use super::binomial::{binomial_bounds, BinomialVariant};
use super::chernoff::{self, MultLower, MultUpper, RangeSide, Ranges, VarVariant, VarianceInfo};
use super::coupon::{coupon_bounds, CouponTail};
use super::geometric::{geom_sum_bound_with, GeomVariant};
use super::martingale::{cga_neutral, martingale_bounds, MartingaleVariant};
use super::misc::{self, SbmQuery, TailForm};
use super::moments;
use super::{BoundResult, Quantity, Sense};
use crate::dist::GeomSumSpec;
use crate::domination::{domination_runtime_example, RuntimeExample};
use crate::query::{Direction, Reference, TailQuery};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    List(Vec<f64>),
    Text(String),
}

impl ParamValue {
    /// Numbers, comma-separated number lists, otherwise text.
    pub fn parse(s: &str) -> ParamValue {
        let s = s.trim();
        if let Ok(x) = s.parse::<f64>() {
            return ParamValue::Num(x);
        }
        if s.contains(',') {
            let xs: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
            if let Ok(xs) = xs {
                return ParamValue::List(xs);
            }
        }
        ParamValue::Text(s.to_string())
    }
}

/// Named parameters of one evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, k: &str, v: impl Into<ParamValue>) -> Self {
        self.0.insert(k.to_string(), v.into());
        self
    }

    pub fn insert(&mut self, k: &str, v: ParamValue) {
        self.0.insert(k.to_string(), v);
    }

    /// Parses `"a=1 b=0.5,0.5 c=text"`.
    pub fn parse_assignments(s: &str) -> Params {
        let mut p = Params::new();
        for tok in s.split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                p.insert(k, ParamValue::parse(v));
            }
        }
        p
    }
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Num(x)
    }
}

impl From<u64> for ParamValue {
    fn from(x: u64) -> Self {
        ParamValue::Num(x as f64)
    }
}

impl From<Vec<f64>> for ParamValue {
    fn from(x: Vec<f64>) -> Self {
        ParamValue::List(x)
    }
}

impl From<&str> for ParamValue {
    fn from(x: &str) -> Self {
        ParamValue::Text(x.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Num,
    Int,
    List,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub required: bool,
}

/// Catalog entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInfo {
    pub id: String,
    pub anchor: String,
    pub params: Vec<ParamSpec>,
    pub sense: Sense,
    pub quantity: Quantity,
    pub summary: String,
    /// An admissible parameter set, in `name=value` form.
    pub example: String,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown bound id `{id}`; closest: {}", .closest.join(", "))]
    UnknownId { id: String, closest: Vec<String> },
    #[error("{id}: unknown parameter `{name}` (accepted: {accepted})")]
    UnknownParam { id: String, name: String, accepted: String },
    #[error("{id}: missing parameter `{name}`")]
    MissingParam { id: String, name: String },
    #[error("{id}: parameter `{name}`: {msg}")]
    BadParam { id: String, name: String, msg: String },
}

struct Entry {
    id: String,
    schema: &'static str,
    example: String,
    summary: &'static str,
}

fn entries() -> Vec<Entry> {
    let mut v = Vec::new();
    let mut add = |id: &str, schema: &'static str, example: &str, summary: &'static str| {
        v.push(Entry { id: id.to_string(), schema, example: example.to_string(), summary });
    };
    const REF: &str = "reference:text?";
    let _ = REF;
    add("markov", "mu:num t:num direction:text? reference:text?", "mu=1 t=10", "Pr[X ≥ t] ≤ μ/t");
    add("markov.mult", "mu:num? lambda:num", "mu=1 lambda=2", "Pr[X ≥ λμ] ≤ 1/λ");
    add("reverse_markov", "mu:num u:num t:num", "mu=0.5 u=1 t=0", "Pr[X ≤ t] ≤ (u−μ)/(u−t) for X ≤ u");
    add("reverse_markov.gt", "mu:num u:num t:num", "mu=0.5 u=1 t=0", "Pr[X > t] ≥ (μ−t)/(u−t) for X ≤ u");
    add("chebyshev", "mu:num var:num lambda:num", "mu=50 var=25 lambda=10", "Pr[|X−μ| ≥ λ] ≤ Var/λ²");
    add("cantelli", "mu:num var:num lambda:num direction:text?", "mu=0 var=1 lambda=1", "Pr[X ≥ μ+λσ] ≤ 1/(λ²+1)");
    add("second_moment.mean", "mu:num var:num ex2:num?", "mu=2 var=1", "Pr[X = 0] ≤ Var/μ²");
    add("second_moment.ex2", "mu:num var:num ex2:num?", "mu=2 var=1", "Pr[X = 0] ≤ Var/E[X²]");
    add("second_moment.indicators", "mu:num", "mu=4", "Pr[X > 0] ≥ 1 − 1/μ for pairwise independent indicators");
    for v in MultUpper::ALL {
        if v == MultUpper::TwoPow {
            add(
                "chernoff.mult.upper.two_pow",
                "mu:num delta:num? k:num? reference:text?",
                "mu=1 k=6",
                "Pr[X ≥ k] ≤ 2^{−k} for k ≥ 2eμ",
            );
        } else {
            let ex = if v == MultUpper::Easy { "mu=10 n=20 delta=0.5" } else { "mu=10 n=20 delta=1" };
            add(&format!("chernoff.mult.upper.{}", v.name()), "mu:num n:int? delta:num reference:text?", ex, "Pr[X ≥ (1+δ)μ]");
        }
    }
    for v in MultLower::ALL {
        add(&format!("chernoff.mult.lower.{}", v.name()), "mu:num n:int? delta:num reference:text?", "mu=10 n=20 delta=0.5", "Pr[X ≤ (1−δ)μ]");
    }
    add("chernoff.mult.two_sided", "mu:num delta:num", "mu=30 delta=0.5", "Pr[|X−μ| ≥ δμ] ≤ 2exp(−δ²μ/3)");
    for v in ["strongest", "strong", "lin1", "lin2"] {
        add(&format!("chernoff.add.upper.{v}"), "mu:num n:int? lambda:num reference:text?", "mu=10 n=20 lambda=3", "Pr[X ≥ μ+λ]");
    }
    for v in ["strongest", "strong", "easy"] {
        add(&format!("chernoff.add.lower.{v}"), "mu:num n:int? lambda:num reference:text?", "mu=10 n=20 lambda=3", "Pr[X ≤ μ−λ]");
    }
    add("chernoff.additive", "n:int lambda:num direction:text? mu:num?", "n=10 lambda=3", "exp(−2λ²/n) for [0,1] summands");
    add("chernoff.additive.ranges", "c:list lambda:num direction:text? mu:num?", "c=1,1,2 lambda=1", "exp(−2λ²/Σcᵢ²)");
    for v in VarVariant::ALL {
        add(
            &format!("chernoff.variance.{}", v.name()),
            "sigma2:num b:num lambda:num range:text n:int? direction:text? mu:num?",
            "sigma2=4 b=1 lambda=4 range=above n=20",
            "Pr[X ≥ E[X]+λ] from σ² and a one-sided range b",
        );
    }
    add(
        "chernoff.variance.mult_lin",
        "mu:num delta:num sigma2:num b:num range:text direction:text? reference:text?",
        "mu=9 delta=0.1 sigma2=0.9 b=1 range=above",
        "exp(−δ²μ²/(2σ²+⅔bδμ))",
    );
    for v in GeomVariant::ALL {
        let ex = match v {
            GeomVariant::Harmonic => "p=0.1,0.2,0.3,0.4,0.5 delta=1",
            _ if v.direction() == Direction::Lower => "p=0.5 n=3 delta=0.5",
            _ => "p=0.5 n=3 delta=1",
        };
        add(&format!("geom.{}", v.name()), "p:list n:int? delta:num? lambda:num? t:num? C:num?", ex, "tails of Σ Geom(pᵢ)");
    }
    for (id, ex) in [
        ("coupon.upper", "n=10 eps=1"),
        ("coupon.upper.mult", "n=10 eps=1"),
        ("coupon.lower", "n=10 eps=1"),
        ("coupon.lower.mult", "n=10 eps=0.5"),
        ("coupon.chebyshev", "n=10 eps=2"),
        ("coupon.witt_upper", "n=10 eps=1"),
        ("coupon.witt_lower", "n=10 eps=1"),
    ] {
        add(id, "n:int eps:num", ex, "coupon collector time tails");
    }
    add("coupon.markov", "n:int lambda:num", "n=10 lambda=2", "Pr[T ≥ λnHₙ] ≤ 1/λ");
    add("coupon.union", "n:int t:num", "n=10 t=50", "Pr[T > t] ≤ n(1−1/n)^t");
    for v in BinomialVariant::ALL {
        let ex = match v {
            BinomialVariant::BollobasUp | BinomialVariant::BollobasLow => "n=200 p=0.3 k=75",
            _ => "n=10 p=0.3 k=5",
        };
        add(&format!("binomial.{}", v.name()), "n:int p:num k:int", ex, "binomial tail / point probability");
    }
    add("anti.sqrtn12_upper", "n:int p:num", "n=4 p=0.5", "Pr[X ≥ μ + ½√μ] ≥ 1/8");
    add("anti.sqrtn12_lower", "n:int p:num", "n=4 p=0.5", "Pr[X ≤ μ − ½√μ] ≥ 1/8");
    add("anti.general_sqrt", "mean:num var:num v0:num c:num? C:num? direction:text?", "mean=5 var=2 v0=1 c=0.1 C=0.01", "existence statement with caller constants");
    add("anti.point_cap", "var:num k:num?", "var=1", "Pr[X = k] ≤ 2/√Var");
    add("anti.feige", "mean:num delta:num max_mu_i:num?", "mean=3 delta=1", "Pr[X ≤ E[X]+δ] ≥ min{1/13, δ/(δ+1)}");
    for v in Exceed::ALL {
        add(&format!("anti.exceed_{}", v.name()), "n:int p:num", "n=30 p=0.3", "Bin(n,p) reaches its mean");
    }
    for v in MartingaleVariant::ALL {
        add(
            &format!("martingale.{}", v.name()),
            "c:list n:int? lambda:num direction:text? mean:num?",
            "c=1 n=100 lambda=10",
            "bounded differences / Azuma",
        );
    }
    add("martingale.cga", "K:int T:int", "K=20 T=50", "neutral cGA frequency absorbed within T steps");
    add("maxsum", "base:text", "base=chernoff.additive n=100 lambda=10", "prefix-maximum version of an additive bound");
    add("superexp.solve", "t:num", "t=100", "δ with (e/δ)^δ ≤ 1/t");
    add("sbm.tail_k", "alpha:num k:num", "alpha=1 k=6", "Pr[H ≥ k] ≤ (eα/k)^k");
    add("sbm.quantile_p", "alpha:num p:num", "alpha=1 p=0.01", "smallest k with Pr[H ≥ k] ≤ p");
    add("sbm.quantile_pT", "alpha:num p:num T:int", "alpha=1 p=0.001 T=10", "k with Pr[some of T mutations flips ≥ k] ≤ p");
    for f in TailForm::ALL {
        add(&format!("tail_to_expectation.{}", f.name()), "alpha:num beta:num T:num", "alpha=1 beta=2 T=5", "expectation from an exponential tail");
    }
    add("union.bound", "probs:list", "probs=0.1,0.2", "Pr[∪Eᵢ] ≤ ΣPr[Eᵢ]");
    add("bonferroni.second", "probs:list pairs:list?", "probs=0.1,0.2 pairs=0.02", "Pr[∪Eᵢ] ≥ ΣPr[Eᵢ] − ΣPr[Eᵢ∩Eⱼ]");
    add("blind.union", "n:int L:num", "n=8 L=16", "Pr[T ≤ L] ≤ L2⁻ⁿ");
    add("blind.bonferroni", "n:int L:num", "n=8 L=16", "Pr[T ≤ L] ≥ L2⁻ⁿ − C(L,2)2⁻²ⁿ");
    add("runtime.needle", "n:int c:num eta:num", "n=16 c=0.1 eta=0.4", "early success of unbiased search on a needle");
    add("runtime.oea_lower", "n:int eps:num", "n=16 eps=0.5", "Pr[T ≤ (1−ε)(n−1)ln(n/2)] ≤ exp(−n^ε)");
    add("cond_binomial", "n:int p:num k:int", "n=2 p=0.5 k=1", "E[X | X ≥ k] ≤ k + (n−k)p");
    add("initial_distance", "n:int lambda:num", "n=100 lambda=10", "Pr[|H(x,x*) − n/2| ≥ λ] ≤ 2exp(−2λ²/n)");
    add("dom.onemax", "n:int delta:num", "n=50 delta=1", "(1+1) EA on OneMax");
    add("dom.generic_nn", "n:int gamma:num", "n=5 gamma=1", "(1+1) EA on any function");
    add("dom.eulerian", "m:int delta:num", "m=30 delta=1", "(1+1) EA for Eulerian cycles");
    add("dom.sorting_inversions", "n:int delta:num", "n=10 delta=1", "(1+1) EA sorting by inversions");
    add("dom.sorting_tree", "n:int delta:num", "n=10 delta=1", "(1+1) EA sorting, tree representation");
    add("dom.sssp", "n:int l:int eps:num", "n=10 l=5 eps=1", "multi-criteria (1+1) EA for shortest paths");
    v
}

fn parse_schema(s: &str) -> Vec<ParamSpec> {
    s.split_whitespace()
        .map(|tok| {
            let (name, kind) = tok.split_once(':').expect("schema token");
            let required = !kind.ends_with('?');
            let kind = match kind.trim_end_matches('?') {
                "num" => ParamKind::Num,
                "int" => ParamKind::Int,
                "list" => ParamKind::List,
                "text" => ParamKind::Text,
                k => panic!("unknown kind {k}"),
            };
            ParamSpec { name: name.to_string(), kind, required }
        })
        .collect()
}

/// All registered ids in catalog order.
pub fn ids() -> Vec<String> {
    entries().into_iter().map(|e| e.id).collect()
}

/// The machine-readable index.
pub fn catalog() -> Vec<BoundInfo> {
    entries()
        .into_iter()
        .map(|e| {
            let r = evaluate(&e.id, &Params::parse_assignments(&e.example)).expect("catalog example evaluates");
            BoundInfo {
                params: parse_schema(e.schema),
                anchor: r.anchor,
                sense: r.sense,
                quantity: r.quantity,
                summary: e.summary.to_string(),
                example: e.example,
                id: e.id,
            }
        })
        .collect()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = Vec::with_capacity(b.len() + 1);
        cur.push(i + 1);
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + (ca != cb) as usize;
            cur.push(sub.min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Up to `k` registered ids nearest to `id` in edit distance.
pub fn closest_ids(id: &str, k: usize) -> Vec<String> {
    let mut all: Vec<(usize, String)> = ids().into_iter().map(|c| (levenshtein(id, &c), c)).collect();
    all.sort();
    all.into_iter().take(k).map(|(_, c)| c).collect()
}

struct Args<'a> {
    id: &'a str,
    p: &'a Params,
}

impl Args<'_> {
    fn err(&self, name: &str, msg: &str) -> CatalogError {
        CatalogError::BadParam { id: self.id.to_string(), name: name.to_string(), msg: msg.to_string() }
    }

    fn opt_num(&self, name: &str) -> Result<Option<f64>, CatalogError> {
        match self.p.0.get(name) {
            None => Ok(None),
            Some(ParamValue::Num(x)) => Ok(Some(*x)),
            Some(ParamValue::List(v)) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(self.err(name, "expected a number")),
        }
    }

    fn num(&self, name: &str) -> Result<f64, CatalogError> {
        self.opt_num(name)?
            .ok_or_else(|| CatalogError::MissingParam { id: self.id.to_string(), name: name.to_string() })
    }

    fn opt_int(&self, name: &str) -> Result<Option<u64>, CatalogError> {
        match self.opt_num(name)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x == libm::floor(x) && x < 1.0e15 => Ok(Some(x as u64)),
            Some(_) => Err(self.err(name, "expected a non-negative integer")),
        }
    }

    fn int(&self, name: &str) -> Result<u64, CatalogError> {
        self.opt_int(name)?
            .ok_or_else(|| CatalogError::MissingParam { id: self.id.to_string(), name: name.to_string() })
    }

    fn opt_list(&self, name: &str) -> Result<Option<Vec<f64>>, CatalogError> {
        match self.p.0.get(name) {
            None => Ok(None),
            Some(ParamValue::Num(x)) => Ok(Some(alloc::vec![*x])),
            Some(ParamValue::List(v)) => Ok(Some(v.clone())),
            Some(_) => Err(self.err(name, "expected a list of numbers")),
        }
    }

    fn list(&self, name: &str) -> Result<Vec<f64>, CatalogError> {
        self.opt_list(name)?
            .ok_or_else(|| CatalogError::MissingParam { id: self.id.to_string(), name: name.to_string() })
    }

    fn opt_text(&self, name: &str) -> Result<Option<&str>, CatalogError> {
        match self.p.0.get(name) {
            None => Ok(None),
            Some(ParamValue::Text(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.err(name, "expected text")),
        }
    }

    fn direction(&self, default: Direction) -> Result<Direction, CatalogError> {
        match self.opt_text("direction")? {
            None => Ok(default),
            Some("upper") => Ok(Direction::Upper),
            Some("lower") => Ok(Direction::Lower),
            Some(_) => Err(self.err("direction", "expected upper or lower")),
        }
    }

    fn reference(&self, mu: f64) -> Result<Reference, CatalogError> {
        match self.opt_text("reference")? {
            None | Some("exact") => Ok(Reference::Exact(mu)),
            Some("upper") | Some("upper_estimate") => Ok(Reference::UpperEstimate(mu)),
            Some("lower") | Some("lower_estimate") => Ok(Reference::LowerEstimate(mu)),
            Some(_) => Err(self.err("reference", "expected exact, upper or lower")),
        }
    }

    fn range(&self) -> Result<RangeSide, CatalogError> {
        let s = self
            .opt_text("range")?
            .ok_or_else(|| CatalogError::MissingParam { id: self.id.to_string(), name: "range".into() })?;
        RangeSide::from_name(s).ok_or_else(|| self.err("range", "expected above, below or both"))
    }
}

fn check_names(id: &str, schema: &str, p: &Params) -> Result<(), CatalogError> {
    let specs = parse_schema(schema);
    for k in p.0.keys() {
        if !specs.iter().any(|s| &s.name == k) {
            let accepted: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
            return Err(CatalogError::UnknownParam { id: id.to_string(), name: k.clone(), accepted: accepted.join(", ") });
        }
    }
    for s in specs.iter().filter(|s| s.required) {
        if !p.0.contains_key(&s.name) {
            return Err(CatalogError::MissingParam { id: id.to_string(), name: s.name.clone() });
        }
    }
    Ok(())
}

/// Evaluates the bound registered under `id`.
pub fn evaluate(id: &str, params: &Params) -> Result<BoundResult, CatalogError> {
    let all = entries();
    let entry = all.iter().find(|e| e.id == id).ok_or_else(|| CatalogError::UnknownId {
        id: id.to_string(),
        closest: closest_ids(id, 3),
    })?;
    if id == "maxsum" {
        return eval_maxsum(params);
    }
    check_names(id, entry.schema, params)?;
    let a = Args { id, p: params };
    let (head, tail) = id.split_once('.').unwrap_or((id, ""));
    let r = match head {
        "markov" if tail.is_empty() => {
            let mu = a.num("mu")?;
            let t = a.num("t")?;
            let q = match a.direction(Direction::Upper)? {
                Direction::Upper => TailQuery::upper_abs(mu, t),
                Direction::Lower => TailQuery::lower_abs(mu, t),
            };
            moments::markov(&q.with_reference(a.reference(mu)?))
        }
        "markov" => moments::markov_factor(a.opt_num("mu")?.unwrap_or(1.0), a.num("lambda")?),
        "reverse_markov" if tail.is_empty() => moments::reverse_markov(a.num("mu")?, a.num("u")?, a.num("t")?),
        "reverse_markov" => moments::reverse_markov_gt(a.num("mu")?, a.num("u")?, a.num("t")?),
        "chebyshev" => moments::chebyshev(a.num("mu")?, a.num("var")?, a.num("lambda")?),
        "cantelli" => moments::cantelli(a.num("mu")?, a.num("var")?, a.num("lambda")?, a.direction(Direction::Upper)?),
        "second_moment" if tail == "indicators" => moments::second_moment_indicators(a.num("mu")?),
        "second_moment" => {
            let (m, e) = moments::second_moment(a.num("mu")?, a.num("var")?, a.opt_num("ex2")?);
            if tail == "mean" {
                m
            } else {
                e
            }
        }
        "chernoff" => eval_chernoff(&a, tail)?,
        "geom" => {
            let v = GeomVariant::from_name(tail).expect("registered");
            let probs = a.list("p")?;
            let spec = match (a.opt_int("n")?, probs.len()) {
                (Some(n), 1) => GeomSumSpec::identical(n as usize, probs[0]),
                (Some(n), k) if n as usize == k => GeomSumSpec::new(probs),
                (Some(_), _) => return Err(a.err("n", "n must match the length of p")),
                (None, _) => GeomSumSpec::new(probs),
            }
            .map_err(|e| a.err("p", &e.to_string()))?;
            let mu = spec.mu();
            let dir = v.direction();
            let given: Vec<&str> = ["delta", "lambda", "t"].into_iter().filter(|k| params.0.contains_key(*k)).collect();
            if given.len() != 1 {
                return Err(a.err("delta", "give exactly one of delta, lambda, t"));
            }
            let q = match (given[0], dir) {
                ("delta", Direction::Upper) => TailQuery::upper_mult(mu, a.num("delta")?),
                ("delta", Direction::Lower) => TailQuery::lower_mult(mu, a.num("delta")?),
                ("lambda", Direction::Upper) => TailQuery::upper_add(mu, a.num("lambda")?),
                ("lambda", Direction::Lower) => TailQuery::lower_add(mu, a.num("lambda")?),
                (_, Direction::Upper) => TailQuery::upper_abs(mu, a.num("t")?),
                (_, Direction::Lower) => TailQuery::lower_abs(mu, a.num("t")?),
            };
            geom_sum_bound_with(&spec, &q, v, a.opt_num("C")?)
        }
        "coupon" => {
            let n = a.int("n")?;
            let tail = match id {
                "coupon.upper" => CouponTail::Upper { eps: a.num("eps")? },
                "coupon.upper.mult" => CouponTail::UpperMult { eps: a.num("eps")? },
                "coupon.lower" => CouponTail::Lower { eps: a.num("eps")? },
                "coupon.lower.mult" => CouponTail::LowerMult { eps: a.num("eps")? },
                "coupon.chebyshev" => CouponTail::Chebyshev { eps: a.num("eps")? },
                "coupon.witt_upper" => CouponTail::WittUpper { eps: a.num("eps")? },
                "coupon.witt_lower" => CouponTail::WittLower { eps: a.num("eps")? },
                "coupon.markov" => CouponTail::Markov { lambda: a.num("lambda")? },
                _ => CouponTail::Union { t: a.num("t")? },
            };
            coupon_bounds(n, tail).1
        }
        "binomial" => {
            let v = BinomialVariant::from_name(tail).expect("registered");
            binomial_bounds(a.int("n")?, a.num("p")?, a.int("k")?, v)
        }
        "anti" => match tail {
            "sqrtn12_upper" => anti::sqrtn12(a.int("n")?, a.num("p")?, true),
            "sqrtn12_lower" => anti::sqrtn12(a.int("n")?, a.num("p")?, false),
            "general_sqrt" => anti::general_sqrt(
                a.num("mean")?,
                a.num("var")?,
                a.num("v0")?,
                a.opt_num("c")?,
                a.opt_num("C")?,
                a.direction(Direction::Upper)? == Direction::Upper,
            ),
            "point_cap" => anti::point_cap(a.num("var")?, a.opt_num("k")?),
            "feige" => anti::feige(a.num("mean")?, a.num("delta")?, a.opt_num("max_mu_i")?.unwrap_or(1.0)),
            _ => {
                let v = Exceed::from_name(tail.trim_start_matches("exceed_")).expect("registered");
                anti::exceed_mean(a.int("n")?, a.num("p")?, v)
            }
        },
        "martingale" if tail == "cga" => cga_neutral(a.int("K")?, a.int("T")?),
        "martingale" => {
            let v = MartingaleVariant::from_name(tail).expect("registered");
            let c = a.list("c")?;
            let c = match (a.opt_int("n")?, c.len()) {
                (Some(n), 1) => alloc::vec![c[0]; n as usize],
                (Some(n), k) if n as usize == k => c,
                (Some(_), _) => return Err(a.err("n", "n must match the length of c")),
                (None, _) => c,
            };
            martingale_bounds(&c, a.num("lambda")?, v, a.direction(Direction::Upper)?, a.opt_num("mean")?)
        }
        "superexp" => misc::solve_delta_superexp(a.num("t")?),
        "sbm" => {
            let q = match tail {
                "tail_k" => SbmQuery::TailK { k: a.num("k")? },
                "quantile_p" => SbmQuery::QuantileP { p: a.num("p")? },
                _ => SbmQuery::QuantilePT { p: a.num("p")?, t: a.int("T")? },
            };
            misc::sbm_bounds(a.num("alpha")?, q)
        }
        "tail_to_expectation" => {
            misc::tail_to_expectation(a.num("alpha")?, a.num("beta")?, a.num("T")?, TailForm::from_name(tail).expect("registered"))
        }
        "union" => misc::union_bonferroni(&a.list("probs")?, None, 1).0,
        "bonferroni" => {
            let pairs = a.opt_list("pairs")?;
            misc::union_bonferroni(&a.list("probs")?, pairs.as_deref(), 2).1.expect("second order requested")
        }
        "blind" => {
            let n = u32::try_from(a.int("n")?).map_err(|_| a.err("n", "too large"))?;
            if tail == "union" {
                misc::blind_union(n, a.num("L")?)
            } else {
                misc::blind_bonferroni(n, a.num("L")?)
            }
        }
        "runtime" => {
            let n = u32::try_from(a.int("n")?).map_err(|_| a.err("n", "too large"))?;
            if tail == "needle" {
                misc::runtime_needle(n, a.num("c")?, a.num("eta")?)
            } else {
                misc::runtime_oea_lower(n, a.num("eps")?)
            }
        }
        "cond_binomial" => misc::conditional_binomial_ub(a.int("n")?, a.num("p")?, a.int("k")?),
        "initial_distance" => misc::initial_distance(a.int("n")?, a.num("lambda")?),
        "dom" => {
            let ex = match tail {
                "onemax" => RuntimeExample::Onemax { n: a.int("n")?, delta: a.num("delta")? },
                "generic_nn" => RuntimeExample::GenericNn { n: a.int("n")?, gamma: a.num("gamma")? },
                "eulerian" => RuntimeExample::Eulerian { m: a.int("m")?, delta: a.num("delta")? },
                "sorting_inversions" => RuntimeExample::SortingInversions { n: a.int("n")?, delta: a.num("delta")? },
                "sorting_tree" => RuntimeExample::SortingTree { n: a.int("n")?, delta: a.num("delta")? },
                _ => RuntimeExample::Sssp { n: a.int("n")?, l: a.int("l")?, eps: a.num("eps")? },
            };
            domination_runtime_example(ex)
        }
        _ => unreachable!("registered id without dispatcher: {id}"),
    };
    Ok(r)
}

fn eval_chernoff(a: &Args<'_>, tail: &str) -> Result<BoundResult, CatalogError> {
    let r = if let Some(v) = tail.strip_prefix("mult.upper.") {
        let mu = a.num("mu")?;
        let reference = a.reference(mu)?;
        let v = MultUpper::from_name(v).expect("registered");
        match (v, a.opt_num("k")?) {
            (MultUpper::TwoPow, Some(k)) => chernoff::chernoff_two_pow(reference, k),
            (MultUpper::TwoPow, None) => chernoff::chernoff_mult_upper(reference, None, a.num("delta")?, v),
            _ => chernoff::chernoff_mult_upper(reference, a.opt_int("n")?, a.num("delta")?, v),
        }
    } else if let Some(v) = tail.strip_prefix("mult.lower.") {
        let mu = a.num("mu")?;
        let v = MultLower::from_name(v).expect("registered");
        chernoff::chernoff_mult_lower(a.reference(mu)?, a.opt_int("n")?, a.num("delta")?, v)
    } else if tail == "mult.two_sided" {
        chernoff::chernoff_two_sided(a.num("mu")?, a.num("delta")?)
    } else if let Some(rest) = tail.strip_prefix("add.") {
        let (dir, v) = rest.split_once('.').expect("registered");
        let dir = if dir == "upper" { Direction::Upper } else { Direction::Lower };
        let mu = a.num("mu")?;
        chernoff::chernoff_mult_additive(a.reference(mu)?, a.opt_int("n")?, a.num("lambda")?, dir, v)
    } else if tail == "additive" {
        chernoff::chernoff_additive(&Ranges::Unit(a.int("n")?), a.num("lambda")?, a.direction(Direction::Upper)?, a.opt_num("mu")?)
    } else if tail == "additive.ranges" {
        chernoff::chernoff_additive(&Ranges::Lengths(a.list("c")?), a.num("lambda")?, a.direction(Direction::Upper)?, a.opt_num("mu")?)
    } else if tail == "variance.mult_lin" {
        let mu = a.num("mu")?;
        chernoff::chernoff_variance_mult(
            a.reference(mu)?,
            a.num("delta")?,
            a.num("sigma2")?,
            a.num("b")?,
            a.direction(Direction::Upper)?,
            a.range()?,
        )
    } else {
        let v = VarVariant::from_name(tail.trim_start_matches("variance.")).expect("registered");
        let info = VarianceInfo { sigma2: a.num("sigma2")?, b: a.num("b")? };
        chernoff::chernoff_variance(info, a.num("lambda")?, a.opt_int("n")?, a.direction(Direction::Upper)?, a.range()?, v, a.opt_num("mu")?)
    };
    Ok(r)
}

fn eval_maxsum(params: &Params) -> Result<BoundResult, CatalogError> {
    let base_id = match params.0.get("base") {
        Some(ParamValue::Text(s)) => s.clone(),
        Some(_) => {
            return Err(CatalogError::BadParam { id: "maxsum".into(), name: "base".into(), msg: "expected a bound id".into() })
        }
        None => return Err(CatalogError::MissingParam { id: "maxsum".into(), name: "base".into() }),
    };
    let mut rest = params.clone();
    rest.0.remove("base");
    let base = evaluate(&base_id, &rest)?;
    let lambda = match rest.0.get("lambda") {
        Some(ParamValue::Num(x)) => *x,
        _ => f64::NAN,
    };
    let upper = !matches!(base.event, Some(super::Event::Le { .. }));
    Ok(misc::max_partial_sums(&base, lambda, upper))
}

/// Ids grouped by leading component, for coverage reports.
pub fn families() -> BTreeMap<String, Vec<String>> {
    let mut m: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in ids() {
        let head = id.split('.').next().unwrap_or(&id).to_string();
        m.entry(head).or_default().push(id);
    }
    m
}
