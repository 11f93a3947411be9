//! Exact finite discrete distributions: the oracle every bound is checked against.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{self, CompensatedSum};
use crate::query::{Direction, TailQuery};

/// Normalization tolerance `|Σ mass + tail_deficit − 1|`.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DistError {
    #[error("probability {name} = {value} outside {range}")]
    Probability { name: &'static str, value: f64, range: &'static str },
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("support and mass lengths differ ({0} vs {1})")]
    Length(usize, usize),
    #[error("support not strictly ascending at index {0}")]
    Unsorted(usize),
    #[error("negative or non-finite mass at index {0}")]
    Mass(usize),
    #[error("masses sum to {0} (with tail deficit); expected 1")]
    Normalization(f64),
}

fn check_prob(name: &'static str, p: f64) -> Result<(), DistError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(DistError::Probability { name, value: p, range: "[0,1]" })
    }
}

/// A finite distribution on an ascending support, possibly with probability
/// mass truncated away (`tail_deficit`).
///
/// Truncated mass sits at values no smaller than `deficit_floor`; oracles
/// use this to stay conservative for both tails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct FiniteDist {
    support: Vec<f64>,
    mass: Vec<f64>,
    tail_deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    deficit_floor: Option<f64>,
}

#[derive(Deserialize)]
struct RawDist {
    support: Vec<f64>,
    mass: Vec<f64>,
    #[serde(default)]
    tail_deficit: f64,
    #[serde(default)]
    deficit_floor: Option<f64>,
}

impl TryFrom<RawDist> for FiniteDist {
    type Error = DistError;
    fn try_from(r: RawDist) -> Result<Self, DistError> {
        let mut d = FiniteDist::new(r.support, r.mass, r.tail_deficit)?;
        if d.tail_deficit > 0.0 {
            d.deficit_floor = r.deficit_floor;
        }
        Ok(d)
    }
}

impl fmt::Display for FiniteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteDist({} points", self.len())?;
        if self.tail_deficit > 0.0 {
            write!(f, ", deficit {:e}", self.tail_deficit)?;
        }
        write!(f, ")")
    }
}

impl FiniteDist {
    /// Validating constructor.
    pub fn new(support: Vec<f64>, mass: Vec<f64>, tail_deficit: f64) -> Result<Self, DistError> {
        if support.len() != mass.len() {
            return Err(DistError::Length(support.len(), mass.len()));
        }
        if support.is_empty() {
            return Err(DistError::Parameter("empty support"));
        }
        for i in 1..support.len() {
            if !(support[i] > support[i - 1]) {
                return Err(DistError::Unsorted(i));
            }
        }
        for (i, &m) in mass.iter().enumerate() {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(DistError::Mass(i));
            }
        }
        if !(tail_deficit >= 0.0) || tail_deficit > 1.0 {
            return Err(DistError::Parameter("tail_deficit outside [0,1]"));
        }
        let total = math::sum(mass.iter().copied()) + tail_deficit;
        if (total - 1.0).abs() > NORM_TOL {
            return Err(DistError::Normalization(total));
        }
        Ok(FiniteDist { support, mass, tail_deficit, deficit_floor: None })
    }

    fn raw(support: Vec<f64>, mass: Vec<f64>, tail_deficit: f64, deficit_floor: Option<f64>) -> Self {
        FiniteDist { support, mass, tail_deficit, deficit_floor }
    }

    /// Point mass at `v`.
    pub fn point(v: f64) -> Self {
        Self::raw(vec![v], vec![1.0], 0.0, None)
    }

    /// Builds a distribution from unordered `(value, mass)` pairs, merging
    /// equal values.
    pub fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Result<Self, DistError> {
        if pairs.iter().any(|(v, _)| !v.is_finite()) {
            return Err(DistError::Parameter("non-finite support value"));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut mass: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, m) in pairs {
            if support.last() == Some(&v) {
                *mass.last_mut().unwrap() += m;
            } else {
                support.push(v);
                mass.push(m);
            }
        }
        Self::new(support, mass, 0.0)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    /// Smallest value the truncated mass may take, if any was truncated.
    pub fn deficit_floor(&self) -> Option<f64> {
        if self.tail_deficit > 0.0 {
            self.deficit_floor
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.tail_deficit == 0.0
    }

    pub fn min_value(&self) -> f64 {
        self.support[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// `Σ mass + tail_deficit`.
    pub fn total(&self) -> f64 {
        math::sum(self.mass.iter().copied()) + self.tail_deficit
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.mass.iter().copied())
    }

    /// `Pr[X = v]` (0 off the support).
    pub fn mass_at(&self, v: f64) -> f64 {
        match self.support.binary_search_by(|s| s.partial_cmp(&v).unwrap()) {
            Ok(i) => self.mass[i],
            Err(_) => 0.0,
        }
    }

    /// Largest point probability.
    pub fn max_mass(&self) -> f64 {
        self.mass.iter().copied().fold(0.0, f64::max)
    }

    /// Drops zero-mass support points (keeps at least one point).
    pub fn trimmed(&self) -> Self {
        let mut support = Vec::new();
        let mut mass = Vec::new();
        for (v, m) in self.iter() {
            if m > 0.0 {
                support.push(v);
                mass.push(m);
            }
        }
        if support.is_empty() {
            support.push(self.support[0]);
            mass.push(0.0);
        }
        Self::raw(support, mass, self.tail_deficit, self.deficit_floor)
    }

    /// Retained-mass CDF `Pr[X ≤ v]`, without any truncated mass.
    pub fn cdf(&self, v: f64) -> f64 {
        let mut s = CompensatedSum::new();
        for (x, m) in self.iter() {
            if x > v {
                break;
            }
            s.add(m);
        }
        s.value()
    }

    /// Conservative (never under-reporting) `Pr[X ≥ t]`: includes the whole
    /// truncated mass. Support points within `1e-9·max(1,|t|)` of `t` count as
    /// reaching it, so float noise in a resolved threshold never drops mass.
    pub fn tail_ge(&self, t: f64) -> f64 {
        let t = t - threshold_tol(t);
        let i = self.support.partition_point(|&s| s < t);
        let mut s = CompensatedSum::new();
        for &m in &self.mass[i..] {
            s.add(m);
        }
        s.add(self.tail_deficit);
        s.value().min(1.0)
    }

    /// Conservative `Pr[X ≤ t]`: retained mass plus the truncated mass whenever
    /// it could lie at or below `t`.
    pub fn tail_le(&self, t: f64) -> f64 {
        let t = t + threshold_tol(t);
        let i = self.support.partition_point(|&s| s <= t);
        let mut s = CompensatedSum::new();
        for &m in &self.mass[..i] {
            s.add(m);
        }
        if self.tail_deficit > 0.0 {
            match self.deficit_floor {
                Some(f) if f > t => {}
                _ => s.add(self.tail_deficit),
            }
        }
        s.value().min(1.0)
    }

    /// `[lo, hi]` bracket of `Pr[X ≥ t]` (lo excludes truncated mass).
    pub fn tail_ge_interval(&self, t: f64) -> (f64, f64) {
        let hi = self.tail_ge(t);
        ((hi - self.tail_deficit).max(0.0), hi)
    }

    /// Two-sided conservative `Pr[|X − c| ≥ l]`.
    pub fn two_sided(&self, c: f64, l: f64) -> f64 {
        if l <= 0.0 {
            return 1.0;
        }
        (self.tail_ge(c + l) + self.tail_le(c - l)).min(1.0)
    }

    /// Distribution of `a·X + b` (`a > 0`).
    pub fn affine(&self, a: f64, b: f64) -> Self {
        assert!(a > 0.0, "affine map must be increasing");
        let support = self.support.iter().map(|&v| a * v + b).collect();
        Self::raw(support, self.mass.clone(), self.tail_deficit, self.deficit_floor.map(|f| a * f + b))
    }

    /// Distribution of `c − X`.
    pub fn reflect(&self, c: f64) -> Self {
        let support = self.support.iter().rev().map(|&v| c - v).collect();
        let mass = self.mass.iter().rev().copied().collect();
        // The truncated mass now sits at the bottom; there is no finite floor.
        Self::raw(support, mass, self.tail_deficit, None)
    }

    /// CSV rows `(value, mass, cdf)`.
    pub fn csv_rows(&self) -> Vec<(f64, f64, f64)> {
        let mut acc = CompensatedSum::new();
        self.iter()
            .map(|(v, m)| {
                acc.add(m);
                (v, m, acc.value())
            })
            .collect()
    }

    fn all_integer(&self) -> bool {
        self.support.iter().all(|&v| v == math::floor(v) && v.abs() < 1e15)
    }
}

fn threshold_tol(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

/// Independent Bernoulli sum `X = Σ Xᵢ`, `Pr[Xᵢ = 1] = pᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonBinomialSpec {
    pub probs: Vec<f64>,
}

impl PoissonBinomialSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self, DistError> {
        if probs.is_empty() {
            return Err(DistError::Parameter("need n ≥ 1 variables"));
        }
        for &p in &probs {
            check_prob("p_i", p)?;
        }
        Ok(PoissonBinomialSpec { probs })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn mean(&self) -> f64 {
        math::sum(self.probs.iter().copied())
    }

    pub fn variance(&self) -> f64 {
        math::sum(self.probs.iter().map(|p| p * (1.0 - p)))
    }

    /// Common success probability, if all are equal.
    pub fn common_p(&self) -> Option<f64> {
        let p = self.probs[0];
        self.probs.iter().all(|&q| q == p).then_some(p)
    }
}

/// Independent geometric variables (trials convention, support from 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeomSumSpec {
    pub probs: Vec<f64>,
}

impl GeomSumSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self, DistError> {
        if probs.is_empty() {
            return Err(DistError::Parameter("need n ≥ 1 variables"));
        }
        for &p in &probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(DistError::Probability { name: "p_i", value: p, range: "(0,1]" });
            }
        }
        Ok(GeomSumSpec { probs })
    }

    pub fn identical(n: usize, p: f64) -> Result<Self, DistError> {
        Self::new(vec![p; n])
    }

    /// Coupon collector: `p_k = (n−k)/n`, `k = 0..n−1`.
    pub fn coupon(n: usize) -> Result<Self, DistError> {
        Self::new((0..n).map(|k| (n - k) as f64 / n as f64).collect())
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn p_min(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `μ = Σ 1/pᵢ`
    pub fn mu(&self) -> f64 {
        math::sum(self.probs.iter().map(|p| 1.0 / p))
    }

    /// `s = Σ 1/pᵢ²`
    pub fn s(&self) -> f64 {
        math::sum(self.probs.iter().map(|p| 1.0 / (p * p)))
    }

    pub fn variance(&self) -> f64 {
        math::sum(self.probs.iter().map(|p| (1.0 - p) / (p * p)))
    }

    pub fn common_p(&self) -> Option<f64> {
        let p = self.probs[0];
        self.probs.iter().all(|&q| q == p).then_some(p)
    }
}

/// Marked count in a uniform `n`-subset of `[N]` with `m` marked elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeomSpec {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: u64,
    pub m: u64,
}

impl HypergeomSpec {
    pub fn new(big_n: u64, n: u64, m: u64) -> Result<Self, DistError> {
        if n > big_n || m > big_n {
            return Err(DistError::Parameter("need n ≤ N and m ≤ N"));
        }
        Ok(HypergeomSpec { big_n, n, m })
    }

    pub fn mean(&self) -> f64 {
        if self.big_n == 0 {
            0.0
        } else {
            (self.n as f64) * (self.m as f64) / self.big_n as f64
        }
    }
}

/// Dense masses on `lo..=hi` from the mode outward by a ratio recurrence,
/// then normalized. `ratio(k)` is `Pr[k+1]/Pr[k]` and must be finite and
/// positive for `lo ≤ k < hi`.
fn from_ratio(lo: u64, hi: u64, mode: u64, ratio: impl Fn(u64) -> f64) -> Vec<f64> {
    let len = (hi - lo + 1) as usize;
    let mut w = vec![0.0f64; len];
    let mi = (mode - lo) as usize;
    w[mi] = 1.0;
    for k in mode..hi {
        let i = (k - lo) as usize;
        w[i + 1] = w[i] * ratio(k);
    }
    let mut k = mode;
    while k > lo {
        let i = (k - lo) as usize;
        w[i - 1] = w[i] / ratio(k - 1);
        k -= 1;
    }
    let total = math::sum(w.iter().copied());
    for x in &mut w {
        *x /= total;
    }
    w
}

/// `Bin(n, p)` on support `0..=n`.
pub fn pmf_binomial(n: u64, p: f64) -> Result<FiniteDist, DistError> {
    check_prob("p", p)?;
    let support: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let mut mass = vec![0.0; (n + 1) as usize];
    if p == 0.0 {
        mass[0] = 1.0;
    } else if p == 1.0 {
        mass[n as usize] = 1.0;
    } else {
        let q = 1.0 - p;
        let mode = (((n + 1) as f64 * p) as u64).min(n);
        let r = p / q;
        mass = from_ratio(0, n, mode, |k| (n - k) as f64 / (k + 1) as f64 * r);
    }
    Ok(FiniteDist::raw(support, mass, 0.0, None))
}

/// Exact Poisson-binomial pmf by the prefix DP.
pub fn pmf_poisson_binomial(spec: &PoissonBinomialSpec) -> Result<FiniteDist, DistError> {
    let spec = PoissonBinomialSpec::new(spec.probs.clone())?;
    let n = spec.n();
    let mut f = vec![0.0f64; n + 1];
    f[0] = 1.0;
    for (i, &p) in spec.probs.iter().enumerate() {
        let q = 1.0 - p;
        for j in (1..=i + 1).rev() {
            f[j] = f[j] * q + f[j - 1] * p;
        }
        f[0] *= q;
    }
    let support = (0..=n).map(|k| k as f64).collect();
    Ok(FiniteDist::raw(support, f, 0.0, None))
}

/// Hypergeometric pmf on `max(0, n+m−N) ..= min(n, m)`.
///
/// Symmetric in `n` and `m` bit-for-bit: every step multiplies exact integers
/// in commutative order.
pub fn pmf_hypergeom(spec: &HypergeomSpec) -> Result<FiniteDist, DistError> {
    let HypergeomSpec { big_n, n, m } = HypergeomSpec::new(spec.big_n, spec.n, spec.m)?;
    let lo = (n + m).saturating_sub(big_n);
    let hi = n.min(m);
    let support: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
    if lo == hi {
        return Ok(FiniteDist::raw(support, vec![1.0], 0.0, None));
    }
    let (nf, mf, bf) = (n as f64, m as f64, big_n as f64);
    let mode = (((nf + 1.0) * (mf + 1.0) / (bf + 2.0)) as u64).clamp(lo, hi);
    let ratio = |k: u64| {
        let k = k as f64;
        let num = (mf - k) * (nf - k);
        let den = (k + 1.0) * (bf - mf - nf + k + 1.0);
        num / den
    };
    let mass = from_ratio(lo, hi, mode, ratio);
    Ok(FiniteDist::raw(support, mass, 0.0, None))
}

/// `Geom(p)` on `1..=K` with `K` minimal such that `(1−p)^K ≤ eps`.
pub fn pmf_geometric_truncated(p: f64, eps: f64) -> Result<FiniteDist, DistError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(DistError::Probability { name: "p", value: p, range: "(0,1]" });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DistError::Parameter("eps must lie in (0,1)"));
    }
    let q = 1.0 - p;
    if q == 0.0 {
        return Ok(FiniteDist::point(1.0));
    }
    let lq = math::log1p(-p);
    let mut k = math::ceil(math::ln(eps) / lq).max(1.0) as u64;
    while k > 1 && math::exp((k - 1) as f64 * lq) <= eps {
        k -= 1;
    }
    while math::exp(k as f64 * lq) > eps {
        k += 1;
    }
    let support: Vec<f64> = (1..=k).map(|i| i as f64).collect();
    let mass: Vec<f64> = (0..k).map(|i| math::exp(i as f64 * lq) * p).collect();
    let deficit = math::exp(k as f64 * lq);
    Ok(FiniteDist::raw(support, mass, deficit, Some((k + 1) as f64)))
}

/// Distribution of the independent sum.
pub fn convolve(a: &FiniteDist, b: &FiniteDist) -> FiniteDist {
    let deficit = a.tail_deficit + b.tail_deficit - a.tail_deficit * b.tail_deficit;
    let floor = {
        let fa = a.deficit_floor().map(|f| f + b.min_value());
        let fb = b.deficit_floor().map(|f| f + a.min_value());
        match (fa, fb) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    };
    let span_a = a.max_value() - a.min_value();
    let span_b = b.max_value() - b.min_value();
    if a.all_integer() && b.all_integer() && span_a + span_b < 5.0e7 {
        let lo = a.min_value() + b.min_value();
        let len = (span_a + span_b) as usize + 1;
        let mut acc = vec![0.0f64; len];
        let mut hit = vec![false; len];
        let bi: Vec<usize> = b.support.iter().map(|&v| (v - b.min_value()) as usize).collect();
        for (va, ma) in a.iter() {
            let ia = (va - a.min_value()) as usize;
            for (j, &mb) in b.mass.iter().enumerate() {
                acc[ia + bi[j]] += ma * mb;
                hit[ia + bi[j]] = true;
            }
        }
        let mut support = Vec::new();
        let mut mass = Vec::new();
        for i in 0..len {
            if hit[i] {
                support.push(lo + i as f64);
                mass.push(acc[i]);
            }
        }
        return FiniteDist::raw(support, mass, deficit, floor);
    }
    let mut pairs = Vec::with_capacity(a.len() * b.len());
    for (va, ma) in a.iter() {
        for (vb, mb) in b.iter() {
            pairs.push((va + vb, ma * mb));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut support: Vec<f64> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    for (v, m) in pairs {
        if support.last() == Some(&v) {
            *mass.last_mut().unwrap() += m;
        } else {
            support.push(v);
            mass.push(m);
        }
    }
    FiniteDist::raw(support, mass, deficit, floor)
}

/// Truncated distribution of `Σ Geom(pᵢ)`, per-variable budget `eps/n`.
pub fn geom_sum_dist(spec: &GeomSumSpec, eps: f64) -> Result<FiniteDist, DistError> {
    let spec = GeomSumSpec::new(spec.probs.clone())?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DistError::Parameter("eps must lie in (0,1)"));
    }
    if let (Some(p), true) = (spec.common_p(), spec.n() >= 2) {
        return Ok(negative_binomial(spec.n(), p, eps));
    }
    let step = eps / spec.n() as f64;
    let mut acc = pmf_geometric_truncated(spec.probs[0], step)?;
    for &p in &spec.probs[1..] {
        acc = convolve(&acc, &pmf_geometric_truncated(p, step)?);
    }
    Ok(acc)
}

/// `Σ` of `n` i.i.d. `Geom(p)`: `Pr[S = k] = C(k−1, n−1) pⁿ (1−p)^{k−n}`,
/// truncated once the remaining mass is at most `eps`.
fn negative_binomial(n: usize, p: f64, eps: f64) -> FiniteDist {
    let nf = n as f64;
    if p >= 1.0 {
        return FiniteDist::point(nf);
    }
    let (lp, lq) = (math::ln(p), math::log1p(-p));
    let mode = nf + (nf - 1.0) * (1.0 - p) / p;
    let mut support = Vec::new();
    let mut mass = Vec::new();
    let mut acc = CompensatedSum::new();
    let mut k = n as u64;
    loop {
        let lm = math::ln_choose(k - 1, n as u64 - 1) + nf * lp + (k as f64 - nf) * lq;
        let m = math::exp(lm);
        support.push(k as f64);
        mass.push(m);
        acc.add(m);
        if k as f64 >= mode {
            // Beyond the mode the pmf ratio decreases, so the rest is at most m·r/(1−r).
            let r = k as f64 * (1.0 - p) / ((k + 1) as f64 - nf);
            if 1.0 - acc.value() <= eps || (r < 1.0 && m * r / (1.0 - r) <= eps * 1e-3) {
                break;
            }
        }
        k += 1;
    }
    let deficit = (1.0 - acc.value()).max(0.0);
    FiniteDist::raw(support, mass, deficit, Some((k + 1) as f64))
}

/// Conservative tail probability for a query.
pub fn tail(dist: &FiniteDist, q: &TailQuery) -> f64 {
    let t = q.threshold();
    match q.direction {
        Direction::Upper => dist.tail_ge(t),
        Direction::Lower => dist.tail_le(t),
    }
}

/// `(mean, variance)` of the retained mass.
pub fn moments(dist: &FiniteDist) -> (f64, f64) {
    let mean = math::sum(dist.iter().map(|(v, m)| v * m));
    let var = math::sum(dist.iter().map(|(v, m)| (v - mean) * (v - mean) * m));
    (mean, var.max(0.0))
}
