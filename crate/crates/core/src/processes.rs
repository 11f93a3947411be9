//! Seeded simulators: coupon collection, randomized local search, the
//! `(1+1) EA` and its `μ`-start variant, blind and unbiased search, the
//! neutral cGA frequency walk, and sampling without replacement.
//!
//! The optimum is always the all-ones string; every implemented objective
//! has it as unique optimum. Run `r` of master seed `s` draws from ChaCha
//! stream `(s, r)`, so results do not depend on scheduling.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ratio_to_f64;
use crate::math::{self, ln, log1p, sqrt};
use crate::mc::{stream_rng, MonteCarloEstimate};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ProcessError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },
    #[error("sample space of {states} outcomes exceeds the budget of {cap}")]
    Budget { states: f64, cap: f64 },
}

/// A bit string packed into 64-bit words (bit `i` is bit `i % 64` of word `i / 64`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    n: usize,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString { words: vec![0; n.div_ceil(64)], n }
    }

    pub fn ones(n: usize) -> Self {
        let mut b = BitString { words: vec![u64::MAX; n.div_ceil(64)], n };
        b.mask_tail();
        b
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut b = BitString { words: (0..n.div_ceil(64)).map(|_| rng.random::<u64>()).collect(), n };
        b.mask_tail();
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            if v {
                b.set(i, true);
            }
        }
        b
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    fn mask_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn hamming(&self, other: &BitString) -> u64 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    }

    /// Hamming distance to the all-ones optimum.
    pub fn distance_to_optimum(&self) -> u64 {
        self.n as u64 - self.count_ones()
    }

    pub fn is_optimal(&self) -> bool {
        self.distance_to_optimum() == 0
    }

    pub fn complement(&self) -> Self {
        let mut b = BitString { words: self.words.iter().map(|w| !w).collect(), n: self.n };
        b.mask_tail();
        b
    }

    /// Lexicographic comparison with bit `n−1` most significant.
    fn cmp_binary_value(&self, other: &BitString) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words).rev() {
            let d = a ^ b;
            if d != 0 {
                let top = 63 - d.leading_zeros();
                return if a >> top & 1 == 1 { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }
}

/// Standard bit mutation: every bit flips independently with probability `rate`.
pub fn mutate_standard<R: Rng + ?Sized>(x: &BitString, rate: f64, rng: &mut R) -> BitString {
    let mut z = x.clone();
    if rate <= 0.0 {
        return z;
    }
    if rate >= 1.0 {
        return x.complement();
    }
    if rate > 0.25 {
        for i in 0..x.n {
            if rng.random::<f64>() < rate {
                z.flip(i);
            }
        }
        return z;
    }
    // Skip ahead over runs of unflipped bits: the gap length is Geom(rate) − 1.
    let l = log1p(-rate);
    let mut i = 0usize;
    loop {
        let u = 1.0 - rng.random::<f64>();
        let gap = math::floor(ln(u) / l);
        if gap >= (x.n - i) as f64 {
            break;
        }
        i += gap as usize;
        z.flip(i);
        i += 1;
        if i >= x.n {
            break;
        }
    }
    z
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    Uniform,
    OnePoint,
}

pub fn crossover<R: Rng + ?Sized>(
    x: &BitString,
    y: &BitString,
    kind: CrossoverKind,
    rng: &mut R,
) -> Result<BitString, ProcessError> {
    if x.n != y.n {
        return Err(ProcessError::Length { left: x.n, right: y.n });
    }
    Ok(match kind {
        CrossoverKind::Uniform => {
            let mut z = x.clone();
            for (w, (a, b)) in z.words.iter_mut().zip(x.words.iter().zip(&y.words)) {
                let pick: u64 = rng.random();
                *w = (a & pick) | (b & !pick);
            }
            z.mask_tail();
            z
        }
        CrossoverKind::OnePoint => {
            let r = rng.random_range(0..=x.n);
            let x_first = rng.random::<bool>();
            one_point_at(x, y, r, x_first)?
        }
    })
}

/// The first `r` bits from one parent, the rest from the other.
pub fn one_point_at(x: &BitString, y: &BitString, r: usize, x_first: bool) -> Result<BitString, ProcessError> {
    if x.n != y.n {
        return Err(ProcessError::Length { left: x.n, right: y.n });
    }
    if r > x.n {
        return Err(ProcessError::Parameter(format!("cut {r} beyond length {}", x.n)));
    }
    let (a, b) = if x_first { (x, y) } else { (y, x) };
    let mut z = b.clone();
    for i in 0..r {
        z.set(i, a.get(i));
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Coupon,
    Rls,
    Oea,
    OeaMu,
    Blind,
    CgaNeutral,
    UnbiasedSearch,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 7] = [
        ProcessKind::Coupon,
        ProcessKind::Rls,
        ProcessKind::Oea,
        ProcessKind::OeaMu,
        ProcessKind::Blind,
        ProcessKind::CgaNeutral,
        ProcessKind::UnbiasedSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Coupon => "coupon",
            ProcessKind::Rls => "rls",
            ProcessKind::Oea => "oea",
            ProcessKind::OeaMu => "oea_mu",
            ProcessKind::Blind => "blind",
            ProcessKind::CgaNeutral => "cga_neutral",
            ProcessKind::UnbiasedSearch => "unbiased_search",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Strictly monotone pseudo-Boolean functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    OneMax,
    BinaryValue,
    /// `Σ wᵢxᵢ` with weights in `[1, 2)` drawn once from the master seed.
    RandomWeights,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    OneMax,
    Needle,
    StrictMonotone(Monotone),
}

impl Objective {
    /// `onemax`, `needle`, `strict_monotone(binary_value)`, ...
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().replace('-', "_");
        match s.as_str() {
            "onemax" => Some(Objective::OneMax),
            "needle" => Some(Objective::Needle),
            _ => {
                let inner = s.strip_prefix("strict_monotone(")?.strip_suffix(')')?;
                Some(Objective::StrictMonotone(match inner {
                    "onemax" => Monotone::OneMax,
                    "binary_value" => Monotone::BinaryValue,
                    "random_weights" | "random_weights_positive" => Monotone::RandomWeights,
                    _ => return None,
                }))
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            Objective::OneMax => "onemax".to_string(),
            Objective::Needle => "needle".to_string(),
            Objective::StrictMonotone(m) => format!(
                "strict_monotone({})",
                match m {
                    Monotone::OneMax => "onemax",
                    Monotone::BinaryValue => "binary_value",
                    Monotone::RandomWeights => "random_weights",
                }
            ),
        }
    }
}

struct Evaluator {
    objective: Objective,
    weights: Vec<f64>,
}

impl Evaluator {
    fn new(objective: Objective, n: usize, seed: u64) -> Self {
        let weights = if objective == Objective::StrictMonotone(Monotone::RandomWeights) {
            let mut rng = stream_rng(seed, u64::MAX);
            (0..n).map(|_| 1.0 + rng.random::<f64>()).collect()
        } else {
            Vec::new()
        };
        Evaluator { objective, weights }
    }

    fn fitness(&self, x: &BitString) -> f64 {
        match self.objective {
            Objective::OneMax | Objective::StrictMonotone(Monotone::OneMax) => x.count_ones() as f64,
            Objective::Needle => {
                if x.is_optimal() {
                    1.0
                } else {
                    0.0
                }
            }
            Objective::StrictMonotone(Monotone::BinaryValue) => {
                (0..x.n).filter(|&i| x.get(i)).map(|i| math::powf(2.0, i as f64)).sum()
            }
            Objective::StrictMonotone(Monotone::RandomWeights) => {
                math::sum((0..x.n).filter(|&i| x.get(i)).map(|i| self.weights[i]))
            }
        }
    }

    fn cmp(&self, a: &BitString, b: &BitString) -> Ordering {
        match self.objective {
            Objective::OneMax | Objective::StrictMonotone(Monotone::OneMax) => a.count_ones().cmp(&b.count_ones()),
            Objective::Needle => a.is_optimal().cmp(&b.is_optimal()),
            Objective::StrictMonotone(Monotone::BinaryValue) => a.cmp_binary_value(b),
            Objective::StrictMonotone(Monotone::RandomWeights) => {
                self.fitness(a).partial_cmp(&self.fitness(b)).unwrap_or(Ordering::Equal)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stake {
    #[default]
    None,
    /// Each coupon is pre-collected independently with probability ½.
    BinomialHalf,
}

/// One simulated process configuration.
///
/// Runtime conventions: `rls`, `oea` and `unbiased_search` count iterations
/// after the (uniform) initial point; `oea_mu` and `blind` count generated
/// search points including the initial ones; `coupon` counts draws;
/// `cga_neutral` counts frequency updates until absorption. The horizon caps
/// that counter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub n: usize,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    /// Mutation probability; `None` means `1/n`.
    #[serde(default)]
    pub rate: Option<f64>,
    #[serde(default = "one")]
    pub mu: usize,
    /// cGA population parameter.
    #[serde(default)]
    pub k: u64,
    #[serde(default)]
    pub stake: Stake,
    pub horizon: u64,
    pub seed: u64,
    /// Record a checkpoint every this many counter steps (0: none).
    #[serde(default)]
    pub checkpoint_every: u64,
}

fn default_objective() -> Objective {
    Objective::OneMax
}

fn one() -> usize {
    1
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, n: usize, objective: Objective, horizon: u64, seed: u64) -> Self {
        ProcessSpec { kind, n, objective, rate: None, mu: 1, k: 0, stake: Stake::None, horizon, seed, checkpoint_every: 0 }
    }

    pub fn coupon(n: usize, stake: Stake, seed: u64) -> Self {
        ProcessSpec { stake, ..Self::new(ProcessKind::Coupon, n, Objective::OneMax, u64::MAX, seed) }
    }

    pub fn cga(k: u64, horizon: u64, seed: u64) -> Self {
        ProcessSpec { k, ..Self::new(ProcessKind::CgaNeutral, 1, Objective::OneMax, horizon, seed) }
    }

    pub fn rate(&self) -> f64 {
        self.rate.unwrap_or(1.0 / self.n.max(1) as f64)
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        let bad = |m: &str| Err(ProcessError::Parameter(m.to_string()));
        if self.kind == ProcessKind::CgaNeutral {
            if self.k < 2 || self.k % 2 != 0 {
                return bad("K must be even and ≥ 2");
            }
            if self.k > (1 << 31) {
                return bad("K too large");
            }
        } else if self.n == 0 {
            return bad("n must be ≥ 1");
        }
        let r = self.rate();
        if !(r > 0.0 && r <= 1.0) {
            return bad("rate must lie in (0,1]");
        }
        if self.horizon == 0 {
            return bad("horizon must be ≥ 1");
        }
        if self.mu == 0 {
            return bad("mu must be ≥ 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub iteration: u64,
    /// Best fitness seen so far.
    pub best_fitness: f64,
    /// Distance to the optimum of the point generated at this iteration.
    pub distance: u64,
    /// Distance to the optimum of the current parent (best point).
    pub current_distance: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Value of the runtime counter when the optimum was reached, or the
    /// horizon when censored.
    pub runtime: u64,
    pub censored: bool,
    pub checkpoints: Vec<Checkpoint>,
    pub seed: u64,
    pub run: u64,
}

struct Recorder {
    every: u64,
    points: Vec<Checkpoint>,
}

impl Recorder {
    fn record(&mut self, it: u64, best: f64, d: u64, cur: u64, force: bool) {
        if self.every > 0 && (force || it % self.every == 0) {
            if self.points.last().is_some_and(|c| c.iteration == it) {
                return;
            }
            self.points.push(Checkpoint { iteration: it, best_fitness: best, distance: d, current_distance: cur });
        }
    }
}

fn finish(rec: Recorder, runtime: u64, censored: bool, spec: &ProcessSpec, run: u64) -> Trace {
    Trace { runtime, censored, checkpoints: rec.points, seed: spec.seed, run }
}

/// Run 0 of the spec.
pub fn simulate_search(spec: &ProcessSpec) -> Result<Trace, ProcessError> {
    simulate_run(spec, 0)
}

/// Runs `0..runs` sequentially.
pub fn simulate_runs(spec: &ProcessSpec, runs: u64) -> Result<Vec<Trace>, ProcessError> {
    (0..runs).map(|r| simulate_run(spec, r)).collect()
}

/// Run `run` of the spec, drawing from stream `(spec.seed, run)`.
pub fn simulate_run(spec: &ProcessSpec, run: u64) -> Result<Trace, ProcessError> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, run);
    let rng = &mut rng;
    let mut rec = Recorder { every: spec.checkpoint_every, points: Vec::new() };
    match spec.kind {
        ProcessKind::Coupon => {
            let (t, censored) = coupon_run(spec.n, spec.stake, spec.horizon, rng);
            Ok(finish(rec, t, censored, spec, run))
        }
        ProcessKind::CgaNeutral => {
            let (hit, _) = cga_walk(spec.k, spec.horizon, rng, false);
            Ok(match hit {
                Some(t) => finish(rec, t, false, spec, run),
                None => finish(rec, spec.horizon, true, spec, run),
            })
        }
        ProcessKind::Blind => {
            let ev = Evaluator::new(spec.objective, spec.n, spec.seed);
            let mut best = f64::NEG_INFINITY;
            let mut best_d = spec.n as u64;
            for t in 1..=spec.horizon {
                let x = BitString::random(rng, spec.n);
                let d = x.distance_to_optimum();
                let f = ev.fitness(&x);
                if f > best {
                    best = f;
                    best_d = d;
                }
                rec.record(t, best, d, best_d, d == 0);
                if d == 0 {
                    return Ok(finish(rec, t, false, spec, run));
                }
            }
            rec.record(spec.horizon, best, best_d, best_d, true);
            Ok(finish(rec, spec.horizon, true, spec, run))
        }
        ProcessKind::Rls | ProcessKind::Oea | ProcessKind::OeaMu => {
            let ev = Evaluator::new(spec.objective, spec.n, spec.seed);
            let rate = spec.rate();
            let mut counter = 0u64;
            let mut x = BitString::random(rng, spec.n);
            if spec.kind == ProcessKind::OeaMu {
                counter = 1;
                rec.record(1, ev.fitness(&x), x.distance_to_optimum(), x.distance_to_optimum(), true);
                if x.is_optimal() {
                    return Ok(finish(rec, 1, false, spec, run));
                }
                for _ in 1..spec.mu {
                    if counter >= spec.horizon {
                        return Ok(finish(rec, spec.horizon, true, spec, run));
                    }
                    counter += 1;
                    let y = BitString::random(rng, spec.n);
                    let d = y.distance_to_optimum();
                    // The last point of maximal fitness becomes the parent.
                    if ev.cmp(&y, &x) != Ordering::Less {
                        x = y;
                    }
                    rec.record(counter, ev.fitness(&x), d, x.distance_to_optimum(), d == 0);
                    if d == 0 {
                        return Ok(finish(rec, counter, false, spec, run));
                    }
                }
            } else {
                rec.record(0, ev.fitness(&x), x.distance_to_optimum(), x.distance_to_optimum(), true);
                if x.is_optimal() {
                    return Ok(finish(rec, 0, false, spec, run));
                }
            }
            while counter < spec.horizon {
                counter += 1;
                let y = if spec.kind == ProcessKind::Rls {
                    let mut y = x.clone();
                    y.flip(rng.random_range(0..spec.n));
                    y
                } else {
                    mutate_standard(&x, rate, rng)
                };
                let d = y.distance_to_optimum();
                if ev.cmp(&y, &x) != Ordering::Less {
                    x = y;
                }
                let cur = x.distance_to_optimum();
                if rec.every > 0 {
                    rec.record(counter, ev.fitness(&x), d, cur, cur == 0);
                }
                if cur == 0 {
                    return Ok(finish(rec, counter, false, spec, run));
                }
            }
            if rec.every > 0 {
                rec.record(counter, ev.fitness(&x), x.distance_to_optimum(), x.distance_to_optimum(), true);
            }
            Ok(finish(rec, spec.horizon, true, spec, run))
        }
        ProcessKind::UnbiasedSearch => {
            // Each new point is a standard-bit mutation of a uniformly chosen
            // earlier point; the history is kept, so memory grows with the run.
            let ev = Evaluator::new(spec.objective, spec.n, spec.seed);
            let rate = spec.rate();
            let x = BitString::random(rng, spec.n);
            let mut best = ev.fitness(&x);
            let mut best_d = x.distance_to_optimum();
            rec.record(0, best, best_d, best_d, true);
            if x.is_optimal() {
                return Ok(finish(rec, 0, false, spec, run));
            }
            let mut history = vec![x];
            for t in 1..=spec.horizon {
                let parent = &history[rng.random_range(0..history.len())];
                let y = mutate_standard(parent, rate, rng);
                let d = y.distance_to_optimum();
                let f = ev.fitness(&y);
                if f > best {
                    best = f;
                    best_d = d;
                }
                rec.record(t, best, d, best_d, d == 0);
                if d == 0 {
                    return Ok(finish(rec, t, false, spec, run));
                }
                history.push(y);
            }
            Ok(finish(rec, spec.horizon, true, spec, run))
        }
    }
}

fn coupon_run<R: Rng + ?Sized>(n: usize, stake: Stake, horizon: u64, rng: &mut R) -> (u64, bool) {
    let mut have = vec![false; n];
    let mut missing = n;
    if stake == Stake::BinomialHalf {
        for h in have.iter_mut() {
            if rng.random::<bool>() {
                *h = true;
                missing -= 1;
            }
        }
    }
    let mut t = 0u64;
    while missing > 0 {
        if t >= horizon {
            return (horizon, true);
        }
        t += 1;
        let i = rng.random_range(0..n);
        if !have[i] {
            have[i] = true;
            missing -= 1;
        }
    }
    (t, false)
}

/// Draws uniform coupon types until all `n` are collected.
pub fn simulate_coupon(n: usize, stake: Stake, seed: u64) -> Result<Trace, ProcessError> {
    simulate_run(&ProcessSpec::coupon(n, stake, seed), 0)
}

/// Trajectory of the neutral-bit frequency `X_t = j_t/K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgaPath {
    pub k: u64,
    pub converged: bool,
    /// First time `X_t ∈ {0, 1}`.
    pub hit_time: Option<u64>,
    /// `K·X_t` for `t = 0..`, up to absorption or the horizon.
    pub path: Vec<u64>,
}

impl CgaPath {
    pub fn frequencies(&self) -> Vec<f64> {
        self.path.iter().map(|&j| j as f64 / self.k as f64).collect()
    }
}

/// Moves `±1/K` with probability `X(1−X)` each, else holds; exact integer
/// arithmetic on `K·X`.
fn cga_walk<R: Rng + ?Sized>(k: u64, horizon: u64, rng: &mut R, keep: bool) -> (Option<u64>, Vec<u64>) {
    let kk = k * k;
    let mut j = k / 2;
    let mut path = Vec::new();
    if keep {
        path.push(j);
    }
    for t in 1..=horizon {
        let q = j * (k - j);
        let r = rng.random_range(0..kk);
        if r < q {
            j += 1;
        } else if r < 2 * q {
            j -= 1;
        }
        if keep {
            path.push(j);
        }
        if j == 0 || j == k {
            return (Some(t), path);
        }
    }
    (None, path)
}

pub fn simulate_cga_neutral(k: u64, horizon: u64, seed: u64) -> Result<CgaPath, ProcessError> {
    cga_neutral_run(k, horizon, seed, 0)
}

pub fn cga_neutral_run(k: u64, horizon: u64, seed: u64, run: u64) -> Result<CgaPath, ProcessError> {
    if k < 2 || k % 2 != 0 || k > (1 << 31) {
        return Err(ProcessError::Parameter(format!("K must be even and ≥ 2, got {k}")));
    }
    let mut rng = stream_rng(seed, run);
    let (hit, path) = cga_walk(k, horizon, &mut rng, true);
    Ok(CgaPath { k, converged: hit.is_some(), hit_time: hit, path })
}

/// Uniform subset of `[0, big_n)` of size `m` (partial Fisher–Yates).
pub fn uniform_subset<R: Rng + ?Sized>(big_n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..big_n).collect();
    for i in 0..m.min(big_n) {
        let j = rng.random_range(i..big_n);
        idx.swap(i, j);
    }
    idx.truncate(m.min(big_n));
    idx
}

/// `k` independent uniform subsets of the given sizes; entry `i` is whether
/// element `i` lies in at least one of them.
pub fn sample_partial_replacement<R: Rng + ?Sized>(
    big_n: usize,
    sizes: &[usize],
    rng: &mut R,
) -> Result<Vec<bool>, ProcessError> {
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > big_n) {
        return Err(ProcessError::Parameter(format!("subset size {s} outside [1, {big_n}]")));
    }
    let mut hit = vec![false; big_n];
    for &s in sizes {
        for i in uniform_subset(big_n, s, rng) {
            hit[i] = true;
        }
    }
    Ok(hit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegCorVerdict {
    pub outcomes: u64,
    pub sets_checked: u64,
    /// `Pr[∀i∈I: Xᵢ=1] ≤ Πᵢ Pr[Xᵢ=1]` for every checked `I`.
    pub one_negative: bool,
    /// `Pr[∀i∈I: Xᵢ=0] ≤ Πᵢ Pr[Xᵢ=0]` for every checked `I`.
    pub zero_negative: bool,
    /// Both inequalities hold with equality for every checked `I`.
    pub equality: bool,
    /// Largest ratio of joint probability to the product of marginals.
    pub max_ratio_one: f64,
    pub max_ratio_zero: f64,
    /// A set attaining a violation, if any.
    pub witness: Option<Vec<usize>>,
}

pub const NEGCOR_BUDGET: f64 = 1.0e7;
const NEGCOR_MAX_N: usize = 20;

fn combinations(n: usize, m: usize) -> Vec<u32> {
    let mut out = Vec::new();
    if m == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack over n-bit masks with m bits set.
    let mut c: u64 = (1u64 << m) - 1;
    while c < (1u64 << n) {
        out.push(c as u32);
        let u = c & c.wrapping_neg();
        let v = c + u;
        c = v + (((v ^ c) / u) >> 2);
    }
    out
}

/// Exhaustively checks 1- and 0-negative correlation of the hit indicators
/// of `k` independent uniform subsets of `[0, N)` with the given sizes, for
/// every index set of size at most `subsets_cap`.
pub fn check_negative_correlation(
    big_n: usize,
    sizes: &[usize],
    subsets_cap: usize,
) -> Result<NegCorVerdict, ProcessError> {
    if big_n == 0 || big_n > NEGCOR_MAX_N {
        return Err(ProcessError::Parameter(format!("N must lie in [1, {NEGCOR_MAX_N}]")));
    }
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > big_n) {
        return Err(ProcessError::Parameter(format!("subset size {s} outside [1, {big_n}]")));
    }
    let states: f64 = sizes.iter().map(|&s| math::choose(big_n as u64, s as u64)).product();
    if states > NEGCOR_BUDGET {
        return Err(ProcessError::Budget { states, cap: NEGCOR_BUDGET });
    }
    let families: Vec<Vec<u32>> = sizes.iter().map(|&s| combinations(big_n, s)).collect();
    let mut counts = vec![0u64; 1 << big_n];
    let mut idx = vec![0usize; families.len()];
    loop {
        let mask = idx.iter().zip(&families).fold(0u32, |m, (&i, f)| m | f[i]);
        counts[mask as usize] += 1;
        let mut j = 0;
        loop {
            if j == idx.len() {
                return negative_correlation_from_counts(big_n, &counts, subsets_cap);
            }
            idx[j] += 1;
            if idx[j] < families[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Same check for an arbitrary law on `{0,1}^N` given by outcome counts
/// indexed by bit mask.
pub fn negative_correlation_from_counts(
    big_n: usize,
    counts: &[u64],
    subsets_cap: usize,
) -> Result<NegCorVerdict, ProcessError> {
    if big_n > NEGCOR_MAX_N || counts.len() != 1 << big_n {
        return Err(ProcessError::Length { left: counts.len(), right: 1 << big_n.min(NEGCOR_MAX_N) });
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(ProcessError::Parameter("empty law".into()));
    }
    let full = (1usize << big_n) - 1;
    // sup[I] = #outcomes containing I; sub[J] = #outcomes inside J.
    let mut sup = counts.to_vec();
    let mut sub = counts.to_vec();
    for b in 0..big_n {
        for m in 0..=full {
            if m & (1 << b) == 0 {
                sup[m] += sup[m | (1 << b)];
            } else {
                sub[m] += sub[m ^ (1 << b)];
            }
        }
    }
    let ones: Vec<BigUint> = (0..big_n).map(|i| BigUint::from(sup[1 << i])).collect();
    let zeros: Vec<BigUint> = (0..big_n).map(|i| BigUint::from(sub[full ^ (1 << i)])).collect();
    let m_big = BigUint::from(total);
    let mut v = NegCorVerdict {
        outcomes: total,
        sets_checked: 0,
        one_negative: true,
        zero_negative: true,
        equality: true,
        max_ratio_one: 0.0,
        max_ratio_zero: 0.0,
        witness: None,
    };
    for set in 1..=full {
        let size = (set as u32).count_ones() as usize;
        if size > subsets_cap {
            continue;
        }
        v.sets_checked += 1;
        let scale = m_big.pow(size as u32 - 1);
        let mut p1 = BigUint::one();
        let mut p0 = BigUint::one();
        for i in (0..big_n).filter(|i| set >> i & 1 == 1) {
            p1 *= &ones[i];
            p0 *= &zeros[i];
        }
        let j1 = BigUint::from(sup[set]) * &scale;
        let j0 = BigUint::from(sub[full ^ set]) * &scale;
        for (joint, prod, flag, ratio) in
            [(&j1, &p1, &mut v.one_negative, &mut v.max_ratio_one), (&j0, &p0, &mut v.zero_negative, &mut v.max_ratio_zero)]
        {
            if joint != prod {
                v.equality = false;
            }
            if joint > prod {
                *flag = false;
                if v.witness.is_none() {
                    v.witness = Some((0..big_n).filter(|i| set >> i & 1 == 1).collect());
                }
            }
            let r = if prod.to_u64() == Some(0) {
                if joint.to_u64() == Some(0) {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                ratio_to_f64(joint, prod)
            };
            if r > *ratio {
                *ratio = r;
            }
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub lambda: f64,
    pub frequency: MonteCarloEstimate,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDistanceReport {
    pub n: u64,
    pub trials: u64,
    pub rows: Vec<DistanceRow>,
}

/// Frequencies of `|H(x, x*) − n/2| ≥ λ` for `λ ∈ {√n, 2√n, 3√n}`.
pub fn initial_distance_check(n: u64, trials: u64, seed: u64) -> Result<InitialDistanceReport, ProcessError> {
    let s = sqrt(n as f64);
    initial_distance_check_at(n, &[s, 2.0 * s, 3.0 * s], trials, seed)
}

pub fn initial_distance_check_at(
    n: u64,
    lambdas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<InitialDistanceReport, ProcessError> {
    if n == 0 {
        return Err(ProcessError::Parameter("n must be ≥ 1".into()));
    }
    let mut hits = vec![0u64; lambdas.len()];
    let mut rng = stream_rng(seed, 0);
    for _ in 0..trials {
        let h = BitString::random(&mut rng, n as usize).distance_to_optimum();
        let dev2 = (2 * h).abs_diff(n) as f64;
        for (c, &l) in hits.iter_mut().zip(lambdas) {
            if dev2 >= 2.0 * l - 1e-9 {
                *c += 1;
            }
        }
    }
    let rows = lambdas
        .iter()
        .zip(hits)
        .map(|(&lambda, c)| DistanceRow {
            lambda,
            frequency: MonteCarloEstimate::from_counts(c, trials, 0.99, seed),
            bound: 2.0 * math::exp(-2.0 * lambda * lambda / n as f64),
        })
        .collect();
    Ok(InitialDistanceReport { n, trials, rows })
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[u64], b: &[u64]) -> f64 {
    ks_sweep(a, b).0
}

/// `sup (F_b − F_a)`: how far `b` has more mass below a point than `a`.
/// Small values are consistent with `a ⪯ b` failing to be contradicted,
/// i.e. with `F_a ≥ F_b` everywhere.
pub fn ks_one_sided(a: &[u64], b: &[u64]) -> f64 {
    ks_sweep(a, b).1
}

fn ks_sweep(a: &[u64], b: &[u64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut two, mut one) = (0.0f64, 0.0f64);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => break,
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let d = j as f64 / nb - i as f64 / na;
        two = two.max(d.abs());
        one = one.max(d);
    }
    (two, one)
}

/// Asymptotic critical value of the two-sided two-sample test at level `alpha`.
pub fn ks_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let (a, b) = (na as f64, nb as f64);
    sqrt(-ln(alpha / 2.0) / 2.0) * sqrt((a + b) / (a * b))
}

/// Critical value of the one-sided statistic at level `alpha`.
pub fn ks_critical_one_sided(alpha: f64, na: usize, nb: usize) -> f64 {
    let (a, b) = (na as f64, nb as f64);
    sqrt(-ln(alpha) / 2.0) * sqrt((a + b) / (a * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::SimRng;
    use rand::SeedableRng;

    fn rng() -> SimRng {
        SimRng::seed_from_u64(7)
    }

    #[test]
    fn bitstring_basics() {
        let mut b = BitString::zeros(70);
        b.set(69, true);
        b.flip(3);
        assert_eq!(b.count_ones(), 2);
        assert_eq!(b.complement().count_ones(), 68);
        assert!(BitString::ones(70).is_optimal());
        assert_eq!(BitString::from_bools(&b.to_bools()), b);
        let x = BitString::random(&mut rng(), 130);
        assert_eq!(x.hamming(&x.complement()), 130);
    }

    #[test]
    fn mutation_extremes_and_mean() {
        let mut r = rng();
        let x = BitString::random(&mut r, 100);
        assert_eq!(mutate_standard(&x, 0.0, &mut r), x);
        assert_eq!(mutate_standard(&x, 1.0, &mut r), x.complement());
        for p in [0.01, 0.1, 0.5] {
            let trials = 20_000;
            let total: u64 = (0..trials).map(|_| x.hamming(&mutate_standard(&x, p, &mut r))).sum();
            let mean = total as f64 / trials as f64;
            let sd = (100.0 * p * (1.0 - p) / trials as f64).sqrt();
            assert!((mean - 100.0 * p).abs() < 4.0 * sd, "p={p}: {mean}");
        }
    }

    #[test]
    fn crossover_examples() {
        let mut r = rng();
        let x = BitString::random(&mut r, 50);
        let y = BitString::random(&mut r, 50);
        for k in [CrossoverKind::Uniform, CrossoverKind::OnePoint] {
            assert_eq!(crossover(&x, &x, k, &mut r).unwrap(), x);
        }
        assert_eq!(one_point_at(&x, &y, 0, true).unwrap(), y);
        assert_eq!(one_point_at(&x, &y, 50, true).unwrap(), x);
        assert!(crossover(&x, &BitString::zeros(3), CrossoverKind::Uniform, &mut r).is_err());
    }

    #[test]
    fn coupon_small() {
        assert_eq!(simulate_coupon(1, Stake::None, 3).unwrap().runtime, 1);
        let t = simulate_coupon(10, Stake::None, 3).unwrap();
        assert!(t.runtime >= 10 && !t.censored);
    }

    #[test]
    fn rls_single_bit() {
        for run in 0..50 {
            let s = ProcessSpec::new(ProcessKind::Rls, 1, Objective::OneMax, 100, 9);
            let t = simulate_run(&s, run).unwrap();
            assert!(t.runtime <= 1);
        }
    }

    #[test]
    fn determinism() {
        let mut s = ProcessSpec::new(ProcessKind::Oea, 20, Objective::OneMax, 10_000, 42);
        s.checkpoint_every = 5;
        assert_eq!(simulate_run(&s, 3).unwrap(), simulate_run(&s, 3).unwrap());
        assert_ne!(simulate_run(&s, 3).unwrap(), simulate_run(&s, 4).unwrap());
    }

    #[test]
    fn censoring() {
        let s = ProcessSpec::new(ProcessKind::Blind, 30, Objective::Needle, 5, 1);
        let t = simulate_search(&s).unwrap();
        assert!(t.censored && t.runtime == 5);
        let s = ProcessSpec::new(ProcessKind::Oea, 10, Objective::OneMax, 100_000, 1);
        assert!(!simulate_search(&s).unwrap().censored);
    }

    #[test]
    fn oea_mu_counts_initial_points() {
        let mut s = ProcessSpec::new(ProcessKind::OeaMu, 1, Objective::OneMax, 100, 5);
        s.mu = 3;
        for run in 0..40 {
            let t = simulate_run(&s, run).unwrap();
            assert!(t.runtime >= 1 && !t.censored);
        }
    }

    #[test]
    fn objectives_parse_and_order() {
        for s in ["onemax", "needle", "strict_monotone(binary_value)", "strict_monotone(random_weights)"] {
            assert_eq!(Objective::parse(s).unwrap().name(), s);
        }
        let ev = Evaluator::new(Objective::StrictMonotone(Monotone::BinaryValue), 3, 0);
        let a = BitString::from_bools(&[true, true, false]);
        let b = BitString::from_bools(&[false, false, true]);
        assert_eq!(ev.cmp(&a, &b), Ordering::Less);
        assert_eq!(ev.fitness(&b), 4.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(simulate_cga_neutral(11, 10, 0).is_err());
        let mut s = ProcessSpec::new(ProcessKind::Oea, 10, Objective::OneMax, 10, 0);
        s.rate = Some(0.0);
        assert!(simulate_search(&s).is_err());
        s.rate = None;
        s.horizon = 0;
        assert!(simulate_search(&s).is_err());
    }

    #[test]
    fn cga_reachability() {
        assert!(!simulate_cga_neutral(10, 0, 1).unwrap().converged);
        for run in 0..200 {
            assert!(!cga_neutral_run(10, 4, 1, run).unwrap().converged);
        }
        let p = simulate_cga_neutral(4, 10_000, 1).unwrap();
        assert!(p.converged);
        assert!(p.path.windows(2).all(|w| w[0].abs_diff(w[1]) <= 1));
    }

    #[test]
    fn partial_replacement() {
        let mut r = rng();
        assert!(sample_partial_replacement(5, &[5], &mut r).unwrap().iter().all(|&b| b));
        let hit = sample_partial_replacement(10, &[3], &mut r).unwrap();
        assert_eq!(hit.iter().filter(|&&b| b).count(), 3);
        assert!(sample_partial_replacement(3, &[4], &mut r).is_err());
    }

    #[test]
    fn negative_correlation_examples() {
        let v = check_negative_correlation(4, &[2], 4).unwrap();
        assert_eq!(v.outcomes, 6);
        assert!(v.one_negative && v.zero_negative && !v.equality);
        assert!((v.max_ratio_one - 1.0).abs() < 1e-15 || v.max_ratio_one < 1.0);
        let v = check_negative_correlation(6, &[2, 3], 6).unwrap();
        assert!(v.one_negative && v.zero_negative);
        let v = negative_correlation_from_counts(5, &[1; 32], 5).unwrap();
        assert!(v.equality && v.one_negative && v.zero_negative);
        assert!(matches!(check_negative_correlation(20, &[10, 10], 2), Err(ProcessError::Budget { .. })));
        // A positively correlated law is caught.
        let v = negative_correlation_from_counts(2, &[1, 0, 0, 1], 2).unwrap();
        assert!(!v.one_negative && v.witness == Some(vec![0, 1]));
    }

    #[test]
    fn pair_probability_is_one_sixth() {
        // Subsets of size 2 of [0,4) containing both 0 and 1: exactly one of six.
        let combos = combinations(4, 2);
        assert_eq!(combos.len(), 6);
        assert_eq!(combos.iter().filter(|&&m| m & 3 == 3).count(), 1);
    }

    #[test]
    fn initial_distance_degenerate() {
        let r = initial_distance_check_at(10, &[0.0], 100, 1).unwrap();
        assert_eq!(r.rows[0].frequency.point, 1.0);
        assert_eq!(r.rows[0].bound, 2.0);
    }

    #[test]
    fn ks_basics() {
        let a: Vec<u64> = (0..100).collect();
        assert_eq!(ks_statistic(&a, &a), 0.0);
        let b: Vec<u64> = (50..150).collect();
        assert!((ks_statistic(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(ks_one_sided(&a, &b), 0.0);
        assert!((ks_one_sided(&b, &a) - 0.5).abs() < 1e-12);
        assert!((ks_critical(0.05, 100, 100) - 1.358 * (0.02f64).sqrt()).abs() < 1e-3);
    }
}
