//! Seeded Monte-Carlo estimation with Wilson score intervals.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from ChaCha stream
//! `c` of the master seed. The estimate therefore does not depend on how many
//! workers process the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math;

pub type SimRng = ChaCha8Rng;

/// Trials per independently seeded chunk.
pub const CHUNK: u64 = 1 << 14;

/// The RNG for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn from_counts(successes: u64, trials: u64, confidence: f64, seed: u64) -> Self {
        let (lo, hi) = wilson_interval(successes, trials, confidence);
        let point = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        MonteCarloEstimate {
            trials,
            successes,
            point,
            ci_low: lo.min(point),
            ci_high: hi.max(point),
            confidence,
            seed,
        }
    }
}

/// Inverse standard normal CDF (Wichura's AS 241, about 1e-16 relative).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must lie in (0,1)");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = math::sqrt(-math::ln(r));
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Two-sided Wilson score interval at the given confidence level.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0,1)");
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = normal_quantile(0.5 + confidence / 2.0);
    let n = trials as f64;
    let s = successes as f64;
    let z2 = z * z;
    let center = (s + z2 / 2.0) / (n + z2);
    let half = z / (n + z2) * math::sqrt(s * (n - s) / n + z2 / 4.0);
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Chunk layout: `(chunk index, trials in chunk)`.
pub fn chunk_plan(trials: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = trials / CHUNK;
    let rest = trials % CHUNK;
    (0..full).map(|c| (c, CHUNK)).chain((rest > 0).then_some((full, rest)))
}

/// Successes of one chunk.
pub fn run_chunk<F>(sampler: &F, seed: u64, chunk: u64, trials: u64) -> u64
where
    F: Fn(&mut SimRng) -> bool + ?Sized,
{
    let mut rng = stream_rng(seed, chunk);
    let mut hits = 0;
    for _ in 0..trials {
        if sampler(&mut rng) {
            hits += 1;
        }
    }
    hits
}

/// Sequential Monte-Carlo estimate of `Pr[event]`.
pub fn monte_carlo<F>(sampler: F, trials: u64, seed: u64, confidence: f64) -> MonteCarloEstimate
where
    F: Fn(&mut SimRng) -> bool,
{
    assert!(trials >= 1, "need at least one trial");
    let hits = chunk_plan(trials).map(|(c, t)| run_chunk(&sampler, seed, c, t)).sum();
    MonteCarloEstimate::from_counts(hits, trials, confidence, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn quantiles() {
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-14);
        assert!((normal_quantile(0.9995) - 3.2905267314919255).abs() < 1e-13);
        assert!((normal_quantile(0.5)).abs() < 1e-16);
        assert!((normal_quantile(1e-10) + 6.361340902404056).abs() < 1e-12);
    }

    #[test]
    fn degenerate_events() {
        let e = monte_carlo(|_| true, 100, 1, 0.99);
        assert_eq!(e.point, 1.0);
        assert_eq!(e.ci_high, 1.0);
        let e = monte_carlo(|_| false, 100, 1, 0.99);
        assert_eq!(e.point, 0.0);
        assert_eq!(e.ci_low, 0.0);
        assert!(e.ci_high > 0.0);
    }

    #[test]
    fn fair_coin_covered() {
        let e = monte_carlo(|r: &mut SimRng| r.random::<bool>(), 1_000_000, 42, 0.99);
        assert!(e.ci_low <= 0.5 && 0.5 <= e.ci_high);
    }

    #[test]
    fn reproducible() {
        let f = |r: &mut SimRng| r.random::<f64>() < 0.3;
        assert_eq!(monte_carlo(f, 50_000, 9, 0.95), monte_carlo(f, 50_000, 9, 0.95));
    }

    #[test]
    fn calibration() {
        let mut covered = 0;
        for seed in 0..200u64 {
            let e = monte_carlo(|r: &mut SimRng| r.random::<f64>() < 0.3, 2000, seed, 0.95);
            if e.ci_low <= 0.3 && 0.3 <= e.ci_high {
                covered += 1;
            }
        }
        assert!(covered >= 180, "coverage {covered}/200");
    }

    #[test]
    fn chunks_cover_trials() {
        let total: u64 = chunk_plan(3 * CHUNK + 5).map(|(_, t)| t).sum();
        assert_eq!(total, 3 * CHUNK + 5);
        assert_eq!(chunk_plan(0).count(), 0);
    }
}
