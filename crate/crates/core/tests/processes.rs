//! Distributional invariants of the process simulators, checked with
//! two-sample Kolmogorov–Smirnov statistics at the 1% level.

use conckit_core::processes::{
    cga_neutral_run, ks_critical, ks_critical_one_sided, ks_one_sided, ks_statistic, simulate_run, Monotone, Objective,
    ProcessKind, ProcessSpec, Stake,
};

fn runtimes(spec: &ProcessSpec, runs: u64) -> Vec<u64> {
    (0..runs)
        .map(|r| {
            let t = simulate_run(spec, r).unwrap();
            assert!(!t.censored, "{spec:?} run {r} censored");
            t.runtime
        })
        .collect()
}

#[test]
fn rls_on_monotone_functions_is_coupon_collecting_with_stake() {
    let runs = 100_000;
    let n = 20;
    let coupon = runtimes(&ProcessSpec::coupon(n, Stake::BinomialHalf, 11), runs);
    let crit = ks_critical(0.01, runs as usize, runs as usize);
    for (i, obj) in [
        Objective::OneMax,
        Objective::StrictMonotone(Monotone::BinaryValue),
        Objective::StrictMonotone(Monotone::RandomWeights),
    ]
    .into_iter()
    .enumerate()
    {
        let rls = runtimes(&ProcessSpec::new(ProcessKind::Rls, n, obj, u64::MAX, 100 + i as u64), runs);
        let d = ks_statistic(&rls, &coupon);
        assert!(d <= crit, "{}: KS {d} > critical {crit}", obj.name());
    }
}

#[test]
fn cga_neutral_frequency_is_a_martingale() {
    let k = 20;
    let target = 1_000_000usize;
    let mut incs = Vec::with_capacity(target);
    let mut run = 0;
    while incs.len() < target {
        let p = cga_neutral_run(k, 10_000, 5, run).unwrap();
        let f = p.frequencies();
        incs.extend(f.windows(2).map(|w| w[1] - w[0]));
        run += 1;
    }
    incs.truncate(target);
    let m = incs.len() as f64;
    let mean = incs.iter().sum::<f64>() / m;
    let var = incs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    assert!(mean.abs() <= 3.0 * se, "mean increment {mean} vs se {se}");
}

/// `T(EA_μ, OneMax) ⪯ T(A, f)` for (μ, p) algorithms `A` and functions `f`
/// with a unique optimum.
#[test]
fn ea_mu_on_onemax_is_fastest() {
    let runs = 20_000u64;
    let n = 8;
    let crit = ks_critical_one_sided(0.01, runs as usize, runs as usize);
    let ea_mu = |mu: usize, rate: Option<f64>, obj: Objective, seed: u64| ProcessSpec {
        mu,
        rate,
        ..ProcessSpec::new(ProcessKind::OeaMu, n, obj, u64::MAX, seed)
    };
    for mu in [1usize, 3] {
        let base = runtimes(&ea_mu(mu, None, Objective::OneMax, 1), runs);
        for (i, obj) in [
            Objective::StrictMonotone(Monotone::BinaryValue),
            Objective::StrictMonotone(Monotone::RandomWeights),
            Objective::Needle,
        ]
        .into_iter()
        .enumerate()
        {
            let other = runtimes(&ea_mu(mu, None, obj, 10 + i as u64), runs);
            let d = ks_one_sided(&base, &other);
            assert!(d <= crit, "mu={mu} {}: one-sided KS {d} > {crit}", obj.name());
        }
        // Uniform sampling is the p = 1/2 member of the family.
        let half = runtimes(&ea_mu(mu, Some(0.5), Objective::OneMax, 2), runs);
        let blind = runtimes(&ProcessSpec::new(ProcessKind::Blind, n, Objective::OneMax, u64::MAX, 3), runs);
        let d = ks_one_sided(&half, &blind);
        assert!(d <= crit, "mu={mu} blind: one-sided KS {d} > {crit}");
    }
}
