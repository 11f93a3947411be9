use conckit_core::bounds::binomial::{binomial_bounds, BinomialVariant};
use conckit_core::bounds::chernoff::{chernoff_mult_lower, chernoff_mult_upper, MultLower, MultUpper};
use conckit_core::bounds::elementary::{elementary_suite, IDS};
use conckit_core::bounds::moments::second_moment;
use conckit_core::domination::{
    coupling_certifies, dominates, dominates_naive, first_marginal, monotone_coupling, second_marginal,
};
use conckit_core::mc::{monte_carlo, stream_rng};
use conckit_core::processes::{simulate_run, Objective, ProcessKind, ProcessSpec};
use conckit_core::*;
use proptest::prelude::*;
use rand::Rng;

fn small_dist() -> impl Strategy<Value = FiniteDist> {
    prop::collection::vec((0u8..8, 1u32..100), 1..6).prop_map(|pairs| {
        let total: u32 = pairs.iter().map(|p| p.1).sum();
        FiniteDist::from_pairs(pairs.into_iter().map(|(v, w)| (v as f64, w as f64 / total as f64)).collect()).unwrap()
    })
}

fn normalized(d: &FiniteDist) -> bool {
    (d.mass().iter().sum::<f64>() + d.tail_deficit() - 1.0).abs() <= 1e-12
}

fn enumerate_pb(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let mut q = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            q *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        out[mask.count_ones() as usize] += q;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn produced_distributions_are_normalized(
        n in 0u64..300, p in 0.0f64..=1.0,
        probs in prop::collection::vec(0.0f64..=1.0, 1..40),
        big_n in 1u64..200, a in 0.0f64..1.0, b in 0.0f64..1.0,
        gp in 0.05f64..=1.0,
    ) {
        prop_assert!(normalized(&pmf_binomial(n, p).unwrap()));
        prop_assert!(normalized(&pmf_poisson_binomial(&PoissonBinomialSpec::new(probs).unwrap()).unwrap()));
        let hs = HypergeomSpec::new(big_n, (a * big_n as f64) as u64, (b * big_n as f64) as u64).unwrap();
        prop_assert!(normalized(&pmf_hypergeom(&hs).unwrap()));
        prop_assert!(normalized(&pmf_geometric_truncated(gp, 1e-12).unwrap()));
        let gs = GeomSumSpec::new(vec![gp, (gp + 0.3).min(1.0)]).unwrap();
        prop_assert!(normalized(&geom_sum_dist(&gs, 1e-12).unwrap()));
    }

    #[test]
    fn poisson_binomial_matches_enumeration(p in prop::collection::vec(0.0f64..=1.0, 1..=12)) {
        let d = pmf_poisson_binomial(&PoissonBinomialSpec::new(p.clone()).unwrap()).unwrap();
        let brute = enumerate_pb(&p);
        for (k, &q) in brute.iter().enumerate() {
            prop_assert!((d.mass_at(k as f64) - q).abs() <= 1e-12, "k={} {} vs {}", k, d.mass_at(k as f64), q);
        }
    }

    #[test]
    fn negative_binomial_identity(n in 1usize..12, p in 0.1f64..=1.0) {
        let d = geom_sum_dist(&GeomSumSpec::identical(n, p).unwrap(), 1e-15).unwrap();
        let top = (4.0 * n as f64 / p) as u64;
        for k in n as u64..=top {
            let b = pmf_binomial(k, p).unwrap();
            let lhs = d.cdf(k as f64);
            let rhs = b.tail_ge(n as f64);
            prop_assert!((lhs - rhs).abs() <= 1e-10, "K={}: {} vs {}", k, lhs, rhs);
        }
    }

    #[test]
    fn hypergeometric_symmetry(big_n in 1u64..300, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let n = (a * big_n as f64) as u64;
        let m = (b * big_n as f64) as u64;
        let x = pmf_hypergeom(&HypergeomSpec::new(big_n, n, m).unwrap()).unwrap();
        let y = pmf_hypergeom(&HypergeomSpec::new(big_n, m, n).unwrap()).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn mult_upper_variant_order(mu in 0.01f64..200.0, extra in 0.0f64..200.0, delta in 0.0f64..5.0) {
        let n = (mu + extra).ceil() as u64;
        let v = |m| chernoff_mult_upper(Reference::Exact(mu), Some(n), delta, m).value;
        let (s0, s1, l1, l2) = (v(MultUpper::Strongest), v(MultUpper::Strong), v(MultUpper::Lin1), v(MultUpper::Lin2));
        let tol = 1e-12;
        prop_assert!(s0 <= s1 + tol && s1 <= l1 + tol && l1 <= l2 + tol, "{s0} {s1} {l1} {l2}");
    }

    #[test]
    fn mult_lower_variant_order(mu in 0.01f64..200.0, extra in 0.0f64..200.0, delta in 0.0f64..=1.0) {
        let n = (mu + extra).ceil() as u64;
        let v = |m| chernoff_mult_lower(Reference::Exact(mu), Some(n), delta, m).value;
        let (s0, s1, e) = (v(MultLower::Strongest), v(MultLower::Strong), v(MultLower::Easy));
        prop_assert!(s0 <= s1 + 1e-12 && s1 <= e + 1e-12, "{s0} {s1} {e}");
    }

    #[test]
    fn estimated_expectation_still_bounds(n in 1u64..150, p in 0.01f64..0.9, delta in 0.0f64..2.0, which in 0usize..3) {
        let mu = n as f64 * p;
        let mu_plus = mu * [1.0, 1.2, 2.0][which];
        let exact = pmf_binomial(n, p).unwrap();
        let event = exact.tail_ge((1.0 + delta) * mu_plus);
        for v in [MultUpper::Strong, MultUpper::Lin1, MultUpper::Lin2] {
            let r = chernoff_mult_upper(Reference::UpperEstimate(mu_plus), Some(n), delta, v);
            prop_assert!(r.valid);
            prop_assert!(r.value >= event - 1e-9, "{:?}: {} < {}", v, r.value, event);
        }
    }

    #[test]
    fn lower_strongest_is_complemented_upper(mu in 0.05f64..50.0, extra in 0.05f64..50.0, delta in 0.0f64..1.0) {
        let nf = (mu + extra).ceil();
        let n = nf as u64;
        let lo = chernoff_mult_lower(Reference::Exact(mu), Some(n), delta, MultLower::Strongest).value;
        // X ≤ (1−δ)μ  ⟺  n − X ≥ (n−μ)(1 + δμ/(n−μ)).
        let dc = delta * mu / (nf - mu);
        let up = chernoff_mult_upper(Reference::Exact(nf - mu), Some(n), dc, MultUpper::Strongest).value;
        prop_assert!((lo - up).abs() <= 1e-12 * lo.max(1e-300).max(1.0), "{lo} vs {up}");
    }

    #[test]
    fn klar_beats_union_when_factor_small(n in 1u64..200, p in 0.01f64..0.99, frac in 0.0f64..=1.0) {
        let k = ((n as f64 * p).ceil() as u64 + ((n as f64 * (1.0 - p)) * frac) as u64).min(n);
        let klar = binomial_bounds(n, p, k, BinomialVariant::Klar);
        let uni = binomial_bounds(n, p, k, BinomialVariant::UnionCoeff);
        if klar.valid && uni.valid {
            let factor = klar.extra("factor").unwrap();
            if (p * (n - k) as f64).exp() > factor {
                prop_assert!(klar.raw <= uni.raw * (1.0 + 1e-12), "{} > {}", klar.raw, uni.raw);
            }
        }
    }

    #[test]
    fn second_moment_forms_ordered(mu in 0.01f64..100.0, var in 0.0f64..100.0) {
        let (m, e) = second_moment(mu, var, None);
        prop_assert!(e.raw <= m.raw * (1.0 + 1e-15));
    }

    #[test]
    fn elementary_random_points(id_ix in 0usize..IDS.len(), pts in prop::collection::vec(prop::collection::vec(-3.0f64..12.0, 1..4), 1..50)) {
        let id = IDS[id_ix];
        let rep = elementary_suite(id, &pts).unwrap();
        prop_assert!(rep.passed(), "{}: {:?}", id, rep.violations.first());
    }

    #[test]
    fn domination_reflexive_transitive(x in small_dist(), y in small_dist(), z in small_dist()) {
        prop_assert!(dominates(&x, &x).holds);
        if dominates(&x, &y).holds && dominates(&y, &z).holds {
            prop_assert!(dominates(&x, &z).holds);
        }
        if dominates(&x, &y).holds && dominates(&y, &x).holds {
            for v in 0..8 {
                prop_assert!((x.cdf(v as f64) - y.cdf(v as f64)).abs() <= 1e-12);
            }
        }
        prop_assert_eq!(dominates(&x, &y).holds, dominates_naive(&x, &y));
    }

    #[test]
    fn domination_orders_means(x in small_dist(), y in small_dist()) {
        if dominates(&x, &y).holds {
            prop_assert!(moments(&x).0 <= moments(&y).0 + 1e-12);
        }
    }

    #[test]
    fn domination_iff_monotone_coupling(x in small_dist(), y in small_dist()) {
        let d = dominates(&x, &y).holds;
        match monotone_coupling(&x, &y) {
            Ok(c) => {
                if d {
                    prop_assert!((c.prob_le() - 1.0).abs() <= 1e-12);
                }
                // Any coupling with x̃ ≤ ỹ a.s. certifies domination of its marginals.
                if coupling_certifies(&c.joint) {
                    let a = first_marginal(&c.joint).unwrap();
                    let b = second_marginal(&c.joint).unwrap();
                    prop_assert!(dominates(&a, &b).holds);
                    prop_assert!(d);
                }
            }
            Err(_) => prop_assert!(!d && !dominates(&y, &x).holds),
        }
    }

    #[test]
    fn sums_preserve_domination(pairs in prop::collection::vec((small_dist(), 0u8..4), 1..=4)) {
        // yᵢ = xᵢ shifted right by a non-negative amount, so xᵢ ⪯ yᵢ.
        let mut sx = FiniteDist::point(0.0);
        let mut sy = FiniteDist::point(0.0);
        for (x, s) in &pairs {
            let y = x.affine(1.0, *s as f64);
            prop_assert!(dominates(x, &y).holds);
            sx = convolve(&sx, x);
            sy = convolve(&sy, &y);
        }
        prop_assert!(dominates(&sx, &sy).holds);
    }

    #[test]
    fn pointwise_order_implies_domination(rows in prop::collection::vec((0u8..6, 0u8..4, 1u32..50), 1..10)) {
        let total: u32 = rows.iter().map(|r| r.2).sum();
        let joint: Vec<(f64, f64, f64)> = rows
            .iter()
            .map(|&(a, d, w)| (a as f64, (a + d) as f64, w as f64 / total as f64))
            .collect();
        prop_assert!(coupling_certifies(&joint));
        let x = first_marginal(&joint).unwrap();
        let y = second_marginal(&joint).unwrap();
        prop_assert!(dominates(&x, &y).holds);
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), run in 0u64..1000, kind in 0usize..4) {
        let kind = [ProcessKind::Rls, ProcessKind::Oea, ProcessKind::Blind, ProcessKind::UnbiasedSearch][kind];
        let mut s = ProcessSpec::new(kind, 12, Objective::OneMax, 2_000, seed);
        s.checkpoint_every = 7;
        prop_assert_eq!(simulate_run(&s, run).unwrap(), simulate_run(&s, run).unwrap());
    }
}

#[test]
fn wilson_interval_calibration() {
    let mut covered = 0;
    for run in 0..200u64 {
        let est = monte_carlo(|r: &mut SimRng| r.random::<f64>() < 0.3, 2_000, 1_000 + run, 0.95);
        if est.ci_low <= 0.3 && 0.3 <= est.ci_high {
            covered += 1;
        }
    }
    assert!(covered >= 180, "coverage {covered}/200");
}

#[test]
fn stream_rng_streams_differ() {
    let a: u64 = stream_rng(1, 0).random();
    let b: u64 = stream_rng(1, 1).random();
    assert_ne!(a, b);
}
