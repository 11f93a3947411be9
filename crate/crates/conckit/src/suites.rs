//! Built-in verification suites and suite-file loading.

use std::path::{Path, PathBuf};

use conckit_core::bounds::Params;
use conckit_core::mc::stream_rng;
use conckit_core::processes::{Objective, ProcessKind, ProcessSpec, Stake};
use rand::Rng;

use crate::harness::{
    default_exclusions, derive_seed, Axes, EmpiricalSpec, GridSpec, OracleMode, OrderingSpec, Query, Stat, Suite,
    DEFAULT_CONFIDENCE, DEFAULT_SLACK,
};
use crate::model::Model;

pub const SUITE_DIR_ENV: &str = "CONCKIT_SUITE_DIR";
pub const BUILTIN: [&str; 4] = ["default", "ordering", "processes", "empty"];

/// Bound ids checked on sums of binary variables.
pub fn binary_bounds() -> Vec<String> {
    [
        "markov*",
        "reverse_markov*",
        "chebyshev",
        "cantelli",
        "second_moment.*",
        "chernoff.*",
        "binomial.*",
        "anti.sqrtn12*",
        "anti.point_cap",
        "anti.feige",
        "anti.exceed_*",
        "martingale.bounded_diff",
        "martingale.bounded_cond_exp",
        "martingale.azuma",
        "initial_distance",
        "sbm.tail_k",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Bound ids checked on sums of geometric variables.
pub fn geometric_bounds(coupon: bool) -> Vec<String> {
    let mut v: Vec<String> =
        ["markov*", "chebyshev", "cantelli", "second_moment.mean", "second_moment.ex2", "geom.*"].iter().map(|s| s.to_string()).collect();
    if coupon {
        v.push("coupon.*".into());
    }
    v
}

pub fn binary_queries() -> Vec<Query> {
    let mut q = Vec::new();
    q.extend([0.1, 0.3, 0.5, 1.0, 2.0].map(|delta| Query::UpperMult { delta }));
    q.extend([1.0, 2.0, 3.0].map(|k| Query::UpperSigma { k }));
    q.push(Query::UpperMultEstimate { delta: 0.5, factor: 1.25 });
    q.extend([0.1, 0.3, 0.5, 0.9].map(|delta| Query::LowerMult { delta }));
    q.extend([1.0, 2.0].map(|k| Query::LowerSigma { k }));
    q.extend([1.0, 2.0].map(|k| Query::TwoSidedSigma { k }));
    q.push(Query::Point { k: None });
    q.push(Query::Fixed);
    q
}

pub fn geometric_queries() -> Vec<Query> {
    let mut q = Vec::new();
    q.extend([0.1, 0.5, 1.0, 2.0].map(|delta| Query::UpperMult { delta }));
    q.extend([1.0, 3.0].map(|k| Query::UpperSigma { k }));
    q.extend([0.1, 0.3, 0.5, 0.7].map(|delta| Query::LowerMult { delta }));
    q.push(Query::LowerSigma { k: 1.0 });
    q.push(Query::TwoSidedSigma { k: 2.0 });
    q.push(Query::Fixed);
    q
}

fn random_vectors(seed: u64, stream: u64, count: usize, len: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, stream);
    (0..count).map(|_| (0..len).map(|_| rng.random_range(lo..hi)).collect()).collect()
}

const GRID_SEED: u64 = 20_240_601;

/// `pᵢ = c·i/n`: coupon-collector shaped sums, with `c < 1` thinning every
/// phase by the same factor.
fn harmonic_vectors() -> Vec<Vec<f64>> {
    let mut v = Vec::new();
    for n in [4usize, 8, 16] {
        for c in [1.0, 0.5] {
            v.push((1..=n).map(|i| c * i as f64 / n as f64).collect());
        }
    }
    v
}

fn grid(name: &str, bounds: Vec<String>, models: Vec<Model>, axes: Vec<Axes>, queries: Vec<Query>) -> GridSpec {
    GridSpec { name: name.into(), bounds, models, axes, queries, oracle: OracleMode::Exact, slack: DEFAULT_SLACK }
}

/// Exact-oracle sweep over binomial and Poisson-binomial sums (n ≤ 200),
/// hypergeometric counts (N ≤ 500), geometric sums and coupon collectors.
pub fn default_suite() -> Suite {
    let ns = [1u64, 2, 3, 5, 8, 13, 20, 30, 50, 80, 120, 200];
    let mut pb_vectors = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        pb_vectors.extend(random_vectors(GRID_SEED, i as u64, 3, n as usize, 0.0, 1.0));
        pb_vectors.extend(random_vectors(GRID_SEED, 100 + i as u64, 1, n as usize, 0.0, 0.1));
    }
    let binomial = Axes { family: "binomial".into(), n: ns.to_vec(), p: vec![0.01, 0.1, 0.3, 0.5, 0.9], ..Axes::default() };
    let pb = Axes { family: "poisson_binomial".into(), p_vectors: pb_vectors, ..Axes::default() };

    let mut hyper = Vec::new();
    for big_n in [10u64, 25, 60, 150, 500] {
        let f = |x: f64| ((x * big_n as f64).round() as u64).max(1);
        for n in [0.1, 0.3, 0.6, 0.9].map(f) {
            for m in [0.05, 0.3, 0.5, 0.8].map(f) {
                hyper.push(Model::Hypergeom { big_n, n, m });
            }
        }
    }

    let geom = Axes {
        family: "geom_sum".into(),
        n: vec![1, 2, 3, 5, 10, 20, 35, 50],
        p: vec![0.05, 0.2, 0.5, 0.8],
        p_vectors: (0..10)
            .flat_map(|i| random_vectors(GRID_SEED, 200 + i, 1, 2 + i as usize % 7, 0.1, 1.0))
            .chain(harmonic_vectors())
            .collect(),
        ..Axes::default()
    };
    let coupon = Axes { family: "coupon".into(), n: vec![2, 3, 4, 5, 7, 10, 14, 20], ..Axes::default() };

    Suite {
        name: "default".into(),
        seed: None,
        grids: vec![
            grid("binary", binary_bounds(), vec![], vec![binomial, pb], binary_queries()),
            grid("hypergeom", binary_bounds(), hyper, vec![], binary_queries()),
            grid("geometric", geometric_bounds(false), vec![], vec![geom], geometric_queries()),
            grid("coupon", geometric_bounds(true), vec![], vec![coupon], geometric_queries()),
        ],
        orderings: vec![],
        empirical: vec![],
        exclusions: default_exclusions(),
    }
}

/// Cells for the multiplicative ordering chains.
pub fn ordering_cells(count: usize, upper: bool, seed: u64) -> Vec<Params> {
    let mut rng = stream_rng(seed, upper as u64);
    (0..count)
        .map(|_| {
            let mu = 10f64.powf(rng.random_range(-1.0..2.5));
            let q: f64 = rng.random_range(0.01..1.0);
            let n = (mu / q).ceil().max(mu.ceil());
            let delta = if upper { 10f64.powf(rng.random_range(-2.0..0.8)) } else { rng.random_range(0.01..0.99) };
            Params::new().set("mu", mu).set("n", n).set("delta", delta)
        })
        .collect()
}

pub fn ordering_suite() -> Suite {
    let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Suite {
        name: "ordering".into(),
        seed: None,
        grids: vec![],
        orderings: vec![
            OrderingSpec {
                name: "mult_upper".into(),
                family: ids(&[
                    "chernoff.mult.upper.strongest",
                    "chernoff.mult.upper.strong",
                    "chernoff.mult.upper.lin1",
                    "chernoff.mult.upper.lin2",
                ]),
                cells: ordering_cells(500, true, GRID_SEED),
                slack: DEFAULT_SLACK,
            },
            OrderingSpec {
                name: "mult_lower".into(),
                family: ids(&["chernoff.mult.lower.strongest", "chernoff.mult.lower.strong", "chernoff.mult.lower.easy"]),
                cells: ordering_cells(500, false, GRID_SEED),
                slack: DEFAULT_SLACK,
            },
        ],
        empirical: vec![],
        exclusions: vec![],
    }
}

fn emp(name: &str, process: ProcessSpec, bound: &str, params: &str, stat: Stat, runs: u64) -> EmpiricalSpec {
    EmpiricalSpec {
        name: name.into(),
        process,
        bound: bound.into(),
        params: Params::parse_assignments(params),
        stat,
        runs,
        confidence: DEFAULT_CONFIDENCE,
        slack: DEFAULT_SLACK,
    }
}

/// Simulation-backed checks of process-level statements.
pub fn processes_suite(seed: u64, scale: u64) -> Suite {
    let s = |name: &str| derive_seed(seed, name, 0);
    let runs = |r: u64| (r / scale.max(1)).max(crate::harness::MIN_RUNS);
    let coupon = |name: &str| ProcessSpec::coupon(20, Stake::None, s(name));
    let oea = |name: &str, n: usize, obj: Objective| ProcessSpec::new(ProcessKind::Oea, n, obj, 10_000_000, s(name));
    let mut e = Vec::new();
    for eps in [1.0, 2.0] {
        for (id, tag) in [("coupon.upper", "upper"), ("coupon.witt_upper", "witt_upper"), ("coupon.lower", "lower"), ("coupon.witt_lower", "witt_lower")] {
            let name = format!("coupon_n20/{tag}/eps{eps}");
            e.push(emp(&name, coupon(&name), id, &format!("n=20 eps={eps}"), Stat::Event, runs(100_000)));
        }
    }
    e.push(emp("coupon_n20/markov", coupon("coupon_n20/markov"), "coupon.markov", "n=20 lambda=2", Stat::Event, runs(100_000)));
    e.push(emp("coupon_n20/union", coupon("coupon_n20/union"), "coupon.union", "n=20 t=120", Stat::Event, runs(100_000)));
    e.push(emp(
        "oea_onemax_n30/mean",
        oea("oea_onemax_n30/mean", 30, Objective::OneMax),
        "dom.onemax",
        "n=30 delta=0",
        Stat::Mean { extra: "expectation_bound".into() },
        runs(10_000),
    ));
    e.push(emp(
        "oea_onemax_n30/tail",
        oea("oea_onemax_n30/tail", 30, Objective::OneMax),
        "dom.onemax",
        "n=30 delta=0.5",
        Stat::Event,
        runs(10_000),
    ));
    e.push(emp(
        "oea_onemax_n30/early",
        oea("oea_onemax_n30/early", 30, Objective::OneMax),
        "runtime.oea_lower",
        "n=30 eps=0.5",
        Stat::Event,
        runs(10_000),
    ));
    e.push(emp(
        "oea_needle_n5/mean",
        oea("oea_needle_n5/mean", 5, Objective::Needle),
        "dom.generic_nn",
        "n=5 gamma=1",
        Stat::Mean { extra: "expectation_bound".into() },
        runs(10_000),
    ));
    e.push(emp(
        "oea_needle_n5/tail",
        oea("oea_needle_n5/tail", 5, Objective::Needle),
        "dom.generic_nn",
        "n=5 gamma=1",
        Stat::Event,
        runs(10_000),
    ));
    let needle = ProcessSpec::new(ProcessKind::UnbiasedSearch, 16, Objective::Needle, 4, s("needle_n16"));
    e.push(emp(
        "needle_n16",
        needle,
        "runtime.needle",
        "n=16 c=0.1 eta=0.4",
        Stat::CloseWithin { points: None, distance: None },
        runs(100_000),
    ));
    for (k, t) in [(20u64, 50u64), (30, 100)] {
        let name = format!("cga_K{k}_T{t}");
        e.push(emp(&name, ProcessSpec::cga(k, t, s(&name)), "martingale.cga", &format!("K={k} T={t}"), Stat::Converged, runs(100_000)));
    }
    for id in ["blind.union", "blind.bonferroni"] {
        let name = format!("blind_n8/{id}");
        let spec = ProcessSpec::new(ProcessKind::Blind, 8, Objective::OneMax, 16, s(&name));
        e.push(emp(&name, spec, id, "n=8 L=16", Stat::Event, runs(100_000)));
    }
    Suite { name: "processes".into(), seed: Some(seed), grids: vec![], orderings: vec![], empirical: e, exclusions: vec![] }
}

pub fn empty_suite() -> Suite {
    Suite { name: "empty".into(), ..Suite::default() }
}

/// Parses a suite file, reporting the line and column of syntax and schema
/// errors.
pub fn parse_suite(text: &str) -> Result<Suite, String> {
    serde_json::from_str(text).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn load_suite_file(path: &Path) -> Result<Suite, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_suite(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Location of an override for a built-in suite, if present.
pub fn override_path(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(SUITE_DIR_ENV)?;
    let p = Path::new(&dir).join(format!("{name}.json"));
    p.is_file().then_some(p)
}

/// A built-in suite (honouring `CONCKIT_SUITE_DIR/<name>.json`) or a file.
pub fn resolve_suite(name: &str, seed: Option<u64>) -> Result<Suite, String> {
    if BUILTIN.contains(&name) {
        if let Some(p) = override_path(name) {
            return load_suite_file(&p);
        }
        return match name {
            "default" => Ok(default_suite()),
            "ordering" => Ok(ordering_suite()),
            "processes" => {
                let seed = seed.ok_or("the processes suite is stochastic; pass --seed")?;
                Ok(processes_suite(seed, 1))
            }
            _ => Ok(empty_suite()),
        };
    }
    load_suite_file(Path::new(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use conckit_core::bounds::registry::ids;
    use std::collections::BTreeSet;

    #[test]
    fn default_suite_size() {
        let s = default_suite();
        s.validate().unwrap();
        let c = s.cells().unwrap();
        assert!((3000..=5000).contains(&c), "{c} cells");
    }

    #[test]
    fn coverage_accounting() {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for g in default_suite().grids {
            seen.extend(g.bound_ids().unwrap());
        }
        seen.extend(default_suite().exclusions.into_iter().map(|e| e.bound_id));
        let missing: Vec<String> = ids().into_iter().filter(|id| !seen.contains(id)).collect();
        assert!(missing.is_empty(), "{missing:?}");
    }

    #[test]
    fn suites_round_trip() {
        for s in [default_suite(), ordering_suite(), processes_suite(3, 1), empty_suite()] {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(parse_suite(&text).unwrap(), s);
        }
    }

    #[test]
    fn diagnostics_have_lines() {
        let e = parse_suite("{\n  \"name\": \"x\",\n  \"grids\": 3\n}").unwrap_err();
        assert!(e.starts_with("line 3"), "{e}");
    }
}
