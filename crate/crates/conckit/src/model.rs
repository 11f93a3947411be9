//! Random-variable models a verification cell can be built on, with their
//! exact laws (where tractable) and samplers.

use conckit_core::dist::{
    geom_sum_dist, pmf_binomial, pmf_hypergeom, pmf_poisson_binomial, DistError, FiniteDist, GeomSumSpec,
    HypergeomSpec, PoissonBinomialSpec,
};
use conckit_core::math::{harmonic, ln};
use conckit_core::processes::{simulate_run, ProcessSpec};
use conckit_core::SimRng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Truncation budget for geometric-sum oracles.
pub const GEOM_EPS: f64 = 1e-12;
/// Coupon laws are convolved exactly only up to this many coupons.
pub const COUPON_EXACT_MAX: u64 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Binomial { n: u64, p: f64 },
    PoissonBinomial { p: Vec<f64> },
    /// Number of marked items among `n` draws without replacement from `N`
    /// items of which `m` are marked.
    Hypergeom {
        #[serde(rename = "N")]
        big_n: u64,
        n: u64,
        m: u64,
    },
    GeomSum { p: Vec<f64> },
    Coupon { n: u64 },
    /// Runtime of a simulated process.
    Process { spec: ProcessSpec },
}

/// What the bound binders need to know about a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub var: f64,
    /// Number of summands for sums of `[0,1]` variables.
    pub n_vars: Option<u64>,
    /// `Σ Var[Xᵢ]` over the summands.
    pub sum_var: f64,
    pub binary: bool,
    pub independent: bool,
}

impl Model {
    pub fn label(&self) -> String {
        match self {
            Model::Binomial { n, p } => format!("binomial(n={n},p={p})"),
            Model::PoissonBinomial { p } => format!("poisson_binomial(n={},mean={:.6})", p.len(), p.iter().sum::<f64>()),
            Model::Hypergeom { big_n, n, m } => format!("hypergeom(N={big_n},n={n},m={m})"),
            Model::GeomSum { p } => match p.first() {
                Some(&q) if p.iter().all(|&x| x == q) => format!("geom_sum(n={},p={q})", p.len()),
                _ => format!("geom_sum(n={},mean={:.6})", p.len(), p.iter().map(|x| 1.0 / x).sum::<f64>()),
            },
            Model::Coupon { n } => format!("coupon(n={n})"),
            Model::Process { spec } => {
                format!("process({},n={},objective={})", spec.kind.name(), spec.n, spec.objective.name())
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let r: Result<(), DistError> = match self {
            Model::Binomial { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(format!("binomial p must lie in [0,1], got {p}"));
                }
                Ok(())
            }
            Model::PoissonBinomial { p } => PoissonBinomialSpec::new(p.clone()).map(|_| ()),
            Model::Hypergeom { big_n, n, m } => HypergeomSpec::new(*big_n, *n, *m).map(|_| ()),
            Model::GeomSum { p } => GeomSumSpec::new(p.clone()).map(|_| ()),
            Model::Coupon { n } => {
                if *n == 0 {
                    return Err("coupon model needs n ≥ 1".into());
                }
                Ok(())
            }
            Model::Process { spec } => return spec.validate().map_err(|e| e.to_string()),
        };
        r.map_err(|e| e.to_string())
    }

    pub fn stats(&self) -> Option<Stats> {
        Some(match self {
            Model::Binomial { n, p } => {
                let nf = *n as f64;
                Stats {
                    mean: nf * p,
                    var: nf * p * (1.0 - p),
                    n_vars: Some(*n),
                    sum_var: nf * p * (1.0 - p),
                    binary: true,
                    independent: true,
                }
            }
            Model::PoissonBinomial { p } => {
                let s = PoissonBinomialSpec::new(p.clone()).ok()?;
                Stats {
                    mean: s.mean(),
                    var: s.variance(),
                    n_vars: Some(p.len() as u64),
                    sum_var: s.variance(),
                    binary: true,
                    independent: true,
                }
            }
            Model::Hypergeom { big_n, n, m } => {
                let s = HypergeomSpec::new(*big_n, *n, *m).ok()?;
                let (nn, nf, mf) = (*big_n as f64, *n as f64, *m as f64);
                let q = mf / nn;
                let var = if *big_n > 1 { nf * q * (1.0 - q) * (nn - nf) / (nn - 1.0) } else { 0.0 };
                Stats {
                    mean: s.mean(),
                    var,
                    n_vars: Some(*n),
                    sum_var: nf * q * (1.0 - q),
                    binary: true,
                    independent: false,
                }
            }
            Model::GeomSum { p } => {
                let s = GeomSumSpec::new(p.clone()).ok()?;
                Stats { mean: s.mu(), var: s.variance(), n_vars: None, sum_var: s.variance(), binary: false, independent: true }
            }
            Model::Coupon { n } => {
                let s = GeomSumSpec::coupon(*n as usize).ok()?;
                Stats { mean: s.mu(), var: s.variance(), n_vars: None, sum_var: s.variance(), binary: false, independent: true }
            }
            Model::Process { .. } => return None,
        })
    }

    /// The exact (possibly truncated) law, or why it is unavailable.
    pub fn exact(&self) -> Result<FiniteDist, String> {
        let r = match self {
            Model::Binomial { n, p } => pmf_binomial(*n, *p),
            Model::PoissonBinomial { p } => PoissonBinomialSpec::new(p.clone()).and_then(|s| pmf_poisson_binomial(&s)),
            Model::Hypergeom { big_n, n, m } => HypergeomSpec::new(*big_n, *n, *m).and_then(|s| pmf_hypergeom(&s)),
            Model::GeomSum { p } => GeomSumSpec::new(p.clone()).and_then(|s| geom_sum_dist(&s, GEOM_EPS)),
            Model::Coupon { n } => {
                if *n > COUPON_EXACT_MAX {
                    return Err(format!("exact coupon law only for n ≤ {COUPON_EXACT_MAX}"));
                }
                GeomSumSpec::coupon(*n as usize).and_then(|s| geom_sum_dist(&s, GEOM_EPS))
            }
            Model::Process { .. } => return Err("no exact law for simulated processes".into()),
        };
        r.map_err(|e| e.to_string())
    }

    /// Geometric success probabilities of the summands, for geometric bounds.
    pub fn geom_probs(&self) -> Option<Vec<f64>> {
        match self {
            Model::GeomSum { p } => Some(p.clone()),
            Model::Coupon { n } => GeomSumSpec::coupon(*n as usize).ok().map(|s| s.probs),
            _ => None,
        }
    }

    /// Upper end of the support.
    pub fn max_value(&self) -> f64 {
        match self {
            Model::Binomial { n, .. } => *n as f64,
            Model::PoissonBinomial { p } => p.len() as f64,
            Model::Hypergeom { n, m, .. } => (*n).min(*m) as f64,
            _ => f64::INFINITY,
        }
    }

    /// One draw; `run` selects the process stream for process models.
    pub fn sample(&self, rng: &mut SimRng, run: u64) -> f64 {
        match self {
            Model::Binomial { n, p } => (0..*n).filter(|_| rng.random::<f64>() < *p).count() as f64,
            Model::PoissonBinomial { p } => p.iter().filter(|&&q| rng.random::<f64>() < q).count() as f64,
            Model::Hypergeom { big_n, n, m } => {
                // Sequential draws: the k-th draw is marked with probability
                // (marked left)/(items left).
                let (mut left, mut marked, mut hits) = (*big_n, *m, 0u64);
                for _ in 0..*n {
                    if rng.random_range(0..left) < marked {
                        marked -= 1;
                        hits += 1;
                    }
                    left -= 1;
                }
                hits as f64
            }
            Model::GeomSum { p } => p.iter().map(|&q| sample_geometric(rng, q)).sum(),
            Model::Coupon { n } => {
                let nf = *n as f64;
                (1..=*n).map(|i| sample_geometric(rng, i as f64 / nf)).sum()
            }
            Model::Process { spec } => simulate_run(spec, run).map(|t| t.runtime as f64).unwrap_or(f64::NAN),
        }
    }

    pub fn is_process(&self) -> bool {
        matches!(self, Model::Process { .. })
    }
}

/// `Geom(p)` on `{1, 2, …}` by inversion.
pub fn sample_geometric(rng: &mut SimRng, p: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    let u = 1.0 - rng.random::<f64>();
    (ln(u) / (-p).ln_1p()).floor() + 1.0
}

/// `E[Tₙ] = nHₙ` for the coupon collector.
pub fn coupon_mean(n: u64) -> f64 {
    n as f64 * harmonic(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use conckit_core::mc::stream_rng;

    #[test]
    fn exact_laws_match_stats() {
        let models = [
            Model::Binomial { n: 20, p: 0.3 },
            Model::PoissonBinomial { p: vec![0.1, 0.5, 0.9] },
            Model::Hypergeom { big_n: 30, n: 10, m: 12 },
            Model::GeomSum { p: vec![0.5, 0.25] },
            Model::Coupon { n: 6 },
        ];
        for m in &models {
            let d = m.exact().unwrap();
            let s = m.stats().unwrap();
            let (mean, var) = conckit_core::moments(&d);
            assert!((mean - s.mean).abs() < 1e-8, "{}", m.label());
            assert!((var - s.var).abs() < 1e-6, "{}", m.label());
        }
    }

    #[test]
    fn samplers_have_right_mean() {
        let mut rng = stream_rng(3, 0);
        for m in [Model::Hypergeom { big_n: 30, n: 10, m: 12 }, Model::GeomSum { p: vec![0.5, 0.25] }, Model::Coupon { n: 5 }] {
            let k = 40_000;
            let mean = (0..k).map(|_| m.sample(&mut rng, 0)).sum::<f64>() / k as f64;
            let s = m.stats().unwrap();
            assert!((mean - s.mean).abs() < 5.0 * (s.var / k as f64).sqrt(), "{}: {mean}", m.label());
        }
    }

    #[test]
    fn serde_tags() {
        let m: Model = serde_json::from_str(r#"{"family":"hypergeom","N":10,"n":3,"m":4}"#).unwrap();
        assert_eq!(m, Model::Hypergeom { big_n: 10, n: 3, m: 4 });
    }
}
