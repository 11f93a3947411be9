//! Concentration-inequality toolkit: exact finite distributions, closed-form
//! tail bounds, stochastic domination and seeded process simulators.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! computation; file formats and the command line live in the `conckit` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod dist;
pub mod domination;
pub mod exact;
pub mod math;
pub mod mc;
pub mod processes;
pub mod query;

pub use bounds::{BoundResult, Quantity, Sense};
pub use dist::{
    convolve, geom_sum_dist, moments, pmf_binomial, pmf_geometric_truncated, pmf_hypergeom,
    pmf_poisson_binomial, tail, DistError, FiniteDist, GeomSumSpec, HypergeomSpec,
    PoissonBinomialSpec,
};
pub use mc::{monte_carlo, MonteCarloEstimate, SimRng};
pub use query::{Deviation, Direction, Reference, TailQuery};
