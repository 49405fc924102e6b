//! k-neighbour bootstrap percolation on trees, grids and general graphs:
//! the dynamics, fort certificates, cutset contents and pruning, numerical
//! critical probabilities and seeded Monte Carlo experiments.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod animals;
pub mod distribution;
pub mod dynamics;
pub mod error;
pub mod forts;
pub mod generators;
pub mod graph;
pub mod montecarlo;
pub mod output;
pub mod rng;
pub mod treecalc;

pub use distribution::OffspringDistribution;
pub use dynamics::{run, step, RunReport, SiteConfig};
pub use error::{Error, Result};
pub use forts::{find_min_fort, is_fort, FortCertificate};
pub use generators::{gen_greedy_fortfree_tree, gen_grid, gen_gw_tree, gen_regular_tree, gen_subdivided_tree, Arity};
pub use graph::{Graph, RootedTree};
pub use rng::RngSeed;
