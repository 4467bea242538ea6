//! Exact machinery for number-conserving cellular automata (NCCA) on
//! d-dimensional periodic grids with the von Neumann neighborhood.
//!
//! A local rule is number-conserving when its global update preserves the
//! sum of all cell states on every configuration. Every such rule splits
//! uniquely into two parts:
//!
//! * a *split function*: each state redistributes itself over the
//!   neighborhood by a fixed per-state recipe, ignoring its neighbors;
//! * a *perturbation*: a correction that vanishes on single-particle
//!   neighborhoods and whose global image always sums to zero.
//!
//! The decomposition turns "is this rule number-conserving?" into a finite
//! exact-integer check, and turns "list every number-conserving rule" into
//! a bounded backtracking search over split recipes and perturbation
//! coefficients. All arithmetic is exact; there is no floating point.
//!
//! Module map:
//!
//! * [`lattice`] — directions, tori, and the overlap structure of von
//!   Neumann neighborhoods (the pair catalogs Ω and Λ).
//! * [`neighborhood`] — neighborhood configurations, monomers, dimers, and
//!   the canonical lookup-table index.
//! * [`localfn`] — local functions as dense integer LUTs, global
//!   application on torus configurations, density bookkeeping.
//! * [`split`] — split functions: enumeration, counting, evaluation.
//! * [`perturb`] — the perturbation space: basis, dimension, evaluation.
//! * [`engine`] — decomposition, the conservation decider, the bounded
//!   enumeration of all number-conserving rules, symmetry reduction.
//! * [`harness`] — independent brute-force verification (exhaustive,
//!   window-supported, and seeded-random) plus a trajectory runner.

pub mod engine;
mod error;
pub mod harness;
pub mod lattice;
pub mod localfn;
pub mod neighborhood;
pub mod perturb;
pub mod split;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
