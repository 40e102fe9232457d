//! Exact tools for p-splittability of finite set collections: nearest-integer
//! targets, an exact region-count solver, closed-form criteria for small
//! collections, the four-set unsplittable catalogue, the ZOE reduction, and
//! prevalence estimates.

pub mod catalog4;
pub mod collection;
pub mod criteria;
pub mod error;
pub mod rational;
pub mod solver;
pub mod stats;
pub mod zoe;

pub use collection::{
    matrix_of_profile, p_targets, profile_of_matrix, IncidenceMatrix, Interval, RegionSelection,
    TargetSpec, VennProfile,
};
pub use error::{Error, Result};
pub use rational::{nint, Proportion, Rational, Rounding};
pub use solver::{discrepancy, find_selection, is_p_splittable, solve_matrix, SolveOutcome};
