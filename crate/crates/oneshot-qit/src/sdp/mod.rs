//! A small dense semidefinite-program solver with duality-gap certificates.
//!
//! Serves as the authoritative oracle for the hypothesis-testing optimum and
//! as the feasibility engine behind smoothed max-relative-entropy brackets.

pub mod formulate;
pub mod problem;
pub mod solver;

pub use formulate::{
    compress_to_support, formulate_dh, formulate_dmax_feasibility,
    formulate_fidelity_feasibility, Feasibility,
};
pub use problem::{Relation, SdpConstraint, SdpProblem, SdpSolution, SdpStatus};
pub use solver::{solve, FEAS_TOL, GAP_TOL, MAX_ITER};
