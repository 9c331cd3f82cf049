//! Exact solver for ternary quadratic programs, x ∈ {-1, 0, 1}ⁿ.
//!
//! Lower bounds come from semidefinite relaxations tightened with triangle,
//! pair, RLT, split and k-gonal cuts; upper bounds from variable neighborhood
//! search. A ternary branch-and-bound closes the gap. Ratio objectives are
//! handled either directly or through Dinkelbach's parametric method.

pub mod bnb;
pub mod cuts;
pub mod error;
pub mod instances;
pub mod problem;
pub mod relaxation;
pub mod rng;
pub mod sdp;
pub mod ternary_psd;
pub mod vns;

pub use error::{Error, Result};
pub use problem::{
    check_feasible, evaluate_objective, evaluate_ratio, relative_gap, LinearConstraint,
    ProblemInstance, RatioInstance, Solution, SymMatrix, TernaryVector, TqpInstance, Variant,
};
