//! PSD feasibility: find `X ⪰ 0` with `⟨A_i, X⟩ = b_i`, or give up with a
//! residual-based verdict.
//!
//! The variable may be a direct sum of Hermitian blocks, which lets callers
//! pass symmetry-reduced problems; a single block is the ordinary case. The
//! solver alternates between the affine set and the (block) PSD cone with
//! Dykstra's correction. `LikelyInfeasible` is a heuristic: it means the
//! distance between the iterates stopped decreasing while still well above
//! the feasibility tolerance, not that a dual certificate was found.

mod affine;
mod cone;
mod problem;
mod solver;
mod verify;

pub use affine::{project_affine, AffineProjector};
pub use cone::project_psd;
pub use problem::{Constraint, FeasibilityProblem};
pub use solver::{solve, solve_from, FeasibilityOutcome, Method, SolverConfig, Verdict, STALL_DECREASE};
pub use verify::{psd_by_cholesky, verify_witness, WitnessCheck};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("constraint {index} is a combination of earlier ones with a different right-hand side (mismatch {mismatch:.3e})")]
    InconsistentConstraints { index: usize, mismatch: f64 },
    #[error("bad constraint: {0}")]
    BadConstraint(String),
}
