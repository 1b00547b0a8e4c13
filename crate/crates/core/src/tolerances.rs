//! Numerical tolerances shared across the crate.
//!
//! Tests assert against these constants rather than repeating literals.

/// Per-entry absolute Hermiticity tolerance.
pub const TOL_HERM: f64 = 1e-12;

/// Smallest eigenvalue accepted as "positive semidefinite".
pub const TOL_PSD: f64 = 1e-9;

/// Eigendecomposition reconstruction and unitarity tolerance.
pub const TOL_RECON: f64 = 1e-10;

/// Trace preservation / POVM completeness tolerance.
pub const TOL_TP: f64 = 1e-9;

/// Probability vectors must sum to one within this.
pub const TOL_WEIGHTS: f64 = 1e-10;

/// Default feasibility residual for the alternating-projection solver.
pub const EPS_FEAS: f64 = 1e-7;

/// Frobenius residual accepted for a separable decomposition of a Choi state.
pub const EPS_SEP: f64 = 1e-6;

/// Tolerance on reproducing a channel from a synthesized measure-prepare form
/// (trace norm, per basis state).
pub const TOL_SYNTH: f64 = 1e-6;

/// Relative drop tolerance for linearly dependent constraints.
pub const TOL_DEPENDENT: f64 = 1e-10;
