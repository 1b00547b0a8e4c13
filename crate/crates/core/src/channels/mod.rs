//! Finite-dimensional quantum channels in the Schrödinger picture.
//!
//! A channel `Λ: L(C^{d_in}) → L(C^{d_out})` is stored as its trace-one Choi
//! state on `in ⊗ out`:
//!
//! ```text
//! C = (1/d_in) Σ_{ij} |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)
//! ```
//!
//! which is the state obtained by sending half of the maximally entangled
//! vector `d_in^{-1/2} Σ_i |i⟩|i⟩` through `Λ`. The channel acts as
//! `Λ(X) = d_in · Tr_in[(Xᵀ ⊗ 1) C]`. Complete positivity is `C ⪰ 0` and trace
//! preservation is `Tr_out C = 1/d_in`.
//!
//! Heisenberg-picture statements translate through the Hilbert–Schmidt dual:
//! a unital CP map `A ↦ Λ*(A)` on observables corresponds to the trace
//! preserving map above via `Tr(Λ(ρ) A) = Tr(ρ Λ*(A))`. Composition order is
//! reversed between the pictures, so "`Λ = Γ ∘ α`" on observables is
//! `compose(α, Γ)` here. Classical outcome algebras are the diagonal
//! subalgebra of `L(C^k)`.

mod channel;
mod measure;
pub mod random;

pub use channel::{Channel, KrausForm};
pub use measure::{holevo_to_channel, qc_channel, Ensemble, HolevoForm, Povm};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("Choi matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid measure-prepare form: {0}")]
    InvalidHolevoForm(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Checks that `rho` is a density matrix: PSD within `TOL_PSD` and unit trace
/// within `TOL_TP`.
pub fn check_state(rho: &crate::linalg::HermitianMatrix) -> Result<(), String> {
    use crate::tolerances::{TOL_PSD, TOL_TP};
    let tr = rho.real_trace();
    if (tr - 1.0).abs() > TOL_TP {
        return Err(format!("trace {tr} differs from 1"));
    }
    let min = crate::linalg::min_eigenvalue(rho).map_err(|e| e.to_string())?;
    if min < -TOL_PSD {
        return Err(format!("minimum eigenvalue {min:.3e} is negative"));
    }
    Ok(())
}
