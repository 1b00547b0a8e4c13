//! The coherent-state channel on a truncated Fock space.
//!
//! With coherent vectors `ψ_α = e^{-|α|²/2} Σ αⁿ/√n! x_n`, the Bargmann POVM
//! `π^{-1}|ψ_α⟩⟨ψ_α| d²α` defines a channel `Γ(f) = π^{-1}∫ f(α)|ψ_α⟩⟨ψ_α| d²α`
//! from functions to operators, and the heterodyne (Husimi) map
//! `Ψ(A)(α) = ⟨ψ_α|A ψ_α⟩` goes back. The composition `Λ = Γ ∘ Ψ` factors
//! through a commutative algebra, so it is entanglement breaking, and it is
//! injective. Here everything is cut to `span{x_0, …, x_N}`; integrals over
//! `ℂ` use the product rule of [`Quadrature`].

mod fock;
mod lambda;
mod quadrature;

pub use fock::{coherent, ln_factorials, poisson_tail, CoherentVector, FockSpace};
pub use lambda::{
    bargmann_channel, bargmann_eb_report, bargmann_eb_report_with, closed_form_deviation, gamma_bargmann, gamma_bargmann_real,
    heterodyne, husimi_samples, injectivity_spectrum, injectivity_spectrum_diagonal, injectivity_spectrum_with, kernel_selectivity,
    lambda_matrix_elements, lambda_matrix_elements_with, numerical_rank, overcompleteness_error, BargmannChannel, BargmannReport,
    HeterodyneOptions, LambdaTensor, CLOSED_FORM_TOL, INJECTIVITY_CUTOFF_CAP, RANK_TOL,
};
pub use quadrature::{gauss_laguerre, Quadrature, QuadratureSpec};

use thiserror::Error;

use crate::channels::ChannelError;
use crate::criteria::CriteriaError;
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BargmannError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cutoff {cutoff} exceeds the cap {cap}")]
    DimensionCap { cutoff: usize, cap: usize },
    #[error("closed-form matrix elements differ from quadrature by {0:.3e}")]
    ClosedFormMismatch(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
}
