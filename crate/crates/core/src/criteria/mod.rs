//! Tests and witnesses for the entanglement-breaking property.
//!
//! At finite dimension the following are equivalent for a channel `Λ`, and
//! each has a constructive or refuting counterpart here:
//!
//! * the Choi state is separable ([`separable_decomposition`], refuted by
//!   [`ppt_check`]);
//! * `Λ` has a measure-prepare form ([`holevo_from_decomposition`]);
//! * `Λ` factors through a channel with a classical output register
//!   ([`qc_factorization`], [`randomization_order`]);
//! * `Λ` has an `n`-joint channel for every `n` ([`n_joint_feasibility`]),
//!   tested for a finite ladder of `n`.
//!
//! Broadcastability ([`broadcast_feasibility`]) characterizes channels that
//! are equivalent to one with a classical output. [`eb_report`] runs everything
//! and assembles a verdict.

mod broadcast;
mod config;
mod joint;
mod ppt;
mod report;
mod separable;
pub mod symmetry;

pub use broadcast::{broadcast_feasibility, randomization_order, ChannelSearch, WitnessSource};
pub use config::RunConfig;
pub use joint::{
    marginal_residuals, n_joint_feasibility, n_joint_feasibility_from, product_joint_witness, symmetrize_joint, JointOutcome,
    JointProblem,
};
pub use ppt::{ppt_check, PptResult};
pub use report::{eb_report, eb_report_with, EbReport, EbVerdict, ReportOptions};
pub use separable::{
    check_decomposition, holevo_from_decomposition, qc_factorization, separable_decomposition, QcFactorization, SeparableConfig, SeparableResult,
};

use thiserror::Error;

use crate::channels::ChannelError;
use crate::feasibility::FeasibilityError;
use crate::linalg::LinalgError;

/// Largest ambient dimension `dim_in · dim_out^n` accepted for joint problems.
pub const JOINT_DIM_CAP: usize = 4096;

/// Largest ambient dimension `dim_out³` accepted for broadcasting problems.
pub const BROADCAST_DIM_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("ambient dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a valid decomposition: {0}")]
    NotAValidDecomposition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
