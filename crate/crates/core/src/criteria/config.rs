use serde::{Deserialize, Serialize};

use crate::feasibility::{Method, SolverConfig};
use crate::tolerances::{EPS_FEAS, EPS_SEP};

use super::separable::SeparableConfig;
use super::CriteriaError;

/// Everything a run depends on besides its input documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub eps_feas: f64,
    pub eps_sep: f64,
    pub max_iters: usize,
    pub stall_window: usize,
    pub joint_levels: Vec<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps_feas: EPS_FEAS,
            eps_sep: EPS_SEP,
            max_iters: 50_000,
            stall_window: 1_000,
            joint_levels: vec![2, 3, 4],
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CriteriaError> {
        if !(self.eps_feas > 0.0 && self.eps_feas.is_finite()) {
            return Err(CriteriaError::InvalidArgument(format!("eps_feas must be positive, got {}", self.eps_feas)));
        }
        if !(self.eps_sep > 0.0 && self.eps_sep.is_finite()) {
            return Err(CriteriaError::InvalidArgument(format!("eps_sep must be positive, got {}", self.eps_sep)));
        }
        if self.max_iters == 0 {
            return Err(CriteriaError::InvalidArgument("max_iters must be positive".into()));
        }
        if self.stall_window == 0 {
            return Err(CriteriaError::InvalidArgument("stall_window must be positive".into()));
        }
        if let Some(n) = self.joint_levels.iter().find(|n| !(2..=6).contains(*n)) {
            return Err(CriteriaError::InvalidArgument(format!("joint_levels entry {n} outside 2..=6")));
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            eps_feas: self.eps_feas,
            max_iters: self.max_iters,
            stall_window: self.stall_window,
            method: Method::Dykstra,
        }
    }

    pub fn separable(&self) -> SeparableConfig {
        SeparableConfig {
            eps_sep: self.eps_sep,
            seed: self.seed,
            ..SeparableConfig::default()
        }
    }
}
