use serde::{Deserialize, Serialize};

use crate::linalg::HermitianMatrix;
use crate::tolerances::EPS_FEAS;

use super::affine::AffineProjector;
use super::cone::project_blocks;
use super::problem::FeasibilityProblem;
use super::FeasibilityError;

/// Minimum decrease of the best residual over the stall window; less than
/// this counts as a stall.
pub const STALL_DECREASE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dykstra's algorithm: converges to the projection of the start point
    /// onto the intersection.
    Dykstra,
    /// Plain alternating projections (von Neumann). Fejér monotone with
    /// respect to every feasible point.
    Alternating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps_feas: f64,
    pub max_iters: usize,
    pub stall_window: usize,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_feas: EPS_FEAS,
            max_iters: 50_000,
            stall_window: 1_000,
            method: Method::Dykstra,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible,
    LikelyInfeasible,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityOutcome {
    pub verdict: Verdict,
    /// Block-diagonal PSD witness when `verdict == Feasible`.
    pub witness: Option<HermitianMatrix>,
    /// `max(‖Z − P_A(Z)‖_F, ‖𝒜(Z) − b‖₂)` at the last PSD iterate `Z`.
    pub residual: f64,
    pub iterations: usize,
    /// Smallest distance between the PSD iterate and the affine set seen.
    pub best_residual: f64,
    /// Decrease of the best residual over the last full stall window.
    pub window_decrease: Option<f64>,
    /// Constraints dropped as linearly dependent.
    pub dropped_constraints: usize,
    /// The affine constraints themselves are contradictory.
    pub inconsistent: bool,
}

/// Runs the solver from the default start point `0` (so the first affine
/// iterate is the projection of `0`).
pub fn solve(p: &FeasibilityProblem, cfg: &SolverConfig) -> FeasibilityOutcome {
    let start = vec![0.0; p.real_dim()];
    run(p, cfg, start)
}

/// Runs the solver from the block-diagonal start point `blocks`.
pub fn solve_from(p: &FeasibilityProblem, cfg: &SolverConfig, blocks: &[HermitianMatrix]) -> Result<FeasibilityOutcome, FeasibilityError> {
    if blocks.len() != p.block_dims().len() || blocks.iter().zip(p.block_dims()).any(|(b, &d)| b.dim() != d) {
        return Err(FeasibilityError::BadConstraint("start point does not match the block structure".into()));
    }
    Ok(run(p, cfg, p.real_from_blocks(blocks)))
}

fn run(p: &FeasibilityProblem, cfg: &SolverConfig, start: Vec<f64>) -> FeasibilityOutcome {
    let proj = match AffineProjector::new(p) {
        Ok(proj) => proj,
        Err(FeasibilityError::InconsistentConstraints { mismatch, .. }) => {
            return FeasibilityOutcome {
                verdict: Verdict::LikelyInfeasible,
                witness: None,
                residual: mismatch,
                iterations: 0,
                best_residual: mismatch,
                window_decrease: None,
                dropped_constraints: 0,
                inconsistent: true,
            }
        }
        Err(_) => unreachable!("constraints are validated when added"),
    };
    let raw_rows: Vec<(Vec<(usize, f64)>, f64)> = {
        let offsets = p.real_offsets();
        p.constraints().iter().map(|c| (p.real_row(c, &offsets), c.value())).collect()
    };
    let constraint_residual = |x: &[f64]| -> f64 {
        raw_rows
            .iter()
            .map(|(row, b)| {
                let v: f64 = row.iter().map(|&(k, a)| a * x[k]).sum();
                (v - b) * (v - b)
            })
            .sum::<f64>()
            .sqrt()
    };

    let n = p.real_dim();
    let mut y = start;
    proj.project(&mut y);
    let mut corr = vec![0.0; n];
    let mut best_hist: Vec<f64> = Vec::with_capacity(cfg.max_iters.min(1 << 20));
    let mut best = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut z = y.clone();
    let mut window_decrease = None;

    for it in 1..=cfg.max_iters {
        let w: Vec<f64> = match cfg.method {
            Method::Dykstra => y.iter().zip(&corr).map(|(a, b)| a + b).collect(),
            Method::Alternating => y.clone(),
        };
        z = match project_blocks(p, &w) {
            Ok(z) => z,
            // both eigensolvers failed (non-finite iterate); leave Undecided
            Err(_) => break,
        };
        if cfg.method == Method::Dykstra {
            for ((c, wi), zi) in corr.iter_mut().zip(&w).zip(&z) {
                *c = wi - zi;
            }
        }
        y.copy_from_slice(&z);
        proj.project(&mut y);
        let dist = y.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        residual = dist;
        best = best.min(dist);
        best_hist.push(best);

        if dist <= cfg.eps_feas {
            let full = dist.max(constraint_residual(&z));
            residual = full;
            if full <= cfg.eps_feas {
                let blocks = p.blocks_from_real(&z);
                return FeasibilityOutcome {
                    verdict: Verdict::Feasible,
                    witness: Some(p.assemble(&blocks)),
                    residual: full,
                    iterations: it,
                    best_residual: best,
                    window_decrease,
                    dropped_constraints: proj.dropped(),
                    inconsistent: false,
                };
            }
        }
        if cfg.stall_window > 0 && it > cfg.stall_window {
            let dec = best_hist[it - 1 - cfg.stall_window] - best;
            window_decrease = Some(dec);
            if dec < STALL_DECREASE && dist > 100.0 * cfg.eps_feas {
                return FeasibilityOutcome {
                    verdict: Verdict::LikelyInfeasible,
                    witness: None,
                    residual: dist.max(constraint_residual(&z)),
                    iterations: it,
                    best_residual: best,
                    window_decrease,
                    dropped_constraints: proj.dropped(),
                    inconsistent: false,
                };
            }
        }
    }
    FeasibilityOutcome {
        verdict: Verdict::Undecided,
        witness: None,
        residual: if residual.is_finite() { residual.max(constraint_residual(&z)) } else { residual },
        iterations: best_hist.len(),
        best_residual: best,
        window_decrease,
        dropped_constraints: proj.dropped(),
        inconsistent: false,
    }
}
