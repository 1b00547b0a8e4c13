//! Witness checks that share no code with the solver loop: positivity by a
//! Cholesky attempt and constraints by direct evaluation on dense matrices.

use crate::linalg::{HermitianMatrix, C64};
use crate::tolerances::TOL_PSD;

use super::problem::FeasibilityProblem;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCheck {
    /// `X + tol_psd·1` admits a Cholesky factorization.
    pub psd: bool,
    /// `‖𝒜(X) − b‖₂` over every constraint, including dependent ones.
    pub constraint_residual: f64,
}

impl WitnessCheck {
    pub fn passes(&self, eps: f64) -> bool {
        self.psd && self.constraint_residual <= eps
    }
}

/// `true` iff `m + shift·1` is positive definite, decided by attempting a
/// Cholesky factorization.
pub fn psd_by_cholesky(m: &HermitianMatrix, shift: f64) -> bool {
    let n = m.dim();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = m[(j, j)].re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

/// Checks a block-diagonal witness (as returned in a feasibility outcome)
/// against the problem.
pub fn verify_witness(p: &FeasibilityProblem, witness: &HermitianMatrix) -> WitnessCheck {
    let blocks = p.split(witness);
    let psd = blocks.iter().all(|b| psd_by_cholesky(b, TOL_PSD));
    let constraint_residual = p
        .constraints()
        .iter()
        .map(|c| {
            let r = c.evaluate(&blocks) - c.value();
            r * r
        })
        .sum::<f64>()
        .sqrt();
    WitnessCheck { psd, constraint_residual }
}
