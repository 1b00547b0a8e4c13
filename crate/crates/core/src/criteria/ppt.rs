use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::linalg::{eig_hermitian, eig_hermitian_tridiagonal, partial_transpose, LinalgError};
use crate::tolerances::TOL_PSD;

/// Positivity of the Choi state under transposition of the input factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PptResult {
    Pass { min_eigenvalue: f64 },
    Fail { min_eigenvalue: f64 },
}

impl PptResult {
    pub fn min_eigenvalue(&self) -> f64 {
        match *self {
            PptResult::Pass { min_eigenvalue } | PptResult::Fail { min_eigenvalue } => min_eigenvalue,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, PptResult::Pass { .. })
    }
}

/// Jacobi eigenvalues of the partially transposed Choi state; `Fail` iff the
/// smallest is below `−TOL_PSD`.
pub fn ppt_check(c: &Channel) -> Result<PptResult, LinalgError> {
    let pt = partial_transpose(c.choi(), &c.choi_shape(), 0)?;
    let min = eig_hermitian(&pt)?.values[0];
    Ok(if min < -TOL_PSD {
        PptResult::Fail { min_eigenvalue: min }
    } else {
        PptResult::Pass { min_eigenvalue: min }
    })
}

/// The same quantity through the Householder/QL eigensolver, used to confirm a
/// refutation independently.
pub(crate) fn ppt_min_eigenvalue_independent(c: &Channel) -> Result<f64, LinalgError> {
    let pt = partial_transpose(c.choi(), &c.choi_shape(), 0)?;
    Ok(eig_hermitian_tridiagonal(&pt)?.values[0])
}
