use rayon::prelude::*;

use crate::linalg::{eig_hermitian, eig_hermitian_tridiagonal, HermitianMatrix, LinalgError};

use super::problem::{pack, unpack, FeasibilityProblem};

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
pub fn project_psd(x: &HermitianMatrix) -> Result<HermitianMatrix, LinalgError> {
    let eig = match eig_hermitian_tridiagonal(x) {
        Ok(e) => e,
        Err(_) => eig_hermitian(x)?,
    };
    if eig.values[0] >= 0.0 {
        return Ok(x.clone());
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// Projects every block of the real parameter vector onto the PSD cone.
pub(crate) fn project_blocks(p: &FeasibilityProblem, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let dims = p.block_dims();
    let offsets = p.real_offsets();
    let projected: Result<Vec<Vec<f64>>, LinalgError> = dims
        .par_iter()
        .zip(offsets.par_iter())
        .map(|(&d, &o)| {
            let block = unpack(&x[o..o + d * d], d);
            let proj = project_psd(&block)?;
            let mut out = vec![0.0; d * d];
            pack(&proj, &mut out);
            Ok(out)
        })
        .collect();
    Ok(projected?.concat())
}
