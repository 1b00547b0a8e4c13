//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Works on the matrix columns directly instead of on `A†A`, so small
//! singular values keep full relative accuracy; numerical-rank decisions at a
//! `1e-12` relative threshold need that.

use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let a = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let (rows, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();

    let total: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    // pairs of columns that are both at roundoff level relative to ‖A‖ can
    // rotate forever without becoming orthogonal in relative terms
    let floor = f64::EPSILON * f64::EPSILON * total;
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() || g <= floor {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let (head, tail) = cols.split_at_mut(q);
                let (cp, cq) = (&mut head[p], &mut tail[0]);
                for k in 0..rows {
                    let x = cp[k];
                    let y = cq[k];
                    cp[k] = x * c - phase * y * s;
                    cq[k] = x * s + phase * y * c;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
