use rayon::prelude::*;

use crate::linalg::HermitianMatrix;
use crate::tolerances::TOL_DEPENDENT;

use super::problem::FeasibilityProblem;
use super::FeasibilityError;

/// Relative tolerance on the right-hand side of a dropped (dependent) row.
const TOL_CONSISTENT: f64 = 1e-8;

/// Work size above which row operations are spread over threads.
const PARALLEL_WORK: usize = 1 << 16;

/// Orthogonal projector onto `{x : A x = b}` in the real parametrization.
///
/// Rows are orthonormalized by modified Gram–Schmidt with one round of
/// reorthogonalization; rows whose remainder falls below `TOL_DEPENDENT`
/// relative to their norm are dropped after checking that their right-hand
/// side agrees with the kept rows.
#[derive(Clone, Debug)]
pub struct AffineProjector {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    dropped: usize,
}

impl AffineProjector {
    pub fn new(p: &FeasibilityProblem) -> Result<Self, FeasibilityError> {
        let n = p.real_dim();
        let offsets = p.real_offsets();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        let mut dropped = 0;
        for (idx, c) in p.constraints().iter().enumerate() {
            let mut r = vec![0.0; n];
            for (k, v) in p.real_row(c, &offsets) {
                r[k] += v;
            }
            let norm0 = norm(&r);
            let mut b = c.value();
            if norm0 == 0.0 {
                if b.abs() > TOL_CONSISTENT {
                    return Err(FeasibilityError::InconsistentConstraints { index: idx, mismatch: b.abs() });
                }
                dropped += 1;
                continue;
            }
            r.iter_mut().for_each(|v| *v /= norm0);
            b /= norm0;
            for _ in 0..2 {
                let coefs = dots(&rows, &r);
                for ((q, beta), coef) in rows.iter().zip(&rhs).zip(&coefs) {
                    axpy(-coef, q, &mut r);
                    b -= coef * beta;
                }
            }
            let rn = norm(&r);
            if rn <= TOL_DEPENDENT {
                if b.abs() > TOL_CONSISTENT {
                    return Err(FeasibilityError::InconsistentConstraints { index: idx, mismatch: b.abs() });
                }
                dropped += 1;
                continue;
            }
            r.iter_mut().for_each(|v| *v /= rn);
            rows.push(r);
            rhs.push(b / rn);
        }
        Ok(Self { dim: n, rows, rhs, dropped })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// `x − Qᵀ(Qx − b̃)` in place.
    pub fn project(&self, x: &mut [f64]) {
        let mut coefs = dots(&self.rows, x);
        for (c, b) in coefs.iter_mut().zip(&self.rhs) {
            *c -= b;
        }
        if self.rows.len() * self.dim >= PARALLEL_WORK {
            const CHUNK: usize = 4096;
            x.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                let start = ci * CHUNK;
                let len = chunk.len();
                for (q, c) in self.rows.iter().zip(&coefs) {
                    for (xi, qi) in chunk.iter_mut().zip(&q[start..start + len]) {
                        *xi -= c * qi;
                    }
                }
            });
        } else {
            for (q, c) in self.rows.iter().zip(&coefs) {
                axpy(-c, q, x);
            }
        }
    }
}

fn dots(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    if rows.len() * x.len() >= PARALLEL_WORK {
        rows.par_iter().map(|q| dot(q, x)).collect()
    } else {
        rows.iter().map(|q| dot(q, x)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Frobenius-nearest point of the affine set `{X : 𝒜(X) = b}` to `x`, for a
/// single-block problem.
pub fn project_affine(x: &HermitianMatrix, p: &FeasibilityProblem) -> Result<HermitianMatrix, FeasibilityError> {
    if p.block_dims() != [x.dim()] {
        return Err(FeasibilityError::BadConstraint(format!(
            "point of dimension {} for a problem with blocks {:?}",
            x.dim(),
            p.block_dims()
        )));
    }
    let proj = AffineProjector::new(p)?;
    let mut v = p.real_from_blocks(std::slice::from_ref(x));
    proj.project(&mut v);
    Ok(p.blocks_from_real(&v).remove(0))
}
