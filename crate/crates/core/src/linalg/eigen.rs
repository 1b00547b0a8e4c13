//! Hermitian eigensolvers.
//!
//! [`eig_hermitian`] is a cyclic complex Jacobi method: slow but very accurate,
//! used wherever a verdict depends on the sign of an eigenvalue.
//! [`eig_hermitian_tridiagonal`] reduces to a real tridiagonal matrix with
//! Householder reflections and finishes with implicit QL; it is roughly an
//! order of magnitude faster and is what the projection solver runs in its
//! inner loop. Having two unrelated routes also lets one re-verify the other.

use super::matrix::{ComplexMatrix, HermitianMatrix, C64, ONE, ZERO};
use super::LinalgError;

/// Sweep cap for the Jacobi solver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

const MAX_QL_ITERATIONS: usize = 60;

/// `m = V diag(values) V†` with eigenvalues ascending and the eigenvectors in
/// the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &l) in self.values.iter().enumerate() {
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                if vi == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::hermitian_part(&out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(|l| l)
    }

    fn sorted(mut values: Vec<f64>, vectors_by_row: Vec<Vec<C64>>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let vectors = ComplexMatrix::from_fn(n, n, |i, k| vectors_by_row[order[k]][i]);
        values = order.iter().map(|&k| values[k]).collect();
        Self { values, vectors }
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    // rows of `v` are eigenvectors, i.e. v = V^T as it accumulates
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(EigenDecomposition::sorted(values, v));
    }

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        // roundoff keeps the off-diagonal mass near n·ε·‖A‖ in large matrices
        if off.sqrt() <= 1e-15 * scale || off.sqrt() <= n as f64 * f64::EPSILON * scale {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * scale {
                    continue;
                }
                rotated = true;
                let phase = apq.conj() / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let se = phase * s;
                let ce = phase * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - se * akq;
                    a[(k, q)] = akp * s + ce * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - se.conj() * aqk;
                    a[(q, k)] = apk * s + ce.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                let (vp, vq) = two_rows(&mut v, p, q);
                for k in 0..n {
                    let x = vp[k];
                    let y = vq[k];
                    vp[k] = x * c - se * y;
                    vq[k] = x * s + ce * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS));
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(EigenDecomposition::sorted(values, v))
}

fn two_rows<T>(rows: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (head, tail) = rows.split_at_mut(q);
    (&mut head[p], &mut tail[0])
}

/// Householder tridiagonalization followed by implicit QL.
pub fn eig_hermitian_tridiagonal(m: &HermitianMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = m.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let (mut d, mut e, q) = tridiagonalize(m);
    // z rows are the columns of q
    let mut z: Vec<Vec<C64>> = (0..n).map(|k| q.column(k)).collect();
    tql(&mut d, &mut e, Some(&mut z))?;
    // z[k] is now the k-th eigenvector expressed in the original basis
    Ok(EigenDecomposition::sorted(d, z))
}

/// Eigenvalues (ascending) of the real symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal (`off.len() == diag.len() - 1`).
pub fn eigvals_symmetric_tridiagonal(diag: &[f64], off: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n);
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.to_vec();
    e.push(0.0);
    tql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Returns the tridiagonal diagonal, off-diagonal (padded with a trailing 0)
/// and the unitary `Q` with `m = Q T Q†`, `T` real symmetric.
fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>, ComplexMatrix) {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut q = ComplexMatrix::identity(n);
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let alpha = (lo..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(lo, k)];
        let x0n = x0.norm();
        let phase = if x0n == 0.0 { ONE } else { x0 / x0n };
        for i in lo..n {
            v[i] = a[(i, k)];
        }
        v[lo] += phase * alpha;
        let vnorm = (2.0 * alpha * (alpha + x0n)).sqrt();
        for vi in v[lo..n].iter_mut() {
            *vi /= vnorm;
        }

        // trailing block: B <- B - 2 (v w† + w v†), w = Bv - (v†Bv) v
        for i in lo..n {
            let mut s = ZERO;
            let row = a.row(i);
            for j in lo..n {
                s += row[j] * v[j];
            }
            p[i] = s;
        }
        let kappa: C64 = (lo..n).map(|i| v[i].conj() * p[i]).sum();
        for i in lo..n {
            p[i] -= v[i] * kappa.re;
        }
        for i in lo..n {
            let vi2 = v[i] * 2.0;
            let pi2 = p[i] * 2.0;
            for j in lo..n {
                let upd = vi2 * p[j].conj() + pi2 * v[j].conj();
                a[(i, j)] -= upd;
            }
        }
        // column / row k
        a[(lo, k)] = -phase * alpha;
        a[(k, lo)] = (-phase * alpha).conj();
        for i in lo + 1..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }

        // Q <- Q H
        for r in 0..n {
            let mut s = ZERO;
            for j in lo..n {
                s += q[(r, j)] * v[j];
            }
            if s == ZERO {
                continue;
            }
            let s2 = s * 2.0;
            for j in lo..n {
                let vj = v[j].conj();
                q[(r, j)] -= s2 * vj;
            }
        }
    }

    // make the subdiagonal real and non-negative with a diagonal phase
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phase = ONE;
    for k in 0..n {
        d[k] = a[(k, k)].re;
        if k > 0 {
            for r in 0..n {
                q[(r, k)] *= phase;
            }
        }
        if k + 1 < n {
            let t = a[(k + 1, k)];
            let tn = t.norm();
            e[k] = tn;
            if tn > 0.0 {
                phase *= t / tn;
            }
        }
    }
    (d, e, q)
}

/// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal
/// matrix. `e[i]` couples `i` and `i + 1`; `e[n-1]` must be 0. If `z` is
/// given, `z[i]` is rotated along with column `i`.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<C64>>>) -> Result<(), LinalgError> {
    let n = d.len();
    // couplings below ε‖T‖ are dropped even between tiny diagonal entries,
    // which a purely relative test deflates only after many sweeps
    let floor = f64::EPSILON * d.iter().zip(e.iter()).map(|(a, b)| a.abs() + b.abs()).fold(0.0, f64::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(LinalgError::NoConvergence(MAX_QL_ITERATIONS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let (zi, zi1) = two_rows(z, i, i + 1);
                    for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *y;
                        *y = *x * s + f * c;
                        *x = *x * c - f * s;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        HermitianMatrix::hermitian_part(&m)
    }

    fn check(m: &HermitianMatrix, eig: &EigenDecomposition) {
        let n = m.dim();
        let recon = eig.reconstruct();
        let err = (recon.as_matrix() - m.as_matrix()).frobenius_norm();
        assert!(err <= 1e-10 * m.frobenius_norm().max(1.0), "reconstruction {err}");
        let vv = eig.vectors.adjoint().matmul(&eig.vectors);
        let uerr = (&vv - &ComplexMatrix::identity(n)).max_abs();
        assert!(uerr <= 1e-10, "unitarity {uerr}");
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_and_diagonal() {
        let eig = eig_hermitian(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        let eig = eig_hermitian(&HermitianMatrix::from_real_diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0]);
        let eig = eig_hermitian_tridiagonal(&HermitianMatrix::from_real_diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn pauli_x_closed_form() {
        let x = HermitianMatrix::new(ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()).unwrap();
        for eig in [eig_hermitian(&x).unwrap(), eig_hermitian_tridiagonal(&x).unwrap()] {
            assert!((eig.values[0] + 1.0).abs() < 1e-15);
            assert!((eig.values[1] - 1.0).abs() < 1e-15);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            // (|0> - |1>)/sqrt2 and (|0> + |1>)/sqrt2 up to a global phase
            let minus = eig.vector(0);
            let plus = eig.vector(1);
            let ov_minus = minus[0].conj() * h - minus[1].conj() * h;
            let ov_plus = plus[0].conj() * h + plus[1].conj() * h;
            assert!((ov_minus.norm() - 1.0).abs() < 1e-14);
            assert!((ov_plus.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn random_matrices_reconstruct_both_routes() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let m = random_hermitian(n, seed);
            let a = eig_hermitian(&m).unwrap();
            let b = eig_hermitian_tridiagonal(&m).unwrap();
            check(&m, &a);
            check(&m, &b);
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // rank-2 projector in dimension 6
        let m = random_hermitian(6, 9);
        let eig = eig_hermitian(&m).unwrap();
        let p = eig.reconstruct_with(|l| if l > eig.values[3] { 1.0 } else { 0.0 });
        let ep = eig_hermitian_tridiagonal(&p).unwrap();
        check(&p, &ep);
        let expected = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        for (x, y) in ep.values.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_eigenvalues() {
        // 1D Laplacian: eigenvalues 2 - 2cos(k pi/(n+1))
        let n = 8;
        let vals = eigvals_symmetric_tridiagonal(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let expected = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - expected).abs() < 1e-13);
        }
    }
}
