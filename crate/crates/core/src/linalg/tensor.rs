//! Kronecker products and operations on tensor factors of a composite space.

use super::matrix::{ComplexMatrix, HermitianMatrix, ZERO};
use super::LinalgError;

/// Ordered list of tensor factor dimensions (big-endian).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorShape {
    factors: Vec<usize>,
}

impl TensorShape {
    pub fn new(factors: Vec<usize>) -> Result<Self, LinalgError> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(LinalgError::BadShape(format!("invalid factor list {factors:?}")));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Stride of each factor in a flat basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.factors[k + 1];
        }
        s
    }

    /// Splits a flat index into per-factor digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for k in (0..self.factors.len()).rev() {
            out[k] = index % self.factors[k];
            index /= self.factors[k];
        }
        out
    }

    pub fn check(&self, dim: usize) -> Result<(), LinalgError> {
        if self.dim() != dim {
            return Err(LinalgError::BadShape(format!(
                "shape {:?} has dimension {} but the matrix has dimension {dim}",
                self.factors,
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `(a ⊗ b)[(i·rb + k), (j·cb + l)] = a[i,j] · b[k,l]`
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

fn keep_list(shape: &TensorShape, keep: &[usize]) -> Result<Vec<bool>, LinalgError> {
    let mut kept = vec![false; shape.len()];
    for &k in keep {
        if k >= shape.len() || kept[k] {
            return Err(LinalgError::BadShape(format!("bad kept factor list {keep:?}")));
        }
        kept[k] = true;
    }
    Ok(kept)
}

/// Partial trace of an arbitrary square matrix over every factor not listed
/// in `keep`. Kept factors stay in their original order.
pub fn partial_trace_general(m: &ComplexMatrix, shape: &TensorShape, keep: &[usize]) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    shape.check(m.rows())?;
    let kept = keep_list(shape, keep)?;
    let strides = shape.strides();
    let kept_dims: Vec<usize> = (0..shape.len()).filter(|&k| kept[k]).map(|k| shape.factors()[k]).collect();
    let traced_dims: Vec<usize> = (0..shape.len()).filter(|&k| !kept[k]).map(|k| shape.factors()[k]).collect();
    let kept_strides: Vec<usize> = (0..shape.len()).filter(|&k| kept[k]).map(|k| strides[k]).collect();
    let traced_strides: Vec<usize> = (0..shape.len()).filter(|&k| !kept[k]).map(|k| strides[k]).collect();

    let offsets = |dims: &[usize], strides: &[usize]| -> Vec<usize> {
        let total: usize = dims.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for k in (0..dims.len()).rev() {
                    off += (idx % dims[k]) * strides[k];
                    idx /= dims[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept_dims, &kept_strides);
    let traced_off = offsets(&traced_dims, &traced_strides);

    let dk = kept_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            let mut s = ZERO;
            for &t in &traced_off {
                s += m[(ra + t, cb + t)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

pub fn partial_trace(m: &HermitianMatrix, shape: &TensorShape, keep: &[usize]) -> Result<HermitianMatrix, LinalgError> {
    let out = partial_trace_general(m.as_matrix(), shape, keep)?;
    Ok(HermitianMatrix::hermitian_part(&out))
}

/// Transposes the given tensor factor. An involution; preserves Hermiticity.
pub fn partial_transpose(m: &HermitianMatrix, shape: &TensorShape, factor: usize) -> Result<HermitianMatrix, LinalgError> {
    shape.check(m.dim())?;
    if factor >= shape.len() {
        return Err(LinalgError::BadShape(format!("factor {factor} out of range")));
    }
    let n = m.dim();
    let stride = shape.strides()[factor];
    let d = shape.factors()[factor];
    let digit = |i: usize| (i / stride) % d;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let di = digit(i);
        for j in 0..n {
            let dj = digit(j);
            // swap the factor's digits between row and column
            let i2 = i - di * stride + dj * stride;
            let j2 = j - dj * stride + di * stride;
            out[(i2, j2)] = m[(i, j)];
        }
    }
    // exact permutation of Hermitian entries: still Hermitian bit-for-bit
    Ok(HermitianMatrix::hermitian_part(&out))
}

/// Basis-index map for a factor permutation: `map[out_index] = in_index`,
/// where output factor `k` is input factor `sigma[k]`.
pub(crate) fn permutation_index_map(shape: &TensorShape, sigma: &[usize]) -> Result<(Vec<usize>, TensorShape), LinalgError> {
    let n = shape.len();
    if sigma.len() != n {
        return Err(LinalgError::BadPermutation(format!("{sigma:?} has the wrong length for {n} factors")));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(LinalgError::BadPermutation(format!("{sigma:?} is not a bijection")));
        }
        seen[s] = true;
    }
    let out_shape = TensorShape::new(sigma.iter().map(|&s| shape.factors()[s]).collect())?;
    let in_strides = shape.strides();
    let map = (0..shape.dim())
        .map(|o| {
            let digits = out_shape.digits(o);
            digits.iter().zip(sigma).map(|(&dgt, &s)| dgt * in_strides[s]).sum()
        })
        .collect();
    Ok((map, out_shape))
}

/// Reorders tensor factors: on product operators
/// `A_0 ⊗ ⋯ ⊗ A_{n-1} ↦ A_{σ(0)} ⊗ ⋯ ⊗ A_{σ(n-1)}`.
pub fn permute_factors(m: &HermitianMatrix, shape: &TensorShape, sigma: &[usize]) -> Result<HermitianMatrix, LinalgError> {
    shape.check(m.dim())?;
    let (map, _) = permutation_index_map(shape, sigma)?;
    let n = m.dim();
    let out = ComplexMatrix::from_fn(n, n, |a, b| m[(map[a], map[b])]);
    Ok(HermitianMatrix::hermitian_part(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let g = ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let p = g.matmul(&g.adjoint());
        let t = p.trace().re;
        HermitianMatrix::hermitian_part(&p.scale_real(1.0 / t))
    }

    fn phi_plus() -> HermitianMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        HermitianMatrix::projector(&v)
    }

    #[test]
    fn kron_basic() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(kron(&a, &b), ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_xx_elementwise() {
        let x = ComplexMatrix::from_fn(2, 2, |i, j| if i != j { C64::new(1.0, 0.0) } else { ZERO });
        let xx = kron(&x, &x);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(xx[(i * 2 + k, j * 2 + l)], x[(i, j)] * x[(k, l)]);
                    }
                }
            }
        }
        // X⊗X maps vec(I) = |00> + |11> to itself
        let v = [C64::new(1.0, 0.0), ZERO, ZERO, C64::new(1.0, 0.0)];
        assert_eq!(xx.matvec(&v), v.to_vec());
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(2, &mut rng);
        let t = random_state(3, &mut rng).scale(2.5);
        let shape = TensorShape::new(vec![2, 3]).unwrap();
        let st = HermitianMatrix::hermitian_part(&kron(&s, &t));
        let r = partial_trace(&st, &shape, &[0]).unwrap();
        assert!((r.as_matrix() - s.scale(2.5).as_matrix()).max_abs() < 1e-14);

        let shape22 = TensorShape::new(vec![2, 2]).unwrap();
        let r = partial_trace(&phi_plus(), &shape22, &[0]).unwrap();
        assert!((r.as_matrix() - HermitianMatrix::identity(2).scale(0.5).as_matrix()).max_abs() < 1e-15);

        let all = partial_trace(&st, &shape, &[]).unwrap();
        assert_eq!(all.dim(), 1);
        assert!((all[(0, 0)].re - st.real_trace()).abs() < 1e-14);
        assert!(partial_trace(&st, &shape22, &[0]).is_err());
    }

    #[test]
    fn partial_transpose_examples() {
        let shape = TensorShape::new(vec![2, 2]).unwrap();
        let eig = eig_hermitian(&partial_transpose(&phi_plus(), &shape, 1).unwrap()).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in eig.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let id = HermitianMatrix::identity(4).scale(0.25);
        assert_eq!(partial_transpose(&id, &shape, 0).unwrap(), id);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(2, &mut rng);
        let t = random_state(2, &mut rng);
        let st = HermitianMatrix::hermitian_part(&kron(&s, &t));
        let pt = partial_transpose(&st, &shape, 1).unwrap();
        let expected = kron(&s, &t.transpose());
        assert!((pt.as_matrix() - &expected).max_abs() < 1e-15);
        assert!(eig_hermitian(&pt).unwrap().values[0] > -1e-14);
    }

    #[test]
    fn permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_state(2, &mut rng);
        let b = random_state(2, &mut rng);
        let c = random_state(2, &mut rng);
        let shape2 = TensorShape::new(vec![2, 2]).unwrap();
        let ab = HermitianMatrix::hermitian_part(&kron(&a, &b));
        assert_eq!(permute_factors(&ab, &shape2, &[0, 1]).unwrap(), ab);
        let ba = permute_factors(&ab, &shape2, &[1, 0]).unwrap();
        assert!((ba.as_matrix() - &kron(&b, &a)).max_abs() < 1e-15);

        let shape3 = TensorShape::new(vec![2, 2, 2]).unwrap();
        let abc = HermitianMatrix::hermitian_part(&kron(&kron(&a, &b), &c));
        let cab = permute_factors(&abc, &shape3, &[2, 0, 1]).unwrap();
        let oracle = kron(&kron(&c, &a), &b);
        assert!((cab.as_matrix() - &oracle).max_abs() < 1e-15);

        assert!(matches!(permute_factors(&abc, &shape3, &[0, 0, 1]), Err(LinalgError::BadPermutation(_))));
    }

    #[test]
    fn mixed_dimension_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_state(2, &mut rng);
        let b = random_state(3, &mut rng);
        let shape = TensorShape::new(vec![2, 3]).unwrap();
        let ab = HermitianMatrix::hermitian_part(&kron(&a, &b));
        let ba = permute_factors(&ab, &shape, &[1, 0]).unwrap();
        assert!((ba.as_matrix() - &kron(&b, &a)).max_abs() < 1e-15);
    }
}
