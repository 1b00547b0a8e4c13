use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};

use super::FeasibilityError;

/// One Hilbert–Schmidt constraint `Σ_b ⟨A_b, X_b⟩ = value`, with each `A_b`
/// Hermitian and stored by its upper-triangular nonzeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// `(block, i, j, a)` with `i ≤ j`; the entry `(j, i)` is `conj(a)`.
    pub(crate) entries: Vec<(usize, usize, usize, C64)>,
    pub(crate) value: f64,
}

impl Constraint {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn entries(&self) -> &[(usize, usize, usize, C64)] {
        &self.entries
    }

    /// `Σ_b Re Tr(A_b X_b)` evaluated directly on dense blocks.
    pub fn evaluate(&self, blocks: &[HermitianMatrix]) -> f64 {
        let mut s = 0.0;
        for &(b, i, j, a) in &self.entries {
            let x = blocks[b][(i, j)];
            if i == j {
                s += a.re * x.re;
            } else {
                s += 2.0 * (a.conj() * x).re;
            }
        }
        s
    }
}

/// `{(X_1, …, X_B) : X_b ⪰ 0, ⟨A_i, X⟩ = b_i}` over a direct sum of Hermitian
/// blocks. A single block is the plain problem `X ⪰ 0, 𝒜(X) = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityProblem {
    block_dims: Vec<usize>,
    constraints: Vec<Constraint>,
}

impl FeasibilityProblem {
    pub fn new(dim: usize) -> Self {
        Self::with_blocks(vec![dim])
    }

    pub fn with_blocks(block_dims: Vec<usize>) -> Self {
        Self {
            block_dims,
            constraints: Vec::new(),
        }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Total dimension of the block-diagonal ambient matrix.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Real dimension of the variable, `Σ d_b²`.
    pub fn real_dim(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Adds `⟨A, X⟩ = value` on a single-block problem.
    pub fn add_constraint(&mut self, a: &HermitianMatrix, value: f64) -> Result<(), FeasibilityError> {
        self.add_block_constraint(&[(0, a)], value)
    }

    /// Adds `Σ ⟨A_b, X_b⟩ = value` from dense per-block matrices.
    pub fn add_block_constraint(&mut self, terms: &[(usize, &HermitianMatrix)], value: f64) -> Result<(), FeasibilityError> {
        let mut entries = Vec::new();
        for &(b, a) in terms {
            let d = *self
                .block_dims
                .get(b)
                .ok_or_else(|| FeasibilityError::BadConstraint(format!("block {b} does not exist")))?;
            if a.dim() != d {
                return Err(FeasibilityError::BadConstraint(format!(
                    "constraint on block {b} has dimension {}, expected {d}",
                    a.dim()
                )));
            }
            for i in 0..d {
                for j in i..d {
                    let v = a[(i, j)];
                    if v.re != 0.0 || v.im != 0.0 {
                        entries.push((b, i, j, v));
                    }
                }
            }
        }
        self.push(entries, value)
    }

    /// Adds a constraint from sparse Hermitian entries on block 0. Entries below
    /// the diagonal are folded onto their mirror; repeated positions add up.
    pub fn add_sparse_constraint(&mut self, entries: &[(usize, usize, C64)], value: f64) -> Result<(), FeasibilityError> {
        let e = entries.iter().map(|&(i, j, a)| (0, i, j, a)).collect();
        self.add_sparse_block_constraint(e, value)
    }

    pub fn add_sparse_block_constraint(
        &mut self,
        entries: Vec<(usize, usize, usize, C64)>,
        value: f64,
    ) -> Result<(), FeasibilityError> {
        let mut folded: Vec<(usize, usize, usize, C64)> = entries
            .into_iter()
            .map(|(b, i, j, a)| if i <= j { (b, i, j, a) } else { (b, j, i, a.conj()) })
            .collect();
        folded.sort_by_key(|&(b, i, j, _)| (b, i, j));
        let mut merged: Vec<(usize, usize, usize, C64)> = Vec::with_capacity(folded.len());
        for e in folded {
            match merged.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (e.0, e.1, e.2) => last.3 += e.3,
                _ => merged.push(e),
            }
        }
        for &(b, i, j, a) in &merged {
            let d = *self
                .block_dims
                .get(b)
                .ok_or_else(|| FeasibilityError::BadConstraint(format!("block {b} does not exist")))?;
            if j >= d {
                return Err(FeasibilityError::BadConstraint(format!("entry ({i}, {j}) outside block {b} of dimension {d}")));
            }
            if i == j && a.im.abs() > crate::tolerances::TOL_HERM {
                return Err(FeasibilityError::BadConstraint(format!("diagonal entry ({i}, {i}) is not real")));
            }
        }
        merged.retain(|e| e.3.re != 0.0 || e.3.im != 0.0);
        self.push(merged, value)
    }

    fn push(&mut self, entries: Vec<(usize, usize, usize, C64)>, value: f64) -> Result<(), FeasibilityError> {
        if !value.is_finite() || entries.iter().any(|e| !e.3.re.is_finite() || !e.3.im.is_finite()) {
            return Err(FeasibilityError::BadConstraint("non-finite data".into()));
        }
        let entries = entries
            .into_iter()
            .map(|(b, i, j, a)| if i == j { (b, i, j, C64::new(a.re, 0.0)) } else { (b, i, j, a) })
            .collect();
        self.constraints.push(Constraint { entries, value });
        Ok(())
    }

    /// Offsets of each block inside the real parameter vector.
    pub(crate) fn real_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.block_dims.len());
        let mut acc = 0;
        for d in &self.block_dims {
            off.push(acc);
            acc += d * d;
        }
        off
    }

    /// The constraint as a sparse row over the real parametrization.
    pub(crate) fn real_row(&self, c: &Constraint, offsets: &[usize]) -> Vec<(usize, f64)> {
        let mut row = Vec::with_capacity(2 * c.entries.len());
        for &(b, i, j, a) in &c.entries {
            let d = self.block_dims[b];
            let o = offsets[b];
            if i == j {
                row.push((o + i * d + i, a.re));
            } else {
                let s = std::f64::consts::SQRT_2;
                if a.re != 0.0 {
                    row.push((o + i * d + j, s * a.re));
                }
                if a.im != 0.0 {
                    row.push((o + j * d + i, s * a.im));
                }
            }
        }
        row
    }

    /// Splits a real parameter vector into Hermitian blocks.
    pub fn blocks_from_real(&self, x: &[f64]) -> Vec<HermitianMatrix> {
        let mut out = Vec::with_capacity(self.block_dims.len());
        let mut o = 0;
        for &d in &self.block_dims {
            out.push(unpack(&x[o..o + d * d], d));
            o += d * d;
        }
        out
    }

    pub fn real_from_blocks(&self, blocks: &[HermitianMatrix]) -> Vec<f64> {
        let mut x = vec![0.0; self.real_dim()];
        let mut o = 0;
        for (&d, b) in self.block_dims.iter().zip(blocks) {
            pack(b, &mut x[o..o + d * d]);
            o += d * d;
        }
        x
    }

    /// Direct sum of blocks as one block-diagonal matrix.
    pub fn assemble(&self, blocks: &[HermitianMatrix]) -> HermitianMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        let mut o = 0;
        for (&d, b) in self.block_dims.iter().zip(blocks) {
            for i in 0..d {
                for j in 0..d {
                    m[(o + i, o + j)] = b[(i, j)];
                }
            }
            o += d;
        }
        HermitianMatrix::hermitian_part(&m)
    }

    /// Inverse of [`assemble`](Self::assemble); off-block entries are ignored.
    pub fn split(&self, m: &HermitianMatrix) -> Vec<HermitianMatrix> {
        let mut out = Vec::with_capacity(self.block_dims.len());
        let mut o = 0;
        for &d in &self.block_dims {
            let b = ComplexMatrix::from_fn(d, d, |i, j| m[(o + i, o + j)]);
            out.push(HermitianMatrix::hermitian_part(&b));
            o += d;
        }
        out
    }
}

/// Real coordinates of a Hermitian matrix: diagonal at `(i, i)`,
/// `√2 Re X_ij` at `(i, j)` and `√2 Im X_ij` at `(j, i)` for `i < j`. The map is
/// an isometry from the Frobenius norm to the Euclidean norm.
pub(crate) fn pack(m: &HermitianMatrix, out: &mut [f64]) {
    let d = m.dim();
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        out[i * d + i] = m[(i, i)].re;
        for j in i + 1..d {
            let v = m[(i, j)];
            out[i * d + j] = s * v.re;
            out[j * d + i] = s * v.im;
        }
    }
}

pub(crate) fn unpack(x: &[f64], d: usize) -> HermitianMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(x[i * d + i], 0.0);
        for j in i + 1..d {
            let v = C64::new(h * x[i * d + j], h * x[j * d + i]);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_is_an_isometry() {
        let m = HermitianMatrix::new(
            ComplexMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0), C64::new(2.0, -3.0), C64::new(2.0, 3.0), C64::new(-4.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let mut x = vec![0.0; 4];
        pack(&m, &mut x);
        let n2: f64 = x.iter().map(|v| v * v).sum();
        assert!((n2.sqrt() - m.frobenius_norm()).abs() < 1e-14);
        assert!((unpack(&x, 2).as_matrix() - m.as_matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn real_row_matches_trace_pairing() {
        let a = HermitianMatrix::new(
            ComplexMatrix::from_vec(2, 2, vec![C64::new(0.5, 0.0), C64::new(1.0, 2.0), C64::new(1.0, -2.0), C64::new(3.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let x = HermitianMatrix::new(
            ComplexMatrix::from_vec(2, 2, vec![C64::new(2.0, 0.0), C64::new(-1.0, 0.5), C64::new(-1.0, -0.5), C64::new(1.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let mut p = FeasibilityProblem::new(2);
        p.add_constraint(&a, 0.0).unwrap();
        let row = p.real_row(&p.constraints()[0], &p.real_offsets());
        let xr = p.real_from_blocks(std::slice::from_ref(&x));
        let via_row: f64 = row.iter().map(|&(k, v)| v * xr[k]).sum();
        let direct = a.hs_inner(&x);
        assert!((via_row - direct).abs() < 1e-14);
        assert!((p.constraints()[0].evaluate(&[x]) - direct).abs() < 1e-14);
    }

    #[test]
    fn sparse_entries_fold_and_merge() {
        let mut p = FeasibilityProblem::new(3);
        p.add_sparse_constraint(&[(2, 0, C64::new(1.0, 1.0)), (0, 2, C64::new(1.0, 0.0))], 1.0).unwrap();
        assert_eq!(p.constraints()[0].entries(), &[(0, 0, 2, C64::new(2.0, -1.0))]);
        assert!(p.add_sparse_constraint(&[(0, 3, C64::new(1.0, 0.0))], 0.0).is_err());
        assert!(p.add_sparse_constraint(&[(1, 1, C64::new(0.0, 1.0))], 0.0).is_err());
    }
}
