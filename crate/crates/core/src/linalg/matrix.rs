//! Dense complex matrices stored row-major.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use super::LinalgError;
use crate::tolerances::TOL_HERM;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A dense `rows × cols` complex matrix with row-major entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum (the operator ∞-norm).
    pub fn max_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Hilbert–Schmidt pairing `Tr(self† other)`.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, &b)| a.conj() * b)
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// A square complex matrix that is Hermitian to within [`TOL_HERM`] per entry.
///
/// Constructors that take computed data (`hermitian_part`) average the matrix
/// with its adjoint, so the stored entries are exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates `m` against the Hermiticity tolerance and stores its
    /// Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare(m.rows(), m.cols()));
        }
        let defect = m.hermiticity_defect();
        if defect > TOL_HERM {
            return Err(LinalgError::NonHermitianInput(defect));
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self(out)
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[C64]) -> Self {
        Self::hermitian_part(&ComplexMatrix::outer(v, v))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn real_trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `self += s * other`, staying Hermitian for real `s`.
    pub fn add_scaled(&mut self, s: f64, other: &HermitianMatrix) {
        self.0.axpy(C64::new(s, 0.0), &other.0);
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `Re Tr(self · other)`
    pub fn hs_inner(&self, other: &HermitianMatrix) -> f64 {
        self.0.hs_inner(&other.0).re
    }

    /// `a · self · a†`
    pub fn congruence(&self, a: &ComplexMatrix) -> Self {
        Self::hermitian_part(&a.matmul(&self.0).matmul(&a.adjoint()))
    }
}

impl std::ops::Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Orthonormal basis of the real space of `d × d` Hermitian matrices:
/// `E_ii`, `(E_ij + E_ji)/√2` and `(−i E_ij + i E_ji)/√2` for `i < j`.
///
/// Returned in sparse form: each element is a list of `(row, col, value)`
/// upper-triangular entries.
pub fn hermitian_basis(d: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(vec![(i, i, ONE)]);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(vec![(i, j, C64::new(s, 0.0))]);
            out.push(vec![(i, j, C64::new(0.0, -s))]);
        }
    }
    out
}

/// Expands an upper-triangular sparse Hermitian description into a dense matrix.
pub fn dense_from_upper(d: usize, entries: &[(usize, usize, C64)]) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for &(i, j, z) in entries {
        if i == j {
            m[(i, i)] += C64::new(z.re, 0.0);
        } else {
            m[(i, j)] += z;
            m[(j, i)] += z.conj();
        }
    }
    HermitianMatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_vec(2, 2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(LinalgError::NonHermitianInput(_))
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let r = ComplexMatrix::from_vec(1, 1, vec![C64::new(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(LinalgError::NonFinite)));
        let r = ComplexMatrix::from_vec(2, 1, vec![ONE]);
        assert!(matches!(r, Err(LinalgError::BadShape(_))));
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        let d = 3;
        let basis: Vec<_> = hermitian_basis(d)
            .iter()
            .map(|e| dense_from_upper(d, e))
            .collect();
        assert_eq!(basis.len(), d * d);
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let ip = x.hs_inner(y);
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-15, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| C64::new((i + j) as f64, i as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(1.0, (i * j) as f64));
        let c = a.matmul(&b);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZERO;
                for k in 0..3 {
                    s += a[(i, k)] * b[(k, j)];
                }
                assert_eq!(c[(i, j)], s);
            }
        }
    }
}
