//! Block decomposition of operators on `in ⊗ out^{⊗n}` that commute with
//! permutations of the `n` output copies.
//!
//! Such an operator is `⊕_λ B_λ ⊗ 1_{P_λ}` (Schur–Weyl), so it is determined by
//! one block `B_λ` on `in ⊗ Q_λ` per Young shape `λ`. Numerically: the
//! Jucys–Murphy elements `X_k = Σ_{j<k} (j k)` commute, and their joint
//! eigenspaces `E_T` are labelled by standard tableaux `T` (eigenvalues are the
//! box contents). Each `E_T` is an irreducible copy of `Q_λ`. Bases of the
//! `E_T` with the same shape are aligned through `P_T' π_σ`, which by Schur's
//! lemma is a multiple of a unitary intertwiner `E_T → E_T'`.

use std::collections::BTreeMap;

use crate::linalg::{eig_hermitian_tridiagonal, ComplexMatrix, HermitianMatrix, C64, ZERO};

use super::CriteriaError;

/// Isometries `U_T: C^q → out^{⊗n}` onto the Jucys–Murphy eigenspaces of one
/// shape, with aligned bases.
#[derive(Clone, Debug)]
pub struct ShapeBlock {
    /// Sorted box contents, which identify the shape.
    pub contents: Vec<i64>,
    pub isometries: Vec<ComplexMatrix>,
}

impl ShapeBlock {
    /// Dimension `q` of the irreducible `U(d)` factor.
    pub fn dim(&self) -> usize {
        self.isometries[0].cols()
    }

    /// Number of standard tableaux, the multiplicity of the block.
    pub fn multiplicity(&self) -> usize {
        self.isometries.len()
    }
}

#[derive(Clone, Debug)]
pub struct SymmetricDecomposition {
    pub local_dim: usize,
    pub copies: usize,
    pub shapes: Vec<ShapeBlock>,
}

impl SymmetricDecomposition {
    pub fn new(local_dim: usize, copies: usize) -> Result<Self, CriteriaError> {
        let (d, n) = (local_dim, copies);
        if d == 0 || n == 0 {
            return Err(CriteriaError::InvalidArgument("empty tensor power".into()));
        }
        let total = d.pow(n as u32);
        let base = 2 * n as i64;

        // type classes: words with the same letter multiset
        let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for w in 0..total {
            let mut letters = digits(w, d, n);
            letters.sort_unstable();
            classes.entry(letters).or_default().push(w);
        }

        let mut spaces: BTreeMap<i64, Vec<Vec<C64>>> = BTreeMap::new();
        for words in classes.values() {
            let s = words.len();
            let pos: BTreeMap<usize, usize> = words.iter().enumerate().map(|(i, &w)| (w, i)).collect();
            let mut r = ComplexMatrix::zeros(s, s);
            for (col, &w) in words.iter().enumerate() {
                let dig = digits(w, d, n);
                for k in 1..n {
                    let ck = base.pow(k as u32) as f64;
                    for j in 0..k {
                        let mut swapped = dig.clone();
                        swapped.swap(j, k);
                        let row = pos[&undigits(&swapped, d)];
                        r[(row, col)] += C64::new(ck, 0.0);
                    }
                }
            }
            let eig = eig_hermitian_tridiagonal(&HermitianMatrix::hermitian_part(&r))?;
            for (k, &val) in eig.values.iter().enumerate() {
                let key = val.round() as i64;
                if (val - key as f64).abs() > 1e-6 * (1.0 + val.abs()) {
                    return Err(CriteriaError::Numerical(format!("Jucys–Murphy eigenvalue {val} is not an integer")));
                }
                let mut v = vec![ZERO; total];
                for (i, &w) in words.iter().enumerate() {
                    v[w] = eig.vectors[(i, k)];
                }
                spaces.entry(key).or_default().push(v);
            }
        }

        // group tableaux by shape
        let mut by_shape: BTreeMap<Vec<i64>, Vec<ComplexMatrix>> = BTreeMap::new();
        for (key, vecs) in spaces {
            let mut contents = decode_contents(key, base, n);
            contents.sort_unstable();
            let q = vecs.len();
            let e = ComplexMatrix::from_fn(total, q, |i, j| vecs[j][i]);
            by_shape.entry(contents).or_default().push(e);
        }

        let perms = permutations(n);
        let mut shapes = Vec::with_capacity(by_shape.len());
        for (contents, spaces) in by_shape {
            let q = spaces[0].cols();
            if spaces.iter().any(|e| e.cols() != q) {
                return Err(CriteriaError::Numerical("tableaux of one shape have different dimensions".into()));
            }
            let reference = spaces[0].clone();
            let mut isometries = vec![reference.clone()];
            for target in &spaces[1..] {
                // pick the permutation whose image of the reference space
                // overlaps the target space most
                let mut best: Option<(f64, ComplexMatrix)> = None;
                for sigma in &perms {
                    let moved = permute_rows(&reference, sigma, d, n);
                    let overlap = target.adjoint().matmul(&moved);
                    let c = overlap.column(0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if best.as_ref().is_none_or(|(b, _)| c > *b) {
                        best = Some((c, overlap));
                    }
                }
                let (c, overlap) = best.expect("at least one permutation");
                if c < 1e-6 {
                    return Err(CriteriaError::Numerical("no permutation links two tableaux of one shape".into()));
                }
                let aligned = target.matmul(&overlap).scale_real(1.0 / c);
                let gram = aligned.adjoint().matmul(&aligned);
                let dev = (&gram - &ComplexMatrix::identity(q)).max_abs();
                if dev > 1e-9 {
                    return Err(CriteriaError::Numerical(format!("aligned basis is not orthonormal (deviation {dev:.2e})")));
                }
                isometries.push(aligned);
            }
            shapes.push(ShapeBlock { contents, isometries });
        }
        Ok(Self { local_dim, copies, shapes })
    }

    pub fn total_dim(&self) -> usize {
        self.local_dim.pow(self.copies as u32)
    }
}

pub(crate) fn digits(mut w: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = w % d;
        w /= d;
    }
    out
}

pub(crate) fn undigits(dig: &[usize], d: usize) -> usize {
    dig.iter().fold(0, |acc, &x| acc * d + x)
}

/// Contents of boxes `1..n` from `key = Σ_k base^k · content_k`; the first box
/// always has content 0.
fn decode_contents(key: i64, base: i64, n: usize) -> Vec<i64> {
    let mut out = vec![0];
    let mut rem = key / base;
    for _ in 1..n {
        let mut t = rem.rem_euclid(base);
        if t > base / 2 {
            t -= base;
        }
        out.push(t);
        rem = (rem - t) / base;
    }
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permutations(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap_permutations(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// Applies the copy permutation to each column: position `k` of the new word
/// holds position `sigma[k]` of the old one.
fn permute_rows(m: &ComplexMatrix, sigma: &[usize], d: usize, n: usize) -> ComplexMatrix {
    let total = m.rows();
    let mut out = ComplexMatrix::zeros(total, m.cols());
    for w in 0..total {
        let dig = digits(w, d, n);
        let moved: Vec<usize> = sigma.iter().map(|&s| dig[s]).collect();
        let target = undigits(&moved, d);
        for j in 0..m.cols() {
            out[(target, j)] = m[(w, j)];
        }
    }
    out
}
