//! Seeded random channels, unitaries, states and measure-prepare forms.
//!
//! All generators take a `u64` seed and use ChaCha8, so identical seeds give
//! bit-identical output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{hermitian_function, ComplexMatrix, HermitianMatrix, C64};

use super::{holevo_to_channel, Channel, ChannelError, HolevoForm, KrausForm, Povm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A `rows × cols` matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(normal(), normal()) * std::f64::consts::FRAC_1_SQRT_2)
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt). Requires full
/// column rank, which holds almost surely for Gaussian input.
fn orthonormal_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for u in &q {
                let ov: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ov * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

/// Haar-distributed unitary (QR of a Ginibre matrix).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    orthonormal_columns(&ginibre(d, d, rng))
}

/// Density matrix `G G† / Tr(G G†)` with `G` a `d × d` Ginibre matrix.
pub fn random_density(d: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = ginibre(d, d, rng);
    let w = HermitianMatrix::hermitian_part(&g.matmul(&g.adjoint()));
    let t = w.real_trace();
    w.scale(1.0 / t)
}

/// Random channel with Kraus rank `rank`, from an isometry
/// `C^{d_in} → C^{d_out} ⊗ C^{rank}` obtained by orthonormalizing a Gaussian
/// matrix.
pub fn random_channel(dim_in: usize, dim_out: usize, rank: usize, seed: u64) -> Result<Channel, ChannelError> {
    if dim_in == 0 || dim_out == 0 || rank == 0 {
        return Err(ChannelError::InvalidArgument("dimensions and rank must be positive".into()));
    }
    if dim_out * rank < dim_in {
        return Err(ChannelError::InvalidArgument(format!(
            "rank {rank} too small: an isometry needs dim_out·rank ≥ dim_in = {dim_in}"
        )));
    }
    let mut rng = rng(seed);
    let v = orthonormal_columns(&ginibre(dim_out * rank, dim_in, &mut rng));
    // V = Σ_k K_k ⊗ |k⟩, rows indexed by (a, k)
    let kraus = (0..rank)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |a, p| v[(a * rank + k, p)]))
        .collect();
    Channel::from_kraus(&KrausForm::new(kraus)?)
}

/// Random measure-prepare form with `k` outcomes. Effects are Wishart
/// matrices scaled by Dirichlet weights and normalized to sum to the identity
/// by congruence with `S^{-1/2}`; preparations are Ginibre-random states.
pub fn random_holevo(dim_in: usize, dim_out: usize, k: usize, seed: u64) -> Result<HolevoForm, ChannelError> {
    if dim_in == 0 || dim_out == 0 || k == 0 {
        return Err(ChannelError::InvalidArgument("dimensions and outcome count must be positive".into()));
    }
    let mut rng = rng(seed);
    let gamma = Gamma::new(1.0, 1.0).expect("valid shape");
    let raw: Vec<f64> = (0..k).map(|_| gamma.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut effects = Vec::with_capacity(k);
    let mut sum = HermitianMatrix::zeros(dim_in);
    for w in raw {
        let g = ginibre(dim_in, dim_in, &mut rng);
        let wish = HermitianMatrix::hermitian_part(&g.matmul(&g.adjoint()));
        let e = wish.scale(w / total / wish.real_trace());
        sum = sum.add(&e);
        effects.push(e);
    }
    let s_inv_sqrt = hermitian_function(&sum, |l| 1.0 / l.sqrt())?;
    let mut effects: Vec<HermitianMatrix> = effects.iter().map(|e| e.congruence(&s_inv_sqrt)).collect();
    if k == 1 {
        effects[0] = HermitianMatrix::identity(dim_in);
    }
    let preparations = (0..k).map(|_| random_density(dim_out, &mut rng)).collect();
    HolevoForm::new(Povm::new(effects)?, preparations)
}

/// Convenience: the channel of [`random_holevo`].
pub fn random_holevo_channel(dim_in: usize, dim_out: usize, k: usize, seed: u64) -> Result<Channel, ChannelError> {
    holevo_to_channel(&random_holevo(dim_in, dim_out, k, seed)?)
}

/// `ρ ↦ U ρ U†` for a Haar-random `U`.
pub fn random_unitary_channel(d: usize, seed: u64) -> Channel {
    let u = random_unitary(d, &mut rng(seed));
    Channel::unitary(&u).expect("unitary is trace preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;

    #[test]
    fn rank_one_channel_is_unitary_conjugation() {
        for seed in 0..5 {
            let c = random_channel(2, 2, 1, seed).unwrap();
            let eig = eig_hermitian(c.choi()).unwrap();
            assert!((eig.values[3] - 1.0).abs() < 1e-12);
            assert!(eig.values[..3].iter().all(|l| l.abs() < 1e-12));
        }
    }

    #[test]
    fn random_channels_are_valid_and_deterministic() {
        for (din, dout, r) in [(2, 3, 2), (3, 2, 4), (3, 3, 9)] {
            let a = random_channel(din, dout, r, 11).unwrap();
            let b = random_channel(din, dout, r, 11).unwrap();
            assert_eq!(a, b);
            assert!(a.trace_preservation_defect() < 1e-12);
            assert_ne!(a, random_channel(din, dout, r, 12).unwrap());
        }
        assert!(random_channel(4, 2, 1, 0).is_err());
    }

    #[test]
    fn random_holevo_passes_channel_invariants() {
        for seed in 0..10 {
            let h = random_holevo(2, 2, 4, seed).unwrap();
            let c = holevo_to_channel(&h).unwrap();
            assert!(c.trace_preservation_defect() < 1e-12);
            assert_eq!(h, random_holevo(2, 2, 4, seed).unwrap());
        }
        let h = random_holevo(3, 2, 1, 3).unwrap();
        assert_eq!(h.povm().effects()[0], HermitianMatrix::identity(3));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(4, &mut rng(5));
        let err = (&u.adjoint().matmul(&u) - &ComplexMatrix::identity(4)).max_abs();
        assert!(err < 1e-13);
    }
}
