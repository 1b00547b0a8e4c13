use serde::{Deserialize, Serialize};

use crate::linalg::{HermitianMatrix, C64};

use super::BargmannError;

/// `span{x_0, …, x_N}` inside the one-mode Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self, BargmannError> {
        if cutoff == 0 {
            return Err(BargmannError::InvalidArgument("cutoff must be at least 1".into()));
        }
        Ok(Self { cutoff })
    }

    /// Largest photon number `N`.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `N + 1`
    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// `|x_p⟩⟨x_q|`
    pub fn unit(&self, p: usize, q: usize) -> crate::linalg::ComplexMatrix {
        let mut m = crate::linalg::ComplexMatrix::zeros(self.dim(), self.dim());
        m[(p, q)] = C64::new(1.0, 0.0);
        m
    }
}

/// `ln n!` for `n = 0..=max`, by summing logarithms.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `Σ_{n>N} e^{-x} xⁿ/n!`, summed directly so small tails keep their
/// relative accuracy.
pub fn poisson_tail(x: f64, cutoff: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lnx = x.ln();
    let mut ln_fact: f64 = (1..=cutoff + 1).map(|k| (k as f64).ln()).sum();
    let mut sum = 0.0;
    let mut n = cutoff + 1;
    loop {
        let term = (n as f64 * lnx - x - ln_fact).exp();
        sum += term;
        // terms decrease geometrically once n > x
        if (n as f64) > x && term <= sum * 1e-17 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
        if n > cutoff + 100_000 {
            break;
        }
    }
    sum
}

/// A coherent vector truncated to a Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentVector {
    pub alpha: C64,
    /// `e^{-|α|²/2} αⁿ/√n!` for `n ≤ N`.
    pub coeffs: Vec<C64>,
}

impl CoherentVector {
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `1 − ‖ψ‖²` predicted analytically.
    pub fn tail(&self) -> f64 {
        poisson_tail(self.alpha.norm_sqr(), self.coeffs.len() - 1)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &CoherentVector) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::projector(&self.coeffs)
    }
}

pub fn coherent(alpha: C64, space: &FockSpace) -> CoherentVector {
    let lf = ln_factorials(space.cutoff());
    let r2 = alpha.norm_sqr();
    let coeffs = (0..space.dim())
        .map(|n| {
            if n == 0 {
                return C64::new((-r2 / 2.0).exp(), 0.0);
            }
            if r2 == 0.0 {
                return C64::new(0.0, 0.0);
            }
            // magnitude in log space, phase from the argument
            let mag = (n as f64 * r2.ln() / 2.0 - r2 / 2.0 - lf[n] / 2.0).exp();
            C64::from_polar(mag, n as f64 * alpha.arg())
        })
        .collect();
    CoherentVector { alpha, coeffs }
}
