use crate::linalg::{kron, min_eigenvalue, ComplexMatrix, HermitianMatrix};
use crate::tolerances::{TOL_PSD, TOL_TP, TOL_WEIGHTS};

use super::{check_state, Channel, ChannelError};

/// A finite-outcome POVM: PSD effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self, ChannelError> {
        let d = effects
            .first()
            .ok_or_else(|| ChannelError::InvalidPovm("no effects".into()))?
            .dim();
        let mut sum = HermitianMatrix::zeros(d);
        for (i, e) in effects.iter().enumerate() {
            if e.dim() != d {
                return Err(ChannelError::InvalidPovm(format!("effect {i} has dimension {}, expected {d}", e.dim())));
            }
            let min = min_eigenvalue(e)?;
            if min < -TOL_PSD {
                return Err(ChannelError::InvalidPovm(format!("effect {i} has negative eigenvalue {min:.3e}")));
            }
            sum = sum.add(e);
        }
        let dev = (sum.as_matrix() - &ComplexMatrix::identity(d)).max_abs();
        if dev > TOL_TP {
            return Err(ChannelError::InvalidPovm(format!("effects sum to identity only within {dev:.3e}")));
        }
        Ok(Self { effects })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        let effects = (0..d)
            .map(|i| {
                let mut diag = vec![0.0; d];
                diag[i] = 1.0;
                HermitianMatrix::from_real_diagonal(&diag)
            })
            .collect();
        Self { effects }
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Outcome probabilities `Tr(M_i ρ)`.
    pub fn probabilities(&self, rho: &HermitianMatrix) -> Vec<f64> {
        self.effects.iter().map(|m| m.hs_inner(rho)).collect()
    }
}

/// Measure with a POVM, then prepare the state attached to the outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct HolevoForm {
    povm: Povm,
    preparations: Vec<HermitianMatrix>,
}

impl HolevoForm {
    pub fn new(povm: Povm, preparations: Vec<HermitianMatrix>) -> Result<Self, ChannelError> {
        if preparations.len() != povm.len() {
            return Err(ChannelError::InvalidHolevoForm(format!(
                "{} preparations for {} effects",
                preparations.len(),
                povm.len()
            )));
        }
        let dout = preparations[0].dim();
        for (i, tau) in preparations.iter().enumerate() {
            if tau.dim() != dout {
                return Err(ChannelError::InvalidHolevoForm(format!("preparation {i} has dimension {}", tau.dim())));
            }
            check_state(tau).map_err(|e| ChannelError::InvalidHolevoForm(format!("preparation {i}: {e}")))?;
        }
        Ok(Self { povm, preparations })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn preparations(&self) -> &[HermitianMatrix] {
        &self.preparations
    }

    pub fn dim_in(&self) -> usize {
        self.povm.dim()
    }

    pub fn dim_out(&self) -> usize {
        self.preparations[0].dim()
    }

    /// `Σ_i Tr(M_i ρ) τ_i`
    pub fn apply(&self, rho: &HermitianMatrix) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(self.dim_out());
        for (p, tau) in self.povm.probabilities(rho).into_iter().zip(&self.preparations) {
            out.add_scaled(p, tau);
        }
        out
    }

    /// The preparation channel `|i⟩⟨j| ↦ δ_ij τ_i` from the classical outcome
    /// register to the output.
    pub fn preparation_channel(&self) -> Result<Channel, ChannelError> {
        let k = self.povm.len();
        Channel::from_basis_action(k, self.dim_out(), |i, j| {
            if i == j {
                self.preparations[i].as_matrix().clone()
            } else {
                ComplexMatrix::zeros(self.dim_out(), self.dim_out())
            }
        })
    }

    /// The separable decomposition of the Choi state:
    /// weights `Tr(M_i)/d_in`, left states `M_iᵀ / Tr(M_i)`, right states `τ_i`.
    /// Zero effects are skipped.
    pub fn ensemble(&self) -> Ensemble {
        let din = self.dim_in() as f64;
        let mut weights = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (m, tau) in self.povm.effects.iter().zip(&self.preparations) {
            let t = m.real_trace();
            if t <= 0.0 {
                continue;
            }
            weights.push(t / din);
            left.push(m.transpose().scale(1.0 / t));
            right.push(tau.clone());
        }
        Ensemble { weights, left, right }
    }
}

/// A weighted list of product states `Σ w_i σ_i ⊗ τ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    left: Vec<HermitianMatrix>,
    right: Vec<HermitianMatrix>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, left: Vec<HermitianMatrix>, right: Vec<HermitianMatrix>) -> Result<Self, ChannelError> {
        if weights.is_empty() || weights.len() != left.len() || weights.len() != right.len() {
            return Err(ChannelError::InvalidEnsemble(format!(
                "{} weights, {} left states, {} right states",
                weights.len(),
                left.len(),
                right.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(ChannelError::InvalidEnsemble(format!("weight {w} is negative")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOL_WEIGHTS {
            return Err(ChannelError::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let (dl, dr) = (left[0].dim(), right[0].dim());
        for (i, (s, t)) in left.iter().zip(&right).enumerate() {
            if s.dim() != dl || t.dim() != dr {
                return Err(ChannelError::InvalidEnsemble(format!("term {i} has mismatched dimensions")));
            }
            check_state(s).map_err(|e| ChannelError::InvalidEnsemble(format!("left state {i}: {e}")))?;
            check_state(t).map_err(|e| ChannelError::InvalidEnsemble(format!("right state {i}: {e}")))?;
        }
        Ok(Self { weights, left, right })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn left_states(&self) -> &[HermitianMatrix] {
        &self.left
    }

    pub fn right_states(&self) -> &[HermitianMatrix] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i σ_i ⊗ τ_i`
    pub fn reconstruct(&self) -> HermitianMatrix {
        let d = self.left[0].dim() * self.right[0].dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for ((w, s), t) in self.weights.iter().zip(&self.left).zip(&self.right) {
            out.axpy(crate::linalg::C64::new(*w, 0.0), &kron(s, t));
        }
        HermitianMatrix::hermitian_part(&out)
    }
}

/// The channel `ρ ↦ Σ_i Tr(M_i ρ) τ_i`, with Choi state `Σ_i (M_iᵀ/d_in) ⊗ τ_i`.
pub fn holevo_to_channel(h: &HolevoForm) -> Result<Channel, ChannelError> {
    let din = h.dim_in();
    let d = din * h.dim_out();
    let mut choi = ComplexMatrix::zeros(d, d);
    for (m, tau) in h.povm.effects.iter().zip(&h.preparations) {
        choi = &choi + &kron(&m.transpose(), tau);
    }
    let choi = HermitianMatrix::hermitian_part(&choi.scale_real(1.0 / din as f64));
    Channel::from_choi(din, h.dim_out(), choi)
        .map_err(|e| ChannelError::InvalidHolevoForm(e.to_string()))
}

/// Measures with `p` and records the outcome in a diagonal (classical)
/// register of dimension `p.len()`.
pub fn qc_channel(p: &Povm) -> Channel {
    let k = p.len();
    let preparations = (0..k)
        .map(|i| {
            let mut diag = vec![0.0; k];
            diag[i] = 1.0;
            HermitianMatrix::from_real_diagonal(&diag)
        })
        .collect();
    let h = HolevoForm {
        povm: p.clone(),
        preparations,
    };
    holevo_to_channel(&h).expect("valid POVM and basis preparations")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};

    fn plus() -> HermitianMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        HermitianMatrix::projector(&[C64::new(h, 0.0), C64::new(h, 0.0)])
    }

    /// Qubit SIC effects `(1 + n_k·σ)/4` with tetrahedral Bloch vectors.
    fn sic() -> Povm {
        let s = 1.0 / 3f64.sqrt();
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let effects = dirs
            .iter()
            .map(|[x, y, z]| {
                HermitianMatrix::new(
                    ComplexMatrix::from_vec(
                        2,
                        2,
                        vec![
                            C64::new((1.0 + z) / 4.0, 0.0),
                            C64::new(x / 4.0, -y / 4.0),
                            C64::new(x / 4.0, y / 4.0),
                            C64::new((1.0 - z) / 4.0, 0.0),
                        ],
                    )
                    .unwrap(),
                )
                .unwrap()
            })
            .collect();
        Povm::new(effects).unwrap()
    }

    #[test]
    fn trivial_povm_gives_constant_channel() {
        let sigma = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]);
        let h = HolevoForm::new(Povm::new(vec![HermitianMatrix::identity(2)]).unwrap(), vec![sigma.clone()]).unwrap();
        let c = holevo_to_channel(&h).unwrap();
        assert!(c.choi_distance(&Channel::constant(2, &sigma).unwrap()) < 1e-15);

        let half = HermitianMatrix::identity(2).scale(0.5);
        let tau = plus();
        let h = HolevoForm::new(Povm::new(vec![half.clone(), half]).unwrap(), vec![sigma.clone(), tau.clone()]).unwrap();
        let mix = sigma.add(&tau).scale(0.5);
        assert!(holevo_to_channel(&h).unwrap().choi_distance(&Channel::constant(2, &mix).unwrap()) < 1e-15);
    }

    #[test]
    fn computational_measure_prepare_is_dephasing() {
        let p = Povm::computational(2);
        let h = HolevoForm::new(p.clone(), p.effects().to_vec()).unwrap();
        let c = holevo_to_channel(&h).unwrap();
        // basis-action oracle: E_ij -> δ_ij E_ii
        let oracle = Channel::from_basis_action(2, 2, |i, j| {
            let mut m = ComplexMatrix::zeros(2, 2);
            if i == j {
                m[(i, i)] = C64::new(1.0, 0.0);
            }
            m
        })
        .unwrap();
        assert!(c.choi_distance(&oracle) < 1e-15);
        assert!(qc_channel(&p).choi_distance(&oracle) < 1e-15);
    }

    #[test]
    fn qc_channel_examples() {
        let c = qc_channel(&Povm::new(vec![HermitianMatrix::identity(3)]).unwrap());
        assert_eq!(c.dim_out(), 1);
        let rho = HermitianMatrix::from_real_diagonal(&[0.2, 0.3, 0.5]);
        assert!((c.apply(&rho).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);

        let sic = sic();
        let c = qc_channel(&sic);
        assert_eq!((c.dim_in(), c.dim_out()), (2, 4));
        assert!(c.trace_preservation_defect() < 1e-15);
        for rho in [plus(), HermitianMatrix::from_real_diagonal(&[1.0, 0.0])] {
            let out = c.apply(&rho).unwrap();
            assert!((out.real_trace() - 1.0).abs() < 1e-14);
            let probs = sic.probabilities(&rho);
            for a in 0..4 {
                assert!((out[(a, a)].re - probs[a]).abs() < 1e-15);
                for b in 0..4 {
                    if a != b {
                        assert_eq!(out[(a, b)], ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn ensemble_reconstructs_holevo_choi() {
        let h = HolevoForm::new(sic(), vec![plus(), plus(), HermitianMatrix::identity(2).scale(0.5), HermitianMatrix::from_real_diagonal(&[1.0, 0.0])]).unwrap();
        let c = holevo_to_channel(&h).unwrap();
        let e = h.ensemble();
        let e = Ensemble::new(e.weights.clone(), e.left.clone(), e.right.clone()).unwrap();
        assert!((e.reconstruct().as_matrix() - c.choi().as_matrix()).max_abs() < 1e-15);
        for rho in [plus(), HermitianMatrix::from_real_diagonal(&[0.25, 0.75])] {
            let direct = h.apply(&rho);
            assert!((direct.as_matrix() - c.apply(&rho).unwrap().as_matrix()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn preparation_channel_after_qc_reproduces_holevo() {
        let h = HolevoForm::new(sic(), vec![plus(), plus(), HermitianMatrix::identity(2).scale(0.5), HermitianMatrix::from_real_diagonal(&[1.0, 0.0])]).unwrap();
        let composed = Channel::compose(&h.preparation_channel().unwrap(), &qc_channel(h.povm())).unwrap();
        assert!(composed.choi_distance(&holevo_to_channel(&h).unwrap()) < 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Povm::new(vec![HermitianMatrix::identity(2).scale(0.5)]), Err(ChannelError::InvalidPovm(_))));
        let neg = HermitianMatrix::from_real_diagonal(&[2.0, -1.0]);
        assert!(Povm::new(vec![neg, HermitianMatrix::from_real_diagonal(&[-1.0, 2.0])]).is_err());
        let p = Povm::computational(2);
        assert!(matches!(HolevoForm::new(p.clone(), vec![plus()]), Err(ChannelError::InvalidHolevoForm(_))));
        assert!(HolevoForm::new(p, vec![plus(), HermitianMatrix::identity(2)]).is_err());
        assert!(Ensemble::new(vec![0.5, 0.4], vec![plus(), plus()], vec![plus(), plus()]).is_err());
    }
}
