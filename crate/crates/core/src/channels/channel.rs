use crate::linalg::{
    eig_hermitian, eig_hermitian_tridiagonal, kron, partial_trace, partial_trace_general, permute_factors, trace_norm, ComplexMatrix,
    HermitianMatrix, TensorShape, C64, ONE, ZERO,
};
use crate::tolerances::{TOL_PSD, TOL_TP};

use super::ChannelError;

/// A completely positive trace-preserving map, stored as its trace-one Choi
/// state on `in ⊗ out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    choi: HermitianMatrix,
}

/// Kraus operators `K_k: C^{d_in} → C^{d_out}` with `Σ K_k† K_k = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausForm {
    operators: Vec<ComplexMatrix>,
}

impl KrausForm {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = operators
            .first()
            .ok_or_else(|| ChannelError::InvalidArgument("empty Kraus list".into()))?;
        let (dout, din) = (first.rows(), first.cols());
        if operators.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(ChannelError::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let mut sum = ComplexMatrix::zeros(din, din);
        for k in &operators {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let dev = (&sum - &ComplexMatrix::identity(din)).max_abs();
        if dev > TOL_TP {
            return Err(ChannelError::NotTracePreserving(dev));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim_in(&self) -> usize {
        self.operators[0].cols()
    }

    pub fn dim_out(&self) -> usize {
        self.operators[0].rows()
    }

    /// `Σ K X K†`
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.operators {
            out = &out + &k.matmul(x).matmul(&k.adjoint());
        }
        out
    }
}

impl Channel {
    /// Validates a trace-one Choi state: PSD within `TOL_PSD` and
    /// `Tr_out C = 1/d_in` within `TOL_TP`.
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: HermitianMatrix) -> Result<Self, ChannelError> {
        if dim_in == 0 || dim_out == 0 || choi.dim() != dim_in * dim_out {
            return Err(ChannelError::DimensionMismatch(format!(
                "Choi matrix of dimension {} for {dim_in} -> {dim_out}",
                choi.dim()
            )));
        }
        let shape = TensorShape::new(vec![dim_in, dim_out])?;
        let reduced = partial_trace(&choi, &shape, &[0])?;
        let target = HermitianMatrix::identity(dim_in).scale(1.0 / dim_in as f64);
        let dev = (reduced.as_matrix() - target.as_matrix()).max_abs();
        if dev > TOL_TP {
            return Err(ChannelError::NotTracePreserving(dev));
        }
        let min = if choi.dim() <= 64 {
            eig_hermitian(&choi)?.values[0]
        } else {
            eig_hermitian_tridiagonal(&choi)?.values[0]
        };
        if min < -TOL_PSD {
            return Err(ChannelError::NotCompletelyPositive(min));
        }
        Ok(Self { dim_in, dim_out, choi })
    }

    /// Builds the Choi state from the action on matrix units,
    /// `f(i, j) = Λ(|i⟩⟨j|)`.
    pub fn from_basis_action(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(usize, usize) -> ComplexMatrix,
    ) -> Result<Self, ChannelError> {
        Channel::from_choi(dim_in, dim_out, choi_from_basis_action(dim_in, dim_out, f)?)
    }

    pub fn from_kraus(k: &KrausForm) -> Result<Self, ChannelError> {
        let (din, dout) = (k.dim_in(), k.dim_out());
        let mut choi = ComplexMatrix::zeros(din * dout, din * dout);
        for op in k.operators() {
            // |K⟩⟩ = Σ_p |p⟩ ⊗ K|p⟩
            let v: Vec<C64> = (0..din * dout).map(|idx| op[(idx % dout, idx / dout)]).collect();
            choi = &choi + &ComplexMatrix::outer(&v, &v);
        }
        let choi = HermitianMatrix::hermitian_part(&choi.scale_real(1.0 / din as f64));
        Channel::from_choi(din, dout, choi)
    }

    pub fn identity(d: usize) -> Self {
        let v: Vec<C64> = (0..d * d)
            .map(|idx| if idx / d == idx % d { ONE } else { ZERO })
            .collect();
        let choi = HermitianMatrix::projector(&v).scale(1.0 / d as f64);
        Self { dim_in: d, dim_out: d, choi }
    }

    /// `ρ ↦ Tr(ρ) σ`
    pub fn constant(dim_in: usize, sigma: &HermitianMatrix) -> Result<Self, ChannelError> {
        super::check_state(sigma).map_err(ChannelError::InvalidArgument)?;
        let id = HermitianMatrix::identity(dim_in).scale(1.0 / dim_in as f64);
        let choi = HermitianMatrix::hermitian_part(&kron(&id, sigma));
        Channel::from_choi(dim_in, sigma.dim(), choi)
    }

    /// `ρ ↦ (1 − p) ρ + p Tr(ρ) 1/d`, completely positive for
    /// `0 ≤ p ≤ d²/(d² − 1)`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self, ChannelError> {
        let id = Channel::identity(d);
        let mixed = HermitianMatrix::identity(d * d).scale(1.0 / (d * d) as f64);
        let choi = id.choi.scale(1.0 - p).add(&mixed.scale(p));
        Channel::from_choi(d, d, choi)
    }

    /// Completely dephasing channel `ρ ↦ Σ_i ⟨i|ρ|i⟩ |i⟩⟨i|`: measures in the
    /// computational basis and re-prepares the outcome.
    pub fn dephasing(d: usize) -> Self {
        let mut diag = vec![0.0; d * d];
        for i in 0..d {
            diag[i * d + i] = 1.0 / d as f64;
        }
        Self {
            dim_in: d,
            dim_out: d,
            choi: HermitianMatrix::from_real_diagonal(&diag),
        }
    }

    /// `ρ ↦ U ρ U†`
    pub fn unitary(u: &ComplexMatrix) -> Result<Self, ChannelError> {
        Channel::from_kraus(&KrausForm::new(vec![u.clone()])?)
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.choi
    }

    pub fn choi_shape(&self) -> TensorShape {
        TensorShape::new(vec![self.dim_in, self.dim_out]).expect("nonzero dimensions")
    }

    /// `Λ(X) = d_in Tr_in[(Xᵀ ⊗ 1) C]` for an arbitrary (not necessarily
    /// Hermitian) input operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "input is {}x{}, channel input dimension is {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        let (din, dout) = (self.dim_in, self.dim_out);
        let c = self.choi.as_matrix();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for j in 0..din {
            for i in 0..din {
                let xji = x[(j, i)];
                if xji == ZERO {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += xji * c[(j * dout + a, i * dout + b)];
                    }
                }
            }
        }
        Ok(out.scale_real(din as f64))
    }

    pub fn apply(&self, rho: &HermitianMatrix) -> Result<HermitianMatrix, ChannelError> {
        Ok(HermitianMatrix::hermitian_part(&self.apply_operator(rho.as_matrix())?))
    }

    /// `ρ ↦ outer(inner(ρ))`
    pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel, ChannelError> {
        if inner.dim_out != outer.dim_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "inner output {} does not match outer input {}",
                inner.dim_out, outer.dim_in
            )));
        }
        let choi = choi_from_basis_action(inner.dim_in, outer.dim_out, |i, j| {
            let unit = matrix_unit(inner.dim_in, i, j);
            let mid = inner.apply_operator(&unit).expect("dimensions checked");
            outer.apply_operator(&mid).expect("dimensions checked")
        })?;
        Channel::from_choi(inner.dim_in, outer.dim_out, choi)
    }

    /// `a ⊗ b` acting on `in_a ⊗ in_b`.
    pub fn tensor(a: &Channel, b: &Channel) -> Channel {
        let shape = TensorShape::new(vec![a.dim_in, a.dim_out, b.dim_in, b.dim_out]).expect("nonzero");
        let joint = HermitianMatrix::hermitian_part(&kron(&a.choi, &b.choi));
        let choi = permute_factors(&joint, &shape, &[0, 2, 1, 3]).expect("valid permutation");
        Channel {
            dim_in: a.dim_in * b.dim_in,
            dim_out: a.dim_out * b.dim_out,
            choi,
        }
    }

    /// Frobenius distance between Choi states.
    pub fn choi_distance(&self, other: &Channel) -> f64 {
        if self.choi.dim() != other.choi.dim() {
            return f64::INFINITY;
        }
        (self.choi.as_matrix() - other.choi.as_matrix()).frobenius_norm()
    }

    /// Largest trace-norm distance between the outputs of the two channels on
    /// the informationally complete state family `|i⟩`, `(|i⟩+|j⟩)/√2`,
    /// `(|i⟩+i|j⟩)/√2`.
    pub fn basis_state_distance(&self, other: &Channel) -> Result<f64, ChannelError> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(ChannelError::DimensionMismatch("channels have different dimensions".into()));
        }
        let mut worst = 0.0f64;
        for rho in probe_states(self.dim_in) {
            let diff = self.apply(&rho)?.sub(&other.apply(&rho)?);
            worst = worst.max(trace_norm(&diff)?);
        }
        Ok(worst)
    }

    /// Deviation of `Tr_out C` from `1/d_in`, max entry.
    pub fn trace_preservation_defect(&self) -> f64 {
        let reduced = partial_trace_general(self.choi.as_matrix(), &self.choi_shape(), &[0]).expect("shape");
        let target = ComplexMatrix::identity(self.dim_in).scale_real(1.0 / self.dim_in as f64);
        (&reduced - &target).max_abs()
    }
}

pub(crate) fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub(crate) fn choi_from_basis_action(
    dim_in: usize,
    dim_out: usize,
    f: impl Fn(usize, usize) -> ComplexMatrix,
) -> Result<HermitianMatrix, ChannelError> {
    let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let block = f(i, j);
            if block.rows() != dim_out || block.cols() != dim_out {
                return Err(ChannelError::DimensionMismatch("basis action returned wrong shape".into()));
            }
            for a in 0..dim_out {
                for b in 0..dim_out {
                    choi[(i * dim_out + a, j * dim_out + b)] = block[(a, b)] / dim_in as f64;
                }
            }
        }
    }
    Ok(HermitianMatrix::hermitian_part(&choi))
}

/// Pure states `|i⟩`, `(|i⟩+|j⟩)/√2`, `(|i⟩+i|j⟩)/√2`; their span is all of
/// `L(C^d)`.
pub fn probe_states(d: usize) -> Vec<HermitianMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut v = vec![ZERO; d];
        v[i] = ONE;
        out.push(HermitianMatrix::projector(&v));
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![ZERO; d];
            v[i] = C64::new(h, 0.0);
            v[j] = C64::new(h, 0.0);
            out.push(HermitianMatrix::projector(&v));
            v[j] = C64::new(0.0, h);
            out.push(HermitianMatrix::projector(&v));
        }
    }
    out
}
