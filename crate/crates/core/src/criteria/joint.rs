//! `n`-joint channels: `Θ: in → out^{⊗n}` whose every single-copy marginal
//! is the given channel.
//!
//! A joint channel can always be symmetrized over the output copies without
//! changing its marginals, so the search runs over symmetric Choi states in
//! the block coordinates of [`SymmetricDecomposition`]: one PSD block
//! `Ỹ_λ` on `in ⊗ Q_λ` per Young shape, embedded as
//! `J = Σ_λ f_λ^{-1/2} Σ_T W_T Ỹ_λ W_T†` with `W_T = 1 ⊗ U_T`. The embedding is
//! an isometry for the Frobenius norm, so the solver's projections are the
//! ones of the full problem restricted to symmetric matrices. Only the first
//! copy's marginal needs constraining; symmetry gives the others.

use crate::channels::{Channel, Ensemble};
use crate::feasibility::{
    psd_by_cholesky, solve, solve_from, FeasibilityOutcome, FeasibilityProblem, SolverConfig, Verdict,
};
use crate::linalg::{
    hermitian_basis, kron, partial_trace, permute_factors, ComplexMatrix, HermitianMatrix, TensorShape, C64,
};
use crate::tolerances::TOL_PSD;

use super::symmetry::{permutations, SymmetricDecomposition};
use super::{CriteriaError, JOINT_DIM_CAP};

#[derive(Clone, Debug, PartialEq)]
pub struct JointProblem {
    pub base: Channel,
    pub n: usize,
}

impl JointProblem {
    pub fn new(base: Channel, n: usize) -> Result<Self, CriteriaError> {
        if n < 2 {
            return Err(CriteriaError::InvalidArgument(format!("joint problems need n ≥ 2, got {n}")));
        }
        let p = Self { base, n };
        let dim = p.ambient_dim();
        if dim > JOINT_DIM_CAP {
            return Err(CriteriaError::DimensionCap { dim, cap: JOINT_DIM_CAP });
        }
        Ok(p)
    }

    /// `dim_in · dim_out^n`
    pub fn ambient_dim(&self) -> usize {
        self.base.dim_in().saturating_mul(self.base.dim_out().saturating_pow(self.n as u32))
    }

    /// `[dim_in, dim_out, …, dim_out]`
    pub fn shape(&self) -> TensorShape {
        let mut f = vec![self.base.dim_in()];
        f.extend(std::iter::repeat_n(self.base.dim_out(), self.n));
        TensorShape::new(f).expect("nonzero dimensions")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointOutcome {
    pub n: usize,
    /// Solver outcome; on `Feasible` the witness is the full joint Choi state.
    pub outcome: FeasibilityOutcome,
    /// `‖Tr_{other copies} J − C‖_F` for each copy, when a witness exists.
    pub marginal_residuals: Vec<f64>,
    /// `‖Tr_out J − 1/d_in‖_F`, when a witness exists.
    pub trace_residual: Option<f64>,
    /// The witness passed the independent check (Cholesky positivity and
    /// directly computed marginals).
    pub verified: bool,
}

/// The reduced problem together with the data to map between coordinates.
struct Reduced {
    problem: FeasibilityProblem,
    sym: SymmetricDecomposition,
    din: usize,
}

impl Reduced {
    fn new(j: &JointProblem) -> Result<Self, CriteriaError> {
        let (din, dout) = (j.base.dim_in(), j.base.dim_out());
        let sym = SymmetricDecomposition::new(dout, j.n)?;
        let total = sym.total_dim();
        let rest = total / dout;
        // M^λ_{ab} = f^{-1/2} Σ_T U_T† (|a⟩⟨b| ⊗ 1) U_T
        let mut mats: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(sym.shapes.len());
        for shape in &sym.shapes {
            let q = shape.dim();
            let scale = 1.0 / (shape.multiplicity() as f64).sqrt();
            let mut per = vec![ComplexMatrix::zeros(q, q); dout * dout];
            for u in &shape.isometries {
                for a in 0..dout {
                    for b in 0..dout {
                        let m = &mut per[a * dout + b];
                        for r in 0..rest {
                            let (wa, wb) = (a * rest + r, b * rest + r);
                            for x in 0..q {
                                let ux = u[(wa, x)].conj() * scale;
                                for y in 0..q {
                                    m[(x, y)] += ux * u[(wb, y)];
                                }
                            }
                        }
                    }
                }
            }
            mats.push(per);
        }
        let dims: Vec<usize> = sym.shapes.iter().map(|s| din * s.dim()).collect();
        let mut problem = FeasibilityProblem::with_blocks(dims.clone());
        let choi = j.base.choi();
        for k in hermitian_basis(din * dout) {
            let value: f64 = k
                .iter()
                .map(|&(i, jj, z)| if i == jj { z.re * choi[(i, i)].re } else { 2.0 * (z.conj() * choi[(i, jj)]).re })
                .sum();
            let mut blocks = Vec::with_capacity(dims.len());
            for (s, shape) in sym.shapes.iter().enumerate() {
                let q = shape.dim();
                let mut m = ComplexMatrix::zeros(dims[s], dims[s]);
                let mut place = |p: usize, pp: usize, z: C64, blk: &ComplexMatrix| {
                    for x in 0..q {
                        for y in 0..q {
                            m[(p * q + x, pp * q + y)] += z * blk[(x, y)];
                        }
                    }
                };
                for &(i, jj, z) in &k {
                    let (p, a) = (i / dout, i % dout);
                    let (pp, b) = (jj / dout, jj % dout);
                    if i == jj {
                        place(p, p, C64::new(z.re, 0.0), &mats[s][a * dout + a]);
                    } else {
                        place(p, pp, z, &mats[s][a * dout + b]);
                        place(pp, p, z.conj(), &mats[s][b * dout + a]);
                    }
                }
                blocks.push(HermitianMatrix::hermitian_part(&m));
            }
            let terms: Vec<(usize, &HermitianMatrix)> = blocks.iter().enumerate().collect();
            problem.add_block_constraint(&terms, value)?;
        }
        Ok(Self { problem, sym, din })
    }

    /// `J = Σ_λ f^{-1/2} Σ_T W_T Ỹ_λ W_T†`
    fn expand(&self, blocks: &[HermitianMatrix]) -> HermitianMatrix {
        let total = self.sym.total_dim();
        let din = self.din;
        let mut j = ComplexMatrix::zeros(din * total, din * total);
        for (shape, y) in self.sym.shapes.iter().zip(blocks) {
            let q = shape.dim();
            let scale = 1.0 / (shape.multiplicity() as f64).sqrt();
            for u in &shape.isometries {
                for p in 0..din {
                    for pp in 0..din {
                        let sub = ComplexMatrix::from_fn(q, q, |x, z| y[(p * q + x, pp * q + z)] * scale);
                        let full = u.matmul(&sub).matmul(&u.adjoint());
                        for r in 0..total {
                            for c in 0..total {
                                j[(p * total + r, pp * total + c)] += full[(r, c)];
                            }
                        }
                    }
                }
            }
        }
        HermitianMatrix::hermitian_part(&j)
    }

    /// Adjoint of [`expand`](Self::expand): the orthogonal projection of a full
    /// matrix onto the symmetric block coordinates.
    fn reduce(&self, j: &HermitianMatrix) -> Vec<HermitianMatrix> {
        let total = self.sym.total_dim();
        let din = self.din;
        self.sym
            .shapes
            .iter()
            .map(|shape| {
                let q = shape.dim();
                let scale = 1.0 / (shape.multiplicity() as f64).sqrt();
                let mut y = ComplexMatrix::zeros(din * q, din * q);
                for u in &shape.isometries {
                    for p in 0..din {
                        for pp in 0..din {
                            let sub = ComplexMatrix::from_fn(total, total, |r, c| j[(p * total + r, pp * total + c)]);
                            let red = u.adjoint().matmul(&sub).matmul(u);
                            for x in 0..q {
                                for z in 0..q {
                                    y[(p * q + x, pp * q + z)] += red[(x, z)] * scale;
                                }
                            }
                        }
                    }
                }
                HermitianMatrix::hermitian_part(&y)
            })
            .collect()
    }
}

/// Searches for a symmetric `n`-joint channel starting from the solver's
/// default point.
pub fn n_joint_feasibility(j: &JointProblem, cfg: &SolverConfig) -> Result<JointOutcome, CriteriaError> {
    let reduced = Reduced::new(j)?;
    let outcome = solve(&reduced.problem, cfg);
    finish(j, &reduced, outcome, cfg)
}

/// As [`n_joint_feasibility`], starting from the symmetric part of `start`
/// (a Choi state on `in ⊗ out^{⊗n}`).
pub fn n_joint_feasibility_from(j: &JointProblem, cfg: &SolverConfig, start: &HermitianMatrix) -> Result<JointOutcome, CriteriaError> {
    if start.dim() != j.ambient_dim() {
        return Err(CriteriaError::DimensionMismatch(format!(
            "start point has dimension {}, joint problem {}",
            start.dim(),
            j.ambient_dim()
        )));
    }
    let reduced = Reduced::new(j)?;
    let outcome = solve_from(&reduced.problem, cfg, &reduced.reduce(start))?;
    finish(j, &reduced, outcome, cfg)
}

fn finish(j: &JointProblem, reduced: &Reduced, mut outcome: FeasibilityOutcome, cfg: &SolverConfig) -> Result<JointOutcome, CriteriaError> {
    let Some(w) = outcome.witness.take() else {
        return Ok(JointOutcome {
            n: j.n,
            outcome,
            marginal_residuals: Vec::new(),
            trace_residual: None,
            verified: false,
        });
    };
    let full = reduced.expand(&reduced.problem.split(&w));
    let marginals = marginal_residuals(&full, &j.base, j.n)?;
    let shape = j.shape();
    let tr = partial_trace(&full, &shape, &[0])?;
    let id = HermitianMatrix::identity(j.base.dim_in()).scale(1.0 / j.base.dim_in() as f64);
    let trace_residual = (tr.as_matrix() - id.as_matrix()).frobenius_norm();
    let slack = cfg.eps_feas + 1e-12;
    // Trace preservation is the partial trace of a marginal constraint, so
    // its residual is bounded by √d_out times the marginal one.
    let trace_slack = slack * (j.base.dim_out() as f64).sqrt();
    let verified = psd_by_cholesky(&full, TOL_PSD) && marginals.iter().all(|&r| r <= slack) && trace_residual <= trace_slack;
    if !verified {
        outcome.verdict = Verdict::Undecided;
    }
    outcome.witness = Some(full);
    Ok(JointOutcome {
        n: j.n,
        outcome,
        marginal_residuals: marginals,
        trace_residual: Some(trace_residual),
        verified,
    })
}

/// `‖Tr_{all outputs but k} J − C‖_F` for each copy `k`.
pub fn marginal_residuals(joint: &HermitianMatrix, base: &Channel, n: usize) -> Result<Vec<f64>, CriteriaError> {
    let mut f = vec![base.dim_in()];
    f.extend(std::iter::repeat_n(base.dim_out(), n));
    let shape = TensorShape::new(f)?;
    shape.check(joint.dim())?;
    (0..n)
        .map(|k| {
            let m = partial_trace(joint, &shape, &[0, k + 1])?;
            Ok((m.as_matrix() - base.choi().as_matrix()).frobenius_norm())
        })
        .collect()
}

/// Average of `J` over all permutations of the `n` output copies.
pub fn symmetrize_joint(j: &HermitianMatrix, dim_in: usize, dim_out: usize, n: usize) -> Result<HermitianMatrix, CriteriaError> {
    let mut f = vec![dim_in];
    f.extend(std::iter::repeat_n(dim_out, n));
    let shape = TensorShape::new(f)?;
    shape.check(j.dim())?;
    let perms = permutations(n);
    let mut acc = ComplexMatrix::zeros(j.dim(), j.dim());
    for p in &perms {
        let mut sigma = vec![0];
        sigma.extend(p.iter().map(|k| k + 1));
        acc = &acc + permute_factors(j, &shape, &sigma)?.as_matrix();
    }
    Ok(HermitianMatrix::hermitian_part(&acc.scale_real(1.0 / perms.len() as f64)))
}

/// `Σ_i w_i σ_i ⊗ τ_i^{⊗n}`: an `n`-joint Choi state for the channel whose
/// Choi state the ensemble decomposes (exact up to the decomposition
/// residual).
pub fn product_joint_witness(e: &Ensemble, n: usize) -> HermitianMatrix {
    let mut acc: Option<ComplexMatrix> = None;
    for ((w, s), t) in e.weights().iter().zip(e.left_states()).zip(e.right_states()) {
        let mut term = s.as_matrix().scale_real(*w);
        for _ in 0..n {
            term = kron(&term, t);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => &a + &term,
        });
    }
    HermitianMatrix::hermitian_part(&acc.expect("nonempty ensemble"))
}
