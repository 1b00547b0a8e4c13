//! Post-processing searches: a channel `α` with `lhs = α ∘ rhs`, and a
//! broadcasting channel `Ψ: out → out ⊗ out` whose two marginals act as the
//! identity on the range of the channel.
//!
//! Both are affine conditions on the Choi state of the unknown channel, tested
//! on the images of a Hermitian basis of the input space. Cheap constructive
//! candidates are tried before the solver.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::feasibility::{solve, verify_witness, FeasibilityOutcome, FeasibilityProblem, SolverConfig, Verdict};
use crate::linalg::{dense_from_upper, hermitian_basis, kron, ComplexMatrix, HermitianMatrix, C64};

use super::{CriteriaError, BROADCAST_DIM_CAP};

/// Where a `Feasible` witness came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// A closed-form candidate (identity, constant or classical copy).
    Constructive,
    Solver,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSearch {
    /// On `Feasible` the witness is the trace-one Choi state of the found
    /// channel.
    pub outcome: FeasibilityOutcome,
    pub source: Option<WitnessSource>,
    /// Independent check of the witness: positivity by Cholesky and the
    /// constraint residual evaluated directly.
    pub verified: bool,
}

fn basis_images(c: &Channel) -> Result<Vec<HermitianMatrix>, CriteriaError> {
    hermitian_basis(c.dim_in())
        .iter()
        .map(|e| {
            let x = dense_from_upper(c.dim_in(), e);
            Ok(HermitianMatrix::hermitian_part(&c.apply_operator(&x)?))
        })
        .collect()
}

fn basis_matrices(d: usize) -> Vec<HermitianMatrix> {
    hermitian_basis(d).iter().map(|e| dense_from_upper(d, e)).collect()
}

/// Upper-triangular nonzeros of `a₁ ⊗ a₂ ⊗ …` for Hermitian factors, without
/// forming the dense product.
fn kron_upper(factors: &[&ComplexMatrix]) -> Vec<(usize, usize, C64)> {
    let mut acc = vec![(0usize, 0usize, C64::new(1.0, 0.0))];
    for f in factors {
        let n = f.rows();
        let nz: Vec<(usize, usize, C64)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, f[(i, j)]))
            .filter(|e| e.2.re != 0.0 || e.2.im != 0.0)
            .collect();
        acc = acc
            .iter()
            .flat_map(|&(r, c, a)| nz.iter().map(move |&(i, j, b)| (r * n + i, c * n + j, a * b)))
            .collect();
    }
    acc.retain(|&(r, c, _)| r <= c);
    acc
}

fn trace_constraints(p: &mut FeasibilityProblem, d_src: usize, d_tgt: usize) -> Result<(), CriteriaError> {
    // Tr_tgt A = 1/d_src
    let id = ComplexMatrix::identity(d_tgt);
    for e in &hermitian_basis(d_src) {
        let diag = e.iter().find(|&&(i, j, _)| i == j).map(|&(_, _, z)| z.re).unwrap_or(0.0);
        p.add_sparse_constraint(&kron_upper(&[&dense_from_upper(d_src, e), &id]), diag / d_src as f64)?;
    }
    Ok(())
}

fn candidate(p: &FeasibilityProblem, choi: HermitianMatrix, eps: f64) -> Option<ChannelSearch> {
    let check = verify_witness(p, &choi);
    if !check.passes(eps) {
        return None;
    }
    Some(ChannelSearch {
        outcome: FeasibilityOutcome {
            verdict: Verdict::Feasible,
            witness: Some(choi),
            residual: check.constraint_residual,
            iterations: 0,
            best_residual: check.constraint_residual,
            window_decrease: None,
            dropped_constraints: 0,
            inconsistent: false,
        },
        source: Some(WitnessSource::Constructive),
        verified: true,
    })
}

fn run_solver(p: &FeasibilityProblem, cfg: &SolverConfig) -> ChannelSearch {
    let mut outcome = solve(p, cfg);
    let mut verified = false;
    if let Some(w) = &outcome.witness {
        verified = verify_witness(p, w).passes(cfg.eps_feas + 1e-12);
        if !verified {
            outcome.verdict = Verdict::Undecided;
        }
    }
    let source = (outcome.verdict == Verdict::Feasible).then_some(WitnessSource::Solver);
    ChannelSearch { outcome, source, verified }
}

fn maximally_entangled(d: usize) -> HermitianMatrix {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    HermitianMatrix::projector(&v)
}

fn constant_choi(d_src: usize, sigma: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&kron(&ComplexMatrix::identity(d_src).scale_real(1.0 / d_src as f64), sigma))
}

/// Searches for a channel `α: rhs.out → lhs.out` with `α ∘ rhs = lhs`
/// (`lhs ⪯ rhs`).
pub fn randomization_order(lhs: &Channel, rhs: &Channel, cfg: &SolverConfig) -> Result<ChannelSearch, CriteriaError> {
    if lhs.dim_in() != rhs.dim_in() {
        return Err(CriteriaError::DimensionMismatch(format!(
            "input dimensions differ: {} vs {}",
            lhs.dim_in(),
            rhs.dim_in()
        )));
    }
    let (dr, dl) = (rhs.dim_out(), lhs.dim_out());
    let dim = dr * dl;
    if dim > BROADCAST_DIM_CAP {
        return Err(CriteriaError::DimensionCap { dim, cap: BROADCAST_DIM_CAP });
    }
    let src = basis_images(rhs)?;
    let tgt = basis_images(lhs)?;
    let ks = basis_matrices(dl);
    let mut p = FeasibilityProblem::new(dim);
    // ⟨K, α(X)⟩ = d_r ⟨Xᵀ ⊗ K, A⟩
    for (x, y) in src.iter().zip(&tgt) {
        let xt = x.transpose().as_matrix().scale_real(dr as f64);
        for k in &ks {
            p.add_sparse_constraint(&kron_upper(&[&xt, k]), k.hs_inner(y))?;
        }
    }
    trace_constraints(&mut p, dr, dl)?;

    let mut candidates = Vec::new();
    if dr == dl {
        candidates.push(maximally_entangled(dr));
    }
    let mixed = HermitianMatrix::identity(lhs.dim_in()).scale(1.0 / lhs.dim_in() as f64);
    candidates.push(constant_choi(dr, &lhs.apply(&mixed)?));
    for c in candidates {
        if let Some(found) = candidate(&p, c, cfg.eps_feas) {
            return Ok(found);
        }
    }
    Ok(run_solver(&p, cfg))
}

/// Searches for `Ψ: out → out ⊗ out` with `Tr₂ Ψ(Λ(ρ)) = Tr₁ Ψ(Λ(ρ)) = Λ(ρ)`
/// for every input `ρ`.
pub fn broadcast_feasibility(c: &Channel, cfg: &SolverConfig) -> Result<ChannelSearch, CriteriaError> {
    let d = c.dim_out();
    let dim = d * d * d;
    if dim > BROADCAST_DIM_CAP {
        return Err(CriteriaError::DimensionCap { dim, cap: BROADCAST_DIM_CAP });
    }
    let images = basis_images(c)?;
    let ks = basis_matrices(d);
    let id = ComplexMatrix::identity(d);
    let mut p = FeasibilityProblem::new(dim);
    for x in &images {
        let xt = x.transpose().as_matrix().scale_real(d as f64);
        for k in &ks {
            let value = k.hs_inner(x);
            p.add_sparse_constraint(&kron_upper(&[&xt, k, &id]), value)?;
            p.add_sparse_constraint(&kron_upper(&[&xt, &id, k]), value)?;
        }
    }
    trace_constraints(&mut p, d, d * d)?;

    // classical copy |i⟩⟨i| ↦ |ii⟩⟨ii|
    let mut diag = vec![0.0; dim];
    for i in 0..d {
        diag[i * d * d + i * d + i] = 1.0 / d as f64;
    }
    let mixed = HermitianMatrix::identity(c.dim_in()).scale(1.0 / c.dim_in() as f64);
    let sigma = c.apply(&mixed)?;
    let candidates = [
        HermitianMatrix::from_real_diagonal(&diag),
        constant_choi(d, &HermitianMatrix::hermitian_part(&kron(&sigma, &sigma))),
    ];
    for cand in candidates {
        if let Some(found) = candidate(&p, cand, cfg.eps_feas) {
            return Ok(found);
        }
    }
    Ok(run_solver(&p, cfg))
}
