//! Separable decompositions of Choi states by direct fitting.
//!
//! A model `M = Σ_t A_t A_t† ⊗ B_t B_t†` is fitted to the Choi state `C` by
//! minimizing `‖M − C‖_F²` over the factors with L-BFGS. Square factors give
//! mixed product terms and are tried first, with at most `d_in d_out` terms;
//! single-column factors give pure terms and are the fallback. The gradient with respect to `A_t` is
//! `4 G_t A_t` with `G_t = Tr_out[(M − C)(1 ⊗ B_t B_t†)]`, and symmetrically
//! for `B_t`.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channels::{qc_channel, random::rng, Channel, Ensemble, HolevoForm, Povm};
use crate::linalg::{eig_hermitian_tridiagonal, hermitian_function, singular_values, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::tolerances::{EPS_SEP, TOL_SYNTH};

use super::ppt::ppt_check;
use super::CriteriaError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableConfig {
    pub eps_sep: f64,
    pub seed: u64,
    /// L-BFGS iteration cap per attempt.
    pub max_iters: usize,
    /// Restarts with consecutive seeds before giving up.
    pub attempts: usize,
}

impl Default for SeparableConfig {
    fn default() -> Self {
        Self {
            eps_sep: EPS_SEP,
            seed: 0,
            max_iters: 20_000,
            attempts: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparableResult {
    /// Present iff the reconstruction residual is at most `eps_sep`.
    pub ensemble: Option<Ensemble>,
    /// Frobenius residual of the best fit found, `None` when no fit was tried.
    pub residual: Option<f64>,
    pub iterations: usize,
    pub rejected_by_ppt: bool,
}

/// A factorization `Λ = α ∘ Γ` with `Γ` a QC channel with `k` outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct QcFactorization {
    pub k: usize,
    pub povm: Povm,
    pub gamma: Channel,
    pub alpha: Channel,
    /// Largest trace distance between `α ∘ Γ` and `Λ` on the probe states.
    pub residual: f64,
}

/// Fits a separable decomposition with at most `max_terms` pure product terms
/// (default `(d_in d_out)²`). Channels failing the PPT test are rejected
/// without fitting.
pub fn separable_decomposition(c: &Channel, max_terms: Option<usize>, cfg: &SeparableConfig) -> Result<SeparableResult, CriteriaError> {
    if !ppt_check(c)?.passed() {
        return Ok(SeparableResult {
            ensemble: None,
            residual: None,
            iterations: 0,
            rejected_by_ppt: true,
        });
    }
    let (din, dout) = (c.dim_in(), c.dim_out());
    let terms = max_terms.unwrap_or((din * dout).pow(2)).max(1);
    if let Some(e) = diagonal_decomposition(c.choi(), din, dout) {
        let residual = (e.reconstruct().as_matrix() - c.choi().as_matrix()).frobenius_norm();
        if residual <= cfg.eps_sep && e.len() <= terms {
            return Ok(SeparableResult {
                ensemble: Some(e),
                residual: Some(residual),
                iterations: 0,
                rejected_by_ppt: false,
            });
        }
    }
    // mixed products first: a measure-prepare channel is a short sum of them,
    // which the pure-term model approaches only slowly
    let mixed = fit_with_restarts(c.choi(), din, dout, (din * dout).min(terms), Factor::Mixed, cfg)?;
    let mixed = finish(polish(mixed, c.choi(), cfg), c.choi(), cfg.eps_sep);
    if mixed.ensemble.is_some() {
        return Ok(mixed);
    }
    let pure = fit_with_restarts(c.choi(), din, dout, terms, Factor::Pure, cfg)?;
    let mut pure = finish(polish(pure, c.choi(), cfg), c.choi(), cfg.eps_sep);
    pure.iterations += mixed.iterations;
    if pure.ensemble.is_none() && mixed.residual < pure.residual {
        pure.residual = mixed.residual;
    }
    Ok(pure)
}

/// Frobenius residual of a given ensemble against the Choi state, in the
/// form returned by [`separable_decomposition`].
pub fn check_decomposition(c: &Channel, e: &Ensemble, eps_sep: f64) -> Result<SeparableResult, CriteriaError> {
    if e.left_states().iter().any(|s| s.dim() != c.dim_in()) || e.right_states().iter().any(|s| s.dim() != c.dim_out()) {
        return Err(CriteriaError::DimensionMismatch("ensemble states do not match the channel".into()));
    }
    let residual = (e.reconstruct().as_matrix() - c.choi().as_matrix()).frobenius_norm();
    Ok(SeparableResult {
        ensemble: (residual <= eps_sep).then(|| e.clone()),
        residual: Some(residual),
        iterations: 0,
        rejected_by_ppt: false,
    })
}

/// Effects `M_i = d_in w_i σ_iᵀ` with preparations `τ_i`. The effects of a
/// decomposition of a valid Choi state sum to the identity up to the fit
/// residual; the remainder is removed by congruence with `S^{-1/2}`,
/// `S = Σ_i M_i`.
pub fn holevo_from_decomposition(e: &Ensemble, dim_in: usize) -> Result<HolevoForm, CriteriaError> {
    if e.left_states().iter().any(|s| s.dim() != dim_in) {
        return Err(CriteriaError::NotAValidDecomposition(format!("left states are not of dimension {dim_in}")));
    }
    let raw: Vec<HermitianMatrix> = e
        .weights()
        .iter()
        .zip(e.left_states())
        .map(|(w, s)| s.transpose().scale(dim_in as f64 * w))
        .collect();
    let mut sum = HermitianMatrix::zeros(dim_in);
    for m in &raw {
        sum = sum.add(m);
    }
    let dev = (sum.as_matrix() - &ComplexMatrix::identity(dim_in)).max_abs();
    if dev > TOL_SYNTH {
        return Err(CriteriaError::NotAValidDecomposition(format!(
            "effects sum to the identity only within {dev:.3e}"
        )));
    }
    let s = hermitian_function(&sum, |l| 1.0 / l.sqrt())?;
    let effects = raw.iter().map(|m| m.congruence(&s)).collect();
    let povm = Povm::new(effects)?;
    Ok(HolevoForm::new(povm, e.right_states().to_vec())?)
}

/// Searches for the smallest number of outcomes `k ≤ k_max` such that the
/// channel factors through a QC channel with `k` outcomes. The search starts
/// at the operator Schmidt rank of the Choi state, which lower-bounds `k`.
pub fn qc_factorization(c: &Channel, k_max: usize, cfg: &SeparableConfig) -> Result<Option<QcFactorization>, CriteriaError> {
    if !ppt_check(c)?.passed() {
        return Ok(None);
    }
    let (din, dout) = (c.dim_in(), c.dim_out());
    let k_min = operator_schmidt_rank(c.choi(), din, dout)?.max(1);
    for k in k_min..=k_max {
        let ensemble = match diagonal_decomposition(c.choi(), din, dout).filter(|e| e.len() <= k) {
            Some(e) => Some(e),
            None => finish(polish(fit_with_restarts(c.choi(), din, dout, k, Factor::Mixed, cfg)?, c.choi(), cfg), c.choi(), cfg.eps_sep).ensemble,
        };
        let Some(ensemble) = ensemble else { continue };
        let Ok(h) = holevo_from_decomposition(&ensemble, din) else { continue };
        let f = factorization_from_holevo(c, &h)?;
        if f.residual <= TOL_SYNTH {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// `Γ = qc_channel(POVM)` and the preparation channel `α` of a measure-prepare
/// form, with the distance of `α ∘ Γ` from `c`.
pub(crate) fn factorization_from_holevo(c: &Channel, h: &HolevoForm) -> Result<QcFactorization, CriteriaError> {
    let gamma = qc_channel(h.povm());
    let alpha = h.preparation_channel()?;
    let composed = Channel::compose(&alpha, &gamma)?;
    let residual = composed.basis_state_distance(c)?;
    Ok(QcFactorization {
        k: h.povm().len(),
        povm: h.povm().clone(),
        gamma,
        alpha,
        residual,
    })
}

fn operator_schmidt_rank(choi: &HermitianMatrix, din: usize, dout: usize) -> Result<usize, CriteriaError> {
    let realigned = ComplexMatrix::from_fn(din * din, dout * dout, |r, s| {
        let (p, q) = (r / din, r % din);
        let (a, b) = (s / dout, s % dout);
        choi[(p * dout + a, q * dout + b)]
    });
    let sv = singular_values(&realigned)?;
    let tol = sv[0] * 1e-9;
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

/// Exact decomposition when the Choi state is diagonal in the product basis.
fn diagonal_decomposition(choi: &HermitianMatrix, din: usize, dout: usize) -> Option<Ensemble> {
    let n = din * dout;
    for i in 0..n {
        for j in 0..n {
            if i != j && choi[(i, j)] != ZERO {
                return None;
            }
        }
    }
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for p in 0..din {
        for a in 0..dout {
            let w = choi[(p * dout + a, p * dout + a)].re;
            if w > 0.0 {
                weights.push(w);
                left.push(basis_state(din, p));
                right.push(basis_state(dout, a));
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ensemble::new(weights, left, right).ok()
}

fn basis_state(d: usize, i: usize) -> HermitianMatrix {
    let mut diag = vec![0.0; d];
    diag[i] = 1.0;
    HermitianMatrix::from_real_diagonal(&diag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    /// `|a⟩⟨a| ⊗ |b⟩⟨b|`
    Pure,
    /// `A A† ⊗ B B†` with square factors
    Mixed,
}

#[derive(Clone, Copy)]
struct Layout {
    din: usize,
    dout: usize,
    rin: usize,
    rout: usize,
    terms: usize,
}

impl Layout {
    fn new(din: usize, dout: usize, terms: usize, kind: Factor) -> Self {
        let (rin, rout) = match kind {
            Factor::Pure => (1, 1),
            Factor::Mixed => (din, dout),
        };
        Self { din, dout, rin, rout, terms }
    }

    fn term_len(&self) -> usize {
        2 * (self.din * self.rin + self.dout * self.rout)
    }

    fn len(&self) -> usize {
        self.terms * self.term_len()
    }

    fn factors(&self, x: &[f64], t: usize) -> (ComplexMatrix, ComplexMatrix) {
        let o = t * self.term_len();
        let na = self.din * self.rin;
        let a = ComplexMatrix::from_fn(self.din, self.rin, |i, j| {
            let k = o + 2 * (i * self.rin + j);
            C64::new(x[k], x[k + 1])
        });
        let b = ComplexMatrix::from_fn(self.dout, self.rout, |i, j| {
            let k = o + 2 * na + 2 * (i * self.rout + j);
            C64::new(x[k], x[k + 1])
        });
        (a, b)
    }

    fn store(&self, x: &mut [f64], t: usize, a: &ComplexMatrix, b: &ComplexMatrix) {
        let o = t * self.term_len();
        let na = self.din * self.rin;
        for i in 0..self.din {
            for j in 0..self.rin {
                let k = o + 2 * (i * self.rin + j);
                x[k] = a[(i, j)].re;
                x[k + 1] = a[(i, j)].im;
            }
        }
        for i in 0..self.dout {
            for j in 0..self.rout {
                let k = o + 2 * na + 2 * (i * self.rout + j);
                x[k] = b[(i, j)].re;
                x[k + 1] = b[(i, j)].im;
            }
        }
    }
}

struct Fit {
    layout: Layout,
    x: Vec<f64>,
    residual: f64,
    iterations: usize,
}

/// `f = ‖M − C‖_F²` and its gradient.
fn objective(layout: &Layout, choi: &HermitianMatrix, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let (din, dout) = (layout.din, layout.dout);
    let n = din * dout;
    let factors: Vec<(ComplexMatrix, ComplexMatrix)> = (0..layout.terms).map(|t| layout.factors(x, t)).collect();
    let grams: Vec<(ComplexMatrix, ComplexMatrix)> = factors.iter().map(|(a, b)| (a.matmul(&a.adjoint()), b.matmul(&b.adjoint()))).collect();
    let mut r = choi.as_matrix().scale_real(-1.0);
    for (p, q) in &grams {
        for i in 0..din {
            for j in 0..din {
                let pij = p[(i, j)];
                if pij == ZERO {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        r[(i * dout + a, j * dout + b)] += pij * q[(a, b)];
                    }
                }
            }
        }
    }
    let f: f64 = r.as_slice().iter().map(|z| z.norm_sqr()).sum();
    if let Some(g) = grad {
        for (t, ((a, b), (p, q))) in factors.iter().zip(&grams).enumerate() {
            // G[i,j] = Σ_ab R[(i,a),(j,b)] Q[b,a];  H[a,b] = Σ_ij R[(i,a),(j,b)] P[j,i]
            let mut gm = ComplexMatrix::zeros(din, din);
            let mut hm = ComplexMatrix::zeros(dout, dout);
            for i in 0..din {
                for j in 0..din {
                    let pji = p[(j, i)];
                    let mut s = ZERO;
                    for aa in 0..dout {
                        let row = r.row(i * dout + aa);
                        for bb in 0..dout {
                            let rv = row[j * dout + bb];
                            s += rv * q[(bb, aa)];
                            hm[(aa, bb)] += rv * pji;
                        }
                    }
                    gm[(i, j)] = s;
                }
            }
            let ga = gm.matmul(a).scale_real(4.0);
            let hb = hm.matmul(b).scale_real(4.0);
            layout.store(g, t, &ga, &hb);
        }
    }
    debug_assert!(n == r.rows());
    f
}

fn initial_point(layout: &Layout, choi: &HermitianMatrix, rng: &mut impl Rng) -> Result<Vec<f64>, CriteriaError> {
    let (din, dout) = (layout.din, layout.dout);
    let mut x = vec![0.0; layout.len()];
    let eig = eig_hermitian_tridiagonal(choi)?;
    let n = din * dout;
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let noise = 1e-2 / (layout.terms as f64).sqrt();
    let mut t = 0;
    for k in (0..n).rev() {
        let lambda = eig.values[k];
        if t == layout.terms || lambda <= 1e-12 {
            break;
        }
        // best product approximation of the eigenvector
        let v = eig.vector(k);
        let vm = ComplexMatrix::from_fn(din, dout, |p, a| v[p * dout + a]);
        let vv = HermitianMatrix::hermitian_part(&vm.matmul(&vm.adjoint()));
        let top = eig_hermitian_tridiagonal(&vv)?;
        let s2 = top.values[din - 1].max(0.0);
        let u = top.vector(din - 1);
        let w = vm.adjoint().matvec(&u);
        let s = s2.sqrt().max(1e-300);
        let scale = (lambda.sqrt() * s).sqrt();
        let mut a = ComplexMatrix::zeros(din, layout.rin);
        let mut b = ComplexMatrix::zeros(dout, layout.rout);
        for i in 0..din {
            a[(i, 0)] = u[i] * scale;
            for j in 1..layout.rin {
                a[(i, j)] = C64::new(normal(), normal()) * noise;
            }
        }
        for i in 0..dout {
            b[(i, 0)] = w[i].conj() / s * scale;
            for j in 1..layout.rout {
                b[(i, j)] = C64::new(normal(), normal()) * noise;
            }
        }
        layout.store(&mut x, t, &a, &b);
        t += 1;
    }
    for t in t..layout.terms {
        let a = ComplexMatrix::from_fn(din, layout.rin, |_, _| C64::new(normal(), normal()) * noise);
        let b = ComplexMatrix::from_fn(dout, layout.rout, |_, _| C64::new(normal(), normal()) * noise);
        layout.store(&mut x, t, &a, &b);
    }
    Ok(x)
}

fn fit_with_restarts(
    choi: &HermitianMatrix,
    din: usize,
    dout: usize,
    terms: usize,
    kind: Factor,
    cfg: &SeparableConfig,
) -> Result<Fit, CriteriaError> {
    let mut best: Option<Fit> = None;
    let mut total_iters = 0;
    for attempt in 0..cfg.attempts.max(1) {
        let layout = Layout::new(din, dout, terms, kind);
        let mut rng = rng(cfg.seed.wrapping_add(attempt as u64));
        let x0 = initial_point(&layout, choi, &mut rng)?;
        let (x, f, iters) = lbfgs(&layout, choi, x0, fit_target(cfg), cfg.max_iters);
        total_iters += iters;
        let fit = Fit {
            layout,
            x,
            residual: f.sqrt(),
            iterations: total_iters,
        };
        let done = fit.residual <= cfg.eps_sep;
        if best.as_ref().is_none_or(|b| fit.residual < b.residual) {
            best = Some(fit);
        }
        if done {
            break;
        }
    }
    let mut best = best.expect("at least one attempt");
    best.iterations = total_iters;
    Ok(best)
}

fn fit_target(cfg: &SeparableConfig) -> f64 {
    // a margin below eps_sep leaves room for pruning and the weight
    // normalization in `finish`
    (cfg.eps_sep * 1e-2).powi(2)
}

fn term_weight(layout: &Layout, x: &[f64], t: usize) -> f64 {
    let tl = layout.term_len();
    let na = 2 * layout.din * layout.rin;
    let sq = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    sq(&x[t * tl..t * tl + na]) * sq(&x[t * tl + na..(t + 1) * tl])
}

/// Drops terms of negligible weight and refits the remaining ones, so that a
/// short ensemble keeps the accuracy of the full fit.
fn polish(fit: Fit, choi: &HermitianMatrix, cfg: &SeparableConfig) -> Fit {
    let l = &fit.layout;
    let weights: Vec<f64> = (0..l.terms).map(|t| term_weight(l, &fit.x, t)).collect();
    let total: f64 = weights.iter().sum();
    let keep: Vec<usize> = (0..l.terms).filter(|&t| weights[t] > PRUNE_WEIGHT * total).collect();
    if keep.is_empty() || keep.len() == l.terms {
        return fit;
    }
    let small = Layout { terms: keep.len(), ..*l };
    let tl = l.term_len();
    let x0: Vec<f64> = keep.iter().flat_map(|&t| fit.x[t * tl..(t + 1) * tl].iter().copied()).collect();
    let (x, f, iters) = lbfgs(&small, choi, x0, fit_target(cfg), cfg.max_iters);
    if f.sqrt() <= fit.residual.max(fit_target(cfg).sqrt()) {
        Fit {
            layout: small,
            x,
            residual: f.sqrt(),
            iterations: fit.iterations + iters,
        }
    } else {
        fit
    }
}

const LBFGS_MEMORY: usize = 20;
const PRUNE_WEIGHT: f64 = 1e-7;
const STAGNATION_CHECK: usize = 500;

/// Limited-memory BFGS with Armijo backtracking. Returns the final point,
/// objective value and iteration count.
fn lbfgs(layout: &Layout, choi: &HermitianMatrix, mut x: Vec<f64>, target: f64, max_iters: usize) -> (Vec<f64>, f64, usize) {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut f = objective(layout, choi, &x, Some(&mut g));
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);
    let mut checkpoint = f;
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    for it in 0..max_iters {
        if f <= target {
            return (x, f, it);
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            axpy(-a, y, &mut d);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            axpy(a - b, s, &mut d);
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
            if slope == 0.0 {
                return (x, f, it);
            }
        }
        let mut step = if hist.is_empty() { (1e-2 / slope.abs().sqrt()).min(1.0) } else { 1.0 };
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                xn[i] = x[i] + step * d[i];
            }
            let fnew = objective(layout, choi, &xn, Some(&mut gn));
            if fnew <= f + 1e-4 * step * slope {
                let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-300 {
                    if hist.len() == LBFGS_MEMORY {
                        hist.pop_front();
                    }
                    hist.push_back((s, y, 1.0 / sy));
                }
                std::mem::swap(&mut x, &mut xn);
                std::mem::swap(&mut g, &mut gn);
                f = fnew;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if hist.is_empty() {
                return (x, f, it);
            }
            hist.clear();
            continue;
        }
        if (it + 1) % STAGNATION_CHECK == 0 {
            if f > checkpoint * (1.0 - 1e-3) {
                return (x, f, it + 1);
            }
            checkpoint = f;
        }
    }
    (x, f, max_iters)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Converts a fit to an ensemble with weights normalized to sum to one and
/// reports the residual of that ensemble.
fn finish(fit: Fit, choi: &HermitianMatrix, eps_sep: f64) -> SeparableResult {
    let l = &fit.layout;
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in 0..l.terms {
        let (a, b) = l.factors(&fit.x, t);
        let p = HermitianMatrix::hermitian_part(&a.matmul(&a.adjoint()));
        let q = HermitianMatrix::hermitian_part(&b.matmul(&b.adjoint()));
        let (tp, tq) = (p.real_trace(), q.real_trace());
        let w = tp * tq;
        if !(w > 1e-15) {
            continue;
        }
        weights.push(w);
        left.push(p.scale(1.0 / tp));
        right.push(q.scale(1.0 / tq));
    }
    let total: f64 = weights.iter().sum();
    let failed = SeparableResult {
        ensemble: None,
        residual: Some(fit.residual),
        iterations: fit.iterations,
        rejected_by_ppt: false,
    };
    if weights.is_empty() || !(total > 0.0) {
        return failed;
    }
    let build = |cut: f64| {
        let keep: Vec<usize> = (0..weights.len()).filter(|&t| weights[t] > cut * total).collect();
        let sum: f64 = keep.iter().map(|&t| weights[t]).sum();
        let e = Ensemble::new(
            keep.iter().map(|&t| weights[t] / sum).collect(),
            keep.iter().map(|&t| left[t].clone()).collect(),
            keep.iter().map(|&t| right[t].clone()).collect(),
        )
        .ok()?;
        let r = (e.reconstruct().as_matrix() - choi.as_matrix()).frobenius_norm();
        Some((e, r))
    };
    // the fit leaves many terms at negligible weight; drop them when that
    // keeps the residual within eps_sep
    let pruned = build(PRUNE_WEIGHT).filter(|(_, r)| *r <= eps_sep);
    let Some((ensemble, residual)) = pruned.or_else(|| build(0.0)) else {
        return failed;
    };
    SeparableResult {
        ensemble: (residual <= eps_sep).then_some(ensemble),
        residual: Some(residual),
        iterations: fit.iterations,
        rejected_by_ppt: false,
    }
}
