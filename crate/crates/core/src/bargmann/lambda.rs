use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Channel, Ensemble};
use crate::criteria::{eb_report_with, EbReport, ReportOptions, RunConfig};
use crate::linalg::{eig_hermitian, hermitian_function, kron, singular_values, ComplexMatrix, HermitianMatrix, TensorShape, C64};
use crate::linalg::partial_trace;

use super::fock::{coherent, ln_factorials, FockSpace};
use super::quadrature::{gauss_laguerre, Quadrature};
use super::BargmannError;

/// Largest cutoff accepted by the dense operator-space SVD.
pub const INJECTIVITY_CUTOFF_CAP: usize = 12;

/// Numerical rank threshold relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-12;

/// Largest allowed gap between the closed-form matrix elements and their
/// quadrature evaluation before the closed form is used.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

/// `Ψ(A)(α) = ⟨ψ_{f(α)}|A ψ_{f(α)}⟩` with `f(α) = c α`, or `c ᾱ` when
/// `conjugate` is set. The default is `f(α) = α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneOptions {
    pub scale: f64,
    pub conjugate: bool,
}

impl Default for HeterodyneOptions {
    fn default() -> Self {
        Self { scale: 1.0, conjugate: false }
    }
}

impl HeterodyneOptions {
    pub fn map(&self, alpha: C64) -> C64 {
        let a = if self.conjugate { alpha.conj() } else { alpha };
        a * self.scale
    }

    fn validate(&self) -> Result<(), BargmannError> {
        if !self.scale.is_finite() {
            return Err(BargmannError::InvalidArgument(format!("scale must be finite, got {}", self.scale)));
        }
        Ok(())
    }
}

/// `⟨ψ_{f(α)}|A ψ_{f(α)}⟩` with the truncated coherent vector.
pub fn heterodyne(a: &ComplexMatrix, alpha: C64, space: &FockSpace, opts: HeterodyneOptions) -> C64 {
    let psi = coherent(opts.map(alpha), space).coeffs;
    let av = a.matvec(&psi);
    psi.iter().zip(&av).map(|(x, y)| x.conj() * y).sum()
}

/// [`heterodyne`] at every quadrature node.
pub fn husimi_samples(a: &ComplexMatrix, quad: &Quadrature, space: &FockSpace, opts: HeterodyneOptions) -> Vec<C64> {
    quad.nodes().iter().map(|&z| heterodyne(a, z, space, opts)).collect()
}

/// `Σ_k W_k f(α_k) |ψ_{α_k}⟩⟨ψ_{α_k}|`, the quadrature version of
/// `π^{-1} ∫ f(α) |ψ_α⟩⟨ψ_α| d²α`. Hermitian when the samples are real.
pub fn gamma_bargmann(samples: &[C64], space: &FockSpace, quad: &Quadrature) -> Result<ComplexMatrix, BargmannError> {
    if samples.len() != quad.len() {
        return Err(BargmannError::InvalidArgument(format!(
            "{} samples for {} quadrature nodes",
            samples.len(),
            quad.len()
        )));
    }
    let d = space.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for ((&z, &w), &f) in quad.nodes().iter().zip(quad.weights()).zip(samples) {
        if f == C64::new(0.0, 0.0) {
            continue;
        }
        let psi = coherent(z, space).coeffs;
        let s = f * w;
        for m in 0..d {
            let left = psi[m] * s;
            for n in 0..d {
                out[(m, n)] += left * psi[n].conj();
            }
        }
    }
    Ok(out)
}

/// [`gamma_bargmann`] for real samples.
pub fn gamma_bargmann_real(samples: &[f64], space: &FockSpace, quad: &Quadrature) -> Result<HermitianMatrix, BargmannError> {
    let s: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    Ok(HermitianMatrix::hermitian_part(&gamma_bargmann(&s, space, quad)?))
}

/// `‖Γ(1) − 1‖_∞` for the given rule.
pub fn overcompleteness_error(space: &FockSpace, quad: &Quadrature) -> Result<f64, BargmannError> {
    let g = gamma_bargmann_real(&vec![1.0; quad.len()], space, quad)?;
    let dev = g.sub(&HermitianMatrix::identity(space.dim()));
    let values = eig_hermitian(&dev)?.values;
    Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `⟨x_m|Λ(|x_p⟩⟨x_q|)|x_n⟩` for `Λ = Γ ∘ Ψ` acting on observables, indexed
/// `[m][n][p][q]` in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTensor {
    dim: usize,
    data: Vec<f64>,
}

impl LambdaTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, m: usize, n: usize, p: usize, q: usize) -> f64 {
        let d = self.dim;
        self.data[((m * d + n) * d + p) * d + q]
    }

    /// `Λ` as a matrix on vectorized operators: row `(m, n)`, column `(p, q)`.
    pub fn operator_matrix(&self) -> ComplexMatrix {
        let d2 = self.dim * self.dim;
        ComplexMatrix::from_fn(d2, d2, |r, c| C64::new(self.data[r * d2 + c], 0.0))
    }
}

pub fn lambda_matrix_elements(space: &FockSpace) -> LambdaTensor {
    lambda_matrix_elements_with(space, HeterodyneOptions::default())
}

/// Closed form
/// `c^{p+q} s! / ((1 + c²)^{s+1} √(m! n! p! q!))` on the selection rule
/// `m + q = n + p` (`s = m + q`), or `m + p = n + q` (`s = m + p`) with
/// conjugation. For `c = 1` this is `s! / (2^{s+1} √(m! n! p! q!))`.
pub fn lambda_matrix_elements_with(space: &FockSpace, opts: HeterodyneOptions) -> LambdaTensor {
    let d = space.dim();
    let lf = ln_factorials(2 * d);
    let c = opts.scale;
    let kappa = 1.0 + c * c;
    let mut data = vec![0.0; d * d * d * d];
    for m in 0..d {
        for n in 0..d {
            for p in 0..d {
                for q in 0..d {
                    let (lhs, rhs, s) = if opts.conjugate { (m + p, n + q, m + p) } else { (m + q, n + p, m + q) };
                    if lhs != rhs {
                        continue;
                    }
                    let ln = lf[s] - (s + 1) as f64 * kappa.ln() - 0.5 * (lf[m] + lf[n] + lf[p] + lf[q]);
                    data[((m * d + n) * d + p) * d + q] = c.powi((p + q) as i32) * ln.exp();
                }
            }
        }
    }
    LambdaTensor { dim: d, data }
}

/// `max |closed form − Γ(Ψ(|x_p⟩⟨x_q|))|` over all indices, the quadrature
/// oracle for [`lambda_matrix_elements_with`].
pub fn closed_form_deviation(space: &FockSpace, quad: &Quadrature, opts: HeterodyneOptions) -> Result<f64, BargmannError> {
    opts.validate()?;
    let t = lambda_matrix_elements_with(space, opts);
    let d = space.dim();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|p| (0..d).map(move |q| (p, q))).collect();
    let devs: Vec<Result<f64, BargmannError>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let samples = husimi_samples(&space.unit(p, q), quad, space, opts);
            let g = gamma_bargmann(&samples, space, quad)?;
            let mut dev = 0.0f64;
            for m in 0..d {
                for n in 0..d {
                    dev = dev.max((g[(m, n)] - C64::new(t.get(m, n, p, q), 0.0)).norm());
                }
            }
            Ok(dev)
        })
        .collect();
    devs.into_iter().try_fold(0.0f64, |a, r| Ok(a.max(r?)))
}

/// Singular values (descending) of `Λ` on the `(N+1)²`-dimensional operator
/// space.
pub fn injectivity_spectrum(space: &FockSpace) -> Result<Vec<f64>, BargmannError> {
    injectivity_spectrum_with(space, HeterodyneOptions::default())
}

pub fn injectivity_spectrum_with(space: &FockSpace, opts: HeterodyneOptions) -> Result<Vec<f64>, BargmannError> {
    check_cap(space)?;
    opts.validate()?;
    Ok(singular_values(&lambda_matrix_elements_with(space, opts).operator_matrix())?)
}

/// Singular values of `Λ` restricted to diagonal (classical) inputs.
pub fn injectivity_spectrum_diagonal(space: &FockSpace) -> Result<Vec<f64>, BargmannError> {
    check_cap(space)?;
    let t = lambda_matrix_elements(space);
    let d = space.dim();
    let m = ComplexMatrix::from_fn(d * d, d, |r, p| C64::new(t.get(r / d, r % d, p, p), 0.0));
    Ok(singular_values(&m)?)
}

/// Count of singular values above `σ_max · RANK_TOL`.
pub fn numerical_rank(sv: &[f64]) -> usize {
    let top = sv.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > top * RANK_TOL).count()
}

fn check_cap(space: &FockSpace) -> Result<(), BargmannError> {
    if space.cutoff() > INJECTIVITY_CUTOFF_CAP {
        return Err(BargmannError::DimensionCap {
            cutoff: space.cutoff(),
            cap: INJECTIVITY_CUTOFF_CAP,
        });
    }
    Ok(())
}

/// Numerical rank of `f ↦ Γ(f)` on `span{αᵏ ᾱˡ e^{-|α|²} : k + l ≤ N}`,
/// with the number of spanning functions.
pub fn kernel_selectivity(space: &FockSpace, quad: &Quadrature) -> Result<(usize, usize), BargmannError> {
    check_cap(space)?;
    let n = space.cutoff();
    let d = space.dim();
    let exps: Vec<(usize, usize)> = (0..=n).flat_map(|k| (0..=n - k).map(move |l| (k, l))).collect();
    let mut cols = Vec::with_capacity(exps.len());
    for &(k, l) in &exps {
        let samples: Vec<C64> = quad
            .nodes()
            .iter()
            .map(|&a| a.powu(k as u32) * a.conj().powu(l as u32) * (-a.norm_sqr()).exp())
            .collect();
        cols.push(gamma_bargmann(&samples, space, quad)?);
    }
    let m = ComplexMatrix::from_fn(d * d, exps.len(), |r, c| cols[c][(r / d, r % d)]);
    Ok((numerical_rank(&singular_values(&m)?), exps.len()))
}

/// The truncated channel in the Schrödinger picture with its repair data.
#[derive(Clone, Debug, PartialEq)]
pub struct BargmannChannel {
    /// Product decomposition of the repaired Choi state read off from the
    /// factorization through the Bargmann POVM.
    pub ensemble: Ensemble,
    /// Trace-preserving after congruence by `S^{-1/2}`.
    pub channel: Channel,
    /// Choi state of the truncated map before the repair (trace-one
    /// normalization, not trace preserving).
    pub raw_choi: HermitianMatrix,
    /// `max |S − 1|` entrywise, `S = d Tr_out C_raw`.
    pub repair_magnitude: f64,
}

/// Builds the predual of `Λ` on the truncated space,
/// `⟨x_m|Λ_*(|x_p⟩⟨x_q|)|x_n⟩ = ⟨x_q|Λ(|x_n⟩⟨x_m|)|x_p⟩`, and restores trace
/// preservation by the congruence `C ↦ (S^{-1/2} ⊗ 1) C (S^{-1/2} ⊗ 1)`.
pub fn bargmann_channel(space: &FockSpace, opts: HeterodyneOptions) -> Result<BargmannChannel, BargmannError> {
    opts.validate()?;
    let t = lambda_matrix_elements_with(space, opts);
    let d = space.dim();
    let raw = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (p, m) = (r / d, r % d);
        let (q, n) = (c / d, c % d);
        C64::new(t.get(q, p, n, m) / d as f64, 0.0)
    });
    let raw = HermitianMatrix::hermitian_part(&raw);
    let shape = TensorShape::new(vec![d, d])?;
    let s = partial_trace(&raw, &shape, &[0])?.scale(d as f64);
    let repair_magnitude = (s.as_matrix() - &ComplexMatrix::identity(d)).max_abs();
    let r = hermitian_function(&s, |x| 1.0 / x.sqrt())?;
    let fixed = raw.congruence(&kron(&r, &ComplexMatrix::identity(d)));
    let channel = Channel::from_choi(d, d, fixed)?;
    let ensemble = coherent_ensemble(space, opts, Some(&r))?;
    Ok(BargmannChannel {
        ensemble,
        channel,
        raw_choi: raw,
        repair_magnitude,
    })
}

/// The Choi state of the truncated predual is
/// `d^{-1} π^{-1} ∫ |ψ̄_α⟩⟨ψ̄_α| ⊗ |ψ_β⟩⟨ψ_β| d²α` with `β = f(α)`, an integral of
/// products against `e^{-(1+c²)|α|²}` times a polynomial of degree at most
/// `2N` in `t = |α|²` and angular frequency at most `2N`. Gauss–Laguerre with
/// `N + 1` nodes for that weight times `2N + 1` angles integrates it exactly,
/// which gives a finite ensemble. With `repair` the left states are mapped
/// by the congruence of [`bargmann_channel`].
fn coherent_ensemble(space: &FockSpace, opts: HeterodyneOptions, repair: Option<&HermitianMatrix>) -> Result<Ensemble, BargmannError> {
    let n = space.cutoff();
    let d = space.dim();
    let kappa = 1.0 + opts.scale * opts.scale;
    let (t, lw) = gauss_laguerre(n + 1)?;
    let angles = 2 * n + 1;
    let lf = ln_factorials(n);
    // coherent vectors without the Gaussian factor
    let poly = |z: C64| -> Vec<C64> { (0..d).map(|k| z.powu(k as u32) * (-0.5 * lf[k]).exp()).collect() };
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (tk, lwk) in t.iter().zip(&lw) {
        let w = lwk.exp() / (kappa * angles as f64 * d as f64);
        for j in 0..angles {
            let alpha = C64::from_polar((tk / kappa).sqrt(), 2.0 * std::f64::consts::PI * j as f64 / angles as f64);
            let u: Vec<C64> = poly(alpha).iter().map(|z| z.conj()).collect();
            let v = poly(opts.map(alpha));
            let mut l = HermitianMatrix::projector(&u);
            if let Some(r) = repair {
                l = l.congruence(r);
            }
            let r_state = HermitianMatrix::projector(&v);
            let (tl, tr) = (l.real_trace(), r_state.real_trace());
            weights.push(w * tl * tr);
            left.push(l.scale(1.0 / tl));
            right.push(r_state.scale(1.0 / tr));
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|x| *x /= total);
    Ok(Ensemble::new(weights, left, right)?)
}

/// The checks of the coherent-state construction at one truncation, with the
/// full criteria report of the repaired channel.
#[derive(Clone, Debug, PartialEq)]
pub struct BargmannReport {
    pub cutoff: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub options: HeterodyneOptions,
    pub overcompleteness_error: f64,
    pub closed_form_deviation: f64,
    pub repair_magnitude: f64,
    /// Smallest eigenvalue of the Choi state before the repair.
    pub raw_min_eigenvalue: f64,
    pub report: EbReport,
}

pub fn bargmann_eb_report(space: &FockSpace, quad: &Quadrature, cfg: &RunConfig) -> Result<BargmannReport, BargmannError> {
    bargmann_eb_report_with(space, quad, cfg, HeterodyneOptions::default(), ReportOptions::default())
}

/// Checks the closed form against the quadrature (refusing to continue past
/// [`CLOSED_FORM_TOL`]), builds the repaired channel and runs the criteria.
pub fn bargmann_eb_report_with(
    space: &FockSpace,
    quad: &Quadrature,
    cfg: &RunConfig,
    opts: HeterodyneOptions,
    report_opts: ReportOptions,
) -> Result<BargmannReport, BargmannError> {
    let closed_form_deviation = closed_form_deviation(space, quad, opts)?;
    if !(closed_form_deviation <= CLOSED_FORM_TOL) {
        return Err(BargmannError::ClosedFormMismatch(closed_form_deviation));
    }
    let overcompleteness_error = overcompleteness_error(space, quad)?;
    let b = bargmann_channel(space, opts)?;
    let raw_min_eigenvalue = eig_hermitian(&b.raw_choi)?.values[0];
    let mut report_opts = report_opts;
    if report_opts.candidate.is_none() {
        report_opts.candidate = Some(b.ensemble.clone());
    }
    let report = eb_report_with(&b.channel, cfg, report_opts)?;
    Ok(BargmannReport {
        cutoff: space.cutoff(),
        radial_nodes: quad.radial(),
        angular_nodes: quad.angular(),
        options: opts,
        overcompleteness_error,
        closed_form_deviation,
        repair_magnitude: b.repair_magnitude,
        raw_min_eigenvalue,
        report,
    })
}
