use serde::{Deserialize, Serialize};

use crate::linalg::{eigvals_symmetric_tridiagonal, C64};

use super::BargmannError;

/// Product rule for `π^{-1} ∫_ℂ g(α) d²α`: Gauss–Laguerre in `t = |α|²`
/// times the uniform rule in the angle.
///
/// With `α = √t e^{iθ}` the measure `π^{-1} d²α` becomes `(2π)^{-1} dt dθ`,
/// so the weights are `w_k e^{t_k} / T` for Gauss–Laguerre weights `w_k`. The
/// rule is exact for `e^{-|α|²} αᵐ ᾱⁿ` with `m + n < 4R` and `|m − n| < T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    radial: usize,
    angular: usize,
    nodes: Vec<C64>,
    weights: Vec<f64>,
}

/// Node counts, as exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial: 40, angular: 64 }
    }
}

impl Quadrature {
    pub fn new(radial: usize, angular: usize) -> Result<Self, BargmannError> {
        if radial == 0 || angular == 0 {
            return Err(BargmannError::InvalidArgument("quadrature node counts must be positive".into()));
        }
        let (t, lw) = gauss_laguerre(radial)?;
        let mut nodes = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        for (tk, lwk) in t.iter().zip(&lw) {
            let w = (lwk + tk).exp() / angular as f64;
            for j in 0..angular {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / angular as f64;
                nodes.push(C64::from_polar(tk.sqrt(), theta));
                weights.push(w);
            }
        }
        Ok(Self { radial, angular, nodes, weights })
    }

    pub fn from_spec(s: QuadratureSpec) -> Result<Self, BargmannError> {
        Self::new(s.radial, s.angular)
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    /// Weights for `π^{-1} d²α`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_k W_k g(α_k)` summed in node order.
    pub fn integrate(&self, g: impl Fn(C64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(a, w)| g(*a) * *w).sum()
    }
}

/// Gauss–Laguerre nodes and log-weights for `∫_0^∞ e^{-t} g(t) dt`.
///
/// Nodes start from the eigenvalues of the Jacobi matrix and are polished by
/// Newton steps on `L_R`. Weights use `−t_k / (R(R+1) L_{R−1}(t_k) L_{R+1}(t_k))`:
/// the neighbouring roots of `L_{R−1}` and `L_{R+1}` lie on opposite sides of
/// `t_k`, so the node's rounding error cancels to first order, which matters
/// for the smallest nodes.
pub fn gauss_laguerre(r: usize) -> Result<(Vec<f64>, Vec<f64>), BargmannError> {
    let diag: Vec<f64> = (0..r).map(|i| (2 * i + 1) as f64).collect();
    let off: Vec<f64> = (1..r).map(|i| i as f64).collect();
    let mut nodes = eigvals_symmetric_tridiagonal(&diag, &off)?;
    let mut log_weights = Vec::with_capacity(r);
    for t in nodes.iter_mut() {
        for _ in 0..8 {
            let (l, dl) = laguerre_with_derivative(r, *t);
            let step = l / dl;
            *t -= step;
            if step.abs() <= 1e-16 * t.abs() {
                break;
            }
        }
        let (below, _) = laguerre_with_derivative(r - 1, *t);
        let (above, _) = laguerre_with_derivative(r + 1, *t);
        log_weights.push(t.ln() - ((r * (r + 1)) as f64).ln() - below.abs().ln() - above.abs().ln());
    }
    Ok((nodes, log_weights))
}

/// `(L_n(t), L_n'(t))` by the three-term recurrence.
fn laguerre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, 1.0 - t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - t) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    // t L_n' = n (L_n − L_{n−1})
    let d = n as f64 * (cur - prev) / t;
    (cur, d)
}
