//! Antidegradability: the analytic condition, an explicit symmetric
//! two-extension of the Choi state, and a positive-capacity witness.

use crate::channel::TransitionMatrix;
use crate::error::{Error, Result};
use crate::kernel::{C64, CMatrix, c, is_psd, partial_trace};

/// Absorbs rounding in `γ_jj = 1 − Σ γ_ji`.
const ROUNDING_SLACK: f64 = 1e-14;

/// `γ_j0 ≥ γ_jj` for every excited level.
pub fn is_antidegradable(g: &TransitionMatrix) -> bool {
    (1..g.dim()).all(|j| g.get(j, 0) >= g.survival(j) - ROUNDING_SLACK)
}

/// State on `A ⊗ B1 ⊗ B2` whose two `B` marginals both equal the Choi state.
#[derive(Debug, Clone)]
pub struct TwoExtension {
    dim: usize,
    tau: CMatrix,
    /// `p[j][i] = γ_ji / (1 − γ_jj)` for `i < j`; empty for `j = 0`.
    p: Vec<Vec<f64>>,
}

impl TwoExtension {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.tau
    }

    pub fn distribution(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Marginal on `A ⊗ B2` (`b = 1`) or `A ⊗ B1` (`b = 2`).
    pub fn trace_out(&self, b: usize) -> Result<CMatrix> {
        let d = self.dim;
        partial_trace(&self.tau, &[d, d, d], &[b])
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        is_psd(&self.tau, tol)
    }
}

/// `τ = (|u⟩⟨u| + D)/d` with `|u⟩ = |000⟩ + Σ_j √γ_jj (|j,0,j⟩ + |j,j,0⟩)`
/// and a nonnegative diagonal `D` redistributing the decayed weight.
pub fn build_two_extension(g: &TransitionMatrix) -> Result<TwoExtension> {
    if !is_antidegradable(g) {
        return Err(Error::ConditionViolated("channel is not antidegradable".into()));
    }
    let d = g.dim();
    let idx = |a: usize, b1: usize, b2: usize| (a * d + b1) * d + b2;
    let mut u = nalgebra::DVector::<C64>::zeros(d * d * d);
    u[idx(0, 0, 0)] = c(1.0);
    for j in 1..d {
        let s = g.survival(j).sqrt();
        u[idx(j, 0, j)] += c(s);
        u[idx(j, j, 0)] += c(s);
    }
    let mut tau = &u * u.adjoint();
    let mut p = vec![Vec::new(); d];
    for j in 1..d {
        let excess = g.get(j, 0) - g.survival(j);
        if excess > 0.0 && 1.0 - g.survival(j) <= 0.0 {
            return Err(Error::ConditionViolated(format!("level {j} has no decay weight")));
        }
        let row: Vec<f64> =
            (0..j).map(|i| if excess > 0.0 { g.get(j, i) / (1.0 - g.survival(j)) } else { 0.0 }).collect();
        for (i, &pi) in row.iter().enumerate() {
            let w = pi * excess;
            tau[(idx(j, 0, i), idx(j, 0, i))] += c(w);
            if i >= 1 {
                tau[(idx(j, i, 0), idx(j, i, 0))] += c(w);
                tau[(idx(j, i, i), idx(j, i, i))] += c(g.get(j, i) - w);
            }
        }
        p[j] = row;
    }
    tau /= c(d as f64);
    Ok(TwoExtension { dim: d, tau, p })
}

/// `log₂ f(x)` for `f(x) = x^x / (1+x)^{1+x}`, with `f(0) = 1`.
pub fn log2_f(x: f64) -> f64 {
    let xl = if x > 0.0 { x * x.log2() } else { 0.0 };
    xl - (1.0 + x) * (1.0 + x).log2()
}

/// Lower bound `½[log₂ f(γ_j0) − log₂ f(γ_jj)]` on the capacity, positive
/// whenever level `j` violates the antidegradability condition.
pub fn capacity_positive_witness(g: &TransitionMatrix, j: usize) -> Result<f64> {
    if j == 0 || j >= g.dim() {
        return Err(Error::IndexOutOfRange { index: j, dim: g.dim() });
    }
    let (g0, gjj) = (g.get(j, 0), g.survival(j));
    if g0 >= gjj {
        return Err(Error::ConditionViolated(format!("level {j} satisfies gamma_j0 >= gamma_jj")));
    }
    Ok(0.5 * (log2_f(g0) - log2_f(gjj)))
}
