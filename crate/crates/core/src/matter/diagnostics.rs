//! Completeness diagnostics for a truncated electronic basis.

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

use super::solution::GridSolution;

/// Thomas–Reiche–Kuhn sum `Σ_β 2(E_β − E_α)|⟨α|x|β⟩|²` at node `k`
/// (unity for a complete basis of a unit-mass particle).
pub fn trk_sum(sol: &GridSolution, k: usize, state: usize) -> f64 {
    let q = &sol.params.charges;
    let e = &sol.energies[k];
    // x = (μ − z_p R)/z_e; the constant drops out of off-diagonal elements
    (0..sol.n_states)
        .filter(|&b| b != state)
        .map(|b| {
            let x = sol.dipole[k][(state, b)] / q.electron;
            2.0 * (e[b] - e[state]) * x * x
        })
        .sum()
}

/// `max |𝒫_t μ² 𝒫_t − 𝒫_t μ 𝒫_s μ 𝒫_t|` at node `k`, where `𝒫_t` keeps the
/// lowest `n_target` states and `𝒫_s` the lowest `n_sub`.
pub fn leakage_at(sol: &GridSolution, k: usize, n_target: usize, n_sub: usize) -> f64 {
    let mu = &sol.dipole[k];
    let left = mu.view((0, 0), (n_target, n_sub));
    let right = mu.view((0, 0), (n_sub, n_target));
    let mu2 = sol.dipole_squared[k].view((0, 0), (n_target, n_target));
    let resolved: RMatrix = left * right;
    (mu2 - resolved).abs().max()
}

/// Largest `leakage_at` over the nuclear grid.
pub fn block_leakage(sol: &GridSolution, n_target: usize, n_sub: usize) -> Result<f64> {
    if n_target == 0 || n_target > n_sub || n_sub > sol.n_states {
        return Err(Error::InvalidInput(format!(
            "need 0 < n_target ≤ n_sub ≤ {} (got n_target = {n_target}, n_sub = {n_sub})",
            sol.n_states
        )));
    }
    Ok((0..sol.n_r()).map(|k| leakage_at(sol, k, n_target, n_sub)).fold(0.0, f64::max))
}

/// `‖𝒫μ²𝒫 − (𝒫μ𝒫)²‖_max` style leakage of the two-state target block
/// (single ground state when `n_sub = 1`) when μ is resolved on `n_sub` states.
pub fn subspace_leakage(sol: &GridSolution, n_sub: usize) -> Result<f64> {
    block_leakage(sol, n_sub.min(2), n_sub)
}
