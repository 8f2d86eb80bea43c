//! Adiabatic electronic states on the nuclear grid and their matrix elements.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

use super::grid::BandedSymmetric;
use super::params::{ElectronGrid, ShinMetiuParams};

/// Largest tolerated change of the two lowest energies when the grid spacing is halved.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-6;

/// Eigenstates at a single proton position.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub r: f64,
    pub energies: Vec<f64>,
    /// Grid samples of each state, normalized so that `dx Σ ψ² = 1`.
    pub wavefunctions: Vec<Vec<f64>>,
    pub dx: f64,
}

impl PointSolution {
    /// `dx Σ f ψ_α ψ_β`.
    pub fn matrix_element(&self, a: usize, b: usize, f: impl Fn(usize) -> f64) -> f64 {
        let (pa, pb) = (&self.wavefunctions[a], &self.wavefunctions[b]);
        self.dx * (0..pa.len()).map(|i| pa[i] * f(i) * pb[i]).sum::<f64>()
    }

    pub fn operator_matrix(&self, f: impl Fn(usize) -> f64) -> RMatrix {
        let n = self.energies.len();
        let fv: Vec<f64> = (0..self.wavefunctions[0].len()).map(f).collect();
        let mut m = RMatrix::zeros(n, n);
        for a in 0..n {
            let weighted: Vec<f64> = self.wavefunctions[a].iter().zip(&fv).map(|(x, y)| x * y).collect();
            for b in a..n {
                let v = self.dx * weighted.iter().zip(&self.wavefunctions[b]).map(|(x, y)| x * y).sum::<f64>();
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        m
    }

    /// `⟨α|∂_x|β⟩` with centered differences; exactly antisymmetric.
    pub fn derivative_matrix(&self) -> RMatrix {
        let n = self.energies.len();
        let mut m = RMatrix::zeros(n, n);
        for b in 0..n {
            let pb = &self.wavefunctions[b];
            let np = pb.len();
            let d: Vec<f64> = (0..np)
                .map(|i| {
                    let up = if i + 1 < np { pb[i + 1] } else { 0.0 };
                    let dn = if i > 0 { pb[i - 1] } else { 0.0 };
                    (up - dn) / (2.0 * self.dx)
                })
                .collect();
            for a in 0..n {
                m[(a, b)] = self.dx * self.wavefunctions[a].iter().zip(&d).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        0.5 * (&m - m.transpose())
    }

    /// `⟨α(self)|β(other)⟩`.
    pub fn overlap(&self, other: &PointSolution) -> RMatrix {
        let n = self.energies.len();
        RMatrix::from_fn(n, n, |a, b| {
            self.dx * self.wavefunctions[a].iter().zip(&other.wavefunctions[b]).map(|(x, y)| x * y).sum::<f64>()
        })
    }

    fn flip(&mut self, a: usize) {
        self.wavefunctions[a].iter_mut().for_each(|v| *v = -*v);
    }
}

/// Lowest `n_states` eigenpairs at proton position `r` on `grid`.
///
/// The grid points are the unknowns; the wavefunction vanishes one spacing
/// beyond either end.
pub fn solve_point_on(params: &ShinMetiuParams, grid: &ElectronGrid, r: f64, n_states: usize) -> Result<PointSolution> {
    let xs = grid.points();
    let dx = grid.spacing();
    let v: Vec<f64> = xs.iter().map(|&x| params.potential(x, r)).collect();
    if let Some(i) = v.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("potential is not finite at x = {}, R = {r}", xs[i])));
    }
    let h = BandedSymmetric::schrodinger(&v, dx, grid.fd_order);
    let (energies, vectors) = h.lowest_eigenpairs(n_states)?;
    let norm = 1.0 / dx.sqrt();
    let wavefunctions = vectors.into_iter().map(|v| v.into_iter().map(|x| x * norm).collect()).collect();
    Ok(PointSolution { r, energies, wavefunctions, dx })
}

pub fn solve_point(params: &ShinMetiuParams, r: f64, n_states: usize) -> Result<PointSolution> {
    solve_point_on(params, &params.grid, r, n_states)
}

/// Outcome of the grid-doubling check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCheck {
    pub r: f64,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub max_shift: f64,
}

/// Adiabatic data for every proton position of the scan.
///
/// All matrices are `n_states × n_states` and real. Wavefunctions are not
/// retained.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub params: ShinMetiuParams,
    pub n_states: usize,
    pub r_values: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
    /// `⟨α|z_e x + z_p R|β⟩`.
    pub dipole: Vec<RMatrix>,
    /// `⟨α|(z_e x + z_p R)²|β⟩` evaluated on the grid.
    pub dipole_squared: Vec<RMatrix>,
    /// `⟨α|∂_x|β⟩`; the electronic momentum is `−i` times this.
    pub momentum: Vec<RMatrix>,
    /// `⟨α|∂_R|β⟩` from centered differences of neighbour overlaps.
    pub derivative_coupling: Vec<RMatrix>,
    /// `⟨α|∂V/∂R|β⟩`.
    pub force: Vec<RMatrix>,
    /// `⟨α(R_k)|β(R_{k+1})⟩`.
    pub neighbor_overlap: Vec<RMatrix>,
    /// Maximum `|⟨α|β⟩ − δ_αβ|` over all proton positions.
    pub orthonormality_error: f64,
    pub grid_check: GridCheck,
}

/// Solve the electronic problem on every proton position of `params.r_scan`.
pub fn solve_adiabatic(params: &ShinMetiuParams, n_states: usize) -> Result<GridSolution> {
    params.validate()?;
    if n_states == 0 || n_states > params.grid.n_points / 4 {
        return Err(Error::InvalidInput(format!(
            "n_states must be between 1 and n_points/4 = {}, got {n_states}",
            params.grid.n_points / 4
        )));
    }
    let r_values = params.r_scan.points();

    let grid_check = check_grid(params, r_values[r_values.len() / 2], n_states.min(2))?;
    if grid_check.max_shift > GRID_CONVERGENCE_TOL {
        return Err(Error::Convergence(format!(
            "electron grid too coarse: energies at R = {} move by {:.3e} a.u. when the spacing is halved (limit {:.0e})",
            grid_check.r, grid_check.max_shift, GRID_CONVERGENCE_TOL
        )));
    }

    let mut points = r_values
        .iter()
        .map(|&r| solve_point(params, r, n_states))
        .collect::<Result<Vec<_>>>()?;
    fix_signs(&mut points);

    let xs = params.grid.points();
    let mut orthonormality_error: f64 = 0.0;
    let mut energies = Vec::with_capacity(points.len());
    let mut dipole = Vec::with_capacity(points.len());
    let mut dipole_squared = Vec::with_capacity(points.len());
    let mut momentum = Vec::with_capacity(points.len());
    let mut force = Vec::with_capacity(points.len());
    for p in &points {
        let s = p.operator_matrix(|_| 1.0);
        orthonormality_error = orthonormality_error.max((s - RMatrix::identity(n_states, n_states)).abs().max());
        energies.push(p.energies.clone());
        dipole.push(p.operator_matrix(|i| params.dipole(xs[i], p.r)));
        dipole_squared.push(p.operator_matrix(|i| params.dipole(xs[i], p.r).powi(2)));
        momentum.push(p.derivative_matrix());
        force.push(p.operator_matrix(|i| params.potential_r_derivative(xs[i], p.r)));
    }
    let neighbor_overlap: Vec<RMatrix> = points.windows(2).map(|w| w[0].overlap(&w[1])).collect();
    let derivative_coupling = couplings_from_overlaps(&r_values, &neighbor_overlap, n_states);

    Ok(GridSolution {
        params: params.clone(),
        n_states,
        r_values,
        energies,
        dipole,
        dipole_squared,
        momentum,
        derivative_coupling,
        force,
        neighbor_overlap,
        orthonormality_error,
        grid_check,
    })
}

fn check_grid(params: &ShinMetiuParams, r: f64, n: usize) -> Result<GridCheck> {
    let coarse = solve_point_on(params, &params.grid, r, n)?.energies;
    let fine = solve_point_on(params, &params.grid.refined(), r, n)?.energies;
    let max_shift = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(GridCheck { r, coarse, fine, max_shift })
}

/// First point: largest-magnitude sample positive. Later points: positive
/// overlap with the same state at the previous point.
fn fix_signs(points: &mut [PointSolution]) {
    if points.is_empty() {
        return;
    }
    for a in 0..points[0].energies.len() {
        let w = &points[0].wavefunctions[a];
        let peak = w.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if peak < 0.0 {
            points[0].flip(a);
        }
    }
    for k in 1..points.len() {
        let (prev, rest) = points.split_at_mut(k);
        let prev = &prev[k - 1];
        let cur = &mut rest[0];
        for a in 0..cur.energies.len() {
            let o: f64 = prev.dx
                * prev.wavefunctions[a].iter().zip(&cur.wavefunctions[a]).map(|(x, y)| x * y).sum::<f64>();
            if o < 0.0 {
                cur.flip(a);
            }
        }
    }
}

/// Derivative couplings from neighbour overlaps. The antisymmetric part of
/// `S(R_k, R_{k+1})/h` estimates `d` at the midpoint to second order; node
/// values are interpolated between midpoints and linearly extrapolated at
/// the ends.
pub(crate) fn couplings_from_overlaps(r: &[f64], overlaps: &[RMatrix], n: usize) -> Vec<RMatrix> {
    let nr = r.len();
    if nr < 2 {
        return vec![RMatrix::zeros(n, n); nr];
    }
    let mid: Vec<RMatrix> = overlaps
        .iter()
        .enumerate()
        .map(|(k, s)| (s - s.transpose()) / (2.0 * (r[k + 1] - r[k])))
        .collect();
    let at = |k: usize| 0.5 * (r[k] + r[k + 1]);
    // linear through midpoints i and i+1, evaluated at x
    let line = |i: usize, x: f64| {
        let t = (x - at(i)) / (at(i + 1) - at(i));
        &mid[i] * (1.0 - t) + &mid[i + 1] * t
    };
    (0..nr)
        .map(|k| {
            if nr == 2 {
                mid[0].clone()
            } else if k == 0 {
                line(0, r[0])
            } else if k == nr - 1 {
                line(nr - 3, r[k])
            } else {
                line(k - 1, r[k])
            }
        })
        .collect()
}

impl GridSolution {
    pub fn n_r(&self) -> usize {
        self.r_values.len()
    }

    /// Index of the node closest to `r`.
    pub fn nearest_index(&self, r: f64) -> usize {
        let mut best = 0;
        for (k, &x) in self.r_values.iter().enumerate() {
            if (x - r).abs() < (self.r_values[best] - r).abs() {
                best = k;
            }
        }
        best
    }

    pub fn covers(&self, r: f64) -> bool {
        let (lo, hi) = (self.r_values[0], self.r_values[self.n_r() - 1]);
        r >= lo - 1e-12 && r <= hi + 1e-12
    }

    /// Leading `n × n` block of a per-R matrix table.
    pub fn block(m: &RMatrix, n: usize) -> RMatrix {
        m.view((0, 0), (n, n)).into_owned()
    }

    /// Copy restricted to the lowest `n` states.
    pub fn truncated(&self, n: usize) -> Result<GridSolution> {
        if n == 0 || n > self.n_states {
            return Err(Error::InvalidInput(format!("cannot keep {n} of {} states", self.n_states)));
        }
        let cut = |v: &Vec<RMatrix>| v.iter().map(|m| Self::block(m, n)).collect::<Vec<_>>();
        Ok(GridSolution {
            params: self.params.clone(),
            n_states: n,
            r_values: self.r_values.clone(),
            energies: self.energies.iter().map(|e| e[..n].to_vec()).collect(),
            dipole: cut(&self.dipole),
            dipole_squared: cut(&self.dipole_squared),
            momentum: cut(&self.momentum),
            derivative_coupling: cut(&self.derivative_coupling),
            force: cut(&self.force),
            neighbor_overlap: cut(&self.neighbor_overlap),
            orthonormality_error: self.orthonormality_error,
            grid_check: self.grid_check.clone(),
        })
    }

    /// Hellmann–Feynman estimate `⟨α|∂V/∂R|β⟩ / (E_β − E_α)` at node `k`.
    pub fn hellmann_feynman_coupling(&self, k: usize) -> RMatrix {
        let e = &self.energies[k];
        DMatrix::from_fn(self.n_states, self.n_states, |a, b| {
            if a == b {
                0.0
            } else {
                self.force[k][(a, b)] / (e[b] - e[a])
            }
        })
    }
}
