//! Two-state electronic subspace tabulated on the nuclear grid, and the
//! rotations between its representations.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{lagrange_weights, node_derivative};
use crate::linalg::RMatrix;

use super::solution::{couplings_from_overlaps, GridSolution};

pub type Mat2 = Matrix2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Adiabatic,
    StrictDiabatic,
    MullikenHush,
    /// User-supplied matrices with no underlying grid solution.
    Literal,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Adiabatic => "adiabatic",
            Representation::StrictDiabatic => "strict-diabatic",
            Representation::MullikenHush => "mulliken-hush",
            Representation::Literal => "literal",
        }
    }
}

/// Rotation by `g`: columns are the rotated states in the old basis.
pub fn rotation(g: f64) -> Mat2 {
    let (s, c) = g.sin_cos();
    Mat2::new(c, -s, s, c)
}

fn block2(m: &RMatrix) -> Mat2 {
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Eigenvalues of a real symmetric 2×2 matrix, ascending.
pub fn symmetric_eigenvalues(m: &Mat2) -> [f64; 2] {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half = (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + m[(0, 1)].powi(2)).sqrt();
    [mean - half, mean + half]
}

/// Subspace matrices at one proton position, with the scalar parametrization
/// `𝒱 = 𝒱̄ + εσ_z + 𝒱₁₀σ_x`, `μ̃ = μ̄ + Δμσ_z + μ₁₀σ_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatterPoint {
    pub r: f64,
    pub potential: Mat2,
    pub dipole: Mat2,
    /// `⟨α|∂_x|β⟩` (antisymmetric).
    pub momentum: Mat2,
    /// `⟨α|∂_R|β⟩` (antisymmetric).
    pub derivative_coupling: Mat2,
    /// `∂_R μ̃` of the tabulated matrix elements.
    pub dipole_derivative: Mat2,
}

impl MatterPoint {
    pub fn constant(potential: Mat2, dipole: Mat2) -> Self {
        Self {
            r: 0.0,
            potential,
            dipole,
            momentum: default_momentum(&potential, &dipole),
            derivative_coupling: Mat2::zeros(),
            dipole_derivative: Mat2::zeros(),
        }
    }

    pub fn epsilon(&self) -> f64 {
        0.5 * (self.potential[(0, 0)] - self.potential[(1, 1)])
    }

    pub fn v_bar(&self) -> f64 {
        0.5 * (self.potential[(0, 0)] + self.potential[(1, 1)])
    }

    pub fn v10(&self) -> f64 {
        self.potential[(1, 0)]
    }

    pub fn delta_mu(&self) -> f64 {
        0.5 * (self.dipole[(0, 0)] - self.dipole[(1, 1)])
    }

    pub fn mu_bar(&self) -> f64 {
        0.5 * (self.dipole[(0, 0)] + self.dipole[(1, 1)])
    }

    pub fn mu10(&self) -> f64 {
        self.dipole[(1, 0)]
    }

    /// Splitting of the dipole eigenvalues, `√((μ₀₀−μ₁₁)² + 4μ₁₀²)`.
    pub fn xi(&self) -> f64 {
        2.0 * self.delta_mu().hypot(self.mu10())
    }

    /// Angle of the dipole eigenbasis, `tanθ = 2μ₀₁/(μ₀₀−μ₁₁)`.
    pub fn theta(&self) -> f64 {
        (2.0 * self.dipole[(0, 1)]).atan2(self.dipole[(0, 0)] - self.dipole[(1, 1)])
    }

    /// `dθ/dR` from the tabulated dipole derivative; zero when `ξ = 0`.
    pub fn theta_derivative(&self) -> f64 {
        let d = self.dipole[(0, 0)] - self.dipole[(1, 1)];
        let dd = self.dipole_derivative[(0, 0)] - self.dipole_derivative[(1, 1)];
        let xi2 = self.xi().powi(2);
        if xi2 == 0.0 {
            return 0.0;
        }
        2.0 * (d * self.dipole_derivative[(0, 1)] - self.dipole[(0, 1)] * dd) / xi2
    }
}

/// `⟨α|∂_x|β⟩ = [𝒱, μ̃]` for one electron of charge −1 and unit mass
/// (exact when the subspace is closed under H; a model assumption otherwise).
pub fn default_momentum(potential: &Mat2, dipole: &Mat2) -> Mat2 {
    potential * dipole - dipole * potential
}

/// Two-state matter data on a nuclear grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatterSubspace {
    pub representation: Representation,
    pub r_values: Vec<f64>,
    pub potential: Vec<Mat2>,
    pub dipole: Vec<Mat2>,
    pub momentum: Vec<Mat2>,
    pub derivative_coupling: Vec<Mat2>,
    pub dipole_derivative: Vec<Mat2>,
    /// Columns: these states expanded in the two lowest adiabatic states.
    pub rotation: Vec<Mat2>,
}

fn check_symmetric(m: &Mat2, what: &str, k: usize) -> Result<()> {
    if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * m.abs().max().max(1.0) {
        return Err(Error::InvalidInput(format!("{what} at node {k} is not symmetric")));
    }
    Ok(())
}

fn fd_table(r: &[f64], v: &[Mat2]) -> Vec<Mat2> {
    if r.len() < 2 {
        return vec![Mat2::zeros(); r.len()];
    }
    (0..r.len()).map(|k| node_derivative(r, k, |i| v[i])).collect()
}

impl MatterSubspace {
    /// Literal two-level model from tabulated (or, with one node, constant) matrices.
    pub fn literal(r_values: Vec<f64>, potential: Vec<Mat2>, dipole: Vec<Mat2>, momentum: Option<Vec<Mat2>>) -> Result<Self> {
        let n = r_values.len();
        if n == 0 || potential.len() != n || dipole.len() != n || momentum.as_ref().is_some_and(|m| m.len() != n) {
            return Err(Error::InvalidInput("literal model tables must be non-empty and of equal length".into()));
        }
        if r_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("literal model R values must be strictly ascending".into()));
        }
        for k in 0..n {
            check_symmetric(&potential[k], "potential", k)?;
            check_symmetric(&dipole[k], "dipole", k)?;
        }
        let momentum =
            momentum.unwrap_or_else(|| potential.iter().zip(&dipole).map(|(v, m)| default_momentum(v, m)).collect());
        let dipole_derivative = fd_table(&r_values, &dipole);
        Ok(Self {
            representation: Representation::Literal,
            derivative_coupling: vec![Mat2::zeros(); n],
            rotation: vec![Mat2::identity(); n],
            r_values,
            potential,
            dipole,
            momentum,
            dipole_derivative,
        })
    }

    pub fn constant(potential: Mat2, dipole: Mat2) -> Result<Self> {
        Self::literal(vec![0.0], vec![potential], vec![dipole], None)
    }

    /// The two lowest adiabatic states of a grid solution.
    pub fn adiabatic(sol: &GridSolution) -> Result<Self> {
        if sol.n_states < 2 {
            return Err(Error::InvalidInput("a two-state subspace needs at least two solved states".into()));
        }
        let n = sol.n_r();
        let potential: Vec<Mat2> = sol.energies.iter().map(|e| Mat2::new(e[0], 0.0, 0.0, e[1])).collect();
        let dipole: Vec<Mat2> = sol.dipole.iter().map(block2).collect();
        Ok(Self {
            representation: Representation::Adiabatic,
            dipole_derivative: fd_table(&sol.r_values, &dipole),
            r_values: sol.r_values.clone(),
            potential,
            dipole,
            momentum: sol.momentum.iter().map(block2).collect(),
            derivative_coupling: sol.derivative_coupling.iter().map(block2).collect(),
            rotation: vec![Mat2::identity(); n],
        })
    }

    pub fn n_r(&self) -> usize {
        self.r_values.len()
    }

    pub fn covers(&self, r: f64) -> bool {
        self.n_r() == 1 || (r >= self.r_values[0] - 1e-12 && r <= self.r_values[self.n_r() - 1] + 1e-12)
    }

    /// Matrices at node `k`.
    pub fn node(&self, k: usize) -> MatterPoint {
        MatterPoint {
            r: self.r_values[k],
            potential: self.potential[k],
            dipole: self.dipole[k],
            momentum: self.momentum[k],
            derivative_coupling: self.derivative_coupling[k],
            dipole_derivative: self.dipole_derivative[k],
        }
    }

    /// Matrices at `r`: exact at nodes, cubic interpolation in between. A
    /// single-node table is treated as R-independent.
    pub fn point(&self, r: f64) -> Result<MatterPoint> {
        if self.n_r() == 1 {
            return Ok(MatterPoint { r, ..self.node(0) });
        }
        if !self.covers(r) {
            return Err(Error::InvalidInput(format!(
                "R = {r} outside the tabulated range [{}, {}]",
                self.r_values[0],
                self.r_values[self.n_r() - 1]
            )));
        }
        let w = lagrange_weights(&self.r_values, r);
        let mix = |t: &[Mat2]| w.iter().fold(Mat2::zeros(), |acc, &(i, c)| acc + t[i] * c);
        Ok(MatterPoint {
            r,
            potential: mix(&self.potential),
            dipole: mix(&self.dipole),
            momentum: mix(&self.momentum),
            derivative_coupling: mix(&self.derivative_coupling),
            dipole_derivative: mix(&self.dipole_derivative),
        })
    }

    /// Change basis by `W(R)` (columns: new states in the current basis).
    pub fn rotated(&self, w: &[Mat2], representation: Representation) -> Self {
        let n = self.n_r();
        assert_eq!(w.len(), n);
        let conj = |t: &[Mat2]| (0..n).map(|k| w[k].transpose() * t[k] * w[k]).collect::<Vec<_>>();
        let dw = fd_table(&self.r_values, w);
        let dipole = conj(&self.dipole);
        let derivative_coupling =
            (0..n).map(|k| w[k].transpose() * self.derivative_coupling[k] * w[k] + w[k].transpose() * dw[k]).collect();
        Self {
            representation,
            r_values: self.r_values.clone(),
            potential: conj(&self.potential),
            dipole_derivative: fd_table(&self.r_values, &dipole),
            dipole,
            momentum: conj(&self.momentum),
            derivative_coupling,
            rotation: (0..n).map(|k| self.rotation[k] * w[k]).collect(),
        }
    }
}

/// Strict diabatization report.
#[derive(Debug, Clone)]
pub struct Diabatization {
    pub subspace: MatterSubspace,
    /// Mixing angle `γ(R) = ∫ d₀₁ dR` from the first node.
    pub angle: Vec<f64>,
    pub peak_coupling: f64,
    /// Largest `|⟨φ₀|∂_R φ₁⟩|` recomputed from the rotated neighbour overlaps.
    pub residual_coupling: f64,
    /// Largest deviation of `eig 𝒱(R)` from `(E₀, E₁)`.
    pub spectrum_error: f64,
}

/// Relative limit on the recomputed diabatic coupling.
pub const DIABATIC_RESIDUAL_TOL: f64 = 1e-3;

/// Rotate the two lowest adiabatic states into strictly diabatic states by
/// integrating the derivative coupling, `φ_j = Σ_α ψ_α U_αj` with `U` a
/// rotation by `γ(R) = ∫_{R_min}^R d₀₁`.
pub fn diabatize(sol: &GridSolution) -> Result<Diabatization> {
    let adiabatic = MatterSubspace::adiabatic(sol)?;
    let r = &sol.r_values;
    let n = r.len();
    let d01: Vec<f64> = sol.derivative_coupling.iter().map(|d| d[(0, 1)]).collect();
    let peak_coupling = d01.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    if peak_coupling > 0.0 {
        let wide = d01.iter().filter(|v| v.abs() >= 0.5 * peak_coupling).count();
        if wide < 3 {
            return Err(Error::Diabatization(format!(
                "derivative coupling peak ({peak_coupling:.3e}) spans {wide} nuclear grid point(s); refine the R grid"
            )));
        }
    }

    let mut angle = vec![0.0; n];
    for k in 1..n {
        angle[k] = angle[k - 1] + 0.5 * (d01[k] + d01[k - 1]) * (r[k] - r[k - 1]);
    }
    let u: Vec<Mat2> = angle.iter().map(|&g| rotation(g)).collect();

    let mut subspace = adiabatic.rotated(&u, Representation::StrictDiabatic);

    // residual coupling from the rotated states themselves
    let rotated_overlaps: Vec<RMatrix> = sol
        .neighbor_overlap
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let t = u[k].transpose() * block2(s) * u[k + 1];
            RMatrix::from_row_slice(2, 2, &[t[(0, 0)], t[(0, 1)], t[(1, 0)], t[(1, 1)]])
        })
        .collect();
    let residual_coupling = couplings_from_overlaps(r, &rotated_overlaps, 2)
        .iter()
        .fold(0.0_f64, |m, d| m.max(d[(0, 1)].abs()));
    if residual_coupling > DIABATIC_RESIDUAL_TOL * peak_coupling {
        return Err(Error::Diabatization(format!(
            "residual diabatic coupling {residual_coupling:.3e} exceeds {DIABATIC_RESIDUAL_TOL:e} × peak {peak_coupling:.3e}"
        )));
    }
    // below tolerance: the diabatic basis is taken as R-independent
    subspace.derivative_coupling = vec![Mat2::zeros(); n];

    let spectrum_error = (0..n)
        .map(|k| {
            let ev = symmetric_eigenvalues(&subspace.potential[k]);
            (ev[0] - sol.energies[k][0]).abs().max((ev[1] - sol.energies[k][1]).abs())
        })
        .fold(0.0, f64::max);

    Ok(Diabatization { subspace, angle, peak_coupling, residual_coupling, spectrum_error })
}

/// Mulliken–Hush report: nodes where the dipole is degenerate are left unrotated.
#[derive(Debug, Clone)]
pub struct MullikenHush {
    pub subspace: MatterSubspace,
    pub degenerate_nodes: Vec<usize>,
    pub max_offdiagonal_dipole: f64,
}

/// Rotate to the eigenbasis of `μ̃(R)` at every node, larger eigenvalue first.
pub fn mulliken_hush(sub: &MatterSubspace) -> MullikenHush {
    let n = sub.n_r();
    let mut degenerate_nodes = Vec::new();
    let mut phi = vec![0.0; n];
    for k in 0..n {
        let m = &sub.dipole[k];
        let p = MatterPoint::constant(Mat2::zeros(), *m);
        if p.xi() <= 1e-12 * m.abs().max().max(1.0) {
            degenerate_nodes.push(k);
            phi[k] = if k > 0 { phi[k - 1] } else { 0.0 };
            continue;
        }
        let mut a = 0.5 * p.theta();
        // W(φ + π) = −W(φ): same states, so keep φ continuous
        if k > 0 {
            while a - phi[k - 1] > 0.5 * std::f64::consts::PI {
                a -= std::f64::consts::PI;
            }
            while phi[k - 1] - a > 0.5 * std::f64::consts::PI {
                a += std::f64::consts::PI;
            }
        }
        phi[k] = a;
    }
    let w: Vec<Mat2> = (0..n)
        .map(|k| if degenerate_nodes.contains(&k) { Mat2::identity() } else { rotation(phi[k]) })
        .collect();
    let subspace = sub.rotated(&w, Representation::MullikenHush);
    let max_offdiagonal_dipole = subspace.dipole.iter().fold(0.0_f64, |m, d| m.max(d[(0, 1)].abs()));
    MullikenHush { subspace, degenerate_nodes, max_offdiagonal_dipole }
}
