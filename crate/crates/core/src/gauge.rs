//! Polariton Hamiltonians at fixed proton position in the two-state ⊗ Fock
//! space (electronic index slow), for each gauge construction.
//!
//! The nuclear kinetic energy is never included: these are the operators whose
//! eigenvalues form polariton potential energy surfaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::lagrange_weights;
use crate::linalg::{
    c, complexify, expi_hermitian, expi_hermitian_derivative, expi_kron, hermitian_eigenvalues, kron_identity_mul,
    matrix_commutator, spectral_matrix, CMatrix, HybridOperator, LabeledSpace, RMatrix, I,
};
use crate::matter::{GridSolution, Mat2, MatterPoint, MatterSubspace};
use crate::photon::PhotonSpace;
use crate::units::PROTON_MASS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gauge {
    #[serde(rename = "dipole")]
    Dipole,
    #[serde(rename = "coulomb-corrected")]
    CoulombCorrected,
    #[serde(rename = "coulomb-corrected-analytic")]
    CoulombCorrectedAnalytic,
    #[serde(rename = "coulomb-naive-pA")]
    CoulombNaivePa,
    #[serde(rename = "coulomb-naive-projected")]
    CoulombNaiveProjected,
}

impl Gauge {
    pub const ALL: [Gauge; 5] = [
        Gauge::Dipole,
        Gauge::CoulombCorrected,
        Gauge::CoulombCorrectedAnalytic,
        Gauge::CoulombNaivePa,
        Gauge::CoulombNaiveProjected,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Gauge::Dipole => "dipole",
            Gauge::CoulombCorrected => "coulomb-corrected",
            Gauge::CoulombCorrectedAnalytic => "coulomb-corrected-analytic",
            Gauge::CoulombNaivePa => "coulomb-naive-pA",
            Gauge::CoulombNaiveProjected => "coulomb-naive-projected",
        }
    }

    /// Whether this construction needs the large electronic basis.
    pub fn needs_large_basis(self) -> bool {
        self == Gauge::CoulombNaiveProjected
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gauge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Gauge::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown gauge `{s}`")))
    }
}

pub fn mat2c(m: &Mat2) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| c(m[(i, j)]))
}

/// `(σ_x, σ_y, σ_z)` with `σ_z|0⟩ = |0⟩`.
pub fn pauli() -> (CMatrix, CMatrix, CMatrix) {
    let z = c(0.0);
    (
        CMatrix::from_row_slice(2, 2, &[z, c(1.0), c(1.0), z]),
        CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]),
    )
}

fn space(n_el: usize, photon: &PhotonSpace) -> LabeledSpace {
    LabeledSpace::electronic_photonic(n_el, photon.n_fock)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn hermitian(n_el: usize, photon: &PhotonSpace, m: CMatrix) -> Result<HybridOperator> {
    HybridOperator::symmetrized(space(n_el, photon), m)
}

/// `𝒱 ⊗ 1 + 1 ⊗ H_ph`.
fn bare(potential: &CMatrix, photon: &PhotonSpace) -> CMatrix {
    let n = potential.nrows();
    kron(potential, &eye(photon.n_fock)) + kron(&eye(n), &photon.hamiltonian_matrix())
}

/// Dipole-gauge Hamiltonian
/// `𝒱⊗1 + 1⊗H_ph + ωA₀ μ̃⊗i(a†−a) + ωA₀² μ̃²⊗1`.
pub fn build_dipole(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    build_dipole_with(point, photon, true)
}

/// As [`build_dipole`], optionally without the dipole self-energy (for
/// negative controls only: the result is no longer gauge equivalent).
pub fn build_dipole_with(point: &MatterPoint, photon: &PhotonSpace, self_energy: bool) -> Result<HybridOperator> {
    let (w, a0) = (photon.omega_c, photon.a0);
    let mu = mat2c(&point.dipole);
    let mut h = bare(&mat2c(&point.potential), photon) + kron(&mu, &photon.quadrature_p()) * c(w * a0);
    if self_energy {
        h += kron(&(&mu * &mu), &eye(photon.n_fock)) * c(w * a0 * a0);
    }
    hermitian(2, photon, h)
}

/// Dipole gauge written as `𝒱 + ½ω²q_c² + ½(p_c + √(2ω) A₀ μ̃)²`.
///
/// The photon quadratures are squared in a space one level larger and then
/// truncated, so the top Fock level carries no truncation artifact.
pub fn build_dipole_quadrature(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let n = photon.n_fock;
    let big = photon.with_n_fock(n + 1)?;
    let cut = |m: CMatrix| m.view((0, 0), (n, n)).into_owned();
    let q2 = cut(big.coordinate() * big.coordinate());
    let p = cut(big.momentum());
    let p2 = cut(big.momentum() * big.momentum());
    let w = photon.omega_c;
    let shift = mat2c(&point.dipole) * c((2.0 * w).sqrt() * photon.a0);
    let id2 = eye(2);
    let kinetic = kron(&id2, &p2) + kron(&shift, &p) * c(2.0) + kron(&(&shift * &shift), &eye(n));
    let h = kron(&mat2c(&point.potential), &eye(n)) + kron(&id2, &q2) * c(0.5 * w * w) + kinetic * c(0.5);
    hermitian(2, photon, h)
}

/// `𝒰 = exp(−i μ̃ ⊗ Â)`.
pub fn build_pzw_subspace_unitary(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let g = HybridOperator::hermitian(
        space(2, photon),
        kron(&mat2c(&point.dipole), &photon.vector_potential_matrix()),
    )?;
    expi_hermitian(&g, -1.0)
}

/// Corrected Coulomb gauge `𝒰†(𝒱⊗1)𝒰 + 1⊗H_ph`.
pub fn build_coulomb_corrected(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let u = build_pzw_subspace_unitary(point, photon)?;
    let u = u.matrix();
    let v = kron(&mat2c(&point.potential), &eye(photon.n_fock));
    let h = u.adjoint() * v * u + kron(&eye(2), &photon.hamiltonian_matrix());
    hermitian(2, photon, h)
}

/// Relative size below which the dipole matrix counts as a multiple of the identity.
pub const DEGENERATE_DIPOLE_TOL: f64 = 1e-14;

fn dipole_is_scalar(point: &MatterPoint) -> bool {
    point.xi() <= DEGENERATE_DIPOLE_TOL * point.dipole.abs().max().max(1.0)
}

/// Closed two-level form of the corrected Coulomb gauge:
/// `𝒱 + (ε sinθ − 𝒱₁₀ cosθ)[σ_y⊗sin ξÂ + cosθ σ_x⊗(1 − cos ξÂ) + sinθ σ_z⊗(cos ξÂ − 1)] + H_ph`.
pub fn build_coulomb_analytic(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let n = photon.n_fock;
    let mut h = bare(&mat2c(&point.potential), photon);
    if !dipole_is_scalar(point) {
        let (sx, sy, sz) = pauli();
        let xi = point.xi();
        let a = photon.vector_potential_matrix();
        let sin = spectral_matrix(&a, |x| (xi * x).sin())?;
        let one_minus_cos = spectral_matrix(&a, |x| 1.0 - (xi * x).cos())?;
        let (st, ct) = point.theta().sin_cos();
        let pref = point.epsilon() * st - point.v10() * ct;
        let inner = kron(&sy, &sin) + kron(&sx, &one_minus_cos) * c(ct) - kron(&sz, &one_minus_cos) * c(st);
        h += inner * c(pref);
    }
    debug_assert_eq!(h.nrows(), 2 * n);
    hermitian(2, photon, h)
}

/// Coulomb-gauge Rabi model `v̄ + ε sin(2μ₁₀Â)σ_y + ε cos(2μ₁₀Â)σ_z + H_ph`:
/// the corrected Coulomb gauge of a two-level system with `𝒱₁₀ = 0` and no
/// permanent dipoles.
pub fn build_rabi_coulomb(v_bar: f64, epsilon: f64, mu10: f64, photon: &PhotonSpace) -> Result<HybridOperator> {
    let (_, sy, sz) = pauli();
    let a = photon.vector_potential_matrix();
    let sin = spectral_matrix(&a, |x| (2.0 * mu10 * x).sin())?;
    let cos = spectral_matrix(&a, |x| (2.0 * mu10 * x).cos())?;
    let h = kron(&eye(2), &eye(photon.n_fock)) * c(v_bar)
        + (kron(&sy, &sin) + kron(&sz, &cos)) * c(epsilon)
        + kron(&eye(2), &photon.hamiltonian_matrix());
    hermitian(2, photon, h)
}

/// Closed form of the residual nuclear momentum
/// `P̃ = ½θ′[σ_y⊗(1 − cos ξÂ) + (sinθ σ_z − cosθ σ_x)⊗(sin ξÂ − ξÂ)]`.
pub fn residual_momentum(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let n = photon.n_fock;
    if dipole_is_scalar(point) {
        return Ok(HybridOperator::zeros(space(2, photon)));
    }
    let (sx, sy, sz) = pauli();
    let xi = point.xi();
    let a = photon.vector_potential_matrix();
    let one_minus_cos = spectral_matrix(&a, |x| 1.0 - (xi * x).cos())?;
    let sin_minus_lin = spectral_matrix(&a, |x| (xi * x).sin() - xi * x)?;
    let (st, ct) = point.theta().sin_cos();
    let m = (kron(&sy, &one_minus_cos) + kron(&(sz * c(st) - sx * c(ct)), &sin_minus_lin))
        * c(0.5 * point.theta_derivative());
    debug_assert_eq!(m.nrows(), 2 * n);
    hermitian(2, photon, m)
}

/// `P̃ = −i𝒰†∂_R𝒰 + (∂_Rμ̃)⊗Â`, with `∂_R𝒰` the exact derivative of the
/// matrix exponential along `∂_Rμ̃ ⊗ Â` (all BCH orders at once).
pub fn residual_momentum_numeric(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let a = photon.vector_potential_matrix();
    let g = kron(&mat2c(&point.dipole), &a);
    let dg = kron(&mat2c(&point.dipole_derivative), &a);
    let u = build_pzw_subspace_unitary(point, photon)?;
    let du = expi_hermitian_derivative(&g, &dg, -1.0)?;
    let m = u.matrix().adjoint() * du * (-I) + dg;
    hermitian(2, photon, m)
}

/// Truncated BCH series `Σ_{n=2}^{order} (iⁿ/n!) ad_G^{n−1}(i G′)`, with
/// `G = μ̃⊗Â`. Only useful when `‖G‖` is small.
pub fn residual_momentum_series(point: &MatterPoint, photon: &PhotonSpace, order: usize) -> Result<HybridOperator> {
    let a = photon.vector_potential_matrix();
    let g = kron(&mat2c(&point.dipole), &a);
    let mut x = kron(&mat2c(&point.dipole_derivative), &a) * I;
    let mut sum = CMatrix::zeros(g.nrows(), g.ncols());
    // iⁿ/n!, starting from n = 1
    let mut coeff = I;
    for n in 2..=order {
        x = matrix_commutator(&g, &x);
        coeff = coeff * I / n as f64;
        sum += &x * coeff;
    }
    hermitian(2, photon, sum)
}

/// Shift of the nuclear momentum in the corrected Coulomb gauge,
/// `𝒰†p_R𝒰 − p_R = −(∂_Rμ̃)⊗Â + P̃`. The full Hamiltonian (not used for
/// surfaces) replaces `p_R` by `p_R + shift` in the nuclear kinetic energy.
pub fn momentum_shift(point: &MatterPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let p = residual_momentum_numeric(point, photon)?;
    let lin = kron(&mat2c(&point.dipole_derivative), &photon.vector_potential_matrix());
    hermitian(2, photon, p.into_matrix() - lin)
}

/// Charges and masses entering the minimal-coupling terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimalCoupling {
    pub electron_charge: f64,
    pub electron_mass: f64,
    pub proton_charge: f64,
    pub proton_mass: f64,
    pub include_proton: bool,
}

impl Default for MinimalCoupling {
    fn default() -> Self {
        Self { electron_charge: -1.0, electron_mass: 1.0, proton_charge: 1.0, proton_mass: PROTON_MASS, include_proton: true }
    }
}

/// Naive truncated Coulomb gauge
/// `𝒱⊗1 + 1⊗H_ph + Σ_j [−(z_j/m_j) 𝒫p_j𝒫 ⊗ Â + z_j²/(2m_j) 1⊗Â²]`.
///
/// `𝒫p_e𝒫 = −i⟨α|∂_x|β⟩`; the proton momentum is represented by
/// `−i⟨α|∂_R|β⟩` of the chosen representation.
pub fn build_coulomb_naive_pa(point: &MatterPoint, photon: &PhotonSpace, mc: &MinimalCoupling) -> Result<HybridOperator> {
    let n = photon.n_fock;
    let a = photon.vector_potential_matrix();
    let a2 = &a * &a;
    let mut h = bare(&mat2c(&point.potential), photon);
    let mut particle = |z: f64, m: f64, derivative: &Mat2| {
        let p = mat2c(derivative) * (-I);
        h += kron(&p, &a) * c(-z / m) + kron(&eye(2), &a2) * c(z * z / (2.0 * m));
    };
    particle(mc.electron_charge, mc.electron_mass, &point.momentum);
    if mc.include_proton {
        particle(mc.proton_charge, mc.proton_mass, &point.derivative_coupling);
    }
    debug_assert_eq!(h.nrows(), 2 * n);
    hermitian(2, photon, h)
}

/// Electronic data of a larger adiabatic basis at one proton position, with
/// the first two states rotated into the target two-state representation.
#[derive(Debug, Clone)]
pub struct LargeBasisPoint {
    pub potential: RMatrix,
    pub dipole: RMatrix,
}

impl LargeBasisPoint {
    /// `rotation` maps the two target states onto the two lowest adiabatic states.
    pub fn new(energies: &[f64], dipole: &RMatrix, rotation: &Mat2) -> Result<Self> {
        let n = energies.len();
        if n < 2 || dipole.nrows() != n || dipole.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: dipole.nrows() });
        }
        let mut w = RMatrix::identity(n, n);
        for i in 0..2 {
            for j in 0..2 {
                w[(i, j)] = rotation[(i, j)];
            }
        }
        let e = RMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(energies));
        Ok(Self { potential: w.transpose() * e * &w, dipole: w.transpose() * dipole * &w })
    }

    /// Interpolated from a grid solution (lowest `n_large` states) at `r`.
    pub fn from_solution(sol: &GridSolution, n_large: usize, r: f64, rotation: &Mat2) -> Result<Self> {
        if n_large < 2 || n_large > sol.n_states {
            return Err(Error::InvalidInput(format!(
                "n_large = {n_large} must lie between 2 and the {} solved states",
                sol.n_states
            )));
        }
        if !sol.covers(r) {
            return Err(Error::InvalidInput(format!("R = {r} outside the solved nuclear grid")));
        }
        let w = lagrange_weights(&sol.r_values, r);
        let energies: Vec<f64> =
            (0..n_large).map(|a| w.iter().map(|&(k, c)| c * sol.energies[k][a]).sum()).collect();
        let dipole = w.iter().fold(RMatrix::zeros(n_large, n_large), |acc, &(k, c)| {
            acc + GridSolution::block(&sol.dipole[k], n_large) * c
        });
        Self::new(&energies, &dipole, rotation)
    }

    pub fn n_large(&self) -> usize {
        self.potential.nrows()
    }
}

/// Rotation of the target states at `r`, interpolated from the subspace table.
pub fn rotation_at(sub: &MatterSubspace, r: f64) -> Mat2 {
    if sub.n_r() == 1 {
        return sub.rotation[0];
    }
    lagrange_weights(&sub.r_values, r).iter().fold(Mat2::zeros(), |acc, &(k, c)| acc + sub.rotation[k] * c)
}

/// Naive Coulomb gauge obtained by projecting the large-basis conjugated
/// Hamiltonian, `𝒫Û†(H_el⊗1)Û𝒫 + 1⊗H_ph` with `Û = exp(−i μ̂⊗Â)` in the
/// large basis. With two large-basis states this is exactly ℋ_C.
pub fn build_coulomb_naive_projected(large: &LargeBasisPoint, photon: &PhotonSpace) -> Result<HybridOperator> {
    let nf = photon.n_fock;
    let u = expi_kron(&complexify(&large.dipole), &photon.vector_potential_matrix(), -1.0)?;
    let cols = u.leading_columns(2);
    let hv = kron_identity_mul(&complexify(&large.potential), nf, &cols);
    let h = cols.adjoint() * hv + kron(&eye(2), &photon.hamiltonian_matrix());
    hermitian(2, photon, h)
}

/// Everything a builder may need besides the photon mode.
#[derive(Debug, Clone, Copy)]
pub struct GaugeInputs<'a> {
    pub subspace: &'a MatterSubspace,
    /// Required for [`Gauge::CoulombNaiveProjected`].
    pub large: Option<&'a GridSolution>,
    pub n_large: usize,
    pub minimal_coupling: MinimalCoupling,
}

impl<'a> GaugeInputs<'a> {
    pub fn new(subspace: &'a MatterSubspace) -> Self {
        Self { subspace, large: None, n_large: DEFAULT_N_LARGE, minimal_coupling: MinimalCoupling::default() }
    }

    pub fn with_large(mut self, sol: &'a GridSolution, n_large: usize) -> Self {
        self.large = Some(sol);
        self.n_large = n_large;
        self
    }
}

pub const DEFAULT_N_LARGE: usize = 12;

/// Largest accepted eigenvalue change when the large basis grows by four states.
pub const LARGE_BASIS_TOL: f64 = 1e-4;

/// A built Hamiltonian with its provenance.
#[derive(Debug, Clone)]
pub struct GaugeBuild {
    pub gauge: Gauge,
    pub r: f64,
    pub photon: PhotonSpace,
    pub operator: HybridOperator,
}

pub fn build(gauge: Gauge, inputs: &GaugeInputs, photon: &PhotonSpace, r: f64) -> Result<GaugeBuild> {
    let operator = build_operator(gauge, inputs, photon, r, inputs.n_large)?;
    Ok(GaugeBuild { gauge, r, photon: *photon, operator })
}

fn build_operator(gauge: Gauge, inputs: &GaugeInputs, photon: &PhotonSpace, r: f64, n_large: usize) -> Result<HybridOperator> {
    if gauge == Gauge::CoulombNaiveProjected {
        let sol = inputs.large.ok_or_else(|| {
            Error::InvalidInput("coulomb-naive-projected needs a grid solution for the large basis".into())
        })?;
        let large = LargeBasisPoint::from_solution(sol, n_large, r, &rotation_at(inputs.subspace, r))?;
        return build_coulomb_naive_projected(&large, photon);
    }
    let point = inputs.subspace.point(r)?;
    match gauge {
        Gauge::Dipole => build_dipole(&point, photon),
        Gauge::CoulombCorrected => build_coulomb_corrected(&point, photon),
        Gauge::CoulombCorrectedAnalytic => build_coulomb_analytic(&point, photon),
        Gauge::CoulombNaivePa => build_coulomb_naive_pa(&point, photon, &inputs.minimal_coupling),
        Gauge::CoulombNaiveProjected => unreachable!(),
    }
}

/// Lowest `k` eigenvalues, ascending.
pub fn lowest_eigenvalues(h: &HybridOperator, k: usize) -> Result<Vec<f64>> {
    let mut ev = hermitian_eigenvalues(h.matrix())?;
    ev.truncate(k);
    Ok(ev)
}

pub fn spectrum(gauge: Gauge, inputs: &GaugeInputs, photon: &PhotonSpace, r: f64, k: usize) -> Result<Vec<f64>> {
    lowest_eigenvalues(&build_operator(gauge, inputs, photon, r, inputs.n_large)?, k)
}

/// Largest eigenvalue change (lowest `k`) when the large basis grows from
/// `n_large` to `n_large + 4` states.
pub fn large_basis_shift(inputs: &GaugeInputs, photon: &PhotonSpace, r: f64, k: usize) -> Result<f64> {
    let sol = inputs.large.ok_or_else(|| Error::InvalidInput("large-basis check needs a grid solution".into()))?;
    let bigger = inputs.n_large + 4;
    if bigger > sol.n_states {
        return Err(Error::InvalidInput(format!(
            "large-basis convergence check needs {bigger} solved states, have {}",
            sol.n_states
        )));
    }
    let a = lowest_eigenvalues(&build_operator(Gauge::CoulombNaiveProjected, inputs, photon, r, inputs.n_large)?, k)?;
    let b = lowest_eigenvalues(&build_operator(Gauge::CoulombNaiveProjected, inputs, photon, r, bigger)?, k)?;
    Ok(max_abs_difference(&a, &b))
}

pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `{E_α + ω(n + ½)}` sorted, lowest `k`: the spectrum without coupling.
pub fn decoupled_spectrum(matter_energies: &[f64], photon: &PhotonSpace, k: usize) -> Vec<f64> {
    let mut all: Vec<f64> = matter_energies
        .iter()
        .flat_map(|&e| (0..photon.n_fock).map(move |n| e + photon.omega_c * (n as f64 + 0.5)))
        .collect();
    all.sort_by(f64::total_cmp);
    all.truncate(k);
    all
}
