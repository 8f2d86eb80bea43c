//! Shin–Metiu model parameters and the electron–nuclear potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Charges of the fixed ions, the mobile proton and the electron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Charges {
    pub ion: f64,
    pub proton: f64,
    pub electron: f64,
}

impl Default for Charges {
    fn default() -> Self {
        Self { ion: 1.0, proton: 1.0, electron: -1.0 }
    }
}

/// Accuracy order of the central-difference kinetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FdOrder {
    Second,
    Fourth,
}

impl TryFrom<u8> for FdOrder {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            _ => Err(format!("fd_order must be 2 or 4, got {v}")),
        }
    }
}

impl From<FdOrder> for u8 {
    fn from(o: FdOrder) -> u8 {
        match o {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

impl FdOrder {
    pub fn half_bandwidth(self) -> usize {
        match self {
            FdOrder::Second => 1,
            FdOrder::Fourth => 2,
        }
    }
}

/// Uniform electronic grid; the wavefunction vanishes one spacing beyond either end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectronGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub fd_order: FdOrder,
}

impl Default for ElectronGrid {
    fn default() -> Self {
        Self { x_min: -20.0, x_max: 20.0, n_points: 2048, fd_order: FdOrder::Second }
    }
}

impl ElectronGrid {
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points).map(|i| self.x_min + dx * i as f64).collect()
    }

    /// Half the spacing with the walls kept in place; contains every point of `self`.
    pub fn refined(&self) -> Self {
        let h = 0.5 * self.spacing();
        Self { x_min: self.x_min - h, x_max: self.x_max + h, n_points: 2 * self.n_points + 1, ..*self }
    }
}

/// Uniform grid of proton positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NuclearScan {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
}

impl Default for NuclearScan {
    fn default() -> Self {
        Self { r_min: -3.0, r_max: 3.0, n_r: 121 }
    }
}

impl NuclearScan {
    pub fn points(&self) -> Vec<f64> {
        if self.n_r == 1 {
            return vec![self.r_min];
        }
        let h = (self.r_max - self.r_min) / (self.n_r - 1) as f64;
        (0..self.n_r).map(|k| self.r_min + h * k as f64).collect()
    }
}

/// Replaces the Shin–Metiu potential by an analytic test potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialOverride {
    /// `½ ω² (x − center)²`, independent of R.
    Harmonic { omega: f64, center: f64 },
    /// Zero potential: a particle in the box formed by the grid walls.
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShinMetiuParams {
    /// Separation of the two fixed ions (at ±L/2).
    #[serde(rename = "L")]
    pub l: f64,
    /// Screening length of the proton–electron interaction.
    #[serde(rename = "Rc")]
    pub rc: f64,
    /// Screening length of the left fixed ion–electron interaction.
    #[serde(rename = "Rl")]
    pub rl: f64,
    /// Screening length of the right fixed ion–electron interaction.
    #[serde(rename = "Rr")]
    pub rr: f64,
    pub charges: Charges,
    pub grid: ElectronGrid,
    pub r_scan: NuclearScan,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_override: Option<PotentialOverride>,
}

impl Default for ShinMetiuParams {
    // Rl = Rr tuned so that E1 − E0 = 3 eV at R = 0 on the default grid.
    fn default() -> Self {
        Self {
            l: 10.0,
            rc: 2.5,
            rl: DEFAULT_FIXED_ION_SCREENING,
            rr: DEFAULT_FIXED_ION_SCREENING,
            charges: Charges::default(),
            grid: ElectronGrid::default(),
            r_scan: NuclearScan::default(),
            potential_override: None,
        }
    }
}

pub const DEFAULT_FIXED_ION_SCREENING: f64 = 2.820552;

/// `erf(r/s)/r`, continued to `2/(s√π)` at the origin.
fn screened_coulomb(r: f64, s: f64) -> f64 {
    let u = r / s;
    if u < 1e-4 {
        std::f64::consts::FRAC_2_SQRT_PI / s * (1.0 - u * u / 3.0)
    } else {
        libm::erf(u) / r
    }
}

/// `d/dr [erf(r/s)/r]`, vanishing linearly at the origin.
fn screened_coulomb_derivative(r: f64, s: f64) -> f64 {
    let u = r / s;
    if u < 1e-3 {
        -2.0 * std::f64::consts::FRAC_2_SQRT_PI * r / (3.0 * s * s * s) * (1.0 - 0.6 * u * u)
    } else {
        std::f64::consts::FRAC_2_SQRT_PI * (-u * u).exp() / (s * r) - libm::erf(u) / (r * r)
    }
}

impl ShinMetiuParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        let g = &self.grid;
        if g.n_points < 128 {
            return bad(format!("grid.n_points must be at least 128, got {}", g.n_points));
        }
        if !(g.x_max > g.x_min) {
            return bad("grid.x_max must exceed grid.x_min".into());
        }
        if self.potential_override.is_none() {
            if !(self.l > 0.0) {
                return bad(format!("L must be positive, got {}", self.l));
            }
            if g.x_min > -self.l || g.x_max < self.l {
                return bad(format!(
                    "electron grid [{}, {}] must span at least [-L, L] = [{}, {}]",
                    g.x_min, g.x_max, -self.l, self.l
                ));
            }
            for (name, s) in [("Rc", self.rc), ("Rl", self.rl), ("Rr", self.rr)] {
                if !(s > 0.0) {
                    return bad(format!("{name} must be positive, got {s}"));
                }
            }
        }
        let s = &self.r_scan;
        if s.n_r == 0 || !(s.r_max >= s.r_min) || (s.n_r > 1 && s.r_max == s.r_min) {
            return bad("r_scan must have n_r >= 1 and r_max > r_min".into());
        }
        if self.potential_override.is_none() {
            let half = 0.5 * self.l;
            if s.r_min <= -half || s.r_max >= half {
                return bad(format!("proton positions must lie strictly between the fixed ions at ±{half}"));
            }
        }
        Ok(())
    }

    /// Total potential energy felt by the electron at `x` with the proton at `r`,
    /// including the R-only nuclear repulsion.
    pub fn potential(&self, x: f64, r: f64) -> f64 {
        match self.potential_override {
            Some(PotentialOverride::Harmonic { omega, center }) => 0.5 * omega * omega * (x - center).powi(2),
            Some(PotentialOverride::Box) => 0.0,
            None => {
                let q = &self.charges;
                let half = 0.5 * self.l;
                q.ion * q.proton * (1.0 / (half - r).abs() + 1.0 / (half + r).abs())
                    + q.electron * q.proton * screened_coulomb((x - r).abs(), self.rc)
                    + q.electron
                        * q.ion
                        * (screened_coulomb((x - half).abs(), self.rr)
                            + screened_coulomb((x + half).abs(), self.rl))
            }
        }
    }

    /// `∂V/∂R` at fixed electron position.
    pub fn potential_r_derivative(&self, x: f64, r: f64) -> f64 {
        if self.potential_override.is_some() {
            return 0.0;
        }
        let q = &self.charges;
        let half = 0.5 * self.l;
        let nuclear = q.ion * q.proton * (1.0 / (half - r).powi(2) - 1.0 / (half + r).powi(2));
        let d = x - r;
        nuclear - q.electron * q.proton * d.signum() * screened_coulomb_derivative(d.abs(), self.rc)
    }

    /// Dipole operator value `z_e x + z_p R` (fixed-ion constants dropped).
    pub fn dipole(&self, x: f64, r: f64) -> f64 {
        self.charges.electron * x + self.charges.proton * r
    }
}
