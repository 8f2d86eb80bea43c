//! Run configuration: one JSON document, every key optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use polaritonic::gauge::{Gauge, DEFAULT_N_LARGE};
use polaritonic::matter::{Mat2, MatterSubspace, Representation, ShinMetiuParams};
use polaritonic::scan::{ReferenceSubtraction, ScanConfig, DEFAULT_N_EIGS};
use polaritonic::units::ev_to_hartree;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub photon: PhotonConfig,
    pub scan: ScanSettings,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    /// Shin–Metiu model on a real-space grid.
    Grid(GridModel),
    /// Explicit two-level matrices, tabulated over R or constant.
    TwoLevel(TwoLevelModel),
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Grid(GridModel::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridModel {
    pub params: ShinMetiuParams,
    /// Adiabatic states solved per R (the projected naive route uses up to `n_large + 4`).
    pub n_states: usize,
    pub representation: Representation,
}

impl Default for GridModel {
    fn default() -> Self {
        Self { params: ShinMetiuParams::default(), n_states: 16, representation: Representation::StrictDiabatic }
    }
}

/// 2×2 matrix as nested rows.
pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixTable {
    Constant(Matrix2),
    Table(Vec<Matrix2>),
}

impl MatrixTable {
    fn to_mats(&self) -> Vec<Mat2> {
        let conv = |m: &Matrix2| Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
        match self {
            MatrixTable::Constant(m) => vec![conv(m)],
            MatrixTable::Table(v) => v.iter().map(conv).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelModel {
    /// Proton positions of the table rows; omitted for constant matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<f64>>,
    pub potential: MatrixTable,
    pub dipole: MatrixTable,
    /// Electronic `⟨α|∂_x|β⟩`; defaults to the commutator `[𝒱, μ̃]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<MatrixTable>,
}

impl TwoLevelModel {
    pub fn subspace(&self) -> Result<MatterSubspace, CliError> {
        let potential = self.potential.to_mats();
        let dipole = self.dipole.to_mats();
        let r = match &self.r_values {
            Some(r) => r.clone(),
            None if potential.len() == 1 && dipole.len() == 1 => vec![0.0],
            None => return Err(CliError::Config("two_level tables need `r_values`".into())),
        };
        let momentum = self.momentum.as_ref().map(MatrixTable::to_mats);
        Ok(MatterSubspace::literal(r, potential, dipole, momentum)?)
    }
}

pub const DEFAULT_A0: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhotonConfig {
    pub omega_c_ev: f64,
    /// Single coupling strength; with neither this nor `a0_list`, [`DEFAULT_A0`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0_list: Option<Vec<f64>>,
    /// Fock dimension; omitted picks 40 up to A0 = 0.2 and 60 beyond.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_fock: Option<usize>,
}

impl Default for PhotonConfig {
    fn default() -> Self {
        Self { omega_c_ev: 3.0, a0: None, a0_list: None, n_fock: None }
    }
}

impl PhotonConfig {
    pub fn a0_values(&self) -> Vec<f64> {
        match (&self.a0_list, self.a0) {
            (Some(list), _) => list.clone(),
            (None, Some(a)) => vec![a],
            (None, None) => vec![DEFAULT_A0],
        }
    }

    pub fn omega_c(&self) -> f64 {
        ev_to_hartree(self.omega_c_ev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    pub gauges: Vec<Gauge>,
    /// Proton positions of a PES scan; omitted uses the model's R grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<f64>>,
    /// Proton position of a coupling scan.
    pub r_fixed: f64,
    pub n_eigs: usize,
    pub reference_subtraction: ReferenceSubtraction,
    /// Repeat each point at twice the Fock dimension and record the shift.
    pub check_fock: bool,
    /// Large-basis size of the projected naive route.
    pub n_large: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            gauges: vec![Gauge::Dipole, Gauge::CoulombCorrected, Gauge::CoulombNaivePa],
            r_values: None,
            r_fixed: 0.0,
            n_eigs: DEFAULT_N_EIGS,
            reference_subtraction: ReferenceSubtraction::None,
            check_fock: true,
            n_large: DEFAULT_N_LARGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    /// Significant digits in CSV output.
    pub precision: usize,
    /// Grid-solution cache; omitted uses `<directory>/cache`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_directory: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json], precision: 12, cache_directory: None }
    }
}

impl OutputConfig {
    pub fn cache_dir(&self) -> PathBuf {
        self.cache_directory.clone().unwrap_or_else(|| self.directory.join("cache"))
    }
}

/// Command-line values that replace config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub n_fock: Option<usize>,
    pub a0: Option<Vec<f64>>,
    pub omega_ev: Option<f64>,
    pub gauges: Option<Vec<Gauge>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(d) = &o.out_dir {
            self.output.directory = d.clone();
        }
        if let Some(n) = o.n_fock {
            self.photon.n_fock = Some(n);
        }
        if let Some(a) = &o.a0 {
            if a.len() == 1 {
                self.photon.a0 = Some(a[0]);
                self.photon.a0_list = None;
            } else {
                self.photon.a0 = None;
                self.photon.a0_list = Some(a.clone());
            }
        }
        if let Some(w) = o.omega_ev {
            self.photon.omega_c_ev = w;
        }
        if let Some(g) = &o.gauges {
            self.scan.gauges = g.clone();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let p = &self.photon;
        if !(p.omega_c_ev > 0.0 && p.omega_c_ev.is_finite()) {
            return bad(format!("photon.omega_c_ev must be positive, got {}", p.omega_c_ev));
        }
        if p.a0.is_some() && p.a0_list.is_some() {
            return bad("give either photon.a0 or photon.a0_list, not both".into());
        }
        if p.a0_list.as_ref().is_some_and(Vec::is_empty) {
            return bad("photon.a0_list is empty".into());
        }
        if !(1..=17).contains(&self.output.precision) {
            return bad(format!("output.precision must be between 1 and 17, got {}", self.output.precision));
        }
        if self.output.formats.is_empty() {
            return bad("output.formats is empty".into());
        }
        if let ModelConfig::Grid(g) = &self.model {
            g.params.validate()?;
            if g.n_states < 2 {
                return bad(format!("model.n_states must be at least 2, got {}", g.n_states));
            }
            if self.scan.gauges.contains(&Gauge::CoulombNaiveProjected) && g.n_states < self.scan.n_large + 4 {
                return bad(format!(
                    "coulomb-naive-projected with n_large = {} needs model.n_states ≥ {}",
                    self.scan.n_large,
                    self.scan.n_large + 4
                ));
            }
        } else if self.scan.gauges.contains(&Gauge::CoulombNaiveProjected) {
            return bad("coulomb-naive-projected needs a grid model".into());
        }
        self.scan_config(vec![self.scan.r_fixed]).validate()?;
        Ok(())
    }

    pub fn scan_config(&self, r_values: Vec<f64>) -> ScanConfig {
        ScanConfig {
            gauges: self.scan.gauges.clone(),
            r_values,
            a0_values: self.photon.a0_values(),
            omega_c: self.photon.omega_c(),
            n_fock: self.photon.n_fock,
            n_eigs: self.scan.n_eigs,
            reference_subtraction: self.scan.reference_subtraction,
            check_fock: self.scan.check_fock,
        }
    }
}
