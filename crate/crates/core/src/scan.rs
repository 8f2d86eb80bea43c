//! Polariton spectra over proton position and coupling strength, with Fock
//! (and large-basis) convergence records and gauge-discrepancy tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{large_basis_shift, max_abs_difference, spectrum, Gauge, GaugeInputs, LARGE_BASIS_TOL};
use crate::photon::PhotonSpace;
use crate::units::HARTREE_EV;

/// Largest eigenvalue change under Fock-space doubling for a converged point.
pub const FOCK_TOL: f64 = 1e-8;

pub const DEFAULT_N_EIGS: usize = 10;

/// Fock dimension used when none is configured.
pub fn default_n_fock(a0: f64) -> usize {
    if a0 <= 0.2 {
        40
    } else {
        60
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceSubtraction {
    #[default]
    None,
    /// Report `ℰ_k − ℰ_0`.
    GroundState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    Pes,
    Coupling,
}

impl ScanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanKind::Pes => "pes",
            ScanKind::Coupling => "coupling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub gauges: Vec<Gauge>,
    pub r_values: Vec<f64>,
    pub a0_values: Vec<f64>,
    /// Cavity frequency in hartree.
    pub omega_c: f64,
    /// Fock dimension; `None` picks [`default_n_fock`] per coupling strength.
    pub n_fock: Option<usize>,
    pub n_eigs: usize,
    pub reference_subtraction: ReferenceSubtraction,
    /// Diagonalize again at twice the Fock dimension to record the shift.
    pub check_fock: bool,
}

impl ScanConfig {
    pub fn n_fock_for(&self, a0: f64) -> usize {
        self.n_fock.unwrap_or_else(|| default_n_fock(a0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.gauges.is_empty() {
            return bad("at least one gauge is required".into());
        }
        if self.a0_values.is_empty() {
            return bad("scan needs at least one A0 value".into());
        }
        if let Some(a) = self.a0_values.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return bad(format!("A0 values must be non-negative, got {a}"));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return bad(format!("omega_c must be positive, got {}", self.omega_c));
        }
        if self.n_eigs == 0 {
            return bad("n_eigs must be positive".into());
        }
        for &a0 in &self.a0_values {
            let nf = self.n_fock_for(a0);
            if nf < 2 {
                return bad(format!("n_fock must be at least 2, got {nf}"));
            }
            if self.n_eigs > 2 * nf {
                return bad(format!("n_eigs = {} exceeds 2·n_fock = {}", self.n_eigs, 2 * nf));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub gauge: Gauge,
    pub r_index: usize,
    pub a0_index: usize,
    #[serde(rename = "R_au")]
    pub r: f64,
    #[serde(rename = "A0_au")]
    pub a0: f64,
    pub n_fock: usize,
    /// Ascending eigenvalues (hartree), before any reference subtraction.
    pub energies: Vec<f64>,
    /// Largest eigenvalue change at twice the Fock dimension (`None` if not checked).
    pub fock_shift: Option<f64>,
    /// Largest eigenvalue change when the large basis grows by four states.
    pub large_basis_shift: Option<f64>,
}

impl ScanPoint {
    pub fn converged(&self) -> bool {
        self.fock_shift.is_none_or(|s| s < FOCK_TOL) && self.large_basis_shift.is_none_or(|s| s <= LARGE_BASIS_TOL)
    }

    pub fn reported(&self, reference: ReferenceSubtraction) -> Vec<f64> {
        match reference {
            ReferenceSubtraction::None => self.energies.clone(),
            ReferenceSubtraction::GroundState => self.energies.iter().map(|e| e - self.energies[0]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub kind: ScanKind,
    pub reference_subtraction: ReferenceSubtraction,
    pub omega_c: f64,
    pub n_eigs: usize,
    pub gauges: Vec<Gauge>,
    #[serde(rename = "R_values_au")]
    pub r_values: Vec<f64>,
    #[serde(rename = "A0_values_au")]
    pub a0_values: Vec<f64>,
    /// Ordered by gauge (as configured), then R index, then A₀ index.
    pub points: Vec<ScanPoint>,
}

/// One row of a discrepancy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    #[serde(rename = "R_au")]
    pub r: f64,
    #[serde(rename = "A0_au")]
    pub a0: f64,
    /// `max_k |ℰ_k − ℰ′_k|` over the reported eigenvalues (hartree).
    pub max_abs: f64,
}

impl ScanResult {
    pub fn points_for(&self, gauge: Gauge) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(move |p| p.gauge == gauge)
    }

    pub fn point(&self, gauge: Gauge, r_index: usize, a0_index: usize) -> Option<&ScanPoint> {
        self.points.iter().find(|p| p.gauge == gauge && p.r_index == r_index && p.a0_index == a0_index)
    }

    pub fn all_failed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| !p.converged())
    }

    /// Per-point `max_k |ℰ_k(a) − ℰ_k(b)|` of the reported eigenvalues.
    pub fn gauge_discrepancy(&self, a: Gauge, b: Gauge) -> Result<Vec<Discrepancy>> {
        for g in [a, b] {
            if !self.gauges.contains(&g) {
                return Err(Error::MissingGauge(g.to_string()));
            }
        }
        Ok(self
            .points_for(a)
            .map(|pa| {
                let pb = self.point(b, pa.r_index, pa.a0_index).expect("every gauge covers every point");
                let ea = pa.reported(self.reference_subtraction);
                let eb = pb.reported(self.reference_subtraction);
                Discrepancy { r: pa.r, a0: pa.a0, max_abs: max_abs_difference(&ea, &eb) }
            })
            .collect())
    }

    /// RFC 4180 CSV for one gauge, energies with `precision` significant digits.
    pub fn to_csv(&self, gauge: Gauge, precision: usize) -> Result<String> {
        if !self.gauges.contains(&gauge) {
            return Err(Error::MissingGauge(gauge.to_string()));
        }
        let digits = precision.max(1) - 1;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["gauge", "R_au", "A0_au", "k", "E_au", "E_eV", "converged"]).map_err(csv_err)?;
        for p in self.points_for(gauge) {
            for (k, e) in p.reported(self.reference_subtraction).iter().enumerate() {
                w.write_record([
                    gauge.as_str().to_string(),
                    format!("{:.*e}", digits, p.r),
                    format!("{:.*e}", digits, p.a0),
                    k.to_string(),
                    format!("{:.*e}", digits, e),
                    format!("{:.*e}", digits, e * HARTREE_EV),
                    p.converged().to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
    }

    pub fn csv_file_name(&self, gauge: Gauge) -> String {
        format!("{}_{}.csv", gauge.as_str(), self.kind.as_str())
    }

    /// Nested JSON document with full binary64 precision.
    pub fn to_json(&self) -> serde_json::Value {
        let gauges: serde_json::Map<String, serde_json::Value> = self
            .gauges
            .iter()
            .map(|&g| {
                let pts: Vec<serde_json::Value> = self
                    .points_for(g)
                    .map(|p| {
                        let e = p.reported(self.reference_subtraction);
                        serde_json::json!({
                            "R_au": p.r,
                            "A0_au": p.a0,
                            "n_fock": p.n_fock,
                            "fock_shift_au": p.fock_shift,
                            "large_basis_shift_au": p.large_basis_shift,
                            "converged": p.converged(),
                            "E_au": e,
                            "E_eV": e.iter().map(|x| x * HARTREE_EV).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                (g.as_str().to_string(), serde_json::Value::Array(pts))
            })
            .collect();
        serde_json::json!({
            "scan": self.kind.as_str(),
            "omega_c_au": self.omega_c,
            "n_eigs": self.n_eigs,
            "reference_subtraction": self.reference_subtraction,
            "R_values_au": self.r_values,
            "A0_values_au": self.a0_values,
            "gauges": gauges,
        })
    }
}

fn run_scan(kind: ScanKind, config: &ScanConfig, inputs: &GaugeInputs, r_values: &[f64]) -> Result<ScanResult> {
    config.validate()?;
    if r_values.is_empty() {
        return Err(Error::InvalidInput("scan needs at least one R value".into()));
    }
    for &r in r_values {
        if !inputs.subspace.covers(r) {
            return Err(Error::InvalidInput(format!("R = {r} is outside the matter data range")));
        }
    }
    let mut points = Vec::with_capacity(config.gauges.len() * r_values.len() * config.a0_values.len());
    for &gauge in &config.gauges {
        for (ri, &r) in r_values.iter().enumerate() {
            for (ai, &a0) in config.a0_values.iter().enumerate() {
                let n_fock = config.n_fock_for(a0);
                let photon = PhotonSpace::new(n_fock, config.omega_c, a0)?;
                let energies = spectrum(gauge, inputs, &photon, r, config.n_eigs)?;
                let fock_shift = if config.check_fock {
                    let doubled = photon.with_n_fock(2 * n_fock)?;
                    Some(max_abs_difference(&energies, &spectrum(gauge, inputs, &doubled, r, config.n_eigs)?))
                } else {
                    None
                };
                let large_basis_shift = if gauge.needs_large_basis() {
                    Some(large_basis_shift(inputs, &photon, r, config.n_eigs)?)
                } else {
                    None
                };
                points.push(ScanPoint { gauge, r_index: ri, a0_index: ai, r, a0, n_fock, energies, fock_shift, large_basis_shift });
            }
        }
    }
    Ok(ScanResult {
        kind,
        reference_subtraction: config.reference_subtraction,
        omega_c: config.omega_c,
        n_eigs: config.n_eigs,
        gauges: config.gauges.clone(),
        r_values: r_values.to_vec(),
        a0_values: config.a0_values.clone(),
        points,
    })
}

/// Spectra over `config.r_values` for every configured gauge and coupling.
pub fn scan_pes(config: &ScanConfig, inputs: &GaugeInputs) -> Result<ScanResult> {
    run_scan(ScanKind::Pes, config, inputs, &config.r_values)
}

/// Spectra over `config.a0_values` at the single proton position `r_fixed`.
pub fn scan_coupling(config: &ScanConfig, inputs: &GaugeInputs, r_fixed: f64) -> Result<ScanResult> {
    run_scan(ScanKind::Coupling, config, inputs, &[r_fixed])
}
