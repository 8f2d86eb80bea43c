//! Built-in self-checks of a configured model, with pinned tolerances.

use std::fmt::Write as _;

use polaritonic::gauge::{
    build_coulomb_analytic, build_coulomb_corrected, build_dipole_with, build_rabi_coulomb, decoupled_spectrum,
    lowest_eigenvalues, max_abs_difference, residual_momentum, spectrum, Gauge,
};
use polaritonic::linalg::max_abs;
use polaritonic::matter::subspace::symmetric_eigenvalues;
use polaritonic::matter::{leakage_at, mulliken_hush, solve_adiabatic, trk_sum, Mat2, MatterPoint, NuclearScan, ShinMetiuParams};
use polaritonic::photon::PhotonSpace;
use polaritonic::scan::{default_n_fock, FOCK_TOL};

use crate::config::{ModelConfig, RunConfig};
use crate::error::CliError;
use crate::model::MatterData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Drop the dipole self-energy term from the dipole-gauge Hamiltonian.
    SkipSelfEnergy,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "skip-self-energy" => Ok(Fault::SkipSelfEnergy),
            other => Err(format!("unknown fault `{other}` (known: skip-self-energy)")),
        }
    }
}

pub const EQUIVALENCE_REL: f64 = 1e-8;
pub const EQUIVALENCE_ABS: f64 = 1e-10;
pub const ANALYTIC_TOL: f64 = 1e-10;
pub const RABI_TOL: f64 = 1e-12;
pub const RESIDUAL_MOMENTUM_TOL: f64 = 1e-12;
pub const DECOUPLING_TOL: f64 = 1e-10;
pub const TRK_TOL: f64 = 0.02;
pub const TRK_STATES: usize = 60;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: String,
    pub pass: bool,
    pub note: String,
}

impl Check {
    fn below(name: &'static str, value: f64, tol: f64, note: String) -> Self {
        Self { name, value, tolerance: format!("< {tol:.0e}"), pass: value.is_finite() && value <= tol, note }
    }
}

pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{:<26} {:>12} {:>12}  {:<4}  {}\n", "check", "value", "tolerance", "", "detail");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<26} {:>12.3e} {:>12}  {:<4}  {}",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" },
                c.note
            );
        }
        out
    }
}

/// Up to `count` evenly spaced node indices.
fn sample_nodes(n: usize, count: usize) -> Vec<usize> {
    if n <= count {
        return (0..n).collect();
    }
    (0..count).map(|i| i * (n - 1) / (count - 1)).collect()
}

pub fn run(cfg: &RunConfig, fault: Option<Fault>) -> Result<Report, CliError> {
    let data = MatterData::prepare(cfg)?;
    let sub = &data.subspace;
    let inputs = data.inputs();
    let omega = cfg.photon.omega_c();
    let a0 = cfg.photon.a0_values().into_iter().fold(0.0, f64::max);
    let a0 = if a0 > 0.0 { a0 } else { 0.2 };
    let n_fock = cfg.photon.n_fock.unwrap_or_else(|| default_n_fock(a0));
    let photon = PhotonSpace::new(n_fock, omega, a0)?;
    let k = cfg.scan.n_eigs;
    let nodes = sample_nodes(sub.n_r(), 7);
    let mut checks = Vec::new();

    // dipole vs corrected Coulomb spectra
    let mut worst = 0.0_f64;
    for &i in &nodes {
        let point = sub.node(i);
        let d = lowest_eigenvalues(&build_dipole_with(&point, &photon, fault != Some(Fault::SkipSelfEnergy))?, k)?;
        let c = lowest_eigenvalues(&build_coulomb_corrected(&point, &photon)?, k)?;
        for (x, y) in d.iter().zip(&c) {
            worst = worst.max((x - y).abs() / EQUIVALENCE_ABS.max(EQUIVALENCE_REL * x.abs().max(y.abs())));
        }
    }
    checks.push(Check {
        name: "unitary-equivalence",
        value: worst,
        tolerance: "<= 1".into(),
        pass: worst <= 1.0,
        note: format!("max |E_D - E_C| / max(1e-10, 1e-8|E|), {} R, A0={a0}, n_fock={n_fock}", nodes.len()),
    });

    let mut worst = 0.0_f64;
    for &i in &nodes {
        let point = sub.node(i);
        worst = worst.max(build_coulomb_analytic(&point, &photon)?.max_abs_diff(&build_coulomb_corrected(&point, &photon)?));
    }
    checks.push(Check::below("analytic-vs-exponential", worst, ANALYTIC_TOL, "max |H_analytic - H_C| elementwise".into()));

    // Rabi limit from each sampled node's diagonal potential and transition dipole
    let mut worst = 0.0_f64;
    for &i in &nodes {
        let p = sub.node(i);
        let point = MatterPoint::constant(
            Mat2::new(p.v_bar() + p.epsilon(), 0.0, 0.0, p.v_bar() - p.epsilon()),
            Mat2::new(0.0, p.mu10(), p.mu10(), 0.0),
        );
        let rabi = build_rabi_coulomb(p.v_bar(), p.epsilon(), p.mu10(), &photon)?;
        worst = worst.max(rabi.max_abs_diff(&build_coulomb_corrected(&point, &photon)?));
        worst = worst.max(rabi.max_abs_diff(&build_coulomb_analytic(&point, &photon)?));
    }
    checks.push(Check::below("rabi-limit", worst, RABI_TOL, "cos/sin form vs both Coulomb routes".into()));

    let mh = mulliken_hush(sub);
    let mut worst = 0.0_f64;
    for &i in &nodes {
        worst = worst.max(max_abs(residual_momentum(&mh.subspace.node(i), &photon)?.matrix()));
    }
    checks.push(Check::below(
        "residual-momentum-mh",
        worst,
        RESIDUAL_MOMENTUM_TOL,
        format!("{} degenerate-dipole node(s) skipped by the rotation", mh.degenerate_nodes.len()),
    ));

    let free = photon.with_a0(0.0)?;
    let mut gauges = vec![Gauge::Dipole, Gauge::CoulombCorrected, Gauge::CoulombCorrectedAnalytic];
    for g in &cfg.scan.gauges {
        if !gauges.contains(g) {
            gauges.push(*g);
        }
    }
    let mut worst = 0.0_f64;
    for &i in &nodes {
        let r = sub.r_values[i];
        let expected = decoupled_spectrum(&symmetric_eigenvalues(&sub.potential[i]), &free, k);
        for &g in &gauges {
            worst = worst.max(max_abs_difference(&spectrum(g, &inputs, &free, r, k)?, &expected));
        }
    }
    checks.push(Check::below("decoupling", worst, DECOUPLING_TOL, format!("A0=0, {} gauges", gauges.len())));

    let mut worst = 0.0_f64;
    let doubled = photon.with_n_fock(2 * n_fock)?;
    for &i in &nodes {
        let r = sub.r_values[i];
        for g in [Gauge::Dipole, Gauge::CoulombCorrected] {
            worst = worst.max(max_abs_difference(&spectrum(g, &inputs, &photon, r, k)?, &spectrum(g, &inputs, &doubled, r, k)?));
        }
    }
    checks.push(Check::below("fock-doubling", worst, FOCK_TOL, format!("n_fock {n_fock} -> {}", 2 * n_fock)));

    if let ModelConfig::Grid(g) = &cfg.model {
        let sol = data.solution.as_ref().expect("grid model has a solution");
        let k0 = sol.nearest_index(0.0);
        let single = leakage_at(sol, k0, 1, 1);
        let values: Vec<f64> = (2..=sol.n_states).map(|n| leakage_at(sol, k0, 2, n)).collect();
        let monotone = values.windows(2).all(|w| w[1] <= w[0]);
        checks.push(Check {
            name: "leakage",
            value: single,
            tolerance: "> 0, monotone".into(),
            pass: single > 0.0 && monotone,
            note: format!("R={:+.3}: two-state block {:.3e} -> {:.3e} over n_sub 2..{}", sol.r_values[k0], values[0], values[values.len() - 1], sol.n_states),
        });

        let params = ShinMetiuParams { r_scan: NuclearScan { r_min: sol.r_values[k0], r_max: sol.r_values[k0], n_r: 1 }, ..g.params };
        let big = solve_adiabatic(&params, TRK_STATES)?;
        let s = trk_sum(&big, 0, 0);
        checks.push(Check {
            name: "trk-sum",
            value: s,
            tolerance: format!("1 ± {TRK_TOL}"),
            pass: (s - 1.0).abs() <= TRK_TOL,
            note: format!("ground state, {TRK_STATES} states"),
        });
    }

    Ok(Report { checks })
}
