//! `matter solve`, `scan pes|coupling` and `diagnose trk|leakage`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use polaritonic::gauge::Gauge;
use polaritonic::matter::{leakage_at, solve_adiabatic, trk_sum, NuclearScan, ShinMetiuParams};
use polaritonic::scan::{scan_coupling, scan_pes, ScanKind, ScanResult};
use polaritonic::units::{hartree_to_ev, HARTREE_EV};

use crate::config::{Format, ModelConfig, RunConfig};
use crate::error::CliError;
use crate::model::MatterData;

fn sci(x: f64, precision: usize) -> String {
    format!("{:.*e}", precision.max(1) - 1, x)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn grid_params(cfg: &RunConfig) -> Result<&crate::config::GridModel, CliError> {
    match &cfg.model {
        ModelConfig::Grid(g) => Ok(g),
        ModelConfig::TwoLevel(_) => Err(CliError::Config("this command needs a grid model".into())),
    }
}

pub fn matter_solve(cfg: &RunConfig) -> Result<String, CliError> {
    grid_params(cfg)?;
    let data = MatterData::prepare(cfg)?;
    let sol = data.solution.as_ref().expect("grid model has a solution");
    let diab = data.diabatization.as_ref().expect("grid model is diabatized");
    let k0 = sol.nearest_index(0.0);
    let r0 = sol.r_values[k0];
    let gap = hartree_to_ev(sol.energies[k0][1] - sol.energies[k0][0]);

    let p = cfg.output.precision;
    let mut table = String::from("R_au,E0_au,E1_au,V00_au,V01_au,V11_au,mu00_au,mu01_au,mu11_au,d01_au\r\n");
    for (k, &r) in sol.r_values.iter().enumerate() {
        let (v, m) = (&data.subspace.potential[k], &data.subspace.dipole[k]);
        let row = [
            r,
            sol.energies[k][0],
            sol.energies[k][1],
            v[(0, 0)],
            v[(0, 1)],
            v[(1, 1)],
            m[(0, 0)],
            m[(0, 1)],
            m[(1, 1)],
            sol.derivative_coupling[k][(0, 1)],
        ];
        table.push_str(&row.iter().map(|x| sci(*x, p)).collect::<Vec<_>>().join(","));
        table.push_str("\r\n");
    }
    write_file(&cfg.output.directory, "matter.csv", &table)?;

    let mut out = String::new();
    let _ = writeln!(out, "states solved      {} at {} proton positions", sol.n_states, sol.n_r());
    let _ = writeln!(
        out,
        "gap E1-E0 at R={r0:+.3}  {gap:.6} eV (cavity {:.6} eV, detuning {:+.2e} eV)",
        cfg.photon.omega_c_ev,
        gap - cfg.photon.omega_c_ev
    );
    let gaps: Vec<String> =
        (1..sol.n_states.min(6)).map(|a| format!("{:.4}", hartree_to_ev(sol.energies[k0][a] - sol.energies[k0][0]))).collect();
    let _ = writeln!(out, "excitations (eV)   {}", gaps.join(" "));
    let mu = &sol.dipole[k0];
    let _ = writeln!(out, "dipole at R={r0:+.3}  mu00={:+.6} mu01={:+.6} mu11={:+.6}", mu[(0, 0)], mu[(0, 1)], mu[(1, 1)]);
    let _ = writeln!(
        out,
        "diabatization      residual {:.3e} / peak {:.3e}, spectrum error {:.1e}",
        diab.residual_coupling, diab.peak_coupling, diab.spectrum_error
    );
    let _ = writeln!(
        out,
        "grid check         max shift {:.3e} at R={:+.3} on the doubled grid",
        sol.grid_check.max_shift, sol.grid_check.r
    );
    let _ = writeln!(out, "representation     {}", data.subspace.representation.as_str());
    let _ = writeln!(out, "wrote              {}", cfg.output.directory.join("matter.csv").display());
    Ok(out)
}

pub fn scan(cfg: &RunConfig, kind: ScanKind) -> Result<String, CliError> {
    let data = MatterData::prepare(cfg)?;
    let r_values = cfg.scan.r_values.clone().unwrap_or_else(|| data.subspace.r_values.clone());
    let scan_cfg = cfg.scan_config(r_values);
    let inputs = data.inputs();
    let result = match kind {
        ScanKind::Pes => scan_pes(&scan_cfg, &inputs)?,
        ScanKind::Coupling => scan_coupling(&scan_cfg, &inputs, cfg.scan.r_fixed)?,
    };
    let out = write_scan(cfg, &result)?;
    if result.all_failed() {
        return Err(CliError::Convergence(format!(
            "no {} scan point passed the convergence checks; raise n_fock or n_large",
            kind.as_str()
        )));
    }
    Ok(out)
}

/// Writes CSV/JSON/discrepancy files and returns the stdout summary.
pub fn write_scan(cfg: &RunConfig, result: &ScanResult) -> Result<String, CliError> {
    let dir = &cfg.output.directory;
    let p = cfg.output.precision;
    let kind = result.kind.as_str();
    if cfg.output.formats.contains(&Format::Csv) {
        for &g in &result.gauges {
            write_file(dir, &result.csv_file_name(g), &result.to_csv(g, p)?)?;
        }
    }
    if cfg.output.formats.contains(&Format::Json) {
        let text = serde_json::to_string_pretty(&result.to_json()).map_err(polaritonic::Error::from)?;
        write_file(dir, &format!("scan_{kind}.json"), &text)?;
    }

    let reference = if result.gauges.contains(&Gauge::Dipole) { Gauge::Dipole } else { result.gauges[0] };
    let mut report = String::from("gauge,reference,R_au,A0_au,max_abs_au,max_abs_eV\r\n");
    let mut out = String::new();
    let _ = writeln!(out, "{kind} scan: {} R x {} A0, reference gauge {reference}", result.r_values.len(), result.a0_values.len());
    let _ = writeln!(out, "{:<28} {:>8} {:>10} {:>14}", "gauge", "points", "converged", "max dE (eV)");
    for &g in &result.gauges {
        let rows = result.gauge_discrepancy(g, reference)?;
        for d in &rows {
            let _ = write!(report, "{g},{reference},{},{},{},{}\r\n", sci(d.r, p), sci(d.a0, p), sci(d.max_abs, p), sci(d.max_abs * HARTREE_EV, p));
        }
        let n = result.points_for(g).count();
        let ok = result.points_for(g).filter(|pt| pt.converged()).count();
        let worst = rows.iter().map(|d| d.max_abs).fold(0.0, f64::max);
        let _ = writeln!(out, "{:<28} {:>8} {:>10} {:>14.6e}", g.as_str(), n, ok, worst * HARTREE_EV);
    }
    write_file(dir, &format!("{kind}_discrepancy.csv"), &report)?;
    let _ = writeln!(out, "wrote {}", dir.display());
    Ok(out)
}

fn single_r(cfg: &RunConfig, r: f64) -> Result<ShinMetiuParams, CliError> {
    let g = grid_params(cfg)?;
    let params = ShinMetiuParams { r_scan: NuclearScan { r_min: r, r_max: r, n_r: 1 }, ..g.params };
    params.validate()?;
    Ok(params)
}

pub fn diagnose_trk(cfg: &RunConfig, r: f64, n_states: usize, state: usize) -> Result<String, CliError> {
    if state + 1 >= n_states {
        return Err(CliError::Config(format!("state {state} needs more than {n_states} solved states")));
    }
    let sol = solve_adiabatic(&single_r(cfg, r)?, n_states)?;
    let s = trk_sum(&sol, 0, state);
    Ok(format!("TRK sum for state {state} at R={r:+.4} with {n_states} states: {s:.6} (deviation {:+.3e})\n", s - 1.0))
}

pub fn diagnose_leakage(cfg: &RunConfig, r: f64, n_states: usize, n_target: usize) -> Result<String, CliError> {
    if n_target == 0 || n_target > n_states {
        return Err(CliError::Config(format!("n_target must lie between 1 and {n_states}")));
    }
    let sol = solve_adiabatic(&single_r(cfg, r)?, n_states)?;
    let mut out = format!("leakage of the {n_target}-state block at R={r:+.4}\n{:>6} {:>14}\n", "n_sub", "leakage_au");
    for n in n_target..=n_states {
        let _ = writeln!(out, "{n:>6} {:>14.6e}", leakage_at(&sol, 0, n_target, n));
    }
    Ok(out)
}
