#![allow(dead_code)]

use std::sync::OnceLock;

use polaritonic::matter::{diabatize, solve_adiabatic, GridSolution, MatterSubspace, ShinMetiuParams};
use polaritonic::units::ev_to_hartree;

/// States kept for the default solution: enough for the projected naive
/// route at n_large = 12 plus its +4 convergence check.
pub const N_STATES: usize = 16;

pub fn omega_3ev() -> f64 {
    ev_to_hartree(3.0)
}

/// Default Shin–Metiu model, solved once per test binary.
pub fn shin_metiu() -> &'static GridSolution {
    static SOL: OnceLock<GridSolution> = OnceLock::new();
    SOL.get_or_init(|| solve_adiabatic(&ShinMetiuParams::default(), N_STATES).expect("default model solves"))
}

pub fn strict_diabatic() -> &'static MatterSubspace {
    static SUB: OnceLock<MatterSubspace> = OnceLock::new();
    SUB.get_or_init(|| diabatize(shin_metiu()).expect("default model diabatizes").subspace)
}

pub fn adiabatic() -> &'static MatterSubspace {
    static SUB: OnceLock<MatterSubspace> = OnceLock::new();
    SUB.get_or_init(|| MatterSubspace::adiabatic(shin_metiu()).unwrap())
}

/// Elementwise `|a − b| ≤ max(rel·max(|a|, |b|), abs)`.
pub fn agree(a: &[f64], b: &[f64], rel: f64, abs: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= (rel * x.abs().max(y.abs())).max(abs))
}
