//! Unit conversions. Everything inside the library is in atomic units.

/// 1 hartree in eV.
pub const HARTREE_EV: f64 = 27.211386245988;

/// Proton mass in electron masses.
pub const PROTON_MASS: f64 = 1836.152673;

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn hartree_to_ev(au: f64) -> f64 {
    au * HARTREE_EV
}
