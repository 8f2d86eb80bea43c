//! Polariton Hamiltonians for a molecule in a single-mode cavity under
//! electronic-state truncation: dipole gauge, naive and corrected Coulomb
//! gauge, and the scans that compare their spectra.

pub mod cache;
pub mod error;
pub mod gauge;
pub mod interp;
pub mod linalg;
pub mod matter;
pub mod photon;
pub mod scan;
pub mod units;

pub use error::{Error, Result};
