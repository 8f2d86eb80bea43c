//! One-dimensional Shin–Metiu proton-transfer model and its truncated
//! two-state electronic subspace.

pub mod diagnostics;
pub mod grid;
pub mod params;
pub mod solution;
pub mod subspace;

pub use diagnostics::{block_leakage, leakage_at, subspace_leakage, trk_sum};
pub use params::{Charges, ElectronGrid, FdOrder, NuclearScan, PotentialOverride, ShinMetiuParams};
pub use solution::{solve_adiabatic, solve_point, GridCheck, GridSolution, PointSolution};
pub use subspace::{
    diabatize, mulliken_hush, Diabatization, Mat2, MatterPoint, MatterSubspace, MullikenHush, Representation,
};
