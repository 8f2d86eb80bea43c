//! JSON cache for grid solutions. Float arrays are stored as base64 of their
//! little-endian binary64 bytes; the file name carries a SHA-256 key of the
//! model parameters and state count.

use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::matter::{solve_adiabatic, GridCheck, GridSolution, ShinMetiuParams};

pub const CACHE_FORMAT: &str = "polaritonic-grid-solution/1";

#[derive(Serialize)]
struct KeyMaterial<'a> {
    params: &'a ShinMetiuParams,
    n_states: usize,
}

/// Hex SHA-256 of the canonical JSON of `(params, n_states)`.
pub fn cache_key(params: &ShinMetiuParams, n_states: usize) -> String {
    let canonical = serde_json::to_vec(&KeyMaterial { params, n_states }).expect("parameters serialize");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_path(dir: &Path, params: &ShinMetiuParams, n_states: usize) -> PathBuf {
    dir.join(format!("matter_{}.json", &cache_key(params, n_states)[..16]))
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: String,
    key: String,
    params: ShinMetiuParams,
    n_states: usize,
    n_r: usize,
    r_values: String,
    /// `[n_r][n_states]`
    energies: String,
    /// `[n_r][n_states][n_states]`, row-major
    dipole: String,
    dipole_squared: String,
    momentum: String,
    derivative_coupling: String,
    force: String,
    /// `[n_r − 1][n_states][n_states]`
    neighbor_overlap: String,
    orthonormality_error: f64,
    grid_check: GridCheck,
}

fn encode(values: impl IntoIterator<Item = f64>) -> String {
    let bytes: Vec<u8> = values.into_iter().flat_map(f64::to_le_bytes).collect();
    STANDARD.encode(bytes)
}

fn decode(s: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let bytes = STANDARD.decode(s).map_err(|e| Error::Cache(format!("{what}: {e}")))?;
    if bytes.len() != 8 * expected {
        return Err(Error::Cache(format!("{what}: expected {expected} values, found {} bytes", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn encode_matrices(ms: &[RMatrix]) -> String {
    encode(ms.iter().flat_map(|m| (0..m.nrows()).flat_map(move |i| (0..m.ncols()).map(move |j| m[(i, j)]))))
}

fn decode_matrices(s: &str, count: usize, n: usize, what: &str) -> Result<Vec<RMatrix>> {
    let v = decode(s, count * n * n, what)?;
    Ok(v.chunks_exact(n * n.max(1)).map(|c| RMatrix::from_row_slice(n, n, c)).collect())
}

pub fn to_json(sol: &GridSolution) -> Result<String> {
    let file = CacheFile {
        format: CACHE_FORMAT.into(),
        key: cache_key(&sol.params, sol.n_states),
        params: sol.params.clone(),
        n_states: sol.n_states,
        n_r: sol.n_r(),
        r_values: encode(sol.r_values.iter().copied()),
        energies: encode(sol.energies.iter().flatten().copied()),
        dipole: encode_matrices(&sol.dipole),
        dipole_squared: encode_matrices(&sol.dipole_squared),
        momentum: encode_matrices(&sol.momentum),
        derivative_coupling: encode_matrices(&sol.derivative_coupling),
        force: encode_matrices(&sol.force),
        neighbor_overlap: encode_matrices(&sol.neighbor_overlap),
        orthonormality_error: sol.orthonormality_error,
        grid_check: sol.grid_check.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn from_json(text: &str) -> Result<GridSolution> {
    let f: CacheFile = serde_json::from_str(text)?;
    if f.format != CACHE_FORMAT {
        return Err(Error::Cache(format!("unsupported cache format `{}`", f.format)));
    }
    if f.key != cache_key(&f.params, f.n_states) {
        return Err(Error::Cache("cache key does not match the stored parameters".into()));
    }
    let (n, nr) = (f.n_states, f.n_r);
    if nr == 0 {
        return Err(Error::Cache("empty nuclear grid".into()));
    }
    let energies = decode(&f.energies, nr * n, "energies")?;
    Ok(GridSolution {
        params: f.params,
        n_states: n,
        r_values: decode(&f.r_values, nr, "r_values")?,
        energies: energies.chunks_exact(n).map(<[f64]>::to_vec).collect(),
        dipole: decode_matrices(&f.dipole, nr, n, "dipole")?,
        dipole_squared: decode_matrices(&f.dipole_squared, nr, n, "dipole_squared")?,
        momentum: decode_matrices(&f.momentum, nr, n, "momentum")?,
        derivative_coupling: decode_matrices(&f.derivative_coupling, nr, n, "derivative_coupling")?,
        force: decode_matrices(&f.force, nr, n, "force")?,
        neighbor_overlap: decode_matrices(&f.neighbor_overlap, nr - 1, n, "neighbor_overlap")?,
        orthonormality_error: f.orthonormality_error,
        grid_check: f.grid_check,
    })
}

pub fn save(sol: &GridSolution, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_json(sol)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<GridSolution> {
    from_json(&std::fs::read_to_string(path)?)
}

/// Cached solution for `(params, n_states)` under `dir`, solving and writing
/// it on a miss. Returns the solution and whether the cache was hit.
pub fn load_or_solve(dir: &Path, params: &ShinMetiuParams, n_states: usize) -> Result<(GridSolution, bool)> {
    let path = cache_path(dir, params, n_states);
    if path.exists() {
        match load(&path) {
            Ok(sol) if sol.params == *params && sol.n_states == n_states => return Ok((sol, true)),
            Ok(_) => log::warn!("cache {} holds different parameters; recomputing", path.display()),
            Err(e) => log::warn!("ignoring unreadable cache {}: {e}", path.display()),
        }
    }
    let sol = solve_adiabatic(params, n_states)?;
    save(&sol, &path)?;
    Ok((sol, false))
}
