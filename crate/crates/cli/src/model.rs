//! Matter data behind a run: a grid solution (cached) or literal two-level tables.

use std::path::Path;

use polaritonic::cache::load_or_solve;
use polaritonic::gauge::GaugeInputs;
use polaritonic::matter::{diabatize, mulliken_hush, Diabatization, GridSolution, MatterSubspace, Representation};

use crate::config::{ModelConfig, RunConfig};
use crate::error::CliError;

pub struct MatterData {
    pub solution: Option<GridSolution>,
    pub diabatization: Option<Diabatization>,
    pub subspace: MatterSubspace,
    pub cache_hit: Option<bool>,
    pub n_large: usize,
}

impl MatterData {
    pub fn prepare(cfg: &RunConfig) -> Result<Self, CliError> {
        match &cfg.model {
            ModelConfig::TwoLevel(m) => Ok(Self {
                solution: None,
                diabatization: None,
                subspace: m.subspace()?,
                cache_hit: None,
                n_large: cfg.scan.n_large,
            }),
            ModelConfig::Grid(g) => {
                let (sol, hit) = solve_cached(&cfg.output.cache_dir(), &g.params, g.n_states)?;
                let diab = diabatize(&sol)?;
                let subspace = match g.representation {
                    Representation::Adiabatic => MatterSubspace::adiabatic(&sol)?,
                    Representation::StrictDiabatic => diab.subspace.clone(),
                    Representation::MullikenHush => mulliken_hush(&diab.subspace).subspace,
                    Representation::Literal => {
                        return Err(CliError::Config("representation `literal` needs a two_level model".into()))
                    }
                };
                Ok(Self {
                    solution: Some(sol),
                    diabatization: Some(diab),
                    subspace,
                    cache_hit: Some(hit),
                    n_large: cfg.scan.n_large,
                })
            }
        }
    }

    pub fn inputs(&self) -> GaugeInputs<'_> {
        let inputs = GaugeInputs::new(&self.subspace);
        match &self.solution {
            Some(sol) => inputs.with_large(sol, self.n_large),
            None => inputs,
        }
    }
}

pub fn solve_cached(
    dir: &Path,
    params: &polaritonic::matter::ShinMetiuParams,
    n_states: usize,
) -> Result<(GridSolution, bool), CliError> {
    let (sol, hit) = load_or_solve(dir, params, n_states)?;
    eprintln!("cache {}: {}", if hit { "hit" } else { "miss" }, polaritonic::cache::cache_path(dir, params, n_states).display());
    Ok((sol, hit))
}
