//! Run configuration assembled from a JSON file, flags and the environment.

use std::path::{Path, PathBuf};

use cyclide::elliptic::{OmegaTable, DEFAULT_OMEGA_TOL};
use cyclide::sturm::OdeTolerances;
use cyclide::ParamsA;
use serde::Deserialize;

use crate::args::GlobalArgs;
use crate::error::CliError;
use crate::table::Format;

pub const CACHE_ENV: &str = "CYCLIDE_CACHE_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    a: Option<Vec<f64>>,
    omega_tol: Option<f64>,
    ode_rtol: Option<f64>,
    ode_atol: Option<f64>,
    format: Option<Format>,
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub a: ParamsA,
    pub omega_tol: f64,
    pub ode: OdeTolerances,
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{name} must be positive, got {v}")))
    }
}

impl Config {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(g: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &g.config {
            Some(path) => read_config(path)?,
            None => ConfigFile::default(),
        };
        let a = match (&g.a, file.a) {
            (Some(text), _) => parse_list(text, "a")?,
            (None, Some(v)) => v,
            (None, None) => ParamsA::default().as_array().to_vec(),
        };
        let a = ParamsA::from_slice(&a)?;
        let omega_tol = positive("omega tolerance", g.omega_tol.or(file.omega_tol).unwrap_or(DEFAULT_OMEGA_TOL))?;
        let rtol = positive("ode rtol", g.ode_rtol.or(file.ode_rtol).unwrap_or(OdeTolerances::DEFAULT.rtol))?;
        let atol = positive("ode atol", g.ode_atol.or(file.ode_atol).unwrap_or(OdeTolerances::DEFAULT.atol))?;
        let cache_dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or(file.cache_dir);
        Ok(Self {
            a,
            omega_tol,
            ode: OdeTolerances::new(rtol, atol)?,
            format: g.format.or(file.format),
            cache_dir,
            out: g.out.clone(),
        })
    }

    pub fn table(&self) -> Result<OmegaTable, CliError> {
        let t = match &self.cache_dir {
            Some(dir) => OmegaTable::cached(dir, self.a, self.omega_tol)?,
            None => OmegaTable::with_tolerance(self.a, self.omega_tol)?,
        };
        Ok(t)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

/// Comma-separated floats.
pub fn parse_list(text: &str, name: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--{name}: '{}' is not a number", s.trim())))
        })
        .collect()
}

pub fn parse_fixed<const N: usize>(text: &str, name: &str) -> Result<[f64; N], CliError> {
    let v = parse_list(text, name)?;
    v.try_into()
        .map_err(|v: Vec<f64>| CliError::usage(format!("--{name} needs {N} values, got {}", v.len())))
}

pub fn parse_pair(text: &str, name: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("--{name} expects two non-negative integers 'i,j', got '{text}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok((parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?))
}
