//! Run configuration: validated flags, the `key = value` config file and
//! the thread-count override.

use std::path::Path;

use bilage::kernel_finite::{CONTOUR_MAX_N, RESIDUE_MAX_N, SERIES_MAX_N};
use bilage::EnsembleParams;

use crate::error::{argument, CliError};
use crate::table::Format;

/// Environment variable that overrides every other thread setting.
pub const THREADS_ENV: &str = "BILAGE_THREADS";

pub const TOL_MIN: f64 = 1e-14;
pub const TOL_MAX: f64 = 1e-2;

/// Finite-n kernel evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Contour,
    Residue,
    Auto,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Contour => "contour",
            Method::Residue => "residue",
            Method::Auto => "auto",
        }
    }

    fn max_n(self) -> usize {
        match self {
            Method::Series => SERIES_MAX_N,
            Method::Contour => CONTOUR_MAX_N,
            Method::Residue | Method::Auto => RESIDUE_MAX_N,
        }
    }
}

/// Validated settings of a kernel run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: EnsembleParams,
    pub method: Method,
    pub tol: f64,
    pub output: Format,
    pub threads: usize,
}

impl RunConfig {
    pub fn new(
        params: EnsembleParams,
        method: Method,
        tol: f64,
        output: Format,
        threads: usize,
    ) -> Result<Self, CliError> {
        check_tol(tol)?;
        if threads == 0 {
            return Err(argument("threads must be at least 1"));
        }
        if params.n() > method.max_n() {
            return Err(argument(format!(
                "{} method requires n <= {}, got n = {}",
                method.name(),
                method.max_n(),
                params.n()
            )));
        }
        Ok(RunConfig {
            params,
            method,
            tol,
            output,
            threads,
        })
    }

    /// The concrete route; `auto` is the residue form, which covers every
    /// accepted `n`.
    pub fn resolved_method(&self) -> Method {
        match self.method {
            Method::Auto => Method::Residue,
            m => m,
        }
    }
}

pub fn check_tol(tol: f64) -> Result<(), CliError> {
    if (TOL_MIN..=TOL_MAX).contains(&tol) {
        Ok(())
    } else {
        Err(argument(format!(
            "tol must lie in [{TOL_MIN:e}, {TOL_MAX:e}], got {tol}"
        )))
    }
}

/// Thread count from the flag, overridden by [`THREADS_ENV`] when set.
/// `None` leaves the pool at its default size.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            argument(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))
        })?),
        Err(_) => flag,
    };
    if n == Some(0) {
        return Err(argument("threads must be at least 1"));
    }
    Ok(n)
}

/// `key = value` pairs of a config file. Blank lines and lines starting
/// with `#` are skipped; keys may use `_` or `-`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| argument(format!("config line {i}: expected key = value")))?;
            let key = k.trim().replace('_', "-");
            let value = v.trim();
            if key.is_empty() || value.is_empty() {
                return Err(argument(format!("config line {i}: expected key = value")));
            }
            Ok((key, value.to_string()))
        })
        .collect()
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| argument(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}
