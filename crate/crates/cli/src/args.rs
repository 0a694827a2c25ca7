//! Command-line grammar and config-file merging.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{read_config, Method};
use crate::error::{argument, CliError};
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "bilage",
    version,
    about = "Correlation kernels of biorthogonal Laguerre ensembles",
    args_override_self = true
)]
pub struct Cli {
    /// File of `key = value` lines presetting any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for grid evaluation (overridden by BILAGE_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-n correlation kernel.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Kernel(KernelArgs),
    /// Equilibrium density table and its moments.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Density(DensityArgs),
    /// Identity suites.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Check(CheckArgs),
    /// Convergence of scaled kernels to their limits.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Study(StudyArgs),
    /// Hard-edge limiting kernel.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Limit(LimitArgs),
}

impl Command {
    pub const NAMES: [&'static str; 5] = ["kernel", "density", "check", "study", "limit"];
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    /// Square grid `xmin:xmax:k` of k uniformly spaced values per axis.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Largest accepted error estimate relative to max(|K|, 1).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub theta: f64,
    /// Number of points on the uniform angle grid.
    #[arg(long)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// One of gamma, kernel, hardedge, bridge, all.
    #[arg(long)]
    pub suite: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Hard,
    Bulk,
    Edge,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StudyArgs {
    #[arg(long, value_enum)]
    pub regime: Regime,
    /// Comma-separated, strictly increasing ensemble sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub theta: f64,
    /// Hard-edge point (with --y); otherwise a grid from --values.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    /// Bulk angle in (0, π/(1+θ)).
    #[arg(long)]
    pub phi: Option<f64>,
    /// Comma-separated values whose square forms the study grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitMethod {
    Borodin,
    Uint,
    Contour,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = LimitMethod::Uint)]
    pub method: LimitMethod,
    /// Largest accepted cross-route disagreement relative to max(|K|, 1).
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Scans `args` for `--config <path>` or `--config=<path>`.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn long_names(cmd: &clap::Command) -> Vec<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect()
}

/// Inserts config presets ahead of the flags they may be overridden by:
/// global keys right after the program name, subcommand keys right after
/// the subcommand. Keys known only to other subcommands are skipped.
pub fn merge_config(
    args: Vec<OsString>,
    presets: &[(String, String)],
) -> Result<Vec<OsString>, CliError> {
    let root = Cli::command();
    let global: Vec<String> = long_names(&root)
        .into_iter()
        .filter(|k| k != "config" && k != "help" && k != "version")
        .collect();
    let sub_pos = args
        .iter()
        .skip(1)
        .position(|a| Command::NAMES.iter().any(|n| a.to_str() == Some(n)))
        .map(|i| i + 1);
    let sub_names = sub_pos
        .and_then(|i| args[i].to_str())
        .and_then(|name| root.find_subcommand(name))
        .map(long_names)
        .unwrap_or_default();
    let mut all = global.clone();
    for s in root.get_subcommands() {
        all.extend(long_names(s));
    }

    let mut head = Vec::new();
    let mut tail = Vec::new();
    for (k, v) in presets {
        if !all.contains(k) || k == "config" {
            return Err(argument(format!("unknown config key '{k}'")));
        }
        let pair = [OsString::from(format!("--{k}")), OsString::from(v)];
        if global.contains(k) {
            head.extend(pair);
        } else if sub_names.contains(k) {
            tail.extend(pair);
        }
    }

    let mut out = vec![args[0].clone()];
    out.extend(head);
    match sub_pos {
        Some(i) => {
            out.extend(args[1..=i].iter().cloned());
            out.extend(tail);
            out.extend(args[i + 1..].iter().cloned());
        }
        None => out.extend(args[1..].iter().cloned()),
    }
    Ok(out)
}

/// Parses `args`, applying the config file named by `--config` if any.
pub fn parse(args: Vec<OsString>) -> Result<Cli, clap::Error> {
    let args = match config_path(&args) {
        Some(path) => {
            let presets = read_config(&path).map_err(|e| {
                Cli::command().error(clap::error::ErrorKind::InvalidValue, e.to_string())
            })?;
            merge_config(args, &presets).map_err(|e| {
                Cli::command().error(clap::error::ErrorKind::InvalidValue, e.to_string())
            })?
        }
        None => args,
    };
    Cli::try_parse_from(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    fn kv(k: &str, v: &str) -> (String, String) {
        (k.to_string(), v.to_string())
    }

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_presets() {
        let args = os(&[
            "bilage", "kernel", "--alpha", "0.5", "--n", "4", "--x", "1", "--y", "1",
        ]);
        let merged = merge_config(
            args,
            &[
                kv("alpha", "2"),
                kv("theta", "1.5"),
                kv("threads", "3"),
                kv("suite", "all"),
            ],
        )
        .unwrap();
        let cli = Cli::try_parse_from(merged).unwrap();
        assert_eq!(cli.threads, Some(3));
        let Command::Kernel(k) = cli.command else {
            panic!("kernel expected")
        };
        assert_eq!(k.alpha, 0.5);
        assert_eq!(k.theta, 1.5);
    }

    #[test]
    fn global_flag_after_subcommand_overrides_preset() {
        let args = os(&["bilage", "check", "--suite", "gamma", "--threads", "8"]);
        let merged = merge_config(args, &[kv("threads", "1")]).unwrap();
        assert_eq!(Cli::try_parse_from(merged).unwrap().threads, Some(8));
    }

    #[test]
    fn unknown_preset_key() {
        let e = merge_config(os(&["bilage", "check"]), &[kv("colour", "red")]).unwrap_err();
        assert!(e.to_string().contains("colour"));
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from(os(&[
            "bilage", "study", "--regime", "edge", "--alpha", "-0.5", "--theta", "1", "--ns",
            "50,100", "--values", "-2,0,1",
        ]))
        .unwrap();
        let Command::Study(s) = cli.command else {
            panic!("study expected")
        };
        assert_eq!(s.alpha, -0.5);
        assert_eq!(s.values, Some(vec![-2.0, 0.0, 1.0]));
    }
}
