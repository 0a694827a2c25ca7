//! The subcommands. Each returns its table together with the run status,
//! so a table is written even when the run fails a gate.

use bilage::checks::{run_suite, Suite};
use bilage::equilibrium::{
    density_moment, fuss_catalan, phi_max, rho_ratio_form, soft_edge, PhiPoint,
};
use bilage::kernel_finite::{
    kernel_contour_estimate, kernel_residue_estimate, kernel_series_estimate, KernelEstimate,
};
use bilage::limits::{
    hard_edge_borodin, hard_edge_contour, hard_edge_uint, square_grid, study_bulk, study_edge,
    study_hard_edge, ConvergenceRow,
};
use bilage::{par, EnsembleParams};
use serde::Serialize;
use serde_json::Value;

use crate::args::{CheckArgs, DensityArgs, KernelArgs, LimitArgs, LimitMethod, Regime, StudyArgs};
use crate::config::{check_tol, Method, RunConfig};
use crate::error::{argument, CliError};
use crate::table::{Cell, Format, Table};

/// Highest moment order reported by `density`.
pub const MAX_MOMENT: u32 = 4;
/// Allowed relative growth between consecutive study errors.
pub const STUDY_SLACK: f64 = 0.10;

pub struct Outcome {
    pub table: Table,
    pub meta: Value,
    pub status: Result<(), CliError>,
}

fn meta(command: &str, args: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(args).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut v {
        m.insert("command".into(), Value::from(command));
    }
    v
}

/// Parses `xmin:xmax:k` into k uniformly spaced values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        argument(format!(
            "grid must be xmin:xmax:k with 0 < xmin <= xmax and k >= 1, got '{text}'"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, k] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && k >= 1) {
        return Err(bad());
    }
    if k == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect())
}

/// Evaluation points from `--x/--y` or `--grid`.
fn points(x: Option<f64>, y: Option<f64>, grid: Option<&str>) -> Result<Vec<(f64, f64)>, CliError> {
    let pts = match (x, y, grid) {
        (None, None, Some(g)) => square_grid(&parse_grid(g)?),
        (Some(x), Some(y), None) => vec![(x, y)],
        (_, _, Some(_)) => return Err(argument("give either --x and --y, or --grid")),
        _ => return Err(argument("both --x and --y are required without --grid")),
    };
    for &(x, y) in &pts {
        if !(x > 0.0 && x.is_finite()) {
            return Err(argument(format!("x must be positive, got {x}")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(argument(format!("y must be positive, got {y}")));
        }
    }
    Ok(pts)
}

fn within_tol(err: f64, value: f64, tol: f64) -> bool {
    err <= tol * value.abs().max(1.0)
}

pub fn kernel(args: &KernelArgs, output: Format, threads: usize) -> Result<Outcome, CliError> {
    let params =
        EnsembleParams::new(args.alpha, args.theta, args.n).map_err(|e| argument(e.to_string()))?;
    let cfg = RunConfig::new(params, args.method, args.tol, output, threads)?;
    let pts = points(args.x, args.y, args.grid.as_deref())?;
    let method = cfg.resolved_method();
    let eval = |&(x, y): &(f64, f64)| -> Result<KernelEstimate, CliError> {
        let p = &cfg.params;
        Ok(match method {
            Method::Series => kernel_series_estimate(p, x, y)?,
            Method::Contour => kernel_contour_estimate(p, x, y, 1.0)?,
            Method::Residue | Method::Auto => kernel_residue_estimate(p, x, y)?,
        })
    };
    let results: Vec<KernelEstimate> =
        par::map(&pts, eval).into_iter().collect::<Result<_, _>>()?;

    let mut table = Table::new(&["x", "y", "K", "err_est", "method", "n_evals"]);
    let mut worst: Option<(f64, f64, f64)> = None;
    for (&(x, y), e) in pts.iter().zip(&results) {
        if worst.is_none() && !within_tol(e.abs_err, e.value, cfg.tol) {
            worst = Some((x, y, e.abs_err));
        }
        table.push(vec![
            x.into(),
            y.into(),
            e.value.into(),
            e.abs_err.into(),
            method.name().into(),
            e.n_evals.into(),
        ]);
    }
    let status = match worst {
        Some((x, y, err)) => Err(CliError::Tolerance(format!(
            "error estimate {err:e} at ({x}, {y}) exceeds tol {:e}",
            cfg.tol
        ))),
        None => Ok(()),
    };
    Ok(Outcome {
        table,
        meta: meta("kernel", args),
        status,
    })
}

pub fn density(args: &DensityArgs) -> Result<Outcome, CliError> {
    let theta = args.theta;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(argument(format!("theta must be positive, got {theta}")));
    }
    if args.points == 0 {
        return Err(argument("points must be at least 1"));
    }
    let k = args.points;
    let edge = soft_edge(theta);
    let phis: Vec<f64> = (0..k)
        .map(|i| (i as f64 + 0.5) * phi_max(theta) / k as f64)
        .collect();
    let pts = par::map(&phis, |&phi| PhiPoint::new(theta, phi));
    let mut table = Table::new(&[
        "kind",
        "k",
        "phi",
        "x",
        "rho",
        "moment",
        "err_est",
        "support_max",
    ]);
    for (i, p) in pts.into_iter().enumerate() {
        let p = p.map_err(|e| CliError::Tolerance(e.to_string()))?;
        let err = (p.rho - rho_ratio_form(theta, p.phi)).abs();
        table.push(vec![
            "point".into(),
            i.into(),
            p.phi.into(),
            p.x.into(),
            p.rho.into(),
            Cell::Empty,
            err.into(),
            edge.into(),
        ]);
    }
    let orders: Vec<u32> = (0..=MAX_MOMENT).collect();
    let moments = par::map(&orders, |&m| density_moment(theta, m));
    for (m, v) in orders.iter().zip(moments) {
        let v = v.map_err(|e| CliError::Tolerance(e.to_string()))?;
        table.push(vec![
            "moment".into(),
            (*m as usize).into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            v.into(),
            (v - fuss_catalan(theta, *m)).abs().into(),
            edge.into(),
        ]);
    }
    Ok(Outcome {
        table,
        meta: meta("density", args),
        status: Ok(()),
    })
}

pub fn check(args: &CheckArgs) -> Result<Outcome, CliError> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: bilage::checks::UnknownSuite| argument(e.to_string()))?;
    let reports = run_suite(suite);
    let mut table = Table::new(&[
        "suite",
        "identity",
        "cases",
        "max_defect",
        "threshold",
        "passed",
    ]);
    let mut failed = Vec::new();
    for r in &reports {
        eprintln!(
            "{} {}/{}: max defect {:e} (threshold {:e}){}",
            if r.passed { "PASS" } else { "FAIL" },
            r.suite,
            r.identity,
            r.max_defect,
            r.threshold,
            r.failure
                .as_ref()
                .map(|f| format!(": {f}"))
                .unwrap_or_default()
        );
        if !r.passed {
            failed.push(format!("{}/{}", r.suite, r.identity));
        }
        table.push(vec![
            r.suite.to_string().into(),
            r.identity.into(),
            r.cases.into(),
            r.max_defect.into(),
            r.threshold.into(),
            r.passed.into(),
        ]);
    }
    let status = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Identity(format!(
            "identities failed: {}",
            failed.join(", ")
        )))
    };
    Ok(Outcome {
        table,
        meta: meta("check", args),
        status,
    })
}

/// Index of the first step where the error grows by more than
/// [`STUDY_SLACK`].
pub fn first_increase(errors: &[f64]) -> Option<usize> {
    errors
        .windows(2)
        .position(|w| !(w[1] <= (1.0 + STUDY_SLACK) * w[0]))
        .map(|i| i + 1)
}

const HARD_VALUES: [f64; 3] = [0.5, 1.0, 2.0];
const BULK_VALUES: [f64; 3] = [0.0, 0.5, 1.0];
const EDGE_VALUES: [f64; 3] = [-2.0, 0.0, 1.0];

pub fn study(args: &StudyArgs) -> Result<Outcome, CliError> {
    EnsembleParams::new(args.alpha, args.theta, 1).map_err(|e| argument(e.to_string()))?;
    if args.ns.is_empty() || args.ns.contains(&0) {
        return Err(argument("ns must be a list of positive sizes"));
    }
    if args.ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(argument("ns must be strictly increasing"));
    }
    let grid = |default: &[f64]| square_grid(args.values.as_deref().unwrap_or(default));
    let rows: Vec<ConvergenceRow> = match args.regime {
        Regime::Hard => {
            let pts = match (args.x, args.y) {
                (Some(x), Some(y)) => vec![(x, y)],
                (None, None) => grid(&HARD_VALUES),
                _ => return Err(argument("give both --x and --y, or neither")),
            };
            study_hard_edge(args.alpha, args.theta, &pts, &args.ns)?
        }
        Regime::Bulk => {
            let phi = args
                .phi
                .ok_or_else(|| argument("bulk study requires --phi"))?;
            study_bulk(args.alpha, args.theta, phi, &grid(&BULK_VALUES), &args.ns)?
        }
        Regime::Edge => study_edge(args.alpha, args.theta, &grid(&EDGE_VALUES), &args.ns)?,
    };
    let regime = serde_json::to_value(args.regime)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut table = Table::new(&["regime", "n", "sup_error", "grid"]);
    for r in &rows {
        table.push(vec![
            regime.as_str().into(),
            r.n.into(),
            r.sup_error.into(),
            // the grid description may contain commas
            r.grid.replace(',', ";").into(),
        ]);
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let status = match first_increase(&errors) {
        Some(i) => Err(CliError::NonMonotone(format!(
            "error rose from {:e} at n = {} to {:e} at n = {}",
            errors[i - 1],
            rows[i - 1].n,
            errors[i],
            rows[i].n
        ))),
        None => Ok(()),
    };
    Ok(Outcome {
        table,
        meta: meta("study", args),
        status,
    })
}

fn limit_name(m: LimitMethod) -> &'static str {
    match m {
        LimitMethod::Borodin => "borodin",
        LimitMethod::Uint => "uint",
        LimitMethod::Contour => "contour",
    }
}

pub fn limit(args: &LimitArgs) -> Result<Outcome, CliError> {
    EnsembleParams::new(args.alpha, args.theta, 1)
        .and_then(|p| p.require_theta_at_least_one())
        .map_err(|e| argument(e.to_string()))?;
    check_tol(args.tol)?;
    let pts = points(args.x, args.y, args.grid.as_deref())?;
    let (a, t) = (args.alpha, args.theta);
    let eval = |&(x, y): &(f64, f64)| -> Result<(f64, f64), CliError> {
        // the estimate is the disagreement with an independent route
        let (v, r) = match args.method {
            LimitMethod::Borodin => (hard_edge_borodin(a, t, x, y)?, hard_edge_uint(a, t, x, y)?),
            LimitMethod::Uint => (hard_edge_uint(a, t, x, y)?, hard_edge_borodin(a, t, x, y)?),
            LimitMethod::Contour => (hard_edge_contour(a, t, x, y)?, hard_edge_uint(a, t, x, y)?),
        };
        Ok((v, (v - r).abs()))
    };
    let results: Vec<(f64, f64)> = par::map(&pts, eval).into_iter().collect::<Result<_, _>>()?;
    let mut table = Table::new(&["x", "y", "K", "err_est", "method"]);
    let mut bad = None;
    for (&(x, y), &(v, e)) in pts.iter().zip(&results) {
        if bad.is_none() && !within_tol(e, v, args.tol) {
            bad = Some((x, y, e));
        }
        table.push(vec![
            x.into(),
            y.into(),
            v.into(),
            e.into(),
            limit_name(args.method).into(),
        ]);
    }
    let status = match bad {
        Some((x, y, e)) => Err(CliError::Tolerance(format!(
            "route disagreement {e:e} at ({x}, {y}) exceeds tol {:e}",
            args.tol
        ))),
        None => Ok(()),
    };
    Ok(Outcome {
        table,
        meta: meta("limit", args),
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1:3:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1:3").is_err());
        assert!(parse_grid("1:3").is_err());
        assert!(parse_grid("3:1:2").is_err());
    }

    #[test]
    fn slack_rule() {
        assert_eq!(first_increase(&[1.0, 0.5, 0.54]), None);
        assert_eq!(first_increase(&[1.0, 0.5, 0.56]), Some(2));
        assert_eq!(first_increase(&[1.0, f64::NAN]), Some(1));
    }

    #[test]
    fn point_validation() {
        assert!(points(Some(1.0), None, None).is_err());
        assert!(points(Some(1.0), Some(1.0), Some("1:2:2")).is_err());
        let e = points(Some(-1.0), Some(1.0), None).unwrap_err();
        assert!(e.to_string().contains("x must be positive"));
        assert_eq!(points(None, None, Some("1:2:2")).unwrap().len(), 4);
    }
}
