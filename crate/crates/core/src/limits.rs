//! Hard-edge limiting kernels and the convergence studies of the rescaled
//! finite-`n` kernels towards their hard-edge, bulk and soft-edge limits.
//!
//! The hard-edge kernel `K^{(α,θ)}` is available by three routes that share
//! no evaluation code:
//!
//! * [`hard_edge_uint`]: `∫_0^1 p(ux) q(uy) du` with `p`, `q` summed from the
//!   residues of their Mellin–Barnes integrals;
//! * [`hard_edge_borodin`]: `θ x^α ∫_0^1 J_{(α+1)/θ,1/θ}(ux) J_{α+1,θ}((uy)^θ) u^α du`
//!   with Wright's functions from [`special::wright_bessel`];
//! * [`hard_edge_contour`]: the double contour integral over a line in `s`
//!   and a hairpin in `t` around the positive axis.

use std::f64::consts::PI;

use thiserror::Error;

use crate::kernel_finite::{self, KernelError, LineRule};
use crate::params::{EnsembleParams, ParamsError};
use crate::quad::{self, ContourPath, NodeRule, QuadError, Segment};
use crate::special::{self, SpecialError};
use crate::{par, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitsError {
    #[error("{0}")]
    Domain(String),
    #[error("imaginary part {im:e} of the hard-edge kernel exceeds its error budget {budget:e}")]
    ImaginaryResidual { im: f64, budget: f64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Largest argument accepted by the hard-edge kernels.
pub const HARD_EDGE_MAX_ARG: f64 = 30.0;

/// Sup-norm error of one study at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
    /// Human-readable description of the evaluation grid.
    pub grid: String,
}

fn check_hard_edge(alpha: f64, theta: f64, x: f64, y: f64) -> Result<(), LimitsError> {
    EnsembleParams::new(alpha, theta, 1)?.require_theta_at_least_one()?;
    for v in [x, y] {
        if !(v > 0.0 && v <= HARD_EDGE_MAX_ARG) {
            return Err(LimitsError::Domain(format!(
                "hard-edge arguments must lie in (0, {HARD_EDGE_MAX_ARG}], got ({x}, {y})"
            )));
        }
    }
    Ok(())
}

const U_TOL: f64 = 1e-13;
const CANCELLATION_LIMIT: f64 = 1e12;

/// `Σ_k (−1)^k/k! · z^k · e^{g(k)}` from log-terms, guarded against
/// cancellation.
fn residue_series(
    what: &'static str,
    ln_z: f64,
    lg: impl Fn(usize) -> Option<f64>,
) -> Result<f64, LimitsError> {
    let mut acc = special::Neumaier::default();
    let mut max_term = 0.0_f64;
    let mut prev = f64::INFINITY;
    let mut lfact = 0.0;
    for k in 0..10_000usize {
        if k > 0 {
            lfact += (k as f64).ln();
        }
        let term = match lg(k) {
            Some(l) => {
                let mag = (k as f64 * ln_z - lfact + l).exp();
                if k % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            }
            None => 0.0,
        };
        acc.add(term);
        let mag = term.abs();
        max_term = max_term.max(mag);
        if k > 2 && mag <= prev && mag < 1e-18 * acc.value().abs().max(f64::MIN_POSITIVE) {
            let v = acc.value();
            if max_term > CANCELLATION_LIMIT * v.abs() {
                return Err(SpecialError::CancellationOverflow {
                    what,
                    x: ln_z.exp(),
                }
                .into());
            }
            return Ok(v);
        }
        if k > 2 && mag == 0.0 && prev == 0.0 {
            return Ok(acc.value());
        }
        prev = mag;
    }
    Err(SpecialError::CancellationOverflow {
        what,
        x: ln_z.exp(),
    }
    .into())
}

/// `−ln |Γ(x)|` for real `x`, `None` where `1/Γ` vanishes.
fn neg_ln_gamma(x: f64) -> Option<f64> {
    let v = special::recip_gamma(x);
    if v == 0.0 {
        None
    } else {
        Some(v.abs().ln())
    }
}

/// `p(x) = (2πi)^{−1}∫ Γ(α+s)/Γ((1−s)/θ) x^{−s} ds` by its residues at
/// `s = −α−k`: `Σ_k (−1)^k x^{α+k} / (k! Γ((α+1+k)/θ))`.
pub fn mb_p(alpha: f64, theta: f64, x: f64) -> Result<f64, LimitsError> {
    let lx = x.ln();
    // (α+1+k)/θ > 0, so every Γ here is positive
    let sum = residue_series("mb_p", lx, |k| {
        neg_ln_gamma((alpha + 1.0 + k as f64) / theta)
    })?;
    Ok(sum * (alpha * lx).exp())
}

/// `q(x) = (2πi)^{−1}∫_γ Γ(t/θ)/Γ(α+1−t) x^{−t} dt` by its residues at
/// `t = −θk`: `θ Σ_k (−1)^k x^{θk} / (k! Γ(α+1+θk))`.
pub fn mb_q(alpha: f64, theta: f64, x: f64) -> Result<f64, LimitsError> {
    let sum = residue_series("mb_q", theta * x.ln(), |k| {
        neg_ln_gamma(alpha + 1.0 + theta * k as f64)
    })?;
    Ok(theta * sum)
}

/// Hard-edge kernel as `∫_0^1 p(ux) q(uy) du`.
pub fn hard_edge_uint(alpha: f64, theta: f64, x: f64, y: f64) -> Result<f64, LimitsError> {
    check_hard_edge(alpha, theta, x, y)?;
    let f = |u: f64| -> Result<f64, LimitsError> {
        Ok(mb_p(alpha, theta, u * x)? * mb_q(alpha, theta, u * y)?)
    };
    integrate_unit(alpha, f)
}

/// Hard-edge kernel in Borodin's form with Wright's functions.
pub fn hard_edge_borodin(alpha: f64, theta: f64, x: f64, y: f64) -> Result<f64, LimitsError> {
    check_hard_edge(alpha, theta, x, y)?;
    let f = |u: f64| -> Result<f64, LimitsError> {
        let a = special::wright_bessel((alpha + 1.0) / theta, 1.0 / theta, u * x)?;
        let b = special::wright_bessel(alpha + 1.0, theta, (u * y).powf(theta))?;
        Ok(a * b * u.powf(alpha))
    };
    Ok(theta * x.powf(alpha) * integrate_unit(alpha, f)?)
}

/// `∫_0^1 f(u) du` for `f(u) ~ u^α` at 0, with graded panels at both ends.
/// For `α < 0` the substitution `u = w^{1/(1+α)}` removes the singularity.
fn integrate_unit(
    alpha: f64,
    f: impl Fn(f64) -> Result<f64, LimitsError>,
) -> Result<f64, LimitsError> {
    let m = if alpha < 0.0 {
        1.0 / (1.0 + alpha)
    } else {
        1.0
    };
    let first_err = std::cell::RefCell::new(None);
    let g = |w: f64| match f(w.powf(m)) {
        Ok(v) => C64::new(v * m * w.powf(m - 1.0), 0.0),
        Err(e) => {
            first_err.borrow_mut().get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    };
    let out = quad::integrate_interval(g, 0.0, 1.0, U_TOL);
    if let Some(e) = first_err.into_inner() {
        return Err(e);
    }
    Ok(out?.value.re)
}

/// Bessel kernel `(J_α(√x)√y J'_α(√y) − √x J'_α(√x) J_α(√y)) / (2(x−y))`,
/// with its diagonal limit `(J_α(√x)² − J_{α+1}(√x) J_{α−1}(√x))/4`.
pub fn bessel_kernel(alpha: f64, x: f64, y: f64) -> Result<f64, LimitsError> {
    if !(alpha >= 0.0) || !(x > 0.0) || !(y > 0.0) {
        return Err(LimitsError::Domain(format!(
            "bessel kernel needs alpha >= 0 and positive arguments, got {alpha}, ({x}, {y})"
        )));
    }
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let j = |z: f64| -> Result<(f64, f64), LimitsError> {
        let j0 = special::bessel_j(alpha, z)?;
        let j1 = special::bessel_j(alpha + 1.0, z)?;
        Ok((j0, j1))
    };
    let (jx, jx1) = j(sx)?;
    if (x - y).abs() <= 1e-9 * x.max(y) {
        // J_{α−1} = (2α/z) J_α − J_{α+1}
        let jm = 2.0 * alpha / sx * jx - jx1;
        return Ok(0.25 * (jx * jx - jx1 * jm));
    }
    let (jy, jy1) = j(sy)?;
    // z J'_α(z) = α J_α(z) − z J_{α+1}(z)
    let dx = alpha * jx - sx * jx1;
    let dy = alpha * jy - sy * jy1;
    Ok((jx * dy - dx * jy) / (2.0 * (x - y)))
}

/// Half-height of the hairpin around the positive axis.
pub const HAIRPIN_HALF_WIDTH: f64 = 0.3;
/// Height above which the `s`-contour bends into the left half-plane.
const BEND_HEIGHT: f64 = 1.0;
/// Angle of the bent rays past the vertical.
const BEND_ANGLE: f64 = PI / 4.0;

fn ln_gamma_or_nan(z: C64) -> C64 {
    special::log_gamma(z).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// The `s`-contour: the line `Re s = c` for `|Im s| ≤ 1`, continued by rays
/// at `π/4` past the vertical into the left half-plane. It crosses the real
/// axis only at `c` and leaves the poles of `Γ(α+1+θs)` to its left.
pub fn hard_edge_s_contour(c: f64) -> ContourPath {
    let lo = C64::new(c, -BEND_HEIGHT);
    let hi = C64::new(c, BEND_HEIGHT);
    let (sd, cd) = BEND_ANGLE.sin_cos();
    let mut segs = vec![Segment::ray(lo, C64::new(-sd, -cd), 4.0).reversed()];
    let ys = [
        -BEND_HEIGHT,
        -HAIRPIN_HALF_WIDTH,
        0.0,
        HAIRPIN_HALF_WIDTH,
        BEND_HEIGHT,
    ];
    for w in ys.windows(2) {
        segs.push(Segment::line(C64::new(c, w[0]), C64::new(c, w[1])));
    }
    segs.push(Segment::ray(hi, C64::new(-sd, cd), 4.0));
    ContourPath::new(segs, false).expect("bent line is connected")
}

/// The hairpin `R+ih → −ε+ih → −ε−ih → R−ih`, `h = 0.3`, `ε = min(0.3, −c/2)`.
pub fn hard_edge_hairpin(c: f64, reach: f64) -> ContourPath {
    let h = HAIRPIN_HALF_WIDTH;
    let left = -(0.3_f64.min(-0.5 * c));
    let pts = [
        C64::new(reach, h),
        C64::new(1.0, h),
        C64::new(left, h),
        C64::new(left, 0.0),
        C64::new(left, -h),
        C64::new(1.0, -h),
        C64::new(reach, -h),
    ];
    ContourPath::polyline(&pts, false).expect("hairpin corners are distinct")
}

/// Hard-edge kernel as the double integral
/// `θ/(2πi)² ∫ds ∮dt Γ(α+1+θs)Γ(−t) / (Γ(−s)Γ(α+1+θt)) · x^{−θs−1} y^{θt}/(s−t)`,
/// the reflection-formula form of the gamma and sine ratio.
pub fn hard_edge_contour(alpha: f64, theta: f64, x: f64, y: f64) -> Result<f64, LimitsError> {
    check_hard_edge(alpha, theta, x, y)?;
    if !(0.1..=10.0).contains(&x) || !(0.1..=10.0).contains(&y) {
        return Err(LimitsError::Domain(format!(
            "contour route needs arguments in [0.1, 10], got ({x}, {y})"
        )));
    }
    let params = EnsembleParams::new(alpha, theta, 1)?;
    let c = kernel_finite::line_abscissa(&params);
    let (lx, ly) = (x.ln(), y.ln());

    let ln_s = |s: C64| {
        ln_gamma_or_nan(alpha + 1.0 + theta * s) - ln_gamma_or_nan(-s) - (theta * s + 1.0) * lx
    };
    let ln_t =
        |t: C64| ln_gamma_or_nan(-t) - ln_gamma_or_nan(alpha + 1.0 + theta * t) + theta * t * ly;

    let s_path = hard_edge_s_contour(c);
    let s_ref = sample_max(&s_path, |s| ln_s(s).re);
    let e = |s: C64| (ln_s(s) - s_ref).exp();

    // the tail of ln_t decays like −t ln t on both arms
    let arm = |r: f64| ln_t(C64::new(r, HAIRPIN_HALF_WIDTH)).re;
    let t_peak = (0..=400)
        .map(|i| arm(i as f64 * 0.25))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut reach = 4.0;
    while (arm(reach) > t_peak - 45.0 || arm(reach) > arm(reach - 1.0)) && reach < 4000.0 {
        reach += 2.0;
    }
    let t_path = hard_edge_hairpin(c, reach);
    let t_ref = sample_max(&t_path, |t| ln_t(t).re);

    let keep: Vec<C64> = t_path
        .segments()
        .iter()
        .flat_map(|seg| (0..=8).map(move |j| seg.point(j as f64 / 8.0)))
        .collect();
    let (rule, _) = NodeRule::from_adaptive(e, &s_path, 1e-15, &keep, 0.5)?;
    let lr = LineRule::new(c, rule, e);

    let f = |t: C64| (ln_t(t) - t_ref).exp() * lr.cauchy_direct(t);
    let mag = t_path
        .segments()
        .iter()
        .flat_map(|seg| (0..=16).map(move |j| seg.point(j as f64 / 16.0)))
        .map(|t| f(t).norm())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);
    let out = quad::integrate_contour(f, &t_path, (1e-13 * mag).max(f64::MIN_POSITIVE))?;
    // θ/(2πi)² = −θ/(4π²)
    let scale = -theta * (s_ref + t_ref).exp() / (4.0 * PI * PI);
    let value = out.value * scale;
    let err = (out.abs_err_est + lr.build_err() * mag) * scale.abs();
    let budget = 10.0 * err + 1e-9 * value.re.abs();
    if value.im.abs() > budget {
        return Err(LimitsError::ImaginaryResidual {
            im: value.im,
            budget,
        });
    }
    Ok(value.re)
}

/// Largest finite value of `g` at 17 points per segment; bounded segments
/// are sampled uniformly and rays through their stretched parameter.
fn sample_max(path: &ContourPath, g: impl Fn(C64) -> f64) -> f64 {
    path.segments()
        .iter()
        .flat_map(|seg| (0..=16).map(move |j| seg.point(0.98 * j as f64 / 16.0)))
        .map(g)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn describe(points: &[(f64, f64)]) -> String {
    let body: Vec<String> = points.iter().map(|(a, b)| format!("({a},{b})")).collect();
    body.join(" ")
}

/// Evaluates `err(n, point)` for every pair in parallel and reduces to one
/// row per `n`, in the order of `ns`.
fn study<F>(ns: &[usize], points: &[(f64, f64)], err: F) -> Result<Vec<ConvergenceRow>, LimitsError>
where
    F: Fn(usize, f64, f64) -> Result<f64, LimitsError> + Sync + Send,
{
    if ns.is_empty() || points.is_empty() {
        return Err(LimitsError::Domain(
            "study needs at least one n and one point".into(),
        ));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LimitsError::Domain(format!(
            "study sizes must increase, got {ns:?}"
        )));
    }
    let jobs: Vec<(usize, f64, f64)> = ns
        .iter()
        .flat_map(|&n| points.iter().map(move |&(a, b)| (n, a, b)))
        .collect();
    let errs = par::map(&jobs, |&(n, a, b)| err(n, a, b));
    let grid = describe(points);
    let mut rows = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let mut sup = 0.0_f64;
        for r in &errs[i * points.len()..(i + 1) * points.len()] {
            let v = r.clone()?;
            sup = sup.max(v);
        }
        rows.push(ConvergenceRow {
            n,
            sup_error: sup,
            grid: grid.clone(),
        });
    }
    Ok(rows)
}

/// `|n^{−1/θ} K_n(x n^{−1/θ}, y n^{−1/θ}) − K^{(α,θ)}(x, y)|` by the residue
/// route, against [`hard_edge_uint`].
pub fn study_hard_edge(
    alpha: f64,
    theta: f64,
    points: &[(f64, f64)],
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>, LimitsError> {
    if ns.iter().any(|&n| n > kernel_finite::RESIDUE_MAX_N) {
        return Err(LimitsError::Domain(format!(
            "hard-edge study limited to n <= {}",
            kernel_finite::RESIDUE_MAX_N
        )));
    }
    let targets = par::map(points, |&(x, y)| hard_edge_uint(alpha, theta, x, y));
    let targets: Vec<f64> = targets.into_iter().collect::<Result<_, _>>()?;
    let lookup = |x: f64, y: f64| {
        let i = points
            .iter()
            .position(|p| *p == (x, y))
            .expect("point from the grid");
        targets[i]
    };
    study(ns, points, |n, x, y| {
        let p = EnsembleParams::new(alpha, theta, n)?;
        let s = (n as f64).powf(-1.0 / theta);
        let k = kernel_finite::kernel_residue(&p, x * s, y * s)?;
        Ok((s * k - lookup(x, y)).abs())
    })
}

/// Sup over the grid of `|kernel_scaled_bulk − K_sin|` at angle `phi`.
pub fn study_bulk(
    alpha: f64,
    theta: f64,
    phi: f64,
    points: &[(f64, f64)],
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>, LimitsError> {
    study(ns, points, |n, xi, eta| {
        let p = EnsembleParams::new(alpha, theta, n)?;
        let v = kernel_finite::kernel_scaled_bulk(&p, phi, xi, eta)?;
        Ok((v - special::sine_kernel(xi, eta)).abs())
    })
}

/// Sup over the grid of `|kernel_scaled_edge − K_Ai|`.
pub fn study_edge(
    alpha: f64,
    theta: f64,
    points: &[(f64, f64)],
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>, LimitsError> {
    study(ns, points, |n, xi, eta| {
        let p = EnsembleParams::new(alpha, theta, n)?;
        let v = kernel_finite::kernel_scaled_edge(&p, xi, eta)?;
        Ok((v - special::airy_kernel(xi, eta)?).abs())
    })
}

/// The square grid `values × values`.
pub fn square_grid(values: &[f64]) -> Vec<(f64, f64)> {
    values
        .iter()
        .flat_map(|a| values.iter().map(move |b| (*a, *b)))
        .collect()
}
