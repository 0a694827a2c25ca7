//! The correlation kernel `K_n(x, y) = Σ_{j<n} p_j(x) q_j(y^θ) x^α e^{−x}`
//! at finite `n`, by three independent routes:
//!
//! * [`kernel_series`]: the defining finite sum;
//! * [`kernel_contour`]: the double integral over a vertical line `s` and a
//!   rectangle `t` enclosing `0, …, n−1`;
//! * [`kernel_residue`]: the `t`-integral done by residues, leaving one
//!   line integral in `s`.
//!
//! For large `n` the [`saddle`] contours and the [`scaled`] evaluators keep
//! every integrand of order one.

pub mod saddle;
pub mod scaled;

mod cauchy;

use std::f64::consts::PI;

use thiserror::Error;

use crate::biopoly::{self, ln_factorial, ln_gamma_pos, BiopolyError};
use crate::equilibrium::EquilibriumError;
use crate::params::{EnsembleParams, ParamsError};
use crate::quad::{self, ContourPath, NodeRule, QuadError, VerticalLineSpec};
use crate::special::{self, SpecialError};
use crate::C64;

pub use cauchy::{LineRule, Side};
pub use saddle::{
    build_bulk_contours, build_edge_contours, eval_phase, saddle_points, BulkContours,
    EdgeContours, PhaseEval, SaddleData,
};
pub use scaled::{kernel_scaled_bulk, kernel_scaled_edge, BulkPoint, EdgePoint};

/// Largest `n` accepted by [`kernel_series`].
pub const SERIES_MAX_N: usize = 30;
/// Largest `n` accepted by [`kernel_contour`].
pub const CONTOUR_MAX_N: usize = 60;
/// Largest `n` accepted by [`kernel_residue`].
pub const RESIDUE_MAX_N: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("n = {n} exceeds the limit {max} of this method")]
    TooLarge { n: usize, max: usize },
    #[error("kernel arguments must be positive, got ({x}, {y})")]
    NonPositiveArgument { x: f64, y: f64 },
    #[error("contours pinch: |s − t| = {dist:e}")]
    ContourPinch { dist: f64 },
    #[error("imaginary part {im:e} of the kernel exceeds its error budget {budget:e}")]
    ImaginaryResidual { im: f64, budget: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("{0} lies on a branch cut of the phase function")]
    BranchCut(C64),
    #[error("integrand is not finite at {0}")]
    NonFinite(C64),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Biopoly(#[from] BiopolyError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

/// A kernel value with an absolute error estimate and the number of
/// integrand (or term) evaluations spent on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEstimate {
    pub value: f64,
    pub abs_err: f64,
    pub n_evals: usize,
}

fn check_args(x: f64, y: f64) -> Result<(), KernelError> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(KernelError::NonPositiveArgument { x, y })
    }
}

fn check_n(params: &EnsembleParams, max: usize) -> Result<(), KernelError> {
    if params.n() > max {
        Err(KernelError::TooLarge { n: params.n(), max })
    } else {
        Ok(())
    }
}

/// Abscissa `(max{0, 1−(α+1)/θ} − 1)/2` of the `s`-line. It is negative,
/// and `α+1+θc ≥ min((α+1)/2, θ/2) > 0` keeps every pole of
/// `Γ(α+1+θs)` to its left.
pub fn line_abscissa(params: &EnsembleParams) -> f64 {
    0.5 * (params.abscissa_floor() - 1.0)
}

/// `ln Π_{i<n} (s−i) = ln Γ(s+1)/Γ(s−n+1)`, any branch.
pub(crate) fn ln_falling(s: C64, n: usize) -> C64 {
    let integer_hit = s.im == 0.0 && s.re.fract() == 0.0 && s.re < 0.0;
    if n <= 64 || integer_hit {
        return (0..n).map(|i| (s - i as f64).ln()).sum();
    }
    special::log_gamma_ratio_shifted(s + n as f64, s, n).unwrap_or(C64::new(f64::NAN, 0.0))
}

/// `ln Γ(z)` off the poles; NaN on a pole.
pub(crate) fn ln_gamma_c(z: C64) -> C64 {
    special::log_gamma(z).unwrap_or(C64::new(f64::NAN, 0.0))
}

/// `ln [θ Γ(s+1)Γ(α+1+θs)/Γ(s−n+1) · x^{−θs−1}]`, the `s`-factor of the
/// double integral.
pub(crate) fn ln_s_factor(s: C64, lx: f64, params: &EnsembleParams) -> C64 {
    let (alpha, theta) = (params.alpha(), params.theta());
    theta.ln() + ln_gamma_c(alpha + 1.0 + theta * s) + ln_falling(s, params.n())
        - (theta * s + 1.0) * lx
}

/// `ln [Γ(t−n+1)/(Γ(t+1)Γ(α+1+θt)) · y^{θt}]`, the `t`-factor.
pub(crate) fn ln_t_factor(t: C64, ly: f64, params: &EnsembleParams) -> C64 {
    let (alpha, theta) = (params.alpha(), params.theta());
    let rg = special::log_gamma(alpha + 1.0 + theta * t).map(|l| -l);
    // 1/Γ vanishes at its poles
    let rg = rg.unwrap_or(C64::new(f64::NEG_INFINITY, 0.0));
    rg - ln_falling(t, params.n()) + theta * t * ly
}

/// The defining finite sum. Limited to `n ≤ 30`.
pub fn kernel_series(params: &EnsembleParams, x: f64, y: f64) -> Result<f64, KernelError> {
    kernel_series_estimate(params, x, y).map(|e| e.value)
}

/// [`kernel_series`] with a rounding bound `n ε Σ_j |p_j q_j|`.
pub fn kernel_series_estimate(
    params: &EnsembleParams,
    x: f64,
    y: f64,
) -> Result<KernelEstimate, KernelError> {
    check_args(x, y)?;
    check_n(params, SERIES_MAX_N)?;
    let yt = y.powf(params.theta());
    let mut sum = special::Neumaier::new();
    let mut mass = 0.0;
    for j in 0..params.n() {
        let p = biopoly::p_weighted_explicit(j, x, params)?;
        let q = biopoly::q_poly(j, yt, params)?;
        sum.add(p * q);
        mass += (p * q).abs();
    }
    Ok(KernelEstimate {
        value: sum.value(),
        abs_err: params.n() as f64 * f64::EPSILON * mass,
        n_evals: params.n(),
    })
}

/// Log-modulus and sign of the residue weight
/// `(−1)^{n−1−k} y^{θk} / ((n−1−k)! k! Γ(α+1+θk))`.
fn residue_weight(k: usize, ly: f64, params: &EnsembleParams) -> (f64, f64) {
    let n = params.n();
    let (alpha, theta) = (params.alpha(), params.theta());
    let l = theta * k as f64 * ly
        - ln_factorial(n - 1 - k)
        - ln_factorial(k)
        - ln_gamma_pos(alpha + 1.0 + theta * k as f64);
    let sign = if (n - 1 - k).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    (l, sign)
}

/// `K_n` with the `t`-integral replaced by its residues at `0, …, n−1`:
/// `θ/(2πi) ∫ Γ(α+1+θs) x^{−θs−1} Π_i (s−i) Σ_k w_k/(s−k) ds` on the line
/// [`line_abscissa`]. Limited to `n ≤ 200`; the alternating sum loses
/// accuracy when `y^θ` is large compared with `n`.
pub fn kernel_residue(params: &EnsembleParams, x: f64, y: f64) -> Result<f64, KernelError> {
    kernel_residue_estimate(params, x, y).map(|e| e.value)
}

pub fn kernel_residue_estimate(
    params: &EnsembleParams,
    x: f64,
    y: f64,
) -> Result<KernelEstimate, KernelError> {
    check_args(x, y)?;
    check_n(params, RESIDUE_MAX_N)?;
    let n = params.n();
    let (alpha, theta) = (params.alpha(), params.theta());
    let (lx, ly) = (x.ln(), y.ln());
    let weights: Vec<(f64, f64)> = (0..n).map(|k| residue_weight(k, ly, params)).collect();
    let wmax = weights
        .iter()
        .map(|w| w.0)
        .fold(f64::NEG_INFINITY, f64::max);
    // modulus of the weighted sum, and the same sum taken in absolute value
    let parts = |s: C64| {
        let mut sum = quad::CompensatedSum::new();
        let mut abs = 0.0;
        for (k, (l, sign)) in weights.iter().enumerate() {
            let term = *sign * (l - wmax).exp() / (s - k as f64);
            abs += term.norm();
            sum.add(term);
        }
        let prefactor = theta.ln() + ln_gamma_c(alpha + 1.0 + theta * s) + ln_falling(s, n)
            - (theta * s + 1.0) * lx
            + wmax;
        (sum.value(), abs, prefactor)
    };
    let integrand = |s: C64| {
        let (sum, _, prefactor) = parts(s);
        (prefactor + sum.ln()).exp()
    };
    let mut spec = VerticalLineSpec::new(line_abscissa(params));
    spec.initial_height = spec.initial_height.max(n as f64);
    let (peak, noise) = (0..64)
        .map(|i| {
            let (sum, abs, prefactor) = parts(C64::new(
                spec.c,
                0.25 * spec.initial_height * i as f64 / 16.0,
            ));
            let m = prefactor.re.exp();
            (m * sum.norm(), m * abs)
        })
        .filter(|(v, a)| v.is_finite() && a.is_finite())
        .fold((0.0_f64, 0.0_f64), |(p, a), (v, b)| (p.max(v), a.max(b)));
    // the alternating sum cancels, so its rounding error sets a floor
    let tol = (spec.initial_height * (1e-13 * peak).max(1e-15 * noise)).max(f64::MIN_POSITIVE);
    let out = quad::integrate_vertical(integrand, &spec, tol)?;
    let out = out.scale(C64::new(0.0, -0.5 / PI));
    Ok(KernelEstimate {
        value: out.value.re,
        abs_err: out.abs_err_est,
        n_evals: out.n_evals,
    })
}

/// Geometry of the rectangle used by [`kernel_contour`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub left: f64,
    pub right: f64,
    pub half_height: f64,
}

impl Rectangle {
    /// Corners `(c+ε) ± ih` and `(n−½) ± ih` with `ε = min(¼, −c/2)`.
    pub fn for_params(params: &EnsembleParams, half_height: f64) -> Self {
        let c = line_abscissa(params);
        let eps = 0.25_f64.min(-0.5 * c);
        Rectangle {
            left: c + eps,
            right: params.n() as f64 - 0.5,
            half_height,
        }
    }

    /// Counterclockwise boundary.
    pub fn path(&self) -> ContourPath {
        let h = self.half_height;
        let pts = [
            C64::new(self.left, -h),
            C64::new(self.right, -h),
            C64::new(self.right, h),
            C64::new(self.left, h),
        ];
        ContourPath::polyline(&pts, true).expect("rectangle has four distinct corners")
    }
}

/// The double integral with `s` on the line [`line_abscissa`] and `t` on the
/// rectangle of [`Rectangle::for_params`] with half-height 1. Limited to
/// `n ≤ 60`.
pub fn kernel_contour(params: &EnsembleParams, x: f64, y: f64) -> Result<f64, KernelError> {
    kernel_contour_estimate(params, x, y, 1.0).map(|e| e.value)
}

pub fn kernel_contour_estimate(
    params: &EnsembleParams,
    x: f64,
    y: f64,
    half_height: f64,
) -> Result<KernelEstimate, KernelError> {
    check_args(x, y)?;
    check_n(params, CONTOUR_MAX_N)?;
    let n = params.n();
    let (lx, ly) = (x.ln(), y.ln());
    let c = line_abscissa(params);
    let rect = Rectangle::for_params(params, half_height);
    let gap = rect.left - c;

    // Scale both factors so their peaks are of order one.
    let s_ref = (0..32)
        .map(|i| {
            ln_s_factor(
                C64::new(c, i as f64 * 0.5 * (n as f64 + 4.0) / 8.0),
                lx,
                params,
            )
            .re
        })
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let e = |s: C64| (ln_s_factor(s, lx, params) - s_ref).exp();

    let span = half_height + 2.0;
    let mut keep: Vec<C64> = Vec::new();
    let steps = ((2.0 * half_height) / (0.5 * gap)).ceil() as usize;
    for i in 0..=steps {
        let im = -half_height + 2.0 * half_height * i as f64 / steps as f64;
        keep.push(C64::new(rect.left, im));
    }
    let breaks: Vec<f64> = (0..=8)
        .map(|i| -span + 2.0 * span * i as f64 / 8.0)
        .collect();
    let line = ContourPath::vertical_line(c, &breaks, (n as f64).max(4.0));
    let (rule, _) = NodeRule::from_adaptive(e, &line, 1e-15 * (n as f64 + 4.0), &keep, 0.5)?;
    let lr = LineRule::new(c, rule, e);

    let path = rect.path();
    let t_ref = {
        let perim = path.segments();
        let mut m = f64::NEG_INFINITY;
        for seg in perim {
            for j in 0..=16 {
                let v = ln_t_factor(seg.point(j as f64 / 16.0), ly, params).re;
                if v.is_finite() {
                    m = m.max(v);
                }
            }
        }
        m
    };
    let f = |t: C64| (ln_t_factor(t, ly, params) - t_ref).exp() * lr.cauchy_direct(t);
    let mag = path
        .segments()
        .iter()
        .flat_map(|seg| (0..=16).map(move |j| seg.point(j as f64 / 16.0)))
        .map(|t| f(t).norm())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);
    let perimeter = 2.0 * (rect.right - rect.left) + 4.0 * half_height;
    let out = quad::integrate_contour(f, &path, (2e-13 * mag * perimeter).max(f64::MIN_POSITIVE))?;
    // 1/(2πi)² = −1/(4π²)
    let scale = -(s_ref + t_ref).exp() / (4.0 * PI * PI);
    let value = out.value * scale;
    let err = (out.abs_err_est + lr.build_err() * mag) * scale.abs();
    let budget = 10.0 * err + 1e-9 * value.re.abs();
    if value.im.abs() > budget {
        return Err(KernelError::ImaginaryResidual {
            im: value.im,
            budget,
        });
    }
    Ok(KernelEstimate {
        value: value.re,
        abs_err: err,
        n_evals: out.n_evals + lr.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, theta: f64, n: usize) -> EnsembleParams {
        EnsembleParams::new(alpha, theta, n).unwrap()
    }

    #[test]
    fn abscissa_examples() {
        assert_eq!(line_abscissa(&p(0.0, 1.0, 3)), -0.5);
        for (a, t) in [(-0.9, 3.0), (-0.5, 2.5), (0.0, 0.3), (2.0, 1.0)] {
            let pr = p(a, t, 1);
            let c = line_abscissa(&pr);
            assert!(c < 0.0);
            assert!(a + 1.0 + t * c >= ((a + 1.0) / 2.0).min(t / 2.0) - 1e-15);
        }
    }

    #[test]
    fn single_particle_kernel_is_the_weight() {
        for x in [0.3, 1.0, 4.0] {
            let k = kernel_series(&p(0.0, 1.0, 1), x, x).unwrap();
            assert!((k - (-x as f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn classical_laguerre_two_particles() {
        // orthonormal Laguerre: L0 = 1, L1 = 1 − x
        let x: f64 = 1.0;
        let want = (1.0 + (1.0 - x) * (1.0 - x)) * (-x).exp();
        let k = kernel_series(&p(0.0, 1.0, 2), x, x).unwrap();
        assert!((k - want).abs() < 1e-14);
        let x: f64 = 0.7;
        let y: f64 = 2.1;
        let want = (1.0 + (1.0 - x) * (1.0 - y)) * (-x).exp();
        assert!((kernel_series(&p(0.0, 1.0, 2), x, y).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn residue_matches_series() {
        let pr = p(0.0, 1.0, 5);
        let a = kernel_series(&pr, 2.0, 2.0).unwrap();
        let b = kernel_residue(&pr, 2.0, 2.0).unwrap();
        assert!((a - b).abs() < 1e-9 * a.abs(), "{a} {b}");
        let one = p(0.3, 1.7, 1);
        let b = kernel_residue(&one, 1.2, 0.4).unwrap();
        let a = kernel_series(&one, 1.2, 0.4).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn contour_matches_series() {
        for (pr, x, y) in [(p(0.0, 1.0, 5), 2.0, 2.0), (p(0.5, 2.0, 8), 1.3, 0.7)] {
            let a = kernel_series(&pr, x, y).unwrap();
            let b = kernel_contour(&pr, x, y).unwrap();
            assert!((a - b).abs() < 1e-8 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn contour_matches_residue() {
        let pr = p(-0.5, 1.5, 10);
        let a = kernel_contour(&pr, 0.8, 1.1).unwrap();
        let b = kernel_residue(&pr, 0.8, 1.1).unwrap();
        assert!((a - b).abs() < 1e-7 * a.abs(), "{a} {b}");
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            kernel_series(&p(0.0, 1.0, 31), 1.0, 1.0),
            Err(KernelError::TooLarge { .. })
        ));
        assert!(kernel_residue(&p(0.0, 1.0, 3), 0.0, 1.0).is_err());
    }
}
