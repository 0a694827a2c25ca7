//! Rescaled kernels at a bulk point and at the soft edge, evaluated on the
//! saddle contours so that every integrand stays of order one.
//!
//! In the variables `x = θa^{1/θ}`, `y = θb^{1/θ}` the kernel is
//! `1/((2πi)² a^{1/θ}) ∫_C ds ∮_Σ dt e^{F(s;a) − F(t;b)}/(s−t)`.

use std::f64::consts::PI;

use crate::equilibrium;
use crate::params::EnsembleParams;
use crate::quad::{ContourPath, NodeRule, QuadError};
use crate::C64;

use super::cauchy::{LineRule, Side};
use super::saddle::{self, ln_phase, BulkContours};
use super::KernelError;

/// Smallest `n` for the scaled evaluators.
pub const SCALED_MIN_N: usize = 20;

/// A rescaled bulk kernel value and its two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkPoint {
    /// The conjugated, normalised kernel; tends to the sine kernel.
    pub value: f64,
    /// Contribution of the segment between the saddles (closed form).
    pub segment_part: f64,
    /// Contribution of the curved contour.
    pub curved_part: f64,
    /// `K_n` at the unscaled arguments.
    pub raw: f64,
}

/// A rescaled edge kernel value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePoint {
    /// The conjugated, normalised kernel; tends to the Airy kernel.
    pub value: f64,
    /// `ln |K_n|` at the unscaled arguments.
    pub ln_raw: f64,
}

fn check_n(params: &EnsembleParams) -> Result<(), KernelError> {
    if params.n() < SCALED_MIN_N {
        return Err(KernelError::Domain(format!(
            "scaled kernels need n >= {SCALED_MIN_N}, got {}",
            params.n()
        )));
    }
    Ok(())
}

fn node_rule(
    f: impl Fn(C64) -> C64,
    path: &ContourPath,
    tol: f64,
) -> Result<NodeRule, KernelError> {
    match NodeRule::from_adaptive(f, path, tol, &[], 1.0) {
        Ok((rule, _)) => Ok(rule),
        Err(e) => Err(KernelError::Quad(e)),
    }
}

/// Unscaled kernel arguments `(x, y) = (θa^{1/θ}, θb^{1/θ})` of a bulk point:
/// `a = n^θ(x₀ + ξ/(nρ))`, and `b` likewise with `η`.
pub fn bulk_arguments(
    params: &EnsembleParams,
    phi: f64,
    xi: f64,
    eta: f64,
) -> Result<(f64, f64), KernelError> {
    let (a, b) = bulk_scales(params, phi, xi, eta)?;
    let theta = params.theta();
    Ok((theta * a.powf(1.0 / theta), theta * b.powf(1.0 / theta)))
}

fn bulk_scales(
    params: &EnsembleParams,
    phi: f64,
    xi: f64,
    eta: f64,
) -> Result<(f64, f64), KernelError> {
    let theta = params.theta();
    let n = params.n() as f64;
    let x0 = equilibrium::x_of_phi(theta, phi)?;
    let rho = equilibrium::rho_of_phi(theta, phi)?;
    let a = n.powf(theta) * (x0 + xi / (n * rho));
    let b = n.powf(theta) * (x0 + eta / (n * rho));
    if !(a > 0.0 && b > 0.0) {
        return Err(KernelError::Domain(format!(
            "bulk point (xi, eta) = ({xi}, {eta}) leaves the positive axis"
        )));
    }
    Ok((a, b))
}

/// `(1/(2πi a^{1/θ})) ∫_{nw₋}^{nw₊} (b/a)^s ds`
/// `= Im(e^{n w₊ L}) / (π a^{1/θ} L)` with `L = ln(b/a)`.
pub fn segment_integral(n: f64, w_plus: C64, ln_a: f64, ln_b: f64, theta: f64) -> f64 {
    let l = ln_b - ln_a;
    let inv_root = (-ln_a / theta).exp();
    if l == 0.0 {
        return n * w_plus.im * inv_root / PI;
    }
    let e = (w_plus * n * l).exp();
    e.im * inv_root / (PI * l)
}

/// The conjugated bulk kernel
/// `e^{π cot φ (ξ−η)} / (ρ(φ) x₀^{1−1/θ}) · K_n(nθ(x₀+ξ/(nρ))^{1/θ}, nθ(x₀+η/(nρ))^{1/θ})`,
/// whose limit is the sine kernel.
pub fn kernel_scaled_bulk(
    params: &EnsembleParams,
    phi: f64,
    xi: f64,
    eta: f64,
) -> Result<f64, KernelError> {
    kernel_scaled_bulk_parts(params, phi, xi, eta).map(|p| p.value)
}

pub fn kernel_scaled_bulk_parts(
    params: &EnsembleParams,
    phi: f64,
    xi: f64,
    eta: f64,
) -> Result<BulkPoint, KernelError> {
    check_n(params)?;
    let theta = params.theta();
    let n = params.n() as f64;
    let (a, b) = bulk_scales(params, phi, xi, eta)?;
    let (la, lb) = (a.ln(), b.ln());
    let bc = saddle::build_bulk_contours_eps(params, phi, 0.0)?;
    let curved = curved_integral(params, &bc, la, lb)?;
    let segment = segment_integral(n, bc.saddle.w_plus, la, lb, theta);

    let x0 = bc.saddle.x0;
    let rho = equilibrium::rho_of_phi(theta, phi)?;
    let conj = PI / phi.tan() * (xi - eta) - rho.ln() - (1.0 - 1.0 / theta) * x0.ln();
    let k = conj.exp();
    Ok(BulkPoint {
        value: k * (segment + curved),
        segment_part: k * segment,
        curved_part: k * curved,
        raw: segment + curved,
    })
}

/// The principal-value part `I₁` over the two arcs, `t` on an arc taking
/// the boundary value of the `s`-transform from its own side of the line.
fn curved_integral(
    params: &EnsembleParams,
    bc: &BulkContours,
    la: f64,
    lb: f64,
) -> Result<f64, KernelError> {
    let theta = params.theta();
    let n = params.n() as f64;
    let w = bc.saddle.w_plus * n;
    let ref_s = ln_phase(w, la, params).re;
    let ref_t = ln_phase(w, lb, params).re;
    let e = |s: C64| {
        let v = (ln_phase(s, la, params) - ref_s).exp();
        if v.is_finite() {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let t_fn = |t: C64| {
        let v = (ref_t - ln_phase(t, lb, params)).exp();
        if v.is_finite() {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let tol = 2e-12 * bc.width;
    let line_rule = node_rule(e, &bc.line, tol)?;
    let lr = LineRule::new(bc.line_re, line_rule, e);

    let mut total = crate::quad::CompensatedSum::new();
    for (arc, side) in [(&bc.left_arc, Side::Left), (&bc.right_arc, Side::Right)] {
        let rule = node_rule(t_fn, arc, tol)?;
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let tv = t_fn(*t);
            if tv == C64::new(0.0, 0.0) {
                continue;
            }
            let g = lr.cauchy(*t, e(*t), side, bc.width);
            total.add(tv * g * wt);
        }
    }
    // 1/(2πi)² = −1/(4π²)
    let pre = (ref_s - ref_t - la / theta).exp() / (-4.0 * PI * PI);
    let v = total.value() * pre;
    if !v.re.is_finite() {
        return Err(KernelError::NonFinite(w));
    }
    Ok(v.re)
}

/// Unscaled kernel arguments of an edge point:
/// `a = n^θ(x_* + c_* ξ n^{−2/3})`, and `b` likewise with `η`.
pub fn edge_arguments(
    params: &EnsembleParams,
    xi: f64,
    eta: f64,
) -> Result<(f64, f64), KernelError> {
    let (a, b) = edge_scales(params, xi, eta)?;
    let theta = params.theta();
    Ok((theta * a.powf(1.0 / theta), theta * b.powf(1.0 / theta)))
}

fn edge_scales(params: &EnsembleParams, xi: f64, eta: f64) -> Result<(f64, f64), KernelError> {
    let theta = params.theta();
    let n = params.n() as f64;
    let (xs, cs) = (saddle::x_star(theta), saddle::c_star(theta));
    let a = n.powf(theta) * (xs + cs * xi * n.powf(-2.0 / 3.0));
    let b = n.powf(theta) * (xs + cs * eta * n.powf(-2.0 / 3.0));
    if !(a > 0.0 && b > 0.0) {
        return Err(KernelError::Domain(format!(
            "edge point (xi, eta) = ({xi}, {eta}) leaves the positive axis"
        )));
    }
    Ok((a, b))
}

/// The conjugated edge kernel
/// `e^{2^{−1/3}(1+θ)^{2/3} n^{1/3}(ξ−η)} (1+θ)^{2/3+1/θ} 2^{−1/3} n^{1/3} · K_n(…)`
/// at `x = nθ(x_* + c_*ξ n^{−2/3})^{1/θ}` and likewise `y` with `η`; its
/// limit is the Airy kernel.
pub fn kernel_scaled_edge(params: &EnsembleParams, xi: f64, eta: f64) -> Result<f64, KernelError> {
    kernel_scaled_edge_point(params, xi, eta).map(|p| p.value)
}

pub fn kernel_scaled_edge_point(
    params: &EnsembleParams,
    xi: f64,
    eta: f64,
) -> Result<EdgePoint, KernelError> {
    check_n(params)?;
    let theta = params.theta();
    let n = params.n() as f64;
    let (a, b) = edge_scales(params, xi, eta)?;
    let (la, lb) = (a.ln(), b.ln());
    let ec = saddle::build_edge_contours(params)?;
    let center = C64::new(ec.center, 0.0);
    let ref_s = ln_phase(center, la, params).re;
    let ref_t = ln_phase(center, lb, params).re;
    let e = |s: C64| {
        let v = (ln_phase(s, la, params) - ref_s).exp();
        if v.is_finite() {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let t_fn = |t: C64| {
        let v = (ref_t - ln_phase(t, lb, params)).exp();
        if v.is_finite() {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let tol = 2e-12 * ec.scale;
    let s_rule = node_rule(e, &ec.c, tol)?;
    let t_rule = node_rule(t_fn, &ec.sigma, tol)?;
    let sv: Vec<(C64, C64)> = s_rule
        .nodes
        .iter()
        .zip(&s_rule.weights)
        .map(|(s, w)| (*s, e(*s) * w))
        .filter(|(_, v)| *v != C64::new(0.0, 0.0))
        .collect();
    let mut total = crate::quad::CompensatedSum::new();
    for (t, wt) in t_rule.nodes.iter().zip(&t_rule.weights) {
        let tv = t_fn(*t) * wt;
        if tv == C64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = crate::quad::CompensatedSum::new();
        for (s, v) in &sv {
            inner.add(v / (s - t));
        }
        total.add(tv * inner.value());
    }
    let sum = total.value();
    if !sum.is_finite() {
        return Err(KernelError::Quad(QuadError::NonFinite { at: center }));
    }
    // K_n = e^{ref_s − ref_t} a^{−1/θ} · sum / (2πi)²
    let ln_k = ref_s - ref_t - la / theta;
    let k = -sum.re / (4.0 * PI * PI);
    let conj = 2f64.powf(-1.0 / 3.0) * (1.0 + theta).powf(2.0 / 3.0) * n.cbrt() * (xi - eta)
        + (2.0 / 3.0 + 1.0 / theta) * (1.0 + theta).ln()
        - std::f64::consts::LN_2 / 3.0
        + n.ln() / 3.0;
    Ok(EdgePoint {
        value: k * (ln_k + conj).exp(),
        ln_raw: ln_k + k.abs().ln(),
    })
}
