//! Limiting macroscopic density of the ensemble.
//!
//! The density is parametrised by an angle φ ∈ (0, π/(1+θ)):
//! x(φ) = sin((1+θ)φ)^{1+θ} / (sin φ · sin(θφ)^θ) runs from the soft edge
//! (1+θ)^{1+θ}/θ^θ at φ → 0 down to the hard edge 0 at φ → π/(1+θ).
//! In these coordinates the density is the Fuss–Catalan law. The same law
//! in the original particle coordinate v = θ x^{1/θ} is `ftheta_via_jroots`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::quad::{integrate_interval, QuadError};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("x = {x} is outside the support (0, {edge})")]
    OutOfSupport { x: f64, edge: f64 },
    #[error("root search for J(z) = {x} did not converge")]
    NoConvergence { x: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A point of the parametrisation together with the density there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPoint {
    pub phi: f64,
    pub x: f64,
    pub rho: f64,
}

impl PhiPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self, EquilibriumError> {
        Ok(PhiPoint {
            phi,
            x: x_of_phi(theta, phi)?,
            rho: rho_of_phi(theta, phi)?,
        })
    }
}

fn check_theta(theta: f64) -> Result<(), EquilibriumError> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        Err(EquilibriumError::Domain(format!(
            "theta must be positive, got {theta}"
        )))
    }
}

fn check_phi(theta: f64, phi: f64) -> Result<(), EquilibriumError> {
    check_theta(theta)?;
    if phi > 0.0 && phi < phi_max(theta) {
        Ok(())
    } else {
        Err(EquilibriumError::Domain(format!(
            "phi = {phi} outside (0, {})",
            phi_max(theta)
        )))
    }
}

/// Upper end π/(1+θ) of the angle range.
pub fn phi_max(theta: f64) -> f64 {
    PI / (1.0 + theta)
}

/// Soft edge (1+θ)^{1+θ}/θ^θ of the support in the φ-coordinates.
pub fn soft_edge(theta: f64) -> f64 {
    ((1.0 + theta) * (1.0 + theta).ln() - theta * theta.ln()).exp()
}

/// Soft edge (1+θ)^{1+1/θ} of the support of `ftheta_via_jroots`.
pub fn soft_edge_original(theta: f64) -> f64 {
    ((1.0 + 1.0 / theta) * (1.0 + theta).ln()).exp()
}

pub fn x_of_phi(theta: f64, phi: f64) -> Result<f64, EquilibriumError> {
    check_phi(theta, phi)?;
    Ok(ln_x(theta, phi).exp())
}

fn ln_x(theta: f64, phi: f64) -> f64 {
    (1.0 + theta) * ((1.0 + theta) * phi).sin().ln()
        - phi.sin().ln()
        - theta * (theta * phi).sin().ln()
}

/// x′(φ)/x(φ) from the logarithmic derivative of the parametrisation.
fn ln_x_prime(theta: f64, phi: f64) -> f64 {
    let t1 = 1.0 + theta;
    t1 * t1 / (t1 * phi).tan() - 1.0 / phi.tan() - theta * theta / (theta * phi).tan()
}

/// ρ(φ) = sin²φ sin(θφ)^{θ−1} / (π sin((1+θ)φ)^θ).
pub fn rho_of_phi(theta: f64, phi: f64) -> Result<f64, EquilibriumError> {
    check_phi(theta, phi)?;
    let rho = rho_product_form(theta, phi);
    let alt = rho_ratio_form(theta, phi);
    debug_assert!(
        (rho - alt).abs() <= 1e-12 * rho.abs().max(alt.abs()),
        "density forms disagree at theta={theta}, phi={phi}: {rho} vs {alt}"
    );
    Ok(rho)
}

fn rho_product_form(theta: f64, phi: f64) -> f64 {
    let ln = 2.0 * phi.sin().ln() + (theta - 1.0) * (theta * phi).sin().ln()
        - theta * ((1.0 + theta) * phi).sin().ln();
    ln.exp() / PI
}

/// ρ(φ) = sin((1+θ)φ) sin φ / (π x sin θφ).
pub fn rho_ratio_form(theta: f64, phi: f64) -> f64 {
    let x = ln_x(theta, phi).exp();
    ((1.0 + theta) * phi).sin() * phi.sin() / (PI * x * (theta * phi).sin())
}

/// Inverse of `x_of_phi` by bisection.
pub fn phi_of_x(theta: f64, x: f64) -> Result<f64, EquilibriumError> {
    phi_of_x_tol(theta, x, 1e-12)
}

fn phi_of_x_tol(theta: f64, x: f64, rel: f64) -> Result<f64, EquilibriumError> {
    check_theta(theta)?;
    let edge = soft_edge(theta);
    if !(x > 0.0 && x < edge) {
        return Err(EquilibriumError::OutOfSupport { x, edge });
    }
    let target = x.ln();
    let (mut lo, mut hi) = (0.0, phi_max(theta));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let lx = ln_x(theta, mid);
        // x is decreasing in φ
        if lx > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (lx - target).abs() < 0.5 * rel || hi - lo < 1e-17 {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// k-th moment ∫ x^k ρ dx, integrated in the angle variable.
pub fn density_moment(theta: f64, k: u32) -> Result<f64, EquilibriumError> {
    check_theta(theta)?;
    if k > 8 {
        return Err(EquilibriumError::Domain(format!(
            "moment order {k} exceeds 8"
        )));
    }
    let integrand = |phi: f64| {
        if phi <= 0.0 || phi >= phi_max(theta) {
            return C64::new(0.0, 0.0);
        }
        let lx = ln_x(theta, phi);
        let dens_times_dx = ((1.0 + theta) * phi).sin() * phi.sin() / (PI * (theta * phi).sin())
            * ln_x_prime(theta, phi).abs();
        C64::new((k as f64 * lx).exp() * dens_times_dx, 0.0)
    };
    let out = integrate_interval(integrand, 0.0, phi_max(theta), 1e-13)?;
    Ok(out.value.re)
}

/// 1/(θk+1) · C((1+θ)k, k), in log-Gamma form for real θ.
pub fn fuss_catalan(theta: f64, k: u32) -> f64 {
    use crate::special::ln_gamma_real;
    let k = k as f64;
    let lg = |x: f64| ln_gamma_real(x).map(|v| v.0).unwrap_or(f64::NAN);
    let top = (1.0 + theta) * k;
    (lg(top + 1.0) - lg(k + 1.0) - lg(top - k + 1.0)).exp() / (theta * k + 1.0)
}

/// Density of the law in the coordinate v = θ x^{1/θ}, from the root I₊ of
/// θ(z+1)((z+1)/z)^{1/θ} = v with positive imaginary part.
pub fn ftheta_via_jroots(theta: f64, v: f64) -> Result<f64, EquilibriumError> {
    check_theta(theta)?;
    if theta < 1.0 {
        return Err(EquilibriumError::Domain(format!(
            "theta must be at least 1, got {theta}"
        )));
    }
    let edge = soft_edge_original(theta);
    if !(v > 0.0 && v < edge) {
        return Err(EquilibriumError::OutOfSupport { x: v, edge });
    }
    let root = j_root(theta, v)?;
    Ok(theta * root.im / (PI * v))
}

/// ln J(z) − ln v, principal branches, and its derivative.
fn j_residual(theta: f64, z: C64, ln_v: f64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    let g = theta.ln() + (1.0 + 1.0 / theta) * (z + one).ln() - z.ln() / theta - ln_v;
    let dg = (1.0 + 1.0 / theta) / (z + one) - 1.0 / (theta * z);
    (g, dg)
}

fn newton(theta: f64, mut z: C64, ln_v: f64) -> Option<C64> {
    for _ in 0..100 {
        let (g, dg) = j_residual(theta, z, ln_v);
        if g.norm() < 1e-15 {
            return Some(z);
        }
        let mut step = g / dg;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = z - step;
            if cand.im > 0.0 && j_residual(theta, cand, ln_v).0.norm() < g.norm() {
                z = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let (g, _) = j_residual(theta, z, ln_v);
    (g.norm() < 1e-12).then_some(z)
}

fn j_root(theta: f64, v: f64) -> Result<C64, EquilibriumError> {
    let ln_v = v.ln();
    // Rough guess from the angle parametrisation, where the root is
    // sin φ e^{i(1+θ)φ}/sin θφ at x = (v/θ)^θ.
    let guess_at = |phi: f64| C64::from_polar(phi.sin() / (theta * phi).sin(), (1.0 + theta) * phi);
    let x = (theta * (v / theta).ln()).exp();
    if let Ok(phi) = phi_of_x_tol(theta, x, 1e-2) {
        if let Some(z) = newton(theta, guess_at(phi), ln_v) {
            return Ok(z);
        }
    }
    // Fallback: best starting point on a 64-point scan of the angle range.
    let best = (1..64)
        .map(|i| guess_at(phi_max(theta) * i as f64 / 64.0))
        .min_by(|a, b| {
            let ra = j_residual(theta, *a, ln_v).0.norm();
            let rb = j_residual(theta, *b, ln_v).0.norm();
            ra.total_cmp(&rb)
        })
        .expect("scan is non-empty");
    newton(theta, best, ln_v).ok_or(EquilibriumError::NoConvergence { x: v })
}

fn cube_root_pair(s: f64) -> f64 {
    (1.0 + s).cbrt() - (1.0 - s).cbrt()
}

/// Closed-form density for θ = 2 in the original coordinate, support (0, 3^{3/2}).
pub fn density_theta2_closed(x: f64) -> Result<f64, EquilibriumError> {
    let edge = 27f64.sqrt();
    if !(x > 0.0 && x < edge) {
        return Err(EquilibriumError::OutOfSupport { x, edge });
    }
    let s = (1.0 - x * x / 27.0).sqrt();
    Ok(3f64.sqrt() / (2.0 * PI * x.cbrt()) * cube_root_pair(s))
}

/// Closed-form density of squared singular values of a product of two
/// Ginibre matrices, support (0, 27/4).
pub fn density_m2_closed(x: f64) -> Result<f64, EquilibriumError> {
    let edge = 27.0 / 4.0;
    if !(x > 0.0 && x < edge) {
        return Err(EquilibriumError::OutOfSupport { x, edge });
    }
    let s = (1.0 - 4.0 * x / 27.0).sqrt();
    Ok(3f64.sqrt() / (2f64.powf(4.0 / 3.0) * PI * x.powf(2.0 / 3.0)) * cube_root_pair(s))
}

/// Log-log slope of ρ against x between two angles.
pub fn loglog_slope(theta: f64, phi_a: f64, phi_b: f64) -> Result<f64, EquilibriumError> {
    let (xa, xb) = (x_of_phi(theta, phi_a)?, x_of_phi(theta, phi_b)?);
    let (ra, rb) = (rho_of_phi(theta, phi_a)?, rho_of_phi(theta, phi_b)?);
    Ok((rb.ln() - ra.ln()) / (xb.ln() - xa.ln()))
}

/// Slope of ln ρ against ln x near the hard edge (expected −θ/(1+θ)).
pub fn hard_edge_exponent(theta: f64) -> Result<f64, EquilibriumError> {
    let m = phi_max(theta);
    loglog_slope(theta, m * (1.0 - 1e-5), m * (1.0 - 1e-6))
}

/// Slope of ln ρ against ln(x_* − x) near the soft edge (expected 1/2).
pub fn soft_edge_exponent(theta: f64) -> Result<f64, EquilibriumError> {
    let edge = soft_edge(theta);
    let (pa, pb) = (1e-3, 1e-4);
    let (da, db) = (edge - x_of_phi(theta, pa)?, edge - x_of_phi(theta, pb)?);
    let (ra, rb) = (rho_of_phi(theta, pa)?, rho_of_phi(theta, pb)?);
    Ok((rb.ln() - ra.ln()) / (db.ln() - da.ln()))
}
