//! The biorthogonal pair of the Laguerre weight: monic polynomials `q_k`
//! (evaluated at `x^θ` by callers), the weighted functions
//! `x^α e^{−x} p_k(x)`, and the bimoments `Γ(α+1+j+kθ)`.
//!
//! Two routes are kept for `x^α e^{−x} p_k`: a Mellin–Barnes line integral
//! ([`p_weighted`]) and an explicit coefficient sum ([`p_weighted_explicit`]).

use std::cell::Cell;
use std::f64::consts::PI;

use thiserror::Error;

use crate::params::EnsembleParams;
use crate::quad::{self, QuadError, QuadOutcome, VerticalLineSpec};
use crate::special::{self, Neumaier, SpecialError};
use crate::C64;

/// Absolute tolerance of the weight integrals behind the defect checks.
pub const DEFECT_TOL: f64 = 1e-9;

/// Largest degree accepted by the explicit sums.
pub const MAX_DEGREE: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiopolyError {
    #[error("{what} overflows a double (log value {log_value}); use the log variant")]
    Overflow { what: &'static str, log_value: f64 },
    #[error("degree {k} exceeds the cancellation guard {max}")]
    DegreeTooLarge { k: usize, max: usize },
    #[error("degree-{k} sum is not finite at x = {x}")]
    CancellationOverflow { k: usize, x: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// `ln Γ(x)` for `x > 0`.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    special::ln_gamma_real(x).map_or(f64::NAN, |(l, _)| l)
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    ln_gamma_pos(k as f64 + 1.0)
}

fn ln_binomial(k: usize, j: usize) -> f64 {
    ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j)
}

fn check_degree(k: usize) -> Result<(), BiopolyError> {
    if k > MAX_DEGREE {
        Err(BiopolyError::DegreeTooLarge { k, max: MAX_DEGREE })
    } else {
        Ok(())
    }
}

/// `ln Γ(α+1+j+kθ)`.
pub fn log_bimoment(j: usize, k: usize, params: &EnsembleParams) -> f64 {
    ln_gamma_pos(params.alpha() + 1.0 + j as f64 + k as f64 * params.theta())
}

/// `m_{j,k} = ∫_0^∞ x^{α+j+θk} e^{−x} dx = Γ(α+1+j+kθ)`.
pub fn bimoment(j: usize, k: usize, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    let l = log_bimoment(j, k, params);
    let v = l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BiopolyError::Overflow {
            what: "bimoment",
            log_value: l,
        })
    }
}

/// `ln D_n`, the log-determinant of `(m_{j,k})_{j,k=0..n}`.
pub fn log_bimoment_det(n: usize, params: &EnsembleParams) -> f64 {
    let lt = params.theta().ln();
    let mut acc = Neumaier::new();
    for k in 0..=n {
        acc.add(ln_factorial(k) + k as f64 * lt + log_bimoment(0, k, params));
    }
    acc.value()
}

/// Monic `q_k(x) = (−1)^k Σ_j C(k,j) (−x)^j Γ(α+1+kθ)/Γ(α+1+jθ)`.
pub fn q_poly(k: usize, x: f64, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    check_degree(k)?;
    let lk = log_bimoment(0, k, params);
    let lx = x.abs().ln();
    let mut acc = Neumaier::new();
    for j in 0..=k {
        if j > 0 && x == 0.0 {
            break;
        }
        let mag = ln_binomial(k, j) + lk - log_bimoment(0, j, params)
            + if j > 0 { j as f64 * lx } else { 0.0 };
        let flip = (k + j) % 2 == 1;
        let neg = flip != (x < 0.0 && j % 2 == 1);
        let term = mag.exp();
        acc.add(if neg { -term } else { term });
    }
    let v = acc.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BiopolyError::CancellationOverflow { k, x })
    }
}

/// Coefficients `e_l` (with a common log scale) of
/// `Π_{i<k} (m + α+1+iθ) = Σ_l e_l · m(m−1)⋯(m−l+1)`.
fn falling_coefficients(k: usize, params: &EnsembleParams) -> (Vec<f64>, f64) {
    let mut e = vec![1.0];
    let mut log_scale = 0.0;
    for i in 0..k {
        let beta = params.alpha() + 1.0 + i as f64 * params.theta();
        let mut next = vec![0.0; e.len() + 1];
        for (l, &c) in e.iter().enumerate() {
            next[l + 1] += c;
            next[l] += (l as f64 + beta) * c;
        }
        let top = next.iter().fold(0.0_f64, |m, &c| m.max(c));
        if top > 1e200 {
            next.iter_mut().for_each(|c| *c /= top);
            log_scale += top.ln();
        }
        e = next;
    }
    (e, log_scale)
}

/// `ln` of the common factor `θ^{−k} / (Γ(α+1+kθ) k!)` in `p_k`.
fn p_prefactor_log(k: usize, params: &EnsembleParams) -> f64 {
    -(k as f64) * params.theta().ln() - log_bimoment(0, k, params) - ln_factorial(k)
}

/// Sum `(−1)^k Σ_l e_l (−x)^l · e^{shift}` with everything kept in log space;
/// with `mass` set, the sum of absolute values of the terms instead.
fn p_sum(
    k: usize,
    x: f64,
    shift: f64,
    mass: bool,
    params: &EnsembleParams,
) -> Result<f64, BiopolyError> {
    check_degree(k)?;
    let (e, log_scale) = falling_coefficients(k, params);
    let base = p_prefactor_log(k, params) + log_scale + shift;
    let lx = x.ln();
    let mut acc = Neumaier::new();
    for (l, &c) in e.iter().enumerate() {
        if l > 0 && x == 0.0 {
            break;
        }
        let xl = if l > 0 { l as f64 * lx } else { 0.0 };
        let term = (c.ln() + base + xl).exp();
        acc.add(if (k + l) % 2 == 1 && !mass {
            -term
        } else {
            term
        });
    }
    let v = acc.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BiopolyError::CancellationOverflow { k, x })
    }
}

/// The polynomial `p_k(x)` of degree `k`, with leading coefficient
/// `1/(k! θ^k Γ(α+1+kθ))`.
pub fn p_poly(k: usize, x: f64, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    if x < 0.0 {
        return Err(BiopolyError::NonPositiveArgument(x));
    }
    p_sum(k, x, 0.0, false, params)
}

/// `x^α e^{−x} p_k(x)` from the explicit coefficients.
pub fn p_weighted_explicit(k: usize, x: f64, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    if !(x > 0.0) {
        return Err(BiopolyError::NonPositiveArgument(x));
    }
    p_sum(k, x, params.alpha() * x.ln() - x, false, params)
}

/// `x^α e^{−x} Σ_l |c_l| x^l` for the coefficients `c_l` of `p_k`: the scale
/// against which roundoff in [`p_weighted_explicit`] is measured.
pub fn p_weighted_mass(k: usize, x: f64, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    if !(x > 0.0) {
        return Err(BiopolyError::NonPositiveArgument(x));
    }
    p_sum(k, x, params.alpha() * x.ln() - x, true, params)
}

/// `Γ(s)/Γ(s−k) = (s−1)(s−2)⋯(s−k)`, in log form.
pub fn log_pochhammer_factor(s: C64, k: usize) -> C64 {
    (1..=k).map(|i| (s - i as f64).ln()).sum()
}

/// Vertical abscissa used by the Mellin–Barnes route: `max{0, 1−(α+1)/θ} + 1/2`,
/// moved right to the real saddle `θs + 1−θ+α = x` of `Γ(θs+1−θ+α) x^{−θs}`
/// when that lies further right. All poles sit left of either choice, and
/// the saddle keeps the integrand modulus comparable to the `e^{−x}` result.
pub fn mb_abscissa(x: f64, params: &EnsembleParams) -> f64 {
    let base = params.abscissa_floor() + 0.5;
    let saddle = (x - 1.0 + params.theta() - params.alpha()) / params.theta();
    base.max(saddle)
}

/// `x^α e^{−x} p_k(x)` as the line integral
/// `θ x^{θ−1} / (2πi Γ(α+1+kθ) k!) ∫ Γ(s)/Γ(s−k) Γ(θs+1−θ+α) x^{−θs} ds`
/// over `Re s =` [`mb_abscissa`]. The absolute tolerance is
/// `rel_tol` times the integrand's peak modulus on the line.
pub fn p_weighted_outcome(
    k: usize,
    x: f64,
    params: &EnsembleParams,
    rel_tol: f64,
) -> Result<QuadOutcome, BiopolyError> {
    check_degree(k)?;
    if !(x > 0.0) {
        return Err(BiopolyError::NonPositiveArgument(x));
    }
    let (alpha, theta) = (params.alpha(), params.theta());
    let lx = x.ln();
    let pre = theta.ln() + (theta - 1.0) * lx - log_bimoment(0, k, params) - ln_factorial(k);
    let integrand = |s: C64| {
        let lg =
            special::log_gamma(theta * s + 1.0 - theta + alpha).unwrap_or(C64::new(f64::NAN, 0.0));
        (log_pochhammer_factor(s, k) + lg - theta * lx * s + pre).exp()
    };
    let spec = VerticalLineSpec::new(mb_abscissa(x, params));
    let peak = (0..8)
        .map(|i| {
            integrand(C64::new(
                spec.c,
                if i == 0 { 0.0 } else { 2f64.powi(i - 1) },
            ))
            .norm()
        })
        .fold(0.0_f64, f64::max);
    let tol = (rel_tol * peak).max(f64::MIN_POSITIVE);
    let out = quad::integrate_vertical(integrand, &spec, tol)?;
    Ok(out.scale(C64::new(0.0, -0.5 / PI)))
}

/// `x^α e^{−x} p_k(x)` by the Mellin–Barnes route.
pub fn p_weighted(k: usize, x: f64, params: &EnsembleParams) -> Result<f64, BiopolyError> {
    p_weighted_outcome(k, x, params, 1e-13).map(|o| o.value.re)
}

/// Upper cutoff for weight integrals of a degree-`j` function against
/// `q_k(x^θ)`: beyond it the `e^{−x}` tail is below `1e-12` of the bulk.
pub fn weight_cutoff(j: usize, k: usize, params: &EnsembleParams) -> f64 {
    params.alpha().max(0.0) + j as f64 + k as f64 * params.theta() + 40.0 + 10.0 * 10f64.ln()
}

/// `∫_0^X f(x) dx` for a fallible integrand behaving like `x^α` at the
/// origin, taken in the variable `u = x^{α+1}` so that the endpoint is
/// regular. The first integrand failure is reported ahead of the
/// quadrature error it caused.
pub fn integrate_weighted<F>(
    f: F,
    upper: f64,
    alpha: f64,
    tol: f64,
) -> Result<QuadOutcome, BiopolyError>
where
    F: Fn(f64) -> Result<f64, BiopolyError>,
{
    let m = 1.0 / (alpha + 1.0);
    let failure: Cell<Option<BiopolyError>> = Cell::new(None);
    let g = |u: f64| {
        if u <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let x = u.powf(m);
        match f(x) {
            Ok(v) => C64::new(v * m * x / u, 0.0),
            Err(e) => {
                let prev = failure.take();
                failure.set(prev.or(Some(e)));
                C64::new(f64::NAN, 0.0)
            }
        }
    };
    let out = quad::integrate_interval(g, 0.0, upper.powf(alpha + 1.0), tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(out?)
}

/// `|∫_0^∞ x^α e^{−x} p_j(x) q_k(x^θ) dx − δ_{jk}|` with `p_j` from the
/// Mellin–Barnes route.
pub fn biorthogonality_defect(
    j: usize,
    k: usize,
    params: &EnsembleParams,
) -> Result<f64, BiopolyError> {
    let theta = params.theta();
    let f = |x: f64| Ok(p_weighted(j, x, params)? * q_poly(k, x.powf(theta), params)?);
    let out = integrate_weighted(f, weight_cutoff(j, k, params), params.alpha(), DEFECT_TOL)?;
    let delta = if j == k { 1.0 } else { 0.0 };
    Ok((out.value.re - delta).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, theta: f64) -> EnsembleParams {
        EnsembleParams::new(alpha, theta, 1).unwrap()
    }

    #[test]
    fn bimoment_examples() {
        assert_eq!(bimoment(0, 0, &params(0.0, 1.0)).unwrap(), 1.0);
        assert!((bimoment(1, 1, &params(0.0, 1.0)).unwrap() - 2.0).abs() < 1e-14);
        let g = bimoment(0, 2, &params(0.5, 1.5)).unwrap();
        assert!((g - 11.631_728_396_567_449).abs() < 1e-12);
        assert!(matches!(
            bimoment(200, 0, &params(0.0, 1.0)),
            Err(BiopolyError::Overflow { .. })
        ));
        assert!(log_bimoment(200, 0, &params(0.0, 1.0)).is_finite());
    }

    #[test]
    fn bimoment_det_small_cases() {
        assert_eq!(log_bimoment_det(0, &params(0.0, 1.0)), 0.0);
        assert!(log_bimoment_det(1, &params(0.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn q_poly_examples() {
        let p = params(0.0, 1.0);
        assert_eq!(q_poly(0, 3.7, &p).unwrap(), 1.0);
        assert!((q_poly(1, 2.5, &p).unwrap() - 1.5).abs() < 1e-14);
        assert!((q_poly(2, 0.0, &params(0.0, 2.0)).unwrap() - 24.0).abs() < 1e-12);
        assert!(matches!(
            q_poly(61, 1.0, &p),
            Err(BiopolyError::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn p_low_degrees() {
        let p = params(0.3, 1.7);
        let g = special::gamma_real(1.3).unwrap();
        assert!((p_poly(0, 2.0, &p).unwrap() - 1.0 / g).abs() < 1e-15);
        // p_1 is orthogonal to q_0 and normalised against q_1.
        let lead = p_poly(1, 1.0, &p).unwrap() - p_poly(1, 0.0, &p).unwrap();
        let want = 1.0 / (1.7 * special::gamma_real(1.3 + 1.7).unwrap());
        assert!((lead - want).abs() < 1e-15);
    }

    #[test]
    fn weighted_p0_at_one() {
        let p = params(0.0, 1.0);
        let e1 = (-1.0f64).exp();
        assert!((p_weighted(0, 1.0, &p).unwrap() - e1).abs() < 1e-12);
        assert!((p_weighted_explicit(0, 1.0, &p).unwrap() - e1).abs() < 1e-15);
    }

    #[test]
    fn routes_agree() {
        for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0), (-0.5, 0.7), (1.5, 3.0)] {
            let p = params(alpha, theta);
            for k in [0, 1, 3, 6] {
                for x in [0.2, 1.0, 3.5, 8.0] {
                    let a = p_weighted(k, x, &p).unwrap();
                    let b = p_weighted_explicit(k, x, &p).unwrap();
                    let scale = p_weighted_explicit(0, x, &p).unwrap().abs().max(b.abs());
                    assert!(
                        (a - b).abs() < 1e-9 * scale,
                        "a={alpha} t={theta} k={k} x={x}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn nonpositive_arguments() {
        let p = params(0.0, 1.0);
        assert!(matches!(
            p_weighted(1, 0.0, &p),
            Err(BiopolyError::NonPositiveArgument(_))
        ));
        assert!(matches!(
            p_weighted_explicit(1, -1.0, &p),
            Err(BiopolyError::NonPositiveArgument(_))
        ));
    }

    #[test]
    fn defect_examples() {
        assert!(biorthogonality_defect(0, 0, &params(0.0, 1.0)).unwrap() < 1e-8);
        assert!(biorthogonality_defect(0, 1, &params(0.0, 1.0)).unwrap() < 1e-8);
        assert!(biorthogonality_defect(3, 3, &params(0.5, 2.0)).unwrap() < 1e-7);
    }
}
