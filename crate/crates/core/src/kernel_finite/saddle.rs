//! Saddle points of the phase function and the contours built around them.
//!
//! With `K_n(θa^{1/θ}, θb^{1/θ})` written as a double integral of
//! `e^{F(s;a) − F(t;b)}/(s−t)`, the phase
//! `F(z;a) = ln Γ(z+1) + ln Γ(α+1+θz) − ln Γ(z−n+1) − θz ln θ − z ln a`
//! behaves like `n F̂(z/n; a/n^θ)` with
//! `F̂(z;x) = (1+θ)z(ln z − 1) − (z−1)(ln(z−1) − 1) − z ln x`.
//! The saddles of `F̂` solve `z^{1+θ} = x(z−1)`; for `x` inside the support
//! they are `w_± = sin((1+θ)φ)/sin(θφ) · e^{±iφ}`, and they merge at
//! `z₀ = 1 + 1/θ` when `x = x_*`.

use std::f64::consts::PI;

use crate::equilibrium::{self, phi_max};
use crate::params::EnsembleParams;
use crate::quad::{ContourPath, Segment};
use crate::special;
use crate::C64;

use super::{ln_falling, ln_gamma_c, KernelError};

/// Soft edge `x_* = (1+θ)^{1+θ}/θ^θ`.
pub fn x_star(theta: f64) -> f64 {
    equilibrium::soft_edge(theta)
}

/// Edge scale `c_* = (1+θ)^{2/3+θ} / (2^{1/3} θ^{θ−1})`.
pub fn c_star(theta: f64) -> f64 {
    ((2.0 / 3.0 + theta) * (1.0 + theta).ln()
        - std::f64::consts::LN_2 / 3.0
        - (theta - 1.0) * theta.ln())
    .exp()
}

/// Local wedge scale `c₁ = x_*/c_* = 2^{1/3}(1+θ)^{1/3}/θ`.
pub fn c1(theta: f64) -> f64 {
    (2.0 * (1.0 + theta)).cbrt() / theta
}

/// Double saddle `z₀ = 1 + 1/θ`.
pub fn z0(theta: f64) -> f64 {
    1.0 + 1.0 / theta
}

/// The pair of saddle points for one macroscopic position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub w_plus: C64,
    pub w_minus: C64,
    pub phi: f64,
    pub x0: f64,
    pub coalesced: bool,
}

impl SaddleData {
    /// The merged saddle at the soft edge.
    pub fn soft_edge(theta: f64) -> Self {
        let z = C64::new(z0(theta), 0.0);
        SaddleData {
            w_plus: z,
            w_minus: z,
            phi: 0.0,
            x0: x_star(theta),
            coalesced: true,
        }
    }

    /// `|w^{1+θ} − x₀(w−1)|` at `w_+`.
    pub fn residual(&self, theta: f64) -> f64 {
        let w = self.w_plus;
        (w.powf(1.0 + theta) - self.x0 * (w - 1.0)).norm()
    }
}

/// `w_±` at angle `φ ∈ (0, π/(1+θ))`, with `x₀ = x(φ)`.
pub fn saddle_points(theta: f64, phi: f64) -> Result<SaddleData, KernelError> {
    let x0 = equilibrium::x_of_phi(theta, phi)?;
    let w = sigma_tilde(theta, phi);
    let sd = SaddleData {
        w_plus: w,
        w_minus: w.conj(),
        phi,
        x0,
        coalesced: false,
    };
    debug_assert!(sd.residual(theta) < 1e-10 * x0.max(1.0));
    Ok(sd)
}

fn radius(theta: f64, phi: f64) -> f64 {
    if phi.abs() < 1e-9 {
        return z0(theta);
    }
    ((1.0 + theta) * phi).sin() / (theta * phi).sin()
}

fn radius_prime(theta: f64, phi: f64) -> f64 {
    if phi.abs() < 1e-9 {
        return 0.0;
    }
    let (a, b) = ((1.0 + theta) * phi, theta * phi);
    ((1.0 + theta) * a.cos() * b.sin() - theta * a.sin() * b.cos()) / (b.sin() * b.sin())
}

/// The closed curve `Σ̃`: `R(φ)e^{iφ}` with `R(φ) = sin((1+θ)φ)/sin(θφ)`,
/// `|φ| ≤ π/(1+θ)`. It passes through `w_±` and meets the real axis at
/// `0` and `1 + 1/θ`.
pub fn sigma_tilde(theta: f64, phi: f64) -> C64 {
    C64::from_polar(radius(theta, phi), phi)
}

fn sigma_tilde_prime(theta: f64, phi: f64) -> C64 {
    C64::new(radius_prime(theta, phi), radius(theta, phi)) * C64::from_polar(1.0, phi)
}

/// `n·Σ̃` for `φ` from `from` to `to`.
fn scaled_sigma_piece(theta: f64, n: f64, from: f64, to: f64) -> Segment {
    let span = to - from;
    Segment::new(
        move |u| sigma_tilde(theta, from + span * u) * n,
        move |u| sigma_tilde_prime(theta, from + span * u) * (n * span),
    )
}

/// Splits `[from, to]` into `pieces` equal parameter intervals of `n·Σ̃`.
fn sigma_pieces(theta: f64, n: f64, from: f64, to: f64, pieces: usize) -> Vec<Segment> {
    let pieces = pieces.max(1);
    (0..pieces)
        .map(|i| {
            let a = from + (to - from) * i as f64 / pieces as f64;
            let b = from + (to - from) * (i + 1) as f64 / pieces as f64;
            scaled_sigma_piece(theta, n, a, b)
        })
        .collect()
}

/// Bisection for a root of a sign-changing `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Angle in `(0, π/(1+θ))` where `Re Σ̃ = target`.
fn angle_at_real_part(theta: f64, target: f64) -> f64 {
    bisect(|p| sigma_tilde(theta, p).re - target, 0.0, phi_max(theta))
}

/// Angle in `(0, π/(1+θ))` where `|Σ̃| = r`.
fn angle_at_radius(theta: f64, r: f64) -> f64 {
    bisect(|p| radius(theta, p) - r, 0.0, phi_max(theta))
}

/// Radius `r = min(0.1, 0.1/θ)` of the detour of `Σ̃` around the origin.
pub fn origin_radius(theta: f64) -> f64 {
    0.1_f64.min(0.1 / theta)
}

/// Phase function values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEval {
    /// `F(z; a)`.
    pub f: C64,
    /// `F̂(z/n; a/n^θ)`, the elementary approximation in scaled variables.
    pub f_hat: C64,
    pub a: f64,
}

/// `F(z; a)` with principal logarithms (values on a cut are limits from
/// above). `z` must avoid the real interval `(−∞, n]`.
pub fn eval_phase(z: C64, a: f64, params: &EnsembleParams) -> Result<PhaseEval, KernelError> {
    let n = params.n() as f64;
    if z.im == 0.0 && z.re <= n {
        return Err(KernelError::BranchCut(z));
    }
    if !(a > 0.0) {
        return Err(KernelError::Domain(format!(
            "scale a must be positive, got {a}"
        )));
    }
    let (alpha, theta) = (params.alpha(), params.theta());
    let lg = |w: C64| special::log_gamma(w).map_err(KernelError::from);
    let f = lg(z + 1.0)? + lg(alpha + 1.0 + theta * z)?
        - lg(z - n + 1.0)?
        - theta * z * theta.ln()
        - z * a.ln();
    let f_hat = phase_hat(z / n, a / n.powf(theta), theta);
    Ok(PhaseEval { f, f_hat, a })
}

/// `F̂(z; x) = (1+θ)z(ln z − 1) − (z−1)(ln(z−1) − 1) − z ln x`.
pub fn phase_hat(z: C64, x: f64, theta: f64) -> C64 {
    let zm = z - 1.0;
    (1.0 + theta) * z * (z.ln() - 1.0) - zm * (zm.ln() - 1.0) - z * x.ln()
}

/// `F̂_z(z; x) = (1+θ) ln z − ln(z−1) − ln x`.
pub fn phase_hat_z(z: C64, x: f64, theta: f64) -> C64 {
    (1.0 + theta) * z.ln() - (z - 1.0).ln() - x.ln()
}

/// `F̂_zz(z) = (1+θ)/z − 1/(z−1)`.
pub fn phase_hat_zz(z: C64, theta: f64) -> C64 {
    (1.0 + theta) / z - 1.0 / (z - 1.0)
}

/// `F̂_zzz(z) = −(1+θ)/z² + 1/(z−1)²`.
pub fn phase_hat_zzz(z: C64, theta: f64) -> C64 {
    -(1.0 + theta) / (z * z) + 1.0 / ((z - 1.0) * (z - 1.0))
}

/// `F(nz; n^θ a) − n F̂(z; a) − n ln n − ½(ln z − ln(z−1)) − ½ ln 2π −
/// (α+½) ln(θnz)`, with the imaginary part reduced to `(−π, π]`. Stirling's
/// formula makes this `O(1/n)`.
pub fn phase_defect(z: C64, a: f64, params: &EnsembleParams) -> Result<C64, KernelError> {
    let n = params.n() as f64;
    let theta = params.theta();
    let ev = eval_phase(z * n, a * n.powf(theta), params)?;
    let d = ev.f
        - n * phase_hat(z, a, theta)
        - n * n.ln()
        - 0.5 * (z.ln() - (z - 1.0).ln())
        - 0.5 * (2.0 * PI).ln()
        - (params.alpha() + 0.5) * (theta * n * z).ln();
    let im = d.im - 2.0 * PI * (d.im / (2.0 * PI)).round();
    Ok(C64::new(d.re, im))
}

/// `F(z; a)` for kernel evaluation: any branch, finite on the contours
/// (which avoid the poles of `Γ(α+1+θz)` and the lattice `0..n−1`).
pub(crate) fn ln_phase(z: C64, ln_a: f64, params: &EnsembleParams) -> C64 {
    let (alpha, theta) = (params.alpha(), params.theta());
    ln_gamma_c(alpha + 1.0 + theta * z) + ln_falling(z, params.n())
        - theta * z * theta.ln()
        - z * ln_a
}

/// Contours for a bulk point: the upward line `Re s = n Re w_±` and the two
/// pieces of `n·Σ̃^r` on either side of it. With `eps > 0` the arcs stop at
/// `Re = n Re w_± ∓ eps` and `sigma_left`/`sigma_right` close them with
/// vertical connectors; with `eps = 0` they end at `n w_±`. A lattice
/// point within `eps` of the line sits in the gap between the two closed
/// pieces; the `eps = 0` evaluation is continuous across that case.
#[derive(Debug, Clone)]
pub struct BulkContours {
    pub line: ContourPath,
    pub line_re: f64,
    /// Counterclockwise from the upper crossing, around the origin, to the
    /// lower crossing.
    pub left_arc: ContourPath,
    /// Counterclockwise from the lower crossing to the upper one.
    pub right_arc: ContourPath,
    pub eps: f64,
    pub saddle: SaddleData,
    /// Length scale of the integrands near `n w_±`.
    pub width: f64,
}

impl BulkContours {
    fn close(arc: &ContourPath) -> ContourPath {
        let segs = arc.segments();
        let end = segs[segs.len() - 1].point(1.0);
        let start = segs[0].point(0.0);
        let mut all = segs.to_vec();
        all.push(Segment::line(end, start));
        ContourPath::new(all, true).expect("arc and connector join")
    }

    pub fn sigma_left(&self) -> ContourPath {
        Self::close(&self.left_arc)
    }

    pub fn sigma_right(&self) -> ContourPath {
        Self::close(&self.right_arc)
    }

    /// Winding number of the two closed pieces together.
    pub fn winding_number(&self, z: C64) -> i64 {
        self.sigma_left().winding_number(z) + self.sigma_right().winding_number(z)
    }
}

/// [`build_bulk_contours_eps`] with connector offset `eps = 0.25`.
pub fn build_bulk_contours(params: &EnsembleParams, phi: f64) -> Result<BulkContours, KernelError> {
    build_bulk_contours_eps(params, phi, 0.25)
}

pub fn build_bulk_contours_eps(
    params: &EnsembleParams,
    phi: f64,
    eps: f64,
) -> Result<BulkContours, KernelError> {
    let n = params.n();
    if n < 10 {
        return Err(KernelError::Domain(format!(
            "bulk contours need n >= 10, got {n}"
        )));
    }
    let theta = params.theta();
    let sd = saddle_points(theta, phi)?;
    let nf = n as f64;
    let line_re = nf * sd.w_plus.re;
    let width = bulk_width(&sd, theta, nf);
    let r = origin_radius(theta);
    let phi_r = angle_at_radius(theta, r);
    let (phi_left, phi_right) = if eps > 0.0 {
        (
            angle_at_real_part(theta, (line_re - eps) / nf),
            angle_at_real_part(theta, (line_re + eps) / nf),
        )
    } else {
        (phi, phi)
    };
    if !(phi_left < phi_r) {
        return Err(KernelError::Domain(format!(
            "phi = {phi} too close to the hard edge for the origin detour"
        )));
    }
    let pieces = |from: f64, to: f64| {
        let len = nf * (sigma_tilde(theta, from) - sigma_tilde(theta, to)).norm();
        ((len / (0.5 * width)).ceil() as usize).clamp(2, 400)
    };

    let mut left = sigma_pieces(theta, nf, phi_left, phi_r, pieces(phi_left, phi_r));
    left.push(Segment::arc(
        C64::new(0.0, 0.0),
        nf * r,
        phi_r,
        2.0 * PI - phi_r,
    ));
    left.extend(sigma_pieces(
        theta,
        nf,
        -phi_r,
        -phi_left,
        pieces(phi_r, phi_left),
    ));
    let right = sigma_pieces(theta, nf, -phi_right, phi_right, 2 * pieces(0.0, phi_right));

    let top = nf * sd.w_plus.im;
    let mut breaks = Vec::new();
    let reach = top + 6.0 * width;
    let steps = ((2.0 * reach) / (0.5 * width)).ceil() as usize;
    for i in 0..=steps {
        breaks.push(-reach + 2.0 * reach * i as f64 / steps as f64);
    }
    breaks.push(top);
    breaks.push(-top);
    let line = ContourPath::vertical_line(line_re, &breaks, width.max(nf / 4.0));
    Ok(BulkContours {
        line,
        line_re,
        left_arc: ContourPath::new(left, false)?,
        right_arc: ContourPath::new(right, false)?,
        eps,
        saddle: sd,
        width,
    })
}

/// `√(n/|F̂_zz(w)|)`, clipped to `[1, n/4]`.
fn bulk_width(sd: &SaddleData, theta: f64, n: f64) -> f64 {
    let curv = phase_hat_zz(sd.w_plus, theta).norm();
    (n / curv).sqrt().clamp(1.0, n / 4.0)
}

/// Contours for the soft edge. Near `n z₀` the `t`-contour runs along rays
/// at `±2π/3` and the `s`-contour along rays at `±π/3`, each of length
/// `c₁ n^{2/3}` to `c₁ n^{2/3 + 1/30}` and closed by a vertical cut
/// at `n z₀ ∓ c₁ n^{2/3}/2`. The `t`-contour continues vertically to
/// `n·Σ̃` and around the origin; the `s`-contour continues vertically to
/// `±i∞`.
#[derive(Debug, Clone)]
pub struct EdgeContours {
    pub c: ContourPath,
    pub sigma: ContourPath,
    /// `c₁ n^{2/3}`.
    pub scale: f64,
    pub center: f64,
}

pub fn build_edge_contours(params: &EnsembleParams) -> Result<EdgeContours, KernelError> {
    let n = params.n();
    if n < 10 {
        return Err(KernelError::Domain(format!(
            "edge contours need n >= 10, got {n}"
        )));
    }
    let theta = params.theta();
    let nf = n as f64;
    let center = nf * z0(theta);
    let scale = c1(theta) * nf.powf(2.0 / 3.0);
    let reach = nf.powf(1.0 / 30.0);
    let at = |r: f64, angle: f64| C64::new(center, 0.0) + C64::from_polar(scale * r, angle);
    let split = |a: C64, b: C64, k: usize| -> Vec<Segment> {
        (0..k)
            .map(|i| {
                let p = a + (b - a) * (i as f64 / k as f64);
                let q = a + (b - a) * ((i + 1) as f64 / k as f64);
                Segment::line(p, q)
            })
            .collect()
    };

    // t-contour
    let ang = 2.0 * PI / 3.0;
    let up_in = at(1.0, ang);
    let up_out = at(reach, ang);
    let lo_in = at(1.0, -ang);
    let lo_out = at(reach, -ang);
    let phi_c = angle_at_real_part(theta, up_out.re / nf);
    let top = sigma_tilde(theta, phi_c) * nf;
    if !(top.im > up_out.im) {
        return Err(KernelError::Domain(
            "edge wedge does not fit inside n·Σ̃".into(),
        ));
    }
    let r = origin_radius(theta);
    let phi_r = angle_at_radius(theta, r);
    let pieces = |from: f64, to: f64| {
        let len = nf * (sigma_tilde(theta, from) - sigma_tilde(theta, to)).norm();
        ((len / (0.25 * scale)).ceil() as usize).clamp(2, 400)
    };
    let mut sig = Vec::new();
    sig.extend(sigma_pieces(theta, nf, phi_c, phi_r, pieces(phi_c, phi_r)));
    sig.push(Segment::arc(
        C64::new(0.0, 0.0),
        nf * r,
        phi_r,
        2.0 * PI - phi_r,
    ));
    sig.extend(sigma_pieces(
        theta,
        nf,
        -phi_r,
        -phi_c,
        pieces(phi_r, phi_c),
    ));
    sig.extend(split(top.conj(), lo_out, 4));
    sig.extend(split(lo_out, lo_in, 4));
    sig.extend(split(lo_in, up_in, 4));
    sig.extend(split(up_in, up_out, 4));
    sig.extend(split(up_out, top, 4));
    let sigma = ContourPath::new(sig, true)?;

    // s-contour
    let ang = PI / 3.0;
    let (cu_in, cu_out) = (at(1.0, ang), at(reach, ang));
    let (cl_in, cl_out) = (at(1.0, -ang), at(reach, -ang));
    let mut cs = vec![Segment::ray(cl_out, C64::new(0.0, -1.0), scale).reversed()];
    cs.extend(split(cl_out, cl_in, 4));
    cs.extend(split(cl_in, cu_in, 4));
    cs.extend(split(cu_in, cu_out, 4));
    cs.push(Segment::ray(cu_out, C64::new(0.0, 1.0), scale));
    let c = ContourPath::new(cs, false)?;
    Ok(EdgeContours {
        c,
        sigma,
        scale,
        center,
    })
}
