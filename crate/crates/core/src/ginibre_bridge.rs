//! Correlation kernels of squared singular values of products of `M`
//! Ginibre matrices, and their bridges to the biorthogonal Laguerre kernel
//! at `θ = M`.
//!
//! Everything here is computed from Meijer G-functions and Mellin–Barnes
//! integrals built on [`special::log_gamma`]; the biorthogonal Laguerre side
//! of each relation comes from [`biopoly`], [`kernel_finite`] and [`limits`].

use std::cell::RefCell;
use std::f64::consts::PI;

use thiserror::Error;

use crate::biopoly::{self, BiopolyError};
use crate::kernel_finite::{self, KernelError};
use crate::limits::{self, LimitsError};
use crate::params::{EnsembleParams, ParamsError};
use crate::quad::{self, ContourPath, QuadError, Segment, VerticalLineSpec};
use crate::special::{self, SpecialError};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GinibreError {
    #[error("{0}")]
    Domain(String),
    #[error("series cancellation too severe for {what} at x = {x}")]
    CancellationOverflow { what: &'static str, x: f64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Biopoly(#[from] BiopolyError),
    #[error(transparent)]
    Limits(#[from] LimitsError),
}

/// Largest polynomial degree accepted by [`p_poly`] and [`q_fun`].
pub const MAX_DEGREE: usize = 60;
/// Largest `n` accepted by [`product_kernel`].
pub const MAX_N: usize = 200;
/// Largest argument accepted by [`hard_edge_product`].
pub const HARD_EDGE_MAX_ARG: f64 = 10.0;

const CANCELLATION_LIMIT: f64 = 1e13;
const LINE_TOL: f64 = 1e-11;
const U_TOL: f64 = 1e-10;

/// Parameters `ν_1, …, ν_M > −1`; `ν_0 = 0` is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct NuVector(Vec<f64>);

impl NuVector {
    pub fn new(nu: Vec<f64>) -> Result<Self, GinibreError> {
        if nu.is_empty() {
            return Err(GinibreError::Domain(
                "at least one matrix factor is needed (M >= 1)".into(),
            ));
        }
        if let Some(v) = nu.iter().find(|v| !(**v > -1.0) || !v.is_finite()) {
            return Err(GinibreError::Domain(format!(
                "every nu_j must exceed -1, got {v}"
            )));
        }
        Ok(NuVector(nu))
    }

    /// Number of factors `M`.
    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// `ν_1, …, ν_M`.
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `ν_0 = 0, ν_1, …, ν_M`.
    pub fn with_zero(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(0.0).chain(self.0.iter().copied())
    }

    /// `Σ_{j=0}^M ln Γ(k+ν_j+1)`; every argument is positive.
    fn ln_gamma_shifted(&self, k: f64) -> Result<f64, GinibreError> {
        self.with_zero()
            .map(|v| Ok(special::ln_gamma_real(k + v + 1.0)?.0))
            .sum()
    }
}

/// `ν̃_j = α/M + j/M − 1`, `j = 1..M`.
pub fn tilde_nu(alpha: f64, m: usize) -> Result<NuVector, GinibreError> {
    if !(alpha > -1.0) || m == 0 {
        return Err(GinibreError::Domain(format!(
            "tilde nu needs alpha > -1 and M >= 1, got alpha = {alpha}, M = {m}"
        )));
    }
    let mf = m as f64;
    NuVector::new((1..=m).map(|j| (alpha + j as f64) / mf - 1.0).collect())
}

/// Meijer G-function `G^{m,0}_{p,q}(a; b | x)` with `p ≤ 1`:
/// `(2πi)^{−1} ∫ Π_{j≤m} Γ(b_j+u) / (Π_{j>m} Γ(1−b_j−u) Π Γ(a+u)) x^{−u} du`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerSpec {
    m: usize,
    upper: Option<f64>,
    lower: Vec<f64>,
}

impl MeijerSpec {
    /// Accepts `G^{m,0}_{0,q}` (`1 ≤ m ≤ q`) and `G^{m,0}_{1,m}`.
    pub fn new(m: usize, upper: Option<f64>, lower: Vec<f64>) -> Result<Self, GinibreError> {
        let q = lower.len();
        let ok = m >= 1
            && m <= q
            && (upper.is_none() || q == m)
            && lower.iter().chain(upper.iter()).all(|v| v.is_finite());
        if !ok {
            return Err(GinibreError::Domain(format!(
                "unsupported Meijer G shape: m = {m}, p = {}, q = {q}",
                upper.iter().count()
            )));
        }
        Ok(MeijerSpec { m, upper, lower })
    }

    fn p(&self) -> usize {
        usize::from(self.upper.is_some())
    }

    /// The vertical line converges absolutely when `2m > p + q`.
    fn line_converges(&self) -> bool {
        2 * self.m > self.p() + self.lower.len()
    }

    /// Smallest admissible abscissa: half a unit right of the rightmost pole.
    fn min_abscissa(&self) -> f64 {
        self.lower[..self.m]
            .iter()
            .map(|b| -b)
            .fold(f64::NEG_INFINITY, f64::max)
            + 0.5
    }

    /// Real saddle of `Σ_j ln Γ(b_j+c) − c ln x`, kept right of the poles.
    pub fn abscissa(&self, x: f64) -> f64 {
        let lo = self.min_abscissa();
        let lx = x.ln();
        let h = |c: f64| -> f64 {
            self.lower
                .iter()
                .map(|b| special::ln_gamma_real((b + c).max(0.5)).map_or(0.0, |g| g.0))
                .sum::<f64>()
                - c * lx
        };
        let (mut a, mut b) = (lo, lo + x.powf(1.0 / self.lower.len() as f64) + 10.0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c1 = b - g * (b - a);
            let c2 = a + g * (b - a);
            if h(c1) <= h(c2) {
                b = c2;
            } else {
                a = c1;
            }
        }
        0.5 * (a + b)
    }

    /// Logarithm of the Mellin–Barnes integrand; `None` where a reciprocal
    /// gamma factor vanishes.
    fn ln_integrand(&self, u: C64, lx: f64) -> Result<Option<C64>, GinibreError> {
        let mut l = -u * lx;
        for b in &self.lower[..self.m] {
            l += special::log_gamma(u + b)?;
        }
        let recips = self.lower[self.m..]
            .iter()
            .map(|b| 1.0 - b - u)
            .chain(self.upper.map(|a| u + a));
        for z in recips {
            match special::log_gamma(z) {
                Ok(g) => l -= g,
                Err(SpecialError::PoleAtNonpositiveInteger(_)) => return Ok(None),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Some(l))
    }
}

/// Evaluation route for [`meijer_with_route`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeijerRoute {
    /// Bent contour where it converges, residue series otherwise.
    Auto,
    /// The vertical line `Re u = c`.
    Line,
    /// Vertical near the real axis, then rays at `π/4` past the vertical
    /// into the left half-plane.
    Bent,
    /// Residue series of the single pole family (`m = 1`).
    Residues,
}

/// Height above and below the real axis at which the bent contour turns.
const BEND_HEIGHT: f64 = 2.0;

/// Restricted Meijer G evaluation at `x > 0`, scaled by `e^{ln_scale}`.
fn meijer_scaled(
    spec: &MeijerSpec,
    x: f64,
    ln_scale: f64,
    route: MeijerRoute,
) -> Result<f64, GinibreError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GinibreError::Domain(format!(
            "Meijer G argument must be positive, got {x}"
        )));
    }
    let route = match route {
        MeijerRoute::Auto if spec.line_converges() => MeijerRoute::Bent,
        MeijerRoute::Auto => MeijerRoute::Residues,
        r => r,
    };
    match route {
        MeijerRoute::Line | MeijerRoute::Bent if !spec.line_converges() => {
            Err(GinibreError::Domain(format!(
                "Mellin-Barnes integral of G^{{{},0}}_{{{},{}}} does not converge absolutely",
                spec.m,
                spec.p(),
                spec.lower.len()
            )))
        }
        MeijerRoute::Residues if spec.m != 1 => Err(GinibreError::Domain(format!(
            "residue series needs a single pole family, got m = {}",
            spec.m
        ))),
        MeijerRoute::Residues => meijer_residues(spec, x, ln_scale),
        r => meijer_contour(spec, x, ln_scale, r == MeijerRoute::Bent),
    }
}

/// Restricted Meijer G-function at `x > 0`. Shapes whose Mellin–Barnes
/// integral converges absolutely (`2m > p + q`) are integrated on a bent
/// contour; the remaining `m = 1` shapes are summed from their residues.
pub fn meijer_restricted(spec: &MeijerSpec, x: f64) -> Result<f64, GinibreError> {
    meijer_scaled(spec, x, 0.0, MeijerRoute::Auto)
}

pub fn meijer_with_route(
    spec: &MeijerSpec,
    x: f64,
    route: MeijerRoute,
) -> Result<f64, GinibreError> {
    meijer_scaled(spec, x, 0.0, route)
}

fn bent_contour(c: f64) -> ContourPath {
    let h = BEND_HEIGHT;
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let scale = 2.0 + c.abs();
    let segs = vec![
        Segment::ray(C64::new(c, -h), C64::new(-d, -d), scale).reversed(),
        Segment::line(C64::new(c, -h), C64::new(c, 0.0)),
        Segment::line(C64::new(c, 0.0), C64::new(c, h)),
        Segment::ray(C64::new(c, h), C64::new(-d, d), scale),
    ];
    ContourPath::new(segs, false).expect("bent contour is connected")
}

fn meijer_contour(
    spec: &MeijerSpec,
    x: f64,
    ln_scale: f64,
    bent: bool,
) -> Result<f64, GinibreError> {
    let lx = x.ln();
    let c = spec.abscissa(x);
    let line = VerticalLineSpec::new(c);
    let reach = if bent {
        BEND_HEIGHT
    } else {
        line.initial_height
    };
    let mut reference = f64::NEG_INFINITY;
    for i in 0..64 {
        let y = reach * i as f64 / 64.0;
        if let Some(l) = spec.ln_integrand(C64::new(c, y), lx)? {
            reference = reference.max(l.re);
        }
    }
    if !reference.is_finite() {
        return Err(GinibreError::Domain(format!(
            "Meijer G integrand vanishes on the line Re u = {c}"
        )));
    }
    let failure = RefCell::new(None);
    let f = |u: C64| match spec.ln_integrand(u, lx) {
        Ok(Some(l)) => (l - reference).exp(),
        Ok(None) => C64::new(0.0, 0.0),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    };
    let out = if bent {
        quad::integrate_contour(f, &bent_contour(c), LINE_TOL)
    } else {
        quad::integrate_vertical(f, &line, LINE_TOL)
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let v = out?.value / C64::new(0.0, 2.0 * PI);
    Ok(v.re * (reference + ln_scale).exp())
}

fn meijer_residues(spec: &MeijerSpec, x: f64, ln_scale: f64) -> Result<f64, GinibreError> {
    const WHAT: &str = "meijer_restricted";
    let b1 = spec.lower[0];
    let lx = x.ln();
    let mut acc = special::Neumaier::new();
    let mut max_term = 0.0_f64;
    let mut prev = f64::INFINITY;
    let mut ln_fact = 0.0;
    for k in 0..10_000usize {
        let kf = k as f64;
        if k > 0 {
            ln_fact += kf.ln();
        }
        // residue of Γ(b_1+u) at u = −b_1−k is (−1)^k/k!
        let mut l = (b1 + kf) * lx - ln_fact + ln_scale;
        let mut sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut zero = false;
        let args = spec.lower[1..]
            .iter()
            .map(|b| 1.0 - b + b1 + kf)
            .chain(spec.upper.map(|a| a - b1 - kf));
        for z in args {
            match special::ln_gamma_real(z) {
                Ok((g, s)) => {
                    l -= g;
                    sign *= s;
                }
                Err(SpecialError::PoleAtNonpositiveInteger(_)) => zero = true,
                Err(e) => return Err(e.into()),
            }
        }
        let term = if zero { 0.0 } else { sign * l.exp() };
        acc.add(term);
        let mag = term.abs();
        max_term = max_term.max(mag);
        if kf > x && mag <= prev && mag <= 1e-17 * acc.value().abs().max(f64::MIN_POSITIVE) {
            let v = acc.value();
            if max_term > CANCELLATION_LIMIT * v.abs() {
                return Err(GinibreError::CancellationOverflow { what: WHAT, x });
            }
            return Ok(v);
        }
        if !zero {
            prev = mag;
        }
    }
    Err(GinibreError::CancellationOverflow { what: WHAT, x })
}

fn check_degree(k: usize) -> Result<(), GinibreError> {
    if k > MAX_DEGREE {
        return Err(GinibreError::Domain(format!(
            "degree {k} exceeds {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Monic polynomial `P_k^ν(x) = (−1)^k Π_j Γ(k+ν_j+1)/Γ(ν_j+1) · ₁F_M(−k; 1+ν | x)`,
/// summed as `Σ_i (−1)^{k+i} C(k,i) Π_j Γ(k+ν_j+1)/Γ(i+ν_j+1) x^i`.
pub fn p_poly(k: usize, nu: &NuVector, x: f64) -> Result<f64, GinibreError> {
    const WHAT: &str = "p_poly";
    check_degree(k)?;
    if x == 0.0 || k == 0 {
        let mut v = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        if k > 0 {
            for &n in nu.values() {
                v *= (special::ln_gamma_real(k as f64 + n + 1.0)?.0
                    - special::ln_gamma_real(n + 1.0)?.0)
                    .exp();
            }
        }
        return Ok(v);
    }
    let lx = x.abs().ln();
    let neg = x < 0.0;
    let lg = |i: usize| -> Result<f64, GinibreError> {
        nu.values()
            .iter()
            .map(|n| Ok(special::ln_gamma_real(i as f64 + n + 1.0)?.0))
            .sum()
    };
    let top = lg(k)?;
    let ln_k_fact = special::ln_gamma_real(k as f64 + 1.0)?.0;
    let mut acc = special::Neumaier::new();
    for i in 0..=k {
        let ln_binom = ln_k_fact
            - special::ln_gamma_real(i as f64 + 1.0)?.0
            - special::ln_gamma_real((k - i) as f64 + 1.0)?.0;
        let mag = (ln_binom + top - lg(i)? + i as f64 * lx).exp();
        let odd = ((k + i) % 2 == 1) ^ (neg && i % 2 == 1);
        let term = if odd { -mag } else { mag };
        acc.add(term);
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(GinibreError::CancellationOverflow { what: WHAT, x });
    }
    Ok(v)
}

/// `Q_k^ν(x) = G^{M+1,0}_{1,M+1}(−k; ν_0, …, ν_M | x) / Π_{j=0}^M Γ(k+ν_j+1)`.
pub fn q_fun(k: usize, nu: &NuVector, x: f64) -> Result<f64, GinibreError> {
    check_degree(k)?;
    let spec = MeijerSpec::new(nu.m() + 1, Some(-(k as f64)), nu.with_zero().collect())?;
    meijer_scaled(&spec, x, -nu.ln_gamma_shifted(k as f64)?, MeijerRoute::Auto)
}

/// `K_n^ν(x, y) = Σ_{k<n} P_k^ν(x) Q_k^ν(y)` summed term by term.
pub fn product_kernel_series(n: usize, nu: &NuVector, x: f64, y: f64) -> Result<f64, GinibreError> {
    let mut acc = special::Neumaier::new();
    for k in 0..n {
        acc.add(p_poly(k, nu, x)? * q_fun(k, nu, y)?);
    }
    Ok(acc.value())
}

/// Abscissa of the `s`-line: `−1/2` unless a pole of `Γ(s+ν_j+1)` lies at
/// or right of it, in which case the midpoint between that pole and `0`.
pub fn product_kernel_abscissa(nu: &NuVector) -> f64 {
    let pole = nu.values().iter().map(|v| -v - 1.0).fold(-1.0, f64::max);
    if pole < -0.5 {
        -0.5
    } else {
        0.5 * pole
    }
}

/// `K_n^ν(x, y)` from its double contour integral, with the `t`-integral
/// reduced to the residues at `t = 0, …, n−1` and the `s`-integral taken on a
/// vertical line left of `0`.
pub fn product_kernel(n: usize, nu: &NuVector, x: f64, y: f64) -> Result<f64, GinibreError> {
    if n == 0 || n > MAX_N {
        return Err(GinibreError::Domain(format!(
            "n must lie in 1..={MAX_N}, got {n}"
        )));
    }
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(GinibreError::Domain(format!(
            "product kernel needs positive arguments, got ({x}, {y})"
        )));
    }
    let (lx, ly) = (x.ln(), y.ln());
    // residue weights (−1)^{n−1−k} x^k / ((n−1−k)! Π_{j=0}^M Γ(k+ν_j+1))
    let mut lw = Vec::with_capacity(n);
    for k in 0..n {
        lw.push(
            k as f64 * lx
                - special::ln_gamma_real((n - k) as f64)?.0
                - nu.ln_gamma_shifted(k as f64)?,
        );
    }
    let lw_max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = lw
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let w = (l - lw_max).exp();
            if (n - 1 - k) % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect();
    let parts = |s: C64| -> Result<(C64, f64, C64), GinibreError> {
        let mut sum = C64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let t = *w / (s - k as f64);
            sum += t;
            abs_sum += t.norm();
        }
        let mut pre = -(s + 1.0) * ly + lw_max;
        for v in nu.values() {
            pre += special::log_gamma(s + v + 1.0)?;
        }
        // Γ(s+1)/Γ(s−n+1) as the falling product Π_{i<n} (s−i)
        for i in 0..n {
            pre += (s - i as f64).ln();
        }
        Ok((sum, abs_sum, pre))
    };
    let c = product_kernel_abscissa(nu);
    let mut line = VerticalLineSpec::new(c);
    line.initial_height = 16.0 + 4.0 * n as f64 / (nu.m() as f64 * PI);
    let (mut peak, mut noise) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..64 {
        let (sum, abs_sum, pre) = parts(C64::new(c, line.initial_height * i as f64 / 64.0))?;
        peak = peak.max(pre.re + sum.norm().ln());
        noise = noise.max(pre.re + abs_sum.ln());
    }
    let reference = peak;
    let failure = RefCell::new(None);
    let f = |s: C64| match parts(s) {
        Ok((sum, _, pre)) => (pre - reference).exp() * sum,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    };
    let tol = line.initial_height * (1e-13f64).max(1e-15 * (noise - reference).exp());
    let out = quad::integrate_vertical(f, &line, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let v = out?.value / C64::new(0.0, 2.0 * PI);
    Ok(v.re * reference.exp())
}

fn check_relation(alpha: f64, m: usize) -> Result<EnsembleParams, GinibreError> {
    if !(1..=3).contains(&m) {
        return Err(GinibreError::Domain(format!(
            "relations are checked for M in 1..=3, got {m}"
        )));
    }
    Ok(EnsembleParams::new(alpha, m as f64, 1)?)
}

/// Defect of `K_n^{(α,M)}(x,y) = x^{M−1}/M^{M−1} · K_n^{ν̃}(y^M/M^M, x^M/M^M)`
/// between [`kernel_finite::kernel_residue`] and [`product_kernel`].
pub fn relation_finite_defect(
    alpha: f64,
    m: usize,
    n: usize,
    x: f64,
    y: f64,
) -> Result<f64, GinibreError> {
    check_relation(alpha, m)?;
    if n > 20 {
        return Err(GinibreError::Domain(format!(
            "finite relation is checked for n <= 20, got {n}"
        )));
    }
    let params = EnsembleParams::new(alpha, m as f64, n)?;
    let lhs = kernel_finite::kernel_residue(&params, x, y)?;
    let mf = m as f64;
    let mm = mf.powf(mf);
    let rhs = x.powf(mf - 1.0) / mf.powf(mf - 1.0)
        * product_kernel(n, &tilde_nu(alpha, m)?, y.powf(mf) / mm, x.powf(mf) / mm)?;
    Ok((lhs - rhs).abs())
}

/// Defect of `q_k^{(α,M)}(x) = M^{kM} P_k^{ν̃}(x/M^M)` relative to the
/// term mass `Σ |c_l| x^l` of `q_k`.
pub fn relation_poly_defect(alpha: f64, m: usize, k: usize, x: f64) -> Result<f64, GinibreError> {
    let params = check_relation(alpha, m)?;
    let mf = m as f64;
    let lhs = biopoly::q_poly(k, x, &params)?;
    let rhs = mf.powf(k as f64 * mf) * p_poly(k, &tilde_nu(alpha, m)?, x / mf.powf(mf))?;
    // the roots are positive, so |q_k(−x)| is the sum of the absolute terms
    let mass = biopoly::q_poly(k, -x, &params)?.abs();
    Ok((lhs - rhs).abs() / mass)
}

/// Defect of `x^α e^{−x} p_k^{(α,M)}(x) = Q_k^{ν̃}(x^M/M^M) x^{M−1}/M^{(k+1)M−1}`
/// relative to the weighted term mass of `p_k`.
pub fn relation_weighted_defect(
    alpha: f64,
    m: usize,
    k: usize,
    x: f64,
) -> Result<f64, GinibreError> {
    let params = check_relation(alpha, m)?;
    let mf = m as f64;
    let lhs = biopoly::p_weighted_explicit(k, x, &params)?;
    let rhs = q_fun(k, &tilde_nu(alpha, m)?, x.powf(mf) / mf.powf(mf))? * x.powf(mf - 1.0)
        / mf.powf((k as f64 + 1.0) * mf - 1.0);
    Ok((lhs - rhs).abs() / biopoly::p_weighted_mass(k, x, &params)?)
}

/// Defect of Gauss's multiplication formula in the form
/// `Π_{j=1}^M Γ(k+ν̃_j+1) = (2π)^{(M−1)/2} M^{−(α+1+kM)+1/2} Γ(α+1+kM)`,
/// in log space.
pub fn gauss_product_defect(alpha: f64, m: usize, k: usize) -> Result<f64, GinibreError> {
    let nu = tilde_nu(alpha, m)?;
    let mf = m as f64;
    let z = alpha + 1.0 + k as f64 * mf;
    let lhs: f64 = nu
        .values()
        .iter()
        .map(|v| Ok(special::ln_gamma_real(k as f64 + v + 1.0)?.0))
        .sum::<Result<f64, GinibreError>>()?;
    let rhs =
        0.5 * (mf - 1.0) * (2.0 * PI).ln() - (z - 0.5) * mf.ln() + special::ln_gamma_real(z)?.0;
    Ok((lhs - rhs).abs())
}

fn check_hard_edge(x: f64, y: f64) -> Result<(), GinibreError> {
    for v in [x, y] {
        if !(v > 0.0 && v <= HARD_EDGE_MAX_ARG) {
            return Err(GinibreError::Domain(format!(
                "hard-edge arguments must lie in (0, {HARD_EDGE_MAX_ARG}], got ({x}, {y})"
            )));
        }
    }
    Ok(())
}

/// Hard-edge kernel
/// `K^ν(x,y) = ∫_0^1 G^{1,0}_{0,M+1}(−; −ν_0, …, −ν_M | ux) G^{M,0}_{0,M+1}(−; ν_1, …, ν_M, ν_0 | uy) du`.
pub fn hard_edge_product(nu: &NuVector, x: f64, y: f64) -> Result<f64, GinibreError> {
    check_hard_edge(x, y)?;
    hard_edge_product_unchecked(nu, x, y)
}

fn hard_edge_product_unchecked(nu: &NuVector, x: f64, y: f64) -> Result<f64, GinibreError> {
    let m = nu.m();
    let left = MeijerSpec::new(1, None, nu.with_zero().map(|v| -v).collect())?;
    let right = MeijerSpec::new(m, None, nu.values().iter().copied().chain([0.0]).collect())?;
    // the right factor behaves like (uy)^{min ν} at the origin
    let lead = nu.values().iter().copied().fold(0.0, f64::min);
    let e = 1.0 / (1.0 + lead);
    let failure = RefCell::new(None);
    let g = |w: f64| {
        if w <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let u = w.powf(e);
        let v =
            meijer_restricted(&left, u * x).and_then(|a| Ok(a * meijer_restricted(&right, u * y)?));
        match v {
            Ok(v) => C64::new(v * e * u / w, 0.0),
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                C64::new(0.0, 0.0)
            }
        }
    };
    let out = quad::integrate_interval(g, 0.0, 1.0, U_TOL);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(out?.value.re)
}

/// Defect of `M x^α ∫_0^1 J J u^α du = x^{M−1}/M^{M−1} · K^{ν̃}(y^M/M^M, x^M/M^M)`
/// with the left side from [`limits::hard_edge_borodin`].
pub fn relation_hard_defect(alpha: f64, m: usize, x: f64, y: f64) -> Result<f64, GinibreError> {
    check_relation(alpha, m)?;
    check_hard_edge(x, y)?;
    let mf = m as f64;
    let mm = mf.powf(mf);
    let lhs = limits::hard_edge_borodin(alpha, mf, x, y)?;
    let rhs = x.powf(mf - 1.0) / mf.powf(mf - 1.0)
        * hard_edge_product_unchecked(&tilde_nu(alpha, m)?, y.powf(mf) / mm, x.powf(mf) / mm)?;
    Ok((lhs - rhs).abs())
}
