//! Complex log-gamma and the scalar special functions the kernels are built
//! from: Wright's generalised Bessel function, Bessel `J_ν`, Airy `Ai`/`Ai′`,
//! and the sine and Airy kernels.

use std::f64::consts::PI;

use thiserror::Error;

use crate::quad::{self, ContourPath, NodeRule, QuadError, QuadOutcome, Segment};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("log-gamma pole at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(f64),
    #[error("gamma ratio has a genuine pole at t = {t}, s = {s}, n = {n}")]
    PoleHit { t: C64, s: C64, n: usize },
    #[error("series cancellation too severe for {what} at x = {x}")]
    CancellationOverflow { what: &'static str, x: f64 },
    #[error("{what} argument {x} outside the trusted range")]
    OutOfTrustedRange { what: &'static str, x: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `B_{2k} / (2k(2k−1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn stirling(w: C64) -> C64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = C64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + corr
}

/// Principal branch of `log Γ(z)`, continuous off `(−∞, 0]`; on the negative
/// axis the value is the limit from above.
pub fn log_gamma(z: C64) -> Result<C64, SpecialError> {
    if is_nonpositive_integer(z) {
        return Err(SpecialError::PoleAtNonpositiveInteger(z.re));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.0 {
        if z.im < 0.0 {
            return log_gamma_unchecked(z.conj()).conj();
        }
        return LN_PI - log_sin_pi(z) - log_gamma_unchecked(1.0 - z);
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

/// A logarithm of `sin(πz)`, analytic in the open upper and lower half-planes
/// and taken from above on the real axis. Stable for large `|Im z|`.
pub fn log_sin_pi(z: C64) -> C64 {
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin πz = (i/2) e^{−iπz} (1 − e^{2πiz})
    let w = (C64::new(0.0, 2.0 * PI) * z).exp();
    C64::new(-std::f64::consts::LN_2, 0.5 * PI) - C64::new(0.0, PI) * z + (1.0 - w).ln()
}

/// `ln|Γ(x)|` and the sign of `Γ(x)` for real `x` off the poles.
pub fn ln_gamma_real(x: f64) -> Result<(f64, f64), SpecialError> {
    let lg = log_gamma(C64::new(x, 0.0))?;
    let sign = if x > 0.0 || (-x).ceil() as i64 % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Ok((lg.re, sign))
}

pub fn gamma_real(x: f64) -> Result<f64, SpecialError> {
    let (l, s) = ln_gamma_real(x)?;
    Ok(s * l.exp())
}

/// `1/Γ(x)`, which is entire and vanishes at the nonpositive integers.
pub fn recip_gamma(x: f64) -> f64 {
    match ln_gamma_real(x) {
        Ok((l, s)) => s * (-l).exp(),
        Err(_) => 0.0,
    }
}

/// `Γ(t−n+1)/Γ(s−n+1)`, continued across the pole lattice through
/// `Γ(n−s)/Γ(n−t) · sin πs / sin πt` where direct evaluation is unsafe.
pub fn gamma_ratio_shifted(t: C64, s: C64, n: usize) -> Result<C64, SpecialError> {
    log_gamma_ratio_shifted(t, s, n).map(|l| l.exp())
}

/// Logarithm of [`gamma_ratio_shifted`] (any branch; only its exponential is meaningful).
pub fn log_gamma_ratio_shifted(t: C64, s: C64, n: usize) -> Result<C64, SpecialError> {
    let shift = n as f64 - 1.0;
    let a = t - shift;
    let b = s - shift;
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    if is_nonpositive_integer(a) {
        return Err(SpecialError::PoleHit { t, s, n });
    }
    if is_nonpositive_integer(b) {
        return Ok(C64::new(f64::NEG_INFINITY, 0.0));
    }
    let l = match (a.re > 0.5, b.re > 0.5) {
        (true, true) => log_gamma_unchecked(a) - log_gamma_unchecked(b),
        (true, false) => {
            log_gamma_unchecked(a) + log_gamma_unchecked(1.0 - b) + log_sin_pi(b) - LN_PI
        }
        (false, true) => {
            LN_PI - log_sin_pi(a) - log_gamma_unchecked(1.0 - a) - log_gamma_unchecked(b)
        }
        (false, false) => {
            log_gamma_unchecked(1.0 - b) - log_gamma_unchecked(1.0 - a) + log_sin_pi(b)
                - log_sin_pi(a)
        }
    };
    Ok(l)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

/// Compensated real summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn add(&mut self, v: f64) {
        let (s, c) = two_sum(self.sum, v);
        self.sum = s;
        self.comp += c;
    }
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const WRIGHT_MAX_X: f64 = 50.0;

/// Wright's generalised Bessel function `J_{a,b}(x) = Σ_j (−x)^j / (j! Γ(a+bj))`.
pub fn wright_bessel(a: f64, b: f64, x: f64) -> Result<f64, SpecialError> {
    const WHAT: &str = "wright_bessel";
    if !(b > 0.0) || !(x >= 0.0) || x > WRIGHT_MAX_X {
        return Err(SpecialError::OutOfTrustedRange { what: WHAT, x });
    }
    if x == 0.0 {
        return Ok(recip_gamma(a));
    }
    let lx = x.ln();
    let mut acc = Neumaier::default();
    let mut max_term: f64 = 0.0;
    let mut small_run = 0;
    let mut prev_mag = 0.0;
    for j in 0..5000usize {
        let jf = j as f64;
        let arg = a + b * jf;
        let term = match ln_gamma_real(arg) {
            Ok((lg, sg)) => {
                let lfact = log_gamma_unchecked(C64::new(jf + 1.0, 0.0)).re;
                let mag = (jf * lx - lfact - lg).exp();
                let sign = if j % 2 == 0 { sg } else { -sg };
                sign * mag
            }
            Err(_) => 0.0,
        };
        acc.add(term);
        let mag = term.abs();
        max_term = max_term.max(mag);
        let partial = acc.value().abs();
        let past_peak = mag <= prev_mag || j > 2;
        if past_peak && mag < 1e-17 * partial {
            small_run += 1;
            if small_run >= 3 {
                let result = acc.value();
                if max_term > 1e12 * result.abs() {
                    return Err(SpecialError::CancellationOverflow { what: WHAT, x });
                }
                return Ok(result);
            }
        } else {
            small_run = 0;
        }
        prev_mag = mag;
    }
    Err(SpecialError::CancellationOverflow { what: WHAT, x })
}

/// Bessel function of the first kind `J_ν(x)` for `ν > −1`, `0 ≤ x ≤ 100`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64, SpecialError> {
    const WHAT: &str = "bessel_j";
    if !(nu > -1.0) || !(0.0..=100.0).contains(&x) {
        return Err(SpecialError::OutOfTrustedRange { what: WHAT, x });
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(SpecialError::OutOfTrustedRange { what: WHAT, x })
        };
    }
    if x <= 12.0 {
        Ok(bessel_j_series(nu, x))
    } else if x <= 25.0 {
        Ok(bessel_j_miller(nu, x))
    } else {
        Ok(bessel_j_hankel(nu, x))
    }
}

fn bessel_j_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = (nu * h.ln()).exp() * recip_gamma(nu + 1.0);
    let mut acc = Neumaier::default();
    for k in 0..200 {
        acc.add(term);
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        if term.abs() < 1e-18 * acc.value().abs() && kf > h {
            break;
        }
    }
    acc.value()
}

/// Backward recurrence normalised by `Σ_m (ν+2m) Γ(ν+m)/m! · J_{ν+2m}(x) = (x/2)^ν`.
fn bessel_j_miller(nu: f64, x: f64) -> f64 {
    let top = 2 * ((x.ceil() as usize + 40) / 2);
    let mut f_next = 0.0; // f_{k+1}
    let mut f_k = 1e-30; // f_k
    let mut norm = 0.0;
    let f0;
    // ĉ_m = c_m / Γ(ν+1): ĉ_0 = 1, ĉ_m = (ν+2m) ĥ_m, ĥ_1 = 1, ĥ_{m+1} = ĥ_m (ν+m)/(m+1)
    let mut hhat = vec![0.0; top / 2 + 2];
    hhat[1] = 1.0;
    for m in 1..top / 2 + 1 {
        hhat[m + 1] = hhat[m] * (nu + m as f64) / (m as f64 + 1.0);
    }
    let coef = |m: usize| {
        if m == 0 {
            1.0
        } else {
            (nu + 2.0 * m as f64) * hhat[m]
        }
    };
    let mut k = top;
    loop {
        if k.is_multiple_of(2) {
            norm += coef(k / 2) * f_k;
        }
        if k == 0 {
            f0 = f_k;
            break;
        }
        let mu = nu + k as f64;
        let f_prev = 2.0 * mu / x * f_k - f_next;
        f_next = f_k;
        f_k = f_prev;
        k -= 1;
        if f_k.abs() > 1e250 {
            f_k *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    f0 * (nu * (0.5 * x).ln()).exp() * recip_gamma(nu + 1.0) / norm
}

fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a: f64 = 1.0; // a_k(ν) / x^k
    let mut last = f64::INFINITY;
    for k in 0..200usize {
        let mag = a.abs();
        if mag > last || mag < 1e-17 {
            break;
        }
        last = mag;
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        let kf = (k + 1) as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `(Ai(x), Ai′(x))` for `−15 ≤ x ≤ 15`.
pub fn airy(x: f64) -> Result<(f64, f64), SpecialError> {
    if !(-15.0..=15.0).contains(&x) {
        return Err(SpecialError::OutOfTrustedRange { what: "airy", x });
    }
    if (-7.0..=6.0).contains(&x) {
        Ok(airy_maclaurin(x))
    } else if x > 0.0 {
        Ok(airy_asymptotic_right(x))
    } else {
        Ok(airy_asymptotic_left(-x))
    }
}

fn airy_constants() -> (f64, f64) {
    let c1 = 3f64.powf(-2.0 / 3.0) * recip_gamma(2.0 / 3.0);
    let c2 = 3f64.powf(-1.0 / 3.0) * recip_gamma(1.0 / 3.0);
    (c1, c2)
}

fn airy_maclaurin(x: f64) -> (f64, f64) {
    let (c1, c2) = airy_constants();
    let x3 = x * x * x;
    let (mut f, mut fp, mut g, mut gp) = (
        Neumaier::default(),
        Neumaier::default(),
        Neumaier::default(),
        Neumaier::default(),
    );
    let mut tf = 1.0; // a_k x^{3k}
    let mut tfp = 0.5 * x * x; // 3k a_k x^{3k−1}, from k = 1
    let mut tg = x; // b_k x^{3k+1}
    let mut tgp = 1.0; // (3k+1) b_k x^{3k}
    for k in 0..200usize {
        let kf = k as f64;
        f.add(tf);
        g.add(tg);
        gp.add(tgp);
        fp.add(tfp);
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        let k1 = kf + 1.0;
        tfp *= x3 / (3.0 * k1 * (3.0 * k1 + 2.0));
        let scale = f.value().abs() + g.value().abs() + 1e-300;
        if tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs()) < 1e-18 * scale && k > 2 {
            break;
        }
    }
    (
        c1 * f.value() - c2 * g.value(),
        c1 * fp.value() - c2 * gp.value(),
    )
}

/// Coefficients `u_k`, `v_k` of the Airy asymptotic expansions.
fn airy_uv(k_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..=k_max {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

fn truncated_series(coef: &[f64], z: f64, alternating: bool, stride: usize, offset: usize) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in (offset..coef.len()).step_by(stride).enumerate() {
        let term = coef[k] * z.powi(-(k as i32));
        if term.abs() > last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        sum += if alternating && j % 2 == 1 {
            -term
        } else {
            term
        };
    }
    sum
}

fn airy_asymptotic_right(x: f64) -> (f64, f64) {
    let (u, v) = airy_uv(40);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let su = truncated_series(&u, zeta, true, 1, 0);
    let sv = truncated_series(&v, zeta, true, 1, 0);
    (e * x.powf(-0.25) * su, -e * x.powf(0.25) * sv)
}

fn airy_asymptotic_left(y: f64) -> (f64, f64) {
    let (u, v) = airy_uv(40);
    let zeta = 2.0 / 3.0 * y.powf(1.5);
    let (s, c) = (zeta - 0.25 * PI).sin_cos();
    let ue = truncated_series(&u, zeta, true, 2, 0);
    let uo = truncated_series(&u, zeta, true, 2, 1);
    let ve = truncated_series(&v, zeta, true, 2, 0);
    let vo = truncated_series(&v, zeta, true, 2, 1);
    let ai = (c * ue + s * uo) / (PI.sqrt() * y.powf(0.25));
    let aip = y.powf(0.25) / PI.sqrt() * (s * ve - c * vo);
    (ai, aip)
}

/// Normalised sine kernel `sin π(x−y) / (π(x−y))`.
pub fn sine_kernel(x: f64, y: f64) -> f64 {
    let d = PI * (x - y);
    if (x - y).abs() < 1e-6 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

/// Airy kernel `(Ai(x)Ai′(y) − Ai′(x)Ai(y)) / (x−y)`.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64, SpecialError> {
    let (ax, apx) = airy(x)?;
    if (x - y).abs() < 1e-5 {
        let m = 0.5 * (x + y);
        let (a, ap) = airy(m)?;
        return Ok(ap * ap - m * a * a);
    }
    let (ay, apy) = airy(y)?;
    Ok((ax * apy - apx * ay) / (x - y))
}

/// Double-contour form of the Airy kernel over the wedges
/// `γ_R = 1 + ℝ₊e^{±iπ/3}` and `γ_L = −1 + ℝ₊e^{±2iπ/3}`.
pub fn airy_kernel_contour(x: f64, y: f64, tol: f64) -> Result<QuadOutcome, SpecialError> {
    let right = ContourPath::new(
        vec![
            Segment::ray(C64::new(1.0, 0.0), C64::from_polar(1.0, -PI / 3.0), 2.0).reversed(),
            Segment::ray(C64::new(1.0, 0.0), C64::from_polar(1.0, PI / 3.0), 2.0),
        ],
        false,
    )?;
    let left = ContourPath::new(
        vec![
            Segment::ray(
                C64::new(-1.0, 0.0),
                C64::from_polar(1.0, -2.0 * PI / 3.0),
                2.0,
            )
            .reversed(),
            Segment::ray(
                C64::new(-1.0, 0.0),
                C64::from_polar(1.0, 2.0 * PI / 3.0),
                2.0,
            ),
        ],
        false,
    )?;
    let inner = |l: C64| (-(l * l * l) / 3.0 + y * l).exp();
    let (rule, _) = NodeRule::from_adaptive(inner, &left, 1e-3 * tol, &[C64::new(1.0, 0.0)], 0.5)?;
    let outer = |m: C64| {
        let e = (m * m * m / 3.0 - x * m).exp();
        e * rule.apply(|l| inner(l) / (m - l))
    };
    let out = quad::integrate_contour(outer, &right, tol)?;
    let k = C64::new(0.0, 2.0 * PI).powi(-2);
    Ok(out.scale(k))
}
