use bilage::biopoly::*;
use bilage::quad::{integrate_contour, ContourPath};
use bilage::special::{gamma_real, log_gamma};
use bilage::{EnsembleParams, C64};
use proptest::prelude::*;

fn params(alpha: f64, theta: f64) -> EnsembleParams {
    EnsembleParams::new(alpha, theta, 1).unwrap()
}

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    fn norm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }
    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let v = s - self.hi;
        let e = (self.hi - (s - v)) + (o.hi - v);
        Dd::norm(s, e + self.lo + o.lo)
    }
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::norm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
    fn div(self, o: Dd) -> Dd {
        let q = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(q)).neg());
        let q2 = r.hi / o.hi;
        Dd::norm(q, q2)
    }
    fn abs_ln(self) -> f64 {
        self.hi.abs().ln() + (self.lo / self.hi).ln_1p()
    }
}

/// `ln|det A|` by Gaussian elimination with partial pivoting in
/// double-double, for `A` given as column log-scales times entries.
fn log_abs_det(col_log: &[f64], mut m: Vec<Vec<Dd>>) -> f64 {
    let n = m.len();
    let mut log: f64 = col_log.iter().sum();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].hi.abs().total_cmp(&m[j][k].hi.abs()))
            .unwrap();
        m.swap(k, p);
        let pivot = m[k][k];
        log += pivot.abs_ln();
        for i in k + 1..n {
            let f = m[i][k].div(pivot);
            for j in k..n {
                m[i][j] = m[i][j].add(f.mul(m[k][j]).neg());
            }
        }
    }
    log
}

/// The bimoment matrix with column `k` divided by `Γ(α+1+kθ)`; the entries
/// `Γ(α+1+j+kθ)/Γ(α+1+kθ)` are built in double-double from `Γ(z+1) = zΓ(z)`.
fn bimoment_matrix(n: usize, p: &EnsembleParams) -> (Vec<f64>, Vec<Vec<Dd>>) {
    let col_log: Vec<f64> = (0..=n).map(|k| log_bimoment(0, k, p)).collect();
    let mut m = vec![vec![Dd::new(1.0); n + 1]; n + 1];
    for k in 0..=n {
        let beta = p.alpha() + 1.0 + k as f64 * p.theta();
        for j in 1..=n {
            m[j][k] = m[j - 1][k].mul(Dd::new(beta + (j - 1) as f64));
        }
    }
    (col_log, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_closed_form_matches_direct(alpha in -0.9f64..2.0, theta in 0.3f64..2.5, n in 0usize..=6) {
        let p = params(alpha, theta);
        let (col_log, matrix) = bimoment_matrix(n, &p);
        for j in 0..=n {
            for k in 0..=n {
                let direct = bimoment(j, k, &p).unwrap();
                let built = matrix[j][k].hi * col_log[k].exp();
                prop_assert!((built - direct).abs() <= 1e-13 * direct);
            }
        }
        let direct = log_abs_det(&col_log, matrix);
        let closed = log_bimoment_det(n, &p);
        prop_assert!((direct - closed).abs() <= 1e-9 * closed.abs().max(1.0), "α={alpha} θ={theta} n={n}: {direct} vs {closed}");
    }

    #[test]
    fn q_is_monic(alpha in -0.9f64..2.0, theta in 0.3f64..1.5, k in 1usize..=10) {
        // k-th forward difference of a monic degree-k polynomial is k! h^k.
        let p = params(alpha, theta);
        let h = (log_bimoment(0, k, &p) / k as f64).exp().max(1.0) * 4.0;
        let mut diff = 0.0;
        let mut scale = 0.0;
        for i in 0..=k {
            let binom = (0..i).fold(1.0, |b, r| b * (k - r) as f64 / (r + 1) as f64);
            let v = q_poly(k, i as f64 * h, &p).unwrap();
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            diff += sign * binom * v;
            scale += binom * v.abs();
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let lead = diff / (fact * h.powi(k as i32));
        prop_assert!((lead - 1.0).abs() < 1e-9 + 8.0 * f64::EPSILON * scale / (fact * h.powi(k as i32)), "{lead}");
    }
}

fn q_residue_sum(k: usize, x: f64, p: &EnsembleParams) -> f64 {
    // Residue of Γ(t−k) at t = j is (−1)^{k−j}/(k−j)!.
    let gk = gamma_real(p.alpha() + 1.0 + k as f64 * p.theta()).unwrap();
    let kf: f64 = (1..=k).map(|i| i as f64).product();
    (0..=k)
        .map(|j| {
            let fj: f64 = (1..=j).map(|i| i as f64).product();
            let fkj: f64 = (1..=k - j).map(|i| i as f64).product();
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * x.powi(j as i32)
                / (fkj * fj * gamma_real(p.alpha() + 1.0 + j as f64 * p.theta()).unwrap())
        })
        .sum::<f64>()
        * gk
        * kf
}

#[test]
fn residue_sum_matches_explicit_q() {
    for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0), (-0.5, 1.5), (1.2, 0.6)] {
        let p = params(alpha, theta);
        for k in 0..=10 {
            for x in [0.0, 0.4, 1.7, 6.0] {
                let a = q_poly(k, x, &p).unwrap();
                let b = q_residue_sum(k, x, &p);
                // Every term has the same sign at −x, so |q_k(−x)| is the term mass.
                let mass = q_poly(k, -x, &p).unwrap().abs();
                assert!(
                    (a - b).abs() <= 1e-10 * mass.max(1.0),
                    "k={k} x={x}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn closed_contour_form_matches_explicit_q() {
    for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0), (-0.3, 1.5)] {
        let p = params(alpha, theta);
        for k in [0, 1, 4, 8] {
            for x in [0.5f64, 2.0] {
                let path =
                    ContourPath::circle(C64::new(0.5 * k as f64, 0.0), 0.5 * k as f64 + 0.45);
                let lk =
                    log_bimoment(0, k, &p) + log_gamma(C64::new(k as f64 + 1.0, 0.0)).unwrap().re;
                let f = |t: C64| {
                    let l = log_gamma(t - k as f64).unwrap()
                        - log_gamma(t + 1.0).unwrap()
                        - log_gamma(alpha + 1.0 + theta * t).unwrap()
                        + t * x.ln()
                        + lk;
                    l.exp()
                };
                let out = integrate_contour(f, &path, 1e-12).unwrap();
                let v = out.value / C64::new(0.0, 2.0 * std::f64::consts::PI);
                let q = q_poly(k, x, &p).unwrap();
                assert!(
                    (v.re - q).abs() <= 1e-9 * q.abs().max(1.0),
                    "k={k} x={x}: {v} vs {q}"
                );
                assert!(v.im.abs() <= 1e-9 * q.abs().max(1.0));
            }
        }
    }
}

#[test]
fn explicit_p_is_biorthogonal_exactly() {
    // ∫ x^{α+l+mθ} e^{−x} dx = Γ(α+1+l+mθ), applied to the coefficients of
    // p_k (recovered by interpolation) and q_j.
    for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0), (-0.5, 1.5)] {
        let p = params(alpha, theta);
        for k in 0..=5 {
            let coeffs = interpolate_coefficients(|x| p_poly(k, x, &p).unwrap(), k);
            for j in 0..=5 {
                let qc: Vec<f64> = (0..=j)
                    .map(|m| {
                        let sign = if (j + m) % 2 == 0 { 1.0 } else { -1.0 };
                        let binom = (0..m).fold(1.0, |b, r| b * (j - r) as f64 / (r + 1) as f64);
                        sign * binom * (log_bimoment(0, j, &p) - log_bimoment(0, m, &p)).exp()
                    })
                    .collect();
                let mut acc = 0.0;
                let mut mass = 0.0;
                for (l, a) in coeffs.iter().enumerate() {
                    for (m, b) in qc.iter().enumerate() {
                        let term = a * b * bimoment(l, m, &p).unwrap();
                        acc += term;
                        mass += term.abs();
                    }
                }
                let want = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (acc - want).abs() < 1e-10 + 1e-12 * mass,
                    "α={alpha} θ={theta} k={k} j={j}: {acc}"
                );
            }
        }
    }
}

/// Monomial coefficients of a degree-`d` polynomial from values at 0..=d,
/// by Newton divided differences.
fn interpolate_coefficients(f: impl Fn(f64) -> f64, d: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=d).map(|i| i as f64).collect();
    let mut dd: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for level in 1..=d {
        for i in (level..=d).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut coeffs = vec![0.0; d + 1];
    for i in (0..=d).rev() {
        // coeffs ← coeffs·(x − xs[i]) + dd[i]
        let mut next = vec![0.0; d + 1];
        for m in 0..d {
            next[m + 1] += coeffs[m];
        }
        for m in 0..=d {
            next[m] -= xs[i] * coeffs[m];
        }
        next[0] += dd[i];
        coeffs = next;
    }
    coeffs
}

#[test]
fn pochhammer_factor_is_a_degree_k_polynomial() {
    for k in [1usize, 3, 5] {
        let ratio = |s: C64| (log_gamma(s).unwrap() - log_gamma(s - k as f64).unwrap()).exp();
        // Lagrange interpolation through k+1 nodes, checked off the nodes.
        let nodes: Vec<C64> = (0..=k)
            .map(|i| C64::new(0.3 + 0.7 * i as f64, 0.2))
            .collect();
        let values: Vec<C64> = nodes.iter().map(|&s| ratio(s)).collect();
        for probe in [C64::new(2.1, -1.3), C64::new(-0.6, 2.5), C64::new(7.4, 0.1)] {
            let mut interp = C64::new(0.0, 0.0);
            for (i, &ni) in nodes.iter().enumerate() {
                let mut w = values[i];
                for (m, &nm) in nodes.iter().enumerate() {
                    if m != i {
                        w *= (probe - nm) / (ni - nm);
                    }
                }
                interp += w;
            }
            let direct = log_pochhammer_factor(probe, k).exp();
            assert!(
                (interp - direct).norm() < 1e-10 * direct.norm().max(1.0),
                "k={k}"
            );
            assert!(
                (ratio(probe) - direct).norm() < 1e-10 * direct.norm().max(1.0),
                "k={k}"
            );
        }
    }
}

#[test]
fn weighted_p_lies_in_the_weight_span() {
    // Least-squares fit of x^α e^{−x} p_2 on {x^{α+l} e^{−x}, l = 0..2}.
    let p = params(0.0, 1.0);
    let xs: Vec<f64> = (0..50).map(|i| 0.1 + 0.2 * i as f64).collect();
    let rows: Vec<[f64; 3]> = xs
        .iter()
        .map(|&x| {
            let w = x.powf(p.alpha()) * (-x).exp();
            [w, w * x, w * x * x]
        })
        .collect();
    let rhs: Vec<f64> = xs.iter().map(|&x| p_weighted(2, x, &p).unwrap()).collect();
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (r, b) in rows.iter().zip(&rhs) {
        for i in 0..3 {
            atb[i] += r[i] * b;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let coef = solve3(ata, atb);
    let resid = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| (r[0] * coef[0] + r[1] * coef[1] + r[2] * coef[2] - b).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(resid < 1e-8, "{resid}");
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for k in 0..3 {
        let p = (k..3)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..3 {
            let f = a[i][k] / a[k][k];
            for j in k..3 {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[test]
fn mellin_moments_of_weighted_p() {
    let p = params(0.5, 1.5);
    for k in 0..=5 {
        for j in 0..=k {
            let f = |x: f64| Ok(x.powf(j as f64 * p.theta()) * p_weighted(k, x, &p)?);
            let out =
                integrate_weighted(f, weight_cutoff(k, j, &p), p.alpha(), DEFECT_TOL).unwrap();
            let want = if j == k { 1.0 } else { 0.0 };
            assert!(
                (out.value.re - want).abs() < 1e-7,
                "j={j} k={k}: {}",
                out.value.re
            );
        }
    }
}
