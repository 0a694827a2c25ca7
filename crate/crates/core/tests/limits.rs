use bilage::limits::{
    bessel_kernel, hard_edge_borodin, hard_edge_contour, hard_edge_uint, square_grid, study_bulk,
    study_edge, study_hard_edge, ConvergenceRow,
};
use bilage::special::{airy_kernel, recip_gamma};
use proptest::prelude::*;

/// Borodin's double series `Σ_{k,l} (−1)^{k+l} x^{α+k} y^{θl} θ /
/// (k! l! Γ((α+1+k)/θ) Γ(α+1+θl) (α+1+k+θl))`, truncated.
fn double_series(alpha: f64, theta: f64, x: f64, y: f64) -> f64 {
    let mut total = 0.0;
    let mut kfact = 1.0;
    for k in 0..80 {
        if k > 0 {
            kfact *= k as f64;
        }
        let a = (-1f64).powi(k)
            * x.powf(alpha + k as f64)
            * recip_gamma((alpha + 1.0 + k as f64) / theta)
            / kfact;
        let mut lfact = 1.0;
        for l in 0..80 {
            if l > 0 {
                lfact *= l as f64;
            }
            let b = (-1f64).powi(l)
                * y.powf(theta * l as f64)
                * recip_gamma(alpha + 1.0 + theta * l as f64)
                / lfact;
            total += a * b * theta / (alpha + 1.0 + k as f64 + theta * l as f64);
        }
    }
    total
}

#[test]
fn double_series_oracle() {
    for (alpha, theta, x, y) in [
        (0.5, 1.5, 0.8, 1.2),
        (0.0, 2.0, 1.0, 1.0),
        (1.0, 3.0, 0.5, 1.5),
    ] {
        let s = double_series(alpha, theta, x, y);
        let u = hard_edge_uint(alpha, theta, x, y).unwrap();
        let b = hard_edge_borodin(alpha, theta, x, y).unwrap();
        assert!((s - u).abs() < 1e-10, "{alpha} {theta}: {s} {u}");
        assert!((s - b).abs() < 1e-10, "{alpha} {theta}: {s} {b}");
    }
}

#[test]
fn triple_equality() {
    for (alpha, theta) in [(-0.5, 1.0), (0.0, 1.5), (0.5, 2.0), (1.0, 3.0)] {
        for (x, y) in square_grid(&[0.5, 1.0, 2.0]) {
            let u = hard_edge_uint(alpha, theta, x, y).unwrap();
            let b = hard_edge_borodin(alpha, theta, x, y).unwrap();
            let c = hard_edge_contour(alpha, theta, x, y).unwrap();
            assert!(
                (u - b).abs() < 1e-7 && (u - c).abs() < 1e-7,
                "{alpha} {theta} ({x}, {y}): {u} {b} {c}"
            );
        }
    }
}

#[test]
fn contour_examples() {
    let u = hard_edge_uint(0.0, 1.0, 1.0, 1.0).unwrap();
    assert!((hard_edge_contour(0.0, 1.0, 1.0, 1.0).unwrap() - u).abs() < 1e-7);
    let b = hard_edge_borodin(1.0, 2.0, 0.5, 1.5).unwrap();
    assert!((hard_edge_contour(1.0, 2.0, 0.5, 1.5).unwrap() - b).abs() < 1e-7);
}

#[test]
fn bessel_reduction() {
    for alpha in [0.0, 0.5, 2.0] {
        for (x, y) in square_grid(&[0.3, 1.0, 2.5]) {
            let u = hard_edge_uint(alpha, 1.0, x, y).unwrap();
            let k =
                4.0 * (x / y).powf(0.5 * alpha) * bessel_kernel(alpha, 4.0 * x, 4.0 * y).unwrap();
            assert!((u - k).abs() < 1e-8, "{alpha} ({x}, {y}): {u} {k}");
        }
    }
}

#[test]
fn borodin_bounded_near_origin() {
    let a = hard_edge_borodin(0.0, 2.0, 1e-8, 1.0).unwrap();
    let b = hard_edge_borodin(0.0, 2.0, 1e-6, 1.0).unwrap();
    assert!(a.is_finite() && (a - b).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn uint_and_borodin_agree(alpha in -0.9f64..2.0, theta in 1.0f64..3.0, x in 0.1f64..3.0, y in 0.1f64..3.0) {
        let u = hard_edge_uint(alpha, theta, x, y).unwrap();
        let b = hard_edge_borodin(alpha, theta, x, y).unwrap();
        prop_assert!((u - b).abs() < 1e-8 * u.abs().max(1.0));
    }

    #[test]
    fn diagonal_nonnegative(alpha in -0.5f64..2.0, theta in 1.0f64..3.0, x in 0.1f64..5.0) {
        prop_assert!(hard_edge_uint(alpha, theta, x, x).unwrap() > -1e-10);
    }
}

fn errors(rows: &[ConvergenceRow]) -> Vec<f64> {
    rows.iter().map(|r| r.sup_error).collect()
}

fn strictly_decreasing(e: &[f64]) -> bool {
    e.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn hard_edge_study_decreases() {
    for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0)] {
        let e = errors(&study_hard_edge(alpha, theta, &[(1.0, 1.0)], &[10, 20, 40]).unwrap());
        assert!(strictly_decreasing(&e), "{alpha} {theta}: {e:?}");
    }
}

#[test]
fn hard_edge_rate_is_inverse_n_at_theta_one() {
    let ns = [10, 20, 40, 80];
    let e = errors(&study_hard_edge(0.0, 1.0, &square_grid(&[0.5, 1.0, 2.0]), &ns).unwrap());
    let scaled: Vec<f64> = e.iter().zip(ns).map(|(e, n)| e * n as f64).collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(hi / lo < 4.0, "{scaled:?}");
}

#[test]
fn edge_study_beyond_theta_one_decreases() {
    let e =
        errors(&study_edge(0.5, 2.0, &square_grid(&[-2.0, 0.0, 1.0]), &[50, 100, 200]).unwrap());
    assert!(strictly_decreasing(&e), "{e:?}");
}

#[test]
fn edge_decay_region() {
    assert!(airy_kernel(3.0, 3.0).unwrap() < 0.01);
    let p = bilage::EnsembleParams::new(0.0, 1.0, 200).unwrap();
    let v = bilage::kernel_finite::kernel_scaled_edge(&p, 3.0, 3.0).unwrap();
    assert!(v.abs() < 0.01, "{v}");
}

#[test]
fn bulk_diagonal_row() {
    let e = errors(
        &study_bulk(
            0.0,
            1.0,
            std::f64::consts::FRAC_PI_3,
            &[(0.0, 0.0), (0.7, 0.7)],
            &[200],
        )
        .unwrap(),
    );
    assert!(e[0] < 0.05, "{e:?}");
}
