use std::f64::consts::PI;

use bilage::kernel_finite::saddle::{c1, phase_defect, phase_hat, sigma_tilde, x_star, z0};
use bilage::kernel_finite::scaled::kernel_scaled_bulk_parts;
use bilage::kernel_finite::{
    kernel_contour, kernel_contour_estimate, kernel_residue, kernel_scaled_bulk,
    kernel_scaled_edge, kernel_series, saddle_points,
};
use bilage::special::{airy_kernel, sine_kernel};
use bilage::{EnsembleParams, C64};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn grid() -> Vec<(f64, f64)> {
    let pts = [0.5, 2.0, 5.0];
    pts.iter()
        .flat_map(|x| pts.iter().map(move |y| (*x, *y)))
        .collect()
}

#[test]
fn three_methods_agree() {
    let mut worst = 0.0f64;
    for n in [3, 5, 10] {
        for alpha in [-0.5, 0.0, 1.0] {
            for theta in [0.5, 1.0, 2.0, 2.5] {
                let p = EnsembleParams::new(alpha, theta, n).unwrap();
                for (x, y) in grid() {
                    let s = kernel_series(&p, x, y).unwrap();
                    let c = kernel_contour(&p, x, y).unwrap();
                    let r = kernel_residue(&p, x, y).unwrap();
                    let d = rel(s, c).max(rel(s, r)).max(rel(c, r));
                    assert!(d < 1e-7, "{p:?} ({x}, {y}): {s} {c} {r}");
                    worst = worst.max(d);
                }
            }
        }
    }
    assert!(worst < 1e-7);
}

#[test]
fn contour_height_independence() {
    for (alpha, theta, n, x, y) in [
        (0.0, 1.0, 5, 2.0, 2.0),
        (0.5, 2.0, 8, 1.3, 0.7),
        (-0.5, 1.5, 10, 0.8, 1.1),
    ] {
        let p = EnsembleParams::new(alpha, theta, n).unwrap();
        let a = kernel_contour_estimate(&p, x, y, 1.0).unwrap();
        let b = kernel_contour_estimate(&p, x, y, 2.0).unwrap();
        // the estimates carry a roundoff floor relative to the value
        let budget = 3.0 * (a.abs_err.max(b.abs_err) + 1e-13 * a.value.abs());
        assert!((a.value - b.value).abs() < budget, "{a:?} {b:?}");
    }
}

#[test]
fn diagonal_is_positive() {
    for (alpha, theta) in [(0.0, 1.0), (0.5, 2.0), (-0.5, 0.5)] {
        let p = EnsembleParams::new(alpha, theta, 6).unwrap();
        for x in [0.1, 0.5, 1.0, 3.0, 8.0] {
            assert!(kernel_series(&p, x, x).unwrap() > -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn saddle_residual_is_small(theta in 0.2f64..5.0, frac in 0.001f64..0.999) {
        let phi = frac * PI / (1.0 + theta);
        let sd = saddle_points(theta, phi).unwrap();
        prop_assert!(sd.residual(theta) < 1e-10);
        prop_assert_eq!(sd.w_minus, sd.w_plus.conj());
    }
}

#[test]
fn saddle_curve_reaches_edge_and_origin() {
    for theta in [0.5, 1.0, 2.0, 3.0] {
        assert!((sigma_tilde(theta, 0.0) - C64::new(1.0 + 1.0 / theta, 0.0)).norm() < 1e-12);
        let end = sigma_tilde(theta, PI / (1.0 + theta) * (1.0 - 1e-9));
        assert!(end.norm() < 1e-6, "theta {theta}: {end}");
    }
}

#[test]
fn cubic_expansion_at_the_edge() {
    for theta in [1.0, 2.0] {
        let xs = x_star(theta);
        let z = z0(theta);
        let base = phase_hat(C64::new(z, 0.0), xs, theta);
        let defect = |n: f64, u: f64| {
            let w = C64::new(z + n.powf(-1.0 / 3.0) * c1(theta) * u, 0.0);
            (phase_hat(w, xs, theta) - base - u * u * u / (3.0 * n)).norm()
        };
        for u in [-1.0, 1.0] {
            let d: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&n| defect(n, u)).collect();
            assert!(d[0] > d[1] && d[1] > d[2], "theta {theta} u {u}: {d:?}");
            assert!(d[2] <= 1e4f64.powf(-1.2) * 10.0);
        }
    }
}

#[test]
fn stirling_defect_decreases() {
    let z = C64::new(3.0, 2.0);
    let d: Vec<f64> = [50, 200, 800]
        .iter()
        .map(|&n| {
            phase_defect(z, 1.0, &EnsembleParams::new(0.0, 1.0, n).unwrap())
                .unwrap()
                .norm()
        })
        .collect();
    assert!(d[1] < 5e-3, "{d:?}");
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

// Frozen from a 60-digit evaluation of the polynomial series.
const SERIES_REFERENCE: [(f64, f64, usize, f64, [f64; 2]); 4] = [
    (
        0.0,
        1.0,
        20,
        PI / 3.0,
        [0.27346376866967556, 0.070_573_581_264_525_05],
    ),
    (
        0.5,
        2.0,
        24,
        0.5,
        [0.10543221901121725, 0.004_023_541_872_928_994],
    ),
    (
        -0.5,
        1.5,
        25,
        0.8,
        [0.19544298466278742, 0.027_278_247_811_912_55],
    ),
    (
        0.0,
        1.0,
        30,
        0.3,
        [0.051653774897560615, 0.00020638530787365619],
    ),
];

#[test]
fn saddle_contours_match_high_precision_series() {
    for (alpha, theta, n, phi, want) in SERIES_REFERENCE {
        let p = EnsembleParams::new(alpha, theta, n).unwrap();
        for ((xi, eta), w) in [(0.0, 0.0), (0.3, -0.2)].into_iter().zip(want) {
            let got = kernel_scaled_bulk_parts(&p, phi, xi, eta).unwrap().raw;
            assert!(rel(got, w) < 1e-9, "{p:?} ({xi}, {eta}): {got} vs {w}");
        }
    }
}

#[test]
fn bulk_example_near_sine_kernel() {
    let p = EnsembleParams::new(0.0, 1.0, 100).unwrap();
    let v = kernel_scaled_bulk(&p, PI / 3.0, 0.3, -0.2).unwrap();
    assert!((v - sine_kernel(0.3, -0.2)).abs() < 0.05, "{v}");
    assert!((sine_kernel(0.3, -0.2) - 2.0 / PI).abs() < 1e-12);
}

#[test]
fn bulk_diagonal_and_symmetry() {
    let p = EnsembleParams::new(0.0, 1.0, 200).unwrap();
    let d = kernel_scaled_bulk(&p, PI / 3.0, 0.4, 0.4).unwrap();
    assert!(d > 0.0 && (d - 1.0).abs() < 0.05, "{d}");
    let a = kernel_scaled_bulk(&p, PI / 3.0, 0.5, -0.5).unwrap();
    let b = kernel_scaled_bulk(&p, PI / 3.0, -0.5, 0.5).unwrap();
    assert!((a - b).abs() < 0.1, "{a} {b}");
}

#[test]
fn edge_example_near_airy_kernel() {
    let p = EnsembleParams::new(0.0, 1.0, 200).unwrap();
    let v = kernel_scaled_edge(&p, 0.0, 0.0).unwrap();
    let target = airy_kernel(0.0, 0.0).unwrap();
    assert!((target - 0.0669875).abs() < 1e-6);
    assert!((v - target).abs() < 0.15, "{v}");
}

#[test]
fn edge_example_beyond_theta_one() {
    let p = EnsembleParams::new(0.5, 2.0, 100).unwrap();
    let v = kernel_scaled_edge(&p, 0.0, 0.0).unwrap();
    assert!((v - airy_kernel(0.0, 0.0).unwrap()).abs() < 0.1, "{v}");
}
