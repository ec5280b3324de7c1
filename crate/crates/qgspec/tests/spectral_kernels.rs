mod common;

use common::{c, lambdas, triangular_bracket};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use qgspec::lattice::{f_theta, g_theta};
use qgspec::secular_oracle::normalized_secular;
use qgspec::spectral_kernels::{
    alpha, asymptotic_coefficients, beta, bracket, gamma, kagome_equilateral_f, lambda_neg, lambda_pos, tri_g,
    tri_g_tilde, xi, CoefficientKind,
};
use qgspec::{kernels, Error, Extremum, LatticeSpec, Quasimomentum, Side};
use std::f64::consts::PI;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn theta_functions_at_special_points() {
    let s = 3f64.sqrt();
    let g = Quasimomentum::gamma();
    assert_eq!((g.f(), g.g()), (3.0, 0.0));
    let kp = Quasimomentum::<f64>::k_plus();
    assert!(close(kp.f(), -1.5, 1e-15) && close(kp.g(), -1.5 * s, 1e-15));
    let km = Quasimomentum::<f64>::k_minus();
    assert!(close(km.f(), -1.5, 1e-15) && close(km.g(), 1.5 * s, 1e-15));
}

proptest! {
    #[test]
    fn theta_functions_stay_in_range(t1 in -PI..PI, t2 in -PI..PI) {
        let q = Quasimomentum::new(t1, t2);
        let lim = 1.5 * 3f64.sqrt() + 1e-12;
        prop_assert!((-1.5 - 1e-12..=3.0 + 1e-12).contains(&f_theta(&q)));
        prop_assert!(g_theta(&q).abs() <= lim);
    }

    #[test]
    fn extremal_points_are_critical(k in 0.05f64..30.0, cc in 0.1f64..0.9, ell in 0.2f64..3.0) {
        let spec = LatticeSpec::<f64>::kagome(cc * 2.5, 2.5, ell).unwrap();
        let t = lambda_pos(k, &spec);
        for e in Extremum::ALL {
            let (d1, d2) = t.theta_gradient(&e.theta());
            prop_assert!(d1.abs() <= 1e-12 * t.scale && d2.abs() <= 1e-12 * t.scale);
        }
    }

    #[test]
    fn mirror_symmetry(k in 0.05f64..30.0, cc in 0.05f64..0.95, ell in 0.2f64..3.0, d in 0.5f64..6.0) {
        let spec = LatticeSpec::<f64>::kagome(cc * d, d, ell).unwrap();
        let m = spec.mirrored();
        for (side, arg) in [(Side::Positive, k), (Side::Negative, k / d)] {
            let a = kernels(arg, side, &spec);
            let b = kernels(arg, side, &m);
            let tol = 1e-12 * a.scale;
            prop_assert!((a.l1 - b.l1).abs() <= tol, "{:?} l1", side);
            prop_assert!((a.l2 - b.l2).abs() <= tol, "{:?} l2", side);
            prop_assert!((a.l3 + b.l3).abs() <= tol, "{:?} l3", side);
        }
    }
}

#[test]
fn equilateral_has_no_third_kernel() {
    let spec = LatticeSpec::<f64>::equilateral(1.3, 0.8).unwrap();
    for i in 1..200 {
        let x = 0.05 * i as f64;
        assert_eq!(lambda_pos(x, &spec).l3, 0.0);
        assert_eq!(lambda_neg(x, &spec).l3, 0.0);
    }
}

#[test]
fn coupling_momentum_kills_second_and_third_kernels() {
    for (cc, d, ell) in [(1.0, 3.0, 1.0), (0.4, 2.0, 0.5), (2.0, 2.5, 2.0)] {
        let spec = LatticeSpec::<f64>::kagome(cc, d, ell).unwrap();
        let t = lambda_pos(1.0 / ell, &spec);
        assert!(t.l2.abs() < 1e-13 * t.scale && t.l3.abs() < 1e-13 * t.scale);
    }
}

#[test]
fn kernels_decompose_the_oracle() {
    let spec = LatticeSpec::<f64>::kagome(1.0, 3.0, 1.0).unwrap();
    let k = 1.7;
    let qs = [Quasimomentum::new(0.3, -1.2), Quasimomentum::new(2.0, 0.5), Quasimomentum::new(-1.1, 2.7)];
    let a = Matrix3::from_fn(|i, j| [1.0, -qs[i].f(), -qs[i].g()][j]);
    let b = Vector3::from_fn(|i, _| normalized_secular(c(k), &qs[i], &spec).unwrap().re);
    let sol = a.lu().solve(&b).unwrap();
    let t = lambda_pos(k, &spec);
    for (got, want) in sol.iter().zip([t.l1, t.l2, t.l3]) {
        assert!((got - want).abs() < 1e-9 * t.scale, "{got} vs {want}");
    }
}

#[test]
fn bracket_matches_oracle_at_sample_point() {
    let spec = LatticeSpec::<f64>::kagome(1.0, 3.0, 1.0).unwrap();
    let q = Quasimomentum::new(1.0, -0.4);
    let b = bracket(0.9, Side::Positive, &q, &spec);
    let n = normalized_secular(c(0.9), &q, &spec).unwrap();
    assert!((n.re - b).abs() < 1e-10 * lambda_pos(0.9, &spec).scale);
}

#[test]
fn bracket_at_gamma() {
    for spec in [LatticeSpec::<f64>::kagome(1.0, 3.0, 1.0).unwrap(), LatticeSpec::<f64>::triangular(2.0, 0.5).unwrap()] {
        for k in [0.3, 2.0, 7.7] {
            let t = kernels(k, Side::Positive, &spec);
            assert_eq!(bracket(k, Side::Positive, &Quasimomentum::gamma(), &spec), t.l1 - 3.0 * t.l2);
        }
    }
}

#[test]
fn negative_kernels_continue_positive_ones() {
    for (cc, d, ell) in [(1.0, 3.0, 1.0), (0.3, 1.1, 0.6), (2.2, 3.0, 1.7)] {
        let spec = LatticeSpec::<f64>::kagome(cc, d, ell).unwrap();
        for i in 1..60 {
            let kappa = 0.1 * i as f64 / d;
            let t = lambda_neg(kappa, &spec);
            let z = lambdas(C::new(0.0, kappa), &spec);
            for (got, want) in [t.l1, t.l2, t.l3].iter().zip(z) {
                assert!((got - want.re).abs() <= 1e-10 * t.scale, "kappa = {kappa}: {got} vs {want}");
                assert!(want.im.abs() <= 1e-10 * t.scale);
            }
        }
    }
}

#[test]
fn negative_kernels_at_coupling_scale() {
    let (cc, d, ell) = (1.0, 3.2, 0.9);
    let spec = LatticeSpec::<f64>::kagome(cc, d, ell).unwrap();
    let t = lambda_neg(1.0 / ell, &spec);
    let want = 64.0 * (cc / (2.0 * ell)).sinh() * ((d - 2.0 * cc) / (2.0 * ell)).sinh() * ((d - cc) / (2.0 * ell)).sinh();
    assert!(t.l1.abs() < 1e-12 * t.scale && t.l2.abs() < 1e-12 * t.scale);
    assert!(close(t.l3, want, 1e-12));
}

#[test]
fn equilateral_bracket_reduces() {
    let (cc, ell) = (1.0, 0.7);
    let spec = LatticeSpec::<f64>::equilateral(cc, ell).unwrap();
    let reduced = |k: f64, f: f64| {
        let kk = k * k * ell * ell;
        let kc = k * cc;
        (kk * kk + 14.0 * kk + 1.0) * kc.cos()
            + (kk + 1.0).powi(2) * (2.0 * (2.0 * kc).cos() + 2.0 * (3.0 * kc).cos() + 1.0)
            - (kc.cos() + 1.0) * (kk - 1.0).powi(2) * f
    };
    let qs = [Quasimomentum::gamma(), Quasimomentum::new(0.4, 2.2), Quasimomentum::k_plus()];
    let factor = |k: f64| 4.0 * (k * k * ell * ell + 1.0) * (2.0 * (k * cc).cos() + 1.0);
    for k in [0.37, 1.9, 4.4] {
        for q in &qs {
            let ratio = bracket(k, Side::Positive, q, &spec) / reduced(k, q.f());
            assert!(close(ratio, factor(k), 1e-10), "k = {k}: {ratio}");
        }
    }
    // odd multiples of π/c: the reduced bracket is −12π²n²ℓ²/c² for every θ
    for n in [1, 3, 5] {
        let k = n as f64 * PI / cc;
        let want = -12.0 * (PI * n as f64 * ell / cc).powi(2);
        for q in &qs {
            assert!(close(reduced(k, q.f()), want, 1e-10));
            let t = lambda_pos(k, &spec);
            assert!(close(bracket(k, Side::Positive, q, &spec), factor(k) * want, 1e-10));
            assert!(t.l2.abs() < 1e-12 * t.scale);
        }
    }
}

#[test]
fn triangular_kernels_match_bracket() {
    let spec = LatticeSpec::<f64>::triangular(1.0, 1.0).unwrap();
    for (k, q) in [(0.4, Quasimomentum::new(0.3, 0.1)), (1.3, Quasimomentum::gamma()), (5.5, Quasimomentum::k_minus())] {
        let b = bracket(k, Side::Positive, &q, &spec);
        let want = triangular_bracket(c(k), &q, &spec).re;
        assert!(close(b, want, 1e-12));
    }
}

#[test]
fn tri_g_small_momentum() {
    for (d, ell) in [(1.0, 1.0), (5.0, 1.0), (2.0, 0.3)] {
        let spec = LatticeSpec::<f64>::triangular(d, ell).unwrap();
        for k in [1e-3, 5e-4] {
            let approx = 3.0 + 1.5 * (12.0 * ell * ell - d * d) * k * k;
            let g = tri_g(k, &spec).unwrap();
            assert!((g - approx).abs() < 1e-3 * k * k, "d = {d}, k = {k}: {g} vs {approx}");
            let gt = tri_g_tilde(k, &spec);
            let approx = 3.0 + 1.5 * (d * d - 12.0 * ell * ell) * k * k;
            assert!((gt - approx).abs() < 1e-3 * k * k, "d = {d}, kappa = {k}: {gt} vs {approx}");
        }
    }
}

#[test]
fn tri_g_tilde_at_coupling_scale() {
    for (d, ell) in [(1.0, 1.0), (3.0, 0.5), (0.2, 2.0)] {
        let spec = LatticeSpec::<f64>::triangular(d, ell).unwrap();
        let ch = (d / ell).cosh();
        let want = -ch - 1.0 / (ch + 1.0);
        assert!(close(tri_g_tilde(1.0 / ell, &spec), want, 1e-13));
        assert!(want < -1.5);
    }
}

#[test]
fn tri_g_reports_singular_denominators() {
    let spec = LatticeSpec::<f64>::triangular(1.0, 1.0).unwrap();
    assert!(matches!(tri_g(PI, &spec), Err(Error::SingularDenominator(_))));
    assert!(matches!(tri_g(1.0, &spec), Err(Error::SingularDenominator(_))));
    assert!(tri_g(1.3, &spec).is_ok());
}

#[test]
fn tri_g_agrees_with_bracket_root() {
    // f = G(k) is exactly where the bracket vanishes
    let spec = LatticeSpec::<f64>::triangular(1.0, 1.0).unwrap();
    for k in [0.3, 1.7, 4.0, 9.1] {
        let g = tri_g(k, &spec).unwrap();
        let t = kernels(k, Side::Positive, &spec);
        assert!((t.l1 - t.l2 * g).abs() < 1e-12 * t.scale);
    }
}

#[test]
fn equilateral_f_values() {
    for (cc, ell) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
        let spec = LatticeSpec::<f64>::equilateral(cc, ell).unwrap();
        let want = -1.5 * ((cc / (2.0 * ell)).tanh().powi(2) + 1.0);
        assert!(close(kagome_equilateral_f(1.0 / ell, &spec), want, 1e-13));
        assert!(close(kagome_equilateral_f(1e-9, &spec), 3.0, 1e-9));
        let mut prev = kagome_equilateral_f(5.0 / ell, &spec);
        for i in 1..200 {
            let next = kagome_equilateral_f((5.0 + 0.1 * i as f64) / ell, &spec);
            assert!(next > prev);
            prev = next;
        }
        assert!(prev > 1e5);
    }
}

#[test]
fn xi_values() {
    let cc = 1.3;
    let top = (0.25f64).acos() / cc;
    assert!(close(xi(top, cc), 9.0 / 8.0, 1e-14));
    assert!(close(xi(2.0 * PI / cc - top, cc), 9.0 / 8.0, 1e-14));
    let max = (0..100_000).map(|i| xi(2.0 * PI / cc * i as f64 / 1e5, cc)).fold(f64::MIN, f64::max);
    assert!(max <= 9.0 / 8.0 + 1e-15 && max > 9.0 / 8.0 - 1e-8);
    assert!(close(xi(PI / cc, cc), -2.0, 1e-14));
    assert!(xi(2.0 * PI / (3.0 * cc), cc).abs() < 1e-14);
    assert!(xi(4.0 * PI / (3.0 * cc), cc).abs() < 1e-14);
}

#[test]
fn alpha_vanishes_with_its_factor() {
    let spec = LatticeSpec::<f64>::kagome(1.0, 3.0, 1.0).unwrap();
    let factor = |k: f64| (k * (2.0 * spec.c - spec.d) / 2.0).cos() + 2.0 * (k * spec.d / 2.0).cos();
    let q = Quasimomentum::new(0.9, -2.0);
    let mut roots = 0;
    for i in 0..2000 {
        let (a, b) = (0.01 * i as f64, 0.01 * (i + 1) as f64);
        if factor(a) * factor(b) < 0.0 {
            let root = qgspec::roots::bisect_root(factor, a, b).unwrap();
            assert!(alpha(root, &q, &spec).abs() < 1e-12);
            roots += 1;
        }
    }
    assert!(roots > 5);
}

#[test]
fn beta_and_gamma_factors() {
    let eq = LatticeSpec::<f64>::equilateral(1.0, 1.0).unwrap();
    let q = Quasimomentum::new(0.2, 1.4);
    for n in 1..6 {
        let k = (2 * n - 1) as f64 * PI / eq.c;
        assert!(beta(k, &q, &eq).0.abs() < 1e-12);
    }
    let tri = LatticeSpec::<f64>::triangular(1.0, 1.0).unwrap();
    // 3 cos kd = f on both sides of a root of the factor
    let f = q.f();
    let root = (f / 3.0).acos() / tri.d;
    let below = gamma(root - 1e-3, &q, &tri).0;
    let above = gamma(root + 1e-3, &q, &tri).0;
    assert!(below * above < 0.0);
}

#[test]
fn coefficient_kinds_are_checked() {
    let kag = LatticeSpec::<f64>::kagome(1.0, 3.0, 1.0).unwrap();
    let eq = LatticeSpec::<f64>::equilateral(1.0, 1.0).unwrap();
    let tri = LatticeSpec::<f64>::triangular(1.0, 1.0).unwrap();
    let q = Quasimomentum::gamma();
    assert!(asymptotic_coefficients(2.0, &q, &kag, CoefficientKind::Alpha).is_ok());
    assert!(asymptotic_coefficients(2.0, &q, &eq, CoefficientKind::Beta).is_ok());
    assert!(asymptotic_coefficients(2.0, &q, &tri, CoefficientKind::Gamma).is_ok());
    assert!(matches!(asymptotic_coefficients(2.0, &q, &kag, CoefficientKind::Beta), Err(Error::Unsupported(_))));
    assert!(matches!(asymptotic_coefficients(2.0, &q, &tri, CoefficientKind::Alpha), Err(Error::Unsupported(_))));
    assert!(matches!(asymptotic_coefficients(2.0, &q, &eq, CoefficientKind::Gamma), Err(Error::Unsupported(_))));
}
