mod common;

use common::{bracket, c, triangular_bracket};
use num_complex::Complex64 as C;
use qgspec::secular_oracle::{
    kagome_secular_matrix, normalized_secular, oracle_in_spectrum, side_momentum, triangular_secular_det,
    triangular_secular_matrix, Basis, SecularAssembler,
};
use qgspec::{kernels, scan_bands, LatticeSpec, Quasimomentum, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5ec)
}

fn random_theta(r: &mut impl Rng) -> Quasimomentum<f64> {
    Quasimomentum::new(r.gen_range(-PI..PI), r.gen_range(-PI..PI))
}

fn random_kagome(r: &mut impl Rng) -> LatticeSpec<f64> {
    let d = r.gen_range(1.0..5.0);
    let cc = d * r.gen_range(0.1..0.9);
    LatticeSpec::kagome(cc, d, r.gen_range(0.3..2.0)).unwrap()
}

fn near_sine_zero(z: f64, spec: &LatticeSpec<f64>) -> bool {
    [spec.c, spec.d, spec.d - spec.c].iter().any(|l| (z * l / 2.0).sin().abs() < 1e-3)
}

#[test]
fn dimensions() {
    let q = Quasimomentum::new(0.3, -1.1);
    let kag = LatticeSpec::kagome(1.0, 3.0, 1.0).unwrap();
    let tri = LatticeSpec::triangular(2.0, 1.0).unwrap();
    let m = kagome_secular_matrix(c(1.3), &q, &kag).unwrap();
    assert_eq!((m.dimension, m.matrix.dim()), (12, 12));
    let m = triangular_secular_matrix(c(1.3), &q, &tri).unwrap();
    assert_eq!((m.dimension, m.matrix.dim()), (6, 6));
}

#[test]
fn wrong_lattice_or_zero_momentum_is_rejected() {
    let q = Quasimomentum::gamma();
    let kag = LatticeSpec::kagome(1.0, 3.0, 1.0).unwrap();
    let tri = LatticeSpec::triangular(2.0, 1.0).unwrap();
    assert!(kagome_secular_matrix(c(1.0), &q, &tri).is_err());
    assert!(triangular_secular_matrix(c(1.0), &q, &kag).is_err());
    assert!(kagome_secular_matrix(c(0.0), &q, &kag).is_err());
    assert!(normalized_secular(C::new(f64::NAN, 0.0), &q, &kag).is_err());
}

#[test]
fn normalized_kagome_determinant_matches_bracket() {
    let mut r = rng();
    let mut checked = 0;
    while checked < 1000 {
        let spec = random_kagome(&mut r);
        let k = r.gen_range(0.05..15.0);
        if near_sine_zero(k, &spec) {
            continue;
        }
        let q = random_theta(&mut r);
        let got = normalized_secular(c(k), &q, &spec).unwrap();
        let want = bracket(c(k), &q, &spec);
        let scale = kernels(k, Side::Positive, &spec).scale;
        assert!((got - want).norm() <= 1e-10 * scale, "k = {k}, {spec:?}: {got} vs {want}");
        checked += 1;
    }
}

#[test]
fn imaginary_momentum_gives_negative_bracket() {
    let mut r = rng();
    for _ in 0..1000 {
        let spec = random_kagome(&mut r);
        let kappa = r.gen_range(0.05..6.0) / spec.d;
        let q = random_theta(&mut r);
        let z = side_momentum(kappa, Side::Negative);
        let got = normalized_secular(z, &q, &spec).unwrap();
        let want = kernels(kappa, Side::Negative, &spec).bracket(&q);
        let scale = kernels(kappa, Side::Negative, &spec).scale;
        assert!((got.re - want).abs() <= 1e-10 * scale, "kappa = {kappa}, {spec:?}: {got} vs {want}");
        assert!(got.im.abs() <= 1e-10 * scale);
    }
}

#[test]
fn raw_determinant_is_constant_multiple_of_displayed_form() {
    let spec = LatticeSpec::kagome(1.0, 3.0, 1.3).unwrap();
    for (k, q) in [(0.7, Quasimomentum::new(0.4, 1.9)), (2.2, Quasimomentum::new(-2.5, 0.1)), (4.1, Quasimomentum::k_plus())] {
        let z = c(k);
        let det = kagome_secular_matrix(z, &q, &spec).unwrap().determinant();
        let s = (z * spec.c / 2.0).sin() * (z * spec.d / 2.0).sin() * (z * (spec.d - spec.c) / 2.0).sin();
        let displayed = C::new(0.0, 65536.0)
            * C::from_polar(1.0, 2.0 * q.theta2)
            * z.powi(9)
            * spec.ell.powi(3)
            * s
            * bracket(z, &q, &spec);
        let ratio = det / displayed;
        let want = -(2.0 * z).powi(-6);
        assert!((ratio - want).norm() < 1e-9 * want.norm(), "k = {k}: {ratio} vs {want}");
    }
}

#[test]
fn bases_agree_after_normalization() {
    let spec = LatticeSpec::kagome(0.8, 2.9, 0.7).unwrap();
    let q = Quasimomentum::new(1.2, -0.3);
    for k in [0.01, 0.4, 3.3, 11.0] {
        let a = SecularAssembler::with_basis(c(k), &spec, Basis::Exponential).normalized(&q);
        let b = SecularAssembler::with_basis(c(k), &spec, Basis::Trigonometric).normalized(&q);
        let scale = kernels(k, Side::Positive, &spec).scale;
        assert!((a - b).norm() < 1e-9 * scale, "k = {k}: {a} vs {b}");
    }
}

#[test]
fn flat_momentum_makes_determinant_vanish() {
    let spec = LatticeSpec::kagome(1.0, 3.0, 1.0).unwrap();
    let mut r = rng();
    for _ in 0..20 {
        let q = random_theta(&mut r);
        let at = kagome_secular_matrix(c(2.0 * PI / spec.c), &q, &spec).unwrap().determinant();
        let off = kagome_secular_matrix(c(2.0 * PI / spec.c + 0.1), &q, &spec).unwrap().determinant();
        assert!(at.norm() < 1e-9 * off.norm(), "{at} vs {off}");
    }
}

#[test]
fn equilateral_sign_matches_bracket() {
    let spec = LatticeSpec::equilateral(1.0, 1.0).unwrap();
    let q = Quasimomentum::gamma();
    let z = c(0.5);
    let n = normalized_secular(z, &q, &spec).unwrap();
    let b = bracket(z, &q, &spec);
    assert!(b.re.abs() > 1e-6);
    assert_eq!(n.re.signum(), b.re.signum());
}

#[test]
fn triangular_spurious_root_is_excluded() {
    for (d, ell) in [(1.0, 1.0), (2.5, 0.7), (0.4, 1.6)] {
        let spec = LatticeSpec::triangular(d, ell).unwrap();
        let z = C::new(0.0, 1.0 / ell);
        let n = 64;
        for i in 0..n {
            for j in 0..n {
                let q = Quasimomentum::new(-PI + 2.0 * PI * i as f64 / n as f64, -PI + 2.0 * PI * j as f64 / n as f64);
                let det = triangular_secular_det(z, &q, &spec).unwrap();
                let f = q.f();
                let ch = (d / ell).cosh();
                let displayed = C::new(0.0, 1024.0)
                    * C::from_polar(1.0, 2.0 * q.theta2)
                    * ell.powi(-3)
                    * (d / (2.0 * ell)).sinh().powi(2)
                    * (3.0 + 2.0 * f + 2.0 * (f + 1.0) * ch + (2.0 * d / ell).cosh());
                assert!(det.norm() > 0.0 && displayed.norm() > 0.0);
                let ratio = det / displayed;
                let want = -ell.powi(3) / 8.0;
                assert!((ratio - want).norm() < 1e-9 * want.abs(), "d = {d}: {ratio}");
            }
        }
    }
}

#[test]
fn triangular_flat_momentum_makes_determinant_vanish() {
    let spec = LatticeSpec::triangular(1.0, 1.0).unwrap();
    let q = Quasimomentum::new(0.7, 2.0);
    let at = triangular_secular_det(c(2.0 * PI), &q, &spec).unwrap();
    let off = triangular_secular_det(c(2.0 * PI + 0.1), &q, &spec).unwrap();
    assert!(at.norm() < 1e-9 * off.norm());
}

#[test]
fn triangular_sign_matches_bracket() {
    let spec = LatticeSpec::triangular(1.0, 1.0).unwrap();
    let q = Quasimomentum::gamma();
    let z = c(1.3);
    let n = normalized_secular(z, &q, &spec).unwrap();
    let b = triangular_bracket(z, &q, &spec);
    assert!((n - b).norm() < 1e-10 * b.norm());
    assert_eq!(n.re.signum(), b.re.signum());
}

#[test]
fn oracle_sees_equilateral_flat_band() {
    let spec = LatticeSpec::equilateral(1.0, 1.0).unwrap();
    assert!(oracle_in_spectrum(PI, Side::Positive, &spec, 64));
    assert!(oracle_in_spectrum(2.0 * PI, Side::Positive, &spec, 64));
}

#[test]
fn oracle_rejects_gap_interiors() {
    let spec = LatticeSpec::kagome(1.0, 3.0, 1.0).unwrap();
    let bands = scan_bands(&spec, Side::Positive, 20.0, None).unwrap();
    let cont: Vec<_> = bands.continuous().collect();
    let mut gaps = 0;
    for w in cont.windows(2) {
        let mid: f64 = 0.5 * (w[0].k_hi + w[1].k_lo);
        if w[1].k_lo - w[0].k_hi < 1e-3 || bands.intervals.iter().any(|i| (i.k_lo - mid).abs() < 1e-9) {
            continue;
        }
        assert!(!oracle_in_spectrum(mid, Side::Positive, &spec, 64), "gap midpoint {mid}");
        gaps += 1;
    }
    assert!(gaps >= 5);
}

#[test]
fn coarse_and_fine_grids_agree() {
    let spec = LatticeSpec::kagome(1.0, 3.0, 1.0).unwrap();
    let bands = scan_bands(&spec, Side::Positive, 20.0, None).unwrap();
    let mut r = rng();
    let mut off_edge = 0;
    for _ in 0..1000 {
        let k = r.gen_range(0.0..20.0);
        let coarse = oracle_in_spectrum(k, Side::Positive, &spec, 8);
        let fine = oracle_in_spectrum(k, Side::Positive, &spec, 64);
        if coarse != fine && bands.distance_to_edge(k) > 1e-8 {
            off_edge += 1;
        }
    }
    assert_eq!(off_edge, 0);
}
