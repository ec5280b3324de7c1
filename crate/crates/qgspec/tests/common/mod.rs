#![allow(dead_code)]

use num_complex::Complex64 as C;
use qgspec::{LatticeKind, LatticeSpec, Quasimomentum};

pub fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// Kagome `λ₁, λ₂, λ₃` written out at complex momentum.
pub fn lambdas(z: C, spec: &LatticeSpec<f64>) -> [C; 3] {
    let (cc, d, ell) = (spec.c, spec.d, spec.ell);
    let kk = z * z * ell * ell;
    let one = c(1.0);
    let l1 = 2.0
        * (kk + one)
        * (4.0 * (kk + one).powi(2)
            * ((z * (cc + d)).cos() + (z * (cc - 2.0 * d)).cos() + 2.0 * (z * d).cos() + (z * 2.0 * d).cos())
            + (kk * kk + 14.0 * kk + one) * (2.0 * (z * d).cos() + one) * (z * (2.0 * cc - d)).cos()
            + (3.0 * kk * kk + 18.0 * kk + 3.0)
            + (5.0 * kk * kk + 22.0 * kk + 5.0) * ((z * (d - cc)).cos() + (z * cc).cos()));
    let l2 = 8.0
        * (kk + one)
        * (kk - one).powi(2)
        * (z * (d - cc) / 2.0).cos()
        * (z * cc / 2.0).cos()
        * ((z * (2.0 * cc - d) / 2.0).cos() + 2.0 * (z * d / 2.0).cos());
    let l3 = 16.0
        * z
        * ell
        * (kk - one).powi(2)
        * (z * (d - cc) / 2.0).sin()
        * (z * cc / 2.0).sin()
        * (z * (d - 2.0 * cc) / 2.0).sin();
    [l1, l2, l3]
}

pub fn kagome_bracket(z: C, q: &Quasimomentum<f64>, spec: &LatticeSpec<f64>) -> C {
    let [l1, l2, l3] = lambdas(z, spec);
    l1 - l2 * q.f() - l3 * q.g()
}

/// The large bracket of the triangular condition.
pub fn triangular_bracket(z: C, q: &Quasimomentum<f64>, spec: &LatticeSpec<f64>) -> C {
    let (d, ell) = (spec.d, spec.ell);
    let kk = z * z * ell * ell;
    let one = c(1.0);
    3.0 * (kk * kk + 6.0 * kk + one)
        + (3.0 * kk * kk + 10.0 * kk + 3.0) * (2.0 * (z * d).cos() + (z * 2.0 * d).cos())
        - 4.0 * (kk - one).powi(2) * (z * d / 2.0).cos().powi(2) * q.f()
}

pub fn bracket(z: C, q: &Quasimomentum<f64>, spec: &LatticeSpec<f64>) -> C {
    match spec.kind {
        LatticeKind::Triangular => triangular_bracket(z, q, spec),
        _ => kagome_bracket(z, q, spec),
    }
}

/// Magnitude of the individual terms of the kagome bracket.
pub fn bracket_scale(z: C, spec: &LatticeSpec<f64>) -> f64 {
    let [l1, l2, l3] = lambdas(z, spec);
    l1.norm() + 3.0 * l2.norm() + 3.0 * l3.norm()
}
