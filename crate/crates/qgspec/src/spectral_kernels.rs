//! Closed-form kernels of the spectral conditions.
//!
//! Every band condition has the form `Δ = λ₁ − λ₂ f_θ − λ₃ g_θ = 0`. The triangular lattice
//! fits the same shape with `λ₃ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Quasimomentum, Side};
use crate::scalar::{sqrt3, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTriple<T> {
    pub l1: T,
    pub l2: T,
    pub l3: T,
    pub side: Side,
    /// Sum of the moduli of all terms entering `l1`, `l2`, `l3`; the size of rounding noise.
    pub scale: T,
}

/// θ-point at which the bracket reaches an extremum over the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    /// `(0, 0)`, value `3λ₂`
    Gamma,
    /// `(2π/3, −2π/3)`, value `−3/2 (λ₂ + √3 λ₃)`
    KPlus,
    /// `(−2π/3, 2π/3)`, value `−3/2 (λ₂ − √3 λ₃)`
    KMinus,
}

impl Extremum {
    pub const ALL: [Extremum; 3] = [Extremum::Gamma, Extremum::KPlus, Extremum::KMinus];

    pub fn theta<T: Real>(self) -> Quasimomentum<T> {
        match self {
            Extremum::Gamma => Quasimomentum::gamma(),
            Extremum::KPlus => Quasimomentum::k_plus(),
            Extremum::KMinus => Quasimomentum::k_minus(),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl<T: Real> KernelTriple<T> {
    pub fn bracket(&self, q: &Quasimomentum<T>) -> T {
        self.l1 - self.l2 * q.f() - self.l3 * q.g()
    }

    /// `[λ⁰, λ⁺, λ⁻]`, the values of `λ₂ f + λ₃ g` at the three extremal θ-points.
    pub fn extremal_values(&self) -> [T; 3] {
        let h = T::lit(1.5);
        let s = sqrt3::<T>() * self.l3;
        [T::lit(3.0) * self.l2, -h * (self.l2 + s), -h * (self.l2 - s)]
    }

    /// `Δ` at the three extremal θ-points, in [`Extremum::ALL`] order.
    pub fn extremal_brackets(&self) -> [T; 3] {
        let v = self.extremal_values();
        [self.l1 - v[0], self.l1 - v[1], self.l1 - v[2]]
    }

    /// `(∂Δ/∂θ₁, ∂Δ/∂θ₂)` in the factorized form.
    pub fn theta_gradient(&self, q: &Quasimomentum<T>) -> (T, T) {
        let two = T::lit(2.0);
        let (t1, t2) = (q.theta1, q.theta2);
        let d1 = (t1 - t2 / two).sin() * (self.l2 * (t2 / two).cos() - self.l3 * (t2 / two).sin());
        let d2 = (t2 - t1 / two).sin() * (self.l2 * (t1 / two).cos() + self.l3 * (t1 / two).sin());
        (d1, d2)
    }

    pub fn tie_tolerance(&self) -> T {
        T::tie_eps() * self.scale
    }
}

/// Kagome kernels `λ₁, λ₂, λ₃` at momentum `k`.
pub fn lambda_pos<T: Real>(k: T, spec: &LatticeSpec<T>) -> KernelTriple<T> {
    let (c, d, ell) = (spec.c, spec.d, spec.ell);
    let two = T::lit(2.0);
    let kk = k * k * ell * ell;
    let p1 = kk + T::one();
    let m1 = kk - T::one();
    let q14 = kk * kk + T::lit(14.0) * kk + T::one();
    let q18 = T::lit(3.0) * kk * kk + T::lit(18.0) * kk + T::lit(3.0);
    let q22 = T::lit(5.0) * kk * kk + T::lit(22.0) * kk + T::lit(5.0);

    let a = [(k * (c + d)).cos(), (k * (c - two * d)).cos(), two * (k * d).cos(), (k * two * d).cos()];
    let e = two * (k * d).cos() + T::one();
    let f = (k * (two * c - d)).cos();
    let h = [(k * (d - c)).cos(), (k * c).cos()];
    let four_p2 = T::lit(4.0) * p1 * p1;
    let inner = four_p2 * (a[0] + a[1] + a[2] + a[3]) + q14 * e * f + q18 + q22 * (h[0] + h[1]);
    let l1 = two * p1 * inner;
    let inner_scale = four_p2 * a.iter().fold(T::zero(), |s, x| s + x.abs())
        + q14.abs() * e.abs() * f.abs()
        + q18
        + q22 * (h[0].abs() + h[1].abs());

    let cb = (k * (d - c) / two).cos();
    let cc = (k * c / two).cos();
    let w = (k * (two * c - d) / two).cos() + two * (k * d / two).cos();
    let l2 = T::lit(8.0) * p1 * m1 * m1 * cb * cc * w;

    let l3 = if spec.kind == LatticeKind::EquilateralKagome {
        T::zero()
    } else {
        T::lit(16.0) * k * ell * m1 * m1 * (k * (d - c) / two).sin() * (k * c / two).sin() * (k * (d - two * c) / two).sin()
    };
    let l2_scale = T::lit(8.0) * p1 * m1 * m1 * T::lit(3.0);
    let l3_scale = T::lit(16.0) * k * ell * m1 * m1;
    let scale = two * p1 * inner_scale + T::lit(3.0) * l2_scale + T::lit(3.0) * l3_scale;
    KernelTriple { l1, l2, l3, side: Side::Positive, scale }
}

/// Kagome kernels `λ̃₁, λ̃₂, λ̃₃` at `κ` (energy `−κ²`).
pub fn lambda_neg<T: Real>(kappa: T, spec: &LatticeSpec<T>) -> KernelTriple<T> {
    let (c, d, ell) = (spec.c, spec.d, spec.ell);
    let two = T::lit(2.0);
    let kk = kappa * kappa * ell * ell;
    let p1 = kk + T::one();
    let m1 = kk - T::one();
    let one_minus = T::one() - kk;
    let q14 = kk * kk - T::lit(14.0) * kk + T::one();
    let q18 = T::lit(3.0) * kk * kk - T::lit(18.0) * kk + T::lit(3.0);
    let q22 = T::lit(5.0) * kk * kk - T::lit(22.0) * kk + T::lit(5.0);

    let a = [
        (kappa * (c + d)).cosh(),
        (kappa * (c - two * d)).cosh(),
        two * (kappa * d).cosh(),
        (two * kappa * d).cosh(),
    ];
    let e = two * (kappa * d).cosh() + T::one();
    let f = (kappa * (two * c - d)).cosh();
    let h = [(kappa * (d - c)).cosh(), (kappa * c).cosh()];
    let four_m2 = T::lit(4.0) * m1 * m1;
    let inner = four_m2 * (a[0] + a[1] + a[2] + a[3]) + q14 * e * f + q18 + q22 * (h[0] + h[1]);
    let l1 = two * one_minus * inner;
    let inner_scale =
        four_m2 * (a[0] + a[1] + a[2] + a[3]) + q14.abs() * e * f + q18.abs() + q22.abs() * (h[0] + h[1]);

    let w = (kappa * (two * c - d) / two).cosh() + two * (kappa * d / two).cosh();
    let ch = (kappa * (d - c) / two).cosh() * (kappa * c / two).cosh();
    let l2 = T::lit(8.0) * one_minus * p1 * p1 * w * ch;

    let l3 = if spec.kind == LatticeKind::EquilateralKagome {
        T::zero()
    } else {
        T::lit(16.0)
            * kappa
            * ell
            * p1
            * p1
            * (kappa * (d - c) / two).sinh()
            * (kappa * c / two).sinh()
            * (kappa * (d - two * c) / two).sinh()
    };
    let scale = two * one_minus.abs() * inner_scale
        + T::lit(3.0) * l2.abs()
        + T::lit(3.0)
            * T::lit(16.0)
            * kappa
            * ell
            * p1
            * p1
            * (kappa * (d - c) / two).cosh()
            * (kappa * c / two).cosh()
            * (kappa * (d - two * c) / two).cosh();
    KernelTriple { l1, l2, l3, side: Side::Negative, scale }
}

/// Triangular kernels: the large bracket of the triangular spectral condition as
/// `l1 − l2 f_θ` (`l3 = 0`).
pub fn triangular_kernels<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>) -> KernelTriple<T> {
    let (d, ell) = (spec.d, spec.ell);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let kk = arg * arg * ell * ell;
    let (l1, l2, scale) = match side {
        Side::Positive => {
            let q6 = three * (kk * kk + T::lit(6.0) * kk + T::one());
            let q10 = three * kk * kk + T::lit(10.0) * kk + three;
            let (c1, c2) = ((arg * d).cos(), (two * arg * d).cos());
            let m1 = kk - T::one();
            let ch = (arg * d / two).cos();
            let l2 = T::lit(4.0) * m1 * m1 * ch * ch;
            let l1 = q6 + q10 * (two * c1 + c2);
            let scale = q6 + q10 * (two * c1.abs() + c2.abs()) + three * l2;
            (l1, l2, scale)
        }
        Side::Negative => {
            let q6 = three * (kk * kk - T::lit(6.0) * kk + T::one());
            let q10 = three * kk * kk - T::lit(10.0) * kk + three;
            let (c1, c2) = ((arg * d).cosh(), (two * arg * d).cosh());
            let p1 = kk + T::one();
            let ch = (arg * d / two).cosh();
            let l2 = T::lit(4.0) * p1 * p1 * ch * ch;
            let l1 = q6 + q10 * (two * c1 + c2);
            let scale = q6.abs() + q10.abs() * (two * c1 + c2) + three * l2;
            (l1, l2, scale)
        }
    };
    KernelTriple { l1, l2, l3: T::zero(), side, scale }
}

/// Kernels of the appropriate lattice and side.
pub fn kernels<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>) -> KernelTriple<T> {
    match (spec.kind, side) {
        (LatticeKind::Triangular, _) => triangular_kernels(arg, side, spec),
        (_, Side::Positive) => lambda_pos(arg, spec),
        (_, Side::Negative) => lambda_neg(arg, spec),
    }
}

/// `Δ = λ₁ − λ₂ f_θ − λ₃ g_θ`.
pub fn bracket<T: Real>(arg: T, side: Side, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> T {
    kernels(arg, side, spec).bracket(theta)
}

/// Denominator guard for [`tri_g`].
pub const G_SINGULAR_EPS: f64 = 1e-8;

/// `G(k)`; the triangular positive band condition reads `G(k) ∈ [−3/2, 3]`.
pub fn tri_g<T: Real>(k: T, spec: &LatticeSpec<T>) -> Result<T> {
    let ell = spec.ell;
    let kk = k * k * ell * ell;
    let ch = (k * spec.d / T::lit(2.0)).cos();
    let m1 = kk - T::one();
    let eps = T::lit(G_SINGULAR_EPS);
    if ch.abs() <= eps || m1.abs() <= eps {
        return Err(Error::SingularDenominator(k.to_f64_lossy()));
    }
    let num = T::lit(2.0) * kk / (ch * ch)
        + (T::lit(3.0) * kk * kk + T::lit(10.0) * kk + T::lit(3.0)) * (k * spec.d).cos();
    Ok(num / (m1 * m1))
}

/// `G̃(κ)`; the triangular negative band condition reads `G̃(κ) ∈ [−3/2, 3]`.
pub fn tri_g_tilde<T: Real>(kappa: T, spec: &LatticeSpec<T>) -> T {
    let ell = spec.ell;
    let kk = kappa * kappa * ell * ell;
    let p1 = kk + T::one();
    let sech = T::one() / (kappa * spec.d / T::lit(2.0)).cosh();
    ((T::lit(3.0) * kk * kk - T::lit(10.0) * kk + T::lit(3.0)) * (kappa * spec.d).cosh()
        - T::lit(2.0) * kk * sech * sech)
        / (p1 * p1)
}

/// `F(κ)`; the equilateral kagome negative band condition reads `F(κ) ∈ [−3/2, 3]`.
pub fn kagome_equilateral_f<T: Real>(kappa: T, spec: &LatticeSpec<T>) -> T {
    let (c, ell) = (spec.c, spec.ell);
    let kk = kappa * kappa * ell * ell;
    let m1 = kk - T::one();
    let p1 = kk + T::one();
    let two = T::lit(2.0);
    let x = kappa * c;
    let num = m1 * m1 * (two * (two * x).cosh() + two * (T::lit(3.0) * x).cosh() + T::one())
        + (kk * kk - T::lit(14.0) * kk + T::one()) * x.cosh();
    num / (p1 * p1 * (x.cosh() + T::one()))
}

/// `ξ(k) = cos kc − cos 2kc`.
pub fn xi<T: Real>(k: T, c: T) -> T {
    (k * c).cos() - (T::lit(2.0) * k * c).cos()
}

/// Leading coefficient `α(k)` of the kagome high-energy expansion.
pub fn alpha<T: Real>(k: T, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> T {
    let (c, d) = (spec.c, spec.d);
    let two = T::lit(2.0);
    let first = (k * (two * c - d) / two).cos() + two * (k * d / two).cos();
    let second = (two * (k * (c - d)).cos() + T::lit(4.0) * (k * d).cos() - T::one()) * (k * d / two).cos()
        + (k * (two * c + d) / two).cos()
        - two * theta.f() * (k * c / two).cos() * (k * (c - d) / two).cos();
    T::lit(4.0) * first * second
}

/// `(β₁, β₂)` of the equilateral high-energy expansion.
pub fn beta<T: Real>(k: T, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> (T, T) {
    let (c, ell) = (spec.c, spec.ell);
    let two = T::lit(2.0);
    let f = theta.f();
    let kc = k * c;
    let ch = (kc / two).cos();
    let ell2 = ell * ell;
    let b1 = -two * ell2 * ell2 * ch * ch * (T::lit(4.0) * kc.cos() - T::lit(4.0) * (two * kc).cos() + f - T::lit(3.0));
    let b2 = two
        * ell2
        * ((kc.cos() + T::one()) * f + T::lit(7.0) * kc.cos() + two * (two * kc).cos() + two * (T::lit(3.0) * kc).cos()
            + T::one());
    (b1, b2)
}

/// `(γ₁, γ₂)` of the triangular high-energy expansion.
pub fn gamma<T: Real>(k: T, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> (T, T) {
    let (d, ell) = (spec.d, spec.ell);
    let two = T::lit(2.0);
    let f = theta.f();
    let kd = k * d;
    let ch = (kd / two).cos();
    let ell2 = ell * ell;
    let g1 = T::lit(4.0) * ell2 * ell2 * ch * ch * (T::lit(3.0) * kd.cos() - f);
    let g2 = two * ell2 * (T::lit(10.0) * kd.cos() + T::lit(5.0) * (two * kd).cos() + T::lit(9.0) + two * (kd.cos() + T::one()) * f);
    (g1, g2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Alpha,
    Beta,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticCoefficients<T> {
    Alpha(T),
    Beta(T, T),
    Gamma(T, T),
}

/// High-energy expansion coefficients; `β` needs the equilateral lattice, `γ` the triangular one.
pub fn asymptotic_coefficients<T: Real>(
    k: T,
    theta: &Quasimomentum<T>,
    spec: &LatticeSpec<T>,
    which: CoefficientKind,
) -> Result<AsymptoticCoefficients<T>> {
    match (which, spec.kind) {
        (CoefficientKind::Alpha, LatticeKind::Kagome | LatticeKind::EquilateralKagome) => {
            Ok(AsymptoticCoefficients::Alpha(alpha(k, theta, spec)))
        }
        (CoefficientKind::Beta, LatticeKind::EquilateralKagome) => {
            let (a, b) = beta(k, theta, spec);
            Ok(AsymptoticCoefficients::Beta(a, b))
        }
        (CoefficientKind::Gamma, LatticeKind::Triangular) => {
            let (a, b) = gamma(k, theta, spec);
            Ok(AsymptoticCoefficients::Gamma(a, b))
        }
        (w, kind) => Err(Error::Unsupported(format!("{w:?} coefficients are not defined for {kind:?}"))),
    }
}
