//! Lattice geometry, quasimomentum and spectral side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sqrt3, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Kagome,
    EquilateralKagome,
    Triangular,
}

impl LatticeKind {
    pub fn is_kagome(self) -> bool {
        !matches!(self, LatticeKind::Triangular)
    }
}

/// Which half of the energy axis: `E = k²` or `E = −κ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn energy<T: Real>(self, k: T) -> T {
        match self {
            Side::Positive => k * k,
            Side::Negative => T::zero() - k * k,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        }
    }
}

/// Edge lengths and coupling length of one lattice.
///
/// `d = b + c` is the cell period. For the triangular lattice only `d` matters and
/// `c` is stored equal to `d` (the `b → 0` degeneration).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec<T> {
    pub kind: LatticeKind,
    pub c: T,
    pub d: T,
    pub ell: T,
}

fn positive<T: Real>(name: &str, x: T) -> Result<()> {
    if x.is_finite() && x > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!("{name} must be positive and finite, got {x}")))
    }
}

impl<T: Real> LatticeSpec<T> {
    /// General kagome lattice; `d == 2c` yields the equilateral kind.
    pub fn kagome(c: T, d: T, ell: T) -> Result<Self> {
        let kind = if d == c + c { LatticeKind::EquilateralKagome } else { LatticeKind::Kagome };
        Self::new(kind, c, d, ell)
    }

    pub fn equilateral(c: T, ell: T) -> Result<Self> {
        Self::new(LatticeKind::EquilateralKagome, c, c + c, ell)
    }

    pub fn triangular(d: T, ell: T) -> Result<Self> {
        Self::new(LatticeKind::Triangular, d, d, ell)
    }

    pub fn new(kind: LatticeKind, c: T, d: T, ell: T) -> Result<Self> {
        positive("d", d)?;
        positive("ell", ell)?;
        match kind {
            LatticeKind::Triangular => {
                return Ok(LatticeSpec { kind, c: d, d, ell });
            }
            LatticeKind::Kagome => {
                positive("c", c)?;
                if c >= d {
                    return Err(Error::InvalidGeometry(format!(
                        "kagome needs 0 < c < d, got c = {c}, d = {d}; use the triangular lattice for c = d"
                    )));
                }
                if d == c + c {
                    return Err(Error::InvalidGeometry("d = 2c is the equilateral kind".into()));
                }
            }
            LatticeKind::EquilateralKagome => {
                positive("c", c)?;
                if d != c + c {
                    return Err(Error::InvalidGeometry(format!("equilateral kagome needs d = 2c, got c = {c}, d = {d}")));
                }
            }
        }
        Ok(LatticeSpec { kind, c, d, ell })
    }

    /// The second kagome edge `b = d − c` (zero for the triangular lattice).
    pub fn b(&self) -> T {
        self.d - self.c
    }

    pub fn shortest_edge(&self) -> T {
        match self.kind {
            LatticeKind::Triangular => self.d,
            _ => self.c.min(self.b()),
        }
    }

    /// The same lattice with `c` and `d − c` exchanged.
    pub fn mirrored(&self) -> Self {
        match self.kind {
            LatticeKind::Triangular => *self,
            _ => LatticeSpec { c: self.b(), ..*self },
        }
    }

    pub fn with_d(&self, d: T) -> Result<Self> {
        match self.kind {
            LatticeKind::Triangular => Self::triangular(d, self.ell),
            _ => Self::kagome(self.c, d, self.ell),
        }
    }

    /// `2√3 ℓ`, the cell size at which the spectrum edge reaches zero.
    pub fn threshold_length(&self) -> T {
        T::lit(2.0) * sqrt3::<T>() * self.ell
    }
}

/// Floquet phases `(θ₁, θ₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quasimomentum<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> Quasimomentum<T> {
    pub fn new(theta1: T, theta2: T) -> Self {
        Quasimomentum { theta1, theta2 }
    }

    /// Same phases reduced to `[−π, π)`.
    pub fn wrapped(self) -> Self {
        Quasimomentum { theta1: wrap_angle(self.theta1), theta2: wrap_angle(self.theta2) }
    }

    pub fn gamma() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// `(2π/3, −2π/3)`.
    pub fn k_plus() -> Self {
        let a = T::lit(2.0) * T::PI() / T::lit(3.0);
        Self::new(a, -a)
    }

    /// `(−2π/3, 2π/3)`.
    pub fn k_minus() -> Self {
        let a = T::lit(2.0) * T::PI() / T::lit(3.0);
        Self::new(-a, a)
    }

    pub fn f(&self) -> T {
        f_theta(self)
    }

    pub fn g(&self) -> T {
        g_theta(self)
    }
}

pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut y = (x + T::PI()) % two_pi;
    if y < T::zero() {
        y += two_pi;
    }
    y - T::PI()
}

/// `cos θ₁ + cos(θ₁ − θ₂) + cos θ₂`, ranging over `[−3/2, 3]`.
pub fn f_theta<T: Real>(q: &Quasimomentum<T>) -> T {
    q.theta1.cos() + (q.theta1 - q.theta2).cos() + q.theta2.cos()
}

/// `sin θ₂ + sin(θ₁ − θ₂) − sin θ₁`, ranging over `[−3√3/2, 3√3/2]`.
pub fn g_theta<T: Real>(q: &Quasimomentum<T>) -> T {
    q.theta2.sin() + (q.theta1 - q.theta2).sin() - q.theta1.sin()
}
