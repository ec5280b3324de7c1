//! Raw Floquet secular systems assembled from the wave-function Ansatz.
//!
//! Unknowns are the plane-wave amplitudes `X± ` of `X(x) = X⁺e^{izx} + X⁻e^{−izx}`.
//! Floquet and midpoint conditions are substituted before assembly, so every vertex
//! condition becomes one row.
//!
//! Kagome column order: `B₃±, B₄±, C₁±, C₄±, D₃±, D₄±`. Row order: the four conditions at
//! the ψ-vertex, then the φ-vertex, then the χ-vertex, each in cyclic order
//! `(ψ₁,ψ₂), (ψ₂,ψ₃), (ψ₃,ψ₄), (ψ₄,ψ₁)` and likewise for φ and χ.
//!
//! Triangular column order: `C₁±, C₄±, D₄±`; rows follow the cyclic end order
//! `ψ₁, ψ₂, φ₄, φ₁, χ₄, χ₁` of the single degree-6 vertex.
//!
//! With these orders the determinants factor as
//! `det₁₂ = −1024 i e^{2iθ₂} z³ℓ³ sin(zc/2) sin(zd/2) sin(z(d−c)/2) · Δ` and
//! `det₆ = −32 e^{2iθ₂} zℓ sin²(zd/2) · Δ_tri`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Quasimomentum, Side};
use crate::linalg::{lu_determinant, SquareMatrix};
use crate::scalar::Real;

/// Which Floquet phase multiplies a substituted function.
#[derive(Clone, Copy)]
enum Phase {
    None,
    Theta1,
    Theta2,
    Theta2MinusTheta1,
}

/// An edge function expressed through unknown columns: `phase · X(x − shift)`.
#[derive(Clone, Copy)]
struct Func {
    col: usize,
    phase: Phase,
    shifted: bool,
}

/// One edge end at a vertex: function, coordinate, sign of the outward derivative.
#[derive(Clone, Copy)]
struct End {
    func: Func,
    at: Position,
    outward: f64,
}

#[derive(Clone, Copy)]
enum Position {
    Zero,
    HalfB,
    MinusHalfB,
}

const fn native(col: usize) -> Func {
    Func { col, phase: Phase::None, shifted: false }
}

const fn floquet(col: usize, phase: Phase) -> Func {
    Func { col, phase, shifted: true }
}

const KAGOME_ENDS: [[End; 4]; 3] = {
    let b3 = native(0);
    let b4 = native(2);
    let c1 = native(4);
    let c4 = native(6);
    let d3 = native(8);
    let d4 = native(10);
    let b1 = floquet(4, Phase::Theta2);
    let b2 = floquet(10, Phase::Theta2MinusTheta1);
    let d1 = floquet(6, Phase::Theta1);
    // midpoint matching: χ₂ = ψ₄, φ₃ = ψ₃, φ₂ = χ₃
    let d2 = b4;
    let c3 = b3;
    let c2 = d3;
    use Position::*;
    [
        [
            End { func: b1, at: Zero, outward: 1.0 },
            End { func: b2, at: Zero, outward: 1.0 },
            End { func: b3, at: HalfB, outward: -1.0 },
            End { func: b4, at: HalfB, outward: -1.0 },
        ],
        [
            End { func: c1, at: Zero, outward: -1.0 },
            End { func: c2, at: MinusHalfB, outward: 1.0 },
            End { func: c3, at: MinusHalfB, outward: 1.0 },
            End { func: c4, at: Zero, outward: -1.0 },
        ],
        [
            End { func: d1, at: Zero, outward: 1.0 },
            End { func: d2, at: MinusHalfB, outward: 1.0 },
            End { func: d3, at: HalfB, outward: -1.0 },
            End { func: d4, at: Zero, outward: -1.0 },
        ],
    ]
};

const TRIANGULAR_ENDS: [End; 6] = {
    let c1 = native(0);
    let c4 = native(2);
    let d4 = native(4);
    let b1 = floquet(0, Phase::Theta2);
    let b2 = floquet(4, Phase::Theta2MinusTheta1);
    let d1 = floquet(2, Phase::Theta1);
    use Position::Zero;
    [
        End { func: b1, at: Zero, outward: 1.0 },
        End { func: b2, at: Zero, outward: 1.0 },
        End { func: c4, at: Zero, outward: -1.0 },
        End { func: c1, at: Zero, outward: -1.0 },
        End { func: d4, at: Zero, outward: -1.0 },
        End { func: d1, at: Zero, outward: 1.0 },
    ]
};

/// Column basis for each edge function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// `X⁺e^{izx} + X⁻e^{−izx}`, the documented raw system.
    Exponential,
    /// `A cos(zx) + B sin(zx)/z`; same determinant up to `(−1/(2iz))^pairs`, but without the
    /// cancellation between `e^{±izx}` columns at small `|z|`.
    Trigonometric,
}

/// θ-independent pieces of a secular matrix: `M(θ) = Σ_p phase_p(θ) · parts[p]`.
#[derive(Clone, Debug)]
pub struct SecularAssembler<T> {
    n: usize,
    parts: [Vec<Complex<T>>; 4],
    z: Complex<T>,
    spec: LatticeSpec<T>,
    basis: Basis,
}

impl<T: Real> SecularAssembler<T> {
    pub fn new(z: Complex<T>, spec: &LatticeSpec<T>) -> Self {
        Self::with_basis(z, spec, Basis::Exponential)
    }

    pub fn with_basis(z: Complex<T>, spec: &LatticeSpec<T>, basis: Basis) -> Self {
        let two = T::lit(2.0);
        let b = spec.b();
        let (n, shift) = match spec.kind {
            LatticeKind::Triangular => (6, spec.d),
            _ => (12, spec.c),
        };
        let i = Complex::<T>::i();
        let iz = i * z;
        let ell = Complex::new(spec.ell, T::zero());
        let mut parts: [Vec<Complex<T>>; 4] = std::array::from_fn(|_| vec![Complex::zero(); n * n]);

        let mut add_row = |row: usize, ends: &[End]| {
            let m = ends.len();
            for j in 0..m {
                let pair = [(ends[(j + 1) % m], T::one()), (ends[j], -T::one())];
                for (end, val_sign) in pair {
                    let x = match end.at {
                        Position::Zero => T::zero(),
                        Position::HalfB => b / two,
                        Position::MinusHalfB => -b / two,
                    };
                    let x = if end.func.shifted { x - shift } else { x };
                    // (value, derivative) of the two basis functions at x
                    let ((va, da), (vb, db)) = match basis {
                        Basis::Exponential => {
                            let ep = (iz * x).exp();
                            let em = (-iz * x).exp();
                            ((ep, iz * ep), (em, -iz * em))
                        }
                        Basis::Trigonometric => {
                            let (sn, cs) = ((z * x).sin(), (z * x).cos());
                            ((cs, -z * sn), (sn / z, cs))
                        }
                    };
                    let s = T::lit(end.outward);
                    // value ± iℓ·(outward derivative)
                    let cp = va * val_sign + i * ell * da * s;
                    let cm = vb * val_sign + i * ell * db * s;
                    let p = end.func.phase as usize;
                    parts[p][(row + j) * n + end.func.col] += cp;
                    parts[p][(row + j) * n + end.func.col + 1] += cm;
                }
            }
        };
        match spec.kind {
            LatticeKind::Triangular => add_row(0, &TRIANGULAR_ENDS),
            _ => {
                for (v, ends) in KAGOME_ENDS.iter().enumerate() {
                    add_row(4 * v, ends);
                }
            }
        }
        SecularAssembler { n, parts, z, spec: *spec, basis }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    fn phases(theta: &Quasimomentum<T>) -> [Complex<T>; 4] {
        [
            Complex::one(),
            Complex::from_polar(T::one(), theta.theta1),
            Complex::from_polar(T::one(), theta.theta2),
            Complex::from_polar(T::one(), theta.theta2 - theta.theta1),
        ]
    }

    pub fn fill(&self, theta: &Quasimomentum<T>, out: &mut [Complex<T>]) {
        let ph = Self::phases(theta);
        for (idx, o) in out.iter_mut().enumerate() {
            *o = self.parts[0][idx]
                + ph[1] * self.parts[1][idx]
                + ph[2] * self.parts[2][idx]
                + ph[3] * self.parts[3][idx];
        }
    }

    pub fn matrix(&self, theta: &Quasimomentum<T>) -> SquareMatrix<Complex<T>> {
        let mut buf = vec![Complex::zero(); self.n * self.n];
        self.fill(theta, &mut buf);
        SquareMatrix::from_fn(self.n, |r, c| buf[r * self.n + c])
    }

    pub fn determinant(&self, theta: &Quasimomentum<T>) -> Complex<T> {
        let mut buf = vec![Complex::zero(); self.n * self.n];
        self.fill(theta, &mut buf);
        lu_determinant(&mut buf, self.n)
    }

    /// The θ-independent part of the prefactor (everything except `e^{2iθ₂}`).
    pub fn static_prefactor(&self) -> Complex<T> {
        let z = self.z;
        let two = T::lit(2.0);
        let ell = self.spec.ell;
        let exp = match self.spec.kind {
            LatticeKind::Triangular => {
                let s = (z * self.spec.d / two).sin();
                z * ell * s * s * T::lit(-32.0)
            }
            _ => {
                let (c, d) = (self.spec.c, self.spec.d);
                let s = (z * c / two).sin() * (z * d / two).sin() * (z * (d - c) / two).sin();
                Complex::new(T::zero(), T::lit(-1024.0)) * z * z * z * ell * ell * ell * s
            }
        };
        match self.basis {
            Basis::Exponential => exp,
            Basis::Trigonometric => {
                let m = -(Complex::new(T::zero(), two) * z).inv();
                exp * m.powi(self.n as i32 / 2)
            }
        }
    }

    /// The individual sine factors of the prefactor.
    fn sines(&self) -> Vec<Complex<T>> {
        let z = self.z;
        let two = T::lit(2.0);
        match self.spec.kind {
            LatticeKind::Triangular => vec![(z * self.spec.d / two).sin()],
            _ => {
                let (c, d) = (self.spec.c, self.spec.d);
                vec![(z * c / two).sin(), (z * d / two).sin(), (z * (d - c) / two).sin()]
            }
        }
    }

    /// Product of the sine factors, zero exactly on the flat-band momenta.
    pub fn sine_product(&self) -> Complex<T> {
        let z = self.z;
        let two = T::lit(2.0);
        match self.spec.kind {
            LatticeKind::Triangular => {
                let s = (z * self.spec.d / two).sin();
                s * s
            }
            _ => {
                let (c, d) = (self.spec.c, self.spec.d);
                (z * c / two).sin() * (z * d / two).sin() * (z * (d - c) / two).sin()
            }
        }
    }

    pub fn prefactor(&self, theta: &Quasimomentum<T>) -> Complex<T> {
        self.static_prefactor() * Complex::from_polar(T::one(), T::lit(2.0) * theta.theta2)
    }

    /// `det / prefactor`; equals the bracket `Δ` of the closed-form condition.
    pub fn normalized(&self, theta: &Quasimomentum<T>) -> Complex<T> {
        self.determinant(theta) / self.prefactor(theta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecularSystem<T> {
    pub dimension: usize,
    pub matrix: SquareMatrix<Complex<T>>,
    pub z: Complex<T>,
    pub theta: Quasimomentum<T>,
    pub spec: LatticeSpec<T>,
}

impl<T: Real> SecularSystem<T> {
    pub fn determinant(&self) -> Complex<T> {
        self.matrix.determinant()
    }
}

fn check_z<T: Real>(z: Complex<T>) -> Result<()> {
    if z.is_zero() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("momentum must be finite and nonzero, got {z}")));
    }
    Ok(())
}

/// The 12×12 kagome system at complex momentum `z` (`z = iκ` on the negative side).
pub fn kagome_secular_matrix<T: Real>(
    z: Complex<T>,
    theta: &Quasimomentum<T>,
    spec: &LatticeSpec<T>,
) -> Result<SecularSystem<T>> {
    check_z(z)?;
    if !spec.kind.is_kagome() {
        return Err(Error::InvalidGeometry("kagome system requested for a triangular lattice".into()));
    }
    let asm = SecularAssembler::new(z, spec);
    Ok(SecularSystem { dimension: 12, matrix: asm.matrix(theta), z, theta: *theta, spec: *spec })
}

/// The reduced 6×6 triangular system.
pub fn triangular_secular_matrix<T: Real>(
    z: Complex<T>,
    theta: &Quasimomentum<T>,
    spec: &LatticeSpec<T>,
) -> Result<SecularSystem<T>> {
    check_z(z)?;
    if spec.kind != LatticeKind::Triangular {
        return Err(Error::InvalidGeometry("triangular system requested for a kagome lattice".into()));
    }
    let asm = SecularAssembler::new(z, spec);
    Ok(SecularSystem { dimension: 6, matrix: asm.matrix(theta), z, theta: *theta, spec: *spec })
}

pub fn triangular_secular_det<T: Real>(z: Complex<T>, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> Result<Complex<T>> {
    Ok(triangular_secular_matrix(z, theta, spec)?.determinant())
}

/// Secular determinant divided by its known prefactor, for either lattice.
pub fn normalized_secular<T: Real>(z: Complex<T>, theta: &Quasimomentum<T>, spec: &LatticeSpec<T>) -> Result<Complex<T>> {
    check_z(z)?;
    Ok(SecularAssembler::new(z, spec).normalized(theta))
}

pub fn side_momentum<T: Real>(arg: T, side: Side) -> Complex<T> {
    match side {
        Side::Positive => Complex::new(arg, T::zero()),
        Side::Negative => Complex::new(T::zero(), arg),
    }
}

/// Relative size below which the normalized determinant counts as vanishing.
pub const ORACLE_VANISH_TOL: f64 = 1e-12;
/// Below this modulus of any sine factor the momentum is taken to be a flat band.
pub const ORACLE_FLAT_TOL: f64 = 1e-10;

/// Brute-force membership: does `Re(det/prefactor)` change sign or vanish on an `n×n` θ-grid?
///
/// Without a sign change on the grid, the grid extremum closest to zero is refined by a
/// compass search before the final vanishing test.
pub fn oracle_in_spectrum<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>, n: usize) -> bool {
    let n = n.max(8);
    let asm = SecularAssembler::with_basis(side_momentum(arg, side), spec, Basis::Trigonometric);
    if asm.sines().iter().any(|s| s.norm() < T::lit(ORACLE_FLAT_TOL)) {
        return true;
    }
    let dim = asm.dimension();
    let mut buf = vec![Complex::zero(); dim * dim];
    let pre = asm.static_prefactor();
    let mut eval = |q: &Quasimomentum<T>| -> T {
        asm.fill(q, &mut buf);
        let det = lu_determinant(&mut buf, dim);
        (det / (pre * Complex::from_polar(T::one(), T::lit(2.0) * q.theta2))).re
    };
    let step = T::TAU() / T::from_usize_lossy(n);
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    let (mut arg_lo, mut arg_hi) = (Quasimomentum::gamma(), Quasimomentum::gamma());
    for i in 0..n {
        for j in 0..n {
            let q = Quasimomentum::new(-T::PI() + step * T::from_usize_lossy(i), -T::PI() + step * T::from_usize_lossy(j));
            let v = eval(&q);
            if v < lo {
                lo = v;
                arg_lo = q;
            }
            if v > hi {
                hi = v;
                arg_hi = q;
            }
            if lo <= T::zero() && hi >= T::zero() {
                return true;
            }
        }
    }
    let scale = lo.abs().max(hi.abs());
    let tol = T::lit(ORACLE_VANISH_TOL) * scale;
    // all values share one sign: push the one nearest zero towards zero
    let (start, sign) = if lo > T::zero() { (arg_lo, T::one()) } else { (arg_hi, -T::one()) };
    let best = compass_minimize(|q| sign * eval(q), start, step);
    best <= tol
}

/// Derivative-free pattern search on the θ-torus; returns the smallest value found.
fn compass_minimize<T: Real>(mut f: impl FnMut(&Quasimomentum<T>) -> T, start: Quasimomentum<T>, step: T) -> T {
    let dirs: [(f64, f64); 8] = [(1., 0.), (-1., 0.), (0., 1.), (0., -1.), (1., 1.), (-1., -1.), (1., -1.), (-1., 1.)];
    let mut x = start;
    let mut fx = f(&x);
    let mut h = step;
    let floor = T::lit(1e-13);
    let mut iters = 0;
    while h > floor && iters < 4000 {
        iters += 1;
        let mut improved = false;
        for (a, b) in dirs {
            let y = Quasimomentum::new(x.theta1 + h * T::lit(a), x.theta2 + h * T::lit(b));
            let fy = f(&y);
            if fy < fx {
                x = y;
                fx = fy;
                improved = true;
                break;
            }
        }
        if fx <= T::zero() {
            break;
        }
        if !improved {
            h = h / T::lit(2.0);
        }
    }
    fx
}
