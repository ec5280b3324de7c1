//! Circulant vertex coupling, its on-shell scattering matrix and star-graph bound states.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;

/// The permutation matrix with ones on the first superdiagonal and in the lower-left corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantU {
    entries: SquareMatrix<u8>,
}

impl CirculantU {
    pub fn size(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &SquareMatrix<u8> {
        &self.entries
    }

    pub fn to_complex<T: Real>(&self) -> SquareMatrix<Complex<T>> {
        self.entries.map(|&e| if e == 1 { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
    }
}

pub fn build_circulant_u(n: usize) -> Result<CirculantU> {
    if n < 3 {
        return Err(Error::InvalidDegree(n));
    }
    Ok(CirculantU { entries: SquareMatrix::from_fn(n, |i, j| u8::from(j == (i + 1) % n)) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMatrix<T> {
    pub n: usize,
    pub k: T,
    pub ell: T,
    /// `(1 − kℓ)/(1 + kℓ)`
    pub eta: T,
    pub entries: SquareMatrix<Complex<T>>,
}

/// `1 + x + … + x^(n−1)`
fn geo<T: Real>(x: T, n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc * x + T::one())
}

pub fn scattering_matrix<T: Real>(n: usize, ell: T, k: T) -> Result<ScatteringMatrix<T>> {
    if n < 3 {
        return Err(Error::InvalidDegree(n));
    }
    if !(ell > T::zero() && k > T::zero() && ell.is_finite() && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("need k > 0 and ell > 0, got k = {k}, ell = {ell}")));
    }
    let kl = k * ell;
    let eta = (T::one() - kl) / (T::one() + kl);
    // The sums below are (1 − ηⁿ)/(1 − η) written without the cancelling factor, which keeps
    // the evaluation accurate when η approaches −1.
    let (prefactor, diag) = if n % 2 == 0 {
        let e2 = eta * eta;
        let full = geo(e2, n / 2);
        (T::one() / full, -eta * geo(e2, n / 2 - 1) / full)
    } else {
        let full = geo(eta, n);
        let one_plus_eta = T::lit(2.0) / (T::one() + kl);
        (one_plus_eta / full, -eta * geo(eta, n - 2) / full)
    };
    let entries = SquareMatrix::from_fn(n, |i, j| {
        let v = if i == j {
            diag
        } else {
            let p = (j + n - i - 1) % n;
            prefactor * eta.powi(p as i32)
        };
        Complex::new(v, T::zero())
    });
    Ok(ScatteringMatrix { n, k, ell, eta, entries })
}

/// `lim_{k→∞} S(k)`: closed forms for `N = 4, 6`, otherwise `S` at `kℓ = 10⁸`.
pub fn high_energy_limit<T: Real>(n: usize) -> Result<SquareMatrix<T>> {
    match n {
        4 => {
            const M: [[f64; 4]; 4] = [[1., 1., -1., 1.], [1., 1., 1., -1.], [-1., 1., 1., 1.], [1., -1., 1., 1.]];
            Ok(SquareMatrix::from_fn(4, |i, j| T::lit(0.5 * M[i][j])))
        }
        6 => {
            const P: [[f64; 6]; 6] = [
                [0., 1., -1., 1., -1., 1.],
                [1., 0., 1., -1., 1., -1.],
                [-1., 1., 0., 1., -1., 1.],
                [1., -1., 1., 0., 1., -1.],
                [-1., 1., -1., 1., 0., 1.],
                [1., -1., 1., -1., 1., 0.],
            ];
            Ok(SquareMatrix::from_fn(6, |i, j| {
                let id = if i == j { 2.0 / 3.0 } else { 0.0 };
                T::lit(id + P[i][j] / 3.0)
            }))
        }
        _ => {
            let s = scattering_matrix(n, T::one(), T::lit(1e8))?;
            Ok(s.entries.map(|z| z.re))
        }
    }
}

/// Negative eigenvalues `−ℓ⁻² tan²(mπ/N)` of the star graph, ascending.
pub fn star_negative_eigenvalues<T: Real>(n: usize, ell: T) -> Result<Vec<T>> {
    if n < 3 {
        return Err(Error::InvalidDegree(n));
    }
    let m_max = if n % 2 == 1 { n / 2 } else { (n - 1) / 2 };
    let nn = T::from_usize_lossy(n);
    let mut out: Vec<T> = (1..=m_max)
        .map(|m| {
            let t = (T::from_usize_lossy(m) * T::PI() / nn).tan();
            -(t * t) / (ell * ell)
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}
