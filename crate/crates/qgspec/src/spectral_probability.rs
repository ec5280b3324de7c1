//! Band measure: the fraction of the energy axis covered by the spectrum.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band_engine::{format_g, scan_bands, BandStructure};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Side};
use crate::roots::grid_roots;
use crate::scalar::Real;
use crate::spectral_kernels::xi;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMethod {
    FiniteScan,
    TorusArea,
    ClosedForm,
}

impl ProbabilityMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbabilityMethod::FiniteScan => "finite_scan",
            ProbabilityMethod::TorusArea => "torus_area",
            ProbabilityMethod::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate<T> {
    pub value: T,
    pub method: ProbabilityMethod,
    /// Energy cutoff of a finite scan.
    pub k_energy: Option<T>,
    /// Grid size per axis of the torus estimate.
    pub grid_n: Option<usize>,
    pub spec: LatticeSpec<T>,
}

/// Measure of the continuous bands inside `[0, K]` on the energy axis, divided by `K`.
pub fn band_measure<T: Real>(bands: &BandStructure<T>, k_energy: T) -> Result<ProbabilityEstimate<T>> {
    if bands.side != Side::Positive {
        return Err(Error::InvalidArgument("band measure is defined on the positive side".into()));
    }
    if !(k_energy > T::zero() && k_energy.is_finite()) {
        return Err(Error::InvalidArgument(format!("energy cutoff must be positive, got {k_energy}")));
    }
    let needed = k_energy.sqrt();
    if bands.scan_k_max < needed * (T::one() - T::lit(1e-12)) {
        return Err(Error::InsufficientScan { needed: needed.to_f64_lossy(), have: bands.scan_k_max.to_f64_lossy() });
    }
    let covered = bands.continuous().fold(T::zero(), |acc, iv| {
        let lo = iv.energy_lo.max(T::zero());
        let hi = iv.energy_hi.min(k_energy);
        if hi > lo {
            acc + (hi - lo)
        } else {
            acc
        }
    });
    Ok(ProbabilityEstimate {
        value: covered / k_energy,
        method: ProbabilityMethod::FiniteScan,
        k_energy: Some(k_energy),
        grid_n: None,
        spec: bands.spec,
    })
}

/// Scan the positive spectrum up to `√K` and measure it.
pub fn finite_scan_probability<T: Real>(
    spec: &LatticeSpec<T>,
    k_energy: T,
    resolution: Option<T>,
) -> Result<ProbabilityEstimate<T>> {
    if !(k_energy > T::zero() && k_energy.is_finite()) {
        return Err(Error::InvalidArgument(format!("energy cutoff must be positive, got {k_energy}")));
    }
    let bands = scan_bands(spec, Side::Positive, k_energy.sqrt(), resolution)?;
    band_measure(&bands, k_energy)
}

/// Leading-order band indicator in the phases `x = kb/2`, `y = kc/2`.
pub fn torus_indicator<T: Real>(x: T, y: T) -> bool {
    let two = T::lit(2.0);
    let a = two * (two * x + y).cos() + y.cos();
    let b = x.cos() + two * (x + two * y).cos();
    let c = (y - x).cos() + two * (x + y).cos();
    a * b * c >= T::zero()
}

/// Fraction of `[0, 2π)²` where `indicator` holds, on an `n×n` midpoint grid.
pub fn torus_area_fraction<T: Real>(grid_n: usize, indicator: impl Fn(T, T) -> bool + Sync) -> T {
    let h = T::TAU() / T::from_usize_lossy(grid_n);
    let half = T::lit(0.5);
    let hits: u64 = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let x = (T::from_usize_lossy(i) + half) * h;
            (0..grid_n).filter(|&j| indicator(x, (T::from_usize_lossy(j) + half) * h)).count() as u64
        })
        .sum();
    T::from_u64(hits).unwrap() / T::from_usize_lossy(grid_n * grid_n)
}

/// Asymptotic band measure for incommensurate `b`, `c`: the phases are treated as independent
/// uniform variables on the torus.
pub fn torus_probability<T: Real>(spec: &LatticeSpec<T>, grid_n: usize) -> Result<ProbabilityEstimate<T>> {
    if grid_n < 100 {
        return Err(Error::InvalidArgument(format!("torus grid must have at least 100 points per axis, got {grid_n}")));
    }
    Ok(ProbabilityEstimate {
        value: torus_area_fraction(grid_n, torus_indicator::<T>),
        method: ProbabilityMethod::TorusArea,
        k_energy: None,
        grid_n: Some(grid_n),
        spec: *spec,
    })
}

/// Exact value 2/3 for the equilateral kagome and the triangular lattice.
pub fn closed_form_probability<T: Real>(spec: &LatticeSpec<T>) -> Result<ProbabilityEstimate<T>> {
    match spec.kind {
        LatticeKind::EquilateralKagome | LatticeKind::Triangular => Ok(ProbabilityEstimate {
            value: T::lit(2.0) / T::lit(3.0),
            method: ProbabilityMethod::ClosedForm,
            k_energy: None,
            grid_n: None,
            spec: *spec,
        }),
        LatticeKind::Kagome => Err(Error::Unsupported("no closed form for the general kagome lattice".into())),
    }
}

/// Finite-scan estimates for `c = ratio·d` with `d`, `ℓ` taken from `template`.
pub fn probability_sweep<T: Real>(
    ratios: &[T],
    template: &LatticeSpec<T>,
    k_energy: T,
) -> Result<Vec<(T, ProbabilityEstimate<T>)>> {
    ratios
        .iter()
        .map(|&r| {
            if !(r > T::zero() && r < T::one()) {
                return Err(Error::InvalidArgument(format!("ratio must lie in (0, 1), got {r}")));
            }
            let spec = LatticeSpec::kagome(r * template.d, template.d, template.ell)?;
            Ok((r, finite_scan_probability(&spec, k_energy, None)?))
        })
        .collect()
}

pub const PROBABILITY_CSV_HEADER: &str = "ratio,P,method,K_or_grid";

/// CSV rows `ratio,P,method,K_or_grid`.
pub fn probability_csv<T: Real>(rows: &[(T, ProbabilityEstimate<T>)]) -> String {
    let mut s = String::from(PROBABILITY_CSV_HEADER);
    s.push('\n');
    for (r, est) in rows {
        let k_or_grid = match (est.k_energy, est.grid_n) {
            (Some(k), _) => format_g(k.to_f64_lossy(), 12),
            (None, Some(n)) => n.to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            s,
            "{},{},{},{}",
            format_g(r.to_f64_lossy(), 12),
            format_g(est.value.to_f64_lossy(), 12),
            est.method.as_str(),
            k_or_grid
        );
    }
    s
}

/// Fraction of one period `2π/c` on which `0 ≤ ξ(k) ≤ 9/8`.
pub fn xi_period_fraction<T: Real>(c: T) -> T {
    let period = T::TAU() / c;
    let upper = T::lit(9.0) / T::lit(8.0);
    let mut cuts = vec![T::zero()];
    cuts.extend(grid_roots(|k| xi(k, c), T::zero(), period, 4096));
    cuts.extend(grid_roots(|k| upper - xi(k, c), T::zero(), period, 4096));
    cuts.push(period);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inside = T::zero();
    for w in cuts.windows(2) {
        let mid = (w[0] + w[1]) / T::lit(2.0);
        let v = xi(mid, c);
        if v >= T::zero() && v <= upper {
            inside += w[1] - w[0];
        }
    }
    inside / period
}
