//! Flat bands, band membership, spectrum scans and gap closings.

mod closing;
mod export;
mod flat;
mod scan;

pub use closing::{detect_gap_closings, gap_at, GapClosing};
pub use export::{bands_csv, format_g, BANDS_CSV_HEADER};
pub use flat::{degenerate_point_momentum, flat_bands, negative_flat_bands, FlatBand, FlatFamily};
pub use scan::{
    default_kappa_max, default_resolution, scan_bands, scan_negative_bands, scan_window, BandStructure, BandType,
    SpectralInterval, EDGE_TOLERANCE, MAX_KAPPA_D,
};

use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeKind, LatticeSpec, Side};
use crate::spectral_kernels::{kernels, Extremum, KernelTriple};
use crate::scalar::Real;

/// Position of `λ₁` relative to the three extremal values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// `λ₁` below all extremal values
    Below,
    Inside,
    /// `λ₁` above all extremal values
    Above,
}

pub fn classify_triple<T: Real>(t: &KernelTriple<T>) -> Membership {
    let p = t.extremal_brackets();
    let tau = t.tie_tolerance();
    let lo = p[0].min(p[1]).min(p[2]);
    let hi = p[0].max(p[1]).max(p[2]);
    if lo > tau {
        Membership::Above
    } else if hi < -tau {
        Membership::Below
    } else {
        Membership::Inside
    }
}

pub fn classify<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>) -> Membership {
    classify_triple(&kernels(arg, side, spec))
}

/// Band condition: `λ₁` lies between the smallest and the largest extremal value (closed).
pub fn in_band<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>) -> bool {
    classify(arg, side, spec) == Membership::Inside
}

/// `λ₁` strictly between the extremal values, by more than rounding noise (16 ulp of scale).
pub fn strictly_in_band<T: Real>(arg: T, side: Side, spec: &LatticeSpec<T>) -> bool {
    let t = kernels(arg, side, spec);
    let p = t.extremal_brackets();
    let m = t.tie_tolerance() / T::lit(256.0);
    p[0].min(p[1]).min(p[2]) < -m && p[0].max(p[1]).max(p[2]) > m
}

/// The extremal θ-point whose bracket is closest to zero.
pub fn attaining_extremum<T: Real>(t: &KernelTriple<T>) -> Extremum {
    let p = t.extremal_brackets();
    let mut best = Extremum::Gamma;
    for e in Extremum::ALL {
        if p[e.index()].abs() < p[best.index()].abs() {
            best = e;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub positive_starts_at_zero: bool,
    pub negative_reaches_zero: bool,
}

/// Whether the spectrum edges reach zero energy, from the cell-size inequalities.
pub fn spectral_threshold<T: Real>(spec: &LatticeSpec<T>) -> Threshold {
    let (size, bound) = match spec.kind {
        LatticeKind::EquilateralKagome => (spec.c, crate::scalar::sqrt3::<T>() * spec.ell),
        _ => (spec.d, spec.threshold_length()),
    };
    Threshold { positive_starts_at_zero: size >= bound, negative_reaches_zero: size <= bound }
}
