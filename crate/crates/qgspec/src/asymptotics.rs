//! Leading-order asymptotics of narrow bands and of the negative spectrum for large cells,
//! and a harness comparing them with scanned bands.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::band_engine::{format_g, scan_negative_bands, scan_window, BandType, SpectralInterval};
use crate::error::{Error, Result};
use crate::lattice::{f_theta, g_theta, LatticeKind, LatticeSpec, Side};
use crate::roots::{bisect_root, grid_roots};
use crate::scalar::{sqrt3, Real};
use crate::spectral_kernels::Extremum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBandPrediction<T> {
    pub center_k: T,
    pub band_width_e: T,
    pub gap_width_e: T,
    /// Order of the neglected terms.
    pub order_note: String,
    /// Expansion the prediction comes from.
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeLimitSet<T> {
    /// Energies the bands shrink to, ascending.
    pub limit_energies: Vec<T>,
    /// Leading-order band widths, one per limit energy.
    pub widths: Vec<T>,
}

fn require(spec_kind: LatticeKind, want: LatticeKind) -> Result<()> {
    if spec_kind != want {
        return Err(Error::InvalidArgument(format!("expected a {want:?} lattice, got {spec_kind:?}")));
    }
    Ok(())
}

/// Pair of narrow bands around `k = (2n-1)π/c` for the equilateral kagome lattice.
pub fn equilateral_narrow_band<T: Real>(n: usize, spec: &LatticeSpec<T>) -> Result<AsymptoticBandPrediction<T>> {
    require(spec.kind, LatticeKind::EquilateralKagome)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let s3 = sqrt3::<T>();
    let five_cl = T::lit(5.0) * spec.c * spec.ell;
    Ok(AsymptoticBandPrediction {
        center_k: T::from_usize_lossy(2 * n - 1) * T::PI() / spec.c,
        band_width_e: T::lit(2.0) * s3 / five_cl,
        gap_width_e: T::lit(16.0) * s3 / five_cl,
        order_note: "O(1/n)".into(),
        source: "equilateral kagome, high-energy expansion around cos(kc/2)=0".into(),
    })
}

/// Pair of narrow bands around `k = (2n-1)π/d` for the triangular lattice.
pub fn triangular_narrow_band<T: Real>(n: usize, spec: &LatticeSpec<T>) -> Result<AsymptoticBandPrediction<T>> {
    require(spec.kind, LatticeKind::Triangular)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let dl3 = spec.d * spec.ell * sqrt3::<T>();
    Ok(AsymptoticBandPrediction {
        center_k: T::from_usize_lossy(2 * n - 1) * T::PI() / spec.d,
        band_width_e: T::lit(4.0) / dl3,
        gap_width_e: T::lit(8.0) / dl3,
        order_note: "O(1/n)".into(),
        source: "triangular lattice, high-energy expansion around cos(kd/2)=0".into(),
    })
}

/// Two scanned bands on either side of `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NarrowPair<T> {
    pub lower: SpectralInterval<T>,
    pub upper: SpectralInterval<T>,
}

impl<T: Real> NarrowPair<T> {
    pub fn gap_e(&self) -> T {
        self.upper.energy_lo - self.lower.energy_hi
    }
}

/// Scan `[center - half_window, center + half_window]` and return the bands nearest to
/// `center` from below and above. Both must lie strictly inside the window.
pub fn measure_narrow_pair<T: Real>(
    spec: &LatticeSpec<T>,
    center: T,
    half_window: T,
    resolution: T,
) -> Result<NarrowPair<T>> {
    let from = (center - half_window).max(T::zero());
    let to = center + half_window;
    let bands = scan_window(spec, Side::Positive, from, to, resolution)?;
    let cont: Vec<_> = bands.into_iter().filter(|b| b.band_type == BandType::Continuous).collect();
    let lower = cont.iter().filter(|b| b.k_hi < center).last();
    let upper = cont.iter().find(|b| b.k_lo > center);
    match (lower, upper) {
        (Some(l), Some(u)) if l.k_lo > from && u.k_hi < to => Ok(NarrowPair { lower: l.clone(), upper: u.clone() }),
        _ => Err(Error::Bracketing(format!("no band pair around k = {center} inside the window"))),
    }
}

/// Roots of `cos(k(2c-d)/2) + 2cos(kd/2)` in `(from, to)`, the centres of the narrow pairs
/// of a general kagome lattice.
pub fn kagome_pair_centers<T: Real>(spec: &LatticeSpec<T>, from: T, to: T) -> Vec<T> {
    let two = T::lit(2.0);
    let (c, d) = (spec.c, spec.d);
    let f = |k: T| (k * (two * c - d) / two).cos() + two * (k * d / two).cos();
    let n = ((to - from) * d * T::lit(200.0)).ceil().to_usize().unwrap_or(1000).max(1000);
    grid_roots(f, from, to, n).into_iter().filter(|&r| r > from && r < to).collect()
}

pub fn kagome_f<T: Real>(spec: &LatticeSpec<T>, kappa: T) -> T {
    let kk = (kappa * spec.ell).powi(2);
    let e = (-kappa * spec.c).exp();
    T::lit(4.0) * (e + T::one()) * (kk - T::one()).powi(2) + e * e * (kk * kk - T::lit(14.0) * kk + T::one())
}

/// θ-dependent coefficient of the `e^{κd}` term, as a function of `f_θ`, `g_θ`.
pub fn kagome_g<T: Real>(spec: &LatticeSpec<T>, kappa: T, f: T, g: T) -> T {
    let kl = kappa * spec.ell;
    let kk = kl * kl;
    let ec = (kappa * spec.c).exp();
    let e1 = T::one() / ec;
    let e2 = e1 * e1;
    let one = T::one();
    let p = (kk + one).powi(2);
    let q4 = kk * kk - T::lit(14.0) * kk + one;
    let q5 = T::lit(5.0) * kk * kk - T::lit(22.0) * kk + T::lit(5.0);
    (e2 + T::lit(3.0) * e1 + T::lit(2.0)) * (kk - one) * p * f - T::lit(2.0) * kl * e2 * (ec - one) * p * g
        - (kk - one) * (e2 * q4 + e1 * q5 + T::lit(4.0) * (ec + T::lit(2.0)) * (kk - one).powi(2))
}

pub fn kagome_h<T: Real>(spec: &LatticeSpec<T>, kappa: T) -> T {
    let kk = (kappa * spec.ell).powi(2);
    let e = (kappa * spec.c).exp();
    let q5 = T::lit(5.0) * kk * kk - T::lit(22.0) * kk + T::lit(5.0);
    (T::one() - kk) * ((e + T::one() / e) * q5 + T::lit(6.0) * (kk * kk - T::lit(6.0) * kk + T::one()))
}

fn g_range<T: Real>(spec: &LatticeSpec<T>, kappa: T) -> T {
    let vals = Extremum::ALL.map(|x| {
        let th = x.theta::<T>();
        kagome_g(spec, kappa, f_theta(&th), g_theta(&th))
    });
    let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
    let lo = vals.iter().copied().fold(T::infinity(), T::min);
    hi - lo
}

/// Limit points of the negative bands of a kagome lattice as `d → ∞` with `c`, `ℓ` fixed.
///
/// The widths come from the first-order shift of the roots by the `e^{κd}` term.
pub fn kagome_negative_large_d<T: Real>(spec: &LatticeSpec<T>) -> Result<NegativeLimitSet<T>> {
    if !spec.kind.is_kagome() {
        return Err(Error::InvalidArgument("expected a kagome lattice".into()));
    }
    let inv = T::one() / spec.ell;
    let f = |k: T| kagome_f(spec, k);
    let lo = bisect_root(f, T::zero(), inv)
        .ok_or_else(|| Error::Bracketing("no sign change of f on (0, 1/ell)".into()))?;
    let mut top = inv * T::lit(2.0);
    let mut tries = 0;
    while f(top) <= T::zero() {
        top = top * T::lit(2.0);
        tries += 1;
        if tries > 60 {
            return Err(Error::Bracketing("f does not become positive above 1/ell".into()));
        }
    }
    let hi = bisect_root(f, inv, top).ok_or_else(|| Error::Bracketing("no sign change of f above 1/ell".into()))?;

    let d = spec.d;
    let width_at_root = |k0: T| {
        let h = k0 * T::lit(1e-6);
        let df = (f(k0 + h) - f(k0 - h)) / (h + h);
        let k2 = (k0 * spec.ell).powi(2);
        let wk = g_range(spec, k0) * (-k0 * d).exp() / ((T::one() - k2) * df).abs();
        T::lit(2.0) * k0 * wk
    };
    let w_mid = T::lit(2.0) * sqrt3::<T>() * ((spec.c * inv).exp() - T::one()) * (-d * inv).exp() * inv * inv;
    // ascending energy: largest κ first
    Ok(NegativeLimitSet {
        limit_energies: vec![-(hi * hi), -(inv * inv), -(lo * lo)],
        widths: vec![width_at_root(hi), w_mid, width_at_root(lo)],
    })
}

/// The two continuous negative bands of the equilateral kagome lattice for large `c`.
pub fn equilateral_negative_widths<T: Real>(spec: &LatticeSpec<T>) -> Result<AsymptoticBandPrediction<T>> {
    require(spec.kind, LatticeKind::EquilateralKagome)?;
    let inv2 = (spec.ell * spec.ell).recip();
    let w = sqrt3::<T>() * inv2 * (-spec.c / spec.ell).exp();
    Ok(AsymptoticBandPrediction {
        center_k: spec.ell.recip(),
        band_width_e: w,
        gap_width_e: T::lit(2.0) * w,
        order_note: "O(exp(-2c/ell))".into(),
        source: "equilateral kagome, kappa^2 = ell^-2 + eps expansion".into(),
    })
}

/// Limit points `{-3ℓ⁻², -ℓ⁻²/3}` of the triangular negative bands as `d → ∞`.
pub fn triangular_negative_large_d<T: Real>(spec: &LatticeSpec<T>) -> Result<NegativeLimitSet<T>> {
    require(spec.kind, LatticeKind::Triangular)?;
    let inv2 = (spec.ell * spec.ell).recip();
    let s3 = sqrt3::<T>();
    let dl = spec.d / spec.ell;
    Ok(NegativeLimitSet {
        limit_energies: vec![-T::lit(3.0) * inv2, -inv2 / T::lit(3.0)],
        widths: vec![T::lit(18.0) * inv2 * (-s3 * dl).exp(), T::lit(2.0) * inv2 * (-dl / s3).exp()],
    })
}

/// Band centres of the triangular negative bands: the limits shifted by the `f_θ = 3/4` term.
pub fn triangular_negative_centers<T: Real>(spec: &LatticeSpec<T>) -> Result<Vec<T>> {
    require(spec.kind, LatticeKind::Triangular)?;
    let inv2 = (spec.ell * spec.ell).recip();
    let s3 = sqrt3::<T>();
    let dl = spec.d / spec.ell;
    let f = T::lit(0.75);
    Ok(vec![
        -T::lit(3.0) * inv2 - T::lit(4.0) * inv2 * (-s3 * dl).exp() * f,
        -inv2 / T::lit(3.0) + T::lit(4.0) / T::lit(9.0) * inv2 * (-dl / s3).exp() * f,
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow<T> {
    pub quantity: String,
    pub predicted: T,
    pub measured: T,
    pub relative_error: T,
}

impl<T: Real> ComparisonRow<T> {
    pub fn new(quantity: impl Into<String>, predicted: T, measured: T) -> Self {
        let relative_error = ((measured - predicted) / predicted).abs();
        ComparisonRow { quantity: quantity.into(), predicted, measured, relative_error }
    }
}

fn narrow_rows<T: Real>(spec: &LatticeSpec<T>, n: usize) -> Result<Vec<ComparisonRow<T>>> {
    let (pred, length) = match spec.kind {
        LatticeKind::EquilateralKagome => (equilateral_narrow_band(n, spec)?, spec.c),
        LatticeKind::Triangular => (triangular_narrow_band(n, spec)?, spec.d),
        LatticeKind::Kagome => return Ok(Vec::new()),
    };
    let pair = measure_narrow_pair(spec, pred.center_k, T::FRAC_PI_4() / length, T::lit(1e-5))?;
    Ok(vec![
        ComparisonRow::new("narrow_band_width_lower", pred.band_width_e, pair.lower.width_energy()),
        ComparisonRow::new("narrow_band_width_upper", pred.band_width_e, pair.upper.width_energy()),
        ComparisonRow::new("narrow_gap_width", pred.gap_width_e, pair.gap_e()),
    ])
}

fn negative_bands<T: Real>(spec: &LatticeSpec<T>) -> Result<Vec<SpectralInterval<T>>> {
    let bs = scan_negative_bands(spec, None)?;
    let mut v: Vec<_> = bs
        .intervals
        .into_iter()
        .filter(|b| matches!(b.band_type, BandType::Continuous | BandType::DegeneratePoint))
        .collect();
    v.sort_by(|a, b| a.energy_lo.partial_cmp(&b.energy_lo).unwrap());
    Ok(v)
}

fn nearest<'a, T: Real>(bands: &'a [SpectralInterval<T>], e: T) -> Option<&'a SpectralInterval<T>> {
    bands.iter().min_by(|a, b| {
        (a.center_energy() - e).abs().partial_cmp(&(b.center_energy() - e).abs()).unwrap()
    })
}

fn limit_rows<T: Real>(
    set: &NegativeLimitSet<T>,
    centers: Option<&[T]>,
    bands: &[SpectralInterval<T>],
) -> Vec<ComparisonRow<T>> {
    let mut rows = Vec::new();
    for (i, (&e, &w)) in set.limit_energies.iter().zip(&set.widths).enumerate() {
        if let Some(b) = nearest(bands, e) {
            let target = centers.map_or(e, |c| c[i]);
            rows.push(ComparisonRow::new(format!("negative_center_{i}"), target, b.center_energy()));
            rows.push(ComparisonRow::new(format!("negative_width_{i}"), w, b.width_energy()));
        }
    }
    rows
}

/// Predicted against scanned quantities for `spec`; `n` selects the narrow-band pair.
pub fn asymptotics_report<T: Real>(spec: &LatticeSpec<T>, n: usize) -> Result<Vec<ComparisonRow<T>>> {
    let mut rows = narrow_rows(spec, n)?;
    let bands = negative_bands(spec)?;
    match spec.kind {
        LatticeKind::EquilateralKagome => {
            let pred = equilateral_negative_widths(spec)?;
            let cont: Vec<_> = bands.iter().filter(|b| b.band_type == BandType::Continuous).collect();
            let e0 = -(spec.ell * spec.ell).recip();
            if let (Some(lo), Some(hi)) =
                (cont.iter().filter(|b| b.energy_hi < e0).last(), cont.iter().find(|b| b.energy_lo > e0))
            {
                rows.push(ComparisonRow::new("negative_width_lower", pred.band_width_e, lo.width_energy()));
                rows.push(ComparisonRow::new("negative_width_upper", pred.band_width_e, hi.width_energy()));
                rows.push(ComparisonRow::new("negative_gap", pred.gap_width_e, hi.energy_lo - lo.energy_hi));
            }
        }
        LatticeKind::Triangular => {
            let set = triangular_negative_large_d(spec)?;
            let centers = triangular_negative_centers(spec)?;
            rows.extend(limit_rows(&set, Some(&centers), &bands));
        }
        LatticeKind::Kagome => {
            let set = kagome_negative_large_d(spec)?;
            rows.extend(limit_rows(&set, None, &bands));
        }
    }
    Ok(rows)
}

pub const ASYMPTOTICS_CSV_HEADER: &str = "quantity,predicted,measured,relative_error";

pub fn asymptotics_csv<T: Real>(rows: &[ComparisonRow<T>]) -> String {
    let mut s = String::from(ASYMPTOTICS_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.quantity,
            format_g(r.predicted.to_f64_lossy(), 12),
            format_g(r.measured.to_f64_lossy(), 12),
            format_g(r.relative_error.to_f64_lossy(), 12)
        );
    }
    s
}
