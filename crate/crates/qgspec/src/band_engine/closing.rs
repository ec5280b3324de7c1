use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{scan_window, BandType};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Quasimomentum, Side};
use crate::scalar::Real;
use crate::spectral_kernels::{kernels, Extremum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapClosing<T> {
    pub k: T,
    pub d: T,
    pub extremum: Extremum,
    pub theta: Quasimomentum<T>,
    /// Gap around `k` at cell size `d` (zero when the bands merge).
    pub gap_width: T,
}

const START_GRID: usize = 40;
const VERIFY_HALF_WIDTH: f64 = 0.05;
const VERIFY_RESOLUTION: f64 = 1e-4;
const NEIGHBOUR_DELTA_D: f64 = 1e-3;
const TOUCH_TOL: f64 = 1e-6;

struct Objective<T> {
    base: LatticeSpec<T>,
    side: Side,
    ext: Extremum,
}

impl<T: Real> Objective<T> {
    fn value(&self, k: T, d: T) -> Option<(T, T)> {
        let spec = self.base.with_d(d).ok()?;
        let t = kernels(k, self.side, &spec);
        Some((t.extremal_brackets()[self.ext.index()], t.scale))
    }

    fn grad(&self, k: T, d: T, h: T) -> Option<(T, T)> {
        let two = T::lit(2.0) * h;
        let gk = (self.value(k + h, d)?.0 - self.value(k - h, d)?.0) / two;
        let gd = (self.value(k, d + h)?.0 - self.value(k, d - h)?.0) / two;
        Some((gk, gd))
    }

    /// Newton iteration on `∇Δ_j = 0` in the `(k, d)` plane.
    fn newton(&self, mut k: T, mut d: T) -> Option<(T, T)> {
        for (h, iters) in [(1e-4, 40), (1e-6, 8)] {
            let h = T::lit(h);
            for _ in 0..iters {
                let (gk, gd) = self.grad(k, d, h)?;
                let (gkk, gdk) = {
                    let p = self.grad(k + h, d, h)?;
                    let m = self.grad(k - h, d, h)?;
                    ((p.0 - m.0) / (T::lit(2.0) * h), (p.1 - m.1) / (T::lit(2.0) * h))
                };
                let (gkd, gdd) = {
                    let p = self.grad(k, d + h, h)?;
                    let m = self.grad(k, d - h, h)?;
                    ((p.0 - m.0) / (T::lit(2.0) * h), (p.1 - m.1) / (T::lit(2.0) * h))
                };
                let a = gkk;
                let b = (gkd + gdk) / T::lit(2.0);
                let c = gdd;
                let det = a * c - b * b;
                if det == T::zero() || !det.is_finite() {
                    return None;
                }
                let dk = (c * gk - b * gd) / det;
                let dd = (a * gd - b * gk) / det;
                k -= dk;
                d -= dd;
                if !(k > T::zero() && d > T::zero()) {
                    return None;
                }
                if dk.abs() + dd.abs() < T::lit(1e-13) * (k + d) {
                    break;
                }
            }
        }
        Some((k, d))
    }
}

/// Width of the gap around `k` at `spec`: `Some(0)` inside a band, `None` if no gap is bracketed
/// within the verification window.
pub fn gap_at<T: Real>(spec: &LatticeSpec<T>, side: Side, k: T) -> Option<T> {
    let w = T::lit(VERIFY_HALF_WIDTH);
    let from = (k - w).max(T::lit(1e-9));
    let bands = scan_window(spec, side, from, k + w, T::lit(VERIFY_RESOLUTION)).ok()?;
    let bands: Vec<_> = bands.into_iter().filter(|b| b.band_type != BandType::Flat).collect();
    if bands.iter().any(|b| b.contains(k)) {
        return Some(T::zero());
    }
    let below = bands.iter().filter(|b| b.k_hi < k).map(|b| b.k_hi).fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.max(x))));
    let above = bands.iter().filter(|b| b.k_lo > k).map(|b| b.k_lo).fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.min(x))));
    Some(above? - below?)
}

/// Distance from `k` to the nearest open gap in the verification window, with that gap's width.
fn nearest_gap<T: Real>(spec: &LatticeSpec<T>, side: Side, k: T) -> Option<(T, T)> {
    let w = T::lit(VERIFY_HALF_WIDTH);
    let from = (k - w).max(T::lit(1e-9));
    let bands = scan_window(spec, side, from, k + w, T::lit(VERIFY_RESOLUTION)).ok()?;
    let cont: Vec<_> = bands.into_iter().filter(|b| b.band_type != BandType::Flat).collect();
    cont.windows(2)
        .map(|p| {
            let (lo, hi) = (p[0].k_hi, p[1].k_lo);
            let dist = if k < lo { lo - k } else if k > hi { k - hi } else { T::zero() };
            (dist, hi - lo)
        })
        .filter(|&(_, width)| width > T::zero())
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
}

/// Points `(k, d)` where neighbouring bands touch, found as critical points of the bracket at
/// the extremal θ-points (with `c`, `ℓ` fixed) and confirmed by local scans.
pub fn detect_gap_closings<T: Real>(
    spec: &LatticeSpec<T>,
    side: Side,
    k_window: (T, T),
    d_window: (T, T),
) -> Result<Vec<GapClosing<T>>> {
    let (k0, k1) = k_window;
    let (d0, d1) = d_window;
    if !(k0 > T::zero() && k1 > k0 && d0 > T::zero() && d1 > d0) {
        return Err(Error::InvalidArgument("gap-closing windows must be nonempty and positive".into()));
    }
    let n = START_GRID;
    let starts: Vec<(Extremum, T, T)> = Extremum::ALL
        .iter()
        .flat_map(|&e| {
            (0..n).flat_map(move |i| {
                (0..n).map(move |j| {
                    let fi = (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n);
                    let fj = (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(n);
                    (e, k0 + (k1 - k0) * fi, d0 + (d1 - d0) * fj)
                })
            })
        })
        .collect();

    let mut found: Vec<(Extremum, T, T)> = starts
        .par_iter()
        .filter_map(|&(ext, k, d)| {
            let obj = Objective { base: *spec, side, ext };
            let (k, d) = obj.newton(k, d)?;
            if k < k0 || k > k1 || d < d0 || d > d1 {
                return None;
            }
            let (v, scale) = obj.value(k, d)?;
            (v.abs() <= T::lit(1e-6) * scale).then_some((ext, k, d))
        })
        .collect();
    found.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.2.partial_cmp(&b.2).unwrap()));
    let mut unique: Vec<(Extremum, T, T)> = Vec::new();
    for c in found {
        if !unique.iter().any(|u| (u.1 - c.1).abs() < T::lit(1e-6) && (u.2 - c.2).abs() < T::lit(1e-6)) {
            unique.push(c);
        }
    }

    let verified = unique
        .into_par_iter()
        .filter_map(|(ext, k, d)| {
            let at = spec.with_d(d).ok()?;
            let gap = gap_at(&at, side, k)?;
            if gap >= T::lit(TOUCH_TOL) {
                return None;
            }
            let delta = T::lit(NEIGHBOUR_DELTA_D);
            let opens = [d - delta, d + delta].iter().any(|&dd| {
                spec.with_d(dd)
                    .ok()
                    .and_then(|s| nearest_gap(&s, side, k))
                    .is_some_and(|(dist, _)| dist < T::lit(1e-2))
            });
            opens.then(|| GapClosing { k, d, extremum: ext, theta: ext.theta(), gap_width: gap })
        })
        .collect();
    Ok(verified)
}
