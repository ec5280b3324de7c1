use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flat::{flat_bands, negative_flat_bands, FlatBand, FlatFamily};
use super::{attaining_extremum, classify, strictly_in_band, Membership};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Side};
use crate::scalar::Real;
use crate::spectral_kernels::{kernels, Extremum};

/// Recorded edge tolerance; edges are in fact bisected down to adjacent floats.
pub const EDGE_TOLERANCE: f64 = 1e-10;
/// Largest `κ·d` for which the negative-side kernels stay finite in `f64`.
pub const MAX_KAPPA_D: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandType {
    Continuous,
    Flat,
    DegeneratePoint,
}

impl BandType {
    pub fn as_str(self) -> &'static str {
        match self {
            BandType::Continuous => "continuous",
            BandType::Flat => "flat",
            BandType::DegeneratePoint => "degenerate_point",
        }
    }
}

/// One band `[k_lo, k_hi]` (`κ` on the negative side).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralInterval<T> {
    pub k_lo: T,
    pub k_hi: T,
    pub side: Side,
    pub band_type: BandType,
    pub energy_lo: T,
    pub energy_hi: T,
    /// Extremal θ-point at which the band edge is attained (`None` at 0 or at the scan end).
    pub edge_theta_lo: Option<Extremum>,
    pub edge_theta_hi: Option<Extremum>,
}

impl<T: Real> SpectralInterval<T> {
    pub fn new(
        k_lo: T,
        k_hi: T,
        side: Side,
        band_type: BandType,
        edge_theta_lo: Option<Extremum>,
        edge_theta_hi: Option<Extremum>,
    ) -> Self {
        let (energy_lo, energy_hi) = match side {
            Side::Positive => (k_lo * k_lo, k_hi * k_hi),
            Side::Negative => (-(k_hi * k_hi), -(k_lo * k_lo)),
        };
        SpectralInterval { k_lo, k_hi, side, band_type, energy_lo, energy_hi, edge_theta_lo, edge_theta_hi }
    }

    pub fn width_k(&self) -> T {
        self.k_hi - self.k_lo
    }

    pub fn width_energy(&self) -> T {
        self.energy_hi - self.energy_lo
    }

    pub fn center_energy(&self) -> T {
        (self.energy_hi + self.energy_lo) / T::lit(2.0)
    }

    pub fn contains(&self, k: T) -> bool {
        self.k_lo <= k && k <= self.k_hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStructure<T> {
    pub spec: LatticeSpec<T>,
    pub side: Side,
    /// Continuous bands, flat bands and degenerate points, sorted by `k_lo`.
    pub intervals: Vec<SpectralInterval<T>>,
    pub flat_bands: Vec<FlatBand<T>>,
    pub scan_k_max: T,
    pub resolution: T,
    pub edge_tolerance: T,
}

impl<T: Real> BandStructure<T> {
    pub fn continuous(&self) -> impl Iterator<Item = &SpectralInterval<T>> {
        self.intervals.iter().filter(|iv| iv.band_type == BandType::Continuous)
    }

    pub fn of_type(&self, t: BandType) -> impl Iterator<Item = &SpectralInterval<T>> {
        self.intervals.iter().filter(move |iv| iv.band_type == t)
    }

    /// Continuous bands, degenerate points and flat bands outside the continuous spectrum.
    pub fn band_count(&self) -> usize {
        let bands = self.intervals.iter().filter(|iv| iv.band_type != BandType::Flat).count();
        bands + self.flat_bands.iter().filter(|f| !f.embedded && f.family != FlatFamily::DegeneratePoint).count()
    }

    /// Smallest momentum of the continuous spectrum.
    pub fn first_edge(&self) -> Option<T> {
        self.continuous().map(|iv| iv.k_lo).fold(None, |m, k| Some(m.map_or(k, |m: T| m.min(k))))
    }

    /// Does `k` lie in a continuous band of this structure?
    pub fn covers(&self, k: T) -> bool {
        self.continuous().any(|iv| iv.contains(k))
    }

    /// Distance from `k` to the nearest continuous band edge.
    pub fn distance_to_edge(&self, k: T) -> T {
        self.continuous()
            .flat_map(|iv| [iv.k_lo, iv.k_hi])
            .map(|e| (e - k).abs())
            .fold(T::infinity(), T::min)
    }
}

/// Default grid step `2π/(1000 d)`.
pub fn default_resolution<T: Real>(spec: &LatticeSpec<T>) -> T {
    T::TAU() / (T::lit(1000.0) * spec.d)
}

/// Default upper end of the `κ`-scan.
pub fn default_kappa_max<T: Real>(spec: &LatticeSpec<T>) -> T {
    let ten = T::lit(10.0);
    (ten / spec.ell).max(ten / spec.shortest_edge()).min(T::lit(MAX_KAPPA_D) / spec.d)
}

#[derive(Clone, Copy, Debug)]
struct RawBand<T> {
    lo: T,
    hi: T,
    lo_ext: Option<Extremum>,
    hi_ext: Option<Extremum>,
    point: bool,
}

struct Scanner<'a, T> {
    spec: &'a LatticeSpec<T>,
    side: Side,
}

impl<T: Real> Scanner<'_, T> {
    fn state(&self, k: T) -> Membership {
        classify(k, self.side, self.spec)
    }

    fn ext(&self, k: T) -> Option<Extremum> {
        Some(attaining_extremum(&kernels(k, self.side, self.spec)))
    }

    /// Edge between an outside point and an inside point, as the innermost inside float.
    fn edge(&self, mut outside: T, mut inside: T) -> T {
        for _ in 0..256 {
            let mid = (outside + inside) / T::lit(2.0);
            if mid == outside || mid == inside {
                break;
            }
            if self.state(mid) == Membership::Inside {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// Band hidden between two outside samples on opposite sides of all extremal values.
    fn hidden(&self, mut a: T, sa: Membership, mut b: T) -> RawBand<T> {
        for _ in 0..256 {
            let mid = (a + b) / T::lit(2.0);
            if mid == a || mid == b {
                break;
            }
            match self.state(mid) {
                Membership::Inside => {
                    let lo = self.edge(a, mid);
                    let hi = self.edge(b, mid);
                    return RawBand { lo, hi, lo_ext: self.ext(lo), hi_ext: self.ext(hi), point: false };
                }
                s if s == sa => a = mid,
                _ => b = mid,
            }
        }
        RawBand { lo: a, hi: a, lo_ext: None, hi_ext: None, point: true }
    }

    /// Lower edge of a band that contains the first grid point `k1` of a scan from zero.
    fn descend_to_zero(&self, k1: T) -> T {
        let floor = k1 * T::lit(1e-12);
        let mut inside = k1;
        let mut probe = k1 / T::lit(2.0);
        while probe >= floor {
            if self.state(probe) != Membership::Inside {
                return self.edge(probe, inside);
            }
            inside = probe;
            probe = probe / T::lit(2.0);
        }
        T::zero()
    }

    fn scan(&self, lo: T, hi: T, step: T) -> Vec<RawBand<T>> {
        let n = ((hi - lo) / step).ceil().to_usize().unwrap_or(0).max(1);
        let first = usize::from(lo == T::zero());
        let mut ks: Vec<T> = (first..=n).map(|i| (lo + step * T::from_usize_lossy(i)).min(hi)).collect();
        ks.dedup();
        let states: Vec<Membership> = ks.par_iter().map(|&k| self.state(k)).collect();

        let mut out = Vec::new();
        let mut open: Option<(T, Option<Extremum>)> = None;
        if states[0] == Membership::Inside {
            open = if lo == T::zero() {
                let e = self.descend_to_zero(ks[0]);
                Some((e, if e == T::zero() { None } else { self.ext(e) }))
            } else {
                Some((ks[0], None))
            };
        }
        for i in 1..ks.len() {
            let (a, b) = (ks[i - 1], ks[i]);
            match (states[i - 1], states[i]) {
                (Membership::Inside, Membership::Inside) => {}
                (_, Membership::Inside) => {
                    let e = self.edge(a, b);
                    open = Some((e, self.ext(e)));
                }
                (Membership::Inside, _) => {
                    let e = self.edge(b, a);
                    let (l, lext) = open.take().expect("band start recorded");
                    out.push(RawBand { lo: l, hi: e, lo_ext: lext, hi_ext: self.ext(e), point: false });
                }
                (sa, sb) if sa != sb => out.push(self.hidden(a, sa, b)),
                _ => {}
            }
        }
        if let Some((l, lext)) = open {
            out.push(RawBand { lo: l, hi: *ks.last().unwrap(), lo_ext: lext, hi_ext: None, point: false });
        }
        for rb in &mut out {
            rb.point = rb.point || !self.genuine(rb);
        }
        out
    }

    /// A band is genuine if some interior sample satisfies the condition without the tie
    /// tolerance; otherwise it is the tie window around a point where all brackets vanish.
    fn genuine(&self, rb: &RawBand<T>) -> bool {
        let w = rb.hi - rb.lo;
        (1..=5).any(|j| strictly_in_band(rb.lo + w * T::lit(f64::from(j) / 6.0), self.side, self.spec))
    }
}

fn validate<T: Real>(spec: &LatticeSpec<T>, side: Side, k_max: T, step: T) -> Result<()> {
    if !(k_max > T::zero() && k_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("scan end must be positive, got {k_max}")));
    }
    if !(step > T::zero() && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("resolution must be positive, got {step}")));
    }
    if side == Side::Negative && k_max * spec.d > T::lit(MAX_KAPPA_D) {
        return Err(Error::InvalidArgument(format!(
            "kappa_max * d = {} exceeds {MAX_KAPPA_D}; the hyperbolic kernels would overflow",
            k_max * spec.d
        )));
    }
    if step > T::PI() / (T::lit(20.0) * spec.d) {
        log::warn!("resolution {step} is coarser than pi/(20 d); narrow bands may be missed");
    }
    Ok(())
}

fn is_point<T: Real>(rb: &RawBand<T>) -> bool {
    rb.point || rb.hi - rb.lo <= T::lit(64.0) * T::epsilon() * rb.hi.max(T::one())
}

fn assemble<T: Real>(raw: Vec<RawBand<T>>, flats: &[FlatBand<T>], side: Side) -> Vec<SpectralInterval<T>> {
    let mut out = Vec::new();
    let mut matched_degenerate = vec![false; flats.len()];
    for rb in raw {
        if is_point(&rb) {
            let kc = (rb.lo + rb.hi) / T::lit(2.0);
            let tol = T::lit(1e-8) * kc.max(T::one());
            let hit = flats.iter().position(|f| rb.lo - tol <= f.k && f.k <= rb.hi + tol);
            match hit {
                Some(i) if flats[i].family == FlatFamily::DegeneratePoint => {
                    matched_degenerate[i] = true;
                    out.push(SpectralInterval::new(flats[i].k, flats[i].k, side, BandType::DegeneratePoint, None, None));
                }
                Some(_) => {}
                None => out.push(SpectralInterval::new(kc, kc, side, BandType::DegeneratePoint, None, None)),
            }
        } else {
            out.push(SpectralInterval::new(rb.lo, rb.hi, side, BandType::Continuous, rb.lo_ext, rb.hi_ext));
        }
    }
    for (i, f) in flats.iter().enumerate() {
        if f.family == FlatFamily::DegeneratePoint {
            let inside_band = out.iter().any(|iv| iv.band_type == BandType::Continuous && iv.contains(f.k));
            if !matched_degenerate[i] && !inside_band {
                out.push(SpectralInterval::new(f.k, f.k, side, BandType::DegeneratePoint, None, None));
            }
        } else {
            out.push(SpectralInterval::new(f.k, f.k, side, BandType::Flat, None, None));
        }
    }
    out.sort_by(|a, b| a.k_lo.partial_cmp(&b.k_lo).unwrap().then(a.k_hi.partial_cmp(&b.k_hi).unwrap()));
    out
}

/// Continuous bands and point events in `[from, to]`, without flat-band bookkeeping.
pub fn scan_window<T: Real>(
    spec: &LatticeSpec<T>,
    side: Side,
    from: T,
    to: T,
    resolution: T,
) -> Result<Vec<SpectralInterval<T>>> {
    if !(from >= T::zero() && to > from) {
        return Err(Error::InvalidArgument(format!("empty window [{from}, {to}]")));
    }
    validate(spec, side, to, resolution)?;
    let raw = Scanner { spec, side }.scan(from, to, resolution);
    Ok(assemble(raw, &[], side))
}

/// Grid scan of the band condition on `(0, k_max]` with bisection-refined edges.
///
/// On the negative side `k` is `κ` and the band count is checked against the bound set by
/// the vertex degree (three for kagome, two for triangular).
pub fn scan_bands<T: Real>(spec: &LatticeSpec<T>, side: Side, k_max: T, resolution: Option<T>) -> Result<BandStructure<T>> {
    let step = resolution.unwrap_or_else(|| default_resolution(spec));
    validate(spec, side, k_max, step)?;
    let raw = Scanner { spec, side }.scan(T::zero(), k_max, step);
    let flats = match side {
        Side::Positive => flat_bands(spec, k_max),
        Side::Negative => negative_flat_bands(spec, k_max),
    };
    let intervals = assemble(raw, &flats, side);
    let bs = BandStructure {
        spec: *spec,
        side,
        intervals,
        flat_bands: flats,
        scan_k_max: k_max,
        resolution: step,
        edge_tolerance: T::lit(EDGE_TOLERANCE),
    };
    if side == Side::Negative {
        let bound = if spec.kind == LatticeKind::Triangular { 2 } else { 3 };
        let found = bs.band_count();
        if found > bound {
            return Err(Error::BandCountExceeded { found, bound });
        }
    }
    Ok(bs)
}

/// Negative spectrum on `(0, κ_max]`; `κ_max` defaults to [`default_kappa_max`].
pub fn scan_negative_bands<T: Real>(spec: &LatticeSpec<T>, kappa_max: Option<T>) -> Result<BandStructure<T>> {
    let kmax = kappa_max.unwrap_or_else(|| default_kappa_max(spec));
    let floor = T::lit(2.0) * crate::scalar::sqrt3::<T>() / spec.ell;
    if kmax < floor {
        return Err(Error::InvalidArgument(format!("kappa_max must be at least 2*sqrt(3)/ell = {floor}, got {kmax}")));
    }
    scan_bands(spec, Side::Negative, kmax, None)
}
