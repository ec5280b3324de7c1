use serde::{Deserialize, Serialize};

use super::strictly_in_band;
use crate::lattice::{LatticeKind, LatticeSpec, Side};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatFamily {
    /// `2nπ/c`
    CFamily,
    /// `2nπ/(d − c)`
    BFamily,
    /// `2nπ/d`
    DFamily,
    /// `nπ/c`, equilateral kagome
    EquilateralMerged,
    /// zeros of `2 cos kc + 1`, equilateral kagome
    DavidStar,
    /// a band shrunk to the single momentum `1/ℓ`
    DegeneratePoint,
    /// `κ = 1/ℓ` on the negative side of the equilateral kagome lattice
    NegativeEquilateral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatBand<T> {
    pub k: T,
    pub side: Side,
    pub family: FlatFamily,
    pub multiplicity_note: String,
    /// Lies inside a continuous band (tested strictly on a punctured neighbourhood).
    pub embedded: bool,
}

fn embedded<T: Real>(k: T, side: Side, spec: &LatticeSpec<T>) -> bool {
    let h = T::lit(1e-7) * k.max(T::one());
    strictly_in_band(k - h, side, spec) && strictly_in_band(k + h, side, spec)
}

/// `((−1)^{n+1} + 6n − 3)`, i.e. 4, 8, 16, 20, 28, …
fn star_sequence(n: u32) -> f64 {
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign + 6.0 * f64::from(n) - 3.0
}

/// Does `x` equal `unit · star_sequence(n)` for some `n`?
fn on_star_sequence<T: Real>(x: T, unit: T) -> bool {
    let m = (x / unit).to_f64_lossy();
    if !(m > 0.0) {
        return false;
    }
    let n_guess = (m / 6.0).round() as u32;
    (n_guess.saturating_sub(1)..=n_guess + 1).filter(|&n| n >= 1).any(|n| {
        let v = star_sequence(n);
        (m - v).abs() <= 1e-9 * v
    })
}

/// `Some(1/ℓ)` when the band at `k = 1/ℓ` degenerates to a point.
pub fn degenerate_point_momentum<T: Real>(spec: &LatticeSpec<T>) -> Option<T> {
    let ell = spec.ell;
    let pi = T::PI();
    let hit = match spec.kind {
        LatticeKind::Kagome => {
            let unit = ell * pi / T::lit(6.0);
            [spec.b(), spec.c, spec.d].iter().any(|&l| on_star_sequence(l, unit))
        }
        LatticeKind::EquilateralKagome => on_star_sequence(spec.c, ell * pi / T::lit(12.0)),
        LatticeKind::Triangular => on_star_sequence(spec.d, ell * pi / T::lit(6.0)),
    };
    hit.then(|| T::one() / ell)
}

fn family_members<T: Real>(offset: impl Fn(u32) -> T, k_max: T) -> Vec<T> {
    let mut out = Vec::new();
    let mut n = 1;
    loop {
        let k = offset(n);
        if k > k_max {
            break;
        }
        out.push(k);
        n += 1;
    }
    out
}

/// All flat-band momenta in `(0, k_max]` on the positive side, sorted by `k`.
pub fn flat_bands<T: Real>(spec: &LatticeSpec<T>, k_max: T) -> Vec<FlatBand<T>> {
    let two_pi = T::TAU();
    let pi = T::PI();
    let mut raw: Vec<(T, FlatFamily)> = Vec::new();
    match spec.kind {
        LatticeKind::Kagome => {
            for (len, fam) in [(spec.c, FlatFamily::CFamily), (spec.b(), FlatFamily::BFamily), (spec.d, FlatFamily::DFamily)] {
                for k in family_members(|n| T::lit(f64::from(n)) * two_pi / len, k_max) {
                    raw.push((k, fam));
                }
            }
        }
        LatticeKind::EquilateralKagome => {
            let c = spec.c;
            for k in family_members(|n| T::lit(f64::from(n)) * pi / c, k_max) {
                raw.push((k, FlatFamily::EquilateralMerged));
            }
            for k in family_members(|n| T::lit(star_sequence(n)) * pi / (T::lit(6.0) * c), k_max) {
                raw.push((k, FlatFamily::DavidStar));
            }
        }
        LatticeKind::Triangular => {
            for k in family_members(|n| T::lit(f64::from(n)) * two_pi / spec.d, k_max) {
                raw.push((k, FlatFamily::DFamily));
            }
        }
    }
    if let Some(k) = degenerate_point_momentum(spec) {
        if k <= k_max {
            raw.push((k, FlatFamily::DegeneratePoint));
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut out: Vec<FlatBand<T>> = Vec::new();
    for (k, fam) in raw {
        if let Some(last) = out.last_mut() {
            if (k - last.k).abs() <= T::lit(1e-12) * k {
                // a coinciding degenerate point takes over the entry
                let name = if fam == FlatFamily::DegeneratePoint {
                    let prev = format!("{:?}", last.family);
                    last.family = fam;
                    prev
                } else {
                    format!("{fam:?}")
                };
                last.multiplicity_note = if last.multiplicity_note.is_empty() {
                    format!("coincides with {name}")
                } else {
                    format!("{}, {name}", last.multiplicity_note)
                };
                continue;
            }
        }
        out.push(FlatBand {
            k,
            side: Side::Positive,
            family: fam,
            multiplicity_note: String::new(),
            embedded: embedded(k, Side::Positive, spec),
        });
    }
    out
}

/// Negative-side flat bands: only `κ = 1/ℓ` of the equilateral kagome lattice.
pub fn negative_flat_bands<T: Real>(spec: &LatticeSpec<T>, kappa_max: T) -> Vec<FlatBand<T>> {
    let k = T::one() / spec.ell;
    if spec.kind != LatticeKind::EquilateralKagome || k > kappa_max {
        return Vec::new();
    }
    vec![FlatBand {
        k,
        side: Side::Negative,
        family: FlatFamily::NegativeEquilateral,
        multiplicity_note: String::new(),
        embedded: embedded(k, Side::Negative, spec),
    }]
}
