use std::fmt::Write;

use super::scan::BandStructure;
use crate::scalar::Real;

pub const BANDS_CSV_HEADER: &str = "side,band_index,type,k_lo,k_hi,E_lo,E_hi";

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// C-style `%.{sig}g` formatting.
pub fn format_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mant), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// CSV rows for one or more band structures, header included, LF line endings.
pub fn bands_csv<T: Real>(structures: &[&BandStructure<T>]) -> String {
    let mut s = String::from(BANDS_CSV_HEADER);
    s.push('\n');
    for bs in structures {
        for (i, iv) in bs.intervals.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                iv.side.as_str(),
                i,
                iv.band_type.as_str(),
                format_g(iv.k_lo.to_f64_lossy(), 12),
                format_g(iv.k_hi.to_f64_lossy(), 12),
                format_g(iv.energy_lo.to_f64_lossy(), 12),
                format_g(iv.energy_hi.to_f64_lossy(), 12),
            );
        }
    }
    s
}
