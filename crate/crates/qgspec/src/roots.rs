//! Bracketed root finding.

use crate::scalar::Real;

/// Bisection on a sign change of `f` over `[a, b]`, run down to adjacent floats.
pub fn bisect_root<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> Option<T> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Some(a);
    }
    if fb == T::zero() {
        return Some(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) || fa.is_nan() || fb.is_nan() {
        return None;
    }
    for _ in 0..256 {
        let mid = (a + b) / T::lit(2.0);
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some((a + b) / T::lit(2.0))
}

/// All sign changes of `f` on an `n`-step grid over `[a, b]`, each refined by bisection.
pub fn grid_roots<T: Real>(f: impl Fn(T) -> T, a: T, b: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let step = (b - a) / T::from_usize_lossy(n);
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + step * T::from_usize_lossy(i) };
        let f1 = f(x1);
        if f0 == T::zero() {
            out.push(x0);
        } else if f1 != T::zero() && (f0 > T::zero()) != (f1 > T::zero()) {
            if let Some(r) = bisect_root(&f, x0, x1) {
                out.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    out
}
