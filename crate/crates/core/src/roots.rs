//! Scalar root finding and extremum search.

use crate::error::{Error, Result};
use crate::real::Real;

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Terminates when the bracket is narrower than `xtol` (plus a few ulps of the
/// iterate) or an exact zero is hit.
pub fn brent<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::RootBracketFail(format!(
            "no sign change on [{a}, {b}]: f = ({fa}, {fb})"
        )));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::eps() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = T::lit(3.0) * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootBracketFail(format!("non-finite value at {b}")));
        }
    }
    Err(Error::RootBracketFail(format!(
        "Brent did not converge in {max_iter} iterations"
    )))
}

/// Scans `n` equal subintervals of `[a, b]` and returns the first sub-bracket
/// with a sign change of `f`.
pub fn scan_bracket<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, n: usize) -> Option<(T, T)> {
    let nn = T::from_usize(n).unwrap();
    let mut x0 = a;
    let mut f0 = f(a);
    for k in 1..=n {
        let x1 = a + (b - a) * T::from_usize(k).unwrap() / nn;
        let f1 = f(x1);
        if f0 == T::zero() {
            return Some((x0, x0));
        }
        if f0.is_finite() && f1.is_finite() && (f0 > T::zero()) != (f1 > T::zero()) {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub fn golden_max<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, xtol: T) -> (T, T) {
    let invphi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Safeguarded Newton iteration on a bracket, falling back to bisection when a
/// step leaves the bracket or fails to shrink it fast enough.
pub fn newton_bracketed<T: Real, F: FnMut(T) -> (T, T)>(
    mut f: F,
    lo: T,
    hi: T,
    x0: T,
    xtol: T,
    max_iter: usize,
) -> Result<T> {
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::RootBracketFail(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})"
        )));
    }
    let lo_positive = flo > T::zero();
    let half = T::lit(0.5);
    let mut x = if x0 > lo && x0 < hi { x0 } else { half * (lo + hi) };
    let mut dx_old = hi - lo;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx > T::zero()) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let step_ok = dfx != T::zero()
            && newton.is_finite()
            && newton > lo
            && newton < hi
            && (fx / dfx).abs() * T::lit(2.0) <= dx_old.abs();
        let next = if step_ok { newton } else { half * (lo + hi) };
        dx_old = next - x;
        if (next - x).abs() <= xtol + T::lit(4.0) * T::eps() * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootBracketFail(format!(
        "safeguarded Newton did not converge in {max_iter} iterations"
    )))
}
