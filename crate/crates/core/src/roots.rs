//! Bracketed scalar root finding.

use crate::error::{domain, Result};

const MAX_ITER: usize = 400;

/// Plain bisection on a sign-changing bracket. Stops when the bracket width
/// falls below `rel_tol * max(|lo|, |hi|)` (or collapses in floating point).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(domain(format!(
            "bracket [{lo}, {hi}] does not change sign ({flo}, {fhi})"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= rel_tol * lo.abs().max(hi.abs()) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Safeguarded Newton iteration: Newton steps that leave the current
/// bracket (or stall) fall back to bisection. `fdf` returns `(f, f')`.
pub fn newton_bisect<F: Fn(f64) -> (f64, f64)>(
    fdf: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(domain(format!(
            "bracket [{lo}, {hi}] does not change sign ({flo}, {fhi})"
        )));
    }
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= rel_tol * next.abs() || hi - lo <= rel_tol * hi.abs() {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_cos() {
        let r = newton_bisect(|x| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 1e-14).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn bad_bracket_is_domain_error() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert!(newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_err());
    }
}
