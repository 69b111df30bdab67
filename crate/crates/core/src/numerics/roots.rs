//! Bracketing root finding.

use alloc::vec::Vec;

use super::NumericsError;

/// Default bisection width.
pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_BISECTIONS: usize = 200;

/// Bisection on `[lo, hi]`. Requires `f(lo)` and `f(hi)` of opposite sign and
/// stops once the bracket is narrower than `tol`, returning its midpoint.
pub fn bracket_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { f_lo: fa, f_hi: fb });
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Samples `f` on `samples + 1` equispaced points in `[lo, hi]` and returns
/// every sub-interval whose endpoint values change sign, in increasing order.
/// A sample that is an exact zero is reported as the degenerate bracket
/// `(x, x)`.
pub fn sign_change_brackets<F>(mut f: F, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let samples = samples.max(1);
    let step = (hi - lo) / samples as f64;
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..=samples {
        let x = if i == samples {
            hi
        } else {
            lo + step * i as f64
        };
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if f_prev.is_finite()
            && fx.is_finite()
            && f_prev != 0.0
            && f_prev.signum() != fx.signum()
        {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}
