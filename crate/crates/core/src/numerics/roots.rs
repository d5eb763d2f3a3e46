//! Bracketed one-dimensional root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Finds a root of `f` inside `[lo, hi]`, which must bracket a sign
/// change. Bisection guarantees convergence; a secant step is taken
/// instead whenever it stays inside the current bracket.
///
/// Returns once the bracket width or |f| at the candidate drops to
/// `tol`. The result always lies inside the initial bracket.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy lo < hi with finite bounds, got [{lo}, {hi}]"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let mut a = lo;
    let mut b = hi;
    let mut fa = eval(&mut f, a)?;
    let mut fb = eval(&mut f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi });
    }

    for iteration in 0..MAX_ITER {
        // Secant candidate on every other iteration, accepted only when
        // it falls strictly inside the bracket; the alternating midpoint
        // step keeps the bracket shrinking geometrically even when the
        // secant stagnates on a flat stretch of f.
        let mid = 0.5 * (a + b);
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if iteration % 2 == 0 && secant.is_finite() && a < secant && secant < b {
            secant
        } else {
            mid
        };
        let fx = eval(&mut f, x)?;

        if fx == 0.0 || fx.abs() <= tol || (b - a) <= tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    // The bracket shrank as far as f64 spacing allows.
    Ok(0.5 * (a + b))
}

fn eval<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let v = f(x);
    if v.is_nan() {
        return Err(Error::Numeric(format!("objective returned NaN at {x}")));
    }
    Ok(v)
}
