//! Scalar root bracketing and unimodal minimization.

use super::{NumericsError, ToleranceSpec};

/// Bisection root of `f` on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs. Stops when
/// `|f(x)| <= abs_tol` or the bracket width drops below `rel_tol · |x|`.
pub fn bisect_root<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: &ToleranceSpec,
) -> Result<f64, NumericsError> {
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoBracket);
    }
    let mut mid = lo + 0.5 * (hi - lo);
    for _ in 0..tol.max_iter {
        mid = lo + 0.5 * (hi - lo);
        let fm = f(mid);
        if fm.abs() <= tol.abs_tol || (hi - lo) <= tol.rel_tol * mid.abs() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Golden-section minimum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`. Ties shrink the bracket from the right, so flat
/// regions resolve toward the smaller argument. Never fails: the best point
/// found within `max_iter` is returned.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &ToleranceSpec) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1) / 2
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..tol.max_iter {
        if (b - a) <= tol.abs_tol.max(tol.rel_tol * x1.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ToleranceSpec {
        ToleranceSpec::new(1e-12, 1e-14, 500)
    }

    #[test]
    fn linear_root() {
        let x = bisect_root(|x| x - 2.0, 0.0, 10.0, &spec()).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_half_life() {
        let x = bisect_root(|x| (-x).exp() - 0.5, 0.0, 10.0, &spec()).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn cubic_root_matches_grid_oracle() {
        let f = |x: f64| x * x * x - x - 2.0;
        // Brute-force oracle: finest sign change on a dense grid.
        let n = 2_000_000;
        let mut oracle = f64::NAN;
        for i in 0..n {
            let x0 = 1.0 + i as f64 / n as f64;
            let x1 = 1.0 + (i + 1) as f64 / n as f64;
            if f(x0) <= 0.0 && f(x1) > 0.0 {
                oracle = 0.5 * (x0 + x1);
                break;
            }
        }
        let x = bisect_root(f, 1.0, 2.0, &spec()).unwrap();
        assert!((x - oracle).abs() < 1e-6, "x={x} oracle={oracle}");
        assert!((x - 1.521_379_706_8).abs() < 1e-9);
    }

    #[test]
    fn no_bracket_is_an_error() {
        assert_eq!(
            bisect_root(|x| x * x + 1.0, -1.0, 1.0, &spec()),
            Err(NumericsError::NoBracket)
        );
    }

    #[test]
    fn quadratic_minimum() {
        let (x, v) = golden_min(|x| (x - 3.0) * (x - 3.0), 0.0, 10.0, &spec());
        assert!((x - 3.0).abs() < 1e-7);
        assert!(v < 1e-13);
    }

    #[test]
    fn symmetric_parabola() {
        let (x, _) = golden_min(|x| -x * (1.0 - x), 0.0, 1.0, &spec());
        assert!((x - 0.5).abs() < 1e-7);
    }

    #[test]
    fn logarithmic_stationary_point() {
        // f(x) = x − 2 ln(1 + x), f'(x) = 1 − 2/(1+x), minimum at x = 1.
        let (x, _) = golden_min(|x: f64| x - 2.0 * (1.0 + x).ln(), 0.0, 5.0, &spec());
        assert!((x - 1.0).abs() < 1e-7);
    }
}
