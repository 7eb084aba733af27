//! Adaptive quadrature built on the 7/15-point Gauss–Kronrod pair.
//!
//! Intervals are bisected depth-first, left half first, with the absolute
//! error budget split proportionally to interval width. For smooth
//! integrands the Kronrod error estimate converges fast enough that a few
//! subdivisions suffice.

use super::{NumericsError, ToleranceSpec};

// QUADPACK dqk15 abscissae (positive half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod evaluation over `[a, b]`: returns `(k15, |k15 − g7|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive integral of `f` over `[lo, hi]` to absolute tolerance
/// `tol.abs_tol`.
///
/// Returns 0 for an empty interval and `BudgetExceeded` when more than
/// `tol.max_iter` subdivisions would be needed.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &ToleranceSpec,
) -> Result<f64, NumericsError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumericsError::Domain("quadrature bounds must be finite"));
    }
    if lo > hi {
        return Err(NumericsError::Domain("quadrature requires lo <= hi"));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let total_width = hi - lo;
    let mut subdivisions = 0usize;
    let mut acc = 0.0;
    // Depth-first, left half first: push right before left.
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let (value, err) = gk15(&f, a, b);
        let local_tol = tol.abs_tol * (b - a) / total_width;
        let mid = 0.5 * (a + b);
        // A degenerate interval can no longer be split; accept its estimate.
        if err <= local_tol || mid <= a || mid >= b {
            acc += value;
            continue;
        }
        subdivisions += 1;
        if subdivisions > tol.max_iter {
            return Err(NumericsError::BudgetExceeded(tol.max_iter));
        }
        stack.push((mid, b));
        stack.push((a, mid));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ToleranceSpec {
        ToleranceSpec::default()
    }

    #[test]
    fn constant_unit_integral() {
        let v = integrate_adaptive(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_zero() {
        let v = integrate_adaptive(|x| x.exp(), 3.0, 3.0, &spec()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn exponential_decay() {
        let v = integrate_adaptive(|x| (-x).exp(), 0.0, 1.0, &spec()).unwrap();
        let expected = 1.0 - (-1.0_f64).exp();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^π sin = 2.
        let v = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, &spec()).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn halving_tolerance_never_degrades_accuracy() {
        let exact = 1.0 - (-25.0_f64).exp();
        let mut tol = ToleranceSpec::new(1e-3, 1e-12, 1 << 20);
        let mut prev_err = f64::INFINITY;
        for _ in 0..18 {
            let v = integrate_adaptive(|x| (-x).exp(), 0.0, 25.0, &tol).unwrap();
            let err = (v - exact).abs();
            assert!(err <= prev_err + 1e-15, "tol {} err {}", tol.abs_tol, err);
            assert!(err <= tol.abs_tol);
            prev_err = err;
            tol.abs_tol *= 0.5;
        }
    }

    #[test]
    fn budget_exceeded_reported() {
        let tol = ToleranceSpec::new(1e-13, 1e-15, 2);
        let r = integrate_adaptive(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tol);
        assert_eq!(r, Err(NumericsError::BudgetExceeded(2)));
    }

    #[test]
    fn rejects_swapped_bounds() {
        assert!(integrate_adaptive(|_| 1.0, 1.0, 0.0, &spec()).is_err());
    }
}
