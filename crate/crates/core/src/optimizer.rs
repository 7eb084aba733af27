//! Two-stage covert-throughput design: the smallest selection threshold
//! meeting the covertness constraint, then the rate maximizing Ω = R(1−δ).
//!
//! The constraint ξ̄* ≥ 1 − ε binds at the optimum because ξ̄* grows with τ
//! while the outage δ grows with τ too; the optimal τ* therefore solves
//! ξ̄*(τ*) = 1 − ε, located by bracket doubling plus bisection. Since ξ̄ has
//! no rate dependence, solving for τ* first and then maximizing over the
//! rate is an exact decomposition.

use crate::detection::{
    min_avg_error_case1, min_avg_error_case1_limit_tau_inf, min_avg_error_case2,
    min_avg_error_case2_limit_tau_inf, min_avg_error_case2_warm, DetectionContext,
};
use crate::error::ModelError;
use crate::geometry::{GeometryError, NetworkGeometry, SystemParams};
use crate::numerics::{bisect_root, golden_min, ToleranceSpec};
use crate::outage::{outage_probability, OutageContext};
use crate::util::log_spaced;
use serde::Serialize;
use std::cell::RefCell;

/// Whether the warden tracks the instantaneous detection channel (case 1) or
/// only its statistics (case 2, the default model).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CsiCase {
    Case1,
    Case2,
}

impl CsiCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            CsiCase::Case1 => "case1",
            CsiCase::Case2 => "case2",
        }
    }
}

impl std::str::FromStr for CsiCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "case1" => Ok(CsiCase::Case1),
            "case2" => Ok(CsiCase::Case2),
            other => Err(format!("unknown warden CSI case `{other}`")),
        }
    }
}

/// Output of the joint (τ, R) design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub tau_star: f64,
    pub rate_star: f64,
    pub omega_star: f64,
    /// ξ̄* evaluated at τ*; equals 1 − ε up to the solver tolerance.
    pub xi_bar_at_tau_star: f64,
    pub feasible: bool,
}

/// Constraint activity tolerance: |ξ̄*(τ*) − (1 − ε)| stays within this.
pub const CONSTRAINT_TOL: f64 = 1e-6;

/// Minimum average detection error ξ̄ι* for the selected case at the
/// threshold stored in `params`.
pub fn min_avg_error_star(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    case: CsiCase,
) -> Result<f64, ModelError> {
    let ctx = DetectionContext::new(geometry, params)?;
    match case {
        CsiCase::Case1 => min_avg_error_case1(&ctx),
        CsiCase::Case2 => min_avg_error_case2(&ctx).map(|(xi, _)| xi),
    }
}

fn limit_star(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    case: CsiCase,
) -> Result<f64, ModelError> {
    let ctx = DetectionContext::new(geometry, &params.with_tau(1.0))?;
    match case {
        CsiCase::Case1 => min_avg_error_case1_limit_tau_inf(&ctx),
        CsiCase::Case2 => min_avg_error_case2_limit_tau_inf(&ctx).map(|(xi, _)| xi),
    }
}

struct TauSolution {
    tau_star: f64,
    xi_at_star: f64,
}

fn solve_optimal_tau(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    epsilon: f64,
    case: CsiCase,
) -> Result<TauSolution, ModelError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GeometryError::InvalidParameter {
            name: "epsilon",
            value: epsilon,
        }
        .into());
    }
    let target = 1.0 - epsilon;
    if geometry.n_helpers() == 0 {
        return Err(ModelError::Infeasible {
            xi_limit: 0.0,
            target,
        });
    }
    // Even selecting every helper caps the achievable confusion; check that
    // ceiling before spending anything on the search.
    let xi_limit = limit_star(geometry, params, case)?;
    if xi_limit < target {
        return Err(ModelError::Infeasible { xi_limit, target });
    }

    // ξ̄ι*(τ) evaluations along the bisection warm-start the μ minimizer from
    // the previous minimizer (case 2); errors are funneled out through the
    // cell since the root finder wants a plain f64 map.
    let warm_mu: RefCell<Option<f64>> = RefCell::new(None);
    let error: RefCell<Option<ModelError>> = RefCell::new(None);
    let xi_star = |tau: f64| -> f64 {
        let attempt = (|| -> Result<f64, ModelError> {
            let ctx = DetectionContext::new(geometry, &params.with_tau(tau))?;
            match case {
                CsiCase::Case1 => min_avg_error_case1(&ctx),
                CsiCase::Case2 => {
                    let (xi, mu) = min_avg_error_case2_warm(&ctx, *warm_mu.borrow())?;
                    *warm_mu.borrow_mut() = Some(mu);
                    Ok(xi)
                }
            }
        })();
        match attempt {
            Ok(v) => v,
            Err(e) => {
                error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let take_error = || error.borrow_mut().take();

    // Starting threshold scaled so the likeliest helper selects with
    // probability ~1e-6.
    let d_max = (0..geometry.n_helpers())
        .map(|k| geometry.dist_jr(k))
        .fold(0.0_f64, f64::max);
    let mut tau_lo = 1e-6 / (d_max.powf(geometry.alpha) * params.sigma_r2_w);
    let mut f_lo = xi_star(tau_lo) - target;
    if let Some(e) = take_error() {
        return Err(e);
    }
    while f_lo >= 0.0 {
        tau_lo *= 0.5;
        if tau_lo < 1e-30 {
            // Constraint satisfied arbitrarily close to τ = 0.
            return Ok(TauSolution {
                tau_star: tau_lo,
                xi_at_star: f_lo + target,
            });
        }
        f_lo = xi_star(tau_lo) - target;
        if let Some(e) = take_error() {
            return Err(e);
        }
    }

    let mut tau_hi = tau_lo;
    let mut bracketed = false;
    for _ in 0..60 {
        tau_hi *= 2.0;
        let f_hi = xi_star(tau_hi) - target;
        if let Some(e) = take_error() {
            return Err(e);
        }
        if f_hi >= 0.0 {
            bracketed = true;
            break;
        }
        tau_lo = tau_hi;
    }
    if !bracketed {
        return Err(ModelError::Infeasible { xi_limit, target });
    }

    let tol = ToleranceSpec::new(0.5 * CONSTRAINT_TOL, 1e-12, 200);
    let tau_star = bisect_root(|tau| xi_star(tau) - target, tau_lo, tau_hi, &tol)
        .map_err(ModelError::Numerics)?;
    if let Some(e) = take_error() {
        return Err(e);
    }

    // Verify against the canonical (cold) minimizer; if the warm-started map
    // drifted into a wrong basin, redo the bisection cold.
    let xi_final = min_avg_error_star(geometry, &params.with_tau(tau_star), case)?;
    if (xi_final - target).abs() <= CONSTRAINT_TOL {
        return Ok(TauSolution {
            tau_star,
            xi_at_star: xi_final,
        });
    }
    *warm_mu.borrow_mut() = None;
    let cold = |tau: f64| -> f64 {
        match min_avg_error_star(geometry, &params.with_tau(tau), case) {
            Ok(v) => v - target,
            Err(e) => {
                error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let tau_star = bisect_root(cold, tau_lo, tau_hi, &tol).map_err(ModelError::Numerics)?;
    if let Some(e) = take_error() {
        return Err(e);
    }
    let xi_at_star = min_avg_error_star(geometry, &params.with_tau(tau_star), case)?;
    Ok(TauSolution {
        tau_star,
        xi_at_star,
    })
}

/// Smallest selection threshold satisfying the covertness constraint:
/// ξ̄ι*(τ*) = 1 − ε. Errors with [`ModelError::Infeasible`] when even the
/// all-jammers limit falls short of the budget.
pub fn optimal_tau(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    epsilon: f64,
    case: CsiCase,
) -> Result<f64, ModelError> {
    solve_optimal_tau(geometry, params, epsilon, case).map(|s| s.tau_star)
}

/// Rate maximizing Ω(R) = R(1 − δ(R)) at a fixed selection threshold.
/// Returns `(R*, Ω*)`.
pub fn optimal_rate(ctx: &OutageContext, tau: f64) -> (f64, f64) {
    // Upper end of the search: the smallest rate driving δ to within 1e-6
    // of certain outage.
    let mut rate_hi = 1.0;
    for _ in 0..60 {
        if outage_probability(ctx, rate_hi, tau) >= 1.0 - 1e-6 {
            break;
        }
        rate_hi *= 2.0;
    }

    // Coarse log pre-scan guards against numerically flat stretches before
    // the golden refinement.
    let scan = log_spaced(rate_hi * 1e-3, rate_hi, 32);
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &r) in scan.iter().enumerate() {
        let omega = r * (1.0 - outage_probability(ctx, r, tau));
        if omega > best {
            best = omega;
            best_i = i;
        }
    }
    let a = scan[best_i.saturating_sub(1)].ln();
    let b = scan[(best_i + 1).min(scan.len() - 1)].ln();
    let (u, neg) = golden_min(
        |u: f64| {
            let r = u.exp();
            -(r * (1.0 - outage_probability(ctx, r, tau)))
        },
        a,
        b,
        &ToleranceSpec::new(1e-10, 1e-10, 200),
    );
    if -neg >= best {
        (u.exp(), -neg)
    } else {
        (scan[best_i], best)
    }
}

/// Joint design: τ* from the covertness constraint, then R* at that
/// threshold. Exact because ξ̄ does not depend on the rate.
pub fn maximize_throughput(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    epsilon: f64,
    case: CsiCase,
) -> Result<OptimizationResult, ModelError> {
    let sol = solve_optimal_tau(geometry, params, epsilon, case)?;
    let outage_ctx = OutageContext::new(geometry, params)?;
    let (rate_star, omega_star) = optimal_rate(&outage_ctx, sol.tau_star);
    Ok(OptimizationResult {
        tau_star: sol.tau_star,
        rate_star,
        omega_star,
        xi_bar_at_tau_star: sol.xi_at_star,
        feasible: true,
    })
}

/// Smallest helper count (prefix of the given geometry's helper sequence)
/// for which the covertness constraint is feasible at jamming power `pj_w`,
/// under the case-2 warden model. Mirrors [`optimal_tau`]'s feasibility
/// test: the τ→∞ ceiling must reach 1 − ε.
pub fn min_helpers(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    epsilon: f64,
    pj_w: f64,
    n_max: usize,
) -> Result<usize, ModelError> {
    assert!(n_max <= geometry.n_helpers());
    let target = 1.0 - epsilon;
    let mut probe = *params;
    probe.pj_w = pj_w;
    let mut last_limit = 0.0;
    for n in 1..=n_max {
        let g = geometry.truncated(n);
        last_limit = limit_star(&g, &probe, CsiCase::Case2)?;
        if last_limit >= target {
            return Ok(n);
        }
    }
    Err(ModelError::Infeasible {
        xi_limit: last_limit,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dbm_to_watts, generate_geometry};
    use crate::outage::covert_throughput;

    fn params(tau: f64) -> SystemParams {
        SystemParams {
            pt_w: 1e-2,
            pj_w: 1e-2,
            sigma_r2_w: 1e-15,
            sigma_w2_w: 1e-15,
            tau,
            rate_r: 1.0,
            epsilon: 0.1,
        }
    }

    #[test]
    fn fixed_point_self_consistency() {
        let g = generate_geometry(11, 4, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(50.0);
        let xi0 = min_avg_error_star(&g, &p, CsiCase::Case2).unwrap();
        let eps = 1.0 - xi0;
        let tau = optimal_tau(&g, &p, eps, CsiCase::Case2).unwrap();
        let xi_at = min_avg_error_star(&g, &p.with_tau(tau), CsiCase::Case2).unwrap();
        assert!((xi_at - xi0).abs() <= CONSTRAINT_TOL, "{xi_at} vs {xi0}");
        assert!(tau > 5.0 && tau < 500.0, "tau = {tau}");
    }

    #[test]
    fn nearly_vacuous_constraint_gives_tiny_tau() {
        let g = generate_geometry(11, 4, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(1.0);
        let tau = optimal_tau(&g, &p, 0.999, CsiCase::Case2).unwrap();
        assert!(tau < 1.0, "tau = {tau}");
        let xi_at = min_avg_error_star(&g, &p.with_tau(tau), CsiCase::Case2).unwrap();
        assert!((xi_at - 0.001).abs() <= CONSTRAINT_TOL);
    }

    #[test]
    fn constraint_is_active_at_optimum() {
        for (seed, n, eps) in [(2u64, 3usize, 0.1f64), (5, 5, 0.2), (9, 6, 0.05)] {
            let g = generate_geometry(seed, n, 1000.0, 1200.0, 0.5, 4.0).unwrap();
            let p = params(1.0);
            let result = maximize_throughput(&g, &p, eps, CsiCase::Case2).unwrap();
            assert!(
                (result.xi_bar_at_tau_star - (1.0 - eps)).abs() <= CONSTRAINT_TOL,
                "seed {seed}: xi at tau* = {}",
                result.xi_bar_at_tau_star
            );
            assert!(result.feasible);
            // Ω* must be the throughput the reported pair actually achieves.
            let octx = OutageContext::new(&g, &p).unwrap();
            let check = covert_throughput(&octx, result.rate_star, result.tau_star);
            assert!((check.omega - result.omega_star).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_star_shrinks_with_more_helpers_and_power() {
        let g_full = generate_geometry(4, 8, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(1.0);
        let mut prev = f64::INFINITY;
        for n in [2usize, 4, 8] {
            let g = g_full.truncated(n);
            match optimal_tau(&g, &p, 0.1, CsiCase::Case2) {
                Ok(tau) => {
                    assert!(tau <= prev * (1.0 + 1e-6), "n={n}: tau {tau} > prev {prev}");
                    prev = tau;
                }
                Err(ModelError::Infeasible { .. }) => {
                    // Small prefixes may be infeasible; they must come first.
                    assert!(prev.is_infinite());
                }
                Err(e) => panic!("{e}"),
            }
        }

        let mut prev = f64::INFINITY;
        for pj_dbm in [5.0, 10.0, 15.0] {
            let mut p = params(1.0);
            p.pj_w = dbm_to_watts(pj_dbm);
            match optimal_tau(&g_full, &p, 0.1, CsiCase::Case2) {
                Ok(tau) => {
                    assert!(tau <= prev * (1.0 + 1e-6), "pj={pj_dbm}: {tau} > {prev}");
                    prev = tau;
                }
                Err(ModelError::Infeasible { .. }) => {
                    // Weak jamming may be infeasible; only at the low end.
                    assert!(prev.is_infinite());
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn infeasible_when_jamming_cannot_reach_budget() {
        let g = generate_geometry(3, 1, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let mut p = params(1.0);
        p.pj_w = 1e-9;
        match optimal_tau(&g, &p, 0.001, CsiCase::Case2) {
            Err(ModelError::Infeasible { xi_limit, target }) => {
                assert!(xi_limit < target);
            }
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn rate_optimizer_matches_grid_oracle() {
        for (seed, n) in [(6u64, 0usize), (7, 3), (8, 6)] {
            let g = generate_geometry(seed, n, 1000.0, 1200.0, 0.5, 4.0).unwrap();
            let ctx = OutageContext::new(&g, &params(1.0)).unwrap();
            let tau = 100.0;
            let (rate_star, omega_star) = optimal_rate(&ctx, tau);

            let mut grid_best = 0.0_f64;
            for i in 1..=10_000 {
                let r = 16.0 * i as f64 / 10_000.0;
                let omega = r * (1.0 - outage_probability(&ctx, r, tau));
                grid_best = grid_best.max(omega);
            }
            assert!(
                omega_star >= grid_best * (1.0 - 1e-6),
                "n={n}: Ω*={omega_star} below grid {grid_best}"
            );
            // Local optimality probes.
            let omega_at = |r: f64| r * (1.0 - outage_probability(&ctx, r, tau));
            assert!(omega_star >= omega_at(rate_star / 2.0));
            assert!(omega_star >= omega_at(rate_star * 2.0));
        }
    }

    #[test]
    fn throughput_rises_then_falls_along_rate() {
        let g = generate_geometry(12, 5, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let ctx = OutageContext::new(&g, &params(1.0)).unwrap();
        let omegas: Vec<f64> = (1..=120)
            .map(|i| {
                let r = 12.0 * i as f64 / 120.0;
                r * (1.0 - outage_probability(&ctx, r, 200.0))
            })
            .collect();
        let peak = omegas
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        for i in 1..=peak {
            assert!(omegas[i] >= omegas[i - 1] - 1e-12);
        }
        for i in peak + 1..omegas.len() {
            assert!(omegas[i] <= omegas[i - 1] + 1e-12);
        }
    }

    #[test]
    fn min_helpers_orderings() {
        let g = generate_geometry(20, 12, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(1.0);
        // Nearly vacuous constraint: one helper suffices.
        let n_easy = min_helpers(&g, &p, 0.99, dbm_to_watts(10.0), 12).unwrap();
        assert!(n_easy <= 2, "n_easy = {n_easy}");
        // Stronger jamming can only lower the required helper count.
        let mut prev = usize::MAX;
        for pj_dbm in [2.0, 5.0, 10.0] {
            let n = min_helpers(&g, &p, 0.1, dbm_to_watts(pj_dbm), 12).unwrap_or(usize::MAX);
            assert!(n <= prev, "pj={pj_dbm}: N_min {n} > {prev}");
            prev = n;
        }
    }
}
