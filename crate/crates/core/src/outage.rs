//! Receiver-side reliability: transmission outage probability under
//! threshold-conditioned jammer channels, its τ limits, and covert
//! throughput.
//!
//! An outage occurs when `log₂(1 + Λ_r)` falls below the rate `R`, with
//! `Λ_r = P_t |h_{t,r}|² d_{t,r}^{−α} / (Σ_sel P_j |h_{j_k,r}|² d_{j_k,r}^{−α}
//! + σ_r²)`. Selection couples each jammer's interference to its own channel
//! (selected ⇔ the gain is *below* the threshold), so the per-jammer factor
//! uses the truncated-exponential conditional law. The subset sum factorizes
//! exactly into one product over helpers:
//!
//! `δ = 1 − λ · Π_k [(1 − p_k) + p_k f_k]`
//!
//! which is the primary evaluation path; the explicit subset enumeration is
//! kept as a cross-check.

use crate::error::ModelError;
use crate::geometry::{NetworkGeometry, SystemParams};
use crate::subsets::MAX_HELPERS;
use serde::Serialize;

/// Reliability/throughput figures at one `(τ, R)` operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThroughputReport {
    /// Transmission outage probability δ.
    pub delta: f64,
    /// Covert throughput Ω = R (1 − δ), bits/s/Hz.
    pub omega: f64,
    pub tau_used: f64,
    pub rate_used: f64,
}

/// Immutable receiver-side inputs: geometry-derived gains plus system
/// parameters. The selection threshold is passed per call so rate/τ sweeps
/// reuse one context.
#[derive(Debug, Clone)]
pub struct OutageContext {
    pub params: SystemParams,
    /// d_{t,r}^{−α}.
    pub gain_tr: f64,
    /// d_{t,r}^{α}.
    dist_tr_pow: f64,
    /// Per-helper d_{j_k,r}^{−α}.
    jam_gains_r: Vec<f64>,
    /// Per-helper d_{j_k,r}^{α}.
    jam_dist_pow: Vec<f64>,
}

impl OutageContext {
    pub fn new(geometry: &NetworkGeometry, params: &SystemParams) -> Result<Self, ModelError> {
        params.validate()?;
        if geometry.n_helpers() > MAX_HELPERS {
            return Err(crate::subsets::SubsetError::CapacityExceeded(geometry.n_helpers()).into());
        }
        let jam_gains_r = geometry.jam_gains_rx();
        let jam_dist_pow = (0..geometry.n_helpers())
            .map(|k| geometry.dist_jr(k).powf(geometry.alpha))
            .collect();
        Ok(OutageContext {
            params: *params,
            gain_tr: geometry.gain_tr(),
            dist_tr_pow: geometry.dist_tr().powf(geometry.alpha),
            jam_gains_r,
            jam_dist_pow,
        })
    }

    pub fn n_helpers(&self) -> usize {
        self.jam_gains_r.len()
    }

    /// φ = (2^R − 1) / P_t.
    pub fn varphi_of(&self, rate: f64) -> f64 {
        (rate.exp2() - 1.0) / self.params.pt_w
    }

    /// λ = e^{−d_{t,r}^α φ σ_r²}, the no-interference success probability.
    pub fn lambda_of(&self, rate: f64) -> f64 {
        (-self.dist_tr_pow * self.varphi_of(rate) * self.params.sigma_r2_w).exp()
    }

    /// Conditional interference factor for helper `k`:
    /// `E[e^{−φ P_j |h|² d_{j_k,r}^{−α} d_{t,r}^α} | selected]`, in (0, 1].
    ///
    /// Written with `expm1` so tiny `τ` cannot cancel catastrophically.
    fn cond_factor(&self, k: usize, varphi: f64, tau: f64) -> f64 {
        let a = varphi * self.params.pj_w * self.jam_gains_r[k] * self.dist_tr_pow;
        let c = self.jam_dist_pow[k] * self.params.sigma_r2_w * tau;
        (-(1.0 + a) * c).exp_m1() / ((1.0 + a) * (-c).exp_m1())
    }

    fn selection_prob(&self, k: usize, tau: f64) -> f64 {
        -(-self.jam_dist_pow[k] * self.params.sigma_r2_w * tau).exp_m1()
    }
}

/// Transmission outage probability δ at `(rate, tau)`, via the exact
/// factorized product. Nondecreasing in rate, τ, and P_j.
pub fn outage_probability(ctx: &OutageContext, rate: f64, tau: f64) -> f64 {
    debug_assert!(rate >= 0.0 && tau >= 0.0);
    let lambda = ctx.lambda_of(rate);
    if tau == 0.0 {
        // No helper is ever selected; the conditional factors are 0/0 here
        // and the limit is the jammer-free outage.
        return 1.0 - lambda;
    }
    let varphi = ctx.varphi_of(rate);
    let mut prod = lambda;
    for k in 0..ctx.n_helpers() {
        let p = ctx.selection_prob(k, tau);
        if p == 0.0 {
            continue;
        }
        prod *= (1.0 - p) + p * ctx.cond_factor(k, varphi, tau);
    }
    (1.0 - prod).clamp(0.0, 1.0)
}

/// δ by explicit enumeration of all jammer subsets (the sum the factorized
/// product collapses). Exponential in helper count; kept as a cross-check of
/// [`outage_probability`].
pub fn outage_probability_enumerated(ctx: &OutageContext, rate: f64, tau: f64) -> f64 {
    debug_assert!(ctx.n_helpers() <= MAX_HELPERS);
    let lambda = ctx.lambda_of(rate);
    if tau == 0.0 {
        return 1.0 - lambda;
    }
    let varphi = ctx.varphi_of(rate);
    let n = ctx.n_helpers();
    let probs: Vec<f64> = (0..n).map(|k| ctx.selection_prob(k, tau)).collect();
    let factors: Vec<f64> = (0..n)
        .map(|k| {
            if probs[k] == 0.0 {
                1.0
            } else {
                ctx.cond_factor(k, varphi, tau)
            }
        })
        .collect();
    let mut delta = 0.0;
    for s in 0..(1usize << n) {
        let mut p_subset = 1.0;
        let mut cond = 1.0;
        for k in 0..n {
            if s & (1 << k) != 0 {
                p_subset *= probs[k];
                cond *= factors[k];
            } else {
                p_subset *= 1.0 - probs[k];
            }
        }
        delta += p_subset * (1.0 - lambda * cond);
    }
    delta.clamp(0.0, 1.0)
}

/// δ in the τ→∞ limit where every helper jams:
/// `1 − λ Π_k 1 / (φ P_j d_{j_k,r}^{−α} d_{t,r}^α + 1)`.
pub fn outage_limit_tau_inf(ctx: &OutageContext, rate: f64) -> f64 {
    let varphi = ctx.varphi_of(rate);
    let mut prod = ctx.lambda_of(rate);
    for k in 0..ctx.n_helpers() {
        prod /= varphi * ctx.params.pj_w * ctx.jam_gains_r[k] * ctx.dist_tr_pow + 1.0;
    }
    (1.0 - prod).clamp(0.0, 1.0)
}

/// Covert throughput Ω = R (1 − δ) at `(rate, tau)`.
pub fn covert_throughput(ctx: &OutageContext, rate: f64, tau: f64) -> ThroughputReport {
    let delta = outage_probability(ctx, rate, tau);
    ThroughputReport {
        delta,
        omega: rate * (1.0 - delta),
        tau_used: tau,
        rate_used: rate,
    }
}
