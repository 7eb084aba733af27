//! Seeded Monte-Carlo oracle: draws Rayleigh fadings, applies the selection
//! rule, forms the radiometer statistic (finite observation count or its
//! infinite-observation limit), and estimates detection and outage
//! probabilities with standard errors.
//!
//! Every trial runs on its own counter-derived RNG stream, so estimates are
//! bit-identical for a given `(seed, config)` regardless of how trials are
//! scheduled across threads. H0 and H1 share each trial's jammer selection
//! and fading draws (common random numbers), which keeps the detection-error
//! estimate a plain binomial proportion in the asymptotic mode.

use crate::geometry::{NetworkGeometry, SystemParams};
use crate::numerics::reg_gamma_lower;
use crate::subsets::SubsetModel;
use crate::util::map_indexed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

const TRIAL_CHUNK: u64 = 8192;

/// Radiometer observation horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum McHorizon {
    /// Average of `n` per-use received powers.
    Finite(u32),
    /// The n→∞ limit: the statistic equals the slot's true received power.
    Asymptotic,
}

/// Simulation control. Identical configs give bit-identical estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub trials: u64,
    pub horizon: McHorizon,
}

impl McConfig {
    pub fn asymptotic(seed: u64, trials: u64) -> Self {
        McConfig {
            seed,
            trials,
            horizon: McHorizon::Asymptotic,
        }
    }
}

/// A probability estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
}

impl McEstimate {
    fn binomial(count: u64, trials: u64) -> Self {
        let v = count as f64 / trials as f64;
        McEstimate {
            value: v,
            std_err: (v * (1.0 - v) / trials as f64).sqrt(),
        }
    }
}

/// Detection-side estimates from one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionSim {
    pub p_fa: McEstimate,
    pub p_md: McEstimate,
    /// Average detection error ξ̄ = P̂_FA + P̂_MD; the detection channel is
    /// redrawn every trial, so this estimates the fading-averaged error.
    pub xi_bar: McEstimate,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Unit-mean exponential (Rayleigh power): −ln(U).
#[inline]
fn exp_draw(rng: &mut ChaCha12Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

/// A standard-normal pair via Box–Muller.
#[inline]
fn normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let u1 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let u2 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    (r * c, r * s)
}

/// Average of `n` per-use powers of a CN(0, variance) observation, each use
/// built from two independent normals (real/imaginary parts).
fn finite_horizon_power(rng: &mut ChaCha12Rng, variance: f64, n: u32) -> f64 {
    let mut acc = 0.0;
    for _ in 0..n {
        let (re, im) = normal_pair(rng);
        acc += re * re + im * im;
    }
    variance * acc / (2.0 * n as f64)
}

struct DetectionScene {
    gain_tw: f64,
    jam_gain_r: Vec<f64>,
    jam_gain_w: Vec<f64>,
}

impl DetectionScene {
    fn new(geometry: &NetworkGeometry) -> Self {
        DetectionScene {
            gain_tw: geometry.gain_tw(),
            jam_gain_r: geometry.jam_gains_rx(),
            jam_gain_w: geometry.jam_gains_warden(),
        }
    }
}

/// Estimate `P_FA`, `P_MD`, and ξ̄ at detection threshold `mu`.
///
/// Per trial: draw all channel powers as Exp(1), select jammers whose
/// receiver-side SNR gain falls below τ, form the radiometer statistic under
/// both hypotheses (decision D1 on `T_w ≥ μ`), and tally errors.
pub fn simulate_detection(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    mu: f64,
    cfg: &McConfig,
) -> DetectionSim {
    assert!(mu > 0.0 && cfg.trials >= 1);
    let scene = DetectionScene::new(geometry);
    let p = *params;
    let horizon = cfg.horizon;
    let n_chunks = cfg.trials.div_ceil(TRIAL_CHUNK);

    let counts: Vec<(u64, u64, u64)> = map_indexed(n_chunks as usize, |chunk| {
        let start = chunk as u64 * TRIAL_CHUNK;
        let end = (start + TRIAL_CHUNK).min(cfg.trials);
        let (mut fa, mut md, mut both) = (0u64, 0u64, 0u64);
        for trial in start..end {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut sigma_j2 = 0.0;
            for k in 0..scene.jam_gain_r.len() {
                let h2_r = exp_draw(&mut rng);
                if h2_r * scene.jam_gain_r[k] < p.tau * p.sigma_r2_w {
                    sigma_j2 += p.pj_w * exp_draw(&mut rng) * scene.jam_gain_w[k];
                }
            }
            let sigma_c2 = p.pt_w * exp_draw(&mut rng) * scene.gain_tw;
            let (t0, t1) = match horizon {
                McHorizon::Asymptotic => {
                    (sigma_j2 + p.sigma_w2_w, sigma_c2 + sigma_j2 + p.sigma_w2_w)
                }
                McHorizon::Finite(n) => (
                    finite_horizon_power(&mut rng, sigma_j2 + p.sigma_w2_w, n),
                    finite_horizon_power(&mut rng, sigma_c2 + sigma_j2 + p.sigma_w2_w, n),
                ),
            };
            let is_fa = t0 >= mu;
            let is_md = t1 < mu;
            fa += is_fa as u64;
            md += is_md as u64;
            both += (is_fa && is_md) as u64;
        }
        (fa, md, both)
    });

    let (fa, md, both) = counts
        .iter()
        .fold((0, 0, 0), |(a, b, c), (x, y, z)| (a + x, b + y, c + z));
    let trials = cfg.trials;
    let p_fa = McEstimate::binomial(fa, trials);
    let p_md = McEstimate::binomial(md, trials);
    // Exact variance of the per-trial error indicator sum; `both` is zero in
    // the asymptotic mode (the H1 statistic dominates H0's), recovering the
    // plain binomial error.
    let xi = (fa + md) as f64 / trials as f64;
    let second_moment = (fa + md + 2 * both) as f64 / trials as f64;
    let var = (second_moment - xi * xi).max(0.0);
    DetectionSim {
        p_fa,
        p_md,
        xi_bar: McEstimate {
            value: xi,
            std_err: (var / trials as f64).sqrt(),
        },
    }
}

/// Estimate the transmission outage probability at `rate`.
///
/// The same receiver-side fading draw decides both a helper's selection and
/// the interference it contributes, reproducing the threshold-conditioned
/// coupling of the analytic form.
pub fn simulate_outage(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    rate: f64,
    cfg: &McConfig,
) -> McEstimate {
    assert!(rate >= 0.0 && cfg.trials >= 1);
    let gain_tr = geometry.gain_tr();
    let jam_gain_r = geometry.jam_gains_rx();
    let p = *params;
    let sinr_floor = rate.exp2() - 1.0;
    let n_chunks = cfg.trials.div_ceil(TRIAL_CHUNK);

    let counts: Vec<u64> = map_indexed(n_chunks as usize, |chunk| {
        let start = chunk as u64 * TRIAL_CHUNK;
        let end = (start + TRIAL_CHUNK).min(cfg.trials);
        let mut outages = 0u64;
        for trial in start..end {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut interference = 0.0;
            for &g in &jam_gain_r {
                let h2 = exp_draw(&mut rng);
                if h2 * g < p.tau * p.sigma_r2_w {
                    interference += p.pj_w * h2 * g;
                }
            }
            let h2_tr = exp_draw(&mut rng);
            let sinr = p.pt_w * h2_tr * gain_tr / (interference + p.sigma_r2_w);
            outages += (sinr < sinr_floor) as u64;
        }
        outages
    });
    McEstimate::binomial(counts.iter().sum(), cfg.trials)
}

/// Kolmogorov–Smirnov distance between the empirical law of the subset's
/// aggregate fading-weighted gain and its fitted gamma approximation.
pub fn empirical_subset_power_ks(
    geometry: &NetworkGeometry,
    subset: &SubsetModel,
    trials: u64,
    seed: u64,
) -> f64 {
    let (shape, scale) = subset
        .gamma_params()
        .expect("KS audit needs a non-empty subset");
    let gains: Vec<f64> = (0..geometry.n_helpers())
        .filter(|k| subset.members & (1 << k) != 0)
        .map(|k| geometry.dist_jw(k).powf(-geometry.alpha))
        .collect();

    let mut samples: Vec<f64> = map_indexed(trials as usize, |t| {
        let mut rng = trial_rng(seed, t as u64);
        gains.iter().map(|g| g * exp_draw(&mut rng)).sum()
    });
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let n = samples.len() as f64;
    let mut d = 0.0_f64;
    for (i, x) in samples.iter().enumerate() {
        let f = reg_gamma_lower(shape, x / scale).expect("gamma CDF on valid fit");
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((f - hi).abs());
    }
    d
}

/// Detection-error estimates across observation horizons
/// n ∈ {10, 100, 1000, 10000} plus the asymptotic limit, sharing the seed so
/// rows are common-random-number coupled.
pub fn finite_n_convergence(
    geometry: &NetworkGeometry,
    params: &SystemParams,
    mu: f64,
    cfg: &McConfig,
) -> Vec<(McHorizon, McEstimate)> {
    let horizons = [
        McHorizon::Finite(10),
        McHorizon::Finite(100),
        McHorizon::Finite(1_000),
        McHorizon::Finite(10_000),
        McHorizon::Asymptotic,
    ];
    horizons
        .iter()
        .map(|&horizon| {
            let run = McConfig { horizon, ..(*cfg) };
            (
                horizon,
                simulate_detection(geometry, params, mu, &run).xi_bar,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::{avg_detection_error, DetectionContext};
    use crate::geometry::generate_geometry;
    use crate::outage::{outage_probability, OutageContext};
    use crate::subsets::enumerate_subsets;

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
    fn below_noise_floor_always_alarms() {
        let g = generate_geometry(1, 4, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(100.0);
        let cfg = McConfig::asymptotic(9, 2_000);
        let sim = simulate_detection(&g, &p, 0.5 * p.sigma_w2_w, &cfg);
        assert_eq!(sim.p_fa.value, 1.0);
        assert_eq!(sim.p_fa.std_err, 0.0);
    }

    #[test]
    fn no_jammers_no_false_alarms() {
        let g = generate_geometry(1, 4, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(0.0);
        let cfg = McConfig::asymptotic(9, 2_000);
        let sim = simulate_detection(&g, &p, 1.0001 * p.sigma_w2_w, &cfg);
        assert_eq!(sim.p_fa.value, 0.0);
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let g = generate_geometry(2, 6, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(50.0);
        let cfg = McConfig::asymptotic(33, 20_000);
        let a = simulate_detection(&g, &p, 2e-15, &cfg);
        let b = simulate_detection(&g, &p, 2e-15, &cfg);
        assert_eq!(a, b);
        let c = simulate_detection(&g, &p, 2e-15, &McConfig::asymptotic(34, 20_000));
        assert_ne!(a.xi_bar.value, c.xi_bar.value);

        let oa = simulate_outage(&g, &p, 1.0, &cfg);
        let ob = simulate_outage(&g, &p, 1.0, &cfg);
        assert_eq!(oa, ob);
    }

    #[test]
    fn outage_estimate_matches_analytic() {
        let g = generate_geometry(12, 6, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(200.0);
        let ctx = OutageContext::new(&g, &p).unwrap();
        let cfg = McConfig::asymptotic(7, 200_000);
        for rate in [0.5, 1.0, 2.0] {
            let analytic = outage_probability(&ctx, rate, p.tau);
            let est = simulate_outage(&g, &p, rate, &cfg);
            let se = (analytic * (1.0 - analytic) / cfg.trials as f64).sqrt();
            assert!(
                (est.value - analytic).abs() <= 3.0 * se + 1e-9,
                "rate={rate}: mc {} vs analytic {analytic} (se {se})",
                est.value
            );
        }
    }

    #[test]
    fn outage_estimate_at_tau_zero_is_lambda_complement() {
        let g = generate_geometry(3, 8, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(0.0);
        let ctx = OutageContext::new(&g, &p).unwrap();
        let cfg = McConfig::asymptotic(5, 200_000);
        let est = simulate_outage(&g, &p, 1.0, &cfg);
        let expected = 1.0 - ctx.lambda_of(1.0);
        assert!((est.value - expected).abs() <= 3.0 * est.std_err.max(1e-4));
    }

    #[test]
    fn detection_estimate_matches_analytic_average() {
        let g = generate_geometry(21, 5, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(80.0);
        let ctx = DetectionContext::new(&g, &p).unwrap();
        let mu = p.sigma_w2_w + 4e-15;
        let analytic = avg_detection_error(&ctx, mu).unwrap();
        let cfg = McConfig::asymptotic(13, 200_000);
        let sim = simulate_detection(&g, &p, mu, &cfg);
        let tol = (3.0 * sim.xi_bar.std_err).max(0.02);
        assert!(
            (sim.xi_bar.value - analytic).abs() <= tol,
            "mc {} vs analytic {analytic} (tol {tol})",
            sim.xi_bar.value
        );
    }

    #[test]
    fn ks_exact_laws_are_tight() {
        let g = generate_geometry(40, 8, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(100.0);
        let ensemble = enumerate_subsets(&g, &p).unwrap();
        // Singleton subset: the gamma fit is exactly exponential.
        let singleton = &ensemble.subsets[0b1];
        let d = empirical_subset_power_ks(&g, singleton, 1_000_000, 3);
        assert!(d <= 0.003, "singleton KS = {d}");
    }

    #[test]
    fn ks_equal_gain_pair_is_exact_erlang() {
        // Two helpers forced to identical warden distances ⇒ Erlang-2.
        let mut g = generate_geometry(40, 2, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        g.helpers[1] = g.helpers[0];
        let ensemble = enumerate_subsets(&g, &params(100.0)).unwrap();
        let pair = &ensemble.subsets[0b11];
        assert!((pair.shape_v - 2.0).abs() < 1e-12);
        let d = empirical_subset_power_ks(&g, pair, 1_000_000, 4);
        assert!(d <= 0.003, "equal-gain KS = {d}");
    }

    #[test]
    fn ks_mixed_subset_within_budget() {
        // A moderately mixed size-3 subset sits well inside the 0.02 audit
        // budget. (The fit's worst case over arbitrary gain spreads is
        // larger; the acceptance audit measures that honestly.)
        let g = generate_geometry(7, 8, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let ensemble = enumerate_subsets(&g, &params(100.0)).unwrap();
        let mixed = &ensemble.subsets[0b1011];
        let d = empirical_subset_power_ks(&g, mixed, 1_000_000, 5);
        assert!(d <= 0.02, "mixed-subset KS = {d}");
    }

    #[test]
    fn finite_horizon_converges_to_asymptotic() {
        let g = generate_geometry(6, 4, 1000.0, 1200.0, 0.5, 4.0).unwrap();
        let p = params(60.0);
        let mu = p.sigma_w2_w + 3e-15;
        let cfg = McConfig::asymptotic(19, 5_000);
        let table = finite_n_convergence(&g, &p, mu, &cfg);
        assert_eq!(table.len(), 5);
        for (_, est) in &table {
            assert!((0.0..=1.0).contains(&est.value));
        }
        let asym = table.last().unwrap().1.value;
        let n10k = table[3].1.value;
        assert!(
            (n10k - asym).abs() <= 0.02,
            "n=10^4 row {n10k} vs asymptotic {asym}"
        );
        // The asymptotic row is the plain asymptotic simulation.
        let direct = simulate_detection(&g, &p, mu, &cfg).xi_bar;
        assert_eq!(table.last().unwrap().1, direct);
    }
}
