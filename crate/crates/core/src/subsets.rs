//! Jammer subset enumeration, occurrence probabilities, and gamma
//! moment-matching of each subset's aggregate warden-side interference.
//!
//! With `N` helpers activated independently (helper `k` with probability
//! `p_k`), a subset `φ` occurs with probability `Π_{q∈φ} p_q · Π_{l∉φ}
//! (1−p_l)`. The aggregate fading-weighted gain seen by the warden,
//! `X = Σ_{q∈φ} |h_q|² g_q` with unit-mean exponential `|h_q|²`, is
//! approximated by a gamma law whose shape/scale match its first two
//! moments. Shapes and scales depend only on the warden-side gains, never on
//! the selection threshold, so they are computed once per geometry.

use crate::geometry::{NetworkGeometry, SystemParams};
use serde::Serialize;

/// Exact enumeration is capped at 2^20 subsets.
pub const MAX_HELPERS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SubsetError {
    #[error("exact subset enumeration supports at most {MAX_HELPERS} helpers, got {0}")]
    CapacityExceeded(usize),
    #[error("gamma moment matching needs a non-empty list of positive gains")]
    EmptyGains,
    #[error("gains must be strictly positive, got {0}")]
    NonPositiveGain(f64),
}

/// One jammer subset: membership bit-set, occurrence probability, and the
/// moment-matched gamma parameters of its aggregate warden-side gain.
///
/// For the empty subset the gamma parameters are meaningless and stored as
/// NaN; use [`SubsetModel::gamma_params`] to read them safely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetModel {
    /// Bit `k` set ⇔ helper `k` is in the subset.
    pub members: u32,
    pub probability: f64,
    pub shape_v: f64,
    pub scale_w: f64,
}

impl SubsetModel {
    pub fn cardinality(&self) -> u32 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    /// `(shape, scale)` of the fitted gamma law; `None` for the empty subset.
    pub fn gamma_params(&self) -> Option<(f64, f64)> {
        if self.is_empty() {
            None
        } else {
            Some((self.shape_v, self.scale_w))
        }
    }
}

/// All `2^N` subsets in bit-set order plus the per-helper selection
/// probabilities they were built from. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetEnsemble {
    pub subsets: Vec<SubsetModel>,
    pub selection_probs: Vec<f64>,
}

impl SubsetEnsemble {
    pub fn n_helpers(&self) -> usize {
        self.selection_probs.len()
    }

    /// Probability that no jammer is active.
    pub fn empty_probability(&self) -> f64 {
        self.subsets[0].probability
    }

    /// Build directly from per-helper selection probabilities and
    /// warden-side power gains (both indexed by helper).
    pub fn from_parts(
        selection_probs: &[f64],
        warden_gains: &[f64],
    ) -> Result<SubsetEnsemble, SubsetError> {
        assert_eq!(selection_probs.len(), warden_gains.len());
        let n = selection_probs.len();
        if n > MAX_HELPERS {
            return Err(SubsetError::CapacityExceeded(n));
        }
        for &g in warden_gains {
            if !(g > 0.0) {
                return Err(SubsetError::NonPositiveGain(g));
            }
        }

        let size = 1usize << n;
        let mut probability = vec![0.0_f64; size];
        let mut sum_g = vec![0.0_f64; size];
        let mut sum_g2 = vec![0.0_f64; size];
        probability[0] = 1.0;
        // Doubling construction: after pass k the first 2^{k+1} slots hold
        // exact products over helpers 0..=k. No divisions, so p_k = 0 or 1
        // are handled exactly.
        for k in 0..n {
            let bit = 1usize << k;
            let p = selection_probs[k];
            let g = warden_gains[k];
            for s in 0..bit {
                probability[s | bit] = probability[s] * p;
                sum_g[s | bit] = sum_g[s] + g;
                sum_g2[s | bit] = sum_g2[s] + g * g;
            }
            for item in probability.iter_mut().take(bit) {
                *item *= 1.0 - p;
            }
        }

        let subsets = (0..size)
            .map(|s| {
                let (shape_v, scale_w) = if s == 0 {
                    (f64::NAN, f64::NAN)
                } else {
                    (sum_g[s] * sum_g[s] / sum_g2[s], sum_g2[s] / sum_g[s])
                };
                SubsetModel {
                    members: s as u32,
                    probability: probability[s],
                    shape_v,
                    scale_w,
                }
            })
            .collect();

        Ok(SubsetEnsemble {
            subsets,
            selection_probs: selection_probs.to_vec(),
        })
    }
}

/// Probability that a helper at receiver distance `d_jr` is selected as a
/// jammer: `1 − exp(−d_jr^α σ_r² τ)`.
pub fn selection_probability(d_jr: f64, alpha: f64, sigma_r2: f64, tau: f64) -> f64 {
    debug_assert!(d_jr > 0.0 && tau >= 0.0);
    -(-d_jr.powf(alpha) * sigma_r2 * tau).exp_m1()
}

/// Moment-matched gamma parameters `(shape, scale)` for `Σ |h|² g` over the
/// given warden-side gains.
pub fn gamma_moments(member_gains: &[f64]) -> Result<(f64, f64), SubsetError> {
    if member_gains.is_empty() {
        return Err(SubsetError::EmptyGains);
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &g in member_gains {
        if !(g > 0.0) {
            return Err(SubsetError::NonPositiveGain(g));
        }
        sum += g;
        sum_sq += g * g;
    }
    Ok((sum * sum / sum_sq, sum_sq / sum))
}

/// Enumerate all jammer subsets for a geometry at the selection threshold in
/// `params`.
pub fn enumerate_subsets(
    geometry: &NetworkGeometry,
    params: &SystemParams,
) -> Result<SubsetEnsemble, SubsetError> {
    let n = geometry.n_helpers();
    if n > MAX_HELPERS {
        return Err(SubsetError::CapacityExceeded(n));
    }
    let probs: Vec<f64> = (0..n)
        .map(|k| {
            selection_probability(
                geometry.dist_jr(k),
                geometry.alpha,
                params.sigma_r2_w,
                params.tau,
            )
        })
        .collect();
    let gains = geometry.jam_gains_warden();
    SubsetEnsemble::from_parts(&probs, &gains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_geometry;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn selection_probability_endpoints() {
        assert_eq!(selection_probability(1000.0, 4.0, 1e-15, 0.0), 0.0);
        let p = selection_probability(1000.0, 4.0, 1e-15, 1e3);
        let expected = 1.0 - (-1.0_f64).exp();
        assert!((p - expected).abs() < 1e-12, "p = {p}");
        assert_eq!(selection_probability(1000.0, 4.0, 1e-15, 1e40), 1.0);
    }

    #[test]
    fn selection_probability_monotone_in_tau() {
        let mut prev = -1.0;
        for i in 0..200 {
            let tau = 10f64.powf(-6.0 + 0.06 * i as f64);
            let p = selection_probability(800.0, 4.0, 1e-15, tau);
            assert!(p >= prev);
            assert!((0.0..1.0).contains(&p) || p == 1.0);
            prev = p;
        }
    }

    #[test]
    fn fair_coin_subsets() {
        let e = SubsetEnsemble::from_parts(&[0.5, 0.5], &[1.0, 2.0]).unwrap();
        assert_eq!(e.subsets.len(), 4);
        for s in &e.subsets {
            assert!((s.probability - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn null_case_single_empty_subset() {
        let e = SubsetEnsemble::from_parts(&[], &[]).unwrap();
        assert_eq!(e.subsets.len(), 1);
        assert_eq!(e.subsets[0].probability, 1.0);
        assert!(e.subsets[0].gamma_params().is_none());
    }

    #[test]
    fn empty_probability_is_product_of_complements() {
        let e = SubsetEnsemble::from_parts(&[0.1, 0.2, 0.3], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(e.subsets.len(), 8);
        assert!((e.empty_probability() - 0.504).abs() < 1e-15);
        // And exactly the product, not merely close:
        assert_eq!(e.empty_probability(), 0.9 * 0.8 * 0.7);
    }

    #[test]
    fn probabilities_sum_to_one_random_ensembles() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.gen_range(1..=12);
            let probs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let gains: Vec<f64> = (0..n)
                .map(|_| 10f64.powf(rng.gen_range(-14.0..-6.0)))
                .collect();
            let e = SubsetEnsemble::from_parts(&probs, &gains).unwrap();
            let total: f64 = e.subsets.iter().map(|s| s.probability).sum();
            assert!((total - 1.0).abs() <= 1e-12, "n={n} total={total}");
        }
    }

    #[test]
    fn ensemble_from_geometry_sums_to_one() {
        let g = generate_geometry(5, 10, 1000.0, 1200.0, 0.7, 4.0).unwrap();
        let params = SystemParams {
            pt_w: 1e-2,
            pj_w: 1e-2,
            sigma_r2_w: 1e-15,
            sigma_w2_w: 1e-15,
            tau: 100.0,
            rate_r: 1.0,
            epsilon: 0.1,
        };
        let e = enumerate_subsets(&g, &params).unwrap();
        assert_eq!(e.subsets.len(), 1 << 10);
        let total: f64 = e.subsets.iter().map(|s| s.probability).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn gamma_moments_reference_values() {
        let (v, w) = gamma_moments(&[0.7]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!((w - 0.7).abs() < 1e-15);

        let (v, w) = gamma_moments(&[0.3, 0.3]).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!((w - 0.3).abs() < 1e-15);

        let (v, w) = gamma_moments(&[1.0, 3.0]).unwrap();
        assert!((v - 1.6).abs() < 1e-15);
        assert!((w - 2.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_moments_rejects_bad_input() {
        assert_eq!(gamma_moments(&[]), Err(SubsetError::EmptyGains));
        assert!(gamma_moments(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn moment_fidelity_and_shape_bounds() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(1..=8);
            let gains: Vec<f64> = (0..m)
                .map(|_| 10f64.powf(rng.gen_range(-14.0..-6.0)))
                .collect();
            let sum: f64 = gains.iter().sum();
            let sum_sq: f64 = gains.iter().map(|g| g * g).sum();
            let (v, w) = gamma_moments(&gains).unwrap();
            assert!(((v * w - sum) / sum).abs() <= 1e-12);
            assert!(((v * w * w - sum_sq) / sum_sq).abs() <= 1e-12);
            assert!(v >= 1.0 - 1e-12 && v <= m as f64 + 1e-12);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn capacity_cap_enforced() {
        let probs = vec![0.5; 21];
        let gains = vec![1.0; 21];
        assert_eq!(
            SubsetEnsemble::from_parts(&probs, &gains),
            Err(SubsetError::CapacityExceeded(21))
        );
    }

    #[test]
    fn ensemble_matches_gamma_moments_per_subset() {
        let gains = [2e-12, 5e-13, 7e-12, 1e-11];
        let e = SubsetEnsemble::from_parts(&[0.2, 0.4, 0.6, 0.8], &gains).unwrap();
        for s in &e.subsets {
            if s.is_empty() {
                continue;
            }
            let members: Vec<f64> = (0..4)
                .filter(|k| s.members & (1 << k) != 0)
                .map(|k| gains[k])
                .collect();
            let (v, w) = gamma_moments(&members).unwrap();
            assert!(((s.shape_v - v) / v).abs() < 1e-12);
            assert!(((s.scale_w - w) / w).abs() < 1e-12);
        }
    }
}
