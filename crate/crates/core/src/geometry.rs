//! Network layout, dBm/watt conversion, and seeded generation of experiment
//! geometries.
//!
//! The transmitter sits at the origin, the receiver on the positive x-axis,
//! the warden at a configurable angle, and helpers are drawn uniformly over
//! the disk of radius `2·d_tr` centered on the transmitter.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("distance `{name}` must be strictly positive, got {value}")]
    NonPositiveDistance { name: &'static str, value: f64 },
    #[error("parameter `{name}` is out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// A node location in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
}

impl NodePosition {
    pub fn distance_to(&self, other: &NodePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Positions of transmitter, receiver, warden, and helpers, plus the
/// path-loss exponent. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkGeometry {
    pub tx: NodePosition,
    pub rx: NodePosition,
    pub warden: NodePosition,
    pub helpers: Vec<NodePosition>,
    pub alpha: f64,
}

impl NetworkGeometry {
    pub fn n_helpers(&self) -> usize {
        self.helpers.len()
    }

    pub fn dist_tr(&self) -> f64 {
        self.tx.distance_to(&self.rx)
    }

    pub fn dist_tw(&self) -> f64 {
        self.tx.distance_to(&self.warden)
    }

    /// Helper-to-receiver distance.
    pub fn dist_jr(&self, k: usize) -> f64 {
        self.helpers[k].distance_to(&self.rx)
    }

    /// Helper-to-warden distance.
    pub fn dist_jw(&self, k: usize) -> f64 {
        self.helpers[k].distance_to(&self.warden)
    }

    /// Power path gain d^{−α} from transmitter to receiver.
    pub fn gain_tr(&self) -> f64 {
        self.dist_tr().powf(-self.alpha)
    }

    /// Power path gain d^{−α} from transmitter to warden.
    pub fn gain_tw(&self) -> f64 {
        self.dist_tw().powf(-self.alpha)
    }

    /// Per-helper power path gains to the receiver.
    pub fn jam_gains_rx(&self) -> Vec<f64> {
        (0..self.n_helpers())
            .map(|k| self.dist_jr(k).powf(-self.alpha))
            .collect()
    }

    /// Per-helper power path gains to the warden.
    pub fn jam_gains_warden(&self) -> Vec<f64> {
        (0..self.n_helpers())
            .map(|k| self.dist_jw(k).powf(-self.alpha))
            .collect()
    }

    /// A copy keeping only the first `n` helpers; geometries produced from
    /// the same seed are nested prefixes of each other.
    pub fn truncated(&self, n: usize) -> NetworkGeometry {
        let mut g = self.clone();
        g.helpers.truncate(n);
        g
    }
}

/// System-level knobs, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Transmit power, watts.
    pub pt_w: f64,
    /// Per-jammer power, watts.
    pub pj_w: f64,
    /// Receiver noise power, watts.
    pub sigma_r2_w: f64,
    /// Warden noise power, watts.
    pub sigma_w2_w: f64,
    /// Jammer selection threshold (dimensionless SNR cutoff).
    pub tau: f64,
    /// Transmission rate, bits/s/Hz.
    pub rate_r: f64,
    /// Covertness budget, in [0, 1].
    pub epsilon: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let positive = [
            ("pt_w", self.pt_w),
            ("pj_w", self.pj_w),
            ("sigma_r2_w", self.sigma_r2_w),
            ("sigma_w2_w", self.sigma_w2_w),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(GeometryError::InvalidParameter { name, value });
            }
        }
        if !(self.tau >= 0.0) {
            return Err(GeometryError::InvalidParameter {
                name: "tau",
                value: self.tau,
            });
        }
        if !(self.rate_r >= 0.0) {
            return Err(GeometryError::InvalidParameter {
                name: "rate_r",
                value: self.rate_r,
            });
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(GeometryError::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
            });
        }
        Ok(())
    }

    pub fn with_tau(mut self, tau: f64) -> SystemParams {
        self.tau = tau;
        self
    }

    pub fn with_rate(mut self, rate_r: f64) -> SystemParams {
        self.rate_r = rate_r;
        self
    }
}

/// dBm to watts: 10^((p − 30) / 10).
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10.0_f64.powf((p_dbm - 30.0) / 10.0)
}

/// Watts to dBm: 10 log10(w) + 30.
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Power path gain d^{−α}. Errors on non-positive distance.
pub fn path_gain(d: f64, alpha: f64) -> Result<f64, GeometryError> {
    if !(d > 0.0) {
        return Err(GeometryError::NonPositiveDistance {
            name: "d",
            value: d,
        });
    }
    Ok(d.powf(-alpha))
}

/// Deterministic experiment geometry.
///
/// T at the origin, R at `(d_tr, 0)`, W at `d_tw·(cos θ_w, sin θ_w)`, and
/// `n_helpers` points uniform over the disk of radius `2·d_tr` around T.
/// Identical inputs give bit-identical output; helper lists for increasing
/// `n_helpers` at a fixed seed are nested.
pub fn generate_geometry(
    seed: u64,
    n_helpers: usize,
    d_tr: f64,
    d_tw: f64,
    theta_w: f64,
    alpha: f64,
) -> Result<NetworkGeometry, GeometryError> {
    if !(d_tr > 0.0) {
        return Err(GeometryError::NonPositiveDistance {
            name: "d_tr",
            value: d_tr,
        });
    }
    if !(d_tw > 0.0) {
        return Err(GeometryError::NonPositiveDistance {
            name: "d_tw",
            value: d_tw,
        });
    }
    if !(alpha > 0.0) {
        return Err(GeometryError::InvalidParameter {
            name: "alpha",
            value: alpha,
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let radius = 2.0 * d_tr;
    let helpers = (0..n_helpers)
        .map(|_| {
            // √u maps the uniform radial CDF onto the disk.
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            NodePosition {
                x: r * phi.cos(),
                y: r * phi.sin(),
            }
        })
        .collect();

    Ok(NetworkGeometry {
        tx: NodePosition { x: 0.0, y: 0.0 },
        rx: NodePosition { x: d_tr, y: 0.0 },
        warden: NodePosition {
            x: d_tw * theta_w.cos(),
            y: d_tw * theta_w.sin(),
        },
        helpers,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(0.0) - 1.0e-3).abs() < 1e-18);
        assert!((dbm_to_watts(10.0) - 1.0e-2).abs() < 1e-17);
        let w = dbm_to_watts(-120.0);
        assert!((w - 1.0e-15).abs() < 1e-27, "got {w}");
    }

    #[test]
    fn dbm_roundtrip_identity() {
        for p in [-170.0, -120.0, -30.0, 0.0, 10.0, 46.0] {
            let back = watts_to_dbm(dbm_to_watts(p));
            let rel = if p == 0.0 {
                back.abs()
            } else {
                ((back - p) / p).abs()
            };
            assert!(rel <= 1e-12, "p={p} back={back}");
        }
        for w in [1e-15, 1e-3, 2.5, 40.0] {
            let back = dbm_to_watts(watts_to_dbm(w));
            assert!(((back - w) / w).abs() <= 1e-12);
        }
    }

    #[test]
    fn path_gain_values() {
        assert_eq!(path_gain(1.0, 4.0).unwrap(), 1.0);
        assert!((path_gain(1000.0, 4.0).unwrap() - 1e-12).abs() < 1e-24);
        assert!((path_gain(2.0, 2.0).unwrap() - 0.25).abs() < 1e-16);
        assert!(path_gain(0.0, 4.0).is_err());
        assert!(path_gain(-3.0, 4.0).is_err());
    }

    #[test]
    fn geometry_without_helpers() {
        let g = generate_geometry(1, 0, 1000.0, 1200.0, std::f64::consts::FRAC_PI_2, 4.0).unwrap();
        assert!(g.helpers.is_empty());
        assert!((g.dist_tr() - 1000.0).abs() < 1e-9);
        assert!((g.dist_tw() - 1200.0).abs() < 1e-9);
    }

    #[test]
    fn geometry_is_deterministic() {
        let a = generate_geometry(7, 10, 1000.0, 1200.0, 0.3, 4.0).unwrap();
        let b = generate_geometry(7, 10, 1000.0, 1200.0, 0.3, 4.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn helper_prefixes_are_nested() {
        let big = generate_geometry(3, 12, 1000.0, 1200.0, 0.0, 4.0).unwrap();
        let small = generate_geometry(3, 5, 1000.0, 1200.0, 0.0, 4.0).unwrap();
        assert_eq!(&big.helpers[..5], &small.helpers[..]);
        assert_eq!(big.truncated(5), small);
    }

    #[test]
    fn helpers_stay_inside_disk() {
        let g = generate_geometry(7, 10, 1000.0, 1500.0, 1.0, 4.0).unwrap();
        for h in &g.helpers {
            assert!(h.distance_to(&g.tx) <= 2000.0 + 1e-9);
        }
    }

    #[test]
    fn uniform_disk_mean_squared_radius() {
        // E[r²] = R²/2 for a uniform disk; check within 3 standard errors.
        let n = 200_000;
        let g = generate_geometry(42, n, 1000.0, 1200.0, 0.0, 4.0).unwrap();
        let radius = 2000.0_f64;
        let r2: Vec<f64> = g
            .helpers
            .iter()
            .map(|h| {
                let d = h.distance_to(&g.tx);
                d * d
            })
            .collect();
        let mean = r2.iter().sum::<f64>() / n as f64;
        let var = r2.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        let expected = radius * radius / 2.0;
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} expected {expected} se {se}"
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(generate_geometry(1, 0, 0.0, 1200.0, 0.0, 4.0).is_err());
        assert!(generate_geometry(1, 0, 1000.0, -1.0, 0.0, 4.0).is_err());
        assert!(generate_geometry(1, 0, 1000.0, 1200.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn params_validation() {
        let ok = SystemParams {
            pt_w: 1e-2,
            pj_w: 1e-2,
            sigma_r2_w: 1e-15,
            sigma_w2_w: 1e-15,
            tau: 10.0,
            rate_r: 1.0,
            epsilon: 0.1,
        };
        assert!(ok.validate().is_ok());
        assert!(ok.with_tau(-1.0).validate().is_err());
        let mut bad = ok;
        bad.epsilon = 1.5;
        assert!(bad.validate().is_err());
        bad = ok;
        bad.pt_w = 0.0;
        assert!(bad.validate().is_err());
    }
}
