//! wasm-bindgen bindings for the browser demo: three interactive operations
//! returning JSON strings for a plain-canvas page to draw.
//!
//! Helper counts are capped at 12 to keep every interaction comfortably
//! below a second in the browser's single thread.

use covertjam::detection::{
    avg_detection_error, false_alarm_rate, min_avg_error_case2, DetectionContext,
};
use covertjam::geometry::{dbm_to_watts, generate_geometry, NetworkGeometry, SystemParams};
use covertjam::optimizer::optimal_rate;
use covertjam::outage::{outage_probability, OutageContext};
use covertjam::subsets::selection_probability;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const DEMO_MAX_HELPERS: usize = 12;

fn params(pj_dbm: f64, lg_tau: f64) -> SystemParams {
    SystemParams {
        pt_w: dbm_to_watts(10.0),
        pj_w: dbm_to_watts(pj_dbm),
        sigma_r2_w: dbm_to_watts(-120.0),
        sigma_w2_w: dbm_to_watts(-120.0),
        tau: 10f64.powf(lg_tau),
        rate_r: 1.0,
        epsilon: 0.1,
    }
}

fn demo_geometry_checked(seed: u32, n_helpers: usize) -> Result<NetworkGeometry, String> {
    if n_helpers > DEMO_MAX_HELPERS {
        return Err(format!("demo supports at most {DEMO_MAX_HELPERS} helpers"));
    }
    generate_geometry(
        seed as u64,
        n_helpers,
        1000.0,
        1200.0,
        std::f64::consts::FRAC_PI_2,
        4.0,
    )
    .map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn error_json(message: String) -> String {
    to_json(&serde_json::json!({ "error": message }))
}

#[derive(Serialize)]
struct GeometryView {
    tx: [f64; 2],
    rx: [f64; 2],
    warden: [f64; 2],
    helpers: Vec<[f64; 2]>,
    /// Per-helper probability of acting as a jammer at the given threshold.
    selection_probs: Vec<f64>,
    disk_radius_m: f64,
}

/// Node layout plus per-helper selection probabilities at `lg_tau`.
#[wasm_bindgen]
pub fn demo_geometry(seed: u32, n_helpers: usize, lg_tau: f64) -> String {
    let g = match demo_geometry_checked(seed, n_helpers) {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    let p = params(10.0, lg_tau);
    let probs = (0..g.n_helpers())
        .map(|k| selection_probability(g.dist_jr(k), g.alpha, p.sigma_r2_w, p.tau))
        .collect();
    to_json(&GeometryView {
        tx: [g.tx.x, g.tx.y],
        rx: [g.rx.x, g.rx.y],
        warden: [g.warden.x, g.warden.y],
        helpers: g.helpers.iter().map(|h| [h.x, h.y]).collect(),
        selection_probs: probs,
        disk_radius_m: 2.0 * g.dist_tr(),
    })
}

#[derive(Serialize)]
struct DetectionView {
    /// Detection thresholds (watts), log-spaced above the noise floor.
    mu_w: Vec<f64>,
    xi_bar: Vec<f64>,
    p_fa: Vec<f64>,
    mu_star_w: f64,
    xi2_star: f64,
    sigma_w2_w: f64,
}

/// Average detection error and false-alarm curves over the warden's
/// threshold, plus the warden-optimal operating point (case 2).
#[wasm_bindgen]
pub fn demo_detection(
    seed: u32,
    n_helpers: usize,
    pj_dbm: f64,
    lg_tau: f64,
    points: usize,
) -> String {
    let g = match demo_geometry_checked(seed, n_helpers) {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    let p = params(pj_dbm, lg_tau);
    let ctx = match DetectionContext::new(&g, &p) {
        Ok(c) => c,
        Err(e) => return error_json(e.to_string()),
    };
    let points = points.clamp(16, 400);
    let s_hi = ctx.mu_search_upper() - p.sigma_w2_w;
    let mut mu_w = Vec::with_capacity(points);
    let mut xi_bar = Vec::with_capacity(points);
    let mut p_fa = Vec::with_capacity(points);
    for i in 0..points {
        let s = s_hi * 10f64.powf(-6.0 + 6.0 * i as f64 / (points - 1) as f64);
        let mu = p.sigma_w2_w + s;
        match avg_detection_error(&ctx, mu) {
            Ok(v) => {
                mu_w.push(mu);
                xi_bar.push(v);
                p_fa.push(false_alarm_rate(&ctx, mu));
            }
            Err(e) => return error_json(e.to_string()),
        }
    }
    let (xi2_star, mu_star_w) = match min_avg_error_case2(&ctx) {
        Ok(v) => v,
        Err(e) => return error_json(e.to_string()),
    };
    to_json(&DetectionView {
        mu_w,
        xi_bar,
        p_fa,
        mu_star_w,
        xi2_star,
        sigma_w2_w: p.sigma_w2_w,
    })
}

#[derive(Serialize)]
struct ThroughputView {
    rate_bits: Vec<f64>,
    delta: Vec<f64>,
    omega_bits: Vec<f64>,
    rate_star_bits: f64,
    omega_star_bits: f64,
}

/// Outage probability and covert throughput over the rate at a fixed
/// selection threshold, with the rate optimum marked.
#[wasm_bindgen]
pub fn demo_throughput(
    seed: u32,
    n_helpers: usize,
    pj_dbm: f64,
    lg_tau: f64,
    rate_max: f64,
    points: usize,
) -> String {
    let g = match demo_geometry_checked(seed, n_helpers) {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    let p = params(pj_dbm, lg_tau);
    let ctx = match OutageContext::new(&g, &p) {
        Ok(c) => c,
        Err(e) => return error_json(e.to_string()),
    };
    let points = points.clamp(16, 1000);
    let rate_max = if rate_max > 0.0 { rate_max } else { 8.0 };
    let mut rate_bits = Vec::with_capacity(points);
    let mut delta = Vec::with_capacity(points);
    let mut omega_bits = Vec::with_capacity(points);
    for i in 1..=points {
        let r = rate_max * i as f64 / points as f64;
        let d = outage_probability(&ctx, r, p.tau);
        rate_bits.push(r);
        delta.push(d);
        omega_bits.push(r * (1.0 - d));
    }
    let (rate_star_bits, omega_star_bits) = optimal_rate(&ctx, p.tau);
    to_json(&ThroughputView {
        rate_bits,
        delta,
        omega_bits,
        rate_star_bits,
        omega_star_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_payload_shape() {
        let v: serde_json::Value = serde_json::from_str(&demo_geometry(7, 6, 2.0)).unwrap();
        assert_eq!(v["helpers"].as_array().unwrap().len(), 6);
        assert_eq!(v["selection_probs"].as_array().unwrap().len(), 6);
        assert!(v["disk_radius_m"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn helper_cap_reports_error() {
        let v: serde_json::Value = serde_json::from_str(&demo_geometry(7, 40, 2.0)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("12"));
    }

    #[test]
    fn detection_payload_is_consistent() {
        let v: serde_json::Value =
            serde_json::from_str(&demo_detection(7, 4, 10.0, 2.0, 60)).unwrap();
        let xi: Vec<f64> = v["xi_bar"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert_eq!(xi.len(), 60);
        assert!(xi.iter().all(|x| (0.0..=1.0).contains(x)));
        let xi2 = v["xi2_star"].as_f64().unwrap();
        assert!(xi.iter().all(|&x| xi2 <= x + 1e-9));
    }

    #[test]
    fn throughput_payload_has_interior_peak() {
        let v: serde_json::Value =
            serde_json::from_str(&demo_throughput(7, 4, 10.0, 2.0, 8.0, 200)).unwrap();
        let omega: Vec<f64> = v["omega_bits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let best = omega.iter().cloned().fold(f64::MIN, f64::max);
        let star = v["omega_star_bits"].as_f64().unwrap();
        assert!(star >= best - 1e-9);
        assert!(best > omega[0] && best > *omega.last().unwrap());
    }
}
