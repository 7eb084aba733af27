//! Flat key=value experiment configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Every key has a
//! default; unknown keys and malformed values are errors naming the field.
//! Powers are configured in dBm and converted to watts at the model
//! boundary.

use covertjam::geometry::{dbm_to_watts, generate_geometry, NetworkGeometry, SystemParams};
use covertjam::montecarlo::{McConfig, McHorizon};
use covertjam::optimizer::CsiCase;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Radiometer horizon as configured: `asymptotic` or a channel-use count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonCfg {
    Asymptotic,
    Finite(u32),
}

impl Serialize for HorizonCfg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            HorizonCfg::Asymptotic => s.serialize_str("asymptotic"),
            HorizonCfg::Finite(n) => s.serialize_u32(*n),
        }
    }
}

impl From<HorizonCfg> for McHorizon {
    fn from(h: HorizonCfg) -> McHorizon {
        match h {
            HorizonCfg::Asymptotic => McHorizon::Asymptotic,
            HorizonCfg::Finite(n) => McHorizon::Finite(n),
        }
    }
}

/// Resolved experiment configuration. Defaults follow the reference setup:
/// d0 = 1000 m, α = 4, P_t = 10 dBm, σ_r² = σ_w² = −120 dBm, d_tr = d0,
/// d_tw = 1.2·d0, warden at θ_w = π/2.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_helpers: usize,
    pub d0_m: f64,
    pub d_tr_factor: f64,
    pub d_tw_factor: f64,
    pub theta_w_rad: f64,
    pub alpha: f64,
    pub pt_dbm: f64,
    pub pj_dbm: f64,
    pub sigma_r2_dbm: f64,
    pub sigma_w2_dbm: f64,
    pub epsilon: f64,
    pub rate_bits: f64,
    /// Selection threshold exponent for point operations: τ = 10^lg_tau.
    pub lg_tau: f64,
    pub lg_tau_lo: f64,
    pub lg_tau_hi: f64,
    pub lg_tau_points: usize,
    pub mc_trials: u64,
    pub n_channel_uses: HorizonCfg,
    pub warden_csi_case: CsiCase,
    /// Optional warden detection threshold in dBm; required by operations
    /// that evaluate at a fixed μ (e.g. the `xi_bar` sweep target).
    pub mu_dbm: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            n_helpers: 10,
            d0_m: 1000.0,
            d_tr_factor: 1.0,
            d_tw_factor: 1.2,
            theta_w_rad: std::f64::consts::FRAC_PI_2,
            alpha: 4.0,
            pt_dbm: 10.0,
            pj_dbm: 10.0,
            sigma_r2_dbm: -120.0,
            sigma_w2_dbm: -120.0,
            epsilon: 0.1,
            rate_bits: 1.0,
            lg_tau: 2.0,
            lg_tau_lo: -1.0,
            lg_tau_hi: 5.0,
            lg_tau_points: 25,
            mc_trials: 1_000_000,
            n_channel_uses: HorizonCfg::Asymptotic,
            warden_csi_case: CsiCase::Case2,
            mu_dbm: None,
        }
    }
}

impl Serialize for ExperimentConfig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExperimentConfig", 21)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("n_helpers", &self.n_helpers)?;
        st.serialize_field("d0_m", &self.d0_m)?;
        st.serialize_field("d_tr_factor", &self.d_tr_factor)?;
        st.serialize_field("d_tw_factor", &self.d_tw_factor)?;
        st.serialize_field("theta_w_rad", &self.theta_w_rad)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("pt_dbm", &self.pt_dbm)?;
        st.serialize_field("pj_dbm", &self.pj_dbm)?;
        st.serialize_field("sigma_r2_dbm", &self.sigma_r2_dbm)?;
        st.serialize_field("sigma_w2_dbm", &self.sigma_w2_dbm)?;
        st.serialize_field("epsilon", &self.epsilon)?;
        st.serialize_field("rate_bits", &self.rate_bits)?;
        st.serialize_field("lg_tau", &self.lg_tau)?;
        st.serialize_field("lg_tau_lo", &self.lg_tau_lo)?;
        st.serialize_field("lg_tau_hi", &self.lg_tau_hi)?;
        st.serialize_field("lg_tau_points", &self.lg_tau_points)?;
        st.serialize_field("mc_trials", &self.mc_trials)?;
        st.serialize_field("n_channel_uses", &self.n_channel_uses)?;
        st.serialize_field("warden_csi_case", self.warden_csi_case.as_str())?;
        st.serialize_field("mu_dbm", &self.mu_dbm)?;
        st.end()
    }
}

fn parse_num<T: std::str::FromStr>(field: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| err(field, format!("cannot parse `{value}`")))
}

impl ExperimentConfig {
    /// Apply one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "seed" => self.seed = parse_num(key, v)?,
            "n_helpers" => self.n_helpers = parse_num(key, v)?,
            "d0_m" => self.d0_m = parse_num(key, v)?,
            "d_tr_factor" => self.d_tr_factor = parse_num(key, v)?,
            "d_tw_factor" => self.d_tw_factor = parse_num(key, v)?,
            "theta_w_rad" => self.theta_w_rad = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "pt_dbm" => self.pt_dbm = parse_num(key, v)?,
            "pj_dbm" => self.pj_dbm = parse_num(key, v)?,
            "sigma_r2_dbm" => self.sigma_r2_dbm = parse_num(key, v)?,
            "sigma_w2_dbm" => self.sigma_w2_dbm = parse_num(key, v)?,
            "epsilon" => self.epsilon = parse_num(key, v)?,
            "rate_bits" => self.rate_bits = parse_num(key, v)?,
            "lg_tau" => self.lg_tau = parse_num(key, v)?,
            "lg_tau_lo" => self.lg_tau_lo = parse_num(key, v)?,
            "lg_tau_hi" => self.lg_tau_hi = parse_num(key, v)?,
            "lg_tau_points" => self.lg_tau_points = parse_num(key, v)?,
            "mc_trials" => self.mc_trials = parse_num(key, v)?,
            "n_channel_uses" => {
                self.n_channel_uses = if v.eq_ignore_ascii_case("asymptotic") {
                    HorizonCfg::Asymptotic
                } else {
                    HorizonCfg::Finite(parse_num(key, v)?)
                }
            }
            "warden_csi_case" => {
                self.warden_csi_case = v.parse().map_err(|e: String| err(key, e))?
            }
            "mu_dbm" => self.mu_dbm = Some(parse_num(key, v)?),
            other => return Err(err(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Parse a flat config file on top of the current values. A JSON file
    /// (as emitted in `.meta.json` sidecars, either the bare config object
    /// or a document with a `config` field) is accepted too, so any emitted
    /// run can be replayed from its sidecar.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err("config", format!("cannot read {}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            return self.apply_json(&text);
        }
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                err(
                    "config",
                    format!("line {}: expected key = value", lineno + 1),
                )
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    fn apply_json(&mut self, text: &str) -> Result<(), ConfigError> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| err("config", format!("invalid JSON: {e}")))?;
        let obj = doc
            .get("config")
            .unwrap_or(&doc)
            .as_object()
            .ok_or_else(|| err("config", "JSON config must be an object"))?;
        for (key, value) in obj {
            match value {
                serde_json::Value::Null => {}
                serde_json::Value::String(s) => self.set(key, s)?,
                other => self.set(key, &other.to_string())?,
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d0_m <= 0.0 {
            return Err(err("d0_m", "must be positive"));
        }
        if self.d_tr_factor <= 0.0 {
            return Err(err("d_tr_factor", "must be positive"));
        }
        if self.d_tw_factor <= 0.0 {
            return Err(err("d_tw_factor", "must be positive"));
        }
        if self.alpha <= 0.0 {
            return Err(err("alpha", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(err("epsilon", "must lie in [0, 1]"));
        }
        if self.rate_bits < 0.0 {
            return Err(err("rate_bits", "must be nonnegative"));
        }
        if self.lg_tau_lo >= self.lg_tau_hi {
            return Err(err("lg_tau_lo", "grid requires lg_tau_lo < lg_tau_hi"));
        }
        if self.lg_tau_points < 2 {
            return Err(err("lg_tau_points", "grid needs at least 2 points"));
        }
        if self.mc_trials == 0 {
            return Err(err("mc_trials", "must be at least 1"));
        }
        if self.n_helpers > covertjam::subsets::MAX_HELPERS {
            return Err(err(
                "n_helpers",
                format!(
                    "exact enumeration caps at {}",
                    covertjam::subsets::MAX_HELPERS
                ),
            ));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        10f64.powf(self.lg_tau)
    }

    pub fn mu_w(&self) -> Option<f64> {
        self.mu_dbm.map(dbm_to_watts)
    }

    pub fn geometry(&self) -> Result<NetworkGeometry, ConfigError> {
        generate_geometry(
            self.seed,
            self.n_helpers,
            self.d0_m * self.d_tr_factor,
            self.d0_m * self.d_tw_factor,
            self.theta_w_rad,
            self.alpha,
        )
        .map_err(|e| err("geometry", e.to_string()))
    }

    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            pt_w: dbm_to_watts(self.pt_dbm),
            pj_w: dbm_to_watts(self.pj_dbm),
            sigma_r2_w: dbm_to_watts(self.sigma_r2_dbm),
            sigma_w2_w: dbm_to_watts(self.sigma_w2_dbm),
            tau: self.tau(),
            rate_r: self.rate_bits,
            epsilon: self.epsilon,
        }
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            seed: self.seed,
            trials: self.mc_trials,
            horizon: self.n_channel_uses.into(),
        }
    }

    pub fn lg_tau_grid(&self) -> Vec<f64> {
        linspace(self.lg_tau_lo, self.lg_tau_hi, self.lg_tau_points)
    }
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.tau(), 100.0);
        let p = cfg.system_params();
        assert!((p.pt_w - 1e-2).abs() < 1e-17);
        assert!((p.sigma_w2_w - 1e-15).abs() < 1e-28);
    }

    #[test]
    fn unknown_key_is_named() {
        let mut cfg = ExperimentConfig::default();
        let e = cfg.set("bogus_key", "1").unwrap_err();
        assert_eq!(e.field, "bogus_key");
    }

    #[test]
    fn bad_value_names_field() {
        let mut cfg = ExperimentConfig::default();
        let e = cfg.set("epsilon", "lots").unwrap_err();
        assert_eq!(e.field, "epsilon");
        cfg.set("epsilon", "1.5").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "epsilon");
    }

    #[test]
    fn file_parsing_with_comments() {
        let dir = std::env::temp_dir().join("covertjam-cfg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.cfg");
        std::fs::write(
            &path,
            "# comment\nn_helpers = 4\npj_dbm = 5 # trailing\n\nwarden_csi_case = case1\nn_channel_uses = 100\n",
        )
        .unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.n_helpers, 4);
        assert_eq!(cfg.pj_dbm, 5.0);
        assert_eq!(cfg.warden_csi_case, CsiCase::Case1);
        assert_eq!(cfg.n_channel_uses, HorizonCfg::Finite(100));
    }

    #[test]
    fn grid_invariants() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("lg_tau_points", "1").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "lg_tau_points");
        let mut cfg = ExperimentConfig::default();
        cfg.set("lg_tau_lo", "6").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "lg_tau_lo");
    }
}
