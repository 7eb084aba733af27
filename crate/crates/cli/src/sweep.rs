//! Sweep engine: evaluates metric targets over a grid of one experiment
//! variable, one CSV row per point. Points run in parallel; output order is
//! by grid index, so files are deterministic for a given configuration.

use crate::config::{linspace, ConfigError, ExperimentConfig};
use covertjam::detection::{
    avg_detection_error, false_alarm_rate, min_avg_error_case1, min_avg_error_case2,
    DetectionContext,
};
use covertjam::montecarlo::{simulate_detection, simulate_outage};
use covertjam::optimizer::{maximize_throughput, CsiCase, OptimizationResult};
use covertjam::outage::{covert_throughput, outage_probability, OutageContext};
use covertjam::ModelError;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepVar {
    LgTau,
    Rate,
    Epsilon,
    NHelpers,
    PjDbm,
}

impl SweepVar {
    pub fn column(&self) -> &'static str {
        match self {
            SweepVar::LgTau => "lg_tau",
            SweepVar::Rate => "rate_bits",
            SweepVar::Epsilon => "epsilon",
            SweepVar::NHelpers => "n_helpers",
            SweepVar::PjDbm => "pj_dbm",
        }
    }

    fn apply(&self, cfg: &mut ExperimentConfig, value: f64) {
        match self {
            SweepVar::LgTau => cfg.lg_tau = value,
            SweepVar::Rate => cfg.rate_bits = value,
            SweepVar::Epsilon => cfg.epsilon = value,
            SweepVar::NHelpers => cfg.n_helpers = value.round() as usize,
            SweepVar::PjDbm => cfg.pj_dbm = value,
        }
    }
}

/// Metric targets in their canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Target {
    XiBar,
    Xi1Star,
    Xi2Star,
    Delta,
    Omega,
    TauStar,
    OmegaStar,
}

pub const ALL_TARGETS: [Target; 7] = [
    Target::XiBar,
    Target::Xi1Star,
    Target::Xi2Star,
    Target::Delta,
    Target::Omega,
    Target::TauStar,
    Target::OmegaStar,
];

/// A finished table: header plus rows of already-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal formatting (Rust's `Display` for f64).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn needs(targets: &[Target], t: Target) -> bool {
    targets.contains(&t)
}

/// Column names (with unit suffixes) for one target under the given MC flag.
pub(crate) fn target_columns(t: Target, with_mc: bool) -> Vec<String> {
    let mut cols: Vec<String> = match t {
        Target::XiBar => vec!["xi_bar".into()],
        Target::Xi1Star => vec!["xi1_star".into()],
        Target::Xi2Star => vec!["xi2_star".into(), "mu2_star_w".into()],
        Target::Delta => vec!["delta".into()],
        Target::Omega => vec!["omega_bits".into()],
        Target::TauStar => vec!["tau_star".into()],
        Target::OmegaStar => vec![
            "omega_star_bits".into(),
            "rate_star_bits".into(),
            "tau_star_at_omega".into(),
        ],
    };
    if with_mc && matches!(t, Target::XiBar | Target::Xi2Star | Target::Delta) {
        let base = cols[0].clone();
        cols.push(format!("{base}_mc"));
        cols.push(format!("{base}_mc_se"));
    }
    cols
}

pub fn header_for(var: SweepVar, targets: &[Target], with_mc: bool) -> Vec<String> {
    let mut header = vec![var.column().to_string()];
    for &t in ALL_TARGETS.iter().filter(|t| needs(targets, **t)) {
        header.extend(target_columns(t, with_mc));
    }
    if needs(targets, Target::TauStar) || needs(targets, Target::OmegaStar) {
        header.push("feasible".into());
    }
    header
}

/// Evaluate every requested target at one resolved configuration point.
/// Cell order matches [`header_for`] minus the leading variable column.
pub fn eval_point(
    cfg: &ExperimentConfig,
    targets: &[Target],
    with_mc: bool,
) -> Result<Vec<String>, ConfigError> {
    let geometry = cfg.geometry()?;
    let params = cfg.system_params();
    let model_err = |e: ModelError| ConfigError {
        field: "model".into(),
        message: e.to_string(),
    };

    let mut cells = Vec::new();
    let needs_detection = needs(targets, Target::XiBar)
        || needs(targets, Target::Xi1Star)
        || needs(targets, Target::Xi2Star);
    let detection_ctx = if needs_detection {
        Some(DetectionContext::new(&geometry, &params).map_err(model_err)?)
    } else {
        None
    };
    let outage_ctx = if needs(targets, Target::Delta) || needs(targets, Target::Omega) {
        Some(OutageContext::new(&geometry, &params).map_err(model_err)?)
    } else {
        None
    };

    for &t in ALL_TARGETS.iter().filter(|t| needs(targets, **t)) {
        match t {
            Target::XiBar => {
                let mu = cfg.mu_w().ok_or_else(|| ConfigError {
                    field: "mu_dbm".into(),
                    message:
                        "the xi_bar target evaluates at a fixed detection threshold; set mu_dbm"
                            .into(),
                })?;
                let ctx = detection_ctx.as_ref().unwrap();
                let xi = avg_detection_error(ctx, mu).map_err(model_err)?;
                cells.push(fmt_f64(xi));
                if with_mc {
                    let sim = simulate_detection(&geometry, &params, mu, &cfg.mc_config());
                    cells.push(fmt_f64(sim.xi_bar.value));
                    cells.push(fmt_f64(sim.xi_bar.std_err));
                }
            }
            Target::Xi1Star => {
                let ctx = detection_ctx.as_ref().unwrap();
                let xi1 = min_avg_error_case1(ctx).map_err(model_err)?;
                cells.push(fmt_f64(xi1));
            }
            Target::Xi2Star => {
                let ctx = detection_ctx.as_ref().unwrap();
                let (xi2, mu_star) = min_avg_error_case2(ctx).map_err(model_err)?;
                cells.push(fmt_f64(xi2));
                cells.push(fmt_f64(mu_star));
                if with_mc {
                    let sim = simulate_detection(&geometry, &params, mu_star, &cfg.mc_config());
                    cells.push(fmt_f64(sim.xi_bar.value));
                    cells.push(fmt_f64(sim.xi_bar.std_err));
                }
            }
            Target::Delta => {
                let ctx = outage_ctx.as_ref().unwrap();
                let delta = outage_probability(ctx, cfg.rate_bits, params.tau);
                cells.push(fmt_f64(delta));
                if with_mc {
                    let sim = simulate_outage(&geometry, &params, cfg.rate_bits, &cfg.mc_config());
                    cells.push(fmt_f64(sim.value));
                    cells.push(fmt_f64(sim.std_err));
                }
            }
            Target::Omega => {
                let ctx = outage_ctx.as_ref().unwrap();
                let report = covert_throughput(ctx, cfg.rate_bits, params.tau);
                cells.push(fmt_f64(report.omega));
            }
            Target::TauStar | Target::OmegaStar => {
                // Handled jointly below so the optimizer runs once.
            }
        }
    }

    if needs(targets, Target::TauStar) || needs(targets, Target::OmegaStar) {
        let outcome = maximize_throughput(&geometry, &params, cfg.epsilon, cfg.warden_csi_case);
        match outcome {
            Ok(OptimizationResult {
                tau_star,
                rate_star,
                omega_star,
                ..
            }) => {
                if needs(targets, Target::TauStar) {
                    cells.push(fmt_f64(tau_star));
                }
                if needs(targets, Target::OmegaStar) {
                    cells.push(fmt_f64(omega_star));
                    cells.push(fmt_f64(rate_star));
                    cells.push(fmt_f64(tau_star));
                }
                cells.push("1".into());
            }
            Err(ModelError::Infeasible { .. }) => {
                let blank = if needs(targets, Target::TauStar) {
                    1
                } else {
                    0
                } + if needs(targets, Target::OmegaStar) {
                    3
                } else {
                    0
                };
                cells.extend(std::iter::repeat_n(String::new(), blank));
                cells.push("0".into());
            }
            Err(e) => return Err(model_err(e)),
        }
    }

    Ok(cells)
}

/// Run a sweep over `grid` values of `var`, returning the finished table.
pub fn run_sweep(
    base: &ExperimentConfig,
    var: SweepVar,
    targets: &[Target],
    grid: &[f64],
    with_mc: bool,
) -> Result<Table, ConfigError> {
    if grid.is_empty() {
        return Err(ConfigError {
            field: var.column().to_string(),
            message: "sweep grid is empty".into(),
        });
    }
    if targets.is_empty() {
        return Err(ConfigError {
            field: "targets".into(),
            message: "no sweep targets requested".into(),
        });
    }
    base.validate()?;

    let rows: Vec<Result<Vec<String>, ConfigError>> = grid
        .par_iter()
        .map(|&value| {
            let mut point = base.clone();
            var.apply(&mut point, value);
            point.validate()?;
            let mut row = vec![fmt_f64(match var {
                SweepVar::NHelpers => value.round(),
                _ => value,
            })];
            row.extend(eval_point(&point, targets, with_mc)?);
            Ok(row)
        })
        .collect();

    let mut table = Table {
        header: header_for(var, targets, with_mc),
        rows: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        table.rows.push(row?);
    }
    Ok(table)
}

/// Parse a `lo:hi:points` grid spec.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |m: &str| ConfigError {
        field: "grid".into(),
        message: m.to_string(),
    };
    if parts.len() != 3 {
        return Err(bad("expected lo:hi:points"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1].parse().map_err(|_| bad("hi is not a number"))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| bad("points is not an integer"))?;
    if !(lo < hi) {
        return Err(bad("grid requires lo < hi"));
    }
    if points < 2 {
        return Err(bad("grid needs at least 2 points"));
    }
    Ok(linspace(lo, hi, points))
}

/// Analytic point report used by the `detect` subcommand.
pub fn detect_point(
    cfg: &ExperimentConfig,
    minimize: bool,
) -> Result<serde_json::Value, ConfigError> {
    let geometry = cfg.geometry()?;
    let params = cfg.system_params();
    let ctx = DetectionContext::new(&geometry, &params).map_err(|e| ConfigError {
        field: "model".into(),
        message: e.to_string(),
    })?;
    let model_err = |e: ModelError| ConfigError {
        field: "model".into(),
        message: e.to_string(),
    };

    if !minimize {
        if let Some(mu) = cfg.mu_w() {
            let xi_bar = avg_detection_error(&ctx, mu).map_err(model_err)?;
            return Ok(serde_json::json!({
                "tau": params.tau,
                "mu_w": mu,
                "p_fa": false_alarm_rate(&ctx, mu),
                "xi_bar": xi_bar,
            }));
        }
    }
    match cfg.warden_csi_case {
        CsiCase::Case1 => {
            let xi1 = min_avg_error_case1(&ctx).map_err(model_err)?;
            Ok(serde_json::json!({
                "tau": params.tau,
                "case": "case1",
                "xi1_star": xi1,
            }))
        }
        CsiCase::Case2 => {
            let (xi2, mu_star) = min_avg_error_case2(&ctx).map_err(model_err)?;
            Ok(serde_json::json!({
                "tau": params.tau,
                "case": "case2",
                "xi2_star": xi2,
                "mu_star_w": mu_star,
            }))
        }
    }
}
