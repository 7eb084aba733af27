//! Figure presets: pinned parameter sets that regenerate the data behind
//! each reference figure as CSV plus a meta JSON sidecar with the fully
//! resolved configuration.
//!
//! Captions pin physics parameters (helper counts, powers, rates, the
//! covertness budget); everything a caption leaves open (seed, grid
//! resolution, Monte-Carlo trials, warden angle) comes from the user
//! configuration and is recorded in the sidecar.

use crate::config::{linspace, ConfigError, ExperimentConfig};
use crate::sweep::{eval_point, fmt_f64, target_columns, SweepVar, Table, Target};
use covertjam::geometry::dbm_to_watts;
use covertjam::optimizer::{min_helpers, optimal_tau, CsiCase};
use covertjam::ModelError;
use rayon::prelude::*;
use serde_json::json;

pub const FIGURE_IDS: [&str; 9] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    /// `(key, value)` pairs applied through the config parser, so the meta
    /// sidecar records them exactly as reproducible overrides.
    pub overrides: Vec<(String, String)>,
    pub targets: Vec<Target>,
    pub with_mc: bool,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: String,
    pub x_var: SweepVar,
    pub x_values: Vec<f64>,
    pub base: ExperimentConfig,
    pub curves: Vec<Curve>,
    pub notes: serde_json::Value,
}

fn curve(label: &str, overrides: &[(&str, String)], targets: &[Target], with_mc: bool) -> Curve {
    Curve {
        label: label.to_string(),
        overrides: overrides
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        targets: targets.to_vec(),
        with_mc,
    }
}

fn cfg_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Build the preset for a figure id on top of the user configuration.
pub fn build(id: &str, user: &ExperimentConfig) -> Result<Figure, ConfigError> {
    let mut base = user.clone();
    let lg_grid = user.lg_tau_grid();
    let fig = match id {
        "fig2" => Figure {
            id: id.into(),
            x_var: SweepVar::LgTau,
            x_values: lg_grid,
            base: {
                base.pj_dbm = 10.0;
                base.d_tw_factor = 1.2;
                base
            },
            curves: [2usize, 5, 10]
                .iter()
                .map(|&n| {
                    curve(
                        &format!("n{n}"),
                        &[("n_helpers", n.to_string())],
                        &[Target::Xi1Star, Target::Xi2Star],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "minimum average detection error (cases 1 and 2) vs lg tau",
                "pinned": {"pj_dbm": 10.0, "d_tw_factor": 1.2},
            }),
        },
        "fig3" => Figure {
            id: id.into(),
            x_var: SweepVar::LgTau,
            x_values: lg_grid,
            base: {
                base.n_helpers = 10;
                base
            },
            curves: [(5.0, 1.2), (10.0, 1.2), (10.0, 1.0)]
                .iter()
                .map(|&(pj, dtw)| {
                    curve(
                        &format!("pj{pj:.0}_dtw{}", (dtw * 10.0) as u32),
                        &[("pj_dbm", pj.to_string()), ("d_tw_factor", dtw.to_string())],
                        &[Target::Xi2Star],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "case-2 minimum average detection error vs lg tau",
                "pinned": {"n_helpers": 10},
            }),
        },
        "fig4" => Figure {
            id: id.into(),
            x_var: SweepVar::LgTau,
            x_values: linspace(user.lg_tau_lo, user.lg_tau_hi, user.lg_tau_points.min(21)),
            base: {
                base.n_helpers = 4;
                base.rate_bits = 1.0;
                base
            },
            curves: [5.0, 10.0]
                .iter()
                .map(|&pj| {
                    curve(
                        &format!("pj{pj:.0}"),
                        &[("pj_dbm", pj.to_string())],
                        &[Target::Xi2Star, Target::Delta],
                        true,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "xi2_star and delta vs lg tau, analytic and Monte-Carlo",
                "pinned": {"n_helpers": 4, "rate_bits": 1.0},
                "mc": "xi2_star_mc simulates at the analytically optimal detection threshold",
            }),
        },
        "fig5" => Figure {
            id: id.into(),
            x_var: SweepVar::LgTau,
            x_values: lg_grid,
            base: {
                base.n_helpers = 10;
                base
            },
            curves: [(5.0, 1.0), (10.0, 1.0), (10.0, 2.0)]
                .iter()
                .map(|&(pj, r)| {
                    curve(
                        &format!("pj{pj:.0}_r{r:.0}"),
                        &[("pj_dbm", pj.to_string()), ("rate_bits", r.to_string())],
                        &[Target::Delta],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "transmission outage probability vs lg tau",
                "pinned": {"n_helpers": 10},
            }),
        },
        "fig6" => Figure {
            id: id.into(),
            x_var: SweepVar::PjDbm,
            x_values: vec![0.0, 4.0, 8.0, 12.0, 16.0],
            base: {
                base.epsilon = 0.1;
                base
            },
            curves: [5usize, 10, 15]
                .iter()
                .map(|&n| {
                    curve(
                        &format!("n{n}"),
                        &[("n_helpers", n.to_string())],
                        &[Target::TauStar],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "optimal selection threshold vs jamming power",
                "pinned": {"epsilon": 0.1},
                "runtime": "the n15 curve solves a 2^15-subset constrained minimization per point; expect tens of minutes on a laptop",
            }),
        },
        "fig7" => {
            let mut curves = Vec::new();
            let mut skipped = Vec::new();
            for case in [CsiCase::Case2, CsiCase::Case1] {
                for n in [2usize, 5, 10] {
                    let mut probe = user.clone();
                    probe.n_helpers = n;
                    probe.epsilon = 0.1;
                    let geometry = probe.geometry()?;
                    let params = probe.system_params();
                    match optimal_tau(&geometry, &params, probe.epsilon, case) {
                        Ok(tau_star) => curves.push(curve(
                            &format!("{}_n{n}", case.as_str()),
                            &[
                                ("n_helpers", n.to_string()),
                                ("warden_csi_case", case.as_str().to_string()),
                                ("lg_tau", tau_star.log10().to_string()),
                            ],
                            &[Target::Omega],
                            false,
                        )),
                        Err(ModelError::Infeasible { .. }) => {
                            skipped.push(format!("{}_n{n}", case.as_str()));
                        }
                        Err(e) => return Err(cfg_err("model", e.to_string())),
                    }
                }
            }
            Figure {
                id: id.into(),
                x_var: SweepVar::Rate,
                x_values: linspace(0.25, 7.75, 31),
                base: {
                    base.epsilon = 0.1;
                    base
                },
                curves,
                notes: json!({
                    "axes": "covert throughput vs rate at the per-curve optimal selection threshold",
                    "pinned": {"epsilon": 0.1},
                    "infeasible_curves_skipped": skipped,
                }),
            }
        }
        "fig8" => Figure {
            id: id.into(),
            x_var: SweepVar::Epsilon,
            // The reference axis is 1 − ε; ε ascending keeps rows ordered.
            x_values: linspace(0.05, 0.95, 10),
            base: {
                base.pj_dbm = 10.0;
                base
            },
            curves: [5usize, 10]
                .iter()
                .map(|&n| {
                    curve(
                        &format!("n{n}"),
                        &[("n_helpers", n.to_string())],
                        &[Target::OmegaStar],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "maximum covert throughput vs epsilon (reference plots 1 - epsilon)",
                "pinned": {"pj_dbm": 10.0},
                "single_jammer_baseline": "not implemented",
            }),
        },
        "fig9" => Figure {
            id: id.into(),
            x_var: SweepVar::NHelpers,
            x_values: (1..=12).map(|n| n as f64).collect(),
            base: {
                base.epsilon = 0.1;
                base
            },
            curves: [5.0, 10.0]
                .iter()
                .map(|&pj| {
                    curve(
                        &format!("pj{pj:.0}"),
                        &[("pj_dbm", pj.to_string())],
                        &[Target::OmegaStar],
                        false,
                    )
                })
                .collect(),
            notes: json!({
                "axes": "maximum covert throughput vs helper count (nested geometries)",
                "pinned": {"epsilon": 0.1},
            }),
        },
        "fig10" => {
            let mut n_min = serde_json::Map::new();
            for pj in [5.0, 10.0] {
                let mut probe = user.clone();
                probe.n_helpers = 12;
                let geometry = probe.geometry()?;
                let params = probe.system_params();
                let res = min_helpers(&geometry, &params, 0.1, dbm_to_watts(pj), 12);
                n_min.insert(
                    format!("pj{pj:.0}"),
                    match res {
                        Ok(n) => json!(n),
                        Err(_) => json!("infeasible"),
                    },
                );
            }
            Figure {
                id: id.into(),
                x_var: SweepVar::NHelpers,
                x_values: (1..=12).map(|n| n as f64).collect(),
                base: {
                    base.epsilon = 0.1;
                    base
                },
                curves: [5.0, 10.0]
                    .iter()
                    .map(|&pj| {
                        curve(
                            &format!("pj{pj:.0}"),
                            &[("pj_dbm", pj.to_string())],
                            &[Target::TauStar, Target::OmegaStar],
                            false,
                        )
                    })
                    .collect(),
                notes: json!({
                    "axes": "feasibility and maximum covert throughput vs helper count",
                    "pinned": {"epsilon": 0.1},
                    "n_min": n_min,
                }),
            }
        }
        other => {
            return Err(cfg_err(
                "fig",
                format!(
                    "unknown figure id `{other}`; expected one of {}",
                    FIGURE_IDS.join(", ")
                ),
            ))
        }
    };
    Ok(fig)
}

/// Evaluate a figure into its table: one row per x value, per-curve columns
/// suffixed with the curve label.
pub fn evaluate(figure: &Figure) -> Result<Table, ConfigError> {
    let mut header = vec![figure.x_var.column().to_string()];
    for c in &figure.curves {
        for &t in &c.targets {
            for col in target_columns(t, c.with_mc) {
                header.push(format!("{col}_{}", c.label));
            }
        }
        if c.targets.contains(&Target::TauStar) || c.targets.contains(&Target::OmegaStar) {
            header.push(format!("feasible_{}", c.label));
        }
    }

    let jobs: Vec<(usize, usize)> = (0..figure.x_values.len())
        .flat_map(|xi| (0..figure.curves.len()).map(move |ci| (xi, ci)))
        .collect();
    let cells: Vec<Result<Vec<String>, ConfigError>> = jobs
        .par_iter()
        .map(|&(xi, ci)| {
            let c = &figure.curves[ci];
            let mut cfg = figure.base.clone();
            for (k, v) in &c.overrides {
                cfg.set(k, v)?;
            }
            let x = figure.x_values[xi];
            match figure.x_var {
                SweepVar::LgTau => cfg.lg_tau = x,
                SweepVar::Rate => cfg.rate_bits = x,
                SweepVar::Epsilon => cfg.epsilon = x,
                SweepVar::NHelpers => cfg.n_helpers = x.round() as usize,
                SweepVar::PjDbm => cfg.pj_dbm = x,
            }
            cfg.validate()?;
            eval_point(&cfg, &c.targets, c.with_mc)
        })
        .collect();

    let n_curves = figure.curves.len();
    let mut rows = Vec::with_capacity(figure.x_values.len());
    let mut it = cells.into_iter();
    for &x in &figure.x_values {
        let mut row = vec![fmt_f64(x)];
        for _ in 0..n_curves {
            row.extend(it.next().unwrap()?);
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Meta sidecar: tool version, the fully resolved base configuration, the
/// per-curve overrides, and figure notes.
pub fn meta(figure: &Figure) -> serde_json::Value {
    json!({
        "figure": figure.id,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "x": {
            "variable": figure.x_var.column(),
            "values": figure.x_values,
        },
        "config": figure.base,
        "curves": figure.curves.iter().map(|c| {
            json!({
                "label": c.label,
                "overrides": c.overrides.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<String, serde_json::Value>>(),
                "targets": c.targets.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>(),
                "monte_carlo": c.with_mc,
            })
        }).collect::<Vec<_>>(),
        "notes": figure.notes,
    })
}
