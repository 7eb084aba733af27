//! Experiment runner for the covert-link analytics.
//!
//! Subcommands: `detect`, `outage`, `optimize`, `mc`, `sweep`, `reproduce`.
//! Point commands emit JSON; `sweep` and `reproduce` emit CSV with a JSON
//! meta sidecar. Exit codes: 0 success, 2 configuration error, 3 infeasible
//! covertness constraint.

mod config;
mod figures;
mod sweep;

use clap::{Parser, Subcommand, ValueEnum};
use config::{ConfigError, ExperimentConfig};
use covertjam::detection::DetectionContext;
use covertjam::montecarlo::{simulate_detection, simulate_outage};
use covertjam::optimizer::maximize_throughput;
use covertjam::outage::{covert_throughput, OutageContext};
use covertjam::ModelError;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use sweep::{parse_grid, run_sweep, SweepVar, Target};

#[derive(Parser)]
#[command(
    name = "covertjam",
    version,
    about = "Covertness/reliability/throughput analytics for a jammer-protected covert wireless link"
)]
struct Cli {
    /// Flat key=value configuration file (`#` comments).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the experiment seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; stdout when omitted. Sweeps get a `.meta.json` sidecar.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Thread count never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Configuration overrides, repeatable: --set key=value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warden-side detection figures at the configured threshold.
    Detect {
        /// Report the minimized detection error for the configured CSI case
        /// even when `mu_dbm` is set.
        #[arg(long)]
        minimize: bool,
    },
    /// Receiver outage probability and covert throughput at (τ, R).
    Outage,
    /// Jointly optimal selection threshold and transmission rate.
    Optimize,
    /// Monte-Carlo estimates with standard errors.
    Mc {
        #[arg(long, value_enum)]
        target: McTarget,
    },
    /// Sweep one variable; one CSV row per grid point.
    Sweep {
        #[arg(long, value_enum)]
        var: SweepVar,
        /// Comma-separated metric targets.
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        targets: Vec<Target>,
        /// Grid as lo:hi:points; defaults to the config lg_tau grid for
        /// --var lg-tau and is required otherwise.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Add Monte-Carlo companion columns where available.
        #[arg(long)]
        mc: bool,
    },
    /// Regenerate the data behind a reference figure (CSV + meta JSON).
    Reproduce {
        /// One of fig2..fig10.
        #[arg(long)]
        fig: String,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum McTarget {
    Detection,
    Outage,
    /// Detection-error estimates across observation horizons
    /// n ∈ {10, 100, 1000, 10000, ∞}.
    Convergence,
}

enum CliError {
    Config(ConfigError),
    Infeasible(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
        other => CliError::Config(ConfigError {
            field: "model".into(),
            message: other.to_string(),
        }),
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for kv in &cli.set {
        let (key, value) = kv.split_once('=').ok_or_else(|| ConfigError {
            field: "set".into(),
            message: format!("expected key=value, got `{kv}`"),
        })?;
        cfg.set(key.trim(), value)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn write_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization");
    text.push('\n');
    write_text(out, &text)
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Detect { minimize } => {
            let report = sweep::detect_point(&cfg, *minimize)?;
            write_json(&cli.out, &report)
        }
        Command::Outage => {
            let geometry = cfg.geometry()?;
            let params = cfg.system_params();
            let ctx = OutageContext::new(&geometry, &params).map_err(model_err)?;
            let report = covert_throughput(&ctx, cfg.rate_bits, params.tau);
            let limit_delta = 1.0 - ctx.lambda_of(cfg.rate_bits);
            write_json(
                &cli.out,
                &serde_json::json!({
                    "tau": params.tau,
                    "rate_bits": cfg.rate_bits,
                    "delta": report.delta,
                    "omega_bits": report.omega,
                    "delta_no_jammers": limit_delta,
                }),
            )
        }
        Command::Optimize => {
            let geometry = cfg.geometry()?;
            let params = cfg.system_params();
            let result = maximize_throughput(&geometry, &params, cfg.epsilon, cfg.warden_csi_case)
                .map_err(model_err)?;
            write_json(
                &cli.out,
                &serde_json::json!({
                    "case": cfg.warden_csi_case.as_str(),
                    "epsilon": cfg.epsilon,
                    "tau_star": result.tau_star,
                    "rate_star_bits": result.rate_star,
                    "omega_star_bits": result.omega_star,
                    "xi_bar_at_tau_star": result.xi_bar_at_tau_star,
                    "feasible": result.feasible,
                }),
            )
        }
        Command::Mc { target } => {
            let geometry = cfg.geometry()?;
            let params = cfg.system_params();
            let mc = cfg.mc_config();
            let value = match target {
                McTarget::Detection => {
                    // Evaluate at the configured μ, or at the case-2 optimal
                    // threshold when none is set.
                    let (mu, mu_source) = match cfg.mu_w() {
                        Some(mu) => (mu, "mu_dbm"),
                        None => {
                            let ctx =
                                DetectionContext::new(&geometry, &params).map_err(model_err)?;
                            let (_, mu_star) = covertjam::detection::min_avg_error_case2(&ctx)
                                .map_err(model_err)?;
                            (mu_star, "case2_optimum")
                        }
                    };
                    let sim = simulate_detection(&geometry, &params, mu, &mc);
                    serde_json::json!({
                        "target": "detection",
                        "mu_w": mu,
                        "mu_source": mu_source,
                        "trials": mc.trials,
                        "horizon": cfg.n_channel_uses,
                        "p_fa": sim.p_fa,
                        "p_md": sim.p_md,
                        "xi_bar": sim.xi_bar,
                    })
                }
                McTarget::Outage => {
                    let est = simulate_outage(&geometry, &params, cfg.rate_bits, &mc);
                    serde_json::json!({
                        "target": "outage",
                        "tau": params.tau,
                        "rate_bits": cfg.rate_bits,
                        "trials": mc.trials,
                        "delta": est,
                    })
                }
                McTarget::Convergence => {
                    let (mu, mu_source) = match cfg.mu_w() {
                        Some(mu) => (mu, "mu_dbm"),
                        None => {
                            let ctx =
                                DetectionContext::new(&geometry, &params).map_err(model_err)?;
                            let (_, mu_star) = covertjam::detection::min_avg_error_case2(&ctx)
                                .map_err(model_err)?;
                            (mu_star, "case2_optimum")
                        }
                    };
                    let table =
                        covertjam::montecarlo::finite_n_convergence(&geometry, &params, mu, &mc);
                    serde_json::json!({
                        "target": "convergence",
                        "mu_w": mu,
                        "mu_source": mu_source,
                        "trials": mc.trials,
                        "rows": table.iter().map(|(h, est)| serde_json::json!({
                            "horizon": match h {
                                covertjam::montecarlo::McHorizon::Finite(n) => serde_json::json!(n),
                                covertjam::montecarlo::McHorizon::Asymptotic => serde_json::json!("asymptotic"),
                            },
                            "xi_bar": est,
                        })).collect::<Vec<_>>(),
                    })
                }
            };
            write_json(&cli.out, &value)
        }
        Command::Sweep {
            var,
            targets,
            grid,
            mc,
        } => {
            let grid_values = match (grid, var) {
                (Some(spec), _) => parse_grid(spec)?,
                (None, SweepVar::LgTau) => cfg.lg_tau_grid(),
                (None, other) => {
                    return Err(ConfigError {
                        field: "grid".into(),
                        message: format!(
                            "--grid lo:hi:points is required for --var {}",
                            other.column()
                        ),
                    }
                    .into())
                }
            };
            let table = run_sweep(&cfg, *var, targets, &grid_values, *mc)?;
            write_text(&cli.out, &table.to_csv())?;
            if let Some(path) = &cli.out {
                let meta = serde_json::json!({
                    "command": "sweep",
                    "tool_version": env!("CARGO_PKG_VERSION"),
                    "variable": var.column(),
                    "grid": grid_values,
                    "targets": targets.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>(),
                    "monte_carlo": mc,
                    "config": cfg,
                });
                write_json(&Some(sidecar_path(path)), &meta)?;
            }
            Ok(())
        }
        Command::Reproduce { fig, out_dir } => {
            let figure = figures::build(fig, &cfg)?;
            let table = figures::evaluate(&figure)?;
            std::fs::create_dir_all(out_dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
            let csv_path = out_dir.join(format!("{fig}.csv"));
            let meta_path = out_dir.join(format!("{fig}.meta.json"));
            write_text(&Some(csv_path.clone()), &table.to_csv())?;
            write_json(&Some(meta_path.clone()), &figures::meta(&figure))?;
            eprintln!("wrote {} and {}", csv_path.display(), meta_path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
