//! Command-line front end: simulate trajectories, solve the static optimum,
//! run mechanics diagnostics over a trajectory file, simulate fixed-ratio
//! exchange, and fit/invert observed signals.
//!
//! Outputs are deterministic: identical config and arguments produce
//! byte-identical CSV/JSON/SVG files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crusoe_core::dynamics::integrate_first_order;
use crusoe_core::inference::{
    detect_collinearity, fit_exponential_affine, fit_saturation, reconstruct_constraint, FitForm,
    FitResult, SampledSignal,
};
use crusoe_core::mechanics::{
    build_force_spec, classify_force, energy_audit, hamilton_jacobi_residuals, lagrangian_residual,
    ForceGrid, HamiltonianVariant,
};
use crusoe_core::numerics::derivative;
use crusoe_core::statics::solve_static_optimum;
use crusoe_core::{GoodId, Trajectory};

mod config;
mod csvio;
mod error;
mod fmt;
mod report;
mod svg;

use config::RunConfig;
use error::CliError;
use report::Json;

#[derive(Parser)]
#[command(
    name = "crusoe",
    version,
    about = "Utility-driven consumption and exchange dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the static optimum of the configured model as JSON.
    Statics {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. --set E=200 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Integrate the consumption dynamics and write a trajectory CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (header `t,Q_B,Q_C`).
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG line plot of the trajectory.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Residual and energy diagnostics over a trajectory CSV.
    Mechanics {
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV produced by `simulate` (or compatible).
        #[arg(long)]
        traj: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Simulate fixed-ratio two-agent trade and write the 4-signal CSV.
    Exchange {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (header `t,QB_RC,QC_RC,QB_D,QC_D,U_RC,U_D`).
        #[arg(long)]
        out: PathBuf,
        /// Halt/equilibrium report path; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Fit a parametric form to a signal CSV and report side diagnostics.
    Infer {
        /// Signal CSV with header `t,Q_...`.
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Column to fit, e.g. Q_B.
        #[arg(long, default_value = "Q_B")]
        good: String,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FormArg {
    Saturation,
    ExponentialAffine,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}

fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    let mut cfg = RunConfig::parse(&text)?;
    for spec in overrides {
        cfg.apply_override(spec)?;
    }
    Ok(cfg)
}

fn emit(report: Json, out: Option<&Path>) -> Result<(), CliError> {
    let text = report.render();
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Statics { config, overrides } => {
            let cfg = load_config(&config, &overrides)?;
            let model = cfg.model()?;
            let opt = solve_static_optimum(&model);
            let report = Json::obj(vec![
                ("Q_B_star", Json::Num(opt.bundle.quantity(&GoodId::b())?)),
                ("Q_C_star", Json::Num(opt.bundle.quantity(&GoodId::c())?)),
                ("objective", Json::Num(opt.objective)),
                ("second_order_ok", Json::Bool(opt.second_order_ok)),
            ]);
            emit(report, None)
        }
        Command::Simulate {
            config,
            out,
            plot,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let model = cfg.model()?;
            let integrator = cfg.integrator()?;
            let traj = integrate_first_order(&model, &integrator, cfg.companion)?;
            csvio::write_trajectory(&out, &traj)?;
            if let Some(plot_path) = plot {
                let svg = svg::render_trajectory(&traj, "consumption trajectory");
                fs::write(&plot_path, svg)
                    .map_err(|e| CliError::io(&plot_path.display().to_string(), e))?;
            }
            Ok(())
        }
        Command::Mechanics {
            config,
            traj,
            out,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let model = cfg.model()?;
            let trajectory = csvio::read_trajectory(&traj)?;
            let report = mechanics_report(&trajectory, &model, cfg.hamiltonian)?;
            emit(report, out.as_deref())
        }
        Command::Exchange {
            config,
            out,
            report,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let scenario = cfg.exchange_scenario()?;
            let integrator = cfg.integrator()?;
            let traj = crusoe_core::exchange::simulate_exchange(&scenario, &integrator)?;
            csvio::write_exchange(&out, &traj)?;
            let (r_min, r_max) = crusoe_core::exchange::feasibility_bounds(&scenario)?;
            let (eq_rc, eq_d) = crusoe_core::exchange::exchange_equilibrium(&scenario)?;
            let n = traj.times.len() - 1;
            let json = Json::obj(vec![
                (
                    "equilibrium",
                    Json::obj(vec![
                        ("QB_RC", Json::Num(eq_rc.quantity(&GoodId::b())?)),
                        ("QC_RC", Json::Num(eq_rc.quantity(&GoodId::c())?)),
                        ("QB_D", Json::Num(eq_d.quantity(&GoodId::b())?)),
                        ("QC_D", Json::Num(eq_d.quantity(&GoodId::c())?)),
                    ]),
                ),
                (
                    "feasibility",
                    Json::obj(vec![
                        ("r_min", Json::Num(r_min)),
                        ("r_max", Json::Num(r_max)),
                    ]),
                ),
                (
                    "final",
                    Json::obj(vec![
                        ("QB_RC", Json::Num(traj.q_b_rc[n])),
                        ("QC_RC", Json::Num(traj.q_c_rc[n])),
                        ("QB_D", Json::Num(traj.q_b_d[n])),
                        ("QC_D", Json::Num(traj.q_c_d[n])),
                        ("U_RC", Json::Num(traj.u_rc[n])),
                        ("U_D", Json::Num(traj.u_d[n])),
                    ]),
                ),
                (
                    "halt_time",
                    match traj.halt_time {
                        Some(t) => Json::Num(t),
                        None => Json::Null,
                    },
                ),
                ("pareto_ok", Json::Bool(traj.pareto_ok)),
            ]);
            emit(json, report.as_deref())
        }
        Command::Infer {
            signal,
            form,
            good,
            out,
        } => {
            let trajectory = csvio::read_trajectory(&signal)?;
            let good_id = parse_good(&good)?;
            let target = SampledSignal::from_trajectory(&trajectory, &good_id)?;
            let fit = match form {
                FormArg::Saturation => fit_saturation(&target)?,
                FormArg::ExponentialAffine => fit_exponential_affine(&target)?,
            };
            let mut entries = vec![
                ("fit", fit_json(&fit)),
                ("good", Json::Str(format!("Q_{}", good_id.as_str()))),
            ];
            // when both standard goods are present, report the pairwise
            // diagnostics alongside the fit
            let both =
                trajectory.signal(&GoodId::b()).is_ok() && trajectory.signal(&GoodId::c()).is_ok();
            if both {
                let sig_b = SampledSignal::from_trajectory(&trajectory, &GoodId::b())?;
                let sig_c = SampledSignal::from_trajectory(&trajectory, &GoodId::c())?;
                let col = detect_collinearity(&sig_b, &sig_c)?;
                let constraint = reconstruct_constraint(&sig_b, &sig_c)?;
                entries.push((
                    "collinearity",
                    Json::obj(vec![
                        ("slope", Json::Num(col.slope)),
                        ("r_squared", Json::Num(col.r_squared)),
                        ("collinear", Json::Bool(col.collinear)),
                    ]),
                ));
                entries.push((
                    "constraint",
                    Json::obj(vec![
                        ("w_B", Json::Num(constraint.weights[0])),
                        ("w_C", Json::Num(constraint.weights[1])),
                        ("w_0", Json::Num(constraint.weights[2])),
                        ("residual", Json::Num(constraint.residual)),
                    ]),
                ));
            } else {
                entries.push(("collinearity", Json::Null));
                entries.push(("constraint", Json::Null));
            }
            emit(Json::obj(entries), out.as_deref())
        }
    }
}

fn parse_good(name: &str) -> Result<GoodId, CliError> {
    let stripped = name.strip_prefix("Q_").unwrap_or(name);
    GoodId::new(stripped).map_err(|e| CliError::Validation(e.to_string()))
}

fn fit_json(fit: &FitResult) -> Json {
    let mut entries = vec![
        ("rss", Json::Num(fit.rss)),
        ("iterations", Json::Num(fit.iterations as f64)),
        ("converged", Json::Bool(fit.converged)),
    ];
    match fit.form {
        FitForm::Saturation { amplitude, rate } => {
            entries.push(("form", Json::Str("saturation".into())));
            entries.push(("j", Json::Num(amplitude)));
            entries.push(("lambda", Json::Num(rate)));
        }
        FitForm::ExponentialAffine {
            offset,
            amplitude,
            rate,
        } => {
            entries.push(("form", Json::Str("exponential_affine".into())));
            entries.push(("a", Json::Num(offset)));
            entries.push(("b", Json::Num(amplitude)));
            entries.push(("lambda", Json::Num(rate)));
        }
    }
    Json::obj(entries)
}

fn mechanics_report(
    traj: &Trajectory,
    model: &crusoe_core::ValidatedModel,
    variant: HamiltonianVariant,
) -> Result<Json, CliError> {
    let force = build_force_spec(model);
    let lagrangian = lagrangian_residual(traj, model, &force)?;
    let (hj_r1, hj_r2) = hamilton_jacobi_residuals(traj, model, &force, variant)?;
    let audit = energy_audit(traj, model, &force)?;

    // classify the drag on a grid spanning the trajectory's phase range
    let q = traj.signal(&GoodId::b())?;
    let v = derivative(traj.times(), q);
    let (q_lo, q_hi) = spread(q);
    let v_amp = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-3);
    let axis = |lo: f64, hi: f64| (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect();
    let grid = ForceGrid::sample(
        |q, v| force.total(q, v),
        axis(q_lo, q_hi),
        axis(-v_amp, v_amp),
    )?;
    let class = classify_force(&grid);

    let max_abs = |xs: &[f64]| xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let n = traj.len() - 1;
    Ok(Json::obj(vec![
        ("classification", Json::Str(class.as_str().into())),
        (
            "hamiltonian_variant",
            Json::Str(
                match variant {
                    HamiltonianVariant::KineticOnly => "kinetic_only",
                    HamiltonianVariant::PaperLiteral => "paper_literal",
                }
                .into(),
            ),
        ),
        ("lagrangian_residual_max", Json::Num(max_abs(&lagrangian))),
        ("hj_r1_max", Json::Num(max_abs(&hj_r1))),
        ("hj_r2_max", Json::Num(max_abs(&hj_r2))),
        ("kinetic_initial", Json::Num(audit.kinetic[0])),
        ("kinetic_final", Json::Num(audit.kinetic[n])),
        ("dissipated_total", Json::Num(audit.dissipated[n])),
        (
            "balance_residual_max",
            Json::Num(max_abs(&audit.balance_residual)),
        ),
        ("samples", Json::Num(traj.len() as f64)),
    ]))
}

fn spread(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().fold(f64::INFINITY, |a, x| a.min(*x));
    let hi = values.iter().fold(f64::NEG_INFINITY, |a, x| a.max(*x));
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}
