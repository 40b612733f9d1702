//! `iop-sim`: command-line front end for the in-paint terahertz channel
//! model. Loads one JSON config per run, evaluates the requested scenario,
//! and writes reproducible CSV (plus optional SVG charts).
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 when the model
//! or calibration rejects a physically meaningless request.

mod config;
mod error;
mod output;
mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use iop_core::{
    air_capacity, calibrate_absorption, link_capacity, materials_to_json, path_loss_for,
    run_netsim, Error as ModelError, PathKind, Placement,
};

use config::{materials_db, LoadedConfig, RunConfig};
use error::{CliError, CliResult};
use output::{num, Outputs};

#[derive(Parser)]
#[command(
    name = "iop-sim",
    version,
    about = "Terahertz in-paint link simulator: path loss, capacity, and network connectivity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration (see configs/ for examples)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV/SVG/JSON artifacts
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Override the configured random seed
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Also render an SVG chart next to each CSV
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect or validate material definitions
    Materials {
        #[command(subcommand)]
        action: MaterialsAction,
    },
    /// Fit paint and plaster absorption to the reference attenuation deltas
    Calibrate,
    /// Sweep per-path loss budgets over depth, separation, and frequency
    Pathloss,
    /// Sweep link capacity, with an optional free-air reference curve
    Capacity,
    /// Monte Carlo connectivity of a random in-paint node population
    Netsim,
}

#[derive(Subcommand)]
enum MaterialsAction {
    /// Print the material database (presets plus any overlay)
    List,
    /// Check a materials overlay file and exit
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iop-sim: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Materials { action } => run_materials(cli, action),
        Command::Calibrate => run_calibrate(cli),
        Command::Pathloss => run_pathloss(cli),
        Command::Capacity => run_capacity(cli),
        Command::Netsim => run_netsim_scenario(cli),
    }
}

fn require_config(cli: &Cli, command: &str) -> CliResult<LoadedConfig> {
    let path = cli.config.as_deref().ok_or_else(|| {
        CliError::config(format!("the '{command}' command needs --config <file>"))
    })?;
    LoadedConfig::read(path)
}

fn scenario_mismatch(found: &RunConfig, wanted: &str) -> CliError {
    CliError::config(format!(
        "config declares scenario '{}' but the '{wanted}' command was invoked",
        found.scenario()
    ))
}

/// Treat infeasible path kinds as absent rows; propagate real failures.
fn feasible_loss(
    stack: &iop_core::LayerStack<f64>,
    placement: &Placement<f64>,
    kind: PathKind,
    f: f64,
    params: &iop_core::ModelParams<f64>,
) -> CliResult<Option<iop_core::PathLoss<f64>>> {
    match path_loss_for(stack, placement, kind, f, params) {
        Ok(loss) => Ok(Some(loss)),
        Err(ModelError::InfeasibleLateralPath { .. }) | Err(ModelError::NoCriticalAngle { .. }) => {
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// materials
// ---------------------------------------------------------------------------

fn run_materials(cli: &Cli, action: &MaterialsAction) -> CliResult<()> {
    match action {
        MaterialsAction::List => {
            let db = match &cli.config {
                Some(_) => {
                    let loaded = require_config(cli, "materials list")?;
                    let RunConfig::Materials(cfg) = &loaded.run else {
                        return Err(scenario_mismatch(&loaded.run, "materials"));
                    };
                    materials_db(&cfg.materials, &loaded)?
                }
                None => iop_core::MaterialDb::<f64>::with_presets(),
            };
            // Trim to six decimals for the table; exact values live in CSV.
            let short = |v: f64| {
                let s = format!("{v:.6}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            };
            println!(
                "{:<22} {:<8} {:>9} {:<22} {:>15}",
                "name", "source", "index", "absorption", "roughness_rms_m"
            );
            for (spec, provenance) in db.iter() {
                let absorption = match spec.absorption() {
                    iop_core::AbsorptionProfile::Constant(a) => format!("{} /m", num(*a)),
                    iop_core::AbsorptionProfile::Samples(s) => {
                        format!("{} samples", s.len())
                    }
                };
                println!(
                    "{:<22} {:<8} {:>9} {:<22} {:>15}",
                    spec.name(),
                    provenance.to_string(),
                    short(spec.refractive_index()),
                    absorption,
                    num(spec.roughness_rms())
                );
            }
            Ok(())
        }
        MaterialsAction::Validate => {
            let loaded = require_config(cli, "materials validate")?;
            let RunConfig::Materials(cfg) = &loaded.run else {
                return Err(scenario_mismatch(&loaded.run, "materials"));
            };
            let path = cfg.materials.as_deref().ok_or_else(|| {
                CliError::config("materials validate needs a 'materials' file path in the config")
            })?;
            let db = iop_core::load_materials::<f64>(loaded.resolve(path))?;
            println!(
                "materials file '{path}' is valid ({} definitions after overlaying presets)",
                db.len()
            );
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

fn run_calibrate(cli: &Cli) -> CliResult<()> {
    // Calibration runs on the published operating point when no config is
    // given; a config may override materials, stack, and targets.
    let (db, stack_cfg, model_cfg, targets, sha) = match &cli.config {
        Some(_) => {
            let loaded = require_config(cli, "calibrate")?;
            let RunConfig::Calibrate(cfg) = &loaded.run else {
                return Err(scenario_mismatch(&loaded.run, "calibrate"));
            };
            let db = materials_db(&cfg.materials, &loaded)?;
            (
                db,
                cfg.stack.clone(),
                cfg.model.clone(),
                cfg.targets(),
                loaded.sha256.clone(),
            )
        }
        None => {
            let cfg = config::CalibrateConfig::default();
            (
                iop_core::MaterialDb::<f64>::with_presets(),
                cfg.stack.clone(),
                cfg.model.clone(),
                cfg.targets(),
                "none".to_string(),
            )
        }
    };
    let stack = stack_cfg.build(&db)?;
    let params = model_cfg.build();
    let fit = calibrate_absorption(&stack, &targets, &params)?;

    println!("fitted absorption coefficients:");
    println!("  {:<24} {} /m", stack.paint().name(), num(fit.alpha_paint_per_m));
    println!(
        "  {:<24} {} /m",
        stack.plaster().name(),
        num(fit.alpha_plaster_per_m)
    );
    println!("held-out residuals (predicted - reference span delta, dB):");
    println!("  {:<24} {:+.3}", "air-side reflected", fit.residual_rw_a_db);
    println!("  {:<24} {:+.3}", "plaster-side reflected", fit.residual_rw_p_db);
    println!("  {:<24} {:+.3}", "air-side lateral", fit.residual_lw_a_db);

    // Emit the fit as a materials overlay so later runs can load it.
    let paint = stack
        .paint()
        .clone()
        .with_constant_absorption(fit.alpha_paint_per_m)?;
    let plaster = stack
        .plaster()
        .clone()
        .with_constant_absorption(fit.alpha_plaster_per_m)?;
    let json = materials_to_json(&[paint, plaster])?;
    let outputs = Outputs::new(&cli.out, &sha, cli.seed.unwrap_or(0))?;
    let path = outputs.text("materials-calibrated.json", &json)?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// pathloss
// ---------------------------------------------------------------------------

fn run_pathloss(cli: &Cli) -> CliResult<()> {
    let loaded = require_config(cli, "pathloss")?;
    let RunConfig::Pathloss(cfg) = &loaded.run else {
        return Err(scenario_mismatch(&loaded.run, "pathloss"));
    };
    let db = materials_db(&cfg.materials, &loaded)?;
    let stack = cfg.stack.build(&db)?;
    let params = cfg.model.build();
    let depths = cfg.depths_m.points("depths_m")?;
    let separations = cfg.separations_m.points("separations_m")?;
    let frequencies = cfg.frequencies_hz.points("frequencies_hz")?;

    let seed = cli.seed.unwrap_or(0);
    let outputs = Outputs::new(&cli.out, &loaded.sha256, seed)?;

    let mut rows = Vec::new();
    let mut charts: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for &depth in &depths {
        for &rho in &separations {
            for &f in &frequencies {
                let placement = Placement::new(depth, depth, rho)?;
                stack.validate_placement(&placement)?;
                for kind in PathKind::ALL {
                    let Some(loss) = feasible_loss(&stack, &placement, kind, f, &params)? else {
                        continue;
                    };
                    rows.push(vec![
                        num(depth),
                        num(rho),
                        num(f),
                        kind.label().to_string(),
                        num(loss.spreading_db),
                        num(loss.absorption_db),
                        num(loss.reflection_db),
                        num(loss.roughness_db),
                        num(loss.total_db()),
                    ]);
                    if cli.svg {
                        let mut label = format!("{} rho={} m", kind.label(), num(rho));
                        if frequencies.len() > 1 {
                            label.push_str(&format!(" f={} Hz", num(f)));
                        }
                        charts.entry(label).or_default().push((depth, loss.total_db()));
                    }
                }
            }
        }
    }

    let path = outputs.csv(
        "pathloss.csv",
        &[
            "burial_depth_m",
            "rho_D_m",
            "f_hz",
            "path_kind",
            "spreading_db",
            "absorption_db",
            "reflection_db",
            "roughness_db",
            "total_db",
        ],
        rows,
    )?;
    println!("wrote {}", path.display());

    if cli.svg {
        let series: Vec<svg::Series> = charts
            .into_iter()
            .map(|(label, points)| svg::Series { label, points })
            .collect();
        let chart = svg::line_chart(
            "Per-path loss vs burial depth",
            "burial depth (m)",
            "total loss (dB)",
            &series,
        );
        let path = outputs.text("pathloss.svg", &chart)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

fn run_capacity(cli: &Cli) -> CliResult<()> {
    let loaded = require_config(cli, "capacity")?;
    let RunConfig::Capacity(cfg) = &loaded.run else {
        return Err(scenario_mismatch(&loaded.run, "capacity"));
    };
    let db = materials_db(&cfg.materials, &loaded)?;
    let stack = cfg.stack.build(&db)?;
    let params = cfg.model.build();
    let band = cfg.band()?;
    let budget = cfg.budget();
    let combining = cfg.combining.build();
    let depths = cfg.depths_m.points("depths_m")?;
    let separations = cfg.separations_m.points("separations_m")?;

    let seed = cli.seed.unwrap_or(0);
    let outputs = Outputs::new(&cli.out, &loaded.sha256, seed)?;

    let mut rows = Vec::new();
    let mut charts: Vec<svg::Series> = Vec::new();
    for &depth in &depths {
        let mut points = Vec::new();
        for &rho in &separations {
            let placement = Placement::new(depth, depth, rho)?;
            stack.validate_placement(&placement)?;
            let report = link_capacity(&stack, &placement, &band, &budget, &params, combining)?;
            rows.push(vec![
                num(rho),
                num(depth),
                "paint-multipath".to_string(),
                num(report.capacity_bps),
            ]);
            points.push((rho, report.capacity_bps));
        }
        charts.push(svg::Series {
            label: format!("paint depth={} m", num(depth)),
            points,
        });
    }
    if cfg.include_air {
        let mut points = Vec::new();
        for &rho in &separations {
            let report = air_capacity(stack.air(), rho, &band, &budget, &params)?;
            rows.push(vec![
                num(rho),
                String::new(),
                "air".to_string(),
                num(report.capacity_bps),
            ]);
            points.push((rho, report.capacity_bps));
        }
        charts.push(svg::Series {
            label: "air".to_string(),
            points,
        });
    }

    let path = outputs.csv(
        "capacity.csv",
        &["rho_D_m", "depth_m", "medium", "capacity_bps"],
        rows,
    )?;
    println!("wrote {}", path.display());

    if cli.svg {
        let chart = svg::line_chart(
            "Link capacity vs separation",
            "horizontal separation (m)",
            "capacity (bit/s)",
            &charts,
        );
        let path = outputs.text("capacity.svg", &chart)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// netsim
// ---------------------------------------------------------------------------

fn run_netsim_scenario(cli: &Cli) -> CliResult<()> {
    let loaded = require_config(cli, "netsim")?;
    let RunConfig::Netsim(cfg) = &loaded.run else {
        return Err(scenario_mismatch(&loaded.run, "netsim"));
    };
    let db = materials_db(&cfg.materials, &loaded)?;
    let stack = cfg.stack.build(&db)?;
    let params = cfg.model.build();
    let core_cfg = cfg.build()?;
    let seed = cli.seed.unwrap_or(cfg.seed);

    let outputs = Outputs::new(&cli.out, &loaded.sha256, seed)?;
    let report = run_netsim(&stack, &core_cfg, &params, seed, cfg.parallelism())?;

    let mut rows = Vec::new();
    for (i, trial) in report.trials.iter().enumerate() {
        rows.push(vec![
            "trial".to_string(),
            i.to_string(),
            trial.n_nodes.to_string(),
            trial.n_links.to_string(),
            num(trial.mean_degree),
            num(trial.largest_component_fraction),
            num(trial.isolated_fraction),
        ]);
    }
    type Pick = fn(&iop_core::Aggregate) -> f64;
    let summary_rows: [(&str, Pick); 2] = [("mean", |a| a.mean), ("stddev", |a| a.stddev)];
    for (record, pick) in summary_rows {
        rows.push(vec![
            record.to_string(),
            String::new(),
            num(pick(&report.nodes)),
            num(pick(&report.links)),
            num(pick(&report.mean_degree)),
            num(pick(&report.largest_component_fraction)),
            num(pick(&report.isolated_fraction)),
        ]);
    }

    let path = outputs.csv(
        "netsim.csv",
        &[
            "record",
            "trial",
            "n_nodes",
            "n_links",
            "mean_degree",
            "largest_component_fraction",
            "isolated_fraction",
        ],
        rows,
    )?;
    println!("wrote {}", path.display());

    if cli.svg {
        let per_trial = |pick: fn(&iop_core::TrialResult) -> f64| {
            report
                .trials
                .iter()
                .enumerate()
                .map(|(i, t)| (i as f64, pick(t)))
                .collect()
        };
        let series = [
            svg::Series {
                label: "largest component fraction".to_string(),
                points: per_trial(|t| t.largest_component_fraction),
            },
            svg::Series {
                label: "isolated fraction".to_string(),
                points: per_trial(|t| t.isolated_fraction),
            },
        ];
        let chart = svg::line_chart(
            "Connectivity per trial",
            "trial",
            "fraction of nodes",
            &series,
        );
        let path = outputs.text("netsim.svg", &chart)?;
        println!("wrote {}", path.display());
    }

    println!(
        "{} trials: nodes {:.1}, mean degree {:.2}, largest component {:.3}, isolated {:.3}",
        report.trials.len(),
        report.nodes.mean,
        report.mean_degree.mean,
        report.largest_component_fraction.mean,
        report.isolated_fraction.mean
    );
    Ok(())
}
