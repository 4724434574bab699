//! Command-line driver: `sweep` runs the placement study, `capacity`
//! evaluates one RIS position and `baseline` the RIS-free LoS link.

pub mod config;
pub mod manifest;
pub mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde_json::json;
use thiserror::Error;

use risplace::optimizer::Convergence;
use risplace::sweep::{
    evaluate_position, run_campaign, run_los_baseline, ScenarioConfig, Spacing,
};

use config::{ConfigError, FileConfig, Source};
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "risplace", version, about = "Transmissive RIS placement sweeps for near-field THz MIMO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize every swept RIS position for every spacing and write CSV tables.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize a single RIS position and print the result as JSON.
    Capacity {
        #[command(flatten)]
        common: CommonArgs,
        /// RIS z-coordinate in meters.
        #[arg(long = "ris-z", allow_hyphen_values = true)]
        ris_z: f64,
    },
    /// LoS capacity without the RIS, one CSV row per spacing.
    Baseline {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for baseline.csv and manifest.json; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML), or a manifest.json from an earlier run.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario: paper-full or paper-small.
    #[arg(long)]
    pub preset: Option<String>,
    /// Overrides the optimizer seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Inter-antenna spacing(s) in wavelengths, replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    pub spacing: Vec<f64>,
    /// Config override `section.key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("every position failed")]
    AllFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::AllFailed => 3,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Configuration after presets, files, overrides and flags are merged.
pub struct Resolved {
    pub file: FileConfig,
    pub scenario: ScenarioConfig,
}

pub fn resolve(common: &CommonArgs) -> Result<Resolved, CliError> {
    let source = match (&common.config, &common.preset) {
        (Some(path), _) => Source::File(path.display().to_string()),
        (None, Some(name)) => Source::Preset(name.clone()),
        (None, None) => return Err(CliError::Usage("need --config or --preset".into())),
    };
    let mut file = config::resolve(&source, &common.overrides)?;
    if let Some(seed) = common.seed {
        file.optimizer.seed = seed;
    }
    if !common.spacing.is_empty() {
        file.sweep.spacings_lambda = common.spacing.clone();
        file.sweep.rx_spacings_lambda = None;
    }
    let scenario = file.to_scenario(&source, common.jobs)?;
    Ok(Resolved { file, scenario })
}

fn streams(cfg: &ScenarioConfig) -> usize {
    cfg.tx_shape.len().min(cfg.rx_shape.len())
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| io_err(path, e))?;
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

pub fn cmd_sweep(common: &CommonArgs, out: &Path) -> Result<(), CliError> {
    let Resolved { file, scenario } = resolve(common)?;
    let mut manifest = RunManifest::new(
        "sweep",
        file.to_toml(),
        scenario.optimizer.seed,
        json!({
            "out": out.display().to_string(),
            "jobs": common.jobs,
            "spacings_lambda": file.sweep.spacings_lambda,
            "overrides": common.overrides,
            "positions_z_m": scenario.range.positions(),
        }),
    );
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;

    let k = streams(&scenario);
    info!(
        "sweeping {} spacing(s) x {} position(s), {} RIS elements",
        scenario.spacings.len(),
        scenario.range.count,
        scenario.ris.len()
    );
    let campaign = run_campaign(&scenario).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut summary = Vec::new();
    for result in &campaign.spacings {
        let dir = out.join(format!("spacing_{}", result.spacing.label()));
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let rows: Vec<_> = result.positions.iter().map(|p| output::sweep_row(p, k)).collect();
        write_file(&dir.join("sweep.csv"), |w| {
            output::write_table(w, &output::sweep_header(k), &rows)
        })?;
        if let Some(baseline) = &result.baseline {
            match baseline {
                Ok(b) => write_file(&dir.join("baseline.csv"), |w| {
                    output::write_table(w, &output::baseline_header(k), &[output::baseline_row(b, k)])
                })?,
                Err(e) => warn!("baseline for spacing {} failed: {e}", result.spacing.label()),
            }
        }
        for failure in result.positions.iter().filter_map(|p| p.as_ref().err()) {
            warn!("spacing {}: {failure}", result.spacing.label());
        }
        summary.push(output::summary_row(result));
    }
    write_file(&out.join("summary.csv"), |w| {
        output::write_table(w, &output::summary_header(), &summary)
    })?;

    manifest.finish();
    let path = out.join("manifest.json");
    fs::write(&path, manifest.to_json()).map_err(|e| io_err(&path, e))?;

    let total: usize = campaign.spacings.iter().map(|s| s.positions.len()).sum();
    let failed: usize = campaign.spacings.iter().map(|s| s.failures()).sum();
    if total > 0 && failed == total {
        return Err(CliError::AllFailed);
    }
    Ok(())
}

/// Sweep index whose position is nearest to `z` (lowest index on ties), and
/// the z to evaluate: the grid value itself when `z` is within 1e-9 m of it.
pub fn snap_to_grid(positions: &[f64], z: f64) -> (usize, f64) {
    let (index, &grid) = positions
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - z).abs().total_cmp(&(b.1 - z).abs()))
        .expect("sweep has at least one position");
    let snapped = if (grid - z).abs() <= 1e-9 { grid } else { z };
    (index, snapped)
}

pub fn cmd_capacity(common: &CommonArgs, ris_z: f64) -> Result<serde_json::Value, CliError> {
    let Resolved { scenario, .. } = resolve(common)?;
    let (lo, hi) = (scenario.tx_z.min(scenario.rx_z), scenario.tx_z.max(scenario.rx_z));
    if !(ris_z > lo && ris_z < hi) {
        return Err(CliError::Usage(format!(
            "--ris-z {ris_z} must lie strictly between the Rx and Tx planes ({lo}, {hi})"
        )));
    }
    if scenario.spacings.len() != 1 && common.spacing.is_empty() {
        info!("several spacings configured; using the first");
    }
    let spacing = scenario.spacings[0];
    let (index, z) = snap_to_grid(&scenario.range.positions(), ris_z);
    let record = evaluate_position(&scenario, spacing, index, z).map_err(|f| CliError::Usage(f.to_string()))?;
    let fresnel = record.fresnel;
    let warning = (!fresnel.both_inside()).then(|| {
        format!(
            "outside the Fresnel zone (Tx inside: {}, Rx inside: {}); the near-field model may not hold",
            fresnel.tx_inside, fresnel.rx_inside
        )
    });
    Ok(json!({
        "z_m": record.z,
        "seed": scenario.optimizer.seed,
        "stream": index,
        "spacing_tx_lambda": spacing.tx,
        "spacing_rx_lambda": spacing.rx,
        "capacity_bps_hz": record.capacity,
        "singular_values": record.singular_values,
        "variance": record.variance,
        "powers_w": record.powers,
        "dof": record.dof,
        "iterations": record.iterations,
        "converged": record.convergence == Convergence::Converged,
        "fresnel": {
            "tx_inside": fresnel.tx_inside,
            "rx_inside": fresnel.rx_inside,
            "tx_distance_m": fresnel.tx_distance,
            "rx_distance_m": fresnel.rx_distance,
            "lower_m": fresnel.bounds.lower,
            "upper_m": fresnel.bounds.upper,
        },
        "warning": warning,
    }))
}

pub fn cmd_baseline(common: &CommonArgs, out: Option<&Path>) -> Result<(), CliError> {
    let Resolved { file, scenario } = resolve(common)?;
    let k = streams(&scenario);
    let rows = scenario
        .spacings
        .iter()
        .map(|&s: &Spacing| {
            run_los_baseline(&scenario, s)
                .map(|b| output::baseline_row(&b, k))
                .map_err(|e| CliError::Usage(format!("spacing {}: {e}", s.label())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let header = output::baseline_header(k);
    match out {
        None => {
            let stdout = io::stdout().lock();
            output::write_table(stdout, &header, &rows).map_err(|e| CliError::Io(e.to_string()))
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            write_file(&dir.join("baseline.csv"), |w| output::write_table(w, &header, &rows))?;
            let mut manifest = RunManifest::new(
                "baseline",
                file.to_toml(),
                scenario.optimizer.seed,
                json!({
                    "out": dir.display().to_string(),
                    "spacings_lambda": file.sweep.spacings_lambda,
                    "overrides": common.overrides,
                }),
            );
            manifest.finish();
            let path = dir.join("manifest.json");
            fs::write(&path, manifest.to_json()).map_err(|e| io_err(&path, e))
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Sweep { common, out } => cmd_sweep(common, out),
        Command::Capacity { common, ris_z } => cmd_capacity(common, *ris_z).and_then(|v| {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v).expect("json value"))
                .map_err(|e| CliError::Io(e.to_string()))
        }),
        Command::Baseline { common, out } => cmd_baseline(common, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
