//! Command-line surface and configuration-file merging. Every value can
//! come from a `--config` JSON file (flat keys named like the flags);
//! explicit flags win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "collapse-sim",
    version,
    about = "Simulator for a local light-cone collapse model: dominance-probability \
             series, stochastic collapse races, characteristic Klein-Gordon grids, \
             and apparatus magnitude estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-series and quadrature dominance probability at one point
    Series(SeriesArgs),
    /// Monte Carlo collapse race, single particle with two peaks
    Mc(McArgs),
    /// Monte Carlo collapse race, two correlated particles
    Epr(McArgs),
    /// Characteristic Klein-Gordon grid for one or two collapses
    Kg(KgArgs),
    /// Post-collapse peak shifts of a symmetric two-peak state
    Shift(ShiftArgs),
    /// Apparatus magnitudes: race parameter, perception bound, sweeps
    Magnitudes(MagnitudesArgs),
    /// Series sweep (optionally with Monte Carlo columns) over grids
    Sweep(SweepArgs),
    /// Render a CSV artifact as a standalone SVG
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON file of default parameter values; flags override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts (default: current directory)
    #[arg(long = "output-dir", value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg
    #[arg(long)]
    pub formats: Option<String>,
    /// Master seed for stochastic commands
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long = "lambdaT")]
    pub lambda_t: Option<f64>,
    /// 1 or 2; both give the same closed series
    #[arg(long)]
    pub particles: Option<u8>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long)]
    pub a2: Option<f64>,
    /// Race parameter λT (with T fixed to one time unit)
    #[arg(long = "lambdaT")]
    pub lambda_t: Option<f64>,
    /// Hit rate λ; combine with --T instead of --lambdaT
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Signal delay T
    #[arg(long = "T")]
    pub t_delay: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// 1 (default) or 2; 2 runs the correlated-pair race
    #[arg(long)]
    pub particles: Option<u8>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct KgArgs {
    /// single (one collapse at the origin) or double (intersecting cones)
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Mass (also the plane-wave energy in the rest frame)
    #[arg(long)]
    pub mass: Option<f64>,
    /// Grid points per axis
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid extent along each light-cone axis (default 8/sqrt(beta))
    #[arg(long)]
    pub extent: Option<f64>,
    /// Separation of the two collapse centers (double mode)
    #[arg(long)]
    pub sep: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ShiftArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Separation of the two peaks
    #[arg(long)]
    pub sep: Option<f64>,
    /// Tail threshold for the shift-visibility condition
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct MagnitudesArgs {
    /// Apparatus length in meters; comma-separated list sweeps it
    #[arg(long = "L")]
    pub length: Option<String>,
    /// Particle count; comma-separated list sweeps it
    #[arg(long = "N")]
    pub n_particles: Option<String>,
    /// Single-particle collapse time in seconds
    #[arg(long = "tau-col")]
    pub tau_col: Option<f64>,
    /// Perception time in seconds
    #[arg(long = "tau-per")]
    pub tau_per: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    /// Deviation threshold for the detectability flag
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma-separated a² grid
    #[arg(long)]
    pub a2: Option<String>,
    /// Comma-separated λT grid
    #[arg(long = "lambdaT")]
    pub lambda_t: Option<String>,
    #[arg(long)]
    pub particles: Option<u8>,
    /// When given, adds Monte Carlo columns with this many trials per cell
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// CSV artifact produced by another subcommand
    pub file: PathBuf,
    /// line, heat, or auto (default)
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

// ---------------------------------------------------------------------------
// Config file + output options resolution.

/// Flat key-value defaults loaded from `--config`.
#[derive(Debug, Default)]
pub struct Config(serde_json::Map<String, serde_json::Value>);

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let body = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&body)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        match value {
            serde_json::Value::Object(map) => Ok(Config(map)),
            _ => Err(CliError::validation(format!(
                "config {}: top level must be an object",
                path.display()
            ))),
        }
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(|v| v.as_f64())
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(|v| v.as_u64())
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(|v| match v {
            serde_json::Value::String(s) => Some(s.clone()),
            serde_json::Value::Number(n) => Some(n.to_string()),
            _ => None,
        })
    }
}

/// Which artifact formats to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
    /// Whether the selection was explicit (flag or config) or a default.
    pub explicit: bool,
}

impl Formats {
    pub fn parse(spec: Option<&str>, default_csv: bool) -> CliResult<Formats> {
        let Some(spec) = spec else {
            return Ok(Formats { csv: default_csv, json: true, svg: false, explicit: false });
        };
        let mut formats = Formats { csv: false, json: false, svg: false, explicit: true };
        for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "csv" => formats.csv = true,
                "json" => formats.json = true,
                "svg" => formats.svg = true,
                other => {
                    return Err(CliError::validation(format!(
                        "formats: unknown format {other:?} (expected csv, json, svg)"
                    )))
                }
            }
        }
        Ok(formats)
    }
}

/// Resolved output options shared by all commands.
pub struct Output {
    pub dir: PathBuf,
    pub formats: Formats,
}

impl CommonArgs {
    /// Load the config file and resolve output directory and formats.
    /// `default_csv` controls whether csv is on without an explicit choice.
    pub fn resolve(&self, config: &Config, default_csv: bool) -> CliResult<Output> {
        let dir = self
            .output_dir
            .clone()
            .or_else(|| config.string("output-dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::validation(format!("output-dir {}: {e}", dir.display())))?;
        let spec = self.formats.clone().or_else(|| config.string("formats"));
        let formats = Formats::parse(spec.as_deref(), default_csv)?;
        Ok(Output { dir, formats })
    }

    pub fn seed(&self, config: &Config) -> u64 {
        self.seed.or_else(|| config.u64("seed")).unwrap_or(0)
    }
}

/// Required-parameter helper: fall back to the config file, then fail with
/// a named-field diagnostic.
pub fn require_f64(cli: Option<f64>, config: &Config, key: &str) -> CliResult<f64> {
    cli.or_else(|| config.f64(key))
        .ok_or_else(|| CliError::validation(format!("missing required parameter --{key}")))
}

pub fn parse_f64_list(spec: &str, key: &str) -> CliResult<Vec<f64>> {
    let values: Result<Vec<f64>, _> = spec
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values =
        values.map_err(|e| CliError::validation(format!("--{key}: {e} in {spec:?}")))?;
    if values.is_empty() {
        return Err(CliError::validation(format!("--{key}: empty list")));
    }
    Ok(values)
}
