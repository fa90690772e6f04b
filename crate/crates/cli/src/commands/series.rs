//! `series`: both evaluation modes of the dominance probability at a point.

use std::time::Instant;

use collapse_core::series::{total_probability, EvalMode};

use crate::args::{require_f64, Config, SeriesArgs};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub fn run(args: &SeriesArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;

    let a2 = require_f64(args.a2, &config, "a2")?;
    let lambda_t = require_f64(args.lambda_t, &config, "lambdaT")?;
    let particles = args
        .particles
        .or_else(|| config.u64("particles").map(|v| v as u8))
        .unwrap_or(1);
    if !matches!(particles, 1 | 2) {
        return Err(CliError::validation(format!("--particles must be 1 or 2, got {particles}")));
    }

    let p_series = total_probability(a2, lambda_t, particles, EvalMode::ClosedSeries)?;
    let p_quadrature = total_probability(a2, lambda_t, particles, EvalMode::Quadrature)?;
    println!("P_series     = {p_series:.10}");
    println!("P_quadrature = {p_quadrature:.10}");
    println!("deviation_from_born = {:.6e}", p_series - a2);

    let mut manifest = Manifest::new(
        "series",
        serde_json::json!({
            "a2": a2,
            "lambdaT": lambda_t,
            "particles": particles,
        }),
    );
    manifest.results = serde_json::json!({
        "P_series": p_series,
        "P_quadrature": p_quadrature,
        "deviation_from_born": p_series - a2,
    });

    if output.formats.csv {
        let path = output.dir.join("series.csv");
        write_csv(
            &path,
            &["a2", "lambdaT", "P_series", "P_quadrature", "deviation_from_born"],
            &[vec![
                fmt_f64(a2),
                fmt_f64(lambda_t),
                fmt_f64(p_series),
                fmt_f64(p_quadrature),
                fmt_f64(p_series - a2),
            ]],
        )?;
        manifest.add_artifact(&path)?;
    }

    super::finish_manifest(manifest, &output.dir, started)
}
