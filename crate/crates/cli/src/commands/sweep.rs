//! `sweep`: the dominance probability over (a², λT) grids. Without trials
//! the output is the closed-series/quadrature table; with `--trials` each
//! cell also gets a Monte Carlo estimate (the deviation-curve table).

use std::time::Instant;

use collapse_core::collapse_process::{derive_seed, estimate, DeviationRow, ProcessParams};
use collapse_core::series::{closed_series_total, total_probability, EvalMode};
use rayon::prelude::*;

use crate::args::{parse_f64_list, Config, SweepArgs};
use crate::commands::mc::{thread_pool, DEFAULT_MAX_EVENTS};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;
    let seed = args.common.seed(&config);

    let a2_spec = args
        .a2
        .clone()
        .or_else(|| config.string("a2"))
        .ok_or_else(|| CliError::validation("missing required parameter --a2"))?;
    let x_spec = args
        .lambda_t
        .clone()
        .or_else(|| config.string("lambdaT"))
        .ok_or_else(|| CliError::validation("missing required parameter --lambdaT"))?;
    let a2_grid = parse_f64_list(&a2_spec, "a2")?;
    let x_grid = parse_f64_list(&x_spec, "lambdaT")?;
    let particles = args
        .particles
        .or_else(|| config.u64("particles").map(|v| v as u8))
        .unwrap_or(1);
    let trials = args.trials.or_else(|| config.u64("trials"));

    let mut manifest = Manifest::new(
        "sweep",
        serde_json::json!({
            "a2": a2_grid,
            "lambdaT": x_grid,
            "particles": particles,
            "trials": trials,
        }),
    );
    manifest.seed = Some(seed);

    match trials {
        None => {
            let mut rows = Vec::new();
            for &a2 in &a2_grid {
                for &x in &x_grid {
                    let p_series = total_probability(a2, x, particles, EvalMode::ClosedSeries)?;
                    let p_quadrature =
                        total_probability(a2, x, particles, EvalMode::Quadrature)?;
                    rows.push(vec![
                        fmt_f64(a2),
                        fmt_f64(x),
                        fmt_f64(p_series),
                        fmt_f64(p_quadrature),
                        fmt_f64(p_series - a2),
                    ]);
                }
            }
            println!("sweep: {} series cells", rows.len());
            manifest.results = serde_json::json!({ "cells": rows.len() });
            if output.formats.csv || output.formats.svg {
                let path = output.dir.join("sweep.csv");
                write_csv(
                    &path,
                    &["a2", "lambdaT", "P_series", "P_quadrature", "deviation_from_born"],
                    &rows,
                )?;
                manifest.add_artifact(&path)?;
                println!("table: {}", path.display());
                if output.formats.svg {
                    super::plot::render_alongside(&path, &mut manifest)?;
                }
            }
        }
        Some(trials) => {
            if trials == 0 {
                return Err(CliError::validation("--trials must be at least 1"));
            }
            let pool = thread_pool()?;
            // Same seeds and tallies as the sequential reference path, so
            // the table is independent of the parallel schedule.
            let mut cells: Vec<(u64, f64, f64)> = Vec::new();
            for (i, &a2) in a2_grid.iter().enumerate() {
                for (j, &x) in x_grid.iter().enumerate() {
                    cells.push(((i * x_grid.len() + j) as u64, a2, x));
                }
            }
            let rows: Vec<DeviationRow> = pool.install(|| {
                cells
                    .par_iter()
                    .map(|&(cell, a2, x)| -> CliResult<DeviationRow> {
                        let params = ProcessParams {
                            a2,
                            lambda: x,
                            t_delay: 1.0,
                            master_seed: derive_seed(seed, cell),
                            max_events: DEFAULT_MAX_EVENTS,
                            trials,
                        };
                        let est = estimate(&params)?;
                        let p_series = closed_series_total(a2, x)?;
                        Ok(DeviationRow {
                            a2,
                            lambda_t: x,
                            p_hat: est.p_hat,
                            std_error: est.std_error,
                            p_series,
                            deviation_mc: est.p_hat - a2,
                            deviation_series: p_series - a2,
                            truncation_fraction: est.truncation_fraction,
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()
            })?;
            println!("deviation curve: {} cells at {trials} trials each", rows.len());
            manifest.rule_variant_id =
                Some(collapse_core::collapse_process::RULE_VARIANT_ID);
            manifest.results = serde_json::json!({ "cells": rows.len(), "trials": trials });
            if output.formats.csv || output.formats.svg {
                let path = output.dir.join("deviation_curve.csv");
                let csv_rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            fmt_f64(r.a2),
                            fmt_f64(r.lambda_t),
                            fmt_f64(r.p_hat),
                            fmt_f64(r.std_error),
                            fmt_f64(r.p_series),
                            fmt_f64(r.deviation_mc),
                            fmt_f64(r.deviation_series),
                            fmt_f64(r.truncation_fraction),
                        ]
                    })
                    .collect();
                write_csv(
                    &path,
                    &[
                        "a2",
                        "lambdaT",
                        "p_hat",
                        "std_error",
                        "p_series",
                        "deviation_mc",
                        "deviation_series",
                        "truncation_fraction",
                    ],
                    &csv_rows,
                )?;
                manifest.add_artifact(&path)?;
                println!("table: {}", path.display());
                if output.formats.svg {
                    super::plot::render_alongside(&path, &mut manifest)?;
                }
            }
        }
    }

    super::finish_manifest(manifest, &output.dir, started)
}
