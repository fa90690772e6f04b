//! `magnitudes`: apparatus-scale estimates in SI units, plus detectability
//! sweeps over (L, N) grids.

use std::time::Instant;

use collapse_core::magnitudes::{
    detectability_sweep, lambda_t, perception_bound, perception_bound_violated, ApparatusParams,
    DEFAULT_TAU_PER,
};

use crate::args::{parse_f64_list, Config, MagnitudesArgs};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub fn run(args: &MagnitudesArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;

    let l_spec = args
        .length
        .clone()
        .or_else(|| config.string("L"))
        .ok_or_else(|| CliError::validation("missing required parameter --L"))?;
    let n_spec = args
        .n_particles
        .clone()
        .or_else(|| config.string("N"))
        .ok_or_else(|| CliError::validation("missing required parameter --N"))?;
    let tau_col = args
        .tau_col
        .or_else(|| config.f64("tau-col"))
        .ok_or_else(|| CliError::validation("missing required parameter --tau-col"))?;
    let tau_per = args.tau_per.or_else(|| config.f64("tau-per")).unwrap_or(DEFAULT_TAU_PER);
    let a2 = args.a2.or_else(|| config.f64("a2")).unwrap_or(0.7);
    let threshold = args.threshold.or_else(|| config.f64("threshold")).unwrap_or(1e-6);

    let l_grid = parse_f64_list(&l_spec, "L")?;
    let n_grid = parse_f64_list(&n_spec, "N")?;

    let mut manifest = Manifest::new(
        "magnitudes",
        serde_json::json!({
            "L": l_grid,
            "N": n_grid,
            "tau-col": tau_col,
            "tau-per": tau_per,
            "a2": a2,
            "threshold": threshold,
        }),
    );

    // Scalar summary for the first grid point.
    let head = ApparatusParams {
        length_m: l_grid[0],
        n_particles: n_grid[0],
        tau_col_s: tau_col,
        tau_per_s: tau_per,
    };
    head.validate()?;
    let x0 = lambda_t(&head);
    let bound = perception_bound(&head);
    println!("lambdaT(L={}, N={}) = {x0:e}", head.length_m, head.n_particles);
    println!("perception bound T/tau_per = {bound:e}");
    println!("below perception bound: {}", perception_bound_violated(&head));

    let cells = detectability_sweep(&l_grid, &n_grid, tau_col, a2, threshold)?;
    let flagged = cells.iter().filter(|c| c.flagged).count();
    println!("sweep: {} cells, {flagged} flagged at threshold {threshold:e}", cells.len());

    manifest.results = serde_json::json!({
        "lambdaT_first_cell": x0,
        "perception_bound": bound,
        "perception_bound_violated": perception_bound_violated(&head),
        "cells": cells.len(),
        "flagged": flagged,
    });

    if output.formats.csv || output.formats.svg {
        let path = output.dir.join("magnitudes.csv");
        let rows: Vec<Vec<String>> = cells
            .iter()
            .map(|c| {
                vec![
                    fmt_f64(c.length_m),
                    fmt_f64(c.n_particles),
                    fmt_f64(c.lambda_t),
                    fmt_f64(c.deviation),
                    (c.flagged as u8).to_string(),
                    (c.regime_ok as u8).to_string(),
                ]
            })
            .collect();
        write_csv(
            &path,
            &["L_m", "N", "lambdaT", "deviation", "flagged", "regime_ok"],
            &rows,
        )?;
        manifest.add_artifact(&path)?;
        if output.formats.svg && cells.iter().any(|c| c.regime_ok) {
            super::plot::render_alongside(&path, &mut manifest)?;
        }
    }

    super::finish_manifest(manifest, &output.dir, started)
}
