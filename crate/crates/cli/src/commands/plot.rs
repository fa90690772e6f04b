//! `plot`: render a recognized CSV artifact as a standalone SVG.
//!
//! Recognized schemas:
//! * grids with t, z, abs_psi columns → heat map of |ψ| over (z, t);
//! * tables with a lambdaT column and series/deviation columns → line plot
//!   grouped by a² (or by N for magnitude sweeps).

use std::path::Path;
use std::time::Instant;

use crate::args::{Config, PlotArgs};
use crate::csvio::NumericCsv;
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::svg::{heat_map, line_plot, LineSeries};

pub fn run(args: &PlotArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;
    let mode = args
        .mode
        .clone()
        .or_else(|| config.string("mode"))
        .unwrap_or_else(|| "auto".to_string());

    let (svg, resolved_mode) = render_csv(&args.file, &mode)?;
    let stem = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".to_string());
    let path = output.dir.join(format!("{stem}.svg"));
    std::fs::write(&path, svg)?;
    println!("plot: {}", path.display());

    let mut manifest = Manifest::new(
        "plot",
        serde_json::json!({
            "file": args.file.display().to_string(),
            "mode": resolved_mode,
        }),
    );
    manifest.add_artifact(&path)?;
    super::finish_manifest(manifest, &output.dir, started)
}

/// Render a recognized CSV into SVG text; returns the resolved mode.
pub fn render_csv(file: &Path, mode: &str) -> CliResult<(String, &'static str)> {
    let table = NumericCsv::read(file)?;
    if table.rows.is_empty() {
        return Err(CliError::validation(format!("{}: no data rows to plot", file.display())));
    }
    let is_grid = table.column("abs_psi").is_some();
    let resolved_mode = match mode {
        "auto" => {
            if is_grid {
                "heat"
            } else {
                "line"
            }
        }
        "heat" => "heat",
        "line" => "line",
        other => {
            return Err(CliError::validation(format!(
                "--mode must be line, heat or auto, got {other:?}"
            )))
        }
    };
    let svg = match resolved_mode {
        "heat" => grid_heat_map(&table, file)?,
        _ => table_line_plot(&table, file)?,
    };
    Ok((svg, resolved_mode))
}

/// Write the SVG twin of a freshly emitted CSV artifact, for commands asked
/// for the svg format directly.
pub fn render_alongside(csv_path: &Path, manifest: &mut Manifest) -> CliResult<()> {
    let (svg, _) = render_csv(csv_path, "auto")?;
    let path = csv_path.with_extension("svg");
    std::fs::write(&path, svg)?;
    manifest.add_artifact(&path)?;
    println!("plot: {}", path.display());
    Ok(())
}

fn grid_heat_map(table: &NumericCsv, file: &Path) -> CliResult<String> {
    let (zc, tc, vc) = match (table.column("z"), table.column("t"), table.column("abs_psi")) {
        (Some(z), Some(t), Some(v)) => (z, t, v),
        _ => {
            return Err(CliError::validation(format!(
                "{}: heat maps need t, z and abs_psi columns",
                file.display()
            )))
        }
    };
    let cells: Vec<(f64, f64, f64)> =
        table.rows.iter().map(|r| (r[zc], r[tc], r[vc])).collect();
    heat_map("|psi| over spacetime", "z", "t", &cells)
        .ok_or_else(|| CliError::validation(format!("{}: no finite data", file.display())))
}

fn table_line_plot(table: &NumericCsv, file: &Path) -> CliResult<String> {
    let x_col = table
        .column("lambdaT")
        .ok_or_else(|| CliError::validation(format!("{}: no lambdaT column", file.display())))?;
    // Group rows by the first recognized grouping column, plot every known
    // value column present.
    let group = table
        .column("a2")
        .map(|c| ("a2", c))
        .or_else(|| table.column("N").map(|c| ("N", c)));
    let value_columns: Vec<(&str, usize)> = ["P_series", "P_quadrature", "p_hat", "deviation",
        "deviation_mc", "deviation_series", "deviation_from_born"]
    .iter()
    .filter_map(|name| table.column(name).map(|c| (*name, c)))
    .collect();
    if value_columns.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no recognized value columns",
            file.display()
        )));
    }

    let mut series: Vec<LineSeries> = Vec::new();
    match group {
        Some((gname, gcol)) => {
            let mut keys: Vec<f64> = table.rows.iter().map(|r| r[gcol]).collect();
            keys.sort_by(f64::total_cmp);
            keys.dedup_by(|a, b| a == b);
            for key in keys {
                for &(vname, vcol) in &value_columns {
                    let points: Vec<(f64, f64)> = table
                        .rows
                        .iter()
                        .filter(|r| r[gcol] == key)
                        .map(|r| (r[x_col], r[vcol]))
                        .collect();
                    series.push(LineSeries { label: format!("{vname} ({gname}={key})"), points });
                }
            }
        }
        None => {
            for &(vname, vcol) in &value_columns {
                let points: Vec<(f64, f64)> =
                    table.rows.iter().map(|r| (r[x_col], r[vcol])).collect();
                series.push(LineSeries { label: vname.to_string(), points });
            }
        }
    }
    line_plot("dominance probability", "lambdaT", "P", &series)
        .ok_or_else(|| CliError::validation(format!("{}: no finite data", file.display())))
}
