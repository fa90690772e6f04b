//! `kg`: characteristic grids for single and double collapses.
//!
//! CSV columns: x_plus, x_minus, t, z, re_psi, im_psi, abs_psi. A binary
//! twin is written alongside: a 32-byte header (magic "KGLC", u32 n,
//! f64 extent, f64 mu, 8 zero bytes), then row-major little-endian f64
//! (re, im) pairs, x₊-major.

use std::io::Write;
use std::time::Instant;

use collapse_core::geometry::{FourVector, SpacetimeEvent};
use collapse_core::kg_solver::{
    collapse_boundary, default_extent, double_collapse_boundary, merged_double_collapse,
    rest_frame_collapsed, solve_goursat, zeroth_order_solution, GridSpec,
};
use collapse_core::Complex64;

use crate::args::{Config, KgArgs};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub const BINARY_MAGIC: &[u8; 4] = b"KGLC";

pub fn run(args: &KgArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;

    let mode = args
        .mode
        .clone()
        .or_else(|| config.string("mode"))
        .unwrap_or_else(|| "single".to_string());
    let beta = args.beta.or_else(|| config.f64("beta")).unwrap_or(1.0);
    let mass = args.mass.or_else(|| config.f64("mass")).unwrap_or(1.0);
    let n = args
        .n
        .or_else(|| config.u64("n").map(|v| v as usize))
        .unwrap_or(257);
    let extent = args
        .extent
        .or_else(|| config.f64("extent"))
        .unwrap_or_else(|| default_extent(beta));
    if !(beta > 0.0) {
        return Err(CliError::validation(format!("--beta must be positive, got {beta}")));
    }
    if !(mass > 0.0) {
        return Err(CliError::validation(format!("--mass must be positive, got {mass}")));
    }

    let mut manifest = Manifest::new(
        "kg",
        serde_json::json!({
            "mode": mode,
            "beta": beta,
            "mass": mass,
            "n": n,
            "extent": extent,
            "sep": args.sep.or_else(|| config.f64("sep")),
        }),
    );

    // Collect the grid values as (x_plus, x_minus, psi), x₊-major.
    let (origin, values): (SpacetimeEvent, Vec<Complex64>) = match mode.as_str() {
        "single" => {
            let bd = collapse_boundary(mass, 0.0, beta, mass, 1.0)?;
            let spec = GridSpec::new(SpacetimeEvent::new(0.0, 0.0), extent, n)?;
            let grid = solve_goursat(&bd, mass, &spec)?;
            let mut values = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    values.push(grid.value(i, j));
                }
            }
            println!("single collapse: n = {n}, extent = {extent}, mu = {mass}");
            (spec.origin, values)
        }
        "double" => {
            let sep = args.sep.or_else(|| config.f64("sep")).unwrap_or(4.0);
            if !(sep > 0.0) {
                return Err(CliError::validation(format!("--sep must be positive, got {sep}")));
            }
            let (z1, z2) = (-0.5 * sep, 0.5 * sep);
            let x1 = SpacetimeEvent::new(0.0, z1);
            let x2 = SpacetimeEvent::new(0.0, z2);
            let (apex, bd) = double_collapse_boundary(
                x1,
                x2,
                beta,
                FourVector::new(mass, 0.0),
                rest_frame_collapsed(mass, beta, z1, 1.0),
                rest_frame_collapsed(mass, beta, z2, 1.0),
            )?;
            let sol = zeroth_order_solution(&bd, apex, mass, 0.0)?;
            let h = extent / (n - 1) as f64;
            let mut values = Vec::with_capacity(n * n);
            let merged = merged_double_collapse(mass, beta, z1, z2, 1.0);
            let mut max_dev: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let xp = apex.x_plus() + i as f64 * h;
                    let xm = apex.x_minus() + j as f64 * h;
                    let ev = SpacetimeEvent::from_lightcone(xp, xm);
                    let v = sol.eval(xp, xm);
                    max_dev = max_dev.max((v - merged(ev.t, ev.z)).norm());
                    values.push(v);
                }
            }
            println!(
                "double collapse: centers at {z1} and {z2}, apex at (t={}, z={})",
                apex.t, apex.z
            );
            println!("max deviation from the merged-product closed form: {max_dev:.3e}");
            manifest.results = serde_json::json!({ "max_merged_product_deviation": max_dev });
            (apex, values)
        }
        other => {
            return Err(CliError::validation(format!(
                "--mode must be single or double, got {other:?}"
            )))
        }
    };

    let h = extent / (n - 1) as f64;
    if output.formats.csv || output.formats.svg {
        let path = output.dir.join("psi.csv");
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let xp = origin.x_plus() + i as f64 * h;
                let xm = origin.x_minus() + j as f64 * h;
                let ev = SpacetimeEvent::from_lightcone(xp, xm);
                let v = values[i * n + j];
                rows.push(vec![
                    fmt_f64(xp),
                    fmt_f64(xm),
                    fmt_f64(ev.t),
                    fmt_f64(ev.z),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                    fmt_f64(v.norm()),
                ]);
            }
        }
        write_csv(
            &path,
            &["x_plus", "x_minus", "t", "z", "re_psi", "im_psi", "abs_psi"],
            &rows,
        )?;
        manifest.add_artifact(&path)?;
        println!("grid: {}", path.display());
        if output.formats.svg {
            super::plot::render_alongside(&path, &mut manifest)?;
        }
    }

    // Binary twin, always emitted: compact and loss-free.
    let bin_path = output.dir.join("psi.bin");
    {
        let mut file = std::io::BufWriter::new(std::fs::File::create(&bin_path)?);
        file.write_all(BINARY_MAGIC)?;
        file.write_all(&(n as u32).to_le_bytes())?;
        file.write_all(&extent.to_le_bytes())?;
        file.write_all(&mass.to_le_bytes())?;
        file.write_all(&[0u8; 8])?;
        for v in &values {
            file.write_all(&v.re.to_le_bytes())?;
            file.write_all(&v.im.to_le_bytes())?;
        }
    }
    manifest.add_artifact(&bin_path)?;

    super::finish_manifest(manifest, &output.dir, started)
}
