//! Subcommand implementations.

pub mod kg;
pub mod magnitudes;
pub mod mc;
pub mod plot;
pub mod series;
pub mod shift;
pub mod sweep;

use std::time::Instant;

use crate::error::CliResult;
use crate::manifest::Manifest;

/// Stamp the wall time and write the manifest.
pub fn finish_manifest(
    mut manifest: Manifest,
    dir: &std::path::Path,
    started: Instant,
) -> CliResult<()> {
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    let path = manifest.write(dir)?;
    println!("manifest: {}", path.display());
    Ok(())
}
