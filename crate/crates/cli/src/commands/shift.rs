//! `shift`: post-collapse centers of a symmetric two-peak state, the
//! closed formula next to the analytic double-hit state.

use std::time::Instant;

use collapse_core::geometry::SpacetimeEvent;
use collapse_core::wavefunction::{
    tail_shift_condition_with, two_peak_shift, HitRecord, WaveState, TAIL_SHIFT_THRESHOLD,
};
use collapse_core::Complex64;

use crate::args::{require_f64, Config, ShiftArgs};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::wavestate_json::WaveStateDoc;

pub fn run(args: &ShiftArgs) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    let output = args.common.resolve(&config, true)?;

    let alpha = require_f64(args.alpha, &config, "alpha")?;
    let beta = require_f64(args.beta, &config, "beta")?;
    let sep = require_f64(args.sep, &config, "sep")?;
    let threshold = args
        .threshold
        .or_else(|| config.f64("threshold"))
        .unwrap_or(TAIL_SHIFT_THRESHOLD);
    if !(alpha > 0.0 && beta > 0.0 && sep > 0.0) {
        return Err(CliError::validation(
            "--alpha, --beta and --sep must all be positive".to_string(),
        ));
    }

    let (z1, z2) = (-0.5 * sep, 0.5 * sep);
    let (z1_new, z2_new) = two_peak_shift(alpha, beta, z1, z2);
    let tail_shift = tail_shift_condition_with(alpha, beta, sep, threshold);
    println!("z1 {z1} -> {z1_new}");
    println!("z2 {z2} -> {z2_new}");
    println!("shift fraction of separation: {}", (z1_new - z1) / sep);
    println!("tail_shift_condition (threshold {threshold:e}): {tail_shift}");

    let mut manifest = Manifest::new(
        "shift",
        serde_json::json!({
            "alpha": alpha,
            "beta": beta,
            "sep": sep,
            "threshold": threshold,
        }),
    );
    manifest.results = serde_json::json!({
        "z1": z1,
        "z2": z2,
        "z1_shifted": z1_new,
        "z2_shifted": z2_new,
        "tail_shift": tail_shift,
    });

    if output.formats.csv {
        let path = output.dir.join("shift.csv");
        write_csv(
            &path,
            &["alpha", "beta", "sep", "z1", "z2", "z1_shifted", "z2_shifted", "tail_shift"],
            &[vec![
                fmt_f64(alpha),
                fmt_f64(beta),
                fmt_f64(sep),
                fmt_f64(z1),
                fmt_f64(z2),
                fmt_f64(z1_new),
                fmt_f64(z2_new),
                (tail_shift as u8).to_string(),
            ]],
        )?;
        manifest.add_artifact(&path)?;
    }

    if output.formats.json {
        // The post-hit state itself, in the wave-state wire format. Only
        // sensible when the peaks stay resolvable.
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        if let Ok(state) = WaveState::two_peak(amp, amp, alpha, z1, z2, 1.0) {
            let h1 = HitRecord::at_rest(SpacetimeEvent::new(0.0, z1), beta, 1.0)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let h2 = HitRecord::at_rest(SpacetimeEvent::new(0.0, z2), beta, 1.0)
                .map_err(|e| CliError::validation(e.to_string()))?;
            if let Ok(hit_state) = state.apply_double_hit(&h1, &h2) {
                let path = output.dir.join("state.json");
                std::fs::write(&path, WaveStateDoc::from(&hit_state).to_json())?;
                manifest.add_artifact(&path)?;
            }
        }
    }

    super::finish_manifest(manifest, &output.dir, started)
}
