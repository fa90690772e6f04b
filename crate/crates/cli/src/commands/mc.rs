//! `mc` and `epr`: parallel Monte Carlo estimates of the dominance
//! probability, deterministic in (configuration, seed) regardless of the
//! thread count.

use std::time::Instant;

use collapse_core::collapse_process::{
    estimate_from_outcomes, run_trial, simulate_trial_with_log, trial_rng, CollapseRecord,
    McEstimate, ProcessParams, RULE_VARIANT_ID,
};
use collapse_core::epr::run_epr_trial;
use collapse_core::series::{closed_series_total, SeriesError};
use rayon::prelude::*;

use crate::args::{require_f64, Config, McArgs};
use crate::csvio::{fmt_f64, write_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_MAX_EVENTS: u32 = 64;

/// Event logs are only collected below this trial count.
const EVENT_LOG_TRIAL_CAP: u64 = 5_000_000;

/// Thread pool honoring the COLLAPSE_SIM_THREADS cap.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("COLLAPSE_SIM_THREADS") {
        let n: usize = value.parse().map_err(|_| {
            CliError::validation(format!("COLLAPSE_SIM_THREADS={value:?} is not a thread count"))
        })?;
        if n == 0 {
            return Err(CliError::validation("COLLAPSE_SIM_THREADS must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Other(e.into()))
}

/// Resolve the (lambda, T) pair from --lambdaT or --lambda/--T.
fn resolve_rates(args: &McArgs, config: &Config) -> CliResult<(f64, f64)> {
    let lambda_t = args.lambda_t.or_else(|| config.f64("lambdaT"));
    let lambda = args.lambda.or_else(|| config.f64("lambda"));
    let t_delay = args.t_delay.or_else(|| config.f64("T"));
    match (lambda_t, lambda, t_delay) {
        (Some(x), None, None) => Ok((x, 1.0)),
        (None, Some(l), Some(t)) => Ok((l, t)),
        (None, Some(_), None) | (None, None, Some(_)) => Err(CliError::validation(
            "--lambda and --T must be given together (or use --lambdaT)",
        )),
        (Some(x), l, t) => {
            // Allow redundant but consistent specifications.
            let lambda = l.unwrap_or(x);
            let t = t.unwrap_or_else(|| x / lambda);
            if (lambda * t - x).abs() > 1e-12 * x.abs().max(1.0) {
                return Err(CliError::validation(format!(
                    "--lambdaT {x} conflicts with --lambda {lambda} --T {t}"
                )));
            }
            Ok((lambda, t))
        }
        (None, None, None) => Err(CliError::validation("missing required parameter --lambdaT")),
    }
}

pub fn run(args: &McArgs, epr_command: bool) -> CliResult<()> {
    let started = Instant::now();
    let config = Config::load(args.common.config.as_deref())?;
    // Default artifacts are manifest-only: event logs can be large.
    let output = args.common.resolve(&config, false)?;
    let seed = args.common.seed(&config);

    let a2 = require_f64(args.a2, &config, "a2")?;
    let (lambda, t_delay) = resolve_rates(args, &config)?;
    let trials = args.trials.or_else(|| config.u64("trials")).unwrap_or(DEFAULT_TRIALS);
    let max_events = config.u64("max_events").map(|v| v as u32).unwrap_or(DEFAULT_MAX_EVENTS);
    let particles = args
        .particles
        .or_else(|| config.u64("particles").map(|v| v as u8))
        .unwrap_or(if epr_command { 2 } else { 1 });
    let two_particle = match particles {
        1 => false,
        2 => true,
        other => {
            return Err(CliError::validation(format!(
                "--particles must be 1 or 2, got {other}"
            )))
        }
    };
    if epr_command && !two_particle {
        return Err(CliError::validation("epr runs the two-particle race; use mc for one"));
    }

    let params = ProcessParams { a2, lambda, t_delay, master_seed: seed, max_events, trials };
    params.validate()?;

    let command = if two_particle { "epr" } else { "mc" };
    let want_events = output.formats.csv && !two_particle;
    if want_events && trials > EVENT_LOG_TRIAL_CAP {
        return Err(CliError::validation(format!(
            "event logs (csv format) are capped at {EVENT_LOG_TRIAL_CAP} trials"
        )));
    }

    let pool = thread_pool()?;
    let (est, events) = pool.install(|| run_parallel(&params, two_particle, want_events));

    println!("command: {command}");
    println!("p_hat = {:.7} +- {:.7} ({} trials)", est.p_hat, est.std_error, est.trials);
    println!("truncation_fraction = {:e}", est.truncation_fraction);
    if est.truncation_warning {
        eprintln!("warning: truncation fraction exceeds 1%");
    }
    match closed_series_total(a2, params.lambda_t()) {
        Ok(series) => println!(
            "series P = {series:.7}; |p_hat - series| = {:.2e}",
            (est.p_hat - series).abs()
        ),
        Err(SeriesError::OutOfRegime { .. }) => println!("series P: out of regime"),
        Err(e) => return Err(e.into()),
    }

    let mut manifest = Manifest::new(
        command,
        serde_json::json!({
            "a2": a2,
            "lambda": lambda,
            "T": t_delay,
            "lambdaT": params.lambda_t(),
            "trials": trials,
            "max_events": max_events,
            "particles": particles,
        }),
    );
    manifest.seed = Some(seed);
    manifest.rule_variant_id = Some(RULE_VARIANT_ID);
    manifest.results = serde_json::json!({
        "p_hat": est.p_hat,
        "std_error": est.std_error,
        "trials": est.trials,
        "truncation_fraction": est.truncation_fraction,
        "truncation_warning": est.truncation_warning,
    });

    if output.formats.csv {
        let path = output.dir.join(format!("{command}_estimate.csv"));
        write_csv(
            &path,
            &["a2", "lambdaT", "p_hat", "std_error", "trials", "truncation_fraction"],
            &[vec![
                fmt_f64(a2),
                fmt_f64(params.lambda_t()),
                fmt_f64(est.p_hat),
                fmt_f64(est.std_error),
                est.trials.to_string(),
                fmt_f64(est.truncation_fraction),
            ]],
        )?;
        manifest.add_artifact(&path)?;
    }
    if let Some(events) = events {
        let path = output.dir.join("events.csv");
        let rows: Vec<Vec<String>> = events
            .iter()
            .flat_map(|(trial, log)| {
                log.iter().map(move |record| {
                    vec![trial.to_string(), fmt_f64(record.time), record.peak.index().to_string()]
                })
            })
            .collect();
        write_csv(&path, &["trial", "time", "peak"], &rows)?;
        manifest.add_artifact(&path)?;
    }

    super::finish_manifest(manifest, &output.dir, started)
}

type EventLogs = Vec<(u64, Vec<CollapseRecord>)>;

/// Trials in parallel; the tallies are integral so the estimate is
/// independent of the partition. Event logs come back in trial order.
fn run_parallel(
    params: &ProcessParams,
    two_particle: bool,
    want_events: bool,
) -> (McEstimate, Option<EventLogs>) {
    if want_events {
        // Parallel collect preserves index order.
        let logged: Vec<(u64, collapse_core::collapse_process::TrialOutcome, Vec<CollapseRecord>)> =
            (0..params.trials)
                .into_par_iter()
                .map(|i| {
                    let mut log = Vec::new();
                    let mut rng = trial_rng(params.master_seed, i);
                    let out = simulate_trial_with_log(params, &mut rng, Some(&mut log));
                    (i, out, log)
                })
                .collect();
        let est = estimate_from_outcomes(params.trials, logged.iter().map(|(_, out, _)| *out));
        let events: EventLogs = logged.into_iter().map(|(i, _, log)| (i, log)).collect();
        (est, Some(events))
    } else {
        let wins_and_truncs = (0..params.trials)
            .into_par_iter()
            .map(|i| {
                let out = if two_particle { run_epr_trial(params, i) } else { run_trial(params, i) };
                (
                    u64::from(out.winner == collapse_core::collapse_process::Peak::One),
                    u64::from(out.truncated),
                )
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let (wins, truncated) = wins_and_truncs;
        let p_hat = wins as f64 / params.trials as f64;
        let truncation_fraction = truncated as f64 / params.trials as f64;
        let est = McEstimate {
            p_hat,
            std_error: (p_hat * (1.0 - p_hat) / params.trials as f64).sqrt(),
            trials: params.trials,
            truncation_fraction,
            truncation_warning: truncation_fraction
                > collapse_core::collapse_process::TRUNCATION_WARN_FRACTION,
        };
        (est, None)
    }
}
