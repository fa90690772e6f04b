//! Event-driven simulation of the collapse race between two spatially
//! separated peaks with a signal delay T between them.
//!
//! Each side generates hits on its own peak as a Poisson process whose rate
//! is λ times the peak's weight under that side's *local knowledge*: its own
//! hits count immediately, the other side's only after the delay. Knowledge
//! is reduced to kill counts — every known hit on a peak suppresses the
//! other peak once — and the weight triple follows from comparing counts:
//!
//! * counts tied (including the empty set): Born weights (a², b²);
//! * own peak ahead: weight 1 (and the other side, once it knows, 0);
//! * own peak behind: weight 0.
//!
//! An incompatible pair is therefore neutralized exactly when both signals
//! have crossed, restoring the Born ratio: the race restarts statistically,
//! with no memory. A peak wins when a hit on it has propagated to the other
//! side, that side's knowledge shows its own peak dead, and no hit on the
//! losing peak is still in flight. Rates are piecewise constant between
//! knowledge epochs, so sampling with per-epoch exponential clocks and
//! re-drawing at each epoch is exact.
//!
//! This rule set reproduces the closed dominance series through O((λT)²);
//! the residual is O((λT)³). Its identifier is [`RULE_VARIANT_ID`] and is
//! recorded in run manifests.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;
use crate::series::{closed_series_total, SeriesError};

/// Identifier of the operational rule set described in the module docs.
pub const RULE_VARIANT_ID: &str = "kill-count/dominant-weight-1/exact-restart";

/// Estimates whose truncation fraction exceeds this carry a warning.
pub const TRUNCATION_WARN_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessError {
    A2OutOfRange { a2: f64 },
    NegativeRate { lambda: f64 },
    NegativeDelay { t_delay: f64 },
    NoTrials,
    NoEventBudget,
    Series(SeriesError),
}

impl core::fmt::Display for ProcessError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProcessError::A2OutOfRange { a2 } => write!(f, "a2 = {a2} outside [0, 1]"),
            ProcessError::NegativeRate { lambda } => {
                write!(f, "collapse rate lambda = {lambda} must be nonnegative")
            }
            ProcessError::NegativeDelay { t_delay } => {
                write!(f, "signal delay T = {t_delay} must be nonnegative")
            }
            ProcessError::NoTrials => write!(f, "trials must be at least 1"),
            ProcessError::NoEventBudget => write!(f, "max_events must be at least 1"),
            ProcessError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ProcessError {}

impl From<SeriesError> for ProcessError {
    fn from(e: SeriesError) -> Self {
        ProcessError::Series(e)
    }
}

/// Which peak a hit lands on / which peak dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Peak {
    One,
    Two,
}

impl Peak {
    pub fn index(self) -> u8 {
        match self {
            Peak::One => 1,
            Peak::Two => 2,
        }
    }
}

impl core::fmt::Display for Peak {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Configuration of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    /// Initial squared weight of peak 1.
    pub a2: f64,
    /// Hit rate λ (events per unit time).
    pub lambda: f64,
    /// Signal delay T = L/c between the peaks.
    pub t_delay: f64,
    pub master_seed: u64,
    /// Hit budget per trial before the trial is cut off.
    pub max_events: u32,
    pub trials: u64,
}

impl ProcessParams {
    pub fn validate(&self) -> Result<(), ProcessError> {
        if !(0.0..=1.0).contains(&self.a2) {
            return Err(ProcessError::A2OutOfRange { a2: self.a2 });
        }
        if !(self.lambda >= 0.0) {
            return Err(ProcessError::NegativeRate { lambda: self.lambda });
        }
        if !(self.t_delay >= 0.0) {
            return Err(ProcessError::NegativeDelay { t_delay: self.t_delay });
        }
        if self.trials == 0 {
            return Err(ProcessError::NoTrials);
        }
        if self.max_events == 0 {
            return Err(ProcessError::NoEventBudget);
        }
        Ok(())
    }

    /// The dimensionless race parameter λT.
    pub fn lambda_t(&self) -> f64 {
        self.lambda * self.t_delay
    }
}

/// One collapse hit, for optional event logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseRecord {
    pub time: f64,
    pub peak: Peak,
}

/// Result of a single race.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub winner: Peak,
    pub n_events: u32,
    pub resolve_time: f64,
    pub truncated: bool,
}

/// Aggregated Monte Carlo estimate of P(peak 1 dominates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_error: f64,
    pub trials: u64,
    pub truncation_fraction: f64,
    /// Set when the truncation fraction exceeds [`TRUNCATION_WARN_FRACTION`].
    pub truncation_warning: bool,
}

// ---------------------------------------------------------------------------
// Deterministic per-trial randomness.

/// SplitMix64; used to decorrelate derived seeds.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-trial generator: one ChaCha8 stream per trial index,
/// so any partition of the trial range over threads replays identically.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Decorrelated master seed for an indexed sub-run (a sweep cell, say).
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}

#[inline]
pub(crate) fn uniform_f64<R: RngCore>(rng: &mut R) -> f64 {
    // 53 random mantissa bits in [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

#[inline]
pub(crate) fn exp_waiting_time<R: RngCore>(rng: &mut R, rate: f64) -> f64 {
    -math::ln(1.0 - uniform_f64(rng)) / rate
}

// ---------------------------------------------------------------------------
// The race itself.

/// Min-heap entry: a hit signal in flight toward the other side.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Signal {
    arrival: f64,
    seq: u32,
    peak: Peak,
}

impl Eq for Signal {}

impl PartialOrd for Signal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Signal {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.arrival
            .total_cmp(&other.arrival)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Weight of a side's own peak given its kill counts: `known_other` hits on
/// the opposite peak (each kills ours) versus `known_own` hits on ours.
#[inline]
fn side_weight(known_other: u32, known_own: u32, tie_weight: f64) -> f64 {
    use core::cmp::Ordering::*;
    match known_other.cmp(&known_own) {
        Less => 1.0,    // own peak dominant
        Equal => tie_weight, // tied: Born ratio restored
        Greater => 0.0, // own peak dead
    }
}

/// Run one race. `log` collects the hit sequence when provided.
pub fn simulate_trial_with_log<R: RngCore>(
    params: &ProcessParams,
    rng: &mut R,
    mut log: Option<&mut Vec<CollapseRecord>>,
) -> TrialOutcome {
    let a2 = params.a2;
    let b2 = 1.0 - a2;
    let lambda = params.lambda;
    let t_delay = params.t_delay;

    // Side i knows every hit on its own peak instantly and the other peak's
    // hits once their signal arrives.
    let mut n1: u32 = 0; // hits on peak 1 (known to side 1 immediately)
    let mut n2: u32 = 0; // hits on peak 2
    let mut m1: u32 = 0; // peak-2 hits whose signal reached side 1
    let mut m2: u32 = 0; // peak-1 hits whose signal reached side 2
    let mut in_flight_1: u32 = 0; // peak-1 signals still traveling
    let mut in_flight_2: u32 = 0;

    let mut signals: BinaryHeap<Reverse<Signal>> = BinaryHeap::new();
    let mut now = 0.0_f64;
    let mut hits: u32 = 0;
    let mut seq: u32 = 0;

    let truncate = |winner_hint: (u32, u32), now: f64, hits: u32| {
        // Omniscient kill-count argmax decides cut-off trials.
        let (total1, total2) = winner_hint;
        let winner = match total2.cmp(&total1) {
            core::cmp::Ordering::Less => Peak::Two, // peak 1 suffered more kills
            core::cmp::Ordering::Greater => Peak::One,
            core::cmp::Ordering::Equal => {
                if a2 >= b2 {
                    Peak::One
                } else {
                    Peak::Two
                }
            }
        };
        TrialOutcome { winner, n_events: hits, resolve_time: now, truncated: true }
    };

    loop {
        let w1 = side_weight(m1, n1, a2);
        let w2 = side_weight(m2, n2, b2);
        let rate1 = lambda * w1;
        let rate2 = lambda * w2;
        let total = rate1 + rate2;

        let next_hit = if total > 0.0 {
            now + exp_waiting_time(rng, total)
        } else {
            f64::INFINITY
        };
        let next_arrival = signals.peek().map(|Reverse(s)| s.arrival);

        match next_arrival {
            Some(arrival) if arrival <= next_hit => {
                // Knowledge epoch: deliver the signal, then re-draw clocks.
                let Reverse(signal) = signals.pop().expect("peeked entry exists");
                now = arrival;
                match signal.peak {
                    Peak::One => {
                        in_flight_1 -= 1;
                        m2 += 1;
                        // Peak 1 wins if side 2 now sees its own peak dead
                        // and no incompatible hit can still restore it.
                        if m2 > n2 && in_flight_2 == 0 {
                            return TrialOutcome {
                                winner: Peak::One,
                                n_events: hits,
                                resolve_time: now,
                                truncated: false,
                            };
                        }
                    }
                    Peak::Two => {
                        in_flight_2 -= 1;
                        m1 += 1;
                        if m1 > n1 && in_flight_1 == 0 {
                            return TrialOutcome {
                                winner: Peak::Two,
                                n_events: hits,
                                resolve_time: now,
                                truncated: false,
                            };
                        }
                    }
                }
            }
            _ if next_hit.is_finite() => {
                now = next_hit;
                let on_one = uniform_f64(rng) * total < rate1;
                let peak = if on_one { Peak::One } else { Peak::Two };
                if let Some(log) = log.as_deref_mut() {
                    log.push(CollapseRecord { time: now, peak });
                }
                match peak {
                    Peak::One => {
                        n1 += 1;
                        in_flight_1 += 1;
                        signals.push(Reverse(Signal { arrival: now + t_delay, seq, peak }));
                    }
                    Peak::Two => {
                        n2 += 1;
                        in_flight_2 += 1;
                        signals.push(Reverse(Signal { arrival: now + t_delay, seq, peak }));
                    }
                }
                seq += 1;
                hits += 1;
                if hits >= params.max_events {
                    return truncate((n1, n2), now, hits);
                }
            }
            _ => {
                // No clock can fire and nothing is in flight: undecidable
                // (lambda = 0). Flag it rather than spin.
                return truncate((n1, n2), now, hits);
            }
        }
    }
}

/// Run one race without logging.
pub fn simulate_trial<R: RngCore>(params: &ProcessParams, rng: &mut R) -> TrialOutcome {
    simulate_trial_with_log(params, rng, None)
}

/// The outcome of trial `trial_index` under `params`: a pure function of
/// (params, master_seed, index), independent of execution order.
pub fn run_trial(params: &ProcessParams, trial_index: u64) -> TrialOutcome {
    let mut rng = trial_rng(params.master_seed, trial_index);
    simulate_trial(params, &mut rng)
}

/// Fold trial outcomes into an estimate. Tallies are integers, so the
/// estimate is identical for any execution order of the trials.
pub fn estimate_from_outcomes<I: IntoIterator<Item = TrialOutcome>>(
    trials: u64,
    outcomes: I,
) -> McEstimate {
    let mut wins: u64 = 0;
    let mut truncated: u64 = 0;
    for outcome in outcomes {
        if outcome.winner == Peak::One {
            wins += 1;
        }
        if outcome.truncated {
            truncated += 1;
        }
    }
    let p_hat = wins as f64 / trials as f64;
    let truncation_fraction = truncated as f64 / trials as f64;
    McEstimate {
        p_hat,
        std_error: math::sqrt(p_hat * (1.0 - p_hat) / trials as f64),
        trials,
        truncation_fraction,
        truncation_warning: truncation_fraction > TRUNCATION_WARN_FRACTION,
    }
}

/// Monte Carlo estimate of P(peak 1 dominates), sequential reference path.
pub fn estimate(params: &ProcessParams) -> Result<McEstimate, ProcessError> {
    params.validate()?;
    Ok(estimate_from_outcomes(
        params.trials,
        (0..params.trials).map(|i| run_trial(params, i)),
    ))
}

/// One row of the deviation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRow {
    pub a2: f64,
    pub lambda_t: f64,
    pub p_hat: f64,
    pub std_error: f64,
    pub p_series: f64,
    pub deviation_mc: f64,
    pub deviation_series: f64,
    pub truncation_fraction: f64,
}

/// Monte Carlo and closed-series deviations P − a² over a parameter grid.
///
/// Cells get decorrelated seeds derived from the master seed; T is fixed to
/// one time unit so λ = λT.
pub fn deviation_curve(
    a2_grid: &[f64],
    lambda_t_grid: &[f64],
    trials: u64,
    master_seed: u64,
    max_events: u32,
) -> Result<Vec<DeviationRow>, ProcessError> {
    let mut rows = Vec::with_capacity(a2_grid.len() * lambda_t_grid.len());
    for (i, &a2) in a2_grid.iter().enumerate() {
        for (j, &lambda_t) in lambda_t_grid.iter().enumerate() {
            let cell = (i * lambda_t_grid.len() + j) as u64;
            let params = ProcessParams {
                a2,
                lambda: lambda_t,
                t_delay: 1.0,
                master_seed: derive_seed(master_seed, cell),
                max_events,
                trials,
            };
            let est = estimate(&params)?;
            let p_series = closed_series_total(a2, lambda_t)?;
            rows.push(DeviationRow {
                a2,
                lambda_t,
                p_hat: est.p_hat,
                std_error: est.std_error,
                p_series,
                deviation_mc: est.p_hat - a2,
                deviation_series: p_series - a2,
                truncation_fraction: est.truncation_fraction,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a2: f64, lambda: f64, t_delay: f64, trials: u64) -> ProcessParams {
        ProcessParams { a2, lambda, t_delay, master_seed: 0xC0FFEE, max_events: 64, trials }
    }

    #[test]
    fn born_limit_no_delay_is_single_event() {
        let p = params(0.7, 1.0, 0.0, 20_000);
        let mut wins = 0u64;
        for i in 0..p.trials {
            let out = run_trial(&p, i);
            assert_eq!(out.n_events, 1);
            assert!(!out.truncated);
            if out.winner == Peak::One {
                wins += 1;
            }
        }
        let p_hat = wins as f64 / p.trials as f64;
        // Exact Bernoulli(0.7): 3 sigma at 20k trials is about 0.0097.
        assert!((p_hat - 0.7).abs() < 0.01, "p_hat = {p_hat}");
    }

    #[test]
    fn certain_peak_always_wins_in_one_event() {
        // Peak 2 has zero hit rate; the first hit decides. Further hits on
        // the winning peak can occur while the signal is in flight, so the
        // event count is 1 plus a Poisson(lambda T) tail.
        let p = params(1.0, 0.5, 2.0, 2_000);
        let mut events = 0u64;
        for i in 0..p.trials {
            let out = run_trial(&p, i);
            assert_eq!(out.winner, Peak::One);
            assert!(!out.truncated);
            // Resolution needs the signal to cross once.
            assert!(out.resolve_time >= 2.0);
            events += u64::from(out.n_events);
        }
        let mean = events as f64 / p.trials as f64;
        assert!((mean - (1.0 + p.lambda_t())).abs() < 0.2, "mean events = {mean}");
        let p = params(0.0, 0.5, 2.0, 200);
        for i in 0..200 {
            assert_eq!(run_trial(&p, i).winner, Peak::Two);
        }
    }

    #[test]
    fn symmetric_race_is_even() {
        let p = params(0.5, 1.0, 0.2, 200_000);
        let est = estimate(&p).unwrap();
        assert!((est.p_hat - 0.5).abs() <= 3.0 * est.std_error, "p_hat = {}", est.p_hat);
        assert!(est.truncation_fraction < 1e-4);
    }

    #[test]
    fn complementary_weights_mirror() {
        let pa = params(0.64, 1.0, 0.05, 150_000);
        let mut pb = pa;
        pb.a2 = 0.36;
        let ea = estimate(&pa).unwrap();
        let eb = estimate(&pb).unwrap();
        let combined = (ea.std_error * ea.std_error + eb.std_error * eb.std_error).sqrt();
        assert!(
            (ea.p_hat + eb.p_hat - 1.0).abs() <= 3.0 * combined,
            "sum = {}",
            ea.p_hat + eb.p_hat
        );
    }

    #[test]
    fn zero_rate_truncates_without_spinning() {
        let p = params(0.7, 0.0, 1.0, 1);
        let out = run_trial(&p, 0);
        assert!(out.truncated);
        assert_eq!(out.n_events, 0);
        assert_eq!(out.winner, Peak::One); // argmax of (0.7, 0.3)
    }

    #[test]
    fn event_log_times_strictly_increase() {
        let p = params(0.5, 2.0, 1.5, 1);
        for i in 0..500 {
            let mut log = Vec::new();
            let mut rng = trial_rng(p.master_seed, i);
            simulate_trial_with_log(&p, &mut rng, Some(&mut log));
            for pair in log.windows(2) {
                assert!(pair[0].time < pair[1].time);
            }
        }
    }

    #[test]
    fn determinism_same_seed_same_outcomes() {
        let p = params(0.6, 1.3, 0.4, 500);
        let first: Vec<TrialOutcome> = (0..500).map(|i| run_trial(&p, i)).collect();
        let second: Vec<TrialOutcome> = (0..500).rev().map(|i| run_trial(&p, i)).collect();
        for (i, out) in second.into_iter().rev().enumerate() {
            assert_eq!(first[i], out);
        }
    }

    #[test]
    fn event_budget_is_respected() {
        let p = ProcessParams {
            a2: 0.5,
            lambda: 5.0,
            t_delay: 5.0, // deep race: many incompatible rounds
            master_seed: 7,
            max_events: 4,
            trials: 1,
        };
        for i in 0..2_000 {
            let out = run_trial(&p, i);
            assert!(out.n_events <= 4);
        }
    }

    #[test]
    fn mean_events_stay_small_in_regime() {
        let p = params(0.7, 0.05, 1.0, 50_000);
        let mut events = 0u64;
        let mut truncated = 0u64;
        for i in 0..p.trials {
            let out = run_trial(&p, i);
            events += u64::from(out.n_events);
            truncated += u64::from(out.truncated);
        }
        let mean = events as f64 / p.trials as f64;
        assert!(mean < 1.0 + 10.0 * p.lambda_t(), "mean events = {mean}");
        assert_eq!(truncated, 0);
    }

    #[test]
    fn estimate_matches_manual_tally() {
        let p = params(0.8, 1.0, 0.1, 10_000);
        let est = estimate(&p).unwrap();
        let manual = estimate_from_outcomes(p.trials, (0..p.trials).map(|i| run_trial(&p, i)));
        assert_eq!(est, manual);
        assert!((est.std_error - (est.p_hat * (1.0 - est.p_hat) / 10_000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn deviation_curve_columns_are_consistent() {
        let rows = deviation_curve(&[0.5, 0.8], &[0.02, 0.1], 20_000, 42, 64).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert_eq!(row.p_series, closed_series_total(row.a2, row.lambda_t).unwrap());
            assert!((row.deviation_mc - (row.p_hat - row.a2)).abs() < 1e-15);
        }
        // Symmetric rows deviate by at most noise.
        for row in rows.iter().filter(|r| r.a2 == 0.5) {
            assert!(row.deviation_mc.abs() <= 3.0 * row.std_error);
        }
    }

    #[test]
    fn params_are_validated() {
        let mut p = params(0.5, 1.0, 1.0, 10);
        p.a2 = -0.1;
        assert!(matches!(p.validate(), Err(ProcessError::A2OutOfRange { .. })));
        let mut p = params(0.5, 1.0, 1.0, 10);
        p.trials = 0;
        assert!(matches!(p.validate(), Err(ProcessError::NoTrials)));
        let mut p = params(0.5, 1.0, 1.0, 10);
        p.max_events = 0;
        assert!(matches!(p.validate(), Err(ProcessError::NoEventBudget)));
    }
}
