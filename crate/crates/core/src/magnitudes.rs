//! Laboratory-scale magnitude estimates: the race parameter λT from
//! apparatus numbers, the perception-time lower bound, and detectability
//! sweeps over apparatus size.
//!
//! This is the one module that works in SI units; everything else in the
//! crate is in natural units.

use alloc::vec::Vec;

use crate::series::{closed_series_total, total_probability, EvalMode, SeriesError};

/// Speed of light, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Default perception time, seconds.
pub const DEFAULT_TAU_PER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagnitudesError {
    NonPositive { field: &'static str, value: f64 },
    Series(SeriesError),
}

impl core::fmt::Display for MagnitudesError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MagnitudesError::NonPositive { field, value } => {
                write!(f, "{field} must be positive, got {value}")
            }
            MagnitudesError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MagnitudesError {}

impl From<SeriesError> for MagnitudesError {
    fn from(e: SeriesError) -> Self {
        MagnitudesError::Series(e)
    }
}

/// Apparatus parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusParams {
    /// Peak/analyzer separation, meters.
    pub length_m: f64,
    /// Number of particles participating in the measurement.
    pub n_particles: f64,
    /// Single-particle collapse time, seconds.
    pub tau_col_s: f64,
    /// Perception time, seconds.
    pub tau_per_s: f64,
}

impl ApparatusParams {
    pub fn new(length_m: f64, n_particles: f64, tau_col_s: f64) -> Self {
        Self { length_m, n_particles, tau_col_s, tau_per_s: DEFAULT_TAU_PER }
    }

    pub fn validate(&self) -> Result<(), MagnitudesError> {
        for (field, value) in [
            ("L", self.length_m),
            ("N", self.n_particles),
            ("tau_col", self.tau_col_s),
            ("tau_per", self.tau_per_s),
        ] {
            if !(value > 0.0) {
                return Err(MagnitudesError::NonPositive { field, value });
            }
        }
        Ok(())
    }

    /// Signal delay T = L/c in seconds.
    pub fn delay_s(&self) -> f64 {
        self.length_m / SPEED_OF_LIGHT
    }
}

/// The race parameter λT = (L/c)(N/τ_col). Zero-length apparatus gives 0.
pub fn lambda_t(p: &ApparatusParams) -> f64 {
    p.length_m / SPEED_OF_LIGHT * (p.n_particles / p.tau_col_s)
}

/// Lower bound on λT from perception: T/τ_per.
pub fn perception_bound(p: &ApparatusParams) -> f64 {
    p.delay_s() / p.tau_per_s
}

/// Whether the apparatus λT falls below the perception bound, i.e. the
/// implied apparatus collapse time exceeds the perception time.
pub fn perception_bound_violated(p: &ApparatusParams) -> bool {
    lambda_t(p) < perception_bound(p)
}

/// One cell of the detectability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub length_m: f64,
    pub n_particles: f64,
    pub lambda_t: f64,
    /// Born deviation P − a² from the closed series; meaningless when
    /// `regime_ok` is false.
    pub deviation: f64,
    pub flagged: bool,
    pub regime_ok: bool,
}

/// Deviation P − a² over an (L, N) grid, flagged where it reaches
/// `threshold`. Cells outside the series regime are marked rather than
/// extrapolated.
pub fn detectability_sweep(
    l_grid: &[f64],
    n_grid: &[f64],
    tau_col_s: f64,
    a2: f64,
    threshold: f64,
) -> Result<Vec<SweepCell>, MagnitudesError> {
    if !(tau_col_s > 0.0) {
        return Err(MagnitudesError::NonPositive { field: "tau_col", value: tau_col_s });
    }
    let mut cells = Vec::with_capacity(l_grid.len() * n_grid.len());
    for &length_m in l_grid {
        for &n_particles in n_grid {
            let x = length_m / SPEED_OF_LIGHT * (n_particles / tau_col_s);
            // The regime probe: the self-consistency solve refuses when the
            // restart coefficient is too large.
            match total_probability(a2, x, 1, EvalMode::ClosedSeries) {
                Ok(_) => {
                    let deviation = closed_series_total(a2, x)? - a2;
                    cells.push(SweepCell {
                        length_m,
                        n_particles,
                        lambda_t: x,
                        deviation,
                        flagged: deviation >= threshold,
                        regime_ok: true,
                    });
                }
                Err(SeriesError::OutOfRegime { .. }) => cells.push(SweepCell {
                    length_m,
                    n_particles,
                    lambda_t: x,
                    deviation: f64::NAN,
                    flagged: false,
                    regime_ok: false,
                }),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_single_particle_value() {
        // L = 10 m, tau_col = 1e16 s, N = 1: a third of 1e-23.
        let p = ApparatusParams::new(10.0, 1.0, 1e16);
        let x = lambda_t(&p);
        assert!(x > 3.0e-24 && x < 3.6e-24, "lambda_t = {x}");
    }

    #[test]
    fn macroscopic_particle_count_reaches_unity() {
        let p = ApparatusParams::new(10.0, 3e23, 1e16);
        let x = lambda_t(&p);
        assert!((x - 1.0).abs() < 0.01, "lambda_t = {x}");
    }

    #[test]
    fn zero_length_gives_zero() {
        let p = ApparatusParams::new(0.0, 1.0, 1e16);
        assert_eq!(lambda_t(&p), 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn linearity_in_l_and_n() {
        let base = ApparatusParams::new(7.0, 2.0e10, 1e16);
        let x0 = lambda_t(&base);
        let doubled_l = ApparatusParams::new(14.0, 2.0e10, 1e16);
        assert!((lambda_t(&doubled_l) - 2.0 * x0).abs() < 1e-30);
        let doubled_n = ApparatusParams::new(7.0, 4.0e10, 1e16);
        assert!((lambda_t(&doubled_n) - 2.0 * x0).abs() < 1e-30);
        let doubled_tau = ApparatusParams::new(7.0, 2.0e10, 2e16);
        assert!((lambda_t(&doubled_tau) - 0.5 * x0).abs() < 1e-30);
    }

    #[test]
    fn perception_bound_values() {
        let p = ApparatusParams::new(10.0, 1.0, 1e16);
        let bound = perception_bound(&p);
        assert!((bound - 3.34e-4).abs() < 1e-6, "bound = {bound}");
        let p30 = ApparatusParams::new(30.0, 1.0, 1e16);
        let bound30 = perception_bound(&p30);
        assert!((bound30 - 1.0e-3).abs() < 1e-5, "bound = {bound30}");
        // tau_per -> infinity sends the bound to zero.
        let mut p = ApparatusParams::new(10.0, 1.0, 1e16);
        p.tau_per_s = f64::INFINITY;
        assert_eq!(perception_bound(&p), 0.0);
        // The single-particle benchmark apparatus is far below the bound.
        assert!(perception_bound_violated(&ApparatusParams::new(10.0, 1.0, 1e16)));
    }

    #[test]
    fn sweep_deviation_first_order_value() {
        // lambda_t = 1e-3 at a2 = 0.7 deviates by c1 * 1e-3.
        let l = 10.0;
        let n = 1e-3 * SPEED_OF_LIGHT / l * 1e16;
        let cells = detectability_sweep(&[l], &[n], 1e16, 0.7, 1e-4).unwrap();
        assert_eq!(cells.len(), 1);
        let cell = &cells[0];
        assert!((cell.lambda_t - 1e-3).abs() < 1e-12);
        let expect = 0.084 * 1e-3 - 0.17472 * 1e-6;
        assert!((cell.deviation - expect).abs() < 1e-12, "deviation = {}", cell.deviation);
        assert!(!cell.flagged);
        assert!(cell.regime_ok);
    }

    #[test]
    fn sweep_is_monotone_and_flags_at_threshold() {
        let l_grid = [1.0, 2.0, 4.0, 8.0];
        let n = 1e19;
        let cells = detectability_sweep(&l_grid, &[n], 1e16, 0.8, 1e-4).unwrap();
        let mut last = -1.0;
        for cell in &cells {
            assert!(cell.regime_ok);
            assert!(cell.deviation >= last);
            last = cell.deviation;
        }
        // Doubling L doubles the first-order deviation.
        let ratio = cells[1].deviation / cells[0].deviation;
        assert!((ratio - 2.0).abs() < 0.01, "ratio = {ratio}");
    }

    #[test]
    fn symmetric_superposition_never_flags() {
        let cells = detectability_sweep(&[1.0, 10.0], &[1e18, 1e20], 1e16, 0.5, 1e-12).unwrap();
        for cell in &cells {
            assert_eq!(cell.deviation, 0.0);
            assert!(!cell.flagged);
        }
    }
}
