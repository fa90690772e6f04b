//! Dominance-probability contributions of the collapse race, through second
//! order in the race parameter x = λT.
//!
//! Eight single-particle histories and seven two-particle histories
//! contribute. Each is available in two evaluation modes:
//!
//! * `ClosedSeries` — the truncated O(x²) expression;
//! * `Quadrature` — the exact integral transcribed term by term, evaluated
//!   with adaptive Gauss–Kronrod panels to 1e-10 relative accuracy, nested
//!   integrals innermost first.
//!
//! Histories in which an incompatible pair resolves and the race restarts
//! contribute a multiple of the total probability P itself; the total is the
//! solution of the linear self-consistency P = A + B·P, i.e. P = A/(1−B).
//! The closed-series total is the rearranged polynomial
//! P = a² + x·a²b²(a²−b²) − x²·a²b²(a²−b²)(5−4a²b²)/2, whose odd symmetry
//! under a²↔b² makes complementarity exact.

use crate::math;
use crate::quadrature::{integrate, DEFAULT_REL_TOL};

/// The self-consistency solve is trusted only while the restart coefficient
/// stays below this.
pub const REGIME_MAX_P_COEFFICIENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    ClosedSeries,
    Quadrature,
}

/// Single-particle history labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleDiagram {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl SingleDiagram {
    pub const ALL: [SingleDiagram; 8] = [
        SingleDiagram::I,
        SingleDiagram::II,
        SingleDiagram::III,
        SingleDiagram::IV,
        SingleDiagram::V,
        SingleDiagram::VI,
        SingleDiagram::VII,
        SingleDiagram::VIII,
    ];
}

/// Two-particle history labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairDiagram {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl PairDiagram {
    pub const ALL: [PairDiagram; 7] = [
        PairDiagram::I,
        PairDiagram::II,
        PairDiagram::III,
        PairDiagram::IV,
        PairDiagram::V,
        PairDiagram::VI,
        PairDiagram::VII,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramId {
    Single(SingleDiagram),
    Pair(PairDiagram),
}

impl DiagramId {
    pub fn particle_count(self) -> u8 {
        match self {
            DiagramId::Single(_) => 1,
            DiagramId::Pair(_) => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DiagramId::Single(d) => match d {
                SingleDiagram::I => "i",
                SingleDiagram::II => "ii",
                SingleDiagram::III => "iii",
                SingleDiagram::IV => "iv",
                SingleDiagram::V => "v",
                SingleDiagram::VI => "vi",
                SingleDiagram::VII => "vii",
                SingleDiagram::VIII => "viii",
            },
            DiagramId::Pair(d) => match d {
                PairDiagram::I => "2i",
                PairDiagram::II => "2ii",
                PairDiagram::III => "2iii",
                PairDiagram::IV => "2iv",
                PairDiagram::V => "2v",
                PairDiagram::VI => "2vi",
                PairDiagram::VII => "2vii",
            },
        }
    }

    pub fn all() -> impl Iterator<Item = DiagramId> {
        SingleDiagram::ALL
            .iter()
            .map(|&d| DiagramId::Single(d))
            .chain(PairDiagram::ALL.iter().map(|&d| DiagramId::Pair(d)))
    }
}

impl core::fmt::Display for DiagramId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// One history's contribution: a constant part plus a coefficient of the
/// self-consistent total P (nonzero only for the restart histories ii/iii
/// and 2ii/2iii).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramResult {
    pub constant_part: f64,
    pub p_coefficient: f64,
    pub mode: EvalMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesError {
    A2OutOfRange { a2: f64 },
    NegativeLambdaT { lambda_t: f64 },
    /// Restart coefficient too large for the linear solve to be trusted.
    OutOfRegime { p_coefficient_sum: f64 },
    BadParticleCount { particle_count: u8 },
}

impl core::fmt::Display for SeriesError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SeriesError::A2OutOfRange { a2 } => write!(f, "a2 = {a2} outside [0, 1]"),
            SeriesError::NegativeLambdaT { lambda_t } => {
                write!(f, "lambdaT = {lambda_t} must be nonnegative")
            }
            SeriesError::OutOfRegime { p_coefficient_sum } => write!(
                f,
                "restart coefficient {p_coefficient_sum} >= {REGIME_MAX_P_COEFFICIENT}: \
                 expansion untrustworthy"
            ),
            SeriesError::BadParticleCount { particle_count } => {
                write!(f, "particle count must be 1 or 2, got {particle_count}")
            }
        }
    }
}

impl core::error::Error for SeriesError {}

fn check_inputs(a2: f64, lambda_t: f64) -> Result<(), SeriesError> {
    if !(0.0..=1.0).contains(&a2) {
        return Err(SeriesError::A2OutOfRange { a2 });
    }
    if !(lambda_t >= 0.0) {
        return Err(SeriesError::NegativeLambdaT { lambda_t });
    }
    Ok(())
}

/// Evaluate one history's contribution.
pub fn diagram(
    id: DiagramId,
    a2: f64,
    lambda_t: f64,
    mode: EvalMode,
) -> Result<DiagramResult, SeriesError> {
    check_inputs(a2, lambda_t)?;
    let b2 = 1.0 - a2;
    let value = match mode {
        EvalMode::ClosedSeries => series_value(id, a2, b2, lambda_t),
        EvalMode::Quadrature => quadrature_value(id, a2, b2, lambda_t),
    };
    let is_restart = matches!(
        id,
        DiagramId::Single(SingleDiagram::II)
            | DiagramId::Single(SingleDiagram::III)
            | DiagramId::Pair(PairDiagram::II)
            | DiagramId::Pair(PairDiagram::III)
    );
    Ok(if is_restart {
        DiagramResult { constant_part: 0.0, p_coefficient: value, mode }
    } else {
        DiagramResult { constant_part: value, p_coefficient: 0.0, mode }
    })
}

/// Truncated O(x²) value of one history.
fn series_value(id: DiagramId, a: f64, b: f64, x: f64) -> f64 {
    let ab = a * b;
    let x2 = x * x;
    match id {
        DiagramId::Single(d) => match d {
            SingleDiagram::I => a * (1.0 - x * b + 0.5 * x2 * b * b),
            SingleDiagram::II | SingleDiagram::III => ab * x * (1.0 - 3.5 * x),
            SingleDiagram::IV => 1.5 * ab * x2,
            SingleDiagram::V => 1.5 * a * ab * x2,
            SingleDiagram::VI => 0.5 * a * ab * x2,
            // The truncation of the transcribed integral; its printed
            // one-line evaluation drops a factor restored here, as the total
            // confirms.
            SingleDiagram::VII => 0.5 * ab * x2,
            SingleDiagram::VIII => 0.5 * a * ab * x2,
        },
        DiagramId::Pair(d) => match d {
            // Same situation as single vii: the x² coefficient is B/2, the
            // value the transcribed integral expands to.
            PairDiagram::I => a * (1.0 - x * b + 0.5 * x2 * b),
            PairDiagram::II | PairDiagram::III => ab * x * (1.0 - 3.0 * x),
            PairDiagram::IV => 0.5 * a * ab * x2,
            PairDiagram::V => 1.5 * ab * x2,
            PairDiagram::VI => 0.5 * ab * x2,
            PairDiagram::VII => 0.5 * a * ab * x2,
        },
    }
}

/// Exact value of one history by adaptive quadrature of the transcribed
/// integrand. Time is measured in units of T, so only x = λT enters.
fn quadrature_value(id: DiagramId, a: f64, b: f64, x: f64) -> f64 {
    let tol = DEFAULT_REL_TOL;
    let e = math::exp;
    match id {
        DiagramId::Single(d) => match d {
            SingleDiagram::I => a * e(-x * b),
            SingleDiagram::II | SingleDiagram::III => {
                a * integrate(
                    &|u: f64| e(-x * b) * x * b * e(-x * (1.0 + u) * a) * e(-2.0 * x) * e(-x * u * b),
                    0.0,
                    1.0,
                    tol,
                )
            }
            SingleDiagram::IV => {
                a * integrate(
                    &|u: f64| {
                        let inner = integrate(
                            &|v: f64| e(-2.0 * x) * x * e(-x * v * b),
                            0.0,
                            1.0 + u,
                            tol,
                        );
                        e(-x * b) * x * b * e(-x * (1.0 + u) * a) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            SingleDiagram::V => {
                a * integrate(
                    &|u: f64| {
                        e(-x * b) * x * b * x * a * (1.0 + u) * e(-x * (1.0 + u) * a)
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            SingleDiagram::VI => {
                b * integrate(
                    &|u: f64| {
                        let inner = integrate(&|_v: f64| x * a, u, 1.0, tol);
                        e(-x * a) * x * a * e(-x * (1.0 + u) * b) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            SingleDiagram::VII => {
                b * integrate(
                    &|u: f64| {
                        let inner = integrate(
                            &|v: f64| x * e(-2.0 * x) * e(-x * v * b),
                            0.0,
                            1.0 - u,
                            tol,
                        );
                        e(-x * a) * x * a * e(-x * (1.0 + u) * b) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            SingleDiagram::VIII => {
                b * integrate(
                    &|u: f64| {
                        let inner = integrate(
                            &|v: f64| {
                                x * a * e(-2.0 * x) * e(-x * u * a) * e(-x * (1.0 - u + v) * b)
                            },
                            0.0,
                            u,
                            tol,
                        );
                        e(-x * a) * x * a * e(-x * (1.0 + u) * b) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
        },
        DiagramId::Pair(d) => match d {
            PairDiagram::I => {
                a * (e(-x) + integrate(&|u: f64| x * a * e(-x * u), 0.0, 1.0, tol))
            }
            PairDiagram::II | PairDiagram::III => {
                a * integrate(&|u: f64| x * b * e(-2.0 * x * (1.0 + u)), 0.0, 1.0, tol)
            }
            PairDiagram::IV => {
                a * integrate(
                    &|u: f64| {
                        let inner = integrate(
                            &|v: f64| x * a * e(-x * (1.0 + v)) * e(-x * (1.0 - u + v)),
                            0.0,
                            u,
                            tol,
                        );
                        x * b * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            PairDiagram::V => {
                a * integrate(
                    &|u: f64| {
                        let inner = integrate(&|v: f64| x * e(-x * v), 0.0, 1.0 + u, tol);
                        x * b * e(-x) * e(-x * (1.0 + u)) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            PairDiagram::VI => {
                b * integrate(
                    &|u: f64| {
                        let inner = integrate(&|v: f64| x * e(-x * v), 0.0, 1.0 - u, tol);
                        x * a * e(-x) * e(-x * (1.0 + u)) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
            PairDiagram::VII => {
                b * integrate(
                    &|u: f64| {
                        let inner = integrate(
                            &|v: f64| x * a * e(-x * (1.0 - u + v)),
                            0.0,
                            u,
                            tol,
                        );
                        x * a * e(-x) * e(-x * (1.0 + u)) * inner
                    },
                    0.0,
                    1.0,
                    tol,
                )
            }
        },
    }
}

/// Two-particle history evaluation; same contract as [`diagram`] with the
/// correlated-pair integrands.
pub fn diagram2(
    id: PairDiagram,
    a2: f64,
    lambda_t: f64,
    mode: EvalMode,
) -> Result<DiagramResult, SeriesError> {
    diagram(DiagramId::Pair(id), a2, lambda_t, mode)
}

/// Coefficients (c₀, c₁, c₂) of the closed-series total
/// P = c₀ + c₁x + c₂x²: (a², a²b²(a²−b²), −½a²b²(a²−b²)(5−4a²b²)).
pub fn series_coefficients(a2: f64) -> Result<(f64, f64, f64), SeriesError> {
    check_inputs(a2, 0.0)?;
    let b2 = 1.0 - a2;
    let ab = a2 * b2;
    let d = a2 - b2;
    Ok((a2, ab * d, -0.5 * ab * d * (5.0 - 4.0 * ab)))
}

/// The closed-series total polynomial.
///
/// For a² below one half the value is computed as one minus the mirrored
/// polynomial; with round-to-nearest this makes the exact complementarity
/// P(a²) + P(1−a²) = 1 hold bit-for-bit, not just to round-off.
pub fn closed_series_total(a2: f64, lambda_t: f64) -> Result<f64, SeriesError> {
    check_inputs(a2, lambda_t)?;
    if a2 < 0.5 {
        Ok(1.0 - closed_series_raw(1.0 - a2, lambda_t))
    } else {
        Ok(closed_series_raw(a2, lambda_t))
    }
}

fn closed_series_raw(a2: f64, lambda_t: f64) -> f64 {
    let b2 = 1.0 - a2;
    let ab = a2 * b2;
    let d = a2 - b2;
    a2 + ab * d * lambda_t - 0.5 * ab * d * (5.0 - 4.0 * ab) * lambda_t * lambda_t
}

/// Total dominance probability of peak 1 (or of the first branch for two
/// particles).
///
/// Quadrature mode solves the self-consistency P = A/(1−B) from the exact
/// history values. Closed-series mode returns the rearranged polynomial,
/// which is identical for one and two particles. The two modes agree to
/// O(x³).
pub fn total_probability(
    a2: f64,
    lambda_t: f64,
    particle_count: u8,
    mode: EvalMode,
) -> Result<f64, SeriesError> {
    check_inputs(a2, lambda_t)?;
    let ids: &mut dyn Iterator<Item = DiagramId> = match particle_count {
        1 => &mut SingleDiagram::ALL.iter().map(|&d| DiagramId::Single(d)),
        2 => &mut PairDiagram::ALL.iter().map(|&d| DiagramId::Pair(d)),
        other => return Err(SeriesError::BadParticleCount { particle_count: other }),
    };
    let mut constant_sum = 0.0;
    let mut p_sum = 0.0;
    for id in ids {
        let r = diagram(id, a2, lambda_t, mode)?;
        constant_sum += r.constant_part;
        p_sum += r.p_coefficient;
    }
    if p_sum >= REGIME_MAX_P_COEFFICIENT {
        return Err(SeriesError::OutOfRegime { p_coefficient_sum: p_sum });
    }
    match mode {
        EvalMode::Quadrature => Ok(constant_sum / (1.0 - p_sum)),
        EvalMode::ClosedSeries => closed_series_total(a2, lambda_t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_i_closed_forms() {
        let x = 0.1;
        let q = diagram(DiagramId::Single(SingleDiagram::I), 0.7, x, EvalMode::Quadrature).unwrap();
        assert!((q.constant_part - 0.7 * math::exp(-0.03)).abs() < 1e-15);
        let s = diagram(DiagramId::Single(SingleDiagram::I), 0.7, x, EvalMode::ClosedSeries).unwrap();
        assert!((s.constant_part - 0.7 * (1.0 - 0.03 + 0.00045)).abs() < 1e-15);
        // The two modes differ only at O(x^3).
        assert!((q.constant_part - s.constant_part).abs() < 1e-5);
    }

    #[test]
    fn restart_diagrams_match_their_closed_forms() {
        // ii integrates to A B e^{-3x}(1-e^{-x}); 2ii to A B e^{-2x}(1-e^{-2x})/2.
        let (a, b, x) = (0.6, 0.4, 0.08);
        let ii = diagram(DiagramId::Single(SingleDiagram::II), a, x, EvalMode::Quadrature).unwrap();
        let expect = a * b * math::exp(-3.0 * x) * (1.0 - math::exp(-x));
        assert!((ii.p_coefficient - expect).abs() < 1e-12 * expect);
        assert_eq!(ii.constant_part, 0.0);

        let p2 = diagram2(PairDiagram::II, a, x, EvalMode::Quadrature).unwrap();
        let expect2 = a * b * math::exp(-2.0 * x) * (1.0 - math::exp(-2.0 * x)) / 2.0;
        assert!((p2.p_coefficient - expect2).abs() < 1e-12 * expect2);
        // The dedicated two-particle entry point matches the dispatcher.
        assert_eq!(p2, diagram(DiagramId::Pair(PairDiagram::II), a, x, EvalMode::Quadrature).unwrap());
    }

    #[test]
    fn diagram_iii_equals_ii_identically() {
        for &x in &[0.0, 0.02, 0.1, 0.3] {
            for &a2 in &[0.1, 0.5, 0.85] {
                for &mode in &[EvalMode::ClosedSeries, EvalMode::Quadrature] {
                    let ii = diagram(DiagramId::Single(SingleDiagram::II), a2, x, mode).unwrap();
                    let iii = diagram(DiagramId::Single(SingleDiagram::III), a2, x, mode).unwrap();
                    assert_eq!(ii, iii);
                    let p2 = diagram(DiagramId::Pair(PairDiagram::II), a2, x, mode).unwrap();
                    let p3 = diagram(DiagramId::Pair(PairDiagram::III), a2, x, mode).unwrap();
                    assert_eq!(p2, p3);
                }
            }
        }
    }

    #[test]
    fn second_order_diagrams_vanish_at_zero() {
        for id in DiagramId::all() {
            let keep = matches!(
                id,
                DiagramId::Single(SingleDiagram::I) | DiagramId::Pair(PairDiagram::I)
            );
            for &mode in &[EvalMode::ClosedSeries, EvalMode::Quadrature] {
                let r = diagram(id, 0.7, 0.0, mode).unwrap();
                let total = r.constant_part + r.p_coefficient;
                if keep {
                    assert!((total - 0.7).abs() < 1e-14);
                } else {
                    assert!(total.abs() < 1e-14, "diagram {id} nonzero at x = 0");
                }
            }
        }
    }

    #[test]
    fn all_parts_nonnegative() {
        for id in DiagramId::all() {
            for &x in &[0.0, 0.05, 0.2] {
                for &a2 in &[0.0, 0.3, 0.5, 0.9, 1.0] {
                    for &mode in &[EvalMode::ClosedSeries, EvalMode::Quadrature] {
                        let r = diagram(id, a2, x, mode).unwrap();
                        assert!(r.constant_part >= 0.0);
                        assert!(r.p_coefficient >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn coefficients_worked_values() {
        assert_eq!(series_coefficients(0.5).unwrap(), (0.5, 0.0, 0.0));
        assert_eq!(series_coefficients(1.0).unwrap(), (1.0, 0.0, 0.0));
        let (c0, c1, c2) = series_coefficients(0.7).unwrap();
        assert!((c0 - 0.7).abs() < 1e-15);
        assert!((c1 - 0.084).abs() < 1e-15);
        assert!((c2 + 0.17472).abs() < 1e-15);
    }

    #[test]
    fn total_worked_values() {
        let p = total_probability(0.7, 0.1, 1, EvalMode::ClosedSeries).unwrap();
        assert!((p - 0.7066528).abs() < 1e-12);
        let p = total_probability(0.7, 0.05, 1, EvalMode::ClosedSeries).unwrap();
        assert!((p - 0.7037632).abs() < 1e-12);
        // Quadrature resummation agrees to O(x^3).
        let q = total_probability(0.7, 0.1, 1, EvalMode::Quadrature).unwrap();
        assert!((q - 0.7066528).abs() < 1e-3);
        // Born rule at x = 0 and at the symmetric point.
        assert_eq!(total_probability(0.7, 0.0, 1, EvalMode::ClosedSeries).unwrap(), 0.7);
        assert_eq!(total_probability(0.5, 0.08, 1, EvalMode::ClosedSeries).unwrap(), 0.5);
    }

    #[test]
    fn complementarity_is_exact_in_both_modes() {
        for &x in &[0.01, 0.05, 0.1] {
            for &a2 in &[0.1, 0.35, 0.62, 0.9] {
                let p = total_probability(a2, x, 1, EvalMode::ClosedSeries).unwrap();
                let q = total_probability(1.0 - a2, x, 1, EvalMode::ClosedSeries).unwrap();
                assert_eq!(p + q, 1.0);
            }
        }
    }

    #[test]
    fn single_and_pair_series_totals_are_bit_identical() {
        for &x in &[0.0, 0.02, 0.1] {
            for &a2 in &[0.2, 0.5, 0.7] {
                let p1 = total_probability(a2, x, 1, EvalMode::ClosedSeries).unwrap();
                let p2 = total_probability(a2, x, 2, EvalMode::ClosedSeries).unwrap();
                assert_eq!(p1.to_bits(), p2.to_bits());
            }
        }
    }

    #[test]
    fn monotone_deviation_above_half() {
        let base = total_probability(0.8, 0.0, 1, EvalMode::ClosedSeries).unwrap();
        let mut last = base;
        for &x in &[0.01, 0.02, 0.05, 0.1] {
            let p = total_probability(0.8, x, 1, EvalMode::ClosedSeries).unwrap();
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            diagram(DiagramId::Single(SingleDiagram::I), 1.2, 0.1, EvalMode::Quadrature),
            Err(SeriesError::A2OutOfRange { .. })
        ));
        assert!(matches!(
            total_probability(0.7, 0.1, 3, EvalMode::Quadrature),
            Err(SeriesError::BadParticleCount { .. })
        ));
    }
}
