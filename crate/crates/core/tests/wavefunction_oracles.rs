//! Brute-force oracles for the closed-form wave-state operations: the
//! analytic results are checked against grid sampling, trapezoid
//! integration and finite differences, none of which share code with the
//! closed forms.

use collapse_core::geometry::SpacetimeEvent;
use collapse_core::wavefunction::{two_peak_shift, GaussianTerm, HitRecord, WaveState};
use collapse_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

fn trapezoid(ys: &[f64], step: f64) -> f64 {
    let inner: f64 = ys[1..ys.len() - 1].iter().sum();
    step * (inner + 0.5 * (ys[0] + ys[ys.len() - 1]))
}

/// Positions of the two density maxima, one on each side of `split`.
fn two_argmax(grid: &[f64], density: &[f64], split: f64) -> (f64, f64) {
    let mut best_left = (f64::MIN, 0.0);
    let mut best_right = (f64::MIN, 0.0);
    for (&z, &d) in grid.iter().zip(density) {
        if z < split {
            if d > best_left.0 {
                best_left = (d, z);
            }
        } else if d > best_right.0 {
            best_right = (d, z);
        }
    }
    (best_left.1, best_right.1)
}

#[test]
fn sampled_norm_of_normalized_state_is_one() {
    let s = WaveState::two_peak(c(0.6f64.sqrt()), c(0.4f64.sqrt()), 2.0, -5.0, 5.0, 1.0).unwrap();
    let grid = linspace(-15.0, 15.0, 20_001);
    let density: Vec<f64> = s.sample(0.0, &grid).iter().map(|v| v.norm_sqr()).collect();
    let norm = trapezoid(&density, grid[1] - grid[0]);
    assert!((norm - 1.0).abs() < 1e-6, "norm = {norm}");
}

#[test]
fn peak_shift_matches_grid_argmax_across_width_ratios() {
    // One fixed hit strength, peak widths spanning two decades around it.
    let beta = 1.0f64;
    for ratio in [0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
        let alpha: f64 = beta * ratio;
        // Separation scaled to the packet width: alpha * sep^2 = 36, well
        // separated but without underflowing the suppressed amplitudes.
        let half_sep = 3.0 / alpha.sqrt();
        let (z1, z2) = (-half_sep, half_sep);
        let state = WaveState::two_peak(c(1.0), c(1.0), alpha, z1, z2, 1.0).unwrap();
        let h1 = HitRecord::at_rest(SpacetimeEvent::new(0.0, z1), beta, 1.0).unwrap();
        let h2 = HitRecord::at_rest(SpacetimeEvent::new(0.0, z2), beta, 1.0).unwrap();
        let hit = state.apply_double_hit(&h1, &h2).unwrap();

        let span = half_sep + 4.0 / alpha.sqrt();
        let grid = linspace(-span, span, 40_001);
        let step = grid[1] - grid[0];
        let density: Vec<f64> = hit.sample(0.0, &grid).iter().map(|v| v.norm_sqr()).collect();
        let (got1, got2) = two_argmax(&grid, &density, 0.0);

        let (want1, want2) = two_peak_shift(alpha, beta, z1, z2);
        assert!(
            (got1 - want1).abs() <= step,
            "ratio {ratio}: left peak {got1} vs {want1} (step {step})"
        );
        assert!(
            (got2 - want2).abs() <= step,
            "ratio {ratio}: right peak {got2} vs {want2}"
        );
    }
}

#[test]
fn quarter_separation_shift_at_equal_widths() {
    let (z1, z2) = two_peak_shift(3.0, 3.0, -8.0, 8.0);
    assert_eq!(z1, -8.0 + 4.0);
    assert_eq!(z2, 8.0 - 4.0);
}

#[test]
fn peak_weights_match_partitioned_grid_integrals() {
    let mass = 1.0;
    // A weak hit so both weights stay far from 0 and 1.
    let s = WaveState::two_peak(c(0.75f64.sqrt()), c(0.25f64.sqrt()), 1.5, -6.0, 6.0, mass)
        .unwrap();
    let hit = HitRecord::at_rest(SpacetimeEvent::new(0.0, -6.0), 0.05, mass).unwrap();
    let after = s.apply_hit(&hit).unwrap();

    let closed = after.peak_weights().unwrap();
    let centers = after.peak_centers();
    let split = 0.5 * (centers[0] + centers[1]);

    let grid = linspace(-20.0, 20.0, 40_001);
    let step = grid[1] - grid[0];
    let density: Vec<f64> = after.sample(0.0, &grid).iter().map(|v| v.norm_sqr()).collect();
    let total = trapezoid(&density, step);
    let left: Vec<f64> = grid
        .iter()
        .zip(&density)
        .filter(|(&z, _)| z < split)
        .map(|(_, &d)| d)
        .collect();
    let left_weight = trapezoid(&left, step) / total;

    let (closed_left, closed_right) = if centers[0] < centers[1] {
        (closed[0], closed[1])
    } else {
        (closed[1], closed[0])
    };
    assert!(
        (left_weight - closed_left).abs() < 1e-6,
        "grid {left_weight} vs closed {closed_left}"
    );
    assert!((closed_left + closed_right - 1.0).abs() < 1e-12);
}

#[test]
fn strong_hit_concentrates_weight_on_grid_too() {
    let mass = 1.0;
    let s = WaveState::two_peak(c(0.5f64.sqrt()), c(0.5f64.sqrt()), 1.0, -5.0, 5.0, mass).unwrap();
    let hit = HitRecord::at_rest(SpacetimeEvent::new(0.0, -5.0), 0.5, mass).unwrap();
    let after = s.apply_hit(&hit).unwrap();
    assert!(after.peak_weight(0).unwrap() >= 1.0 - 1e-6);

    let grid = linspace(-15.0, 15.0, 30_001);
    let step = grid[1] - grid[0];
    let density: Vec<f64> = after.sample(0.0, &grid).iter().map(|v| v.norm_sqr()).collect();
    let total = trapezoid(&density, step);
    let right: Vec<f64> = grid
        .iter()
        .zip(&density)
        .filter(|(&z, _)| z > 0.0)
        .map(|(_, &d)| d)
        .collect();
    assert!(trapezoid(&right, step) / total < 1e-6);
}

#[test]
fn bohm_momentum_agrees_with_finite_differences() {
    // A two-term state with distinct widths, centers and momenta; the
    // oracle differentiates the sampled wavefunction directly.
    let mass = 1.0;
    let p1 = 0.3f64;
    let e1 = (mass * mass + p1 * p1).sqrt();
    let state = WaveState::new(
        vec![
            GaussianTerm::new(c(0.8), -0.4, 0.7, e1, p1),
            GaussianTerm::new(Complex64::new(0.3, 0.2), 0.6, 1.3, mass, 0.0),
        ],
        mass,
    )
    .unwrap();

    let eps = 1e-6;
    for &(t, z) in &[(0.0, 0.1), (0.4, -0.2), (1.1, 0.8)] {
        let at = SpacetimeEvent::new(t, z);
        let got = state.bohm_momentum(at).unwrap();

        let psi = state.evaluate(t, z);
        let dpsi_dt = (state.evaluate(t + eps, z) - state.evaluate(t - eps, z)) / (2.0 * eps);
        let dpsi_dz = (state.evaluate(t, z + eps) - state.evaluate(t, z - eps)) / (2.0 * eps);
        let want_t = (Complex64::i() * dpsi_dt / psi).re;
        let want_z = (-Complex64::i() * dpsi_dz / psi).re;

        assert!((got.t - want_t).abs() < 1e-6, "E at ({t},{z}): {} vs {want_t}", got.t);
        assert!((got.z - want_z).abs() < 1e-6, "p at ({t},{z}): {} vs {want_z}", got.z);
    }
}
