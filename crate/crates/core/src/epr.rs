//! Two-particle correlated states and the two-particle collapse race.
//!
//! The state is a superposition of two product branches,
//! a·φ₁(z₁)φ₂(z₂) + b·χ₁(z₁)χ₂(z₂), with every packet a Gaussian of width
//! coefficient α. A hit on either peak of a particle suppresses the other
//! branch as a whole, because the branches are products. Intra-particle
//! signals are instantaneous (the peak pair of one particle is tiny against
//! the particle separation); only the inter-particle delay T matters.
//!
//! The race engine mirrors the single-particle one: each particle carries
//! kill counts per branch from its local knowledge, hits on a branch arrive
//! at the other particle after T, and incompatible pairs neutralize exactly.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::collapse_process::{
    estimate_from_outcomes, exp_waiting_time, splitmix64, trial_rng, uniform_f64, McEstimate,
    Peak, ProcessError, ProcessParams, TrialOutcome,
};
use crate::math;
use num_complex::Complex64;

/// Minimum α·(intra-particle separation)² for non-overlapping peaks.
pub const PEAK_SEPARATION_MIN: f64 = 25.0;

/// Minimum ratio of inter-particle to intra-particle separation.
pub const PARTICLE_SEPARATION_RATIO_MIN: f64 = 10.0;

/// Normalization tolerance on |a|² + |b|².
pub const BRANCH_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EprError {
    /// |a|² + |b|² must be 1.
    NotNormalized { norm: f64 },
    NonPositiveWidth { alpha: f64 },
    /// α·(z_k1 − z_k2)² too small for the named particle.
    PeaksOverlap { particle: u8, alpha_sep_sq: f64 },
    /// Inter-particle separation not large against the intra-particle one.
    ParticlesTooClose { ratio: f64 },
    NonPositiveStrength { beta: f64 },
}

impl core::fmt::Display for EprError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EprError::NotNormalized { norm } => {
                write!(f, "|a|^2 + |b|^2 = {norm} must be 1 within {BRANCH_NORM_TOL}")
            }
            EprError::NonPositiveWidth { alpha } => {
                write!(f, "width coefficient alpha = {alpha} must be positive")
            }
            EprError::PeaksOverlap { particle, alpha_sep_sq } => write!(
                f,
                "particle {particle}: alpha * separation^2 = {alpha_sep_sq} \
                 below {PEAK_SEPARATION_MIN}"
            ),
            EprError::ParticlesTooClose { ratio } => write!(
                f,
                "inter/intra separation ratio {ratio} below {PARTICLE_SEPARATION_RATIO_MIN}"
            ),
            EprError::NonPositiveStrength { beta } => {
                write!(f, "hit strength beta = {beta} must be positive")
            }
        }
    }
}

impl core::error::Error for EprError {}

/// A recorded hit factor exp(−(β/2)(z_particle − center)²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitFactor {
    pub particle: u8,
    pub center: f64,
    pub strength: f64,
}

/// Correlated two-particle superposition of two product branches.
///
/// Branch 1 (weight |a|²) has particle 1 at `z11` and particle 2 at `z21`;
/// branch 2 (weight |b|²) at `z12` and `z22`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleState {
    pub a: Complex64,
    pub b: Complex64,
    pub z11: f64,
    pub z12: f64,
    pub z21: f64,
    pub z22: f64,
    pub width_coeff: f64,
    hit_factors: Vec<HitFactor>,
}

/// Peak centers for [`make_epr`], particle-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprCenters {
    pub z11: f64,
    pub z12: f64,
    pub z21: f64,
    pub z22: f64,
}

/// Build the correlated state, checking the geometry assumptions.
pub fn make_epr(
    a: Complex64,
    b: Complex64,
    centers: EprCenters,
    alpha: f64,
) -> Result<TwoParticleState, EprError> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if math::abs(norm - 1.0) > BRANCH_NORM_TOL {
        return Err(EprError::NotNormalized { norm });
    }
    if !(alpha > 0.0) {
        return Err(EprError::NonPositiveWidth { alpha });
    }
    let intra1 = centers.z11 - centers.z12;
    let intra2 = centers.z21 - centers.z22;
    for (particle, intra) in [(1u8, intra1), (2u8, intra2)] {
        let alpha_sep_sq = alpha * intra * intra;
        if alpha_sep_sq < PEAK_SEPARATION_MIN {
            return Err(EprError::PeaksOverlap { particle, alpha_sep_sq });
        }
    }
    let inter = math::abs(centers.z11 - centers.z21);
    let intra = math::abs(intra1);
    if inter < PARTICLE_SEPARATION_RATIO_MIN * intra {
        return Err(EprError::ParticlesTooClose { ratio: inter / intra });
    }
    Ok(TwoParticleState {
        a,
        b,
        z11: centers.z11,
        z12: centers.z12,
        z21: centers.z21,
        z22: centers.z22,
        width_coeff: alpha,
        hit_factors: Vec::new(),
    })
}

impl TwoParticleState {
    pub fn hit_factors(&self) -> &[HitFactor] {
        &self.hit_factors
    }

    /// Squared norm of one branch's single-particle packet after all hit
    /// factors on that particle, up to a branch-independent constant.
    ///
    /// Each hit multiplies exp(−α(z−c)²) by exp(−(β/2)(z−h)²); folding the
    /// product keeps a Gaussian, whose L² norm is the closed form used here.
    fn particle_norm_sq(&self, particle: u8, branch_center: f64) -> f64 {
        let mut gamma = self.width_coeff;
        let mut center = branch_center;
        let mut log_amp = 0.0;
        for hit in self.hit_factors.iter().filter(|h| h.particle == particle) {
            let half_beta = 0.5 * hit.strength;
            let new_gamma = gamma + half_beta;
            let d = center - hit.center;
            log_amp -= gamma * half_beta / new_gamma * d * d;
            center = (gamma * center + half_beta * hit.center) / new_gamma;
            gamma = new_gamma;
        }
        // ∫ exp(−2γ(z−c)²) dz = sqrt(π/2γ); amplitude enters squared.
        math::exp(2.0 * log_amp) * math::sqrt(core::f64::consts::PI / (2.0 * gamma))
    }

    /// Branch weights (ψ-branch, χ-branch), renormalized. Cross-branch
    /// overlap is exponentially negligible under the geometry invariants.
    pub fn branch_weights(&self) -> (f64, f64) {
        let w1 = self.a.norm_sqr()
            * self.particle_norm_sq(1, self.z11)
            * self.particle_norm_sq(2, self.z21);
        let w2 = self.b.norm_sqr()
            * self.particle_norm_sq(1, self.z12)
            * self.particle_norm_sq(2, self.z22);
        let total = w1 + w2;
        (w1 / total, w2 / total)
    }

    /// Append one hit factor on a particle.
    pub fn apply_hit(&self, particle: u8, center: f64, beta: f64) -> Result<Self, EprError> {
        if !(beta > 0.0) {
            return Err(EprError::NonPositiveStrength { beta });
        }
        let mut out = self.clone();
        out.hit_factors.push(HitFactor { particle, center, strength: beta });
        Ok(out)
    }

    /// The incompatible pair: one hit at particle 1's first-branch peak and
    /// one at particle 2's second-branch peak. Both branches are suppressed;
    /// for symmetric geometry equally, restoring the |a|²:|b|² ratio.
    pub fn apply_incompatible_pair(&self, beta: f64) -> Result<Self, EprError> {
        self.apply_hit(1, self.z11, beta)?.apply_hit(2, self.z22, beta)
    }

    /// A compatible pair: hits on the same branch at both particles.
    pub fn apply_compatible_pair(&self, beta: f64) -> Result<Self, EprError> {
        self.apply_hit(1, self.z11, beta)?.apply_hit(2, self.z21, beta)
    }
}

// ---------------------------------------------------------------------------
// The two-particle race.

/// The two product branches; ψ is reported as peak 1, χ as peak 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Psi,
    Chi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Flight {
    arrival: f64,
    seq: u32,
    branch: Branch,
    to_particle: usize,
}

impl Eq for Flight {}

impl PartialOrd for Flight {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Flight {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.arrival
            .total_cmp(&other.arrival)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Run one two-particle race. Knowledge rule: a hit on either peak of
/// particle k updates particle k instantly and the other particle after T.
/// The winner is a branch; it is reported as peak 1 (ψ) or peak 2 (χ).
pub fn simulate_epr_trial<R: RngCore>(params: &ProcessParams, rng: &mut R) -> TrialOutcome {
    use alloc::collections::BinaryHeap;
    use core::cmp::Reverse;

    let a2 = params.a2;
    let b2 = 1.0 - a2;
    let lambda = params.lambda;
    let t_delay = params.t_delay;

    // known[k][branch]: hits on that branch known to particle k.
    let mut known_psi = [0u32; 2];
    let mut known_chi = [0u32; 2];
    let mut in_flight_psi: u32 = 0;
    let mut in_flight_chi: u32 = 0;
    let mut total_psi: u32 = 0;
    let mut total_chi: u32 = 0;

    let mut flights: BinaryHeap<Reverse<Flight>> = BinaryHeap::new();
    let mut now = 0.0f64;
    let mut hits: u32 = 0;
    let mut seq: u32 = 0;

    let branch_weights = |psi_known: u32, chi_known: u32| -> (f64, f64) {
        use core::cmp::Ordering::*;
        // Kill counts: every ψ hit kills χ once and vice versa.
        match psi_known.cmp(&chi_known) {
            Greater => (1.0, 0.0), // χ dead locally
            Equal => (a2, b2),
            Less => (0.0, 1.0),
        }
    };

    let truncate = |total_psi: u32, total_chi: u32, now: f64, hits: u32| TrialOutcome {
        winner: match total_psi.cmp(&total_chi) {
            core::cmp::Ordering::Greater => Peak::One,
            core::cmp::Ordering::Less => Peak::Two,
            core::cmp::Ordering::Equal => {
                if a2 >= b2 {
                    Peak::One
                } else {
                    Peak::Two
                }
            }
        },
        n_events: hits,
        resolve_time: now,
        truncated: true,
    };

    loop {
        let (w_psi_1, w_chi_1) = branch_weights(known_psi[0], known_chi[0]);
        let (w_psi_2, w_chi_2) = branch_weights(known_psi[1], known_chi[1]);
        // Each particle is hit at rate λ, split over the branches.
        let rates = [
            lambda * w_psi_1,
            lambda * w_chi_1,
            lambda * w_psi_2,
            lambda * w_chi_2,
        ];
        let total: f64 = rates.iter().sum();

        let next_hit = if total > 0.0 {
            now + exp_waiting_time(rng, total)
        } else {
            f64::INFINITY
        };
        let next_arrival = flights.peek().map(|Reverse(f)| f.arrival);

        match next_arrival {
            Some(arrival) if arrival <= next_hit => {
                let Reverse(flight) = flights.pop().expect("peeked entry exists");
                now = arrival;
                let k = flight.to_particle;
                match flight.branch {
                    Branch::Psi => {
                        in_flight_psi -= 1;
                        known_psi[k] += 1;
                        if known_psi[k] > known_chi[k] && in_flight_chi == 0 {
                            return TrialOutcome {
                                winner: Peak::One,
                                n_events: hits,
                                resolve_time: now,
                                truncated: false,
                            };
                        }
                    }
                    Branch::Chi => {
                        in_flight_chi -= 1;
                        known_chi[k] += 1;
                        if known_chi[k] > known_psi[k] && in_flight_psi == 0 {
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
                let mut pick = uniform_f64(rng) * total;
                let mut clock = 0usize;
                for (i, &r) in rates.iter().enumerate() {
                    if pick < r {
                        clock = i;
                        break;
                    }
                    pick -= r;
                    clock = i;
                }
                let particle = clock / 2;
                let branch = if clock.is_multiple_of(2) { Branch::Psi } else { Branch::Chi };
                match branch {
                    Branch::Psi => {
                        known_psi[particle] += 1;
                        total_psi += 1;
                        in_flight_psi += 1;
                    }
                    Branch::Chi => {
                        known_chi[particle] += 1;
                        total_chi += 1;
                        in_flight_chi += 1;
                    }
                }
                flights.push(Reverse(Flight {
                    arrival: now + t_delay,
                    seq,
                    branch,
                    to_particle: 1 - particle,
                }));
                seq += 1;
                hits += 1;
                if hits >= params.max_events {
                    return truncate(total_psi, total_chi, now, hits);
                }
            }
            _ => return truncate(total_psi, total_chi, now, hits),
        }
    }
}

/// Trial `trial_index` of the two-particle race, pure in (params, index).
/// A distinct stream domain keeps it decorrelated from the single-particle
/// trials at the same seed.
pub fn run_epr_trial(params: &ProcessParams, trial_index: u64) -> TrialOutcome {
    let mut rng = trial_rng(splitmix64(params.master_seed ^ 0x45505231), trial_index);
    simulate_epr_trial(params, &mut rng)
}

/// Monte Carlo estimate of P(ψ-branch dominates), sequential reference path.
pub fn estimate_epr(params: &ProcessParams) -> Result<McEstimate, ProcessError> {
    params.validate()?;
    Ok(estimate_from_outcomes(
        params.trials,
        (0..params.trials).map(|i| run_epr_trial(params, i)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centers() -> EprCenters {
        EprCenters { z11: -100.0, z12: -110.0, z21: 100.0, z22: 90.0 }
    }

    fn state(a2: f64) -> TwoParticleState {
        let a = Complex64::new(a2.sqrt(), 0.0);
        let b = Complex64::new((1.0 - a2).sqrt(), 0.0);
        make_epr(a, b, centers(), 1.0).unwrap()
    }

    #[test]
    fn branch_weights_are_born_weights() {
        let s = state(0.7);
        let (w1, w2) = s.branch_weights();
        assert!((w1 - 0.7).abs() < 1e-12);
        assert!((w2 - 0.3).abs() < 1e-12);

        let s = state(0.5);
        let (w1, w2) = s.branch_weights();
        assert!((w1 - 0.5).abs() < 1e-12);
        assert!((w2 - 0.5).abs() < 1e-12);

        let product = make_epr(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), centers(), 1.0)
            .unwrap();
        let (w1, w2) = product.branch_weights();
        assert_eq!(w1, 1.0);
        assert_eq!(w2, 0.0);
    }

    #[test]
    fn geometry_violations_name_the_failed_inequality() {
        let a = Complex64::new(0.6f64.sqrt(), 0.0);
        let b = Complex64::new(0.4f64.sqrt(), 0.0);
        let err = make_epr(a, b, EprCenters { z11: -1.0, z12: -2.0, z21: 100.0, z22: 90.0 }, 1.0)
            .unwrap_err();
        assert!(matches!(err, EprError::PeaksOverlap { particle: 1, .. }));

        let err = make_epr(a, b, EprCenters { z11: -30.0, z12: -40.0, z21: 30.0, z22: 20.0 }, 1.0)
            .unwrap_err();
        assert!(matches!(err, EprError::ParticlesTooClose { .. }));

        let err = make_epr(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), centers(), 1.0)
            .unwrap_err();
        assert!(matches!(err, EprError::NotNormalized { .. }));
    }

    #[test]
    fn incompatible_pair_restores_the_ratio() {
        // Symmetric geometry: both branches suppressed equally.
        let s = state(0.7);
        let hit = s.apply_incompatible_pair(0.8).unwrap();
        let (w1, w2) = hit.branch_weights();
        assert!((w1 - 0.7).abs() < 1e-9, "w1 = {w1}");
        assert!((w2 - 0.3).abs() < 1e-9);
    }

    #[test]
    fn weak_pair_changes_nothing() {
        let s = state(0.6);
        let hit = s.apply_incompatible_pair(1e-12).unwrap();
        let (w1, _) = hit.branch_weights();
        assert!((w1 - 0.6).abs() < 1e-9);
    }

    #[test]
    fn compatible_pair_kills_the_other_branch() {
        let s = state(0.5);
        let hit = s.apply_compatible_pair(2.0).unwrap();
        let (w1, w2) = hit.branch_weights();
        assert!(w2 <= 1e-6, "w2 = {w2}");
        assert!((w1 + w2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_limit_without_delay() {
        let params = ProcessParams {
            a2: 0.7,
            lambda: 1.0,
            t_delay: 0.0,
            master_seed: 11,
            max_events: 64,
            trials: 20_000,
        };
        let mut wins = 0u64;
        for i in 0..params.trials {
            let out = run_epr_trial(&params, i);
            assert!(!out.truncated);
            if out.winner == Peak::One {
                wins += 1;
            }
        }
        let p_hat = wins as f64 / params.trials as f64;
        assert!((p_hat - 0.7).abs() < 0.01, "p_hat = {p_hat}");
    }

    #[test]
    fn symmetric_epr_race_is_even() {
        let params = ProcessParams {
            a2: 0.5,
            lambda: 1.0,
            t_delay: 0.1,
            master_seed: 5,
            max_events: 64,
            trials: 100_000,
        };
        let est = estimate_epr(&params).unwrap();
        assert!((est.p_hat - 0.5).abs() <= 3.0 * est.std_error, "p_hat = {}", est.p_hat);
    }
}
