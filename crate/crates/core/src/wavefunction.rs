//! Analytic wave states: superpositions of complex Gaussian packets with
//! plane-wave phases, and the Gaussian hit operator acting on them.
//!
//! A term is amplitude · exp(−γ(z−z_c)²) · exp(i(pz − Et)). Products of
//! Gaussians stay Gaussian, so a hit exp(−(β/2)(z−z₁)²) is applied in closed
//! form: the width coefficient grows by β/2, the center moves to the
//! weighted mean, and the amplitude picks up the completed-square factor.
//! The treatment is quasi-static: free spreading is neglected and time enters
//! only through the plane-wave phases.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::geometry::{FourVector, SpacetimeEvent};
use crate::math;

/// Relative tolerance for the mass-shell check E² − p² = m².
pub const ON_SHELL_REL_TOL: f64 = 1e-9;

/// |ψ| below this fraction of the largest term amplitude counts as a node.
pub const NODE_REL_TOL: f64 = 1e-12;

/// Minimum γ·Δz² between adjacent peaks for a well-defined peak partition.
pub const PEAK_SEPARATION_MIN: f64 = 25.0;

/// Default tail threshold: a shifted peak "lies well into the tail" when the
/// original envelope at the shifted center is below this.
pub const TAIL_SHIFT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveError {
    EmptyState,
    NonPositiveWidth { term: usize, width_coeff: f64 },
    OffShell { term: usize, residual: f64 },
    NonPositiveStrength { strength: f64 },
    HitMomentumNotTimelike { norm_sq: f64 },
    /// Norm too small to renormalize (severe underflow).
    ZeroNorm,
    /// ψ evaluated at a node; the Bohm vector is undefined there.
    Node { abs_psi: f64, scale: f64 },
    /// Adjacent peaks too close for a meaningful partition.
    PeaksOverlap { gamma: f64, separation: f64 },
    NoSuchPeak { index: usize, peaks: usize },
}

impl core::fmt::Display for WaveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WaveError::EmptyState => write!(f, "wave state has no terms"),
            WaveError::NonPositiveWidth { term, width_coeff } => {
                write!(f, "term {term} has non-positive width coefficient {width_coeff}")
            }
            WaveError::OffShell { term, residual } => {
                write!(f, "term {term} violates E^2 - p^2 = m^2 (residual {residual})")
            }
            WaveError::NonPositiveStrength { strength } => {
                write!(f, "hit strength must be positive, got {strength}")
            }
            WaveError::HitMomentumNotTimelike { norm_sq } => {
                write!(f, "hit momentum vector must be timelike (P.P = {norm_sq})")
            }
            WaveError::ZeroNorm => write!(f, "state norm underflowed to zero"),
            WaveError::Node { abs_psi, scale } => {
                write!(f, "|psi| = {abs_psi} is below {NODE_REL_TOL} * {scale}: node")
            }
            WaveError::PeaksOverlap { gamma, separation } => write!(
                f,
                "peaks at separation {separation} with width coefficient {gamma} overlap: \
                 need gamma * separation^2 >= {PEAK_SEPARATION_MIN}"
            ),
            WaveError::NoSuchPeak { index, peaks } => {
                write!(f, "peak index {index} out of range ({peaks} peaks)")
            }
        }
    }
}

impl core::error::Error for WaveError {}

/// One complex Gaussian packet with a plane-wave phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub amplitude: Complex64,
    pub center: f64,
    pub width_coeff: f64,
    pub energy: f64,
    pub momentum: f64,
}

impl GaussianTerm {
    pub fn new(amplitude: Complex64, center: f64, width_coeff: f64, energy: f64, momentum: f64) -> Self {
        Self { amplitude, center, width_coeff, energy, momentum }
    }

    /// Packet at rest: energy = m, momentum = 0.
    pub fn at_rest(amplitude: Complex64, center: f64, width_coeff: f64, mass: f64) -> Self {
        Self::new(amplitude, center, width_coeff, mass, 0.0)
    }

    fn evaluate(&self, t: f64, z: f64) -> Complex64 {
        let d = z - self.center;
        self.amplitude
            * math::cexp(-self.width_coeff * d * d, self.momentum * z - self.energy * t)
    }
}

/// A collapse hit: where it happened, how strong it is, and the Bohm
/// momentum vector it inherits from the pre-hit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRecord {
    pub event: SpacetimeEvent,
    pub strength: f64,
    pub momentum_vector: FourVector,
}

impl HitRecord {
    pub fn new(
        event: SpacetimeEvent,
        strength: f64,
        momentum_vector: FourVector,
    ) -> Result<Self, WaveError> {
        if !(strength > 0.0) {
            return Err(WaveError::NonPositiveStrength { strength });
        }
        if !momentum_vector.is_timelike() {
            return Err(WaveError::HitMomentumNotTimelike { norm_sq: momentum_vector.norm_sq() });
        }
        Ok(Self { event, strength, momentum_vector })
    }

    /// Hit at rest for a particle of mass `m`.
    pub fn at_rest(event: SpacetimeEvent, strength: f64, mass: f64) -> Result<Self, WaveError> {
        Self::new(event, strength, FourVector::new(mass, 0.0))
    }
}

/// Superposition of Gaussian terms for a particle of mass `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    terms: Vec<GaussianTerm>,
    mass: f64,
}

impl WaveState {
    pub fn new(terms: Vec<GaussianTerm>, mass: f64) -> Result<Self, WaveError> {
        if terms.is_empty() {
            return Err(WaveError::EmptyState);
        }
        for (i, term) in terms.iter().enumerate() {
            if !(term.width_coeff > 0.0) {
                return Err(WaveError::NonPositiveWidth { term: i, width_coeff: term.width_coeff });
            }
            let residual = term.energy * term.energy - term.momentum * term.momentum - mass * mass;
            let scale = mass * mass + term.energy * term.energy + term.momentum * term.momentum;
            if math::abs(residual) > ON_SHELL_REL_TOL * scale {
                return Err(WaveError::OffShell { term: i, residual });
            }
        }
        Ok(Self { terms, mass })
    }

    /// The two-peak superposition a·exp(−α(z−z₁)²) + b·exp(−α(z−z₂)²) at
    /// rest, normalized.
    pub fn two_peak(
        a: Complex64,
        b: Complex64,
        alpha: f64,
        z1: f64,
        z2: f64,
        mass: f64,
    ) -> Result<Self, WaveError> {
        let state = Self::new(
            alloc::vec![
                GaussianTerm::at_rest(a, z1, alpha, mass),
                GaussianTerm::at_rest(b, z2, alpha, mass),
            ],
            mass,
        )?;
        state.normalized()
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Pointwise ψ(t, z).
    pub fn evaluate(&self, t: f64, z: f64) -> Complex64 {
        self.terms.iter().map(|term| term.evaluate(t, z)).sum()
    }

    /// ψ sampled over a grid at fixed t. This is the brute-force oracle the
    /// closed-form operations are tested against.
    pub fn sample(&self, t: f64, z_grid: &[f64]) -> Vec<Complex64> {
        z_grid.iter().map(|&z| self.evaluate(t, z)).collect()
    }

    /// ∫|ψ|² dz at time `t`, by closed-form Gaussian overlap integrals.
    pub fn norm_sq_at(&self, t: f64) -> f64 {
        overlap_norm_sq(&self.terms, t)
    }

    /// ∫|ψ|² dz with the cross-term phases evaluated at t = 0.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq_at(0.0)
    }

    /// Scaled copy with ∫|ψ|²dz = 1 (phases at t = 0).
    pub fn normalized(&self) -> Result<Self, WaveError> {
        let n = self.norm_sq();
        if !(n > f64::MIN_POSITIVE) {
            return Err(WaveError::ZeroNorm);
        }
        let inv = 1.0 / math::sqrt(n);
        let mut out = self.clone();
        for term in &mut out.terms {
            term.amplitude *= inv;
        }
        Ok(out)
    }

    /// Bohm four-momentum Re((p̂ ψ)/ψ) at an event, from the analytic form.
    ///
    /// With p̂₀ = i∂_t and p̂_z = −i∂_z each term contributes E_k and
    /// p_k + 2iγ_k(z − z_ck), weighted by its pointwise value.
    pub fn bohm_momentum(&self, at: SpacetimeEvent) -> Result<FourVector, WaveError> {
        let psi = self.evaluate(at.t, at.z);
        let scale = self
            .terms
            .iter()
            .map(|term| term.amplitude.norm())
            .fold(0.0f64, f64::max);
        if psi.norm() < NODE_REL_TOL * scale {
            return Err(WaveError::Node { abs_psi: psi.norm(), scale });
        }
        let mut num_t = Complex64::new(0.0, 0.0);
        let mut num_z = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let v = term.evaluate(at.t, at.z);
            num_t += term.energy * v;
            num_z += (Complex64::new(term.momentum, 2.0 * term.width_coeff * (at.z - term.center)))
                * v;
        }
        Ok(FourVector::new((num_t / psi).re, (num_z / psi).re))
    }

    /// Multiply by the collapse factor exp(−(β/2)(z−z₁)²) and renormalize.
    ///
    /// Closed form per term: γ → γ + β/2, center → weighted mean, amplitude
    /// scaled by the completed square. Term count is preserved.
    pub fn apply_hit(&self, hit: &HitRecord) -> Result<Self, WaveError> {
        let half_beta = 0.5 * hit.strength;
        let z1 = hit.event.z;
        let mut out = self.clone();
        for term in &mut out.terms {
            let gamma = term.width_coeff;
            let new_gamma = gamma + half_beta;
            let d = term.center - z1;
            term.amplitude *= math::exp(-(gamma * half_beta / new_gamma) * d * d);
            term.center = (gamma * term.center + half_beta * z1) / new_gamma;
            term.width_coeff = new_gamma;
        }
        out.normalized()
    }

    /// Two hits in sequence. For equal-momentum hits the order does not
    /// matter: both are multiplication operators.
    pub fn apply_double_hit(&self, hit1: &HitRecord, hit2: &HitRecord) -> Result<Self, WaveError> {
        self.apply_hit(hit1)?.apply_hit(hit2)
    }

    /// Centers of the peaks, grouping terms that share a center, in order of
    /// first appearance in the term list.
    pub fn peak_centers(&self) -> Vec<f64> {
        self.peak_groups().into_iter().map(|g| g.center).collect()
    }

    /// Relative weight of one peak: the group's ∫|·|²dz over the sum of all
    /// group norms. Under the separation precondition the neglected
    /// cross-group overlap is exponentially small, and the weights sum to
    /// one exactly.
    pub fn peak_weight(&self, peak_index: usize) -> Result<f64, WaveError> {
        let weights = self.peak_weights()?;
        weights
            .get(peak_index)
            .copied()
            .ok_or(WaveError::NoSuchPeak { index: peak_index, peaks: weights.len() })
    }

    /// All peak weights, in peak order. They sum to one.
    pub fn peak_weights(&self) -> Result<Vec<f64>, WaveError> {
        let groups = self.peak_groups();
        self.check_separation(&groups)?;
        let norms: Vec<f64> = groups
            .iter()
            .map(|g| {
                let terms: Vec<GaussianTerm> =
                    g.term_indices.iter().map(|&i| self.terms[i]).collect();
                overlap_norm_sq(&terms, 0.0)
            })
            .collect();
        let total: f64 = norms.iter().sum();
        if !(total > f64::MIN_POSITIVE) {
            return Err(WaveError::ZeroNorm);
        }
        Ok(norms.into_iter().map(|n| n / total).collect())
    }

    fn peak_groups(&self) -> Vec<PeakGroup> {
        let mut groups: Vec<PeakGroup> = Vec::new();
        for (i, term) in self.terms.iter().enumerate() {
            let tol = 1e-9 * (1.0 + math::abs(term.center));
            match groups.iter_mut().find(|g| math::abs(g.center - term.center) <= tol) {
                Some(g) => g.term_indices.push(i),
                None => groups.push(PeakGroup {
                    center: term.center,
                    term_indices: alloc::vec![i],
                }),
            }
        }
        groups
    }

    fn check_separation(&self, groups: &[PeakGroup]) -> Result<(), WaveError> {
        let mut centers: Vec<(f64, f64)> = groups
            .iter()
            .map(|g| {
                let min_gamma = g
                    .term_indices
                    .iter()
                    .map(|&i| self.terms[i].width_coeff)
                    .fold(f64::INFINITY, f64::min);
                (g.center, min_gamma)
            })
            .collect();
        centers.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in centers.windows(2) {
            let sep = pair[1].0 - pair[0].0;
            let gamma = pair[0].1.min(pair[1].1);
            if gamma * sep * sep < PEAK_SEPARATION_MIN {
                return Err(WaveError::PeaksOverlap { gamma, separation: sep });
            }
        }
        Ok(())
    }
}

struct PeakGroup {
    center: f64,
    term_indices: Vec<usize>,
}

/// Closed-form ∫ (Σψ_j)(Σψ_k)* dz over all of z.
fn overlap_norm_sq(terms: &[GaussianTerm], t: f64) -> f64 {
    const SQRT_PI: f64 = 1.772_453_850_905_516;
    let mut total = 0.0;
    for (j, tj) in terms.iter().enumerate() {
        for (k, tk) in terms.iter().enumerate() {
            if k < j {
                continue; // (j,k) and (k,j) are conjugates; fold them below
            }
            let g = tj.width_coeff + tk.width_coeff;
            let mean = (tj.width_coeff * tj.center + tk.width_coeff * tk.center) / g;
            let dc = tj.center - tk.center;
            let dp = tj.momentum - tk.momentum;
            let de = tj.energy - tk.energy;
            let mag = math::exp(-tj.width_coeff * tk.width_coeff * dc * dc / g - dp * dp / (4.0 * g))
                * SQRT_PI
                / math::sqrt(g);
            let value = tj.amplitude * tk.amplitude.conj() * mag * math::cexp(0.0, dp * mean - de * t);
            total += if k == j { value.re } else { 2.0 * value.re };
        }
    }
    total
}

/// Post-collapse centers of a symmetric two-peak state with initial width α
/// after one hit of strength β on each peak:
/// z₁' = z₁ + (β/2)/(α+β)·(z₂−z₁) and symmetrically for z₂'.
pub fn two_peak_shift(alpha: f64, beta: f64, z1: f64, z2: f64) -> (f64, f64) {
    let shift = 0.5 * beta / (alpha + beta);
    (z1 + shift * (z2 - z1), z2 + shift * (z1 - z2))
}

/// Whether the shifted peak lies well into the original tail:
/// exp(−αβ²Δ²/(4(α+β)²)) < threshold, strictly.
pub fn tail_shift_condition_with(alpha: f64, beta: f64, separation: f64, threshold: f64) -> bool {
    let s = alpha + beta;
    math::exp(-alpha * beta * beta * separation * separation / (4.0 * s * s)) < threshold
}

/// [`tail_shift_condition_with`] at the default threshold of 1e-3.
pub fn tail_shift_condition(alpha: f64, beta: f64, separation: f64) -> bool {
    tail_shift_condition_with(alpha, beta, separation, TAIL_SHIFT_THRESHOLD)
}
