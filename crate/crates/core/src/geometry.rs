//! Minkowski geometry in 1+1 dimensions with metric signature (+,−).
//!
//! Natural units throughout: c = 1, ħ = 1. Light-cone coordinates are
//! x₊ = t + z and x₋ = t − z, so the forward cone of an event is the
//! quadrant where both coordinates grow.
//!
//! The one nontrivial construction here is the invariant collapse distance:
//! the squared Minkowski length of the component of a null separation
//! orthogonal to a timelike momentum vector,
//! α·α = −(P·Δx)²/(P·P), which reduces to −(Δz)² in the particle rest frame.

use crate::math;

/// Relative tolerance under which a separation still counts as null.
/// Grid points on a discretized cone are only approximately null.
pub const NULL_REL_TOL: f64 = 1e-9;

/// Errors from geometric preconditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryError {
    /// Boost velocity outside (−1, 1).
    FasterThanLight { velocity: f64 },
    /// Momentum vector is not timelike: P·P must be positive.
    NotTimelike { norm_sq: f64 },
    /// Separation vector is not null within [`NULL_REL_TOL`].
    NotNull { norm_sq: f64, scale: f64 },
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeometryError::FasterThanLight { velocity } => {
                write!(f, "boost velocity {velocity} is not inside (-1, 1)")
            }
            GeometryError::NotTimelike { norm_sq } => {
                write!(f, "momentum vector is not timelike (P.P = {norm_sq})")
            }
            GeometryError::NotNull { norm_sq, scale } => write!(
                f,
                "separation is not null: |dx.dx| = {} exceeds {NULL_REL_TOL} * {scale}",
                math::abs(*norm_sq)
            ),
        }
    }
}

impl core::error::Error for GeometryError {}

/// A contravariant 2-vector (t, z) with metric signature (+,−).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, z: f64) -> Self {
        Self { t, z }
    }

    /// Minkowski inner product u·v = u.t v.t − u.z v.z.
    pub fn dot(self, other: FourVector) -> f64 {
        self.t * other.t - self.z * other.z
    }

    /// u·u.
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn is_timelike(self) -> bool {
        self.norm_sq() > 0.0
    }

    /// Null within [`NULL_REL_TOL`], relative to t² + z².
    pub fn is_null(self) -> bool {
        math::abs(self.norm_sq()) <= NULL_REL_TOL * self.euclidean_sq()
    }

    fn euclidean_sq(self) -> f64 {
        self.t * self.t + self.z * self.z
    }
}

/// A point in 1+1 spacetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub z: f64,
}

impl SpacetimeEvent {
    pub const fn new(t: f64, z: f64) -> Self {
        Self { t, z }
    }

    /// Build an event from light-cone coordinates.
    pub fn from_lightcone(x_plus: f64, x_minus: f64) -> Self {
        Self::new(0.5 * (x_plus + x_minus), 0.5 * (x_plus - x_minus))
    }

    pub fn x_plus(self) -> f64 {
        self.t + self.z
    }

    pub fn x_minus(self) -> f64 {
        self.t - self.z
    }

    /// Displacement `self` − `origin` as a vector.
    pub fn separation_from(self, origin: SpacetimeEvent) -> FourVector {
        FourVector::new(self.t - origin.t, self.z - origin.z)
    }
}

/// Light-cone coordinates (x₊, x₋) = (t+z, t−z).
pub fn lightcone_coords(e: SpacetimeEvent) -> (f64, f64) {
    (e.x_plus(), e.x_minus())
}

/// Whether `e` lies in the closed forward light cone of `origin`.
///
/// The boundary counts as inside: collapse boundary data lives exactly on
/// the cone.
pub fn in_forward_cone(origin: SpacetimeEvent, e: SpacetimeEvent) -> bool {
    e.x_plus() >= origin.x_plus() && e.x_minus() >= origin.x_minus()
}

/// Standard boost of a 2-vector by `velocity` (in units of c).
pub fn boost(velocity: f64, v: FourVector) -> Result<FourVector, GeometryError> {
    if !(math::abs(velocity) < 1.0) {
        return Err(GeometryError::FasterThanLight { velocity });
    }
    let gamma = 1.0 / math::sqrt(1.0 - velocity * velocity);
    Ok(FourVector::new(
        gamma * (v.t - velocity * v.z),
        gamma * (v.z - velocity * v.t),
    ))
}

fn check_collapse_inputs(p: FourVector, dx: FourVector) -> Result<(), GeometryError> {
    if !p.is_timelike() {
        return Err(GeometryError::NotTimelike { norm_sq: p.norm_sq() });
    }
    if !dx.is_null() {
        return Err(GeometryError::NotNull {
            norm_sq: dx.norm_sq(),
            scale: dx.euclidean_sq(),
        });
    }
    Ok(())
}

/// Squared invariant collapse distance −(P·Δx)²/(P·P) for a null
/// separation `dx` off a timelike momentum `P`. Always ≤ 0.
pub fn collapse_distance_sq(p: FourVector, dx: FourVector) -> Result<f64, GeometryError> {
    check_collapse_inputs(p, dx)?;
    if p.z == 0.0 {
        // Rest frame: (p.t·Δt)²/p.t² cancels exactly to Δt² = Δz².
        return Ok(-(dx.t * dx.t));
    }
    let pd = p.dot(dx);
    Ok(-(pd * pd) / p.norm_sq())
}

/// [`collapse_distance_sq`] with the separation given in light-cone
/// components. For points constructed on a cone one component is exactly
/// zero, which keeps the null precondition free of round-off.
pub fn collapse_distance_sq_lightcone(
    p: FourVector,
    dx_plus: f64,
    dx_minus: f64,
) -> Result<f64, GeometryError> {
    if !p.is_timelike() {
        return Err(GeometryError::NotTimelike { norm_sq: p.norm_sq() });
    }
    let norm_sq = dx_plus * dx_minus;
    let scale = 0.5 * (dx_plus * dx_plus + dx_minus * dx_minus);
    if math::abs(norm_sq) > NULL_REL_TOL * scale {
        return Err(GeometryError::NotNull { norm_sq, scale });
    }
    if p.z == 0.0 {
        let dt = 0.5 * (dx_plus + dx_minus);
        return Ok(-(dt * dt));
    }
    let pd = 0.5 * ((p.t + p.z) * dx_minus + (p.t - p.z) * dx_plus);
    Ok(-(pd * pd) / p.norm_sq())
}

/// The perpendicular vector α = Δx − P (P·Δx)/(P·P).
///
/// Orthogonal to `P` by construction, and α·α equals
/// [`collapse_distance_sq`] of the same inputs.
pub fn alpha_vector(p: FourVector, dx: FourVector) -> Result<FourVector, GeometryError> {
    check_collapse_inputs(p, dx)?;
    let k = p.dot(dx) / p.norm_sq();
    Ok(FourVector::new(dx.t - k * p.t, dx.z - k * p.z))
}
