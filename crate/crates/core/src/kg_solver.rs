//! Characteristic (Goursat) solver for the Klein-Gordon equation in
//! light-cone coordinates, ∂²ψ/∂x₊∂x₋ = −(μ²/4)ψ, plus the zeroth-order
//! (quasi-static) solutions read directly off the boundary data.
//!
//! Data lives on the two characteristics through an apex event: the grid is
//! the forward cone of the apex, filled by marching over cells. Each cell is
//! integrated with the trapezoidal corner average, which makes the scheme
//! second order:
//!
//!   ψ_{i+1,j+1}(1 + μ²h²/16) = ψ_{i+1,j} + ψ_{i,j+1} − ψ_{i,j}
//!                              − (μ²h²/16)(ψ_{i+1,j} + ψ_{i,j+1} + ψ_{i,j})
//!
//! The zeroth-order route instead extracts the plane-wave factor and reads
//! the transported profile h(x₊−x₋) off the two boundary branches; it is the
//! closed-form path the numerical solver is checked against.

use alloc::sync::Arc;

use num_complex::Complex64;

use crate::geometry::{collapse_distance_sq_lightcone, FourVector, SpacetimeEvent};
use crate::math;
use crate::wavefunction::ON_SHELL_REL_TOL;

/// Apex values of the two boundary functions must agree to this.
pub const APEX_ABS_TOL: f64 = 1e-12;

/// Tolerance for the reduced boundary readings of h at the apex.
pub const BOUNDARY_CONSISTENCY_TOL: f64 = 1e-8;

type BoundaryFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KgError {
    OffShell { residual: f64 },
    NonPositiveMass { mass: f64 },
    NegativeStrength { beta: f64 },
    BadGrid { n: usize, extent: f64 },
    NegativeMu { mu: f64 },
    /// The two boundary functions disagree at the cone apex.
    ApexMismatch { discrepancy: f64, scale: f64 },
    /// The reduced boundary readings do not join into a single profile.
    Inconsistent { max_discrepancy: f64 },
    /// The collapse events do not define an intersection cone: the second
    /// hit lies inside the first one's future and must be applied
    /// sequentially instead.
    NotSpacelike,
}

impl core::fmt::Display for KgError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KgError::OffShell { residual } => {
                write!(f, "(E, p) violates E^2 - p^2 = m^2 (residual {residual})")
            }
            KgError::NonPositiveMass { mass } => write!(f, "mass must be positive, got {mass}"),
            KgError::NegativeStrength { beta } => {
                write!(f, "collapse strength must be nonnegative, got {beta}")
            }
            KgError::BadGrid { n, extent } => {
                write!(f, "invalid grid: n = {n} (need >= 2), extent = {extent} (need > 0)")
            }
            KgError::NegativeMu { mu } => write!(f, "mu must be nonnegative, got {mu}"),
            KgError::ApexMismatch { discrepancy, scale } => write!(
                f,
                "boundary functions differ by {discrepancy} at the apex (scale {scale})"
            ),
            KgError::Inconsistent { max_discrepancy } => write!(
                f,
                "no single transported profile fits the boundary (max discrepancy {max_discrepancy})"
            ),
            KgError::NotSpacelike => write!(
                f,
                "collapse events are not spacelike separated in the required orientation"
            ),
        }
    }
}

impl core::error::Error for KgError {}

/// Boundary data on the two characteristics through an apex: values as
/// functions of the nonnegative offset along each characteristic.
#[derive(Clone)]
pub struct BoundaryData {
    /// ψ along x₋ = apex: offset s ↦ ψ(apex₊ + s, apex₋).
    on_xminus_zero: BoundaryFn,
    /// ψ along x₊ = apex: offset s ↦ ψ(apex₊, apex₋ + s).
    on_xplus_zero: BoundaryFn,
}

impl core::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BoundaryData")
            .field("apex", &(self.on_xminus_zero)(0.0))
            .finish_non_exhaustive()
    }
}

impl BoundaryData {
    pub fn new<F, G>(on_xminus_zero: F, on_xplus_zero: G) -> Result<Self, KgError>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let f0 = on_xminus_zero(0.0);
        let g0 = on_xplus_zero(0.0);
        let scale = f0.norm().max(g0.norm()).max(1.0);
        let discrepancy = (f0 - g0).norm();
        if discrepancy > APEX_ABS_TOL * scale {
            return Err(KgError::ApexMismatch { discrepancy, scale });
        }
        Ok(Self {
            on_xminus_zero: Arc::new(on_xminus_zero),
            on_xplus_zero: Arc::new(on_xplus_zero),
        })
    }

    /// Value along x₋ = apex at offset `s` in x₊.
    pub fn xminus_zero(&self, s: f64) -> Complex64 {
        (self.on_xminus_zero)(s)
    }

    /// Value along x₊ = apex at offset `s` in x₋.
    pub fn xplus_zero(&self, s: f64) -> Complex64 {
        (self.on_xplus_zero)(s)
    }
}

/// Discretization of the forward cone of `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: SpacetimeEvent,
    /// Extent of the grid along each of x₊ and x₋ from the apex.
    pub extent: f64,
    /// Points per axis, boundary included.
    pub n: usize,
}

impl GridSpec {
    pub fn new(origin: SpacetimeEvent, extent: f64, n: usize) -> Result<Self, KgError> {
        if n < 2 || !(extent > 0.0) {
            return Err(KgError::BadGrid { n, extent });
        }
        Ok(Self { origin, extent, n })
    }

    pub fn spacing(&self) -> f64 {
        self.extent / (self.n - 1) as f64
    }
}

/// Grid extent that captures essentially all of a collapse Gaussian of
/// strength `beta`: eight collapse widths past the apex.
pub fn default_extent(beta: f64) -> f64 {
    8.0 / math::sqrt(beta)
}

/// The filled forward-cone grid. Index i runs along x₊, j along x₋.
#[derive(Debug, Clone)]
pub struct CharacteristicGrid {
    origin: SpacetimeEvent,
    extent: f64,
    n: usize,
    spacing: f64,
    values: alloc::vec::Vec<Complex64>,
}

impl CharacteristicGrid {
    pub fn origin(&self) -> SpacetimeEvent {
        self.origin
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n + j]
    }

    pub fn x_plus(&self, i: usize) -> f64 {
        self.origin.x_plus() + i as f64 * self.spacing
    }

    pub fn x_minus(&self, j: usize) -> f64 {
        self.origin.x_minus() + j as f64 * self.spacing
    }

    pub fn event(&self, i: usize, j: usize) -> SpacetimeEvent {
        SpacetimeEvent::from_lightcone(self.x_plus(i), self.x_minus(j))
    }
}

/// Boundary data of a single collapse at the origin for a plane-wave state
/// (E, p) of mass `m` with hit strength `beta` and normalization `N`:
///
///   ψ(x₊, 0) = N exp(−(i/2)(E−p)x₊) exp(−(β/8m²)(E−p)²x₊²)
///   ψ(0, x₋) = N exp(−(i/2)(E+p)x₋) exp(−(β/8m²)(E+p)²x₋²)
pub fn collapse_boundary(
    e: f64,
    p: f64,
    beta: f64,
    m: f64,
    n0: f64,
) -> Result<BoundaryData, KgError> {
    if !(m > 0.0) {
        return Err(KgError::NonPositiveMass { mass: m });
    }
    if beta < 0.0 {
        return Err(KgError::NegativeStrength { beta });
    }
    let residual = e * e - p * p - m * m;
    if math::abs(residual) > ON_SHELL_REL_TOL * (m * m + e * e + p * p) {
        return Err(KgError::OffShell { residual });
    }
    let em = e - p;
    let ep = e + p;
    let q = beta / (8.0 * m * m);
    let f = move |x: f64| n0 * math::cexp(-q * em * em * x * x, -0.5 * em * x);
    let g = move |x: f64| n0 * math::cexp(-q * ep * ep * x * x, -0.5 * ep * x);
    BoundaryData::new(f, g)
}

/// March the characteristic scheme over the grid.
pub fn solve_goursat(
    bd: &BoundaryData,
    mu: f64,
    spec: &GridSpec,
) -> Result<CharacteristicGrid, KgError> {
    if spec.n < 2 || !(spec.extent > 0.0) {
        return Err(KgError::BadGrid { n: spec.n, extent: spec.extent });
    }
    if !(mu >= 0.0) {
        return Err(KgError::NegativeMu { mu });
    }
    let n = spec.n;
    let h = spec.spacing();
    let c = mu * mu * h * h / 16.0;
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        values[i * n] = bd.xminus_zero(i as f64 * h);
    }
    for (j, value) in values.iter_mut().enumerate().take(n).skip(1) {
        *value = bd.xplus_zero(j as f64 * h);
    }
    let denom = 1.0 + c;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let a = values[(i + 1) * n + j];
            let b = values[i * n + (j + 1)];
            let d = values[i * n + j];
            values[(i + 1) * n + (j + 1)] = (a + b - d - c * (a + b + d)) / denom;
        }
    }
    Ok(CharacteristicGrid { origin: spec.origin, extent: spec.extent, n, spacing: h, values })
}

/// The transported zeroth-order solution ψ = pw · h(x₊−x₋), with the
/// profile h read off the boundary after extracting the plane wave
/// pw = exp(−(i/2)(E−p)x₊ − (i/2)(E+p)x₋).
pub struct ZerothOrderSolution {
    origin: SpacetimeEvent,
    e: f64,
    p: f64,
    lambda_apex: f64,
    reduced_plus: BoundaryFn,
    reduced_minus: BoundaryFn,
}

impl ZerothOrderSolution {
    fn plane_wave(&self, x_plus: f64, x_minus: f64) -> Complex64 {
        plane_wave(self.e, self.p, x_plus, x_minus)
    }

    /// The profile h at λ = x₊ − x₋, from whichever branch covers λ.
    pub fn profile(&self, lambda: f64) -> Complex64 {
        if lambda >= self.lambda_apex {
            (self.reduced_plus)(lambda - self.lambda_apex)
        } else {
            (self.reduced_minus)(self.lambda_apex - lambda)
        }
    }

    /// ψ at absolute light-cone coordinates.
    pub fn eval(&self, x_plus: f64, x_minus: f64) -> Complex64 {
        self.plane_wave(x_plus, x_minus) * self.profile(x_plus - x_minus)
    }

    pub fn eval_event(&self, e: SpacetimeEvent) -> Complex64 {
        self.eval(e.x_plus(), e.x_minus())
    }

    pub fn origin(&self) -> SpacetimeEvent {
        self.origin
    }
}

fn plane_wave(e: f64, p: f64, x_plus: f64, x_minus: f64) -> Complex64 {
    math::cexp(0.0, -0.5 * (e - p) * x_plus - 0.5 * (e + p) * x_minus)
}

/// Read the zeroth-order solution off boundary data anchored at `origin`.
///
/// The two branches determine h on complementary sides of the apex value
/// λ = origin₊ − origin₋, so the only place they can disagree is the apex
/// itself; that joint is checked to [`BOUNDARY_CONSISTENCY_TOL`].
pub fn zeroth_order_solution(
    bd: &BoundaryData,
    origin: SpacetimeEvent,
    e: f64,
    p: f64,
) -> Result<ZerothOrderSolution, KgError> {
    let (o_plus, o_minus) = (origin.x_plus(), origin.x_minus());
    let fplus = bd.on_xminus_zero.clone();
    let fminus = bd.on_xplus_zero.clone();
    let (ec, pc) = (e, p);
    let reduced_plus: BoundaryFn =
        Arc::new(move |s| fplus(s) / plane_wave(ec, pc, o_plus + s, o_minus));
    let reduced_minus: BoundaryFn =
        Arc::new(move |s| fminus(s) / plane_wave(ec, pc, o_plus, o_minus + s));
    let r0 = reduced_plus(0.0);
    let r1 = reduced_minus(0.0);
    let scale = r0.norm().max(r1.norm()).max(f64::MIN_POSITIVE);
    let max_discrepancy = (r0 - r1).norm() / scale;
    if max_discrepancy > BOUNDARY_CONSISTENCY_TOL {
        return Err(KgError::Inconsistent { max_discrepancy });
    }
    Ok(ZerothOrderSolution {
        origin,
        e,
        p,
        lambda_apex: o_plus - o_minus,
        reduced_plus,
        reduced_minus,
    })
}

/// Boundary data along the intersection cone of two spacelike collapses.
///
/// The apex is X₃ = (x₂₊, x₁₋). Along the branch continuing X₂'s cone the
/// region-w₁ wavefunction is multiplied by X₂'s collapse factor, and
/// symmetrically on the other branch. The collapse factor is the invariant
/// exp((β/2)·α·α) with α·α ≤ 0 the squared perpendicular distance off the
/// momentum `p_mu`.
pub fn double_collapse_boundary<F1, F2>(
    x1: SpacetimeEvent,
    x2: SpacetimeEvent,
    beta: f64,
    p_mu: FourVector,
    psi_w1: F1,
    psi_w2: F2,
) -> Result<(SpacetimeEvent, BoundaryData), KgError>
where
    F1: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    F2: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
{
    if beta < 0.0 {
        return Err(KgError::NegativeStrength { beta });
    }
    if x2.x_plus() < x1.x_plus() || x1.x_minus() < x2.x_minus() {
        return Err(KgError::NotSpacelike);
    }
    if !p_mu.is_timelike() {
        return Err(KgError::NonPositiveMass { mass: p_mu.norm_sq() });
    }
    let apex = SpacetimeEvent::from_lightcone(x2.x_plus(), x1.x_minus());
    let (o_plus, o_minus) = (apex.x_plus(), apex.x_minus());

    // Branch with x₊ fixed at x₂₊ (continuing X₂'s cone): w₁ side. The
    // separation off X₂ has Δx₊ = 0 identically.
    let x2_minus = x2.x_minus();
    let on_xplus_zero = move |s: f64| {
        let ev = SpacetimeEvent::from_lightcone(o_plus, o_minus + s);
        let d_sq = collapse_distance_sq_lightcone(p_mu, 0.0, (o_minus + s) - x2_minus)
            .expect("timelike momentum checked above");
        psi_w1(ev.t, ev.z) * math::exp(0.5 * beta * d_sq)
    };
    // Branch with x₋ fixed at x₁₋ (continuing X₁'s cone): w₂ side.
    let x1_plus = x1.x_plus();
    let on_xminus_zero = move |s: f64| {
        let ev = SpacetimeEvent::from_lightcone(o_plus + s, o_minus);
        let d_sq = collapse_distance_sq_lightcone(p_mu, (o_plus + s) - x1_plus, 0.0)
            .expect("timelike momentum checked above");
        psi_w2(ev.t, ev.z) * math::exp(0.5 * beta * d_sq)
    };
    Ok((apex, BoundaryData::new(on_xminus_zero, on_xplus_zero)?))
}

/// Single-collapse interior solution in the rest frame:
/// N exp(−imt) exp(−(β/2)(z−z_c)²).
pub fn rest_frame_collapsed(m: f64, beta: f64, z_c: f64, n0: f64) -> impl Fn(f64, f64) -> Complex64 {
    move |t: f64, z: f64| {
        let d = z - z_c;
        n0 * math::cexp(-0.5 * beta * d * d, -m * t)
    }
}

/// Merged double-collapse interior solution: the product of both collapse
/// factors on the plane wave, one Gaussian at the midpoint with doubled
/// strength.
pub fn merged_double_collapse(
    m: f64,
    beta: f64,
    z1: f64,
    z2: f64,
    n0: f64,
) -> impl Fn(f64, f64) -> Complex64 {
    move |t: f64, z: f64| {
        let d1 = z - z1;
        let d2 = z - z2;
        n0 * math::cexp(-0.5 * beta * (d1 * d1 + d2 * d2), -m * t)
    }
}
