//! Core engine for a local, Lorentz-invariant spontaneous-collapse model in
//! 1+1 dimensions.
//!
//! Everything in this crate is pure computation over plain values: Minkowski
//! geometry and the invariant collapse distance, analytic Gaussian wave
//! states and the light-cone hit operator, a characteristic (Goursat) solver
//! for the Klein-Gordon equation, closed-form and quadrature evaluations of
//! the collapse-race probability series, the event-driven stochastic race
//! itself, and order-of-magnitude estimates for laboratory parameters.
//!
//! The crate is `no_std`-compatible (`default-features = false`); it only
//! needs `alloc`. IO, file formats and the command-line front end live in the
//! companion `collapse-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// Guards written as !(x > 0.0) intentionally reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod collapse_process;
pub mod epr;
pub mod geometry;
pub mod kg_solver;
pub mod magnitudes;
mod math;
pub mod quadrature;
pub mod series;
pub mod wavefunction;

pub use num_complex::Complex64;
