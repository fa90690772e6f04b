//! IO companion to `collapse-core`: command implementations, run manifests,
//! CSV/SVG/binary artifact formats, and the wave-state JSON wire format.

// Guards written as !(x > 0.0) intentionally reject NaN parameters too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod svg;
pub mod wavestate_json;
