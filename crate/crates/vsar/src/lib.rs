//! Vector-symbolic abductive reasoning over matrix-completion puzzles.
//!
//! The crate builds up from a complex hypervector algebra (`vsa`) through
//! semantic codecs (`atomic`), structured scene encodings (`structure`),
//! relation functions with inverses (`relations`), attention-weighted
//! codebooks (`codebook`), a symbolic puzzle generator (`raven`), and the
//! abductive reasoner itself (`reasoner`).

pub mod atomic;
pub mod dataset;
pub mod raven;
pub mod reasoner;
pub mod relations;
pub mod structure;
pub mod codebook;
pub mod error;
pub mod vsa;

pub use error::{Result, VsaError};
pub use vsa::HdVector;
