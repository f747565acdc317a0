//! R1CS gadgets used by the process circuit.

pub mod bits;
pub mod eddsa;
pub mod edwards;
pub mod refhash;

pub use eddsa::{enforce_signature, SignatureVar};
pub use edwards::PointVar;
