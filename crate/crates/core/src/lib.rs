//! Exact construction and verification of lattice parallelotopes with small
//! surface-to-volume ratio.

// Matrix code reads better with explicit indices.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::large_enum_variant)]

pub mod construction;
pub mod error;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod num;
pub mod polytope;
pub mod surd;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
