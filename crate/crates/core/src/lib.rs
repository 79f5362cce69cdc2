//! Explicit p-adic regulator machinery: a power-series cocycle on congruence
//! subgroups of GL_N(O_F), its exact simplex-integration oracle, transfers on
//! bar resolutions and the normalized regulator pairing.

pub mod arith;
pub mod cocycle;
pub mod matforms;
pub mod simplex;
pub mod error;
pub mod homology;
pub mod io;
pub mod regulator;

pub use error::{Error, Result};
