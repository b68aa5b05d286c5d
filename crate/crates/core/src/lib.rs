//! Discrete-time quantum walks on the diamond chain and the T3 (dice)
//! lattice in a perpendicular magnetic field.
//!
//! The walk operator is `W = S·C`: a coin `C` mixes the directed-edge states
//! around each vertex and the shift `S` swaps the two states of every edge,
//! picking up a Peierls phase. The crate builds `W` on finite patches and as
//! Bloch blocks, computes quasi-energy spectra and butterflies, detects
//! Aharonov–Bohm cages with the Arnoldi iteration, and predicts cage walls for
//! hub-coin superlattices on the diamond chain.

pub mod caging;
pub mod coins;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod spectrum;
pub mod walk;

pub use error::{Error, Result};
