//! Quantum autoencoder data compression.
//!
//! The crate simulates small qubit registers exactly, builds the three
//! layered ansatz families used for compression, trains them with a
//! swap-test cost and parameter-shift gradient descent, and scores the
//! ansätze with expressibility and entangling-capability descriptors.

pub mod ansatz;
pub mod circuit;
pub mod datasets;
pub mod descriptors;
pub mod error;
pub mod experiment;
pub mod quantum;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
