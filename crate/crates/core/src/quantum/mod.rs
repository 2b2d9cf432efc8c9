//! Dense state vectors and density matrices for small qubit registers.
//!
//! Qubit `k` is bit `k` of a basis-state label: qubit 0 is the least
//! significant bit. Every module in the crate maps its data onto this
//! convention.

mod density;
mod linalg;
mod state;
mod subset;

pub use density::{
    fidelity, fidelity_with_pure, partial_trace, pure_density, purity, DensityMatrix,
};
pub use state::{state_overlap, StateVector};
pub use subset::QubitSubset;

/// Absolute tolerance for normalisation, trace and hermiticity checks.
pub const TOLERANCE: f64 = 1e-10;

/// Eigenvalues in `[-NEGATIVE_EIGEN_TOLERANCE, 0)` are clamped to zero before
/// square roots; anything more negative is rejected.
pub const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-9;

/// Largest register the dense backend accepts.
pub const MAX_QUBITS: usize = 12;
