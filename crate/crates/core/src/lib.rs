//! Postselected von Neumann measurements on bosonic modes, simulated in
//! truncated Fock spaces.
//!
//! The crate is organized bottom-up: [`fock`] holds the state and operator
//! containers, [`gaussian`] the Gaussian resources, [`measurement`] the
//! postselected pointer channel, [`protocols`] the state-engineering recipes,
//! and [`analysis`] the phase-space and entanglement diagnostics.

pub mod analysis;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod measurement;
pub mod protocols;
pub mod truncation;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{
    fidelity, overlap, partial_trace, tensor, vacuum, DensityMatrix, FockOperator, FockVector, Mode,
    PureState, QuadratureKind, TruncationDim, TwoModeVector,
};
pub use gaussian::{BeamSplitterParam, SqueezeParam, TwoModeUnitary};
pub use num_complex::Complex64;
