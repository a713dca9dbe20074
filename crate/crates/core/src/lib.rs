//! Simulation of a delayed-choice interferometer whose second beamsplitter is
//! controlled by a quantum ancilla, together with the binary hidden-variable
//! analysis of its statistics.
//!
//! The photon is qubit 0 (high bit) and the ancilla qubit 1, so joint
//! outcomes are indexed `2·a + b` in the order (00, 01, 10, 11).

pub mod circuit;
pub mod density;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod hv;
pub mod par;
pub mod rng;
pub mod sampler;
pub mod state;

pub use error::{Error, Result};
pub use experiment::{ControlMode, ExperimentConfig, JointDistribution};
pub use par::Execution;
pub use state::{Basis, PureState};
