//! Monte-Carlo fault-tolerance simulation of repetition cat qubits.
//!
//! Cat qubits stabilized by two-photon dissipation only suffer phase flips to
//! any relevant order, so the logical qubit is a distance-`d` repetition code
//! with stabilizers `X_i X_{i+1}`. This crate builds the circuits of every
//! logical gadget in the universal set (memory, `|+>_L` preparation, `X_L`
//! measurement, transversal CNOT, and three Toffoli constructions), samples a
//! circuit-level phase-flip noise model, decodes with minimum-weight perfect
//! matching and estimates logical error probabilities.
//!
//! Error tracking uses the restricted algebra generated by Pauli `Z` and
//! controlled-phase errors: with bias-preserving gates and Toffoli targets
//! confined to one block, no other error ever appears. Pending `CZ` errors are
//! resolved at measurement time with a small CHP stabilizer tableau.
//!
//! The closed-form side (gate-time optimum, bit-flip fit, threshold fits,
//! overhead search) is generic over the floating-point type; the aliases at
//! the crate root fix it to `f64`.

pub mod analysis;
pub mod circuit;
pub mod circuits;
pub mod decoder;
pub mod error_state;
pub mod montecarlo;
pub mod noise;
pub mod scalar;
pub mod tableau;

pub use circuit::{Block, Circuit, Gate, GateKind, Layer, LayerTag, QubitRef, Violation};
pub use circuits::{Experiment, ExperimentKind, LogicalOp};
pub use error_state::{ErrorState, PropagationError};
pub use montecarlo::{Estimate, RunConfig, StoppingRule};
pub use noise::{GateErrorModel, NoiseConfig};
pub use scalar::Float;
pub use tableau::StabilizerTableau;

/// Physical cat-qubit parameters in double precision.
pub type CatQubitParams = noise::CatQubitParams<f64>;
/// Threshold fit in double precision.
pub type ScalingFit = analysis::ScalingFit<f64>;
/// Overhead table entry in double precision.
pub type OverheadPoint = analysis::OverheadPoint<f64>;
/// Monte-Carlo data point consumed by the fits, in double precision.
pub type DataPoint = analysis::DataPoint<f64>;
