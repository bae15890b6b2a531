//! Deterministic W-state preparation circuits built only from controlled
//! rotations and cNOTs.
//!
//! * [`synthesis`] builds the recursive `n`-qubit circuit and its closed-form
//!   gate counts and angle schedule.
//! * [`lowering`] rewrites F gates into half-wave plates around a cZ, and cZ
//!   into plates around a cNOT.
//! * [`simulator`] runs circuits on dense or sparse real statevectors.
//! * [`analysis`] covers success probabilities, source rates, plate-angle and
//!   growth tables and angle-sensitivity sweeps.
//! * [`format`] reads and writes `wcircuit 1` text files.

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod format;
pub mod lowering;
pub mod numfmt;
pub mod simulator;
pub mod synthesis;

pub use circuit::{
    embed, gate_matrix, rotation_matrix, unitary_of, Angle, Circuit, Gate, GateCounts, GateKind,
    GateMatrix, Level, QubitIndex,
};
pub use error::{Error, Result};
pub use lowering::{lower, lower_cz, lower_f};
pub use simulator::{
    apply_gate, basis_state, fidelity, run, w_reference, Backend, BackendChoice, BasisKey,
    QuantumState, SimConfig, Simulator,
};
pub use synthesis::{
    angle_schedule, build_w_circuit, predicted_counts, AngleSchedule, CountPrediction,
};
