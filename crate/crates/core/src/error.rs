use thiserror::Error;

use crate::circuit::Level;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid angle: {0} is not finite")]
    InvalidAngle(f64),

    #[error("qubit index {index} out of range 1..={n_qubits}")]
    QubitOutOfRange { index: u32, n_qubits: usize },

    #[error("control and target must differ (both are {0})")]
    SameControlTarget(u32),

    #[error("circuit needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),

    #[error("gate {gate} is not allowed at level {level}")]
    GateNotAllowed { gate: &'static str, level: Level },

    #[error("unsupported size: n = {0} (the construction needs n >= 3)")]
    UnsupportedSize(usize),

    #[error("{what} capacity exceeded: n = {n}, cap = {cap}")]
    Capacity {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("cannot lower a {from} circuit to {to}")]
    InvalidLowering { from: Level, to: Level },

    #[error("expected a {expected} gate, got {found}")]
    WrongGateKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("size mismatch: {0} qubits vs {1} qubits")]
    SizeMismatch(usize, usize),

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("no F gate at position {0}")]
    UnknownGatePosition(usize),
}

impl Error {
    /// True for errors caused by resource caps rather than bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
