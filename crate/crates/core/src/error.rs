//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building or running a simulation.
///
/// Variants split into two broad families: *validation* errors (malformed
/// configuration, out-of-range indices, mismatched sizes) and *numerical*
/// errors (non-finite objectives, norm drift). [`Error::is_numerical`]
/// reports the family so callers can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} outside the supported range 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("gate qubits must be distinct, got {0:?}")]
    DuplicateQubits(Vec<usize>),

    #[error("'{s}' is not a string of {n} '0'/'1' characters")]
    Bitstring { s: String, n: usize },

    #[error("expected {expected} amplitudes, got {actual}")]
    AmplitudeCount { expected: usize, actual: usize },

    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitMismatch { circuit: usize, state: usize },

    #[error("flip probability {p} outside [0, 1]")]
    FlipProbability { p: f64 },

    #[error("parameter '{name}' = {value} is invalid: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("no probability at or above cutoff {cutoff}; distribution would be empty")]
    EmptyDistribution { cutoff: f64 },

    #[error("shots must be positive")]
    ZeroShots,

    #[error("flip pattern has {actual} entries but the circuit has {expected} flip sites")]
    FlipPattern { expected: usize, actual: usize },

    #[error("exact enumeration over {sites} flip sites exceeds the {max}-site cap")]
    EnumerationTooLarge { sites: usize, max: usize },

    #[error("dense pulsed evolution supports at most {max} layers, got {layers}")]
    DenseLayerCap { layers: usize, max: usize },

    #[error("{0} has no dense matrix form")]
    NoMatrixForm(&'static str),

    #[error("unitarity check supports at most {max} qubits, got {n}")]
    UnitaryCheckTooLarge { n: usize, max: usize },

    #[error("objective returned non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },

    #[error("invalid optimizer configuration: {0}")]
    OptimizerConfig(String),

    #[error("state norm drifted to {norm}; |norm - 1| exceeds {tol}")]
    NormDrift { norm: f64, tol: f64 },
}

impl Error {
    /// True for errors that arise from floating-point trouble at run time
    /// rather than from malformed inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteObjective { .. } | Error::NormDrift { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
