use thiserror::Error;

use crate::gate::GateKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{kind} expects {expected} parameter(s), got {got}")]
    ParamCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} expects {expected} qubit(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{0} has no unitary matrix")]
    NotUnitary(GateKind),
    #[error("qubit {qubit} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("duplicate qubit {0} in gate operands")]
    DuplicateQubit(usize),
    #[error("non-finite gate parameter")]
    NonFiniteParam,
    #[error("gate {kind} on qubit {qubit} follows a measurement of that qubit")]
    MidCircuitMeasurement { kind: GateKind, qubit: usize },
    #[error("qubit count {n} outside supported range 1..={max}")]
    QubitLimit { n: usize, max: usize },
    #[error("size mismatch: expected {expected} qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid Pauli string {text:?}: {reason}")]
    PauliParse { text: String, reason: String },
    #[error("measurement cannot be applied as a unitary; sample the final state instead")]
    MeasureAsGate,
    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error(transparent)]
    Noise(#[from] crate::noise::NoiseError),
    #[error(transparent)]
    Qasm(#[from] crate::qasm::QasmError),
    #[error(transparent)]
    Optimize(#[from] crate::optimize::OptimizeError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
