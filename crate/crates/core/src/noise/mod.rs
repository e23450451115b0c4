//! Noise channels, readout error and device calibration.
//!
//! Depolarizing convention: `rho -> (1 - p) rho + (p / 3) sum_P P rho P`
//! over the three non-identity Paulis (fifteen on two qubits). At
//! `p = 3/4` one qubit is fully depolarized; this differs by a factor 4/3
//! from the `(1 - p) rho + p I/2` convention.

mod calibration;
mod channel;
mod readout;
mod schedule;

use thiserror::Error;

pub use calibration::{
    DeviceNoiseModel, GateCalibration, GateNoise, QubitCalibration, load_calibration,
};
pub use channel::{
    COMPLETENESS_TOL, KrausChannel, amplitude_damping, depolarizing, phase_damping,
    thermal_parameters, thermal_relaxation,
};
pub use readout::{ReadoutError, ReadoutModel};
pub use schedule::{NoisySchedule, ScheduleItem, attach_noise};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("calibration schema error: {0}")]
    Schema(String),
    #[error("calibration field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read calibration: {0}")]
    Io(String),
    #[error("no calibration entry or default for {gate} on qubits {qubits:?}")]
    Uncovered { gate: String, qubits: Vec<usize> },
    #[error("noise model has no {arity}-qubit channel for {gate}")]
    UnsupportedArity { gate: String, arity: usize },
    #[error("circuit uses {circuit} qubits but the device has {device}")]
    TooManyQubits { circuit: usize, device: usize },
    #[error("channel construction failed: {0}")]
    Channel(Box<crate::error::Error>),
}
