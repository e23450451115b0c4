//! Noise-aware quantum circuit simulation.
//!
//! `qsim-core` carries two simulation backends over a shared circuit IR:
//!
//! - [`StateVector`] for ideal pure-state execution, Pauli expectations,
//!   shot sampling and Monte-Carlo Kraus trajectories.
//! - [`DensityMatrix`] for exact mixed-state evolution under gates and
//!   Kraus channels.
//!
//! Device noise ([`DeviceNoiseModel`]) is loaded from a JSON calibration
//! document and compiled into a [`NoisySchedule`] of gates and channels.
//! Circuits come from the in-memory builder API or from OpenQASM 2.0 text
//! via [`qasm::parse_qasm`].
//!
//! The [`ising`] module holds the transverse-field Ising applications: a
//! first-order Trotter circuit builder with an exact diagonalization
//! reference, and a VQE driver over a hardware-efficient ansatz using the
//! derivative-free minimizer in [`optimize`].
//!
//! # Conventions
//!
//! Qubit ordering is little-endian everywhere: qubit 0 is the least
//! significant bit of a basis-state index, `letters[0]` of a
//! [`PauliString`] acts on qubit 0, and printed bitstrings put qubit
//! `n - 1` leftmost. Spin-up is `|0>`, so `Z|0> = +|0>`.
//!
//! ```
//! use qsim_core::{Circuit, PauliString, StateVector};
//!
//! let mut bell = Circuit::new(2, "bell");
//! bell.h(0).unwrap().cx(0, 1).unwrap();
//! let psi = StateVector::run(&bell).unwrap();
//! let zz: PauliString = "ZZ".parse().unwrap();
//! assert!((psi.expectation(&zz).unwrap() - 1.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod circuit;
pub mod density;
pub mod error;
pub mod gate;
pub mod ising;
pub mod noise;
pub mod optimize;
pub mod pauli;
pub mod qasm;
pub mod rng;
pub mod statevector;

mod kernel;

pub use circuit::{Circuit, GateOp};
pub use num_complex::Complex64;
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use gate::{CMatrix, GateKind, gate_matrix};
pub use noise::{
    DeviceNoiseModel, KrausChannel, NoisySchedule, ReadoutModel, ScheduleItem,
};
pub use pauli::{Hamiltonian, Pauli, PauliString};
pub use statevector::{Counts, StateVector, sample_distribution};

/// Maximum qubit count accepted by dense (2^n x 2^n) oracle routines.
pub const DENSE_ORACLE_LIMIT: usize = 12;

/// Formats a basis-state index as a bitstring with qubit `n - 1` leftmost.
pub fn format_bitstring(index: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`format_bitstring`]. Returns `None` on any character other
/// than `0`/`1`.
pub fn parse_bitstring(bits: &str) -> Option<usize> {
    let mut index = 0usize;
    for c in bits.chars() {
        index <<= 1;
        match c {
            '0' => {}
            '1' => index |= 1,
            _ => return None,
        }
    }
    Some(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_is_little_endian() {
        assert_eq!(format_bitstring(1, 2), "01");
        assert_eq!(format_bitstring(6, 4), "0110");
        assert_eq!(parse_bitstring("0110"), Some(6));
        assert_eq!(parse_bitstring("01x"), None);
    }
}
