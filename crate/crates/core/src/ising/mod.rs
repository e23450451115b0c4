//! Transverse-field Ising applications: Trotterized time evolution with an
//! exact reference, and a variational eigensolver.
//!
//! The Hamiltonian is `H = -J sum Z_i Z_{i+1} - h sum X_i` with hbar = 1.

mod tfim;
mod vqe;

pub use tfim::{
    Boundary, ExactEvolver, SweepRow, TfimParams, average_z, build_tfim_hamiltonian, build_trotter_circuit,
    exact_magnetization, ground_energy, magnetization_sweep, sweep_times, trotter_steps,
};
pub use vqe::{AnsatzSpec, EnergyMode, VqeOptions, VqeResult, run_vqe, vqe_energy};

/// `sum_i p_i (-1)^{popcount(i & mask)}`: the expectation of the Z-string
/// on `mask` under a computational-basis distribution.
pub fn parity_expectation(dist: &[f64], mask: usize) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(i, p)| if (i & mask).count_ones() % 2 == 0 { *p } else { -*p })
        .sum()
}
