//! Fixed workloads shared by the criterion benches.

use qsim_core::ising::{TfimParams, build_trotter_circuit};
use qsim_core::rng::seeded;
use qsim_core::Circuit;

pub use qsim_core::bench::ghz_circuit;

/// Seeded random circuit over the full gate set.
pub fn random_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
    Circuit::random(n, depth, &mut seeded(seed))
}

/// Trotter circuit for the default 4-spin chain at `t`.
pub fn tfim_circuit(n: usize, t: f64) -> Circuit {
    let p = TfimParams {
        n,
        ..TfimParams::default()
    };
    build_trotter_circuit(&p, t).expect("default parameters are valid")
}
