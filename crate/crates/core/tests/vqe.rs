use qsim_core::DeviceNoiseModel;
use qsim_core::ising::{
    AnsatzSpec, Boundary, EnergyMode, VqeOptions, build_tfim_hamiltonian, ground_energy, run_vqe, vqe_energy,
};

#[test]
fn four_spin_noiseless_within_two_percent() {
    let opts = VqeOptions::default();
    let r = run_vqe(4, 1.0, 1.0, 3, &opts, None, 7).unwrap();
    let rel = r.relative_error().unwrap();
    assert!(rel <= 0.02, "relative error {rel}, best {}", r.best_energy);
    assert!(r.trace.len() <= 500);
    let e0 = r.exact_ground.unwrap();
    for &(_, e) in &r.trace {
        assert!(e >= e0 - 1e-9);
    }
    let min = r.trace.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    assert_eq!(min, r.best_energy);
}

#[test]
fn noisy_energy_sits_above_noiseless() {
    let opts = VqeOptions::default();
    let model = DeviceNoiseModel::example_5q();
    let clean = run_vqe(4, 1.0, 1.0, 3, &opts, None, 7).unwrap();
    let noisy = run_vqe(4, 1.0, 1.0, 3, &opts, Some(&model), 7).unwrap();
    assert!(noisy.best_energy >= clean.best_energy, "{} < {}", noisy.best_energy, clean.best_energy);
}

#[test]
fn same_seed_same_trace() {
    let opts = VqeOptions::default();
    let a = run_vqe(3, 1.0, 0.5, 1, &opts, None, 11).unwrap();
    let b = run_vqe(3, 1.0, 0.5, 1, &opts, None, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noisy_exact_matches_dm_expectation_without_readout() {
    let h = build_tfim_hamiltonian(3, 1.0, 1.0, Boundary::Open).unwrap();
    let a = AnsatzSpec::new(3, 2).unwrap();
    let params: Vec<f64> = (0..a.num_params()).map(|k| 0.3 * k as f64 - 1.0).collect();
    let ideal = DeviceNoiseModel::ideal(3);
    let sv = vqe_energy(&params, &a, &h, EnergyMode::Exact, None).unwrap();
    let dm = vqe_energy(&params, &a, &h, EnergyMode::Exact, Some(&ideal)).unwrap();
    assert!((sv - dm).abs() < 1e-12);
    assert!(sv >= ground_energy(&h).unwrap() - 1e-12);
}
