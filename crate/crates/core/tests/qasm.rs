use std::path::PathBuf;

use proptest::prelude::*;
use qsim_core::qasm::{emit_qasm, parse_qasm};
use qsim_core::rng::seeded;
use qsim_core::{Circuit, StateVector};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/qasm").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn same_ops(a: &Circuit, b: &Circuit) -> bool {
    a.num_qubits() == b.num_qubits()
        && a.len() == b.len()
        && a.ops().iter().zip(b.ops()).all(|(x, y)| {
            x.kind == y.kind
                && x.qubits == y.qubits
                && x.params.iter().zip(&y.params).all(|(p, q)| (p - q).abs() <= 1e-12)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn emit_then_parse_is_identity(seed in any::<u64>(), n in 1usize..7, depth in 0usize..40) {
        let c = Circuit::random(n, depth, &mut seeded(seed));
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        prop_assert!(same_ops(&c, &back));
        prop_assert_eq!(back.ops(), c.ops());
    }
}

#[test]
fn corpus_files_round_trip() {
    for name in ["qft_4.qasm", "multi_register.qasm", "rotations.qasm", "broadcast.qasm"] {
        let c = parse_qasm(&corpus(name)).unwrap();
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        assert_eq!(back.ops(), c.ops(), "{name}");
    }
}

#[test]
fn qft_of_basis_state_is_uniform() {
    let c = parse_qasm(&corpus("qft_4.qasm")).unwrap();
    let psi = StateVector::run(&c.without_measurements()).unwrap();
    for p in psi.probabilities() {
        assert!((p - 1.0 / 16.0).abs() < 1e-12);
    }
}

#[test]
fn full_adder_truth_row() {
    // a = 1, b = 0, cin = 1 -> sum 0, carry 1
    let c = parse_qasm(&corpus("adder_small.qasm")).unwrap();
    let psi = StateVector::run(&c.without_measurements()).unwrap();
    let p = psi.probabilities();
    // qubits: a=0, b=1, cin=2, cout=3
    assert!((p[0b1101] - 1.0).abs() < 1e-12);
}

#[test]
fn multi_register_flattening() {
    let c = parse_qasm(&corpus("multi_register.qasm")).unwrap();
    assert_eq!(c.ops()[1].qubits, [0, 3]);
    assert_eq!(c.ops()[4].qubits, [2]);
    assert_eq!(c.ops()[4].clbit, Some(2));
}
