use std::fmt::Write;

use crate::circuit::Circuit;
use crate::gate::GateKind;

/// Serializes a circuit as OpenQASM 2.0 over one `q` register and, when
/// measurements exist, one `c` register. Angles use the shortest
/// round-trip decimal form.
pub fn emit_qasm(c: &Circuit) -> String {
    let clbit = |op: &crate::GateOp| op.clbit.unwrap_or(op.qubits[0]);
    let num_clbits = c
        .ops()
        .iter()
        .filter(|op| op.kind == GateKind::Measure)
        .map(|op| clbit(op) + 1)
        .fold(c.num_clbits(), usize::max);

    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", c.num_qubits()).unwrap();
    if num_clbits > 0 {
        writeln!(out, "creg c[{num_clbits}];").unwrap();
    }
    for op in c.ops() {
        let args = op.qubits.iter().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(",");
        match op.kind {
            GateKind::Measure => writeln!(out, "measure {args} -> c[{}];", clbit(op)).unwrap(),
            kind if op.params.is_empty() => writeln!(out, "{} {args};", kind.name()).unwrap(),
            kind => {
                let params = op.params.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(",");
                writeln!(out, "{}({params}) {args};", kind.name()).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::parse_qasm;

    #[test]
    fn bell_text() {
        let mut c = Circuit::new(2, "bell");
        c.h(0).unwrap().cx(0, 1).unwrap();
        let text = emit_qasm(&c);
        assert!(text.contains("h q[0];"));
        assert!(text.contains("cx q[0],q[1];"));
    }

    #[test]
    fn empty_circuit() {
        let text = emit_qasm(&Circuit::new(3, "e"));
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
    }

    #[test]
    fn round_trip_with_measure_and_barrier() {
        let mut c = Circuit::new(3, "qasm");
        c.rz(1, -1e-7).unwrap().apply(GateKind::U3, &[2], &[0.1, -2.5, 1e20]).unwrap();
        c.barrier(&[2, 0]).unwrap();
        c.measure(0, 1).unwrap().measure(2, 0).unwrap();
        let back = parse_qasm(&emit_qasm(&c)).unwrap();
        assert_eq!(back.ops(), c.ops());
        assert_eq!(back.num_clbits(), 2);
    }
}
