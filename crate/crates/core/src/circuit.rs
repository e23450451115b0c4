use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::gate::GateKind;

/// One gate application. `clbit` is only meaningful for `MEASURE`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub clbit: Option<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: &[usize], params: &[f64]) -> Self {
        GateOp {
            kind,
            qubits: qubits.to_vec(),
            params: params.to_vec(),
            clbit: None,
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        GateOp {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            params: vec![],
            clbit: Some(clbit),
        }
    }

    /// Checks arity, parameter count, qubit range and distinctness.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        match self.kind.arity() {
            Some(expected) if expected != self.qubits.len() => {
                return Err(Error::Arity {
                    kind: self.kind,
                    expected,
                    got: self.qubits.len(),
                });
            }
            None if self.qubits.is_empty() => {
                return Err(Error::Arity {
                    kind: self.kind,
                    expected: 1,
                    got: 0,
                });
            }
            _ => {}
        }
        if self.params.len() != self.kind.num_params() {
            return Err(Error::ParamCount {
                kind: self.kind,
                expected: self.kind.num_params(),
                got: self.params.len(),
            });
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteParam);
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }
}

/// Ordered gate list over `num_qubits` qubits.
///
/// Measurements are terminal: once a qubit is measured no further unitary
/// may act on it. Every op is validated on insertion, so a `Circuit` value
/// always satisfies its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    name: String,
    ops: Vec<GateOp>,
    measured: Vec<bool>,
}

impl Circuit {
    /// Panics if `num_qubits` is zero.
    pub fn new(num_qubits: usize, name: impl Into<String>) -> Self {
        assert!(num_qubits > 0, "a circuit needs at least one qubit");
        Circuit {
            num_qubits,
            num_clbits: 0,
            name: name.into(),
            ops: Vec::new(),
            measured: vec![false; num_qubits],
        }
    }

    pub fn with_clbits(mut self, num_clbits: usize) -> Self {
        self.num_clbits = num_clbits;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Number of unitary gates (barriers and measurements excluded).
    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.is_unitary()).count()
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| op.kind == GateKind::Measure)
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        match op.kind {
            GateKind::Measure => {
                if let Some(c) = op.clbit {
                    self.num_clbits = self.num_clbits.max(c + 1);
                }
                self.measured[op.qubits[0]] = true;
            }
            GateKind::Barrier => {}
            kind => {
                if let Some(&q) = op.qubits.iter().find(|&&q| self.measured[q]) {
                    return Err(Error::MidCircuitMeasurement { kind, qubit: q });
                }
            }
        }
        self.ops.push(op);
        Ok(self)
    }

    pub fn apply(&mut self, kind: GateKind, qubits: &[usize], params: &[f64]) -> Result<&mut Self> {
        self.push(GateOp::new(kind, qubits, params))
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.apply(GateKind::H, &[q], &[])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.apply(GateKind::X, &[q], &[])
    }

    pub fn rx(&mut self, q: usize, theta: f64) -> Result<&mut Self> {
        self.apply(GateKind::Rx, &[q], &[theta])
    }

    pub fn ry(&mut self, q: usize, theta: f64) -> Result<&mut Self> {
        self.apply(GateKind::Ry, &[q], &[theta])
    }

    pub fn rz(&mut self, q: usize, theta: f64) -> Result<&mut Self> {
        self.apply(GateKind::Rz, &[q], &[theta])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.apply(GateKind::Cx, &[control, target], &[])
    }

    pub fn measure(&mut self, q: usize, clbit: usize) -> Result<&mut Self> {
        self.push(GateOp::measure(q, clbit))
    }

    pub fn measure_all(&mut self) -> Result<&mut Self> {
        for q in 0..self.num_qubits {
            self.measure(q, q)?;
        }
        Ok(self)
    }

    pub fn barrier(&mut self, qubits: &[usize]) -> Result<&mut Self> {
        self.apply(GateKind::Barrier, qubits, &[])
    }

    /// Copy with every `MEASURE` removed.
    pub fn without_measurements(&self) -> Circuit {
        let mut out = Circuit::new(self.num_qubits, self.name.clone()).with_clbits(self.num_clbits);
        out.ops = self
            .ops
            .iter()
            .filter(|op| op.kind != GateKind::Measure)
            .cloned()
            .collect();
        out
    }

    /// Reversed circuit of inverse gates. Fails on measurements.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.num_qubits, format!("{}_inv", self.name));
        for op in self.ops.iter().rev() {
            match op.kind {
                GateKind::Measure => return Err(Error::MeasureAsGate),
                GateKind::Barrier => {
                    out.push(op.clone())?;
                }
                kind => {
                    let (ik, ip) = kind.inverse(&op.params).expect("unitary kind");
                    out.apply(ik, &op.qubits, &ip)?;
                }
            }
        }
        Ok(out)
    }

    /// Appends all ops of `other`, which must have the same width.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(self)
    }

    /// Random unitary circuit over the whole built-in gate set, with
    /// angles uniform in `[-2pi, 2pi)`. Multi-qubit kinds are skipped when
    /// `num_qubits` is too small to host them.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, depth: usize, rng: &mut R) -> Circuit {
        let kinds: Vec<GateKind> = GateKind::ALL
            .into_iter()
            .filter(|k| k.is_unitary() && k.arity().unwrap() <= num_qubits)
            .collect();
        let mut c = Circuit::new(num_qubits, "random");
        let tau = 2.0 * std::f64::consts::PI;
        for _ in 0..depth {
            let kind = kinds[rng.random_range(0..kinds.len())];
            let mut qubits = Vec::new();
            while qubits.len() < kind.arity().unwrap() {
                let q = rng.random_range(0..num_qubits);
                if !qubits.contains(&q) {
                    qubits.push(q);
                }
            }
            let params: Vec<f64> = (0..kind.num_params())
                .map(|_| rng.random_range(-tau..tau))
                .collect();
            c.apply(kind, &qubits, &params).expect("valid random op");
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_operands() {
        let mut c = Circuit::new(2, "t");
        assert!(matches!(
            c.h(2),
            Err(Error::QubitOutOfRange { qubit: 2, num_qubits: 2 })
        ));
        assert_eq!(c.cx(1, 1).unwrap_err(), Error::DuplicateQubit(1));
        assert!(matches!(
            c.apply(GateKind::Cx, &[0], &[]),
            Err(Error::Arity { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            c.apply(GateKind::Rz, &[0], &[]),
            Err(Error::ParamCount { .. })
        ));
        assert_eq!(c.rz(0, f64::NAN).unwrap_err(), Error::NonFiniteParam);
        assert!(c.is_empty());
    }

    #[test]
    fn measurement_must_be_terminal() {
        let mut c = Circuit::new(2, "t");
        c.h(0).unwrap().measure(0, 0).unwrap();
        // other qubits are still free
        c.x(1).unwrap();
        c.barrier(&[0, 1]).unwrap();
        assert!(matches!(
            c.cx(1, 0),
            Err(Error::MidCircuitMeasurement { qubit: 0, .. })
        ));
        assert_eq!(c.num_clbits(), 1);
    }

    #[test]
    fn inverse_reverses_and_inverts() {
        let mut c = Circuit::new(2, "t");
        c.h(0).unwrap().apply(GateKind::S, &[1], &[]).unwrap().rx(0, 0.3).unwrap();
        let inv = c.inverse().unwrap();
        let kinds: Vec<_> = inv.ops().iter().map(|o| o.kind).collect();
        assert_eq!(kinds, [GateKind::Rx, GateKind::Sdg, GateKind::H]);
        assert_eq!(inv.ops()[0].params, [-0.3]);
    }

    #[test]
    fn without_measurements_keeps_everything_else() {
        let mut c = Circuit::new(2, "bell");
        c.h(0).unwrap().cx(0, 1).unwrap().measure_all().unwrap();
        let bare = c.without_measurements();
        assert_eq!(bare.len(), 2);
        assert_eq!(bare.gate_count(), 2);
        assert!(!bare.has_measurements());
    }
}
