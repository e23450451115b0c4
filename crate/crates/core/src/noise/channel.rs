use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{CMatrix, GateKind, gate_matrix};
use crate::kernel;

/// Completeness tolerance for `sum_i K_i^dagger K_i = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A CPTP map on one or two qubits given by its Kraus operators.
///
/// Operators are expressed in the operand-local basis used by
/// [`gate_matrix`]: bit `j` of a local index is the state of the `j`-th
/// operand qubit.
#[derive(Clone, PartialEq)]
pub struct KrausChannel {
    arity: usize,
    ops: Vec<CMatrix>,
    flat: Vec<Vec<Complex64>>,
}

impl fmt::Debug for KrausChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KrausChannel")
            .field("arity", &self.arity)
            .field("num_operators", &self.ops.len())
            .finish()
    }
}

impl KrausChannel {
    /// Validates arity, shapes, finiteness and completeness.
    pub fn new(arity: usize, ops: Vec<CMatrix>) -> Result<Self> {
        if !(1..=2).contains(&arity) {
            return Err(Error::InvalidChannel(format!("arity {arity} not supported")));
        }
        if ops.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        let dim = 1 << arity;
        if ops.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::InvalidChannel(format!(
                "operators must be {dim}x{dim} for arity {arity}"
            )));
        }
        if ops.iter().flat_map(|k| k.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidChannel("non-finite operator entry".into()));
        }
        let ch = Self::new_unchecked(arity, ops);
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "completeness residual {residual:e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(arity: usize, ops: Vec<CMatrix>) -> Self {
        let flat = ops.iter().map(kernel::flatten).collect();
        KrausChannel { arity, ops, flat }
    }

    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        Self::new_unchecked(arity, vec![CMatrix::identity(d, d)])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    pub(crate) fn flat_operators(&self) -> &[Vec<Complex64>] {
        &self.flat
    }

    /// `max |sum_i K_i^dagger K_i - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = 1 << self.arity;
        let sum = self
            .ops
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// True when the channel is exactly a single identity operator.
    pub fn is_identity(&self) -> bool {
        let d = 1 << self.arity;
        self.ops.len() == 1 && self.ops[0] == CMatrix::identity(d, d)
    }

    pub(crate) fn check_operands(&self, n: usize, qubits: &[usize]) -> Result<()> {
        if qubits.len() != self.arity {
            return Err(Error::InvalidChannel(format!(
                "arity {} channel applied to {} qubit(s)",
                self.arity,
                qubits.len()
            )));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: n });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    Ok(())
}

fn pauli(kind: GateKind) -> CMatrix {
    gate_matrix(kind, &[]).expect("Pauli matrix")
}

/// Uniform Pauli depolarizing channel,
/// `rho -> (1 - p) rho + p / (4^k - 1) * sum_{P != I} P rho P`.
///
/// `p = 3/4` (one qubit) or `p = 15/16` (two qubits) is the fully
/// depolarizing point.
pub fn depolarizing(p: f64, arity: usize) -> Result<KrausChannel> {
    check_probability(p)?;
    if !(1..=2).contains(&arity) {
        return Err(Error::InvalidChannel(format!("arity {arity} not supported")));
    }
    if p == 0.0 {
        return Ok(KrausChannel::identity(arity));
    }
    let paulis = [GateKind::Id, GateKind::X, GateKind::Y, GateKind::Z].map(pauli);
    let ops = match arity {
        1 => {
            let w = (p / 3.0).sqrt();
            let mut ops = vec![&paulis[0] * Complex64::from((1.0 - p).sqrt())];
            ops.extend(paulis[1..].iter().map(|m| m * Complex64::from(w)));
            ops
        }
        2 => {
            let w = (p / 15.0).sqrt();
            let mut ops = Vec::with_capacity(16);
            for (hi, a) in paulis.iter().enumerate() {
                for (lo, b) in paulis.iter().enumerate() {
                    // kronecker(a, b): `a` on operand 1, `b` on operand 0
                    let weight = if hi == 0 && lo == 0 { (1.0 - p).sqrt() } else { w };
                    ops.push(a.kronecker(b) * Complex64::from(weight));
                }
            }
            ops
        }
        _ => unreachable!(),
    };
    KrausChannel::new(arity, ops)
}

fn single(entries: [f64; 4]) -> CMatrix {
    DMatrix::from_row_slice(2, 2, &entries.map(Complex64::from))
}

/// Energy relaxation `|1> -> |0>` with probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    KrausChannel::new(
        1,
        vec![
            single([1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]),
            single([0.0, gamma.sqrt(), 0.0, 0.0]),
        ],
    )
}

/// Pure dephasing; off-diagonals scale by `sqrt(1 - lambda)`.
pub fn phase_damping(lambda: f64) -> Result<KrausChannel> {
    check_probability(lambda)?;
    KrausChannel::new(
        1,
        vec![
            single([1.0, 0.0, 0.0, (1.0 - lambda).sqrt()]),
            single([0.0, 0.0, 0.0, lambda.sqrt()]),
        ],
    )
}

/// Damping parameters `(gamma, lambda)` of the thermal relaxation channel
/// over `duration_ns`, with `T2` clamped to `T1`.
pub fn thermal_parameters(t1_us: f64, t2_us: f64, duration_ns: f64) -> Result<(f64, f64)> {
    if !(t1_us > 0.0 && t1_us.is_finite()) {
        return Err(Error::InvalidParameter(format!("t1_us must be positive, got {t1_us}")));
    }
    if !(t2_us > 0.0 && t2_us.is_finite()) {
        return Err(Error::InvalidParameter(format!("t2_us must be positive, got {t2_us}")));
    }
    if !(duration_ns >= 0.0 && duration_ns.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration_ns must be non-negative, got {duration_ns}"
        )));
    }
    let t2 = t2_us.min(t1_us);
    let d = duration_ns * 1e-3;
    let gamma = -(-d / t1_us).exp_m1();
    // amplitude damping alone decays coherences by exp(-d / 2T1); the
    // dephasing part supplies the rest of exp(-d / T2)
    let lambda = -(d / t1_us - 2.0 * d / t2).exp_m1();
    Ok((gamma, lambda.clamp(0.0, 1.0)))
}

/// Amplitude damping with `gamma = 1 - exp(-d/T1)` followed by pure
/// dephasing, tuned so coherences decay by exactly `exp(-d/T2)` where
/// `T2` is clamped to at most `T1`. Zero-weight operators are dropped.
pub fn thermal_relaxation(t1_us: f64, t2_us: f64, duration_ns: f64) -> Result<KrausChannel> {
    let (gamma, lambda) = thermal_parameters(t1_us, t2_us, duration_ns)?;
    let amp = amplitude_damping(gamma)?;
    let phase = phase_damping(lambda)?;
    let mut ops = Vec::with_capacity(4);
    for p in phase.operators() {
        for a in amp.operators() {
            let k = p * a;
            if k.iter().any(|z| z.norm() > 0.0) {
                ops.push(k);
            }
        }
    }
    KrausChannel::new(1, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;
    use crate::pauli::PauliString;

    fn z() -> PauliString {
        "Z".parse().unwrap()
    }

    #[test]
    fn zero_parameter_channels_are_identity() {
        assert!(depolarizing(0.0, 1).unwrap().is_identity());
        assert!(depolarizing(0.0, 2).unwrap().is_identity());
        assert!(thermal_relaxation(50.0, 30.0, 0.0).unwrap().is_identity());
    }

    #[test]
    fn depolarizing_examples() {
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_channel(&depolarizing(0.15, 1).unwrap(), &[0]).unwrap();
        assert!((d.expectation(&z()).unwrap() - 0.8).abs() < 1e-12);

        // fully depolarizing point from an arbitrary state
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&crate::GateOp::new(GateKind::U3, &[0], &[0.4, 1.1, -0.3])).unwrap();
        d.apply_channel(&depolarizing(0.75, 1).unwrap(), &[0]).unwrap();
        for p in ["X", "Y", "Z"] {
            assert!(d.expectation(&p.parse().unwrap()).unwrap().abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn two_qubit_depolarizing_shape() {
        let ch = depolarizing(0.1, 2).unwrap();
        assert_eq!(ch.operators().len(), 16);
        assert!(ch.completeness_residual() <= 1e-12);
        // full depolarization of |00>
        let mut d = DensityMatrix::new(2).unwrap();
        d.apply_channel(&depolarizing(15.0 / 16.0, 2).unwrap(), &[0, 1]).unwrap();
        for p in d.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_probability() {
        assert_eq!(depolarizing(1.5, 1).unwrap_err(), Error::Probability(1.5));
        assert_eq!(depolarizing(-0.1, 2).unwrap_err(), Error::Probability(-0.1));
        assert!(depolarizing(0.1, 3).is_err());
    }

    #[test]
    fn thermal_full_relaxation() {
        let ch = thermal_relaxation(50.0, 50.0, 10.0 * 50.0 * 1000.0).unwrap();
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&crate::GateOp::new(GateKind::X, &[0], &[])).unwrap();
        d.apply_channel(&ch, &[0]).unwrap();
        assert!(d.expectation(&z()).unwrap() >= 1.0 - 1e-4);
    }

    #[test]
    fn thermal_coherence_decay() {
        let ch = thermal_relaxation(50.0, 30.0, 100.0).unwrap();
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&crate::GateOp::new(GateKind::H, &[0], &[])).unwrap();
        d.apply_channel(&ch, &[0]).unwrap();
        let want = 0.5 * (-0.1f64 / 30.0).exp();
        assert!((d.element(0, 1).norm() - want).abs() < 1e-14);
        assert!((d.element(1, 0).norm() - want).abs() < 1e-14);

        // same check straight from the Kraus sum
        let rho = CMatrix::from_element(2, 2, Complex64::from(0.5));
        let out = ch
            .operators()
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, k| acc + k * &rho * k.adjoint());
        assert!((out[(0, 1)].norm() - want).abs() < 1e-14);
    }

    #[test]
    fn thermal_clamps_t2() {
        let clamped = thermal_relaxation(50.0, 120.0, 200.0).unwrap();
        let reference = thermal_relaxation(50.0, 50.0, 200.0).unwrap();
        assert_eq!(clamped, reference);
        // T2 = T1 still needs extra dephasing beyond the 2*T1 limit of
        // amplitude damping
        let (gamma, lambda) = thermal_parameters(50.0, 50.0, 200.0).unwrap();
        assert!((lambda - gamma).abs() < 1e-15);
    }

    #[test]
    fn thermal_rejects_bad_times() {
        assert!(thermal_relaxation(0.0, 1.0, 1.0).is_err());
        assert!(thermal_relaxation(1.0, -1.0, 1.0).is_err());
        assert!(thermal_relaxation(1.0, 1.0, -1.0).is_err());
        assert!(thermal_relaxation(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn new_rejects_incomplete_sets() {
        let half = CMatrix::identity(2, 2) * Complex64::from(0.5);
        assert!(matches!(KrausChannel::new(1, vec![half]), Err(Error::InvalidChannel(_))));
        assert!(KrausChannel::new(1, vec![]).is_err());
        assert!(KrausChannel::new(2, vec![CMatrix::identity(2, 2)]).is_err());
    }
}
