//! Mixed-state simulation on a dense `2^n x 2^n` density matrix.
//!
//! Gates and Kraus channels are applied block by block over the operand
//! sub-blocks of `rho` (see the `kernel` module), never through a full
//! superoperator.

use num_complex::Complex64;

use crate::circuit::{Circuit, GateOp};
use crate::error::{Error, Result};
use crate::gate::{CMatrix, GateKind, gate_matrix};
use crate::kernel;
use crate::noise::{DeviceNoiseModel, KrausChannel, NoisySchedule, ScheduleItem, attach_noise};
use crate::pauli::PauliString;
use crate::rng;
use crate::statevector::{Counts, StateVector, counts_from_histogram, sample_histogram};

/// Largest register the density-matrix engine will allocate (4 GiB).
pub const MAX_DM_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    /// Row-major; entry `(r, c)` at `r * 2^n + c`.
    rho: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn new(n: usize) -> Result<Self> {
        check_limit(n)?;
        let dim = 1usize << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n, rho })
    }

    /// `|psi><psi|`.
    pub fn from_statevector(psi: &StateVector) -> Result<Self> {
        let n = psi.num_qubits();
        check_limit(n)?;
        let a = psi.amplitudes();
        let rho = a
            .iter()
            .flat_map(|r| a.iter().map(move |c| r * c.conj()))
            .collect();
        Ok(DensityMatrix { n, rho })
    }

    /// Wraps a dense matrix without validating trace or positivity.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if dim < 2 || !dim.is_power_of_two() || m.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "{}x{} is not a 2^n square matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_limit(n)?;
        Ok(DensityMatrix {
            n,
            rho: kernel::flatten(m),
        })
    }

    /// Runs a circuit without noise. Measurements and barriers are skipped
    /// (measurement is terminal; read out with [`Self::probabilities`]).
    pub fn run(circuit: &Circuit) -> Result<Self> {
        let mut d = DensityMatrix::new(circuit.num_qubits())?;
        for op in circuit.ops() {
            if op.kind != GateKind::Measure {
                d.apply_gate(op)?;
            }
        }
        Ok(d)
    }

    /// Runs `circuit` under `model`'s compiled noise schedule. Readout
    /// error is not applied here.
    pub fn run_noisy(circuit: &Circuit, model: &DeviceNoiseModel) -> Result<Self> {
        let schedule = attach_noise(circuit, model)?;
        Self::run_schedule(&schedule)
    }

    pub fn run_schedule(schedule: &NoisySchedule) -> Result<Self> {
        let mut d = DensityMatrix::new(schedule.num_qubits())?;
        for item in schedule.items() {
            match item {
                ScheduleItem::Gate(op) if op.kind == GateKind::Measure => {}
                ScheduleItem::Gate(op) => d.apply_gate(op)?,
                ScheduleItem::Channel { channel, qubits } => d.apply_channel(channel, qubits)?,
            }
        }
        Ok(d)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dim(), self.dim(), &self.rho)
    }

    /// `rho -> U rho U^dagger`. `BARRIER` is a no-op; `MEASURE` is rejected.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n)?;
        match op.kind {
            GateKind::Barrier => Ok(()),
            GateKind::Measure => Err(Error::MeasureAsGate),
            kind => {
                let u = kernel::flatten(&gate_matrix(kind, &op.params)?);
                kernel::apply_kraus_dm(&mut self.rho, self.n, &op.qubits, std::slice::from_ref(&u));
                Ok(())
            }
        }
    }

    /// `rho -> sum_i K_i rho K_i^dagger` on `qubits`.
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) -> Result<()> {
        channel.check_operands(self.n, qubits)?;
        let residual = channel.completeness_residual();
        if residual > crate::noise::COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "completeness residual {residual:e}"
            )));
        }
        if channel.is_identity() {
            return Ok(());
        }
        kernel::apply_kraus_dm(&mut self.rho, self.n, qubits, channel.flat_operators());
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.element(i, i)).sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                // rho is Hermitian, so rho[r][c] * rho[c][r] = |rho[r][c]|^2
                acc += (self.rho[r * dim + c] * self.rho[c * dim + r]).re;
            }
        }
        acc
    }

    /// `max |rho - rho^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.rho[r * dim + c] - self.rho[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    /// Max-norm distance to another density matrix.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if other.n != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: other.n });
        }
        Ok(self
            .rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `coeff * tr(P rho)`; fails if the imaginary residue exceeds 1e-8.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: p.num_qubits() });
        }
        let m = p.masks();
        let dim = self.dim();
        let total: Complex64 = (0..dim)
            .map(|j| m.phase(j) * self.rho[j * dim + (j ^ m.x)])
            .sum();
        if total.im.abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "expectation has imaginary residue {:e}; state is not Hermitian",
                total.im
            )));
        }
        Ok(p.coeff() * total.re)
    }

    /// Diagonal of `rho`, clipped at zero and renormalized.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut p: Vec<f64> = (0..self.dim()).map(|i| self.element(i, i).re.max(0.0)).collect();
        let total: f64 = p.iter().sum();
        if total > 0.0 {
            for x in &mut p {
                *x /= total;
            }
        }
        p
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Counts {
        let mut r = rng::seeded(seed);
        counts_from_histogram(&sample_histogram(&self.probabilities(), shots, &mut r), self.n)
    }
}

fn check_limit(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DM_QUBITS {
        return Err(Error::QubitLimit { n, max: MAX_DM_QUBITS });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{GateNoise, QubitCalibration, amplitude_damping, depolarizing};

    fn z() -> PauliString {
        "Z".parse().unwrap()
    }

    #[test]
    fn init_and_guard() {
        let d = DensityMatrix::new(1).unwrap();
        assert_eq!(d.element(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(d.element(1, 1), Complex64::new(0.0, 0.0));
        let d = DensityMatrix::new(2).unwrap();
        assert_eq!(d.dim(), 4);
        assert_eq!(d.trace(), Complex64::new(1.0, 0.0));
        assert!(matches!(DensityMatrix::new(15), Err(Error::QubitLimit { n: 15, .. })));
    }

    #[test]
    fn gate_examples() {
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&GateOp::new(GateKind::X, &[0], &[])).unwrap();
        assert_eq!(d.probabilities(), [0.0, 1.0]);

        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&GateOp::new(GateKind::H, &[0], &[])).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((d.element(r, c) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(d.apply_gate(&GateOp::measure(0, 0)), Err(Error::MeasureAsGate));
    }

    #[test]
    fn matches_statevector_outer_product() {
        let mut r = rng::seeded(5);
        for _ in 0..10 {
            let c = Circuit::random(3, 30, &mut r);
            let dm = DensityMatrix::run(&c).unwrap();
            let sv = DensityMatrix::from_statevector(&StateVector::run(&c).unwrap()).unwrap();
            assert!(dm.max_abs_diff(&sv).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn channel_examples() {
        let mut d = DensityMatrix::new(2).unwrap();
        d.apply_gate(&GateOp::new(GateKind::H, &[1], &[])).unwrap();
        let before = d.clone();
        d.apply_channel(&depolarizing(0.0, 1).unwrap(), &[0]).unwrap();
        assert_eq!(d, before);

        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_channel(&depolarizing(0.15, 1).unwrap(), &[0]).unwrap();
        assert!((d.expectation(&z()).unwrap() - 0.8).abs() < 1e-12);
        assert!((d.trace().re - 1.0).abs() < 1e-12);

        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&GateOp::new(GateKind::X, &[0], &[])).unwrap();
        d.apply_channel(&amplitude_damping(1.0).unwrap(), &[0]).unwrap();
        assert_eq!(d, DensityMatrix::new(1).unwrap());
    }

    #[test]
    fn channel_rejects_bad_operands() {
        let mut d = DensityMatrix::new(2).unwrap();
        let ch = depolarizing(0.1, 2).unwrap();
        assert!(matches!(d.apply_channel(&ch, &[0]), Err(Error::InvalidChannel(_))));
        assert!(d.apply_channel(&ch, &[0, 0]).is_err());
        let bad = KrausChannel::new_unchecked(1, vec![CMatrix::identity(2, 2) * Complex64::from(0.9)]);
        assert!(matches!(d.apply_channel(&bad, &[0]), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn expectation_examples() {
        let mixed = DensityMatrix::from_matrix(&(CMatrix::identity(2, 2) * Complex64::from(0.5))).unwrap();
        assert_eq!(mixed.expectation(&z()).unwrap(), 0.0);
        assert_eq!(DensityMatrix::new(1).unwrap().expectation(&z()).unwrap(), 1.0);

        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_channel(&depolarizing(0.3, 1).unwrap(), &[0]).unwrap();
        assert!((d.expectation(&z()).unwrap() - 0.6).abs() < 1e-12);

        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_gate(&GateOp::new(GateKind::Rx, &[0], &[0.8])).unwrap();
        let y = d.expectation(&"Y".parse().unwrap()).unwrap();
        assert!((y + 0.8f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn probabilities_examples() {
        assert_eq!(DensityMatrix::new(1).unwrap().probabilities(), [1.0, 0.0]);
        let mixed = DensityMatrix::from_matrix(&(CMatrix::identity(2, 2) * Complex64::from(0.5))).unwrap();
        assert_eq!(mixed.probabilities(), [0.5, 0.5]);
        let mut bell = Circuit::new(2, "bell");
        bell.h(0).unwrap().cx(0, 1).unwrap();
        let p = DensityMatrix::run(&bell).unwrap().probabilities();
        let want = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_run_examples() {
        let mut c = Circuit::new(2, "c");
        c.h(0).unwrap().cx(0, 1).unwrap().rz(1, 0.4).unwrap();
        let ideal = DensityMatrix::run(&c).unwrap();
        let zero = DensityMatrix::run_noisy(&c, &DeviceNoiseModel::ideal(2)).unwrap();
        assert!(zero.max_abs_diff(&ideal).unwrap() <= 1e-12);

        let p = 0.05;
        let model = DeviceNoiseModel::uniform(
            1,
            QubitCalibration { t1_us: 1.0, t2_us: 1.0, readout_p01: 0.0, readout_p10: 0.0 },
            GateNoise { error: p, duration_ns: 0.0 },
            GateNoise { error: p, duration_ns: 0.0 },
        );
        let mut x = Circuit::new(1, "x");
        x.x(0).unwrap();
        let d = DensityMatrix::run_noisy(&x, &model).unwrap();
        assert!((d.expectation(&z()).unwrap() + (1.0 - 4.0 * p / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn purity_bounds() {
        let d = DensityMatrix::new(2).unwrap();
        assert!((d.purity() - 1.0).abs() < 1e-15);
        let mut d = DensityMatrix::new(1).unwrap();
        d.apply_channel(&depolarizing(0.75, 1).unwrap(), &[0]).unwrap();
        assert!((d.purity() - 0.5).abs() < 1e-12);
    }
}
