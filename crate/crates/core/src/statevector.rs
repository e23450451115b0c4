//! Pure-state simulation over `2^n` double-precision amplitudes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::circuit::{Circuit, GateOp};
use crate::error::{Error, Result};
use crate::gate::{GateKind, gate_matrix};
use crate::kernel::{self, LocalIndex};
use crate::noise::KrausChannel;
use crate::pauli::PauliString;
use crate::rng;

/// Largest register the state-vector engine will allocate (16 GiB).
pub const MAX_SV_QUBITS: usize = 30;

/// Measurement histogram keyed by bitstring (qubit `n - 1` leftmost).
pub type Counts = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SV_QUBITS {
            return Err(Error::QubitLimit { n, max: MAX_SV_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two `>= 2`.
    /// No normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_SV_QUBITS {
            return Err(Error::QubitLimit { n, max: MAX_SV_QUBITS });
        }
        Ok(StateVector { n, amps })
    }

    /// Runs a measurement-free circuit from `|0...0>`.
    pub fn run(circuit: &Circuit) -> Result<Self> {
        let mut s = StateVector::new(circuit.num_qubits())?;
        s.apply_circuit(circuit)?;
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_size(other.n)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: n });
        }
        Ok(())
    }

    /// Applies one unitary op in place. `BARRIER` is a no-op; `MEASURE` is
    /// rejected.
    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n)?;
        match op.kind {
            GateKind::Barrier => Ok(()),
            GateKind::Measure => Err(Error::MeasureAsGate),
            kind => {
                let m = kernel::flatten(&gate_matrix(kind, &op.params)?);
                kernel::apply_matrix(&mut self.amps, self.n, &op.qubits, &m);
                Ok(())
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.check_size(circuit.num_qubits())?;
        for op in circuit.ops() {
            self.apply_gate(op)?;
        }
        Ok(())
    }

    /// `coeff * <psi|P|psi>`, real part.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        self.check_size(p.num_qubits())?;
        let m = p.masks();
        let total: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.amps[i ^ m.x].conj() * m.phase(i) * a)
            .sum();
        Ok(p.coeff() * total.re)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws `shots` computational-basis samples with a fresh generator
    /// seeded from `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Counts {
        let mut rng = rng::seeded(seed);
        counts_from_histogram(&sample_histogram(&self.probabilities(), shots, &mut rng), self.n)
    }

    /// One Monte-Carlo step of a Kraus unraveling: picks `K_i` with
    /// probability `||K_i psi||^2`, applies it and renormalizes. Returns the
    /// index of the chosen operator.
    pub fn apply_kraus_trajectory<R: Rng + ?Sized>(
        &mut self,
        channel: &KrausChannel,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<usize> {
        channel.check_operands(self.n, qubits)?;
        let idx = LocalIndex::new(self.n, qubits);
        let dim = idx.offsets.len();
        let flat = channel.flat_operators();
        let mut weights = vec![0.0; flat.len()];
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for g in 0..idx.groups {
            let base = idx.base(g);
            for (l, x) in v.iter_mut().enumerate() {
                *x = self.amps[base | idx.offsets[l]];
            }
            for (w, k) in weights.iter_mut().zip(flat) {
                for r in 0..dim {
                    let row: Complex64 = (0..dim).map(|c| k[r * dim + c] * v[c]).sum();
                    *w += row.norm_sqr();
                }
            }
        }
        let norm = self.norm_sqr();
        let total: f64 = weights.iter().sum();
        if (total - norm).abs() > 1e-8 * norm.max(1.0) {
            return Err(Error::InvalidChannel(format!(
                "trajectory branch probabilities sum to {total}, expected {norm}"
            )));
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                chosen = i;
                break;
            }
        }
        kernel::apply_matrix(&mut self.amps, self.n, qubits, &flat[chosen]);
        let scale = 1.0 / weights[chosen].sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(chosen)
    }
}

/// Histogram of `shots` draws from `probs`, using a generator seeded from
/// `seed`. Entry `i` counts outcome `i`.
pub fn sample_distribution(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    sample_histogram(probs, shots, &mut rng::seeded(seed))
}

/// Multinomial sample of `shots` indices from `probs` (which need not be
/// exactly normalized). Inverse-CDF with one uniform draw per shot.
pub(crate) fn sample_histogram<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let i = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        hist[i] += 1;
    }
    hist
}

pub(crate) fn counts_from_histogram(hist: &[u64], n: usize) -> Counts {
    hist.iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(i, &c)| (crate::format_bitstring(i, n), c))
        .collect()
}
