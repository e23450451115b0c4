use nalgebra::DVector;
use num_complex::Complex64;

use super::parity_expectation;
use crate::circuit::Circuit;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gate::CMatrix;
use crate::noise::DeviceNoiseModel;
use crate::pauli::{Hamiltonian, Pauli, PauliString};
use crate::rng::{derive_seed, seeded};
use crate::statevector::{StateVector, sample_histogram};
use crate::DENSE_ORACLE_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    /// Adds the `(n-1, 0)` bond. Only for `n >= 3`; at `n = 2` it would
    /// duplicate the single open bond.
    Periodic,
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n >= 3 {
        b.push((n - 1, 0));
    }
    b
}

/// ZZ terms (coefficient `-J`) in bond order, then X terms (`-h`).
pub fn build_tfim_hamiltonian(n: usize, coupling: f64, field: f64, boundary: Boundary) -> Result<Hamiltonian> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !coupling.is_finite() || !field.is_finite() {
        return Err(Error::NonFiniteParam);
    }
    let mut terms: Vec<PauliString> = bonds(n, boundary)
        .into_iter()
        .map(|(a, b)| PauliString::pair(n, a, b, Pauli::Z, -coupling))
        .collect();
    terms.extend((0..n).map(|q| PauliString::single(n, q, Pauli::X, -field)));
    Hamiltonian::new(n, terms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfimParams {
    pub n: usize,
    /// J
    pub coupling: f64,
    /// h
    pub field: f64,
    pub t_max: f64,
    pub dt: f64,
    pub steps_per_unit: usize,
    pub boundary: Boundary,
}

impl Default for TfimParams {
    fn default() -> Self {
        TfimParams {
            n: 4,
            coupling: 1.0,
            field: 1.0,
            t_max: 3.0,
            dt: 0.1,
            steps_per_unit: 100,
            boundary: Boundary::Open,
        }
    }
}

impl TfimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if !self.coupling.is_finite() || !self.field.is_finite() {
            return bad("coupling and field must be finite");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return bad("t_max must be non-negative");
        }
        if self.steps_per_unit == 0 {
            return bad("steps per unit time must be at least 1");
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        build_tfim_hamiltonian(self.n, self.coupling, self.field, self.boundary)
    }
}

/// `ceil(t * steps_per_unit)`, with a 1e-9 allowance so that products like
/// `0.3 * 100` do not round up to an extra step. Zero only at `t = 0`.
pub fn trotter_steps(p: &TfimParams, t: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    ((t * p.steps_per_unit as f64 - 1e-9).ceil() as usize).max(1)
}

/// First-order Trotter circuit for `exp(-iHt)`. Each step applies
/// `exp(iJ dt Z_a Z_b)` per bond as CX, RZ(-2J dt), CX, then
/// `exp(ih dt X_q)` per site as RX(-2h dt).
pub fn build_trotter_circuit(p: &TfimParams, t: f64) -> Result<Circuit> {
    p.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let mut c = Circuit::new(p.n, format!("tfim_t{t}"));
    let steps = trotter_steps(p, t);
    if steps == 0 {
        return Ok(c);
    }
    let delta = t / steps as f64;
    let bonds = bonds(p.n, p.boundary);
    for _ in 0..steps {
        for &(a, b) in &bonds {
            c.cx(a, b)?.rz(b, -2.0 * p.coupling * delta)?.cx(a, b)?;
        }
        for q in 0..p.n {
            c.rx(q, -2.0 * p.field * delta)?;
        }
    }
    Ok(c)
}

/// Site-averaged `<Z_i>`.
pub fn average_z(psi: &StateVector) -> f64 {
    let n = psi.num_qubits();
    let probs = psi.probabilities();
    (0..n).map(|q| parity_expectation(&probs, 1 << q)).sum::<f64>() / n as f64
}

fn average_z_dist(dist: &[f64], n: usize) -> f64 {
    (0..n).map(|q| parity_expectation(dist, 1 << q)).sum::<f64>() / n as f64
}

/// Dense eigendecomposition of a Hamiltonian, reused across times.
#[derive(Debug, Clone)]
pub struct ExactEvolver {
    n: usize,
    energies: DVector<f64>,
    vectors: CMatrix,
}

impl ExactEvolver {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let dense = h.to_dense()?;
        let eig = dense.symmetric_eigen();
        Ok(ExactEvolver {
            n: h.num_qubits(),
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `V exp(-iEt) V^dagger psi0`.
    pub fn evolve(&self, initial: &StateVector, t: f64) -> Result<StateVector> {
        if initial.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: initial.num_qubits(),
            });
        }
        if t == 0.0 {
            return Ok(initial.clone());
        }
        let psi0 = DVector::from_column_slice(initial.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi0;
        for (c, e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let psi = &self.vectors * coeffs;
        StateVector::from_amplitudes(psi.as_slice().to_vec())
    }
}

/// Site-averaged `<Z_i>` of `exp(-iHt)|initial>`, by dense
/// eigendecomposition.
pub fn exact_magnetization(h: &Hamiltonian, t: f64, initial: &StateVector) -> Result<f64> {
    Ok(average_z(&ExactEvolver::new(h)?.evolve(initial, t)?))
}

/// Smallest eigenvalue of the dense Hamiltonian.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64> {
    Ok(ExactEvolver::new(h)?.ground_energy())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub exact: f64,
    pub ideal: f64,
    pub noisy: Option<f64>,
}

/// `0, dt, 2dt, ...` up to `t_max` (inclusive within 1e-9 of a step).
pub fn sweep_times(p: &TfimParams) -> Vec<f64> {
    let count = (p.t_max / p.dt + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * p.dt).collect()
}

/// Magnetization table from `|0...0>`.
///
/// `exact` comes from the dense oracle and `ideal` from the noiseless
/// state-vector run of the Trotter circuit. `noisy` is filled only when a
/// device model is given: the density-matrix run under that model, with
/// readout error applied to the final distribution. `shots` applies to the
/// noisy column only. Row `k` samples with `derive_seed(seed, k)`.
pub fn magnetization_sweep(
    p: &TfimParams,
    noise: Option<&DeviceNoiseModel>,
    shots: Option<u64>,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    p.validate()?;
    if p.n > DENSE_ORACLE_LIMIT {
        return Err(Error::QubitLimit {
            n: p.n,
            max: DENSE_ORACLE_LIMIT,
        });
    }
    let evolver = ExactEvolver::new(&p.hamiltonian()?)?;
    let initial = StateVector::new(p.n)?;
    let mut rows = Vec::new();
    for (k, t) in sweep_times(p).into_iter().enumerate() {
        let circuit = build_trotter_circuit(p, t)?;
        let exact = average_z(&evolver.evolve(&initial, t)?);
        let ideal = average_z(&StateVector::run(&circuit)?);
        let noisy = match noise {
            None => None,
            Some(model) => {
                let rho = DensityMatrix::run_noisy(&circuit, model)?;
                let dist = model.readout().truncated(p.n).apply_dist(&rho.probabilities())?;
                let value = match shots {
                    Some(s) if s > 0 => {
                        let mut rng = seeded(derive_seed(seed, k as u64));
                        let hist = sample_histogram(&dist, s, &mut rng);
                        let freq: Vec<f64> = hist.iter().map(|&c| c as f64 / s as f64).collect();
                        average_z_dist(&freq, p.n)
                    }
                    _ => average_z_dist(&dist, p.n),
                };
                Some(value)
            }
        };
        rows.push(SweepRow { t, exact, ideal, noisy });
    }
    Ok(rows)
}
