use std::cell::RefCell;

use rand::RngExt;

use super::parity_expectation;
use super::tfim::{Boundary, build_tfim_hamiltonian, ground_energy};
use crate::DENSE_ORACLE_LIMIT;
use crate::circuit::{Circuit, GateOp};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gate::GateKind;
use crate::noise::{DeviceNoiseModel, ReadoutModel};
use crate::optimize::{OptimizeError, OptimizeOptions, minimize};
use crate::pauli::{Hamiltonian, Pauli, PauliString};
use crate::rng::{derive_seed, seeded};
use crate::statevector::{StateVector, sample_histogram};

/// Hardware-efficient ansatz: an RY column, then per layer a CX ladder
/// `(i, i+1)` for `i = 0..n-1` followed by another RY column.
///
/// Parameters are ordered column by column, qubit 0 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(n: usize, layers: usize) -> Result<Self> {
        if n == 0 || layers == 0 {
            return Err(Error::InvalidParameter("ansatz needs n >= 1 and layers >= 1".into()));
        }
        Ok(AnsatzSpec { n, layers })
    }

    pub fn num_params(&self) -> usize {
        self.n * (self.layers + 1)
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.num_params() {
            return Err(Error::ParamCount {
                kind: GateKind::Ry,
                expected: self.num_params(),
                got: params.len(),
            });
        }
        let mut c = Circuit::new(self.n, "ansatz");
        let mut theta = params.iter();
        for layer in 0..=self.layers {
            if layer > 0 {
                for q in 0..self.n - 1 {
                    c.cx(q, q + 1)?;
                }
            }
            for q in 0..self.n {
                c.ry(q, *theta.next().unwrap())?;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// Exact expectation values.
    Exact,
    /// Each measurement basis is sampled `shots` times; group `g` uses
    /// `derive_seed(seed, g)`.
    Shots { shots: u64, seed: u64 },
}

/// Terms grouped so every group is measurable in one product basis.
/// Greedy in term order.
fn measurement_groups(terms: &[PauliString]) -> Vec<(Vec<Pauli>, Vec<usize>)> {
    let mut groups: Vec<(Vec<Pauli>, Vec<usize>)> = Vec::new();
    for (k, term) in terms.iter().enumerate() {
        let fits = |basis: &[Pauli]| {
            term.letters()
                .iter()
                .zip(basis)
                .all(|(&t, &b)| t == Pauli::I || b == Pauli::I || t == b)
        };
        match groups.iter_mut().find(|(basis, _)| fits(basis)) {
            Some((basis, members)) => {
                for (b, &t) in basis.iter_mut().zip(term.letters()) {
                    if t != Pauli::I {
                        *b = t;
                    }
                }
                members.push(k);
            }
            None => groups.push((term.letters().to_vec(), vec![k])),
        }
    }
    groups
}

fn basis_change(basis: &[Pauli]) -> Vec<GateOp> {
    let mut ops = Vec::new();
    for (q, p) in basis.iter().enumerate() {
        match p {
            Pauli::X => ops.push(GateOp::new(GateKind::H, &[q], &[])),
            Pauli::Y => {
                ops.push(GateOp::new(GateKind::Sdg, &[q], &[]));
                ops.push(GateOp::new(GateKind::H, &[q], &[]));
            }
            Pauli::I | Pauli::Z => {}
        }
    }
    ops
}

fn support_mask(term: &PauliString) -> usize {
    term.support().fold(0, |m, (q, _)| m | 1 << q)
}

enum Prepared {
    Pure(StateVector),
    Mixed(DensityMatrix, ReadoutModel),
}

impl Prepared {
    /// Outcome distribution after rotating into `basis`. Basis changes are
    /// applied without noise; readout error is applied to the result.
    fn distribution(&self, basis: &[Pauli]) -> Result<Vec<f64>> {
        let ops = basis_change(basis);
        match self {
            Prepared::Pure(psi) => {
                let mut psi = psi.clone();
                for op in &ops {
                    psi.apply_gate(op)?;
                }
                Ok(psi.probabilities())
            }
            Prepared::Mixed(rho, readout) => {
                let mut rho = rho.clone();
                for op in &ops {
                    rho.apply_gate(op)?;
                }
                readout.apply_dist(&rho.probabilities())
            }
        }
    }
}

/// Energy of `h` in the ansatz state for `params`.
///
/// Without noise the state-vector engine is used; with noise the
/// density-matrix engine runs the ansatz under the device model and the
/// device readout error is applied to every measured distribution.
pub fn vqe_energy(
    params: &[f64],
    ansatz: &AnsatzSpec,
    h: &Hamiltonian,
    mode: EnergyMode,
    noise: Option<&DeviceNoiseModel>,
) -> Result<f64> {
    if h.num_qubits() != ansatz.n {
        return Err(Error::SizeMismatch {
            expected: ansatz.n,
            got: h.num_qubits(),
        });
    }
    let circuit = ansatz.circuit(params)?;
    let state = match noise {
        None => Prepared::Pure(StateVector::run(&circuit)?),
        Some(model) => Prepared::Mixed(
            DensityMatrix::run_noisy(&circuit, model)?,
            model.readout().truncated(ansatz.n),
        ),
    };
    if let (EnergyMode::Exact, Prepared::Pure(psi)) = (mode, &state) {
        return h.terms().iter().map(|t| psi.expectation(t)).sum();
    }

    let mut energy = 0.0;
    for (g, (basis, members)) in measurement_groups(h.terms()).into_iter().enumerate() {
        let dist = state.distribution(&basis)?;
        let dist = match mode {
            EnergyMode::Exact => dist,
            EnergyMode::Shots { shots, seed } => {
                if shots == 0 {
                    return Err(Error::InvalidParameter("shots must be positive".into()));
                }
                let mut rng = seeded(derive_seed(seed, g as u64));
                sample_histogram(&dist, shots, &mut rng)
                    .into_iter()
                    .map(|c| c as f64 / shots as f64)
                    .collect()
            }
        };
        for k in members {
            let term = &h.terms()[k];
            energy += term.coeff() * parity_expectation(&dist, support_mask(term));
        }
    }
    Ok(energy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeOptions {
    pub optimizer: OptimizeOptions,
    pub mode: EnergyMode,
    pub boundary: Boundary,
}

impl Default for VqeOptions {
    fn default() -> Self {
        VqeOptions {
            optimizer: OptimizeOptions {
                max_evals: 500,
                restarts: 2,
                initial_step: 0.8,
                ..Default::default()
            },
            mode: EnergyMode::Exact,
            boundary: Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    /// `(evaluation number, energy)` for every objective evaluation.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub iterations: usize,
    /// Dense ground energy, when `n` is within the oracle limit.
    pub exact_ground: Option<f64>,
}

impl VqeResult {
    /// `|best - E0| / |E0|`, when the ground energy is known and nonzero.
    pub fn relative_error(&self) -> Option<f64> {
        self.exact_ground
            .filter(|e| *e != 0.0)
            .map(|e| (self.best_energy - e).abs() / e.abs())
    }
}

/// VQE for the TFIM. Initial parameters are uniform in `[-0.1, 0.1]`
/// drawn from `seed`, which also seeds the optimizer restarts.
pub fn run_vqe(
    n: usize,
    coupling: f64,
    field: f64,
    layers: usize,
    opts: &VqeOptions,
    noise: Option<&DeviceNoiseModel>,
    seed: u64,
) -> Result<VqeResult> {
    let h = build_tfim_hamiltonian(n, coupling, field, opts.boundary)?;
    let ansatz = AnsatzSpec::new(n, layers)?;
    let mut rng = seeded(seed);
    let x0: Vec<f64> = (0..ansatz.num_params()).map(|_| rng.random_range(-0.1..=0.1)).collect();
    let optimizer = OptimizeOptions {
        seed: derive_seed(seed, 0),
        ..opts.optimizer.clone()
    };

    let failure = RefCell::new(None);
    let objective = |x: &[f64]| match vqe_energy(x, &ansatz, &h, opts.mode, noise) {
        Ok(e) => e,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let result = match minimize(objective, &x0, &optimizer) {
        Ok(r) => r,
        Err(e @ OptimizeError::NonFinite { .. }) => {
            return Err(failure.into_inner().unwrap_or(Error::Optimize(e)));
        }
        Err(e) => return Err(e.into()),
    };
    let exact_ground = if n <= DENSE_ORACLE_LIMIT {
        Some(ground_energy(&h)?)
    } else {
        None
    };
    Ok(VqeResult {
        best_params: result.best_params,
        best_energy: result.best_value,
        trace: result.trace,
        converged: result.converged,
        iterations: result.iterations,
        exact_ground,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ansatz_layout() {
        let a = AnsatzSpec::new(3, 2).unwrap();
        assert_eq!(a.num_params(), 9);
        let c = a.circuit(&[0.0; 9]).unwrap();
        assert_eq!(c.len(), 9 + 2 * 2);
        assert_eq!(c.ops()[3].kind, GateKind::Cx);
        assert_eq!(c.ops()[3].qubits, [0, 1]);
        assert!(a.circuit(&[0.0; 8]).is_err());
        assert!(AnsatzSpec::new(2, 0).is_err());
    }

    #[test]
    fn transverse_only_energy_at_zero() {
        let h = build_tfim_hamiltonian(3, 0.0, 1.0, Boundary::Open).unwrap();
        let a = AnsatzSpec::new(3, 1).unwrap();
        let e = vqe_energy(&[0.0; 6], &a, &h, EnergyMode::Exact, None).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn single_qubit_cosine() {
        let h = Hamiltonian::new(1, vec!["Z".parse().unwrap()]).unwrap();
        let a = AnsatzSpec::new(1, 1).unwrap();
        for theta in [0.0, 0.4, 2.0, std::f64::consts::PI] {
            let e = vqe_energy(&[theta, 0.0], &a, &h, EnergyMode::Exact, None).unwrap();
            assert!((e - theta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn groups_are_qubitwise_commuting() {
        let h = build_tfim_hamiltonian(4, 1.0, 1.0, Boundary::Periodic).unwrap();
        let groups = measurement_groups(h.terms());
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, [Pauli::Z; 4]);
        assert_eq!(groups[1].0, [Pauli::X; 4]);
        let mixed: Vec<PauliString> = ["XY", "YI", "IY", "ZZ"].iter().map(|s| s.parse().unwrap()).collect();
        let g = measurement_groups(&mixed);
        assert_eq!(g.iter().map(|x| x.1.clone()).collect::<Vec<_>>(), [vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn shots_agree_with_exact() {
        let h = build_tfim_hamiltonian(3, 1.0, 0.8, Boundary::Open).unwrap();
        let a = AnsatzSpec::new(3, 1).unwrap();
        let params = [0.3, -0.7, 1.1, 0.5, 0.2, -0.4];
        let exact = vqe_energy(&params, &a, &h, EnergyMode::Exact, None).unwrap();
        let shots = 1_000_000u64;
        let est = vqe_energy(&params, &a, &h, EnergyMode::Shots { shots, seed: 3 }, None).unwrap();
        // Var of a coefficient-weighted sum; each term variance <= coeff^2.
        let sigma: f64 = h.terms().iter().map(|t| t.coeff().abs()).sum::<f64>() / (shots as f64).sqrt();
        assert!((exact - est).abs() <= 3.0 * sigma, "{exact} vs {est}");
    }

    #[test]
    fn y_basis_measurement() {
        // RY(pi/2)|0> = |+>, so <Y> = 0 and <X> = 1
        let a = AnsatzSpec::new(1, 1).unwrap();
        let hy = Hamiltonian::new(1, vec!["Y".parse().unwrap()]).unwrap();
        let hx = Hamiltonian::new(1, vec!["X".parse().unwrap()]).unwrap();
        let p = [std::f64::consts::FRAC_PI_2, 0.0];
        let model = DeviceNoiseModel::ideal(1);
        let y = vqe_energy(&p, &a, &hy, EnergyMode::Exact, Some(&model)).unwrap();
        let x = vqe_energy(&p, &a, &hx, EnergyMode::Exact, Some(&model)).unwrap();
        assert!(y.abs() < 1e-12 && (x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_spin_classical_minimum() {
        let r = run_vqe(2, 1.0, 0.0, 1, &VqeOptions::default(), None, 5).unwrap();
        assert_eq!(r.exact_ground, Some(-1.0));
        assert!(r.best_energy <= -0.999, "{}", r.best_energy);
        assert!(r.trace.len() <= 500);
    }
}
