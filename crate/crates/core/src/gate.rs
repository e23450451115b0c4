//! Built-in gate set and gate matrices.
//!
//! Matrices are expressed in the operand-local basis: bit `j` of a row or
//! column index is the state of `qubits[j]` of the [`GateOp`](crate::GateOp).
//! For `CX` with operands `[control, target]` the control is bit 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
    Cx,
    Cz,
    Swap,
    Ccx,
    Measure,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 21] = [
        GateKind::Id,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Ccx,
        GateKind::Measure,
        GateKind::Barrier,
    ];

    /// Number of qubit operands, or `None` for the variadic `BARRIER`.
    pub fn arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            Id | X | Y | Z | H | S | Sdg | T | Tdg | Rx | Ry | Rz | U1 | U2 | U3 | Measure => {
                Some(1)
            }
            Cx | Cz | Swap => Some(2),
            Ccx => Some(3),
            Barrier => None,
        }
    }

    pub fn num_params(self) -> usize {
        use GateKind::*;
        match self {
            Rx | Ry | Rz | U1 => 1,
            U2 => 2,
            U3 => 3,
            _ => 0,
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Measure | GateKind::Barrier)
    }

    /// OpenQASM 2.0 (qelib1) spelling.
    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            Id => "id",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Rx => "rx",
            Ry => "ry",
            Rz => "rz",
            U1 => "u1",
            U2 => "u2",
            U3 => "u3",
            Cx => "cx",
            Cz => "cz",
            Swap => "swap",
            Ccx => "ccx",
            Measure => "measure",
            Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Kind and parameters of the inverse gate. `None` for non-unitary kinds.
    pub fn inverse(self, params: &[f64]) -> Option<(GateKind, Vec<f64>)> {
        use GateKind::*;
        let inv = match self {
            Id | X | Y | Z | H | Cx | Cz | Swap | Ccx => (self, vec![]),
            S => (Sdg, vec![]),
            Sdg => (S, vec![]),
            T => (Tdg, vec![]),
            Tdg => (T, vec![]),
            Rx | Ry | Rz | U1 => (self, vec![-params[0]]),
            U2 => (
                U3,
                vec![-std::f64::consts::FRAC_PI_2, -params[1], -params[0]],
            ),
            U3 => (U3, vec![-params[0], -params[2], -params[1]]),
            Measure | Barrier => return None,
        };
        Some(inv)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn mat(dim: usize, entries: &[Complex64]) -> CMatrix {
    CMatrix::from_row_slice(dim, dim, entries)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn u3(theta: f64, phi: f64, lambda: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(
        2,
        &[
            c(co, 0.0),
            -Complex64::from_polar(s, lambda),
            Complex64::from_polar(s, phi),
            Complex64::from_polar(co, phi + lambda),
        ],
    )
}

/// Unitary matrix of `kind` with the given angles (radians).
pub fn gate_matrix(kind: GateKind, params: &[f64]) -> Result<CMatrix> {
    use GateKind::*;
    if !kind.is_unitary() {
        return Err(Error::NotUnitary(kind));
    }
    if params.len() != kind.num_params() {
        return Err(Error::ParamCount {
            kind,
            expected: kind.num_params(),
            got: params.len(),
        });
    }
    let h = FRAC_1_SQRT_2;
    let m = match kind {
        Id => CMatrix::identity(2, 2),
        X => mat(2, &[ZERO, ONE, ONE, ZERO]),
        Y => mat(2, &[ZERO, -I, I, ZERO]),
        Z => mat(2, &[ONE, ZERO, ZERO, -ONE]),
        H => mat(2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        S => mat(2, &[ONE, ZERO, ZERO, I]),
        Sdg => mat(2, &[ONE, ZERO, ZERO, -I]),
        T => mat(2, &[ONE, ZERO, ZERO, c(h, h)]),
        Tdg => mat(2, &[ONE, ZERO, ZERO, c(h, -h)]),
        Rx => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            mat(2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
        }
        Ry => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            mat(2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
        }
        Rz => {
            let half = params[0] / 2.0;
            mat(
                2,
                &[
                    Complex64::from_polar(1.0, -half),
                    ZERO,
                    ZERO,
                    Complex64::from_polar(1.0, half),
                ],
            )
        }
        U1 => mat(2, &[ONE, ZERO, ZERO, Complex64::from_polar(1.0, params[0])]),
        U2 => u3(std::f64::consts::FRAC_PI_2, params[0], params[1]),
        U3 => u3(params[0], params[1], params[2]),
        // local index = control + 2 * target
        Cx => permutation(4, |i| if i & 1 == 1 { i ^ 2 } else { i }),
        Cz => CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
            ONE, ONE, ONE, -ONE,
        ])),
        Swap => permutation(4, |i| ((i & 1) << 1) | (i >> 1)),
        Ccx => permutation(8, |i| if i & 3 == 3 { i ^ 4 } else { i }),
        Measure | Barrier => unreachable!(),
    };
    Ok(m)
}

/// Permutation matrix mapping basis column `i` to row `f(i)`.
fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(f(i), i)] = ONE;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn unitarity_residual(u: &CMatrix) -> f64 {
        let n = u.nrows();
        max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
    }

    #[test]
    fn pauli_x() {
        let x = gate_matrix(GateKind::X, &[]).unwrap();
        assert_eq!(x, mat(2, &[ZERO, ONE, ONE, ZERO]));
    }

    #[test]
    fn zero_angle_rz_is_identity() {
        let rz = gate_matrix(GateKind::Rz, &[0.0]).unwrap();
        assert!(max_abs_diff(&rz, &CMatrix::identity(2, 2)) == 0.0);
    }

    #[test]
    fn u3_pi_0_pi_is_x() {
        let pi = std::f64::consts::PI;
        let u = gate_matrix(GateKind::U3, &[pi, 0.0, pi]).unwrap();
        let x = gate_matrix(GateKind::X, &[]).unwrap();
        assert!(max_abs_diff(&u, &x) <= 1e-12);
    }

    #[test]
    fn cx_flips_target_when_control_set() {
        let cx = gate_matrix(GateKind::Cx, &[]).unwrap();
        // control=1,target=0 (local 1) -> control=1,target=1 (local 3)
        assert_eq!(cx[(3, 1)], ONE);
        assert_eq!(cx[(1, 3)], ONE);
        assert_eq!(cx[(0, 0)], ONE);
        assert_eq!(cx[(2, 2)], ONE);
    }

    #[test]
    fn rejects_bad_params_and_non_unitary() {
        assert!(matches!(
            gate_matrix(GateKind::Rx, &[]),
            Err(Error::ParamCount { expected: 1, got: 0, .. })
        ));
        assert_eq!(
            gate_matrix(GateKind::Measure, &[]),
            Err(Error::NotUnitary(GateKind::Measure))
        );
        assert!(gate_matrix(GateKind::Barrier, &[]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(GateKind::from_name(k.name()), Some(k));
        }
        assert_eq!(GateKind::from_name("cu1"), None);
    }

    proptest! {
        #[test]
        fn every_gate_is_unitary(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
            let all = [a, b, c];
            for k in GateKind::ALL.into_iter().filter(|k| k.is_unitary()) {
                let u = gate_matrix(k, &all[..k.num_params()]).unwrap();
                prop_assert!(unitarity_residual(&u) <= 1e-12, "{k}");
            }
        }

        #[test]
        fn inverse_multiplies_to_identity(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
            let all = [a, b, c];
            for k in GateKind::ALL.into_iter().filter(|k| k.is_unitary()) {
                let p = &all[..k.num_params()];
                let (ik, ip) = k.inverse(p).unwrap();
                let prod = gate_matrix(ik, &ip).unwrap() * gate_matrix(k, p).unwrap();
                let n = prod.nrows();
                // equal up to a global phase
                let phase = prod[(0, 0)];
                prop_assert!((phase.norm() - 1.0).abs() < 1e-12);
                prop_assert!(max_abs_diff(&(prod / phase), &CMatrix::identity(n, n)) < 1e-12, "{k}");
            }
        }
    }
}
