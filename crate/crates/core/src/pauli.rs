//! Pauli strings and Hamiltonians built from them.
//!
//! In the text form `"ZXI"` the first letter acts on qubit 0.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::DENSE_ORACLE_LIMIT;
use crate::error::{Error, Result};
use crate::gate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    coeff: f64,
}

/// Bit masks describing a Pauli string's action on basis states:
/// `P|i> = phase(i) |i ^ x>` with
/// `phase(i) = i^y_count * (-1)^popcount(i & z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub y_count: u32,
}

impl PauliMasks {
    #[inline]
    pub fn phase(&self, index: usize) -> Complex64 {
        let sign = if (index & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        match self.y_count % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coeff: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::PauliParse {
                text: String::new(),
                reason: "empty Pauli string".into(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::PauliParse {
                text: coeff.to_string(),
                reason: "coefficient must be finite".into(),
            });
        }
        Ok(PauliString { letters, coeff })
    }

    /// `coeff * P` on qubit `q` of an `n`-qubit register, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli, coeff: f64) -> Self {
        assert!(q < n);
        let mut letters = vec![Pauli::I; n];
        letters[q] = p;
        PauliString { letters, coeff }
    }

    /// `coeff * P_a P_b` on an `n`-qubit register.
    pub fn pair(n: usize, a: usize, b: usize, p: Pauli, coeff: f64) -> Self {
        assert!(a < n && b < n && a != b);
        let mut letters = vec![Pauli::I; n];
        letters[a] = p;
        letters[b] = p;
        PauliString { letters, coeff }
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn with_coeff(mut self, coeff: f64) -> Self {
        self.coeff = coeff;
        self
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, p)| (q, *p))
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks { x: 0, z: 0, y_count: 0 };
        for (q, p) in self.letters.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => m.x |= 1 << q,
                Pauli::Z => m.z |= 1 << q,
                Pauli::Y => {
                    m.x |= 1 << q;
                    m.z |= 1 << q;
                    m.y_count += 1;
                }
            }
        }
        m
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[coeff '*'] letters`, e.g. `"ZIII"` or `"-0.5*XX"`.
    fn from_str(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::PauliParse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(err("empty Pauli string"));
        }
        let (coeff, word) = match trimmed.rsplit_once('*') {
            Some((c, w)) => {
                let c: f64 = c.trim().parse().map_err(|_| err("malformed coefficient"))?;
                if !c.is_finite() {
                    return Err(err("coefficient must be finite"));
                }
                (c, w.trim())
            }
            None => (1.0, trimmed),
        };
        if word.is_empty() {
            return Err(err("no Pauli letters"));
        }
        let letters = word
            .chars()
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| err(&format!("illegal letter {ch:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { letters, coeff })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff != 1.0 {
            write!(f, "{}*", self.coeff)?;
        }
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Sum of Pauli strings with real coefficients over a common register.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<PauliString>,
}

impl Hamiltonian {
    pub fn new(n: usize, terms: Vec<PauliString>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.num_qubits() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                got: t.num_qubits(),
            });
        }
        Ok(Hamiltonian { n, terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// Dense `2^n x 2^n` matrix. Limited to [`DENSE_ORACLE_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.n > DENSE_ORACLE_LIMIT {
            return Err(Error::QubitLimit {
                n: self.n,
                max: DENSE_ORACLE_LIMIT,
            });
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for term in &self.terms {
            let masks = term.masks();
            for col in 0..dim {
                m[(col ^ masks.x, col)] += masks.phase(col) * term.coeff;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(n: usize, terms: &[&str]) -> CMatrix {
        let terms = terms.iter().map(|t| t.parse().unwrap()).collect();
        Hamiltonian::new(n, terms).unwrap().to_dense().unwrap()
    }

    fn re(m: &CMatrix) -> Vec<f64> {
        // row-major real parts
        let mut out = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                assert_eq!(m[(r, c)].im, 0.0);
                out.push(m[(r, c)].re);
            }
        }
        out
    }

    #[test]
    fn parse_examples() {
        let p: PauliString = "ZIII".parse().unwrap();
        assert_eq!(p.letters(), [Pauli::Z, Pauli::I, Pauli::I, Pauli::I]);
        assert_eq!(p.coeff(), 1.0);

        let p: PauliString = "-0.5*XX".parse().unwrap();
        assert_eq!(p.letters(), [Pauli::X, Pauli::X]);
        assert_eq!(p.coeff(), -0.5);

        let e = "ZQ".parse::<PauliString>().unwrap_err();
        assert!(e.to_string().contains("illegal letter"), "{e}");
        assert!("".parse::<PauliString>().is_err());
        assert!("2*".parse::<PauliString>().is_err());
        assert!("abc*X".parse::<PauliString>().is_err());
    }

    #[test]
    fn dense_single_z() {
        assert_eq!(re(&dense(1, &["Z"])), [1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn dense_zz() {
        let m = dense(2, &["-1.0*ZZ"]);
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, [-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn dense_x_plus_z() {
        assert_eq!(re(&dense(1, &["X", "Z"])), [1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn first_letter_acts_on_qubit_zero() {
        // Z on qubit 0 flips the sign of odd indices
        let m = dense(2, &["ZI"]);
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, [1.0, -1.0, 1.0, -1.0]);
        // X on qubit 1 maps |00> to |10> (index 2)
        let m = dense(2, &["IX"]);
        assert_eq!(m[(2, 0)].re, 1.0);
    }

    #[test]
    fn y_matrix() {
        let m = dense(1, &["Y"]);
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn dense_limit() {
        let h = Hamiltonian::new(13, vec![PauliString::single(13, 0, Pauli::Z, 1.0)]).unwrap();
        assert!(matches!(h.to_dense(), Err(Error::QubitLimit { n: 13, .. })));
    }

    #[test]
    fn mismatched_terms_rejected() {
        let r = Hamiltonian::new(2, vec!["ZZZ".parse().unwrap()]);
        assert!(matches!(r, Err(Error::SizeMismatch { expected: 2, got: 3 })));
    }

    fn letters() -> impl Strategy<Value = String> {
        proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], 1..=8)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(word in letters(), coeff in prop_oneof![Just(1.0), -1e3f64..1e3]) {
            let p: PauliString = word.parse::<PauliString>().unwrap().with_coeff(coeff);
            let back: PauliString = p.to_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn dense_is_hermitian(words in proptest::collection::vec(letters(), 1..5), coeff in -2.0f64..2.0) {
            let n = words[0].len();
            let terms = words
                .iter()
                .map(|w| {
                    let mut w = w.clone();
                    w.truncate(n);
                    while w.len() < n { w.push('I'); }
                    w.parse::<PauliString>().unwrap().with_coeff(coeff)
                })
                .collect();
            let m = Hamiltonian::new(n, terms).unwrap().to_dense().unwrap();
            prop_assert_eq!(m.adjoint(), m);
        }
    }
}
