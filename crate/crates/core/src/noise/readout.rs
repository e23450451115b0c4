use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::statevector::Counts;

/// Classical readout confusion for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// P(read 0 | true 1)
    pub p01: f64,
    /// P(read 1 | true 0)
    pub p10: f64,
}

/// Per-qubit readout errors, applied as a tensor product of 2x2
/// column-stochastic confusion matrices `[[1-p10, p01], [p10, 1-p01]]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReadoutModel {
    qubits: Vec<ReadoutError>,
}

impl ReadoutModel {
    pub fn new(qubits: Vec<ReadoutError>) -> Result<Self> {
        for e in &qubits {
            for p in [e.p01, e.p10] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Probability(p));
                }
            }
        }
        Ok(ReadoutModel { qubits })
    }

    pub fn ideal(n: usize) -> Self {
        ReadoutModel {
            qubits: vec![ReadoutError { p01: 0.0, p10: 0.0 }; n],
        }
    }

    /// Same error pair on every qubit.
    pub fn symmetric(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![ReadoutError { p01: p, p10: p }; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[ReadoutError] {
        &self.qubits
    }

    /// Model for the first `n` qubits.
    pub fn truncated(&self, n: usize) -> Self {
        ReadoutModel {
            qubits: self.qubits[..n.min(self.qubits.len())].to_vec(),
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.qubits.iter().all(|e| e.p01 == 0.0 && e.p10 == 0.0)
    }

    /// Pushes an exact outcome distribution through the confusion map.
    pub fn apply_dist(&self, dist: &[f64]) -> Result<Vec<f64>> {
        let n = self.qubits.len();
        if dist.len() != 1usize << n {
            return Err(Error::Distribution(format!(
                "length {} does not match 2^{n}",
                dist.len()
            )));
        }
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("sums to {total}, expected 1")));
        }
        let mut out = dist.to_vec();
        for (q, e) in self.qubits.iter().enumerate() {
            if e.p01 == 0.0 && e.p10 == 0.0 {
                continue;
            }
            let stride = 1usize << q;
            for chunk in out.chunks_exact_mut(stride << 1) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (zero, one) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (p0, p1) = (*zero, *one);
                    *zero = (1.0 - e.p10) * p0 + e.p01 * p1;
                    *one = e.p10 * p0 + (1.0 - e.p01) * p1;
                }
            }
        }
        Ok(out)
    }

    /// Flips every bit of every recorded shot independently with its
    /// confusion probability. Keys are visited in sorted order and bits from
    /// qubit 0 upward, so the result is a pure function of `(counts, seed)`.
    pub fn apply_samples(&self, counts: &Counts, seed: u64) -> Result<Counts> {
        let n = self.qubits.len();
        let mut rng = rng::seeded(seed);
        let mut out = Counts::new();
        for (bits, &count) in counts {
            let index = crate::parse_bitstring(bits)
                .filter(|_| bits.len() == n)
                .ok_or_else(|| Error::Distribution(format!("bad {n}-bit key {bits:?}")))?;
            if self.is_ideal() {
                *out.entry(bits.clone()).or_default() += count;
                continue;
            }
            for _ in 0..count {
                let mut noisy = index;
                for (q, e) in self.qubits.iter().enumerate() {
                    let flip = if index >> q & 1 == 1 { e.p01 } else { e.p10 };
                    if flip > 0.0 && rng.random::<f64>() < flip {
                        noisy ^= 1 << q;
                    }
                }
                *out.entry(crate::format_bitstring(noisy, n)).or_default() += 1;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_expect(dist: &[f64], q: usize) -> f64 {
        dist.iter()
            .enumerate()
            .map(|(i, p)| if i >> q & 1 == 0 { *p } else { -*p })
            .sum()
    }

    #[test]
    fn ideal_leaves_distribution() {
        let dist = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(ReadoutModel::ideal(2).apply_dist(&dist).unwrap(), dist);
    }

    #[test]
    fn single_confusion_row() {
        let m = ReadoutModel::new(vec![ReadoutError { p01: 0.0, p10: 0.02 }]).unwrap();
        let out = m.apply_dist(&[1.0, 0.0]).unwrap();
        assert!((out[0] - 0.98).abs() < 1e-15 && (out[1] - 0.02).abs() < 1e-15);
    }

    #[test]
    fn symmetric_error_scales_magnetization() {
        let p = 0.07;
        let m = ReadoutModel::symmetric(3, p).unwrap();
        let dist = [0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.2, 0.1];
        let out = m.apply_dist(&dist).unwrap();
        for q in 0..3 {
            let want = (1.0 - 2.0 * p) * z_expect(&dist, q);
            assert!((z_expect(&out, q) - want).abs() < 1e-12);
        }
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = ReadoutModel::ideal(2);
        assert!(matches!(m.apply_dist(&[1.0, 0.0]), Err(Error::Distribution(_))));
        assert!(matches!(m.apply_dist(&[0.5, 0.0, 0.0, 0.0]), Err(Error::Distribution(_))));
        assert!(ReadoutModel::symmetric(1, 1.2).is_err());
    }

    #[test]
    fn sample_flips_are_binomial() {
        let m = ReadoutModel::new(vec![ReadoutError { p01: 0.0, p10: 0.05 }]).unwrap();
        let counts = Counts::from([("0".to_string(), 1_000_000)]);
        let out = m.apply_samples(&counts, 17).unwrap();
        let ones = out["1"] as f64;
        let sigma = (1e6f64 * 0.05 * 0.95).sqrt();
        assert!((ones - 50_000.0).abs() <= 3.0 * sigma, "{ones}");
        assert_eq!(out.values().sum::<u64>(), 1_000_000);
        assert_eq!(out, m.apply_samples(&counts, 17).unwrap());
    }

    #[test]
    fn ideal_samples_unchanged() {
        let counts = Counts::from([("01".to_string(), 7), ("10".to_string(), 3)]);
        assert_eq!(ReadoutModel::ideal(2).apply_samples(&counts, 0).unwrap(), counts);
        assert!(ReadoutModel::ideal(3).apply_samples(&counts, 0).is_err());
    }
}
