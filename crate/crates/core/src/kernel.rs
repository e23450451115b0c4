//! Strided gather/scatter kernels shared by both engines.
//!
//! A k-qubit operator touches amplitudes in groups of `2^k` that differ only
//! in the operand bits. Each group is identified by a base index with all
//! operand bits cleared; `offsets[l]` maps local index `l` (bit `j` set iff
//! `qubits[j]` is 1) to the group member `base | offsets[l]`.

use num_complex::Complex64;

use crate::gate::CMatrix;

pub(crate) const MAX_LOCAL: usize = 8;

#[derive(Debug, Clone)]
pub(crate) struct LocalIndex {
    sorted: Vec<usize>,
    pub offsets: Vec<usize>,
    pub groups: usize,
}

impl LocalIndex {
    pub fn new(n: usize, qubits: &[usize]) -> Self {
        let k = qubits.len();
        let mut sorted = qubits.to_vec();
        sorted.sort_unstable();
        let offsets = (0..1usize << k)
            .map(|l| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l >> j & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | 1 << q)
            })
            .collect();
        LocalIndex {
            sorted,
            offsets,
            groups: 1 << (n - k),
        }
    }

    /// Base index of group `g`: `g` with zero bits inserted at each operand
    /// position.
    #[inline]
    pub fn base(&self, g: usize) -> usize {
        let mut i = g;
        for &p in &self.sorted {
            let low = i & ((1 << p) - 1);
            i = ((i >> p) << (p + 1)) | low;
        }
        i
    }
}

/// Row-major copy of a small operator matrix.
pub(crate) fn flatten(m: &CMatrix) -> Vec<Complex64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            out.push(m[(r, c)]);
        }
    }
    out
}

#[inline]
fn matvec(m: &[Complex64], dim: usize, v: &[Complex64], out: &mut [Complex64]) {
    for (r, o) in out.iter_mut().enumerate().take(dim) {
        let row = &m[r * dim..(r + 1) * dim];
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            acc += row[c] * v[c];
        }
        *o = acc;
    }
}

/// Applies a `2^k x 2^k` row-major operator to `amps` (length `2^n`) over
/// the operand qubits. The operator need not be unitary.
pub(crate) fn apply_matrix(amps: &mut [Complex64], n: usize, qubits: &[usize], m: &[Complex64]) {
    match qubits.len() {
        1 => apply_1q(amps, qubits[0], m),
        2 => apply_2q(amps, n, qubits, m),
        _ => apply_kq(amps, n, qubits, m),
    }
}

fn apply_1q(amps: &mut [Complex64], q: usize, m: &[Complex64]) {
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m00 * x + m01 * y;
            *b = m10 * x + m11 * y;
        }
    }
}

fn apply_2q(amps: &mut [Complex64], n: usize, qubits: &[usize], m: &[Complex64]) {
    let idx = LocalIndex::new(n, qubits);
    let o = [idx.offsets[0], idx.offsets[1], idx.offsets[2], idx.offsets[3]];
    let mut v = [Complex64::new(0.0, 0.0); 4];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for g in 0..idx.groups {
        let base = idx.base(g);
        for l in 0..4 {
            v[l] = amps[base | o[l]];
        }
        matvec(m, 4, &v, &mut out);
        for l in 0..4 {
            amps[base | o[l]] = out[l];
        }
    }
}

fn apply_kq(amps: &mut [Complex64], n: usize, qubits: &[usize], m: &[Complex64]) {
    let idx = LocalIndex::new(n, qubits);
    let dim = idx.offsets.len();
    assert!(dim <= MAX_LOCAL);
    let mut v = [Complex64::new(0.0, 0.0); MAX_LOCAL];
    let mut out = [Complex64::new(0.0, 0.0); MAX_LOCAL];
    for g in 0..idx.groups {
        let base = idx.base(g);
        for l in 0..dim {
            v[l] = amps[base | idx.offsets[l]];
        }
        matvec(m, dim, &v[..dim], &mut out[..dim]);
        for l in 0..dim {
            amps[base | idx.offsets[l]] = out[l];
        }
    }
}

/// `rho <- sum_i K_i rho K_i^dagger` on the operand qubits, where `rho` is
/// a row-major `2^n x 2^n` matrix and each `K_i` a row-major
/// `2^k x 2^k` operator. Works block by block, so no full-size scratch
/// buffer is needed.
pub(crate) fn apply_kraus_dm(rho: &mut [Complex64], n: usize, qubits: &[usize], kraus: &[Vec<Complex64>]) {
    let idx = LocalIndex::new(n, qubits);
    let d = idx.offsets.len();
    assert!(d <= MAX_LOCAL);
    let stride = 1usize << n;
    let zero = Complex64::new(0.0, 0.0);
    let mut block = [[zero; MAX_LOCAL]; MAX_LOCAL];
    let mut tmp = [[zero; MAX_LOCAL]; MAX_LOCAL];
    let mut acc = [[zero; MAX_LOCAL]; MAX_LOCAL];
    for rg in 0..idx.groups {
        let r0 = idx.base(rg);
        for cg in 0..idx.groups {
            let c0 = idx.base(cg);
            for a in 0..d {
                let row = (r0 | idx.offsets[a]) * stride;
                for b in 0..d {
                    block[a][b] = rho[row + (c0 | idx.offsets[b])];
                }
            }
            for row in acc.iter_mut().take(d) {
                row[..d].fill(zero);
            }
            for k in kraus {
                // tmp = K B
                for a in 0..d {
                    for b in 0..d {
                        let mut s = zero;
                        for j in 0..d {
                            s += k[a * d + j] * block[j][b];
                        }
                        tmp[a][b] = s;
                    }
                }
                // acc += tmp K^dagger
                for a in 0..d {
                    for b in 0..d {
                        let mut s = zero;
                        for j in 0..d {
                            s += tmp[a][j] * k[b * d + j].conj();
                        }
                        acc[a][b] += s;
                    }
                }
            }
            for a in 0..d {
                let row = (r0 | idx.offsets[a]) * stride;
                for b in 0..d {
                    rho[row + (c0 | idx.offsets[b])] = acc[a][b];
                }
            }
        }
    }
}
