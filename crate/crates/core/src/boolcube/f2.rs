use rand::RngCore;

use super::{BitMask, CubeError};

/// An `m × n` matrix over GF(2), stored as `m` row masks of width `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<BitMask>,
}

impl F2Matrix {
    pub fn new(cols: usize, rows: Vec<BitMask>) -> Result<Self, CubeError> {
        for r in &rows {
            if r.dim() != cols {
                return Err(CubeError::DimensionMismatch {
                    expected: cols,
                    found: r.dim(),
                });
            }
        }
        Ok(F2Matrix { cols, rows })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        F2Matrix {
            cols: n,
            rows: vec![BitMask::zeros(n); m],
        }
    }

    /// Uniformly random matrix.
    pub fn random<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> Self {
        let rows = (0..m)
            .map(|_| {
                let mut r = BitMask::zeros(n);
                for w in r.words_mut() {
                    *w = rng.next_u64();
                }
                r.clear_tail();
                r
            })
            .collect();
        F2Matrix { cols: n, rows }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitMask] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    /// `(Av)_i = <row_i, v>` over GF(2).
    pub fn matvec(&self, v: &BitMask) -> Result<BitMask, CubeError> {
        if v.dim() != self.cols {
            return Err(CubeError::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        let mut out = BitMask::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `Aᵀp`: XOR of the rows selected by the set bits of `p`.
    pub fn transpose_matvec(&self, p: &BitMask) -> Result<BitMask, CubeError> {
        if p.dim() != self.rows.len() {
            return Err(CubeError::DimensionMismatch {
                expected: self.rows.len(),
                found: p.dim(),
            });
        }
        let mut out = BitMask::zeros(self.cols);
        for i in p.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// XORs `Aᵀp` into `x`, with `p` given as the low `m` bits of a word.
    /// Requires `m <= 64`.
    #[inline]
    pub fn xor_transpose_into(&self, p: u64, x: &mut BitMask) {
        debug_assert!(self.rows.len() <= 64);
        let mut p = p;
        while p != 0 {
            let i = p.trailing_zeros() as usize;
            p &= p - 1;
            x.xor_assign(&self.rows[i]);
        }
    }

    pub fn transpose(&self) -> F2Matrix {
        let m = self.rows.len();
        let mut rows = vec![BitMask::zeros(m); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                rows[j].set(i, true);
            }
        }
        F2Matrix { cols: m, rows }
    }
}
