//! Column-major, bit-sliced storage of a sample batch.
//!
//! Column `j` holds bit `j` of every sample packed 64 samples per word, so a
//! parity sum over a set `A` is one XOR sweep plus a popcount, and the
//! histogram of a projection onto `d` coordinates is a walk over the
//! AND-lattice of `d` columns.

use super::{tail_mask, words_for, BitMask};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitColumns {
    n: usize,
    m: usize,
    stride: usize,
    data: Vec<u64>,
}

/// In-place transpose of a 64×64 bit matrix: bit `c` of row `r` moves to
/// bit `r` of row `c`.
fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32;
    let mut m: u64 = 0x0000_0000_ffff_ffff;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            // swap the high j bits of a[k] with the low j bits of a[k + j]
            let t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k] ^= t << j;
            a[k + j] ^= t;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}

impl BitColumns {
    pub fn from_points(n: usize, points: &[BitMask]) -> Self {
        let m = points.len();
        let stride = words_for(m);
        let mut data = vec![0u64; n * stride];
        let mut block = [0u64; 64];
        for (w, chunk) in points.chunks(64).enumerate() {
            for pw in 0..words_for(n) {
                block.fill(0);
                for (i, p) in chunk.iter().enumerate() {
                    debug_assert_eq!(p.dim(), n);
                    block[i] = p.words()[pw];
                }
                transpose64(&mut block);
                // row r of the transpose is bit r of every point in the chunk
                for (r, &v) in block.iter().enumerate() {
                    let j = pw * 64 + r;
                    if j < n {
                        data[j * stride + w] = v;
                    }
                }
            }
        }
        BitColumns { n, m, stride, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Words per column.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        &self.data[j * self.stride..(j + 1) * self.stride]
    }

    /// Mask for the last word of a column.
    #[inline]
    pub fn last_word_mask(&self) -> u64 {
        if self.m == 0 {
            0
        } else {
            tail_mask(self.m)
        }
    }

    /// Packs signs into one column word layout (bit set means `-1`).
    pub fn pack_signs(signs: &[i8]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(signs.len())];
        for (i, &s) in signs.iter().enumerate() {
            if s < 0 {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }

    /// `Σ_i χ_A(x_i)`, times `y_i` when a packed label column is given.
    pub fn parity_sum(&self, coords: &[usize], labels: Option<&[u64]>) -> i64 {
        let mut neg = 0u64;
        for w in 0..self.stride {
            let mut acc = labels.map_or(0, |l| l[w]);
            for &c in coords {
                acc ^= self.data[c * self.stride + w];
            }
            neg += acc.count_ones() as u64;
        }
        self.m as i64 - 2 * neg as i64
    }

    /// Parity sum for a subset mask.
    pub fn parity_sum_mask(&self, a: &BitMask, labels: Option<&[u64]>) -> i64 {
        let coords: Vec<usize> = a.iter_ones().collect();
        self.parity_sum(&coords, labels)
    }

    /// Compact index of sample `i` over `coords` (bit `j` from `coords[j]`).
    pub fn gather(&self, i: usize, coords: &[usize]) -> usize {
        let (w, b) = (i / 64, i % 64);
        let mut idx = 0;
        for (j, &c) in coords.iter().enumerate() {
            idx |= (((self.data[c * self.stride + w] >> b) & 1) as usize) << j;
        }
        idx
    }

    /// Row `i` as a point.
    pub fn point(&self, i: usize) -> BitMask {
        let mut p = BitMask::zeros(self.n);
        let (w, b) = (i / 64, i % 64);
        for j in 0..self.n {
            if (self.data[j * self.stride + w] >> b) & 1 == 1 {
                p.set(j, true);
            }
        }
        p
    }
}

/// Reusable scratch for projection histograms.
#[derive(Default, Debug, Clone)]
pub struct CellCounter {
    lattice: Vec<u64>,
    counts: Vec<i64>,
    idx: Vec<u32>,
}

// Above this many scratch words the lattice walk gives way to a per-sample pass.
const LATTICE_WORD_LIMIT: usize = 1 << 21;

impl CellCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Histogram of the projection onto `coords`; cell `t` counts samples
    /// whose bit `coords[j]` equals bit `j` of `t`.
    pub fn counts(&mut self, cols: &BitColumns, coords: &[usize]) -> &[i64] {
        let d = coords.len();
        let cells = 1usize << d;
        self.counts.clear();
        self.counts.resize(cells, 0);
        if cols.m == 0 {
            return &self.counts;
        }
        if d <= 16 && cells * cols.stride <= LATTICE_WORD_LIMIT {
            self.lattice_counts(cols, coords);
        } else {
            self.direct_counts(cols, coords);
        }
        &self.counts
    }

    fn lattice_counts(&mut self, cols: &BitColumns, coords: &[usize]) {
        let d = coords.len();
        let cells = 1usize << d;
        let st = cols.stride;
        self.lattice.clear();
        self.lattice.resize(cells * st, 0);
        // lattice[T] = AND of the columns in T; ones[T] counts samples with all of T set
        {
            let base = &mut self.lattice[..st];
            base.fill(u64::MAX);
            base[st - 1] = cols.last_word_mask();
        }
        self.counts[0] = cols.m as i64;
        for t in 1..cells {
            let hi = usize::BITS as usize - 1 - t.leading_zeros() as usize;
            let parent = t & !(1 << hi);
            let col = cols.column(coords[hi]);
            let (head, tail) = self.lattice.split_at_mut(t * st);
            let src = &head[parent * st..parent * st + st];
            let dst = &mut tail[..st];
            let mut ones = 0u64;
            for ((o, &a), &b) in dst.iter_mut().zip(src).zip(col) {
                *o = a & b;
                ones += o.count_ones() as u64;
            }
            self.counts[t] = ones as i64;
        }
        // superset Möbius inversion: at-least counts to exact counts
        for i in 0..d {
            let bit = 1 << i;
            for t in 0..cells {
                if t & bit == 0 {
                    self.counts[t] -= self.counts[t | bit];
                }
            }
        }
    }

    fn direct_counts(&mut self, cols: &BitColumns, coords: &[usize]) {
        let st = cols.stride;
        self.idx.clear();
        self.idx.resize(64, 0);
        for w in 0..st {
            self.idx.iter_mut().for_each(|v| *v = 0);
            for (j, &c) in coords.iter().enumerate() {
                let mut bits = cols.column(c)[w];
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    self.idx[b] |= 1 << j;
                }
            }
            let valid = if w + 1 == st { cols.m - 64 * w } else { 64 };
            for &v in &self.idx[..valid] {
                self.counts[v as usize] += 1;
            }
        }
    }
}
