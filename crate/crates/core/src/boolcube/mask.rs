use std::fmt;

use smallvec::SmallVec;

use super::CubeError;

type Words = SmallVec<[u64; 2]>;

/// A fixed-width bit vector over `n` coordinates.
///
/// The same storage serves two roles on the hypercube. As a point, bit `i`
/// set means `x_i = -1` and clear means `x_i = +1`, so XOR of two points is
/// the coordinate-wise product. As a subset, bit `i` set means `i` belongs
/// to the set.
#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMask {
    n: usize,
    words: Words,
}

/// A point of `{±1}^n`.
pub type PointMask = BitMask;
/// A subset of the coordinates `0..n`.
pub type SubsetMask = BitMask;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Clone for BitMask {
    #[inline]
    fn clone(&self) -> Self {
        BitMask {
            n: self.n,
            words: Words::from_slice(&self.words),
        }
    }
}

impl BitMask {
    #[inline]
    pub fn zeros(n: usize) -> Self {
        let nw = words_for(n);
        let words = if nw <= 2 {
            Words::from_buf_and_len([0; 2], nw)
        } else {
            smallvec::smallvec![0; nw]
        };
        BitMask { n, words }
    }

    pub fn ones(n: usize) -> Self {
        let mut m = BitMask {
            n,
            words: smallvec::smallvec![u64::MAX; words_for(n)],
        };
        m.clear_tail();
        m
    }

    /// Builds a mask from the low `n` bits of `bits`. Panics if `n > 64` or
    /// a bit above `n` is set.
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "from_u64 needs n <= 64, got {n}");
        assert!(
            n == 64 || bits >> n == 0,
            "bits {bits:#x} do not fit in {n} coordinates"
        );
        let mut m = Self::zeros(n);
        if n > 0 {
            m.words[0] = bits;
        }
        m
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, idx: I) -> Result<Self, CubeError> {
        let mut m = Self::zeros(n);
        for i in idx {
            if i >= n {
                return Err(CubeError::IndexOutOfRange { index: i, n });
            }
            m.set(i, true);
        }
        Ok(m)
    }

    /// Builds a mask from raw little-endian words; bits past `n` are cleared.
    pub fn from_words(n: usize, words: &[u64]) -> Self {
        let mut m = Self::zeros(n);
        let w = m.words.len().min(words.len());
        m.words[..w].copy_from_slice(&words[..w]);
        m.clear_tail();
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub(crate) fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.n);
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_dim(&self, other: &Self) -> Result<(), CubeError> {
        if self.n != other.n {
            Err(CubeError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        } else {
            Ok(())
        }
    }

    /// GF(2) inner product: parity of `popcount(self AND other)`.
    #[inline]
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        out
    }

    pub fn or(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        out
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Low word as an integer; only meaningful when `n <= 64`.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    /// Gathers the bits at `coords` into a compact index: bit `j` of the
    /// result is bit `coords[j]` of `self`.
    #[inline]
    pub fn gather(&self, coords: &[usize]) -> usize {
        let mut idx = 0usize;
        for (j, &c) in coords.iter().enumerate() {
            if self.get(c) {
                idx |= 1 << j;
            }
        }
        idx
    }

    /// Inverse of [`gather`](Self::gather): a mask of width `n` whose bit
    /// `coords[j]` equals bit `j` of `idx`.
    pub fn scatter(n: usize, coords: &[usize], idx: usize) -> Self {
        let mut m = Self::zeros(n);
        for (j, &c) in coords.iter().enumerate() {
            if (idx >> j) & 1 == 1 {
                m.set(c, true);
            }
        }
        m
    }

    /// Parses an `n`-character string of `0`/`1`; character `i` is coordinate `i`.
    pub fn parse_bits(s: &str) -> Result<Self, CubeError> {
        let s = s.trim();
        let mut m = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => m.set(i, true),
                _ => return Err(CubeError::BadBitString(s.to_string())),
            }
        }
        Ok(m)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    pub(crate) fn same_dim(&self, other: &Self) -> Result<(), CubeError> {
        self.check_dim(other)
    }
}

impl fmt::Debug for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMask(n={}, {{", self.n)?;
        for (j, i) in self.iter_ones().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}})")
    }
}

/// Parity character `χ_A(x) = (-1)^{|A ∩ x|}` as `+1`/`-1`.
pub fn chi(a: &SubsetMask, x: &PointMask) -> Result<i8, CubeError> {
    a.same_dim(x)?;
    Ok(if a.dot(x) { -1 } else { 1 })
}

/// `χ_A(x)` for masks packed in machine words (dense dimensions).
#[inline]
pub fn chi_index(a: usize, x: usize) -> f64 {
    if (a & x).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}
