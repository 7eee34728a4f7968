//! Bit-level primitives for `{±1}^n`: point and subset masks, parity
//! characters, Walsh–Hadamard transforms, GF(2) matrices, subset enumeration,
//! and column-major sample storage for fast histogram and correlation work.

mod columns;
mod f2;
mod mask;
mod subsets;
mod wht;

pub use columns::{BitColumns, CellCounter};
pub use f2::F2Matrix;
pub use mask::{chi, chi_index, BitMask, PointMask, SubsetMask};
pub(crate) use mask::{tail_mask, words_for};
pub use subsets::{binomial, enumerate_ksubsets, KSubsets};
pub use wht::{dim_of_len, fwht_in_place, fwht_in_place_i64, wht_forward, wht_inverse, RealSpectrum};

/// Largest dimension for which dense `2^d` arrays are materialized.
pub const MAX_DENSE_DIM: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CubeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dense dimension {d} exceeds the limit {max}")]
    DimensionTooLarge { d: usize, max: usize },
    #[error("cannot extend a set of size {have} to size {k} within {n} coordinates")]
    SubsetTooLarge { have: usize, k: usize, n: usize },
    #[error("not a 0/1 string: {0:?}")]
    BadBitString(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parseval_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [0usize, 3, 8, 14] {
            let f: Vec<f64> = (0..1 << d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lhs = f.iter().map(|v| v * v).sum::<f64>() / (1u64 << d) as f64;
            let rhs: f64 = wht_forward(&f).unwrap().values().iter().map(|v| v * v).sum();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300), "d={d}");
        }
    }

    #[test]
    fn characters_are_orthonormal() {
        for d in 0..=8usize {
            let len = 1usize << d;
            for a in 0..len {
                for b in (0..len).step_by(1 + len / 16) {
                    let s: f64 = (0..len).map(|x| chi_index(a, x) * chi_index(b, x)).sum();
                    let expect = if a == b { len as f64 } else { 0.0 };
                    assert_eq!(s, expect);
                }
            }
        }
    }
}
