//! Walsh–Hadamard transforms on dense functions `{±1}^d -> R`.
//!
//! Index `x` of the input array encodes a point (bit `i` set means
//! `x_i = -1`); index `A` of the spectrum encodes a subset. The forward
//! transform is the expectation `f̂(A) = E_x[f(x) χ_A(x)]` and carries the
//! `2^-d` factor; the inverse `f = Σ_A f̂(A) χ_A` carries none.

use super::{CubeError, MAX_DENSE_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct RealSpectrum {
    values: Vec<f64>,
}

impl RealSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self, CubeError> {
        dim_of_len(values.len())?;
        Ok(RealSpectrum { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, a: usize) -> f64 {
        self.values[a]
    }
}

/// Log2 of a power-of-two length within the dense limit.
pub fn dim_of_len(len: usize) -> Result<usize, CubeError> {
    if len == 0 || !len.is_power_of_two() {
        return Err(CubeError::NotPowerOfTwo(len));
    }
    let d = len.trailing_zeros() as usize;
    if d > MAX_DENSE_DIM {
        return Err(CubeError::DimensionTooLarge {
            d,
            max: MAX_DENSE_DIM,
        });
    }
    Ok(d)
}

/// Unnormalized in-place butterfly: `out[A] = Σ_x in[x] χ_A(x)`.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Integer variant of the butterfly, used for exact count transforms.
pub fn fwht_in_place_i64(data: &mut [i64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

pub fn wht_forward(f: &[f64]) -> Result<RealSpectrum, CubeError> {
    let d = dim_of_len(f.len())?;
    let mut values = f.to_vec();
    fwht_in_place(&mut values);
    let scale = (-(d as f64)).exp2();
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(RealSpectrum { values })
}

pub fn wht_inverse(spec: &RealSpectrum) -> Vec<f64> {
    let mut values = spec.values.clone();
    fwht_in_place(&mut values);
    values
}
