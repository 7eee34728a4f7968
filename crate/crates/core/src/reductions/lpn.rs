//! Brute-force LPN: correlate the labels with every parity of size at most `k`.

use super::ReductionError;
use crate::boolcube::{binomial, enumerate_ksubsets, BitMask, SubsetMask};
use crate::dist::{LabeledSampleBatch, LabeledSource, Rng};

/// A solver for `k`-sparse parities under label noise with `1 - 2η ≥ gap`.
pub trait LpnSolver {
    fn solve(&mut self, source: &mut dyn LabeledSource, k: usize, gap: f64, rng: &mut Rng) -> Result<SubsetMask, ReductionError>;
}

/// `Σ_{i ≤ k} C(n, i)`.
pub fn lpn_candidate_count(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).map(|i| binomial(n as u64, i as u64)).sum()
}

/// `ceil(C·ln(#candidates)/gap²)`.
pub fn lpn_samples(c: f64, n: usize, k: usize, gap: f64) -> usize {
    let count = lpn_candidate_count(n, k).max(2) as f64;
    (c * count.ln() / (gap * gap)).ceil().max(1.0) as usize
}

/// Returns the `A`, `|A| ≤ k`, maximizing `|Σ χ_A(x_i)·y_i|`, provided the
/// maximum exceeds `m·gap/2`. Ties go to the first set in order of size,
/// then lexicographic order.
pub fn lpn_bruteforce_solve(batch: &LabeledSampleBatch, k: usize, gap: f64) -> Result<SubsetMask, ReductionError> {
    let n = batch.dim();
    let m = batch.len();
    if m == 0 {
        return Err(ReductionError::BadParameter("no samples".into()));
    }
    let cols = batch.columns();
    let labels = batch.packed_labels();
    let mut best: Option<(i64, Vec<usize>)> = None;
    for size in 0..=k.min(n) {
        let mut it = enumerate_ksubsets(n, size, &BitMask::zeros(n))?;
        while let Some(c) = it.next_coords() {
            let v = cols.parity_sum(&c, Some(&labels)).abs();
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, c));
            }
        }
    }
    let (v, c) = best.expect("size 0 is always enumerated");
    if v as f64 > m as f64 * gap / 2.0 {
        Ok(BitMask::from_indices(n, c)?)
    } else {
        Err(ReductionError::Failure)
    }
}

/// Draws a Chernoff-sized batch and runs [`lpn_bruteforce_solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceLpn {
    pub sample_constant: f64,
}

impl LpnSolver for BruteForceLpn {
    fn solve(&mut self, source: &mut dyn LabeledSource, k: usize, gap: f64, _rng: &mut Rng) -> Result<SubsetMask, ReductionError> {
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(ReductionError::BadParameter(format!("gap must lie in (0, 1], got {gap}")));
        }
        let m = lpn_samples(self.sample_constant, source.dim(), k, gap);
        let batch = source.draw_labeled(m);
        lpn_bruteforce_solve(&batch, k, gap)
    }
}
