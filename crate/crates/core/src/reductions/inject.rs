//! Noise injection: `x ↦ x ⊕ Aᵀq` with `q` uniform over `{0,1}^m`.
//!
//! The output law is `D_A(x) = E_q[D(x ⊕ Aᵀq)]`, whose spectrum is that of
//! `D` restricted to the kernel `{a : Aa = 0}`.

use crate::boolcube::{BitMask, CubeError, F2Matrix, SubsetMask};
use crate::dist::{PointSource, Rng, SampleBatch};

fn check(a: &F2Matrix, n: usize) -> Result<(), CubeError> {
    if a.col_count() != n {
        return Err(CubeError::DimensionMismatch {
            expected: n,
            found: a.col_count(),
        });
    }
    if a.row_count() > 64 {
        return Err(CubeError::DimensionTooLarge {
            d: a.row_count(),
            max: 64,
        });
    }
    Ok(())
}

#[inline]
fn draw_q(rng: &mut Rng, m: usize) -> u64 {
    let q = rand::RngCore::next_u64(rng);
    if m >= 64 {
        q
    } else {
        q & ((1u64 << m) - 1)
    }
}

pub fn noise_inject(batch: &SampleBatch, a: &F2Matrix, rng: &mut Rng) -> Result<SampleBatch, CubeError> {
    check(a, batch.dim())?;
    let m = a.row_count();
    let points = batch
        .points()
        .iter()
        .map(|x| {
            let mut y = x.clone();
            a.xor_transpose_into(draw_q(rng, m), &mut y);
            y
        })
        .collect();
    Ok(SampleBatch::new(batch.dim(), points).expect("dimension preserved"))
}

/// A stream from `D_A` built on a stream from `D`.
pub struct InjectedSource<'a> {
    inner: &'a mut dyn PointSource,
    a: F2Matrix,
    rng: Rng,
    drawn: usize,
}

impl<'a> InjectedSource<'a> {
    pub fn new(inner: &'a mut dyn PointSource, a: F2Matrix, rng: Rng) -> Result<Self, CubeError> {
        check(&a, inner.dim())?;
        Ok(InjectedSource { inner, a, rng, drawn: 0 })
    }

    pub fn matrix(&self) -> &F2Matrix {
        &self.a
    }
}

impl PointSource for InjectedSource<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn draw(&mut self, m: usize) -> SampleBatch {
        self.drawn += m;
        let n = self.inner.dim();
        let mut points = self.inner.draw(m).into_points();
        let rows = self.a.row_count();
        for x in points.iter_mut() {
            self.a.xor_transpose_into(draw_q(&mut self.rng, rows), x);
        }
        SampleBatch::new(n, points).expect("dimension preserved")
    }

    fn drawn(&self) -> usize {
        self.drawn
    }
}

/// Whether, among the non-empty subsets of `j_star`, exactly `j` lies in the
/// kernel of `A`. Under this event `D_A` is a noisy parity on `j` for any
/// junta `D` on `j_star`.
pub fn survives(a: &F2Matrix, j: &SubsetMask, j_star: &SubsetMask) -> bool {
    let coords = j_star.indices();
    let n = j_star.dim();
    // A·1_T for every T ⊆ j_star, built by Gray-code XORs of columns
    let cols: Vec<BitMask> = coords
        .iter()
        .map(|&c| {
            let mut col = BitMask::zeros(a.row_count());
            for r in 0..a.row_count() {
                col.set(r, a.get(r, c));
            }
            col
        })
        .collect();
    let mut image = BitMask::zeros(a.row_count());
    let mut t = BitMask::zeros(n);
    for g in 1u64..1 << coords.len() {
        let bit = g.trailing_zeros() as usize;
        image.xor_assign(&cols[bit]);
        t.flip(coords[bit]);
        let in_kernel = image.is_zero();
        if in_kernel != (&t == j) {
            return false;
        }
    }
    true
}
