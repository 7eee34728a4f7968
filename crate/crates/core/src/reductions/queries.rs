//! Recovering a parity from query access to a function close to it.

use crate::boolcube::{BitMask, SubsetMask};
use crate::dist::Rng;

/// `ceil(C·ln(n/δ)/(1-4ε)²)` votes per coordinate for an `ε`-close oracle.
pub fn query_trials(c: f64, n: usize, delta: f64, eps: f64) -> usize {
    let margin = 1.0 - 4.0 * eps;
    assert!(margin > 0.0, "query recovery needs eps < 1/4");
    (c * (n.max(1) as f64 / delta).ln().max(1.0) / (margin * margin)).ceil() as usize
}

/// Adds coordinate `ℓ` when the majority of `f(w)·f(w ⊕ e_ℓ)` over random
/// `w` is `-1`. Ties leave `ℓ` out.
pub fn find_parity_with_queries<F>(f: F, n: usize, rng: &mut Rng, trials_per_coord: usize) -> SubsetMask
where
    F: Fn(&BitMask) -> i8,
{
    let mut out = BitMask::zeros(n);
    let mut w = BitMask::zeros(n);
    for l in 0..n {
        let mut minus = 0usize;
        for _ in 0..trials_per_coord {
            rng.fill_point(&mut w);
            let a = f(&w);
            w.flip(l);
            let b = f(&w);
            if a * b < 0 {
                minus += 1;
            }
        }
        if 2 * minus > trials_per_coord {
            out.set(l, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(s: &BitMask) -> impl Fn(&BitMask) -> i8 + '_ {
        move |x| if s.dot(x) { -1 } else { 1 }
    }

    #[test]
    fn exact_parity() {
        let s = BitMask::from_indices(4, [0, 2]).unwrap();
        let got = find_parity_with_queries(chi(&s), 4, &mut Rng::new(60), 9);
        assert_eq!(got, s);
    }

    #[test]
    fn constant_gives_empty() {
        let got = find_parity_with_queries(|_| 1, 6, &mut Rng::new(61), 9);
        assert!(got.is_zero());
    }

    #[test]
    fn corrupted_parity() {
        let n = 10;
        let rng = Rng::new(62);
        let trials = query_trials(1.0, n, 0.01, 0.05);
        let ok = (0..100)
            .filter(|&t| {
                let mut r = rng.child(t);
                let size = 1 + r.below(4);
                let s = r.subset(n, size);
                // a fixed 5% of the cube, chosen by hashing the point
                let salt = r.point(n).to_u64();
                let f = |x: &BitMask| {
                    let h = (x.to_u64() ^ salt).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 32;
                    let v: i8 = if s.dot(x) { -1 } else { 1 };
                    if h % 100 < 5 {
                        -v
                    } else {
                        v
                    }
                };
                find_parity_with_queries(f, n, &mut r, trials) == s
            })
            .count();
        assert!(ok >= 95, "{ok}");
    }
}
