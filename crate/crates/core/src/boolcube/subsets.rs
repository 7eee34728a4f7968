use super::{BitMask, CubeError};

/// Size-`k` supersets of a fixed set, in lexicographic order of the free
/// coordinates that get added.
#[derive(Clone, Debug)]
pub struct KSubsets {
    base: BitMask,
    free: Vec<usize>,
    // positions into `free`; `None` once exhausted
    pick: Option<Vec<usize>>,
}

/// Every `S ⊆ {0..n}` with `|S| = k` and `S ⊇ must_contain`, each exactly once.
pub fn enumerate_ksubsets(n: usize, k: usize, must_contain: &BitMask) -> Result<KSubsets, CubeError> {
    if must_contain.dim() != n {
        return Err(CubeError::DimensionMismatch {
            expected: n,
            found: must_contain.dim(),
        });
    }
    let have = must_contain.count_ones();
    if have > k || k > n {
        return Err(CubeError::SubsetTooLarge { have, k, n });
    }
    let free: Vec<usize> = (0..n).filter(|&i| !must_contain.get(i)).collect();
    let r = k - have;
    Ok(KSubsets {
        base: must_contain.clone(),
        free,
        pick: Some((0..r).collect()),
    })
}

impl KSubsets {
    /// Number of subsets the full enumeration yields.
    pub fn total(&self) -> u128 {
        let r = self.pick.as_ref().map_or(0, |p| p.len());
        binomial(self.free.len() as u64, r as u64)
    }

    /// Advances `pick` to the next combination; `false` when exhausted.
    fn advance(pick: &mut [usize], nfree: usize) -> bool {
        let r = pick.len();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if pick[i] < nfree - r + i {
                pick[i] += 1;
                for j in i + 1..r {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    /// Next subset as sorted coordinates rather than a mask.
    pub fn next_coords(&mut self) -> Option<Vec<usize>> {
        let pick = self.pick.as_mut()?;
        let mut s: Vec<usize> = self.base.iter_ones().chain(pick.iter().map(|&p| self.free[p])).collect();
        s.sort_unstable();
        if !Self::advance(pick, self.free.len()) {
            self.pick = None;
        }
        Some(s)
    }
}

impl Iterator for KSubsets {
    type Item = BitMask;

    fn next(&mut self) -> Option<BitMask> {
        let pick = self.pick.as_mut()?;
        let mut s = self.base.clone();
        for &p in pick.iter() {
            s.set(self.free[p], true);
        }
        if !Self::advance(pick, self.free.len()) {
            self.pick = None;
        }
        Some(s)
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
