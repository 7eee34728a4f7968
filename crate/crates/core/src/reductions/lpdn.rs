//! Learning noisy parity distributions through an LPN solver.
//!
//! For a guessed coordinate `j`, flip `x_j` with probability 1/2 and label
//! the point `-1` exactly when it was flipped. When `j ∈ J` the points are
//! uniform and the labels are `χ_J(x)` under noise `η`, which is an LPN
//! instance. Each solver output becomes a candidate and the candidates are
//! separated by [`estimate_candidates_unknown_noise`].

use super::{find_parity_with_queries, lpn_candidate_count, query_trials, LpnSolver, ReductionError};
use crate::boolcube::{enumerate_ksubsets, BitMask, SubsetMask};
use crate::dist::{LabeledSampleBatch, LabeledSource, PointSource, Rng, SampleBatch};
use crate::fourier_learn::{estimate_candidates_unknown_noise, CandidateSearch, NoiseSearchOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct LpdnSolution {
    pub set: SubsetMask,
    /// Normalized coefficient `c(J)`, `±(1 - 2η)` for a noisy parity.
    pub coefficient: f64,
    pub candidates: Vec<SubsetMask>,
    pub search: Option<CandidateSearch>,
}

/// Replays one stream to several consumers; each starts from the beginning.
struct PointCache<'a> {
    inner: &'a mut dyn PointSource,
    points: Vec<BitMask>,
}

struct Replay<'c, 'a> {
    cache: &'c mut PointCache<'a>,
    pos: usize,
}

impl PointSource for Replay<'_, '_> {
    fn dim(&self) -> usize {
        self.cache.inner.dim()
    }

    fn draw(&mut self, m: usize) -> SampleBatch {
        let end = self.pos + m;
        if end > self.cache.points.len() {
            let more = self.cache.inner.draw(end - self.cache.points.len());
            self.cache.points.extend(more.into_points());
        }
        let points = self.cache.points[self.pos..end].to_vec();
        self.pos = end;
        SampleBatch::new(self.dim(), points).expect("cached points share the dimension")
    }

    fn drawn(&self) -> usize {
        self.pos
    }
}

/// Learns the parity set of a noisy parity distribution with
/// `|c(J)| ≥ gap_floor`.
pub trait LpdnSolver {
    fn solve(&mut self, source: &mut dyn PointSource, k: usize, gap_floor: f64, rng: &mut Rng) -> Result<LpdnSolution, ReductionError>;
}

/// Labeled stream obtained by randomly flipping coordinate `j`.
pub struct BitFlipSource<'a> {
    inner: &'a mut dyn PointSource,
    j: usize,
    rng: Rng,
    drawn: usize,
}

impl<'a> BitFlipSource<'a> {
    pub fn new(inner: &'a mut dyn PointSource, j: usize, rng: Rng) -> Self {
        BitFlipSource { inner, j, rng, drawn: 0 }
    }
}

impl LabeledSource for BitFlipSource<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn draw_labeled(&mut self, m: usize) -> LabeledSampleBatch {
        self.drawn += m;
        let n = self.inner.dim();
        let mut points = self.inner.draw(m).into_points();
        let mut labels = Vec::with_capacity(m);
        for x in points.iter_mut() {
            if self.rng.bit() {
                x.flip(self.j);
                labels.push(-1);
            } else {
                labels.push(1);
            }
        }
        LabeledSampleBatch::new(n, points, labels).expect("one label per point")
    }

    fn drawn(&self) -> usize {
        self.drawn
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpdnOptions {
    /// Relative accuracy of the final coefficient estimates.
    pub candidate_eps: f64,
    pub delta: f64,
    /// `C` in the per-coordinate vote count of query recovery.
    pub query_constant: f64,
    /// Noise search settings; `min_gap` is raised to `gap_floor/4`.
    pub search: NoiseSearchOptions,
}

pub fn reduce_lpdn_to_lpn(
    source: &mut dyn PointSource,
    k: usize,
    gap_floor: f64,
    lpn: &mut dyn LpnSolver,
    opts: &LpdnOptions,
    rng: &mut Rng,
) -> Result<LpdnSolution, ReductionError> {
    if !(gap_floor > 0.0 && gap_floor <= 1.0) {
        return Err(ReductionError::BadParameter(format!("gap floor must lie in (0, 1], got {gap_floor}")));
    }
    let n = source.dim();
    // the solver hands back a parity, so its hypothesis is exact
    let trials = query_trials(opts.query_constant, n, opts.delta, 0.0);
    let mut candidates: Vec<SubsetMask> = Vec::new();
    // every coordinate's instance is built on the same points; each one is
    // exactly distributed, which is all the union bound over j needs
    let mut cache = PointCache {
        inner: source,
        points: Vec::new(),
    };
    for j in 0..n {
        let mut r = rng.child(j as u64);
        let found = {
            let mut replay = Replay { cache: &mut cache, pos: 0 };
            let mut labeled = BitFlipSource::new(&mut replay, j, r.fork());
            lpn.solve(&mut labeled, k, gap_floor, &mut r)
        };
        let a = match found {
            Ok(a) => a,
            Err(e) if e.is_miss() => continue,
            Err(e) => return Err(e),
        };
        let g = |x: &BitMask| if a.dot(x) { -1 } else { 1 };
        let cand = find_parity_with_queries(g, n, &mut r, trials);
        if !cand.is_zero() && !candidates.contains(&cand) {
            candidates.push(cand);
        }
    }
    let source = cache.inner;
    if candidates.is_empty() {
        return Err(ReductionError::NoCandidate);
    }
    let search_opts = NoiseSearchOptions {
        min_gap: opts.search.min_gap.max(gap_floor / 4.0),
        ..opts.search
    };
    let search = estimate_candidates_unknown_noise(source, &candidates, opts.candidate_eps, opts.delta, &search_opts)?;
    Ok(LpdnSolution {
        set: search.set.clone(),
        coefficient: search.winner().c_hat,
        candidates,
        search: Some(search),
    })
}

/// The default solver: [`reduce_lpdn_to_lpn`] over a supplied LPN solver.
#[derive(Clone, Debug)]
pub struct LpnBackedLpdn<L> {
    pub lpn: L,
    pub opts: LpdnOptions,
}

impl<L: LpnSolver> LpdnSolver for LpnBackedLpdn<L> {
    fn solve(&mut self, source: &mut dyn PointSource, k: usize, gap_floor: f64, rng: &mut Rng) -> Result<LpdnSolution, ReductionError> {
        reduce_lpdn_to_lpn(source, k, gap_floor, &mut self.lpn, &self.opts, rng)
    }
}

/// Estimates every coefficient of size at most `k` directly and returns the
/// largest, if it reaches `gap_floor/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumScanLpdn {
    pub sample_constant: f64,
    pub delta: f64,
}

impl LpdnSolver for SpectrumScanLpdn {
    fn solve(&mut self, source: &mut dyn PointSource, k: usize, gap_floor: f64, _rng: &mut Rng) -> Result<LpdnSolution, ReductionError> {
        let n = source.dim();
        let count = lpn_candidate_count(n, k) as f64;
        let m = (self.sample_constant * (count / self.delta).ln() / (gap_floor * gap_floor)).ceil() as usize;
        let cols = source.draw(m.max(1)).columns();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for size in 1..=k.min(n) {
            let mut it = enumerate_ksubsets(n, size, &BitMask::zeros(n))?;
            while let Some(c) = it.next_coords() {
                let v = cols.parity_sum(&c, None) as f64 / cols.len() as f64;
                if best.as_ref().map_or(true, |(b, _)| v.abs() > b.abs()) {
                    best = Some((v, c));
                }
            }
        }
        match best {
            Some((v, c)) if v.abs() >= gap_floor / 2.0 => {
                let set = BitMask::from_indices(n, c)?;
                Ok(LpdnSolution {
                    set: set.clone(),
                    coefficient: v,
                    candidates: vec![set],
                    search: None,
                })
            }
            _ => Err(ReductionError::Failure),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{NoisyParityDistribution, SamplerSource};
    use crate::reductions::{lpn_bruteforce_solve, BruteForceLpn};

    fn opts() -> LpdnOptions {
        LpdnOptions {
            candidate_eps: 0.25,
            delta: 0.01,
            query_constant: 1.0,
            search: NoiseSearchOptions::default(),
        }
    }

    fn parity_source(n: usize, j: &[usize], sign: i8, eta: f64, rng: Rng) -> SamplerSource<NoisyParityDistribution> {
        let d = NoisyParityDistribution::new(n, BitMask::from_indices(n, j.iter().copied()).unwrap(), sign, eta).unwrap();
        SamplerSource::new(d, rng)
    }

    fn recovery(sign: i8) -> usize {
        let n = 8;
        let rng = Rng::new((70 + sign as i64) as u64);
        let want = BitMask::from_indices(n, [1, 4]).unwrap();
        (0..100)
            .filter(|&t| {
                let mut r = rng.child(t);
                let mut src = parity_source(n, &[1, 4], sign, 0.0, r.fork());
                let mut lpn = BruteForceLpn { sample_constant: 16.0 };
                match reduce_lpdn_to_lpn(&mut src, 2, 0.5, &mut lpn, &opts(), &mut r) {
                    Ok(s) => s.set == want && (s.coefficient - sign as f64).abs() < 0.25,
                    Err(_) => false,
                }
            })
            .count()
    }

    #[test]
    fn recovers_parity_distribution() {
        let ok = recovery(1);
        assert!(ok >= 90, "{ok}");
    }

    #[test]
    fn recovers_negative_sign() {
        let ok = recovery(-1);
        assert!(ok >= 90, "{ok}");
    }

    #[test]
    fn coordinate_outside_the_set_fails() {
        let n = 8;
        let rng = Rng::new(72);
        let failed = (0..100)
            .filter(|&t| {
                let mut r = rng.child(t);
                let mut src = parity_source(n, &[1, 4], 1, 0.1, r.fork());
                let mut lab = BitFlipSource::new(&mut src, 6, r.fork());
                let m = crate::reductions::lpn_samples(16.0, n, 2, 0.5);
                let b = lab.draw_labeled(m);
                matches!(lpn_bruteforce_solve(&b, 2, 0.5), Err(ReductionError::Failure))
            })
            .count();
        assert!(failed >= 95, "{failed}");
    }

    #[test]
    fn construction_laws_inside_the_set() {
        let n = 6;
        let eta = 0.15;
        for sign in [1i8, -1] {
            let mut src = parity_source(n, &[0, 3, 5], sign, eta, Rng::new(73));
            let mut lab = BitFlipSource::new(&mut src, 3, Rng::new(74));
            let m = 100_000;
            let b = lab.draw_labeled(m);
            let cols = b.columns();
            let tol = 5.0 / (m as f64).sqrt();
            // x uniform: every nonempty character unbiased
            for s in 1u64..1 << n {
                let c = cols.parity_sum_mask(&BitMask::from_u64(n, s), None) as f64 / m as f64;
                assert!(c.abs() < tol, "{s:b}: {c}");
            }
            // y = sign·χ_J(x) under noise eta
            let j = BitMask::from_indices(n, [0, 3, 5]).unwrap();
            let corr = cols.parity_sum_mask(&j, Some(&b.packed_labels())) as f64 / m as f64;
            assert!((corr - sign as f64 * (1.0 - 2.0 * eta)).abs() < tol);
            // labels unbiased and independent of every other character
            let y = BitMask::zeros(n);
            let ybar = cols.parity_sum_mask(&y, Some(&b.packed_labels())) as f64 / m as f64;
            assert!(ybar.abs() < tol);
        }
    }

    #[test]
    fn spectrum_scan_double() {
        let n = 10;
        let rng = Rng::new(75);
        let mut solver = SpectrumScanLpdn {
            sample_constant: 8.0,
            delta: 0.01,
        };
        let ok = (0..50)
            .filter(|&t| {
                let mut r = rng.child(t);
                let mut src = parity_source(n, &[2, 7], -1, 0.3, r.fork());
                let s = solver.solve(&mut src, 2, 0.4, &mut r).unwrap();
                s.set == BitMask::from_indices(n, [2, 7]).unwrap() && (s.coefficient + 0.4).abs() < 0.2
            })
            .count();
        assert!(ok >= 48, "{ok}");
    }

    #[test]
    fn uniform_has_no_candidate() {
        let mut src = SamplerSource::new(crate::dist::UniformSampler(8), Rng::new(76));
        let mut lpn = BruteForceLpn { sample_constant: 16.0 };
        let err = reduce_lpdn_to_lpn(&mut src, 2, 0.5, &mut lpn, &opts(), &mut Rng::new(77)).unwrap_err();
        assert_eq!(err, ReductionError::NoCandidate);
    }
}
