//! Heavy Fourier coefficients of a junta distribution from a noisy parity
//! distribution learner, and the assembly of the hits into a distribution.
//!
//! A round draws a random `(k+1) × n` matrix `A` and hands the learner the
//! stream `x ⊕ Aᵀq`. With probability `Ω(2^-k)` exactly one heavy set
//! survives the kernel and the stream is a noisy parity on it. The returned
//! set is re-estimated on clean samples and kept only if the estimate is
//! large.

use std::collections::BTreeMap;

use super::{InjectedSource, LpdnSolver, ReductionError};
use crate::boolcube::{BitMask, CubeError, F2Matrix, SubsetMask, MAX_DENSE_DIM};
use crate::dist::{BiasSpectrum, DensePmf, JuntaDistribution, PointSource, Rng};

#[derive(Clone, Debug, PartialEq)]
pub struct HeavyFourierHit {
    pub set: SubsetMask,
    /// Normalized coefficient estimate.
    pub z: f64,
    pub half_width: f64,
    pub round: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HeavyOutcome {
    Hit(HeavyFourierHit),
    /// The guard failed; `returned` is the solver's set, if it gave one.
    Miss { returned: Option<SubsetMask>, z: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeavyOptions {
    /// `C` in `C·k·2^{2k}` rounds.
    pub rounds_constant: f64,
    /// `C` in the verification sample size `C·ln(2/δ)/acc²`.
    pub verify_constant: f64,
    /// Failure probability of one verification.
    pub delta: f64,
}

impl HeavyOptions {
    pub fn rounds(&self, k: usize) -> usize {
        (self.rounds_constant * k.max(1) as f64 * (2.0 * k as f64).exp2()).ceil() as usize
    }
}

/// `ceil(C·ln(2/δ)/acc²)`.
pub fn verify_samples(c: f64, acc: f64, delta: f64) -> usize {
    (c * (2.0 / delta).ln() / (acc * acc)).ceil().max(1.0) as usize
}

/// One round. `round` is recorded in the hit.
pub fn find_heavy_fourier(
    source: &mut dyn PointSource,
    k: usize,
    eps: f64,
    solver: &mut dyn LpdnSolver,
    opts: &HeavyOptions,
    round: usize,
    rng: &mut Rng,
) -> Result<HeavyOutcome, ReductionError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ReductionError::BadParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let n = source.dim();
    let scale = (-(k as f64) / 2.0).exp2();
    let a = F2Matrix::random(k + 1, n, rng);
    let solved = {
        let mut injected = InjectedSource::new(source, a, rng.fork())?;
        solver.solve(&mut injected, k, eps * scale, rng)
    };
    let set = match solved {
        Ok(sol) if !sol.set.is_zero() => sol.set,
        Ok(_) => return Ok(HeavyOutcome::Miss { returned: None, z: None }),
        Err(e) if e.is_miss() => return Ok(HeavyOutcome::Miss { returned: None, z: None }),
        Err(e) => return Err(e),
    };
    let acc = eps / 3.0 * scale;
    let m = verify_samples(opts.verify_constant, acc, opts.delta);
    let cols = source.draw(m).columns();
    let z = cols.parity_sum_mask(&set, None) as f64 / m as f64;
    if z.abs() >= 2.0 * acc {
        Ok(HeavyOutcome::Hit(HeavyFourierHit {
            set,
            z,
            half_width: acc,
            round,
        }))
    } else {
        Ok(HeavyOutcome::Miss {
            returned: Some(set),
            z: Some(z),
        })
    }
}

/// A finitely supported normalized spectrum; `∅` maps to 1 unless set.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSpectrum {
    n: usize,
    entries: BTreeMap<SubsetMask, f64>,
}

impl SparseSpectrum {
    pub fn new(n: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(BitMask::zeros(n), 1.0);
        SparseSpectrum { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, a: SubsetMask, c: f64) -> Result<(), CubeError> {
        if a.dim() != self.n {
            return Err(CubeError::DimensionMismatch {
                expected: self.n,
                found: a.dim(),
            });
        }
        self.entries.insert(a, c);
        Ok(())
    }

    pub fn get(&self, a: &SubsetMask) -> f64 {
        self.entries.get(a).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SubsetMask, f64)> {
        self.entries.iter().map(|(a, &c)| (a, c))
    }

    /// Union of the supported sets.
    pub fn relevant(&self) -> SubsetMask {
        self.entries.keys().fold(BitMask::zeros(self.n), |acc, a| acc.or(a))
    }
}

/// Inverse transform on the union `L` of the support, negative cells
/// clipped to zero and the rest renormalized.
pub fn round_to_pmf(z: &SparseSpectrum) -> Result<JuntaDistribution, ReductionError> {
    let l = z.relevant();
    let coords = l.indices();
    let d = coords.len();
    if d > MAX_DENSE_DIM {
        return Err(CubeError::DimensionTooLarge { d, max: MAX_DENSE_DIM }.into());
    }
    let mut c = vec![0.0; 1 << d];
    for (a, v) in z.entries() {
        c[a.gather(&coords)] = v;
    }
    let mut values = BiasSpectrum::new(c)?.to_values();
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(ReductionError::AllMassClipped);
    }
    values.iter_mut().for_each(|v| *v /= total);
    Ok(JuntaDistribution::new(z.dim(), l, DensePmf::new(values)?)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LjdViaLpdnRun {
    pub distribution: JuntaDistribution,
    pub spectrum: SparseSpectrum,
    /// Every hit in round order, before deduplication.
    pub hits: Vec<HeavyFourierHit>,
    pub rounds: usize,
    pub misses: usize,
    pub samples: usize,
}

/// Runs `C·k·2^{2k}` rounds of [`find_heavy_fourier`], keeps one hit per
/// set (smallest half-width, earliest on ties) and rounds the resulting
/// spectrum to a distribution.
pub fn reduce_ljd_via_lpdn(
    source: &mut dyn PointSource,
    k: usize,
    eps: f64,
    solver: &mut dyn LpdnSolver,
    opts: &HeavyOptions,
    rng: &mut Rng,
) -> Result<LjdViaLpdnRun, ReductionError> {
    let n = source.dim();
    let start = source.drawn();
    let rounds = opts.rounds(k);
    let mut hits = Vec::new();
    let mut misses = 0;
    let mut best: BTreeMap<SubsetMask, (f64, f64)> = BTreeMap::new();
    for r in 0..rounds {
        let mut rr = rng.child(r as u64);
        match find_heavy_fourier(source, k, eps, solver, opts, r, &mut rr)? {
            HeavyOutcome::Hit(h) => {
                let replace = best.get(&h.set).map_or(true, |&(hw, _)| h.half_width < hw);
                if replace {
                    best.insert(h.set.clone(), (h.half_width, h.z));
                }
                hits.push(h);
            }
            HeavyOutcome::Miss { .. } => misses += 1,
        }
    }
    let mut spectrum = SparseSpectrum::new(n);
    for (set, (_, z)) in best {
        spectrum.set(set, z)?;
    }
    let distribution = round_to_pmf(&spectrum)?;
    Ok(LjdViaLpdnRun {
        distribution,
        spectrum,
        hits,
        rounds,
        misses,
        samples: source.drawn() - start,
    })
}
