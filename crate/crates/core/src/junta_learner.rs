//! Proper learner for k-junta distributions.
//!
//! Grows a set `N` of coordinates known to be relevant. Each pass tests every
//! size-`k` superset `S ⊇ N` of the current hypothesis `Q`; the first `S`
//! where the sample marginal is far from `Q|_S` has its spectrum learned,
//! the heavy sets are merged into `N`, and `Q` is relearned on `N`.

use rayon::prelude::*;

use crate::boolcube::{enumerate_ksubsets, BitColumns, BitMask, CellCounter, CubeError, SubsetMask, MAX_DENSE_DIM};
use crate::dist::{DensePmf, DistError, JuntaDistribution, SampleBatch};
use crate::fourier_learn::{learn_fourier_from_counts, FourierError};
use crate::tester::{l1_statistic, required_samples, TesterConfig, TesterError};

const SCAN_CHUNK: usize = 4096;

/// Sample-size constants of the learner and its two subroutines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerConstants {
    pub tester: f64,
    pub fourier: f64,
    pub learner: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub master_seed: u64,
    /// `(2ε, 3ε)`-tolerant, failure probability `n^-2k`.
    pub tester: TesterConfig,
    /// `ε·2^{-k/2}`; also the heavy-set threshold.
    pub fourier_eps: f64,
    pub fourier_delta: f64,
    pub fourier_constant: f64,
    pub sample_budget: usize,
    /// When false, sample-size preconditions are skipped so the learner can
    /// be run below its budget to measure where it actually breaks.
    pub enforce_budget: bool,
}

/// `ceil(C·(k/ε²)·(2^k + ln n))`.
pub fn learner_budget(c: f64, n: usize, k: usize, eps: f64) -> usize {
    let raw = c * (k as f64 / (eps * eps)) * ((k as f64).exp2() + (n as f64).ln());
    (raw - 1e-9).ceil().max(1.0) as usize
}

impl LearnerConfig {
    pub fn new(n: usize, k: usize, eps: f64, consts: &LearnerConstants, master_seed: u64) -> Result<Self, LearnerError> {
        if k == 0 || k > n {
            return Err(LearnerError::BadParameter(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        if k > MAX_DENSE_DIM {
            return Err(CubeError::DimensionTooLarge { d: k, max: MAX_DENSE_DIM }.into());
        }
        if !(eps > 0.0 && 3.0 * eps <= 2.0) {
            return Err(LearnerError::BadParameter(format!("eps must lie in (0, 2/3], got {eps}")));
        }
        // n^-2k, floored so that n = 1 stays a valid probability
        let tester_delta = (-2.0 * k as f64 * (n.max(2) as f64).ln()).exp();
        let tester = TesterConfig::new(2.0 * eps, eps, tester_delta, consts.tester)?;
        let fourier_delta = (1.0 / (k * k) as f64).min(0.25);
        Ok(LearnerConfig {
            n,
            k,
            eps,
            master_seed,
            tester,
            fourier_eps: eps * (-(k as f64) / 2.0).exp2(),
            fourier_delta,
            fourier_constant: consts.fourier,
            sample_budget: learner_budget(consts.learner, n, k, eps),
            enforce_budget: true,
        })
    }

    /// Samples the tester needs on a `k`-dimensional marginal.
    pub fn tester_samples(&self) -> usize {
        required_samples(&self.tester, 1 << self.k)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnerError {
    #[error("learner needs {need} samples, got {have}")]
    TooFewSamples { have: usize, need: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Tester(#[from] TesterError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// The far witness `S`.
    pub witness: SubsetMask,
    /// Position of the witness in enumeration order.
    pub witness_index: u64,
    /// Tester calls made in this pass, up to and including the witness.
    pub tester_calls: u64,
    pub statistic: f64,
    pub n_before: SubsetMask,
    pub n_after: SubsetMask,
    /// Sets `A ⊆ S` whose learned coefficient cleared the threshold.
    pub heavy: Vec<SubsetMask>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerTrace {
    pub iterations: Vec<IterationRecord>,
    /// Returned after a pass with no far witness.
    pub early_return: bool,
    pub tester_calls: u64,
    pub fourier_calls: u64,
    pub samples: usize,
    /// Union bound on the failure probability of all subroutine calls made.
    pub failure_mass: f64,
}

impl LearnerTrace {
    /// Whether `|N|` grew on every recorded iteration.
    pub fn n_strictly_grows(&self) -> bool {
        self.iterations.iter().all(|it| it.n_after.count_ones() > it.n_before.count_ones())
    }

    /// Whether `N` stayed inside `truth` on every iteration.
    pub fn n_within(&self, truth: &SubsetMask) -> bool {
        self.iterations.iter().all(|it| it.n_after.is_subset_of(truth))
    }
}

struct Witness {
    index: u64,
    coords: Vec<usize>,
    statistic: f64,
}

/// Tests `Q|_S` against the sample marginal for every size-`k` `S ⊇ N`;
/// returns the first far `S` in enumeration order and the number of tests.
fn scan(cols: &BitColumns, cfg: &LearnerConfig, n_set: &SubsetMask, q: &JuntaDistribution) -> Result<(Option<Witness>, u64), LearnerError> {
    let mut subsets = enumerate_ksubsets(cfg.n, cfg.k, n_set)?;
    let total = subsets.total() as u64;
    let threshold = cfg.tester.threshold();

    let mut done = false;
    let mut offset = 0u64;
    let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(SCAN_CHUNK);
    while !done {
        chunk.clear();
        while chunk.len() < SCAN_CHUNK {
            match subsets.next_coords() {
                Some(s) => chunk.push(s),
                None => {
                    done = true;
                    break;
                }
            }
        }
        let hit = chunk
            .par_iter()
            .map_init(CellCounter::new, |counter, s| {
                let counts = counter.counts(cols, s);
                let reference = q.marginal_coords(s);
                l1_statistic(&reference, counts)
            })
            .map(|stat| (stat > threshold).then_some(stat))
            .collect::<Vec<_>>();
        if let Some(pos) = hit.iter().position(|h| h.is_some()) {
            return Ok((
                Some(Witness {
                    index: offset + pos as u64,
                    coords: chunk[pos].clone(),
                    statistic: hit[pos].expect("far"),
                }),
                offset + pos as u64 + 1,
            ));
        }
        offset += chunk.len() as u64;
    }
    debug_assert_eq!(offset, total);
    Ok((None, offset))
}

fn learn_core(cols: &BitColumns, coords: &[usize], cfg: &LearnerConfig, counter: &mut CellCounter) -> Result<DensePmf, LearnerError> {
    let counts = counter.counts(cols, coords);
    if cfg.enforce_budget {
        Ok(learn_fourier_from_counts(counts, coords.len(), cfg.fourier_eps, cfg.fourier_delta, cfg.fourier_constant)?)
    } else {
        Ok(DensePmf::from_counts(counts)?)
    }
}

/// Learns a junta distribution from one batch. Every tester and Fourier
/// call reuses the same samples.
pub fn learn_junta(batch: &SampleBatch, cfg: &LearnerConfig) -> Result<(JuntaDistribution, LearnerTrace), LearnerError> {
    if batch.dim() != cfg.n {
        return Err(CubeError::DimensionMismatch {
            expected: cfg.n,
            found: batch.dim(),
        }
        .into());
    }
    let m = batch.len();
    if cfg.enforce_budget {
        if m < cfg.sample_budget {
            return Err(LearnerError::TooFewSamples {
                have: m,
                need: cfg.sample_budget,
            });
        }
        let need = cfg.tester_samples();
        if m < need {
            return Err(TesterError::TooFewSamples { have: m, need }.into());
        }
    }
    if m == 0 {
        return Err(DistError::EmptyBatch.into());
    }
    let cols = batch.columns();
    learn_from_columns(&cols, cfg)
}

/// [`learn_junta`] on a column-major batch.
pub fn learn_from_columns(cols: &BitColumns, cfg: &LearnerConfig) -> Result<(JuntaDistribution, LearnerTrace), LearnerError> {
    let n = cfg.n;
    let k = cfg.k;
    let mut counter = CellCounter::new();
    let mut n_set = BitMask::zeros(n);
    let mut q = JuntaDistribution::uniform(n);
    let mut trace = LearnerTrace {
        iterations: Vec::new(),
        early_return: false,
        tester_calls: 0,
        fourier_calls: 0,
        samples: cols.len(),
        failure_mass: 0.0,
    };
    let heavy_threshold = cfg.fourier_eps;

    for _ in 0..k {
        if n_set.count_ones() == k {
            break;
        }
        let (witness, calls) = scan(cols, cfg, &n_set, &q)?;
        trace.tester_calls += calls;
        let Some(w) = witness else {
            trace.early_return = true;
            break;
        };
        let r = learn_core(cols, &w.coords, cfg, &mut counter)?;
        trace.fourier_calls += 1;
        let spectrum = r.bias_spectrum();
        let n_before = n_set.clone();
        let mut heavy = Vec::new();
        for a in 1..1usize << k {
            if spectrum.get(a).abs() > heavy_threshold {
                let set = BitMask::scatter(n, &w.coords, a);
                n_set = n_set.or(&set);
                heavy.push(set);
            }
        }
        let witness_mask = BitMask::from_indices(n, w.coords.iter().copied())?;
        if n_set != n_before {
            let coords = n_set.indices();
            let core = learn_core(cols, &coords, cfg, &mut counter)?;
            trace.fourier_calls += 1;
            q = JuntaDistribution::new(n, n_set.clone(), core)?;
        }
        trace.iterations.push(IterationRecord {
            witness: witness_mask,
            witness_index: w.index,
            tester_calls: calls,
            statistic: w.statistic,
            n_before,
            n_after: n_set.clone(),
            heavy,
        });
    }
    trace.failure_mass = trace.tester_calls as f64 * cfg.tester.delta + trace.fourier_calls as f64 * cfg.fourier_delta;
    Ok((q, trace))
}
