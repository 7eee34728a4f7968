//! Solving LPN with a junta distribution learner.
//!
//! Keeping the points labeled `+1` turns an LPN instance with secret `S`
//! into the distribution `(1-2η)·P + 2η·U`, where `P` is uniform on
//! `χ_S = 1`. Its density ratio is `1 + (1-2η)·χ_S(x)`, so thresholding a
//! learned evaluator at 1 gives a function close to `χ_S`, from which `S`
//! is read off with queries. Since `η` is unknown, the gap `g = 1 - 2η̄`
//! is halved until a candidate certifies with `I > 2g`.

use super::{find_parity_with_queries, query_trials, ReductionError};
use crate::boolcube::{BitMask, SubsetMask};
use crate::dist::{JuntaDistribution, LabeledSampleBatch, LabeledSource, PointSource, Rng, SampleBatch};
use crate::junta_learner::{learn_junta, LearnerConfig, LearnerConstants};

/// The points of a labeled stream whose label is `+1`.
pub struct FilteredSource<'a> {
    inner: &'a mut dyn LabeledSource,
    drawn: usize,
}

impl<'a> FilteredSource<'a> {
    pub fn new(inner: &'a mut dyn LabeledSource) -> Self {
        FilteredSource { inner, drawn: 0 }
    }
}

impl PointSource for FilteredSource<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn draw(&mut self, m: usize) -> SampleBatch {
        let n = self.inner.dim();
        let mut points = Vec::with_capacity(m);
        while points.len() < m {
            // about half the labels are +1
            let want = 2 * (m - points.len()) + 16;
            let b = self.inner.draw_labeled(want);
            for (x, &y) in b.points().iter().zip(b.labels()) {
                if y > 0 && points.len() < m {
                    points.push(x.clone());
                }
            }
        }
        self.drawn += m;
        SampleBatch::new(n, points).expect("points come from the inner stream")
    }

    fn drawn(&self) -> usize {
        self.drawn
    }
}

/// A learner for `k`-junta distributions returning an evaluator.
pub trait LjdLearner {
    fn learn(&mut self, source: &mut dyn PointSource, k: usize, accuracy: f64, rng: &mut Rng) -> Result<JuntaDistribution, ReductionError>;
}

/// [`learn_junta`] on a batch of exactly its sample budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JuntaLearnerOracle {
    pub constants: LearnerConstants,
}

impl LjdLearner for JuntaLearnerOracle {
    fn learn(&mut self, source: &mut dyn PointSource, k: usize, accuracy: f64, rng: &mut Rng) -> Result<JuntaDistribution, ReductionError> {
        let cfg = LearnerConfig::new(source.dim(), k, accuracy, &self.constants, rng.seed())?;
        let batch = source.draw(cfg.sample_budget.max(cfg.tester_samples()));
        Ok(learn_junta(&batch, &cfg)?.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpnToLjdOptions {
    /// Target disagreement of the rounded evaluator with `χ_S`; below 1/4.
    pub eps: f64,
    /// Smallest gap tried before giving up.
    pub min_gap: f64,
    /// `C` in the certification sample size `C·ln(1/δ)/g²`.
    pub cert_constant: f64,
    /// `C` in the per-coordinate vote count of query recovery.
    pub query_constant: f64,
    pub delta: f64,
}

/// `ceil(C·ln(1/δ)/g²)`.
pub fn certification_samples(c: f64, gap: f64, delta: f64) -> usize {
    (c * (1.0 / delta).ln() / (gap * gap)).ceil().max(1.0) as usize
}

/// `I_S = (1/m) Σ χ_S(x_i)·y_i`.
pub fn certification_statistic(batch: &LabeledSampleBatch, s: &SubsetMask) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    batch.columns().parity_sum_mask(s, Some(&batch.packed_labels())) as f64 / batch.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertRound {
    pub gap: f64,
    pub bar_eta: f64,
    /// Relevant set of the learned evaluator.
    pub learned: SubsetMask,
    pub candidate: SubsetMask,
    pub i_candidate: f64,
    pub i_empty: f64,
    /// `2g`.
    pub threshold: f64,
    pub certified: Option<SubsetMask>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpnToLjdRun {
    pub set: SubsetMask,
    pub rounds: Vec<CertRound>,
    pub samples: usize,
}

pub fn reduce_lpn_to_ljd(
    source: &mut dyn LabeledSource,
    k: usize,
    learner: &mut dyn LjdLearner,
    opts: &LpnToLjdOptions,
    rng: &mut Rng,
) -> Result<LpnToLjdRun, ReductionError> {
    if !(opts.eps > 0.0 && opts.eps < 0.25) {
        return Err(ReductionError::BadParameter(format!("eps must lie in (0, 1/4), got {}", opts.eps)));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(ReductionError::BadParameter(format!("delta must lie in (0, 1), got {}", opts.delta)));
    }
    let n = source.dim();
    let start = source.drawn();
    let empty = BitMask::zeros(n);
    let trials = query_trials(opts.query_constant, n, opts.delta, opts.eps);
    let mut rounds = Vec::new();
    let mut gap = 0.5;
    while gap >= opts.min_gap {
        let mut r = rng.child(rounds.len() as u64);
        let evaluator = {
            let mut filtered = FilteredSource::new(source);
            learner.learn(&mut filtered, k, opts.eps * gap, &mut r)?
        };
        let f = |x: &BitMask| if evaluator.density_ratio(x) >= 1.0 { 1 } else { -1 };
        let candidate = find_parity_with_queries(f, n, &mut r, trials);
        let batch = source.draw_labeled(certification_samples(opts.cert_constant, gap, opts.delta));
        let i_candidate = certification_statistic(&batch, &candidate);
        let i_empty = certification_statistic(&batch, &empty);
        let threshold = 2.0 * gap;
        let certified = if i_candidate > threshold {
            Some(candidate.clone())
        } else if i_empty > threshold {
            Some(empty.clone())
        } else {
            None
        };
        rounds.push(CertRound {
            gap,
            bar_eta: (1.0 - gap) / 2.0,
            learned: evaluator.relevant().clone(),
            candidate,
            i_candidate,
            i_empty,
            threshold,
            certified: certified.clone(),
        });
        if let Some(set) = certified {
            return Ok(LpnToLjdRun {
                set,
                rounds,
                samples: source.drawn() - start,
            });
        }
        gap /= 2.0;
    }
    Err(ReductionError::SearchExhausted {
        rounds: rounds.len(),
        gap: gap * 2.0,
    })
}
