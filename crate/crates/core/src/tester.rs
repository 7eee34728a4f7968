//! Tolerant identity testing with additive `ln(1/δ)` sample overhead.
//!
//! The statistic is the L1 distance between the empirical histogram and the
//! reference, `S_P(X) = Σ_i |X_i/m - P(i)|`, accepted as close when it is at
//! most `α + ε/2`.

use crate::dist::{DensePmf, DistError, SampleBatch};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TesterConfig {
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    /// `C` in `m = C·ε^-2·(s + ln(1/δ))`.
    pub sample_constant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Close,
    Far,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestVerdict {
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TesterError {
    #[error("tester needs {need} samples, got {have}")]
    TooFewSamples { have: usize, need: usize },
    #[error("invalid tester configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

impl TesterConfig {
    pub fn new(alpha: f64, eps: f64, delta: f64, sample_constant: f64) -> Result<Self, TesterError> {
        let cfg = TesterConfig {
            alpha,
            eps,
            delta,
            sample_constant,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TesterError> {
        let bad = |m: &str| Err(TesterError::BadConfig(m.into()));
        if !(self.alpha >= 0.0) {
            return bad("alpha must be nonnegative");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.alpha + self.eps > 2.0 {
            return bad("alpha + eps exceeds the largest possible L1 distance");
        }
        if !(self.sample_constant > 0.0) {
            return bad("sample constant must be positive");
        }
        Ok(())
    }

    /// `α + ε/2`.
    pub fn threshold(&self) -> f64 {
        self.alpha + self.eps / 2.0
    }
}

/// `ceil(C·ε^-2·(s + ln(1/δ)))`; a `1e-9` slack absorbs float noise at integers.
pub fn required_samples(cfg: &TesterConfig, s: usize) -> usize {
    let raw = cfg.sample_constant * (s as f64 + (1.0 / cfg.delta).ln()) / (cfg.eps * cfg.eps);
    (raw - 1e-9).ceil().max(1.0) as usize
}

/// `Σ_i |X_i/m - P(i)|` from cell counts.
pub fn l1_statistic(reference: &DensePmf, counts: &[i64]) -> f64 {
    let m: i64 = counts.iter().sum();
    let inv = 1.0 / m as f64;
    reference
        .probs()
        .iter()
        .zip(counts)
        .map(|(p, &x)| (x as f64 * inv - p).abs())
        .sum()
}

/// Runs the test on a histogram; the learner's path, which never
/// materializes projected points.
pub fn test_counts(reference: &DensePmf, counts: &[i64], cfg: &TesterConfig) -> Result<TestVerdict, TesterError> {
    cfg.validate()?;
    if counts.len() != reference.probs().len() {
        return Err(DistError::Cube(crate::boolcube::CubeError::DimensionMismatch {
            expected: reference.probs().len(),
            found: counts.len(),
        })
        .into());
    }
    let m: i64 = counts.iter().sum();
    let need = required_samples(cfg, counts.len());
    if (m as usize) < need {
        return Err(TesterError::TooFewSamples { have: m as usize, need });
    }
    let statistic = l1_statistic(reference, counts);
    let threshold = cfg.threshold();
    let verdict = if statistic <= threshold { Verdict::Close } else { Verdict::Far };
    Ok(TestVerdict {
        verdict,
        statistic,
        threshold,
    })
}

/// Tests whether the batch's source is within `α` of `reference` or at
/// least `α + ε` away.
pub fn tolerant_identity_test(
    reference: &DensePmf,
    batch: &SampleBatch,
    cfg: &TesterConfig,
) -> Result<TestVerdict, TesterError> {
    if batch.dim() != reference.dim() {
        return Err(DistError::Cube(crate::boolcube::CubeError::DimensionMismatch {
            expected: reference.dim(),
            found: batch.dim(),
        })
        .into());
    }
    let need = required_samples(cfg, reference.probs().len());
    if batch.len() < need {
        return Err(TesterError::TooFewSamples { have: batch.len(), need });
    }
    let all: Vec<usize> = (0..batch.dim()).collect();
    let mut counts = vec![0i64; reference.probs().len()];
    for p in batch.points() {
        counts[p.gather(&all)] += 1;
    }
    test_counts(reference, &counts, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcube::BitMask;
    use crate::dist::{l1_distance, PmfSampler, PointSampler, Rng};

    fn batch_of(d: usize, idx: &[u64]) -> SampleBatch {
        SampleBatch::new(d, idx.iter().map(|&x| BitMask::from_u64(d, x)).collect()).unwrap()
    }

    #[test]
    fn sample_size_arithmetic() {
        let c = TesterConfig::new(0.0, 1.0, (-1f64).exp(), 1.0).unwrap();
        assert_eq!(required_samples(&c, 1), 2);
        let c = TesterConfig::new(0.1, 0.2, 0.05, 3.0).unwrap();
        for s in [1, 4, 16, 64] {
            assert!(required_samples(&c, 2 * s) <= 2 * required_samples(&c, s));
        }
        let half = TesterConfig { delta: 0.025, ..c };
        let added = required_samples(&half, 16) as f64 - required_samples(&c, 16) as f64;
        let expect = 3.0 * 2f64.ln() / 0.04;
        assert!((added - expect).abs() <= 1.0);
    }

    #[test]
    fn balanced_batch_is_close() {
        let cfg = TesterConfig::new(0.1, 0.2, 0.05, 0.1).unwrap();
        let idx: Vec<u64> = (0..100).map(|i| i % 4).collect();
        let v = tolerant_identity_test(&DensePmf::uniform(2), &batch_of(2, &idx), &cfg).unwrap();
        assert_eq!(v.statistic, 0.0);
        assert_eq!(v.verdict, Verdict::Close);
    }

    #[test]
    fn constant_batch_is_far() {
        let cfg = TesterConfig::new(0.1, 0.2, 0.05, 0.1).unwrap();
        let v = tolerant_identity_test(&DensePmf::uniform(2), &batch_of(2, &[3; 100]), &cfg).unwrap();
        assert!((v.statistic - 1.5).abs() < 1e-12);
        assert_eq!(v.verdict, Verdict::Far);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let cfg = TesterConfig::new(0.0, 0.25, 0.05, 1.0).unwrap();
        let err = tolerant_identity_test(&DensePmf::uniform(2), &batch_of(2, &[0; 10]), &cfg).unwrap_err();
        assert!(matches!(err, TesterError::TooFewSamples { have: 10, .. }));
    }

    #[test]
    fn ties_resolve_to_close() {
        // statistic exactly 0.5: counts (3,1) against uniform over 2
        let cfg = TesterConfig::new(0.375, 0.25, 0.5, 1e-3).unwrap();
        let v = test_counts(&DensePmf::uniform(1), &[3, 1], &cfg).unwrap();
        assert_eq!(v.statistic, v.threshold);
        assert_eq!(v.verdict, Verdict::Close);
    }

    #[test]
    fn far_distribution_detected() {
        // uniform over 8 against a D at L1 distance 0.5
        let p = DensePmf::uniform(3);
        let mut q = vec![0.125; 8];
        q[0] += 0.125;
        q[1] += 0.125;
        q[2] -= 0.125;
        q[3] -= 0.125;
        let q = DensePmf::new(q).unwrap();
        assert!((l1_distance(&p, &q).unwrap() - 0.5).abs() < 1e-12);
        let cfg = TesterConfig::new(0.0, 0.25, 0.05, 1.0).unwrap();
        let m = required_samples(&cfg, 8);
        let src = PmfSampler::new(q);
        let rng = Rng::new(31);
        let far = (0..100)
            .filter(|&t| {
                let b = src.sample(&mut rng.child(t), m);
                tolerant_identity_test(&p, &b, &cfg).unwrap().verdict == Verdict::Far
            })
            .count();
        assert!(far >= 95, "{far}");
    }

    #[test]
    fn one_sample_moves_statistic_by_at_most_two_over_m() {
        let mut rng = Rng::new(32);
        let p = DensePmf::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for _ in 0..200 {
            let m = 1 + rng.below(30);
            let mut counts = vec![0i64; 4];
            for _ in 0..m {
                counts[rng.below(4)] += 1;
            }
            let before = l1_statistic(&p, &counts);
            let from = (0..4).find(|&i| counts[i] > 0).unwrap();
            let to = rng.below(4);
            counts[from] -= 1;
            counts[to] += 1;
            let after = l1_statistic(&p, &counts);
            assert!((after - before).abs() <= 2.0 / m as f64 + 1e-12);
        }
    }

    #[test]
    fn triangle_sandwich() {
        let mut rng = Rng::new(33);
        for _ in 0..200 {
            let mk = |rng: &mut Rng| {
                let w: Vec<f64> = (0..4).map(|_| rng.unit()).collect();
                let s: f64 = w.iter().sum();
                DensePmf::new(w.iter().map(|v| v / s).collect()).unwrap()
            };
            let p = mk(&mut rng);
            let d = mk(&mut rng);
            let m = 1 + rng.below(20);
            let mut counts = vec![0i64; 4];
            for _ in 0..m {
                counts[rng.below(4)] += 1;
            }
            let sp = l1_statistic(&p, &counts);
            let sd = l1_statistic(&d, &counts);
            let dist = l1_distance(&d, &p).unwrap();
            assert!((sp - dist).abs() <= sd + 1e-12);
        }
    }

    #[test]
    fn verdict_is_a_threshold_rule() {
        let cfg = TesterConfig::new(0.2, 0.4, 0.1, 1e-3).unwrap();
        let p = DensePmf::uniform(2);
        let mut rng = Rng::new(34);
        for _ in 0..200 {
            let counts: Vec<i64> = (0..4).map(|_| rng.below(10) as i64 + 1).collect();
            let v = test_counts(&p, &counts, &cfg).unwrap();
            assert_eq!(v.verdict == Verdict::Close, v.statistic <= v.threshold);
        }
    }

    #[test]
    fn expectation_bound_small() {
        let s = 16usize;
        let m = 10 * s;
        let mut rng = Rng::new(35);
        let p = DensePmf::uniform(4);
        let mut total = 0.0;
        for _ in 0..1000 {
            let mut counts = vec![0i64; s];
            for _ in 0..m {
                counts[rng.below(s)] += 1;
            }
            total += l1_statistic(&p, &counts);
        }
        assert!(total / 1000.0 <= 1.05 * (s as f64 / m as f64).sqrt());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(TesterConfig::new(-0.1, 0.2, 0.1, 1.0).is_err());
        assert!(TesterConfig::new(0.0, 0.0, 0.1, 1.0).is_err());
        assert!(TesterConfig::new(0.0, 0.2, 1.0, 1.0).is_err());
        assert!(TesterConfig::new(1.9, 0.2, 0.1, 1.0).is_err());
        assert!(TesterConfig::new(0.0, 0.2, 0.1, 0.0).is_err());
    }
}
