//! Fourier-side estimators in normalized form (`c(A) = E[χ_A]`).

use crate::boolcube::{BitColumns, SubsetMask};
use crate::dist::{DensePmf, DistError, PointSource, SampleBatch};

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientEstimate {
    pub set: SubsetMask,
    pub c_hat: f64,
    /// Claimed additive accuracy of `c_hat`.
    pub half_width: f64,
}

/// One round of the exponential search over the noise rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSearchState {
    pub bar_eta: f64,
    /// `1 - 2·bar_eta`.
    pub gap: f64,
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FourierError {
    #[error("Fourier learner needs {need} samples, got {have}")]
    TooFewSamples { have: usize, need: usize },
    #[error("no candidate cleared the threshold after {rounds} rounds")]
    NoCandidate { rounds: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

fn check_unit(name: &str, v: f64) -> Result<(), FourierError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(FourierError::BadParameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// `ceil(C·ε^-2·(k + ln(1/δ)))` samples for normalized sup-accuracy `ε`
/// over all `2^k` coefficients.
pub fn fourier_required_samples(c: f64, k: usize, eps: f64, delta: f64) -> usize {
    let raw = c * (k as f64 + (1.0 / delta).ln()) / (eps * eps);
    (raw - 1e-9).ceil().max(1.0) as usize
}

/// Learns a distribution over `{±1}^k` whose every normalized coefficient
/// is within `eps` of the truth. The empirical histogram already has the
/// empirical coefficients as its spectrum and is a pmf, so it is returned
/// as is.
pub fn learn_fourier_coefficients(batch: &SampleBatch, eps: f64, delta: f64, c: f64) -> Result<DensePmf, FourierError> {
    check_unit("delta", delta)?;
    let need = fourier_required_samples(c, batch.dim(), eps, delta);
    if batch.len() < need {
        return Err(FourierError::TooFewSamples { have: batch.len(), need });
    }
    Ok(batch.empirical_pmf()?)
}

/// Same as [`learn_fourier_coefficients`] from a projected histogram.
pub fn learn_fourier_from_counts(counts: &[i64], k: usize, eps: f64, delta: f64, c: f64) -> Result<DensePmf, FourierError> {
    check_unit("delta", delta)?;
    let m: i64 = counts.iter().sum();
    let need = fourier_required_samples(c, k, eps, delta);
    if (m as usize) < need {
        return Err(FourierError::TooFewSamples { have: m as usize, need });
    }
    Ok(DensePmf::from_counts(counts)?)
}

/// Hoeffding half-width for a mean of `m` signs at confidence `1-δ`.
pub fn hoeffding_half_width(m: usize, delta: f64) -> f64 {
    if m == 0 {
        return f64::INFINITY;
    }
    (2.0 * (2.0 / delta).ln() / m as f64).sqrt()
}

/// Samples for a Hoeffding half-width of `eps`: `ceil(2 ln(2/δ) / ε²)`.
pub fn hoeffding_samples(eps: f64, delta: f64) -> usize {
    (2.0 * (2.0 / delta).ln() / (eps * eps)).ceil() as usize
}

/// `c_hat = (1/m) Σ χ_J(x_i)` with its Hoeffding half-width.
pub fn estimate_single_coefficient(batch: &SampleBatch, j: &SubsetMask, delta: f64) -> CoefficientEstimate {
    estimate_from_columns(&batch.columns(), j, delta)
}

pub fn estimate_from_columns(cols: &BitColumns, j: &SubsetMask, delta: f64) -> CoefficientEstimate {
    let m = cols.len();
    let c_hat = if m == 0 {
        0.0
    } else {
        cols.parity_sum_mask(j, None) as f64 / m as f64
    };
    CoefficientEstimate {
        set: j.clone(),
        c_hat,
        half_width: hoeffding_half_width(m, delta),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSearchOptions {
    /// `C` in the per-round sample size.
    pub sample_constant: f64,
    /// Search gives up once the gap falls below this.
    pub min_gap: f64,
    /// Search gives up rather than draw more than this in one round.
    pub max_round_samples: usize,
}

impl Default for NoiseSearchOptions {
    fn default() -> Self {
        NoiseSearchOptions {
            sample_constant: 1.0,
            min_gap: (-40f64).exp2(),
            max_round_samples: usize::MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSearch {
    pub set: SubsetMask,
    pub estimates: Vec<CoefficientEstimate>,
    pub rounds: Vec<NoiseSearchState>,
    pub samples: usize,
}

impl CandidateSearch {
    pub fn winner(&self) -> &CoefficientEstimate {
        self.estimates.iter().find(|e| e.set == self.set).expect("winner is among the estimates")
    }
}

/// Per-round sample size `C·s·ε^-2·g^-2·ln(s/δ)`.
pub fn noise_round_samples(c: f64, s: usize, eps: f64, gap: f64, delta: f64) -> f64 {
    let s = s as f64;
    c * s * (s / delta).ln().max(1.0) / (eps * eps * gap * gap)
}

/// Estimates the candidates' coefficients without knowing the noise rate.
///
/// The gap `g = 1 - 2η̄` starts at `1/2` and halves each round; each round
/// draws fresh samples sized for accuracy `ε·g`. The search stops once some
/// `||ŷ_i| - ε·g| ≥ g` and returns the largest `|ŷ_i|` above `ε·g`.
pub fn estimate_candidates_unknown_noise(
    source: &mut dyn PointSource,
    candidates: &[SubsetMask],
    eps: f64,
    delta: f64,
    opts: &NoiseSearchOptions,
) -> Result<CandidateSearch, FourierError> {
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    if candidates.is_empty() {
        return Err(FourierError::NoCandidate { rounds: 0 });
    }
    let s = candidates.len();
    let coords: Vec<Vec<usize>> = candidates.iter().map(|c| c.indices()).collect();
    let mut rounds = Vec::new();
    let mut samples = 0;
    let mut gap = 0.5;
    while gap >= opts.min_gap {
        let m = noise_round_samples(opts.sample_constant, s, eps, gap, delta).ceil();
        if m > opts.max_round_samples as f64 {
            break;
        }
        let m = m as usize;
        rounds.push(NoiseSearchState {
            bar_eta: (1.0 - gap) / 2.0,
            gap,
            round: rounds.len() + 1,
        });
        let batch = source.draw(m);
        samples += m;
        let cols = batch.columns();
        let y: Vec<f64> = coords
            .iter()
            .map(|c| cols.parity_sum(c, None) as f64 / m as f64)
            .collect();
        let bar = eps * gap;
        if y.iter().any(|v| (v.abs() - bar).abs() >= gap) {
            let best = (0..s)
                .filter(|&i| y[i].abs() > bar)
                .fold(None::<usize>, |acc, i| match acc {
                    Some(b) if y[b].abs() >= y[i].abs() => Some(b),
                    _ => Some(i),
                });
            if let Some(b) = best {
                let estimates = candidates
                    .iter()
                    .zip(&y)
                    .map(|(c, &v)| CoefficientEstimate {
                        set: c.clone(),
                        c_hat: v,
                        half_width: bar,
                    })
                    .collect();
                return Ok(CandidateSearch {
                    set: candidates[b].clone(),
                    estimates,
                    rounds,
                    samples,
                });
            }
        }
        gap /= 2.0;
    }
    Err(FourierError::NoCandidate { rounds: rounds.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcube::BitMask;
    use crate::dist::{NoisyParityDistribution, PointSampler, Rng, SamplerSource, UniformSampler};

    #[test]
    fn point_mass_and_balanced_batches() {
        let ones = SampleBatch::new(2, vec![BitMask::zeros(2); 500]).unwrap();
        let q = learn_fourier_coefficients(&ones, 0.5, 0.25, 1.0).unwrap();
        assert!(q.bias_spectrum().values().iter().all(|&c| c == 1.0));
        let bal = SampleBatch::new(2, (0..500).map(|i| BitMask::from_u64(2, i % 4)).collect()).unwrap();
        let q = learn_fourier_coefficients(&bal, 0.5, 0.25, 1.0).unwrap();
        assert_eq!(q.bias_spectrum().values(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn output_is_the_empirical_histogram() {
        let d = NoisyParityDistribution::new(3, BitMask::ones(3), 1, 0.2).unwrap();
        let b = d.sample(&mut Rng::new(1), 3000);
        let q = learn_fourier_coefficients(&b, 0.1, 0.1, 1.0).unwrap();
        assert_eq!(q, b.empirical_pmf().unwrap());
        assert!(q.bias_spectrum().values().iter().all(|c| c.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn too_small_batch_errors() {
        let b = SampleBatch::new(2, vec![BitMask::zeros(2); 10]).unwrap();
        assert!(matches!(
            learn_fourier_coefficients(&b, 0.1, 0.05, 1.0),
            Err(FourierError::TooFewSamples { have: 10, .. })
        ));
    }

    #[test]
    fn parity_coefficient_learned() {
        let d = NoisyParityDistribution::new(2, BitMask::ones(2), 1, 0.0).unwrap();
        let m = fourier_required_samples(1.0, 2, 0.1, 0.05);
        let rng = Rng::new(2);
        let ok = (0..100)
            .filter(|&t| {
                let b = d.sample(&mut rng.child(t), m);
                let q = learn_fourier_coefficients(&b, 0.1, 0.05, 1.0).unwrap();
                (q.bias_spectrum().get(3) - 1.0).abs() <= 0.1
            })
            .count();
        assert!(ok >= 95);
    }

    #[test]
    fn sup_fourier_closeness_bounds_l1() {
        // A pmf pair whose normalized spectra differ by exactly t on every
        // nonempty set; L1 is then bounded by t·2^{k/2}.
        let mut rng = Rng::new(3);
        for k in 1..=8usize {
            let len = 1usize << k;
            for _ in 0..5 {
                let eps = 0.3 * rng.unit() + 0.01;
                let t = eps * (-(k as f64) / 2.0).exp2();
                let base = DensePmf::uniform(k);
                let mut c = base.bias_spectrum().values().to_vec();
                for (a, v) in c.iter_mut().enumerate().skip(1) {
                    *v += if (a * 2654435761) % 3 == 0 { -t } else { t };
                }
                let vals = crate::dist::BiasSpectrum::new(c).unwrap().to_values();
                if vals.iter().any(|&v| v < 0.0) {
                    continue;
                }
                let other = DensePmf::new(vals).unwrap();
                let sup = other
                    .bias_spectrum()
                    .values()
                    .iter()
                    .zip(base.bias_spectrum().values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(sup <= t + 1e-12);
                let l1 = crate::dist::l1_distance(&other, &base).unwrap();
                assert!(l1 <= eps + 1e-12, "k={k} l1={l1} eps={eps} len={len}");
            }
        }
    }

    #[test]
    fn single_coefficient_examples() {
        let b = SampleBatch::new(5, vec![BitMask::zeros(5); 50]).unwrap();
        let e = estimate_single_coefficient(&b, &BitMask::from_u64(5, 0b10110), 0.05);
        assert_eq!(e.c_hat, 1.0);
        assert!(e.half_width > 0.0);
        let rng = Rng::new(4);
        let m = hoeffding_samples(0.05, 0.05);
        let j = BitMask::from_u64(5, 0b00011);
        let ok = (0..100)
            .filter(|&t| {
                let b = UniformSampler(5).sample(&mut rng.child(t), m);
                estimate_single_coefficient(&b, &j, 0.05).c_hat.abs() <= 0.05
            })
            .count();
        assert!(ok >= 95);
        let d = NoisyParityDistribution::new(5, j.clone(), 1, 0.25).unwrap();
        let b = d.sample(&mut Rng::new(5), m);
        let e = estimate_single_coefficient(&b, &j, 0.05);
        assert!((e.c_hat - 0.5).abs() <= 0.05);
    }

    #[test]
    fn noiseless_parity_found_in_first_round() {
        let n = 8;
        let truth = BitMask::from_indices(n, [1, 5]).unwrap();
        let other = BitMask::from_indices(n, [2]).unwrap();
        let d = NoisyParityDistribution::new(n, truth.clone(), -1, 0.0).unwrap();
        let mut src = SamplerSource::new(d, Rng::new(6));
        let out = estimate_candidates_unknown_noise(&mut src, &[other, truth.clone()], 0.2, 0.05, &NoiseSearchOptions::default())
            .unwrap();
        assert_eq!(out.set, truth);
        assert_eq!(out.rounds.len(), 1);
        assert!((out.winner().c_hat + 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_source_gives_no_candidate() {
        let n = 6;
        let mut src = SamplerSource::new(UniformSampler(n), Rng::new(7));
        let opts = NoiseSearchOptions {
            min_gap: 1.0 / 64.0,
            ..Default::default()
        };
        let cands = [BitMask::from_u64(n, 3), BitMask::from_u64(n, 12)];
        let err = estimate_candidates_unknown_noise(&mut src, &cands, 0.25, 0.05, &opts).unwrap_err();
        assert!(matches!(err, FourierError::NoCandidate { .. }));
    }

    #[test]
    fn heavy_noise_search_halts_early() {
        let n = 8;
        let j = BitMask::from_indices(n, [0, 3, 4]).unwrap();
        let other = BitMask::from_indices(n, [0, 3]).unwrap();
        let d = NoisyParityDistribution::new(n, j.clone(), -1, 0.375).unwrap();
        let eps = 0.2;
        let master = Rng::new(8);
        let mut ok = 0;
        for t in 0..100 {
            let mut src = SamplerSource::new(d.clone(), master.child(t));
            let out = estimate_candidates_unknown_noise(&mut src, &[j.clone(), other.clone()], eps, 0.05, &Default::default())
                .unwrap();
            let last = out.rounds.last().unwrap();
            assert!(out.rounds.len() <= 3);
            assert!(last.gap >= 0.125);
            if out.set == j && (out.winner().c_hat + 0.25).abs() <= 0.25 * eps {
                ok += 1;
            }
        }
        assert!(ok >= 90, "{ok}");
    }
}
