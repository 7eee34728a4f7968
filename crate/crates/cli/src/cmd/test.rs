use std::time::Instant;

use serde::Serialize;

use junta_core::dist::{DensePmf, PmfSampler, Rng};
use junta_core::tester::{required_samples, tolerant_identity_test, TesterConfig, Verdict};

use super::{rate, run_trials, Output};
use crate::output::{millis, to_csv};
use crate::{CliError, Constants};

/// Tests `D` against the uniform reference on `2^d` cells, where `D` sits at
/// L1 distance `--distance` from it.
#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct TestConfig {
    /// Support size `s = 2^d`.
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// True L1 distance between `D` and the reference, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub distance: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Samples per trial; defaults to the tester's requirement.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestRecord {
    pub trial: u64,
    pub seed: u64,
    pub samples: usize,
    pub truth_l1: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: &'static str,
    /// Empty when the distance falls strictly between α and α + ε.
    pub expected: &'static str,
    pub correct: Option<bool>,
    pub wall_ms: u64,
}

/// Uniform on `s` cells shifted by `+dist/s` on even cells and `-dist/s` on
/// odd ones, so its L1 distance from uniform is exactly `dist`.
pub fn shifted_uniform(s: usize, dist: f64) -> Result<DensePmf, CliError> {
    if s < 2 || s % 2 != 0 || !(0.0..=1.0).contains(&dist) {
        return Err(CliError::Usage(format!("need even s >= 2 and distance in [0, 1], got s={s}, distance={dist}")));
    }
    let base = 1.0 / s as f64;
    let p = (0..s)
        .map(|i| if i % 2 == 0 { base * (1.0 + dist) } else { base * (1.0 - dist) })
        .collect();
    Ok(DensePmf::new(p)?)
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Close => "close",
        Verdict::Far => "far",
    }
}

pub fn records(cfg: &TestConfig, consts: &Constants) -> Result<Vec<TestRecord>, CliError> {
    if cfg.d == 0 || cfg.d > 20 {
        return Err(CliError::Usage(format!("d must lie in 1..=20, got {}", cfg.d)));
    }
    let s = 1usize << cfg.d;
    let tc = TesterConfig::new(cfg.alpha, cfg.eps, cfg.delta, consts.c_tester)?;
    let m = cfg.samples.unwrap_or_else(|| required_samples(&tc, s));
    let reference = DensePmf::uniform(cfg.d);
    let d = PmfSampler::new(shifted_uniform(s, cfg.distance)?);
    let truth_l1 = junta_core::dist::l1_distance(&reference, d.pmf())?;
    let expected = if truth_l1 <= cfg.alpha + 1e-12 {
        "close"
    } else if truth_l1 >= cfg.alpha + cfg.eps - 1e-12 {
        "far"
    } else {
        ""
    };
    let master = Rng::new(cfg.seed);
    run_trials(cfg.trials, |t| {
        let start = Instant::now();
        let seed = master.child_seed(t);
        let batch = junta_core::dist::sample(&d, &mut Rng::new(seed), m);
        let v = tolerant_identity_test(&reference, &batch, &tc)?;
        let verdict = verdict_name(v.verdict);
        Ok(TestRecord {
            trial: t,
            seed,
            samples: m,
            truth_l1,
            statistic: v.statistic,
            threshold: v.threshold,
            verdict,
            expected,
            correct: (!expected.is_empty()).then_some(verdict == expected),
            wall_ms: millis(start.elapsed()),
        })
    })
}

pub fn run(cfg: &TestConfig, consts: &Constants) -> Result<Output, CliError> {
    let recs = records(cfg, consts)?;
    let judged: Vec<bool> = recs.iter().filter_map(|r| r.correct).collect();
    let ok = judged.iter().filter(|&&c| c).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: None,
        rate: (!judged.is_empty()).then(|| rate(ok, judged.len())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_uniform_distance() {
        for (s, dist) in [(2, 0.0), (8, 0.5), (16, 0.25), (64, 1.0)] {
            let p = shifted_uniform(s, dist).unwrap();
            let l1 = junta_core::dist::l1_distance(&p, &DensePmf::uniform(s.trailing_zeros() as usize)).unwrap();
            assert!((l1 - dist).abs() < 1e-12);
        }
        assert!(shifted_uniform(3, 0.1).is_err());
        assert!(shifted_uniform(4, 1.5).is_err());
    }
}
