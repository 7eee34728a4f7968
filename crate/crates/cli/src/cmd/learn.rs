use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use junta_core::dist::{DistSpec, Rng};
use junta_core::junta_learner::{learn_junta, LearnerConfig};

use super::{rate, read_spec, run_trials, Output};
use crate::output::{millis, set_string, to_csv};
use crate::plant::{plant, PlantKind};
use crate::{CliError, Constants};

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct LearnConfig {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = PlantKind::NoisyParity)]
    pub plant: PlantKind,
    /// Noise rate of noisy-parity plants.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Learn this fixed distribution instead of a fresh plant per trial.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Samples per trial; defaults to the learner budget.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Skip the budget and Fourier sample-size checks, as the bench does.
    #[arg(long)]
    pub measure: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnRecord {
    pub trial: u64,
    pub seed: u64,
    pub truth: String,
    pub learned: String,
    pub samples: usize,
    pub budget: usize,
    pub l1: f64,
    pub tv: f64,
    pub success: bool,
    pub n_within: bool,
    pub strict_growth: bool,
    pub iterations: usize,
    pub early_return: bool,
    pub tester_calls: u64,
    pub fourier_calls: u64,
    pub failure_mass: f64,
    pub wall_ms: u64,
}

/// One seeded learning trial against `truth`; shared with the bench sweep.
pub fn trial(truth: &DistSpec, m: usize, cfg: &LearnerConfig, trial: u64, seed: u64, rng: &mut Rng) -> Result<LearnRecord, CliError> {
    let start = Instant::now();
    let exact = truth.to_junta()?;
    let batch = truth.sample(rng, m);
    let (q, trace) = learn_junta(&batch, cfg)?;
    let l1 = q.l1_to(&exact)?;
    Ok(LearnRecord {
        trial,
        seed,
        truth: set_string(exact.relevant()),
        learned: set_string(q.relevant()),
        samples: m,
        budget: cfg.sample_budget,
        l1,
        tv: l1 / 2.0,
        success: l1 <= 2.0 * cfg.eps,
        n_within: trace.n_within(exact.relevant()),
        strict_growth: trace.n_strictly_grows(),
        iterations: trace.iterations.len(),
        early_return: trace.early_return,
        tester_calls: trace.tester_calls,
        fourier_calls: trace.fourier_calls,
        failure_mass: trace.failure_mass,
        wall_ms: millis(start.elapsed()),
    })
}

pub fn records(cfg: &LearnConfig, consts: &Constants) -> Result<Vec<LearnRecord>, CliError> {
    let fixed = cfg.spec.as_deref().map(read_spec).transpose()?;
    let n = fixed.as_ref().map_or(cfg.n, |s| s.dim());
    let mut base = LearnerConfig::new(n, cfg.k, cfg.eps, &consts.learner(), cfg.seed)?;
    base.enforce_budget = !cfg.measure;
    let m = cfg.samples.unwrap_or(base.sample_budget);
    let master = Rng::new(cfg.seed);
    run_trials(cfg.trials, |t| {
        let seed = master.child_seed(t);
        let r = Rng::new(seed);
        let truth = match &fixed {
            Some(s) => s.clone(),
            None => plant(cfg.plant, n, cfg.k, cfg.eta, &mut r.child(0))?,
        };
        let mut lc = base.clone();
        lc.master_seed = seed;
        trial(&truth, m, &lc, t, seed, &mut r.child(1))
    })
}

pub fn run(cfg: &LearnConfig, consts: &Constants) -> Result<Output, CliError> {
    let recs = records(cfg, consts)?;
    let ok = recs.iter().filter(|r| r.success).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: None,
        rate: Some(rate(ok, recs.len())),
    })
}
