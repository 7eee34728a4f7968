use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use junta_core::dist::{DistSpec, Rng};
use junta_core::junta_learner::{learner_budget, LearnerConfig};

use super::learn::trial;
use super::Output;
use crate::output::{millis, to_csv};
use crate::plant::{plant, PlantKind};
use crate::{CliError, Constants};

fn list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|p| p.trim().parse().map_err(|_| CliError::Usage(format!("bad list entry {p:?}"))))
        .collect()
}

/// Minimal sample size reaching the target success rate, for every point of
/// the grid `ns × ks × epss`.
#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct BenchConfig {
    #[arg(long, default_value = "16,64,256,1024")]
    pub ns: String,
    #[arg(long, default_value = "2")]
    pub ks: String,
    #[arg(long, default_value = "0.2")]
    pub epss: String,
    #[arg(long, value_enum, default_value_t = PlantKind::NoisyParity)]
    pub plant: PlantKind,
    /// Noise rate of noisy-parity plants. Defaults to `(1-3ε)/2`, which puts
    /// the plant at L1 distance exactly `3ε` from uniform, the far edge of
    /// the learner's tester.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.9)]
    pub target: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub eta: f64,
    pub trials: usize,
    pub m_min: usize,
    pub rate: f64,
    pub budget: usize,
    /// Sample sizes tried during the search.
    pub evaluations: usize,
    pub wall_ms: u64,
}

struct Point<'a> {
    plants: Vec<DistSpec>,
    seeds: Vec<u64>,
    cfg: LearnerConfig,
    allowed_failures: usize,
    evaluations: usize,
    bench: &'a BenchConfig,
}

const CHUNK: usize = 8;

impl Point<'_> {
    fn success(&self, t: usize, m: usize) -> Result<bool, CliError> {
        let mut lc = self.cfg.clone();
        lc.master_seed = self.seeds[t];
        let mut r = Rng::new(self.seeds[t]).child(1);
        Ok(trial(&self.plants[t], m, &lc, t as u64, self.seeds[t], &mut r)?.success)
    }

    /// Whether at least the target fraction of trials succeeds with `m`
    /// samples. Stops early once too many have failed.
    fn passes(&mut self, m: usize) -> Result<bool, CliError> {
        self.evaluations += 1;
        let mut failures = 0;
        for start in (0..self.bench.trials).step_by(CHUNK) {
            let end = (start + CHUNK).min(self.bench.trials);
            let ok: Vec<bool> = (start..end).into_par_iter().map(|t| self.success(t, m)).collect::<Result<_, _>>()?;
            failures += ok.iter().filter(|&&s| !s).count();
            if failures > self.allowed_failures {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn rate(&self, m: usize) -> Result<f64, CliError> {
        let ok: Vec<bool> = (0..self.bench.trials).into_par_iter().map(|t| self.success(t, m)).collect::<Result<_, _>>()?;
        Ok(ok.iter().filter(|&&s| s).count() as f64 / self.bench.trials as f64)
    }
}

pub fn far_edge_eta(eps: f64) -> f64 {
    ((1.0 - 3.0 * eps) / 2.0).max(0.0)
}

const MAX_SAMPLES: usize = 1 << 26;

/// Doubling to bracket the threshold, then bisection down to 1% of `m`.
fn minimal_m(p: &mut Point) -> Result<usize, CliError> {
    let mut lo = 0;
    let mut hi = 32;
    while !p.passes(hi)? {
        lo = hi;
        hi *= 2;
        if hi > MAX_SAMPLES {
            return Err(CliError::Contract(format!("no sample size up to {MAX_SAMPLES} reaches the target")));
        }
    }
    while hi - lo > (hi / 100).max(1) {
        let mid = lo + (hi - lo) / 2;
        if p.passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn records(cfg: &BenchConfig, consts: &Constants) -> Result<Vec<BenchRecord>, CliError> {
    if !(cfg.target > 0.0 && cfg.target <= 1.0) || cfg.trials == 0 {
        return Err(CliError::Usage("need target in (0, 1] and at least one trial".into()));
    }
    let ns: Vec<usize> = list(&cfg.ns)?;
    let ks: Vec<usize> = list(&cfg.ks)?;
    let epss: Vec<f64> = list(&cfg.epss)?;
    let allowed_failures = ((1.0 - cfg.target) * cfg.trials as f64 + 1e-9).floor() as usize;
    let mut out = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (ei, &eps) in epss.iter().enumerate() {
            let eta = cfg.eta.unwrap_or_else(|| far_edge_eta(eps));
            for (ni, &n) in ns.iter().enumerate() {
                let start = Instant::now();
                let mut lc = LearnerConfig::new(n, k, eps, &consts.learner(), cfg.seed)?;
                lc.enforce_budget = false;
                let grid = Rng::new(cfg.seed).child(((ki * epss.len() + ei) * ns.len() + ni) as u64);
                let seeds: Vec<u64> = (0..cfg.trials as u64).map(|t| grid.child_seed(t)).collect();
                let plants = seeds
                    .iter()
                    .map(|&s| plant(cfg.plant, n, k, eta, &mut Rng::new(s).child(0)))
                    .collect::<Result<_, _>>()?;
                let mut p = Point {
                    plants,
                    seeds,
                    cfg: lc,
                    allowed_failures,
                    evaluations: 0,
                    bench: cfg,
                };
                let m_min = minimal_m(&mut p)?;
                out.push(BenchRecord {
                    n,
                    k,
                    eps,
                    eta,
                    trials: cfg.trials,
                    m_min,
                    rate: p.rate(m_min)?,
                    budget: learner_budget(consts.c_learner, n, k, eps),
                    evaluations: p.evaluations,
                    wall_ms: millis(start.elapsed()),
                });
            }
        }
    }
    Ok(out)
}

/// For each `(k, ε)` curve: `m(n_max) - m(n_min) ≤ 1.5·C·(k/ε²)·ln(n_max/n_min)`.
pub fn additive_shape(recs: &[BenchRecord], c_learner: f64) -> Vec<(usize, f64, f64, f64)> {
    let mut out = Vec::new();
    let mut keys: Vec<(usize, f64)> = recs.iter().map(|r| (r.k, r.eps)).collect();
    keys.dedup();
    for (k, eps) in keys {
        let curve: Vec<&BenchRecord> = recs.iter().filter(|r| r.k == k && r.eps == eps).collect();
        let lo = curve.iter().min_by_key(|r| r.n).expect("nonempty");
        let hi = curve.iter().max_by_key(|r| r.n).expect("nonempty");
        let diff = hi.m_min as f64 - lo.m_min as f64;
        let bound = 1.5 * c_learner * (k as f64 / (eps * eps)) * (hi.n as f64 / lo.n as f64).ln();
        out.push((k, eps, diff, bound));
    }
    out
}

pub fn run(cfg: &BenchConfig, consts: &Constants) -> Result<Output, CliError> {
    let recs = records(cfg, consts)?;
    let shape = additive_shape(&recs, consts.c_learner);
    let ok = shape.iter().filter(|(_, _, d, b)| d <= b).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: None,
        rate: Some(super::rate(ok, shape.len())),
    })
}
