use serde::Serialize;
use serde_json::json;

use junta_core::dist::{DensePmf, DistSpec, PmfSampler, Rng};
use junta_core::fourier_learn::{fourier_required_samples, learn_fourier_coefficients};
use junta_core::junta_learner::{learn_junta, LearnerConfig};
use junta_core::tester::{required_samples, tolerant_identity_test, TesterConfig, Verdict};

use super::test::shifted_uniform;
use super::Output;
use crate::plant::{plant, PlantKind};
use crate::{CliError, Constants};

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct CalibrateConfig {
    #[arg(long)]
    pub seed: u64,
    /// Trials per error rate for the tester and the Fourier learner.
    #[arg(long, default_value_t = 400)]
    pub trials: usize,
    /// Trials per plant family for the learner.
    #[arg(long, default_value_t = 60)]
    pub learner_trials: usize,
}

const Z: f64 = 2.0;

/// Upper end of the Wilson score interval for `x` failures in `n` trials.
pub fn wilson_upper(x: usize, n: usize) -> f64 {
    let n = n as f64;
    let p = x as f64 / n;
    let z2 = Z * Z;
    (p + z2 / (2.0 * n) + Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n)
}

fn round_up(c: f64) -> f64 {
    (c * 1000.0).ceil() / 1000.0
}

/// Smallest `C` in `[lo, hi]` (up to 0.5% in log scale) with `ok(C)`,
/// assuming `ok` is monotone; `lo` itself is tried first.
fn search<F: FnMut(f64) -> Result<bool, CliError>>(name: &str, lo: f64, hi: f64, mut ok: F) -> Result<f64, CliError> {
    if ok(lo)? {
        return Ok(round_up(lo));
    }
    if !ok(hi)? {
        return Err(CliError::Contract(format!("{name}: even C = {hi} misses the target")));
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > 0.005 {
        let mid = 0.5 * (a + b);
        if ok(mid.exp())? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(round_up(b.exp()))
}

pub const TESTER_GRID: (usize, f64, f64) = (16, 0.25, 0.05);
pub const FOURIER_GRID: (usize, f64) = (3, 0.1);
pub const LEARNER_GRID: (usize, usize, f64) = (16, 3, 0.1);

/// Close errors at `D = P` and far errors at `||D-P||₁ = α + ε`.
fn tester_errors(c: f64, trials: usize, rng: &Rng) -> Result<(usize, usize), CliError> {
    let (s, eps, delta) = TESTER_GRID;
    let tc = TesterConfig::new(0.0, eps, delta, c)?;
    let m = required_samples(&tc, s);
    let p = DensePmf::uniform(s.trailing_zeros() as usize);
    let far = PmfSampler::new(shifted_uniform(s, eps)?);
    let near = PmfSampler::new(p.clone());
    let mut errs = (0, 0);
    for t in 0..trials as u64 {
        let b = junta_core::dist::sample(&near, &mut rng.child(2 * t), m);
        if tolerant_identity_test(&p, &b, &tc)?.verdict == Verdict::Far {
            errs.0 += 1;
        }
        let b = junta_core::dist::sample(&far, &mut rng.child(2 * t + 1), m);
        if tolerant_identity_test(&p, &b, &tc)?.verdict == Verdict::Close {
            errs.1 += 1;
        }
    }
    Ok(errs)
}

/// Fourier delta at `k`.
fn fourier_delta(k: usize) -> f64 {
    (1.0 / (k * k) as f64).min(0.25)
}

fn fourier_errors(c: f64, trials: usize, rng: &Rng) -> Result<usize, CliError> {
    let (k, eps) = FOURIER_GRID;
    let acc = eps * (-(k as f64) / 2.0).exp2();
    let delta = fourier_delta(k);
    let m = fourier_required_samples(c, k, acc, delta);
    let mut errs = 0;
    for t in 0..trials as u64 {
        let mut r = rng.child(t);
        let w: Vec<f64> = (0..1 << k).map(|_| r.unit()).collect();
        let total: f64 = w.iter().sum();
        let d = DensePmf::new(w.iter().map(|v| v / total).collect())?;
        let truth = d.bias_spectrum();
        let batch = junta_core::dist::sample(&PmfSampler::new(d), &mut r, m);
        let q = learn_fourier_coefficients(&batch, acc, delta, c).map_err(|e| CliError::Contract(e.to_string()))?;
        let got = q.bias_spectrum();
        let worst = (0..1 << k).map(|a| (got.get(a) - truth.get(a)).abs()).fold(0.0, f64::max);
        if worst > acc {
            errs += 1;
        }
    }
    Ok(errs)
}

const FAMILIES: [PlantKind; 3] = [PlantKind::Uniform, PlantKind::NoisyParity, PlantKind::Junta];

/// Failures per plant family: TV above 2ε, or a broken trace invariant.
fn learner_failures(consts: &Constants, trials: usize, rng: &Rng) -> Result<Vec<usize>, CliError> {
    use rayon::prelude::*;
    let (n, k, eps) = LEARNER_GRID;
    FAMILIES
        .iter()
        .enumerate()
        .map(|(fi, &kind)| {
            let fam = rng.child(fi as u64);
            let fails: Vec<bool> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let r = fam.child(t);
                    let truth: DistSpec = plant(kind, n, k, 0.1, &mut r.child(0))?;
                    let exact = truth.to_junta()?;
                    let lc = LearnerConfig::new(n, k, eps, &consts.learner(), r.child_seed(2))?;
                    let batch = truth.sample(&mut r.child(1), lc.sample_budget);
                    let (q, trace) = learn_junta(&batch, &lc)?;
                    let good = q.tv_to(&exact)? <= 2.0 * eps && trace.n_within(exact.relevant()) && trace.n_strictly_grows();
                    Ok(!good)
                })
                .collect::<Result<_, CliError>>()?;
            Ok(fails.iter().filter(|&&f| f).count())
        })
        .collect()
}

/// Smallest learner constant whose budget covers the tester and Fourier
/// sample needs for every `n ≥ 1`, `k ≥ 1` and `ε`.
pub fn learner_floor(c_tester: f64, c_fourier: f64) -> f64 {
    // tester: (2^k + 2k ln n) ≤ 2k(2^k + ln n); Fourier: 2^k(k + ln 1/δ) ≤ k(1 + ln 4)·2^k
    (2.0 * c_tester).max((1.0 + 4f64.ln()) * c_fourier)
}

pub fn calibrate(cfg: &CalibrateConfig, base: &Constants) -> Result<serde_json::Value, CliError> {
    if cfg.trials == 0 || cfg.learner_trials == 0 {
        return Err(CliError::Usage("need at least one trial".into()));
    }
    let master = Rng::new(cfg.seed);
    let (s, t_eps, t_delta) = TESTER_GRID;
    let c_tester = search("tester", 1.0 / 16.0, 16.0, |c| {
        let (close, far) = tester_errors(c, cfg.trials, &master.child(0))?;
        Ok(wilson_upper(close.max(far), cfg.trials) <= t_delta)
    })?;
    let (close, far) = tester_errors(c_tester, cfg.trials, &master.child(0))?;

    let (fk, f_eps) = FOURIER_GRID;
    let f_delta = fourier_delta(fk);
    let c_fourier = search("fourier", 1.0 / 16.0, 16.0, |c| {
        Ok(wilson_upper(fourier_errors(c, cfg.trials, &master.child(1))?, cfg.trials) <= f_delta)
    })?;
    let f_errs = fourier_errors(c_fourier, cfg.trials, &master.child(1))?;

    let floor = learner_floor(c_tester, c_fourier);
    let with = |c: f64| Constants {
        c_tester,
        c_fourier,
        c_learner: c,
        ..*base
    };
    let c_learner = search("learner", floor, 16.0 * floor, |c| {
        let fails = learner_failures(&with(c), cfg.learner_trials, &master.child(2))?;
        Ok(fails.iter().all(|&f| wilson_upper(f, cfg.learner_trials) <= 0.1))
    })?;
    let l_fails = learner_failures(&with(c_learner), cfg.learner_trials, &master.child(2))?;
    let (ln, lk, l_eps) = LEARNER_GRID;

    Ok(json!({
        "seed": cfg.seed,
        "constants": with(c_learner),
        "grid": {
            "tester": {"s": s, "alpha": 0.0, "eps": t_eps, "delta": t_delta, "trials": cfg.trials},
            "fourier": {"k": fk, "eps": f_eps, "eps_prime": f_eps * (-(fk as f64) / 2.0).exp2(), "delta": f_delta, "trials": cfg.trials},
            "learner": {"n": ln, "k": lk, "eps": l_eps, "families": FAMILIES.map(PlantKind::name), "trials": cfg.learner_trials, "floor": floor},
        },
        "rates": {
            "tester_close_error": close as f64 / cfg.trials as f64,
            "tester_far_error": far as f64 / cfg.trials as f64,
            "fourier_error": f_errs as f64 / cfg.trials as f64,
            "learner_failure": l_fails.iter().map(|&f| f as f64 / cfg.learner_trials as f64).collect::<Vec<_>>(),
        },
        "wilson_z": Z,
        "not_calibrated": ["c_rounds", "c_lpn", "c_queries", "c_cert", "c_verify", "c_candidates"],
    }))
}

pub fn run(cfg: &CalibrateConfig, base: &Constants) -> Result<Output, CliError> {
    let report = calibrate(cfg, base)?;
    Ok(Output::text(serde_json::to_string_pretty(&report).expect("json") + "\n"))
}
