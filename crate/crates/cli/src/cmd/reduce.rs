use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use junta_core::boolcube::BitMask;
use junta_core::dist::{JuntaDistribution, LpnSource, NoisyParityDistribution, Rng, SamplerSource};
use junta_core::fourier_learn::NoiseSearchOptions;
use junta_core::reductions::{
    reduce_ljd_via_lpdn, reduce_lpdn_to_lpn, reduce_lpn_to_ljd, BruteForceLpn, HeavyOptions, JuntaLearnerOracle,
    LpdnOptions, LpdnSolver, LpnBackedLpdn, LpnToLjdOptions, ReductionError, SpectrumScanLpdn,
};

use super::{rate, read_spec, run_trials, Output};
use crate::output::{millis, parse_set, set_string, to_csv};
use crate::plant::two_level;
use crate::{CliError, Constants};

#[derive(Clone, Debug, clap::Subcommand)]
pub enum ReduceCommand {
    /// Learn an LPN secret with the junta learner as the distribution oracle.
    LpnToLjd(LpnToLjdConfig),
    /// Learn a junta distribution from heavy coefficients found by an LPN solver.
    LjdToLpn(LjdToLpnConfig),
    /// Learn a noisy parity distribution with an LPN solver.
    LpdnToLpn(LpdnToLpnConfig),
}

pub fn run(cmd: &ReduceCommand, consts: &Constants) -> Result<Output, CliError> {
    match cmd {
        ReduceCommand::LpnToLjd(c) => run_lpn_to_ljd(c, consts),
        ReduceCommand::LjdToLpn(c) => run_ljd_to_lpn(c, consts),
        ReduceCommand::LpdnToLpn(c) => run_lpdn_to_lpn(c, consts),
    }
}

fn random_or_fixed(n: usize, k: usize, fixed: &Option<String>, rng: &mut Rng) -> Result<BitMask, CliError> {
    match fixed {
        Some(text) => parse_set(n, text),
        None if k <= n => Ok(rng.subset(n, k)),
        None => Err(CliError::Usage(format!("k = {k} exceeds n = {n}"))),
    }
}

fn lines(v: &[serde_json::Value]) -> String {
    v.iter().map(|l| format!("{l}\n")).collect()
}

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct LpnToLjdConfig {
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Junta size handed to the learner; also the size of a random secret.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Secret, 1-based and comma separated; empty for the constant target.
    /// Random per trial when absent.
    #[arg(long = "S")]
    #[serde(rename = "S")]
    pub s: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
    /// Learner accuracy relative to the current gap; below 1/4.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub min_gap: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpnToLjdRecord {
    pub trial: u64,
    pub seed: u64,
    pub truth: String,
    pub recovered: Option<String>,
    pub success: bool,
    pub rounds: usize,
    pub final_gap: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: usize,
    pub wall_ms: u64,
}

pub fn lpn_to_ljd(cfg: &LpnToLjdConfig, consts: &Constants) -> Result<(Vec<LpnToLjdRecord>, String), CliError> {
    let opts = LpnToLjdOptions {
        eps: cfg.eps,
        min_gap: cfg.min_gap,
        cert_constant: consts.c_cert,
        query_constant: consts.c_queries,
        delta: cfg.delta,
    };
    let master = Rng::new(cfg.seed);
    let out = run_trials(cfg.trials, |t| {
        let start = Instant::now();
        let seed = master.child_seed(t);
        let r = Rng::new(seed);
        let s = random_or_fixed(cfg.n, cfg.k, &cfg.s, &mut r.child(0))?;
        if s.count_ones() > cfg.k {
            return Err(CliError::Usage(format!("|S| = {} exceeds k = {}", s.count_ones(), cfg.k)));
        }
        let mut src = LpnSource::new(s.clone(), cfg.eta, r.child(1))?;
        let mut learner = JuntaLearnerOracle {
            constants: consts.learner(),
        };
        let result = reduce_lpn_to_ljd(&mut src, cfg.k, &mut learner, &opts, &mut r.child(2));
        let mut rec = LpnToLjdRecord {
            trial: t,
            seed,
            truth: set_string(&s),
            recovered: None,
            success: false,
            rounds: 0,
            final_gap: f64::NAN,
            statistic: f64::NAN,
            threshold: f64::NAN,
            samples: 0,
            wall_ms: 0,
        };
        let transcript = match result {
            Ok(run) => {
                let last = run.rounds.last().expect("a certified run has a round");
                rec.recovered = Some(set_string(&run.set));
                rec.success = run.set == s;
                rec.rounds = run.rounds.len();
                rec.final_gap = last.gap;
                rec.statistic = if run.set.is_zero() { last.i_empty } else { last.i_candidate };
                rec.threshold = last.threshold;
                rec.samples = run.samples;
                let rounds: Vec<_> = run
                    .rounds
                    .iter()
                    .map(|c| {
                        json!({
                            "gap": c.gap,
                            "bar_eta": c.bar_eta,
                            "learned": set_string(&c.learned),
                            "candidate": set_string(&c.candidate),
                            "i_candidate": c.i_candidate,
                            "i_empty": c.i_empty,
                            "threshold": c.threshold,
                            "certified": c.certified.as_ref().map(set_string),
                        })
                    })
                    .collect();
                json!({"trial": t, "seed": seed, "truth": rec.truth, "rounds": rounds})
            }
            Err(e) if e.is_miss() => {
                if let ReductionError::SearchExhausted { rounds, gap } = e {
                    rec.rounds = rounds;
                    rec.final_gap = gap;
                }
                json!({"trial": t, "seed": seed, "truth": rec.truth, "error": e.to_string()})
            }
            Err(e) => return Err(e.into()),
        };
        if rec.samples == 0 {
            rec.samples = junta_core::dist::LabeledSource::drawn(&src);
        }
        rec.wall_ms = millis(start.elapsed());
        Ok((rec, transcript))
    })?;
    let (recs, log): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok((recs, lines(&log)))
}

fn run_lpn_to_ljd(cfg: &LpnToLjdConfig, consts: &Constants) -> Result<Output, CliError> {
    let (recs, transcript) = lpn_to_ljd(cfg, consts)?;
    let ok = recs.iter().filter(|r| r.success).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: Some(transcript),
        rate: Some(rate(ok, recs.len())),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LpdnSlot {
    /// Noisy parity learner built on the brute-force LPN solver.
    Lpn,
    /// Direct scan of all small coefficients.
    Scan,
}

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct LjdToLpnConfig {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Planted `c({a})` for a random pair `a != b`.
    #[arg(long, default_value_t = 0.6)]
    pub c1: f64,
    /// Planted `c({a,b})`.
    #[arg(long, default_value_t = 0.3)]
    pub c2: f64,
    /// Learn this fixed distribution instead of the planted pair.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LpdnSlot::Lpn)]
    pub solver: LpdnSlot,
    /// Relative accuracy of the noisy parity learner's coefficient estimate.
    #[arg(long, default_value_t = 0.25)]
    pub candidate_eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LjdToLpnRecord {
    pub trial: u64,
    pub seed: u64,
    pub truth: String,
    pub learned: String,
    pub tv: f64,
    pub success: bool,
    /// Largest `|ĉ(A) - c(A)|` over the planted nonempty sets.
    pub coef_err: f64,
    pub coef_ok: bool,
    pub hits: usize,
    pub distinct: usize,
    pub misses: usize,
    pub rounds: usize,
    pub samples: usize,
    pub wall_ms: u64,
}

fn lpdn_slot(cfg: &LjdToLpnConfig, consts: &Constants) -> Box<dyn LpdnSolver> {
    match cfg.solver {
        LpdnSlot::Lpn => Box::new(LpnBackedLpdn {
            lpn: BruteForceLpn {
                sample_constant: consts.c_lpn,
            },
            opts: LpdnOptions {
                candidate_eps: cfg.candidate_eps,
                delta: cfg.delta,
                query_constant: consts.c_queries,
                search: NoiseSearchOptions {
                    sample_constant: consts.c_candidates,
                    ..NoiseSearchOptions::default()
                },
            },
        }),
        LpdnSlot::Scan => Box::new(SpectrumScanLpdn {
            sample_constant: consts.c_lpn,
            delta: cfg.delta,
        }),
    }
}

pub fn ljd_to_lpn(cfg: &LjdToLpnConfig, consts: &Constants) -> Result<(Vec<LjdToLpnRecord>, String), CliError> {
    let fixed = cfg.spec.as_deref().map(read_spec).transpose()?.map(|s| s.to_junta()).transpose()?;
    let n = fixed.as_ref().map_or(cfg.n, |d| d.dim());
    if fixed.is_none() && (n < 2 || cfg.k < 2) {
        return Err(CliError::Usage("the planted pair needs n >= 2 and k >= 2".into()));
    }
    let opts = HeavyOptions {
        rounds_constant: consts.c_rounds,
        verify_constant: consts.c_verify,
        delta: cfg.delta,
    };
    let master = Rng::new(cfg.seed);
    let out = run_trials(cfg.trials, |t| {
        let start = Instant::now();
        let seed = master.child_seed(t);
        let r = Rng::new(seed);
        let truth: JuntaDistribution = match &fixed {
            Some(d) => d.clone(),
            None => {
                let mut pr = r.child(0);
                let a = pr.below(n);
                let b = (a + 1 + pr.below(n - 1)) % n;
                two_level(n, a, b, cfg.c1, cfg.c2)?
            }
        };
        let mut src = SamplerSource::new(truth.clone(), r.child(1));
        let mut solver = lpdn_slot(cfg, consts);
        let run = reduce_ljd_via_lpdn(&mut src, cfg.k, cfg.eps, solver.as_mut(), &opts, &mut r.child(2))?;
        let tv = run.distribution.tv_to(&truth)?;
        let coef_err = truth
            .core()
            .bias_spectrum()
            .values()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| c.abs() > 1e-12)
            .map(|(idx, c)| {
                let set = BitMask::scatter(n, truth.coords(), idx);
                (run.spectrum.get(&set) - c).abs()
            })
            .fold(0.0, f64::max);
        let hits: Vec<_> = run
            .hits
            .iter()
            .map(|h| json!({"round": h.round, "set": set_string(&h.set), "z": h.z, "half_width": h.half_width}))
            .collect();
        let transcript = json!({
            "trial": t,
            "seed": seed,
            "truth": set_string(truth.relevant()),
            "hits": hits,
            "spectrum": run.spectrum.entries().map(|(a, c)| json!([set_string(a), c])).collect::<Vec<_>>(),
        });
        let rec = LjdToLpnRecord {
            trial: t,
            seed,
            truth: set_string(truth.relevant()),
            learned: set_string(run.distribution.relevant()),
            tv,
            success: tv <= 2.0 * cfg.eps,
            coef_err,
            coef_ok: coef_err <= cfg.eps * (-(cfg.k as f64) / 2.0).exp2(),
            hits: run.hits.len(),
            distinct: run.spectrum.len() - 1,
            misses: run.misses,
            rounds: run.rounds,
            samples: run.samples,
            wall_ms: millis(start.elapsed()),
        };
        Ok((rec, transcript))
    })?;
    let (recs, log): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok((recs, lines(&log)))
}

fn run_ljd_to_lpn(cfg: &LjdToLpnConfig, consts: &Constants) -> Result<Output, CliError> {
    let (recs, transcript) = ljd_to_lpn(cfg, consts)?;
    let ok = recs.iter().filter(|r| r.success).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: Some(transcript),
        rate: Some(rate(ok, recs.len())),
    })
}

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct LpdnToLpnConfig {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Size of a random parity set.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Parity set, 1-based and comma separated; random per trial when absent.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Promised lower bound on `|c(J)|`; defaults to `(1-2η)/2`.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub candidate_eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpdnToLpnRecord {
    pub trial: u64,
    pub seed: u64,
    pub truth: String,
    pub recovered: Option<String>,
    pub coefficient: f64,
    pub truth_coefficient: f64,
    pub success: bool,
    pub candidates: usize,
    pub samples: usize,
    pub wall_ms: u64,
}

pub fn lpdn_to_lpn(cfg: &LpdnToLpnConfig, consts: &Constants) -> Result<Vec<LpdnToLpnRecord>, CliError> {
    let gap = cfg.gap.unwrap_or((1.0 - 2.0 * cfg.eta) / 2.0);
    let opts = LpdnOptions {
        candidate_eps: cfg.candidate_eps,
        delta: cfg.delta,
        query_constant: consts.c_queries,
        search: NoiseSearchOptions {
            sample_constant: consts.c_candidates,
            ..NoiseSearchOptions::default()
        },
    };
    let master = Rng::new(cfg.seed);
    run_trials(cfg.trials, |t| {
        let start = Instant::now();
        let seed = master.child_seed(t);
        let r = Rng::new(seed);
        let j = random_or_fixed(cfg.n, cfg.k, &cfg.j, &mut r.child(0))?;
        let d = NoisyParityDistribution::new(cfg.n, j.clone(), cfg.sign, cfg.eta)?;
        let truth_c = d.bias();
        let mut src = SamplerSource::new(d, r.child(1));
        let mut lpn = BruteForceLpn {
            sample_constant: consts.c_lpn,
        };
        let result = reduce_lpdn_to_lpn(&mut src, j.count_ones(), gap, &mut lpn, &opts, &mut r.child(2));
        let mut rec = LpdnToLpnRecord {
            trial: t,
            seed,
            truth: set_string(&j),
            recovered: None,
            coefficient: f64::NAN,
            truth_coefficient: truth_c,
            success: false,
            candidates: 0,
            samples: 0,
            wall_ms: 0,
        };
        match result {
            Ok(sol) => {
                rec.recovered = Some(set_string(&sol.set));
                rec.coefficient = sol.coefficient;
                rec.success = sol.set == j && (sol.coefficient - truth_c).abs() <= cfg.candidate_eps * truth_c.abs();
                rec.candidates = sol.candidates.len();
            }
            Err(e) if e.is_miss() => {}
            Err(e) => return Err(e.into()),
        }
        rec.samples = junta_core::dist::PointSource::drawn(&src);
        rec.wall_ms = millis(start.elapsed());
        Ok(rec)
    })
}

fn run_lpdn_to_lpn(cfg: &LpdnToLpnConfig, consts: &Constants) -> Result<Output, CliError> {
    let recs = lpdn_to_lpn(cfg, consts)?;
    let ok = recs.iter().filter(|r| r.success).count();
    Ok(Output {
        text: to_csv(&(cfg, consts), &recs)?,
        transcript: None,
        rate: Some(rate(ok, recs.len())),
    })
}
