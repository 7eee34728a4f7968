use serde::Serialize;

use junta_core::dist::{DistSpec, JuntaDistribution, NoisyParityDistribution, Rng};

use super::Output;
use crate::output::parse_set;
use crate::plant::random_junta;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GenType {
    Junta,
    NoisyParity,
    Uniform,
}

#[derive(Clone, Debug, Serialize, clap::Args)]
pub struct GenConfig {
    #[arg(long = "type", value_enum)]
    #[serde(rename = "type")]
    pub kind: GenType,
    #[arg(long)]
    pub n: usize,
    /// Junta size; for noisy parities without `--J`, the size of the random set.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Parity set, 1-based and comma separated.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn need_seed(cfg: &GenConfig) -> Result<Rng, CliError> {
    cfg.seed
        .map(Rng::new)
        .ok_or_else(|| CliError::Usage("--seed is required for a random instance".into()))
}

/// Emits the planted instance as a spec file. The spec is the ground truth.
pub fn run(cfg: &GenConfig) -> Result<Output, CliError> {
    if cfg.k > cfg.n {
        return Err(CliError::Usage(format!("k = {} exceeds n = {}", cfg.k, cfg.n)));
    }
    let spec = match cfg.kind {
        GenType::Uniform => DistSpec::Junta(JuntaDistribution::uniform(cfg.n)),
        GenType::Junta => DistSpec::Junta(random_junta(cfg.n, cfg.k, &mut need_seed(cfg)?)?),
        GenType::NoisyParity => {
            let j = match &cfg.j {
                Some(text) => parse_set(cfg.n, text)?,
                None => need_seed(cfg)?.subset(cfg.n, cfg.k),
            };
            DistSpec::NoisyParity(NoisyParityDistribution::new(cfg.n, j, cfg.sign, cfg.eta)?)
        }
    };
    Ok(Output::text(spec.to_json()))
}
