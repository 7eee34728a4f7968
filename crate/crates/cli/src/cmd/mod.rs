//! One module per subcommand. Each exposes a clap-parsable config and a
//! runner returning the rendered output, so tests can drive them without
//! spawning the binary.

pub mod bench;
pub mod calibrate;
pub mod gen;
pub mod learn;
pub mod reduce;
pub mod test;

use rayon::prelude::*;

use crate::CliError;

/// What a command writes: the main text (CSV or JSON), an optional JSON-lines
/// transcript, and a success rate for `--assert`.
#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    pub transcript: Option<String>,
    pub rate: Option<f64>,
}

impl Output {
    pub fn text(text: String) -> Self {
        Output {
            text,
            transcript: None,
            rate: None,
        }
    }
}

/// Runs `f(0..trials)` on the current rayon pool, results in trial order.
pub fn run_trials<R, F>(trials: usize, f: F) -> Result<Vec<R>, CliError>
where
    R: Send,
    F: Fn(u64) -> Result<R, CliError> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

pub fn rate(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        0.0
    } else {
        successes as f64 / trials as f64
    }
}

pub fn read_spec(path: &std::path::Path) -> Result<junta_core::dist::DistSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(junta_core::dist::DistSpec::from_json(&text)?)
}
