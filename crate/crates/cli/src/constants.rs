//! Every sample-size constant the experiments use, loaded from JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Output of `junta calibrate`, shipped as the default.
const CALIBRATED: &str = include_str!("../calibrated.json");

pub const CONFIG_ENV: &str = "JUNTA_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Tester: `m = C·ε^-2·(s + ln 1/δ)`.
    pub c_tester: f64,
    /// Fourier learner: `m = C·ε^-2·(k + ln 1/δ)`.
    pub c_fourier: f64,
    /// Learner budget: `m = C·(k/ε²)·(2^k + ln n)`.
    pub c_learner: f64,
    /// Heavy-coefficient rounds: `C·k·2^{2k}`.
    pub c_rounds: f64,
    /// Brute-force LPN: `m = C·ln(#candidates)/gap²`.
    pub c_lpn: f64,
    /// Query recovery votes: `C·ln(n/δ)/(1-4ε)²`.
    pub c_queries: f64,
    /// Certification: `m = C·ln(1/δ)/g²`.
    pub c_cert: f64,
    /// Heavy-hit verification: `m = C·ln(2/δ)/acc²`.
    pub c_verify: f64,
    /// Unknown-noise candidate search: `m = C·s·ln(s/δ)/(ε g)²`.
    pub c_candidates: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConstantsFile {
    Report { constants: Constants },
    Plain(Constants),
}

impl Constants {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        match serde_json::from_str::<ConstantsFile>(text) {
            Ok(ConstantsFile::Report { constants }) | Ok(ConstantsFile::Plain(constants)) => {
                constants.validate()?;
                Ok(constants)
            }
            Err(e) => Err(CliError::Usage(format!("bad constants file: {e}"))),
        }
    }

    pub fn calibrated() -> Self {
        Self::from_json(CALIBRATED).expect("shipped constants parse")
    }

    /// `path`, else the file named by `JUNTA_CONFIG`, else the shipped values.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let env = std::env::var_os(CONFIG_ENV);
        let path = path.or(env.as_deref().map(Path::new));
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                Self::from_json(&text)
            }
            None => Ok(Self::calibrated()),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let all = [
            self.c_tester,
            self.c_fourier,
            self.c_learner,
            self.c_rounds,
            self.c_lpn,
            self.c_queries,
            self.c_cert,
            self.c_verify,
            self.c_candidates,
        ];
        if all.iter().all(|c| c.is_finite() && *c > 0.0) {
            Ok(())
        } else {
            Err(CliError::Usage("every constant must be positive and finite".into()))
        }
    }

    pub fn learner(&self) -> junta_core::junta_learner::LearnerConstants {
        junta_core::junta_learner::LearnerConstants {
            tester: self.c_tester,
            fourier: self.c_fourier,
            learner: self.c_learner,
        }
    }
}
