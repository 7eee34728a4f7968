//! The three reductions between junta distribution learning and learning
//! parities with noise, and the machinery they share.

mod heavy;
mod inject;
mod lpdn;
mod lpn;
mod lpn_to_ljd;
mod queries;

pub use heavy::{
    find_heavy_fourier, reduce_ljd_via_lpdn, round_to_pmf, verify_samples, HeavyFourierHit, HeavyOptions, HeavyOutcome,
    LjdViaLpdnRun, SparseSpectrum,
};
pub use inject::{noise_inject, survives, InjectedSource};
pub use lpdn::{reduce_lpdn_to_lpn, BitFlipSource, LpdnOptions, LpdnSolution, LpdnSolver, LpnBackedLpdn, SpectrumScanLpdn};
pub use lpn::{lpn_bruteforce_solve, lpn_candidate_count, lpn_samples, BruteForceLpn, LpnSolver};
pub use lpn_to_ljd::{
    certification_samples, certification_statistic, reduce_lpn_to_ljd, CertRound, FilteredSource, JuntaLearnerOracle,
    LjdLearner, LpnToLjdOptions, LpnToLjdRun,
};
pub use queries::{find_parity_with_queries, query_trials};

use crate::boolcube::CubeError;
use crate::dist::DistError;
use crate::fourier_learn::FourierError;
use crate::junta_learner::LearnerError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    /// No candidate correlated with the labels.
    #[error("no candidate cleared the threshold")]
    Failure,
    #[error("no candidate set survived")]
    NoCandidate,
    #[error("search reached gap {gap} after {rounds} rounds without certifying")]
    SearchExhausted { rounds: usize, gap: f64 },
    #[error("every cell had negative mass")]
    AllMassClipped,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

impl ReductionError {
    /// Errors a solver may legitimately return on an input outside its promise.
    pub fn is_miss(&self) -> bool {
        matches!(
            self,
            ReductionError::Failure
                | ReductionError::NoCandidate
                | ReductionError::SearchExhausted { .. }
                | ReductionError::Fourier(FourierError::NoCandidate { .. })
        )
    }
}
