//! Planted instances for the experiments.

use serde::{Deserialize, Serialize};

use junta_core::boolcube::BitMask;
use junta_core::dist::{BiasSpectrum, DensePmf, DistSpec, JuntaDistribution, NoisyParityDistribution, Rng};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlantKind {
    Uniform,
    NoisyParity,
    Junta,
}

impl PlantKind {
    pub fn name(self) -> &'static str {
        match self {
            PlantKind::Uniform => "uniform",
            PlantKind::NoisyParity => "noisy-parity",
            PlantKind::Junta => "junta",
        }
    }
}

/// A fresh instance: noisy parities get a random `k`-set and sign, juntas a
/// random `k`-set and a core with i.i.d. uniform weights.
pub fn plant(kind: PlantKind, n: usize, k: usize, eta: f64, rng: &mut Rng) -> Result<DistSpec, CliError> {
    if k > n {
        return Err(CliError::Usage(format!("k = {k} exceeds n = {n}")));
    }
    Ok(match kind {
        PlantKind::Uniform => DistSpec::Junta(JuntaDistribution::uniform(n)),
        PlantKind::NoisyParity => {
            if k == 0 {
                return Err(CliError::Usage("a noisy parity needs k >= 1".into()));
            }
            let j = rng.subset(n, k);
            let sign = if rng.bit() { -1 } else { 1 };
            DistSpec::NoisyParity(NoisyParityDistribution::new(n, j, sign, eta)?)
        }
        PlantKind::Junta => DistSpec::Junta(random_junta(n, k, rng)?),
    })
}

pub fn random_junta(n: usize, k: usize, rng: &mut Rng) -> Result<JuntaDistribution, CliError> {
    let j = rng.subset(n, k);
    let w: Vec<f64> = (0..1usize << k).map(|_| rng.unit()).collect();
    let total: f64 = w.iter().sum();
    let core = DensePmf::new(w.iter().map(|v| v / total).collect())?;
    Ok(JuntaDistribution::new(n, j, core)?)
}

/// The 2-junta on `{a, b}` with `c({a}) = c1`, `c({a,b}) = c2` and every
/// other nonempty coefficient zero.
pub fn two_level(n: usize, a: usize, b: usize, c1: f64, c2: f64) -> Result<JuntaDistribution, CliError> {
    if a == b || a >= n || b >= n {
        return Err(CliError::Usage(format!("need distinct coordinates below {n}, got {a} and {b}")));
    }
    let rel = BitMask::from_indices(n, [a, b]).map_err(|e| CliError::Usage(e.to_string()))?;
    // bit 0 of a core index is the smaller coordinate
    let a_bit = if a < b { 1 } else { 2 };
    let mut c = vec![0.0; 4];
    c[0] = 1.0;
    c[a_bit] = c1;
    c[3] = c2;
    let core = BiasSpectrum::new(c)?.to_pmf()?;
    Ok(JuntaDistribution::new(n, rel, core)?)
}
