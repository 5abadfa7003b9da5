//! Rayleigh fading draws and the seeded RNG streams behind them.

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::C64;
use super::PhyError;
use crate::params::NetworkParams;

/// Supported deterministic generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Generator {
    #[default]
    ChaCha12,
}

impl FromStr for Generator {
    type Err = PhyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chacha12" => Ok(Self::ChaCha12),
            other => Err(PhyError::UnknownGenerator(other.to_string())),
        }
    }
}

impl Generator {
    pub fn id(&self) -> &'static str {
        match self {
            Self::ChaCha12 => "chacha12",
        }
    }
}

/// Seed plus generator choice; every random quantity in a sweep descends
/// from one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub generator: Generator,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            generator: Generator::ChaCha12,
        }
    }

    /// Independent stream for one Monte-Carlo trial. Streams depend only on
    /// (seed, trial), so trial i draws the same channel no matter which
    /// placements or SNRs are being swept, and no matter the thread order.
    pub fn trial_rng(&self, trial: u64) -> ChaCha12Rng {
        match self.generator {
            Generator::ChaCha12 => {
                let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
                rng.set_stream(trial);
                rng
            }
        }
    }
}

/// One narrowband channel draw: column k is user k's length-L' vector h_k.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    columns: Vec<Vec<C64>>,
    antennas: usize,
}

impl ChannelRealization {
    pub fn from_columns(columns: Vec<Vec<C64>>) -> Self {
        let antennas = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == antennas));
        Self { columns, antennas }
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn users(&self) -> usize {
        self.columns.len()
    }

    pub fn user_channel(&self, k: usize) -> &[C64] {
        &self.columns[k]
    }
}

/// Draws an L' x K channel with i.i.d. CN(0, 1) entries (Rayleigh fading,
/// unit average power per entry). L' is the effective antenna count: a
/// surplus beyond K - t would never be exercised by the schedule.
pub fn sample_channel(params: &NetworkParams, rng: &mut impl Rng) -> ChannelRealization {
    let antennas = params.effective_antennas();
    let columns: Vec<Vec<C64>> = (0..params.users)
        .map(|_| {
            (0..antennas)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect()
        })
        .collect();
    ChannelRealization::from_columns(columns)
}
