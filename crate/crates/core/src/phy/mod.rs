//! Physical layer: fading channels, zero-forcing beamformers, and the
//! multiple-access-channel rates they induce.
//!
//! Every codeword of a transmission is beamformed so that the users of its
//! subset who are not targeted receive nothing; each targeted user then
//! sees a Gaussian MAC carrying the codewords useful to it, and the slot
//! runs at the symmetric rate every served user can sustain. Monte-Carlo
//! sweeps average that rate over i.i.d. Rayleigh draws, reusing the same
//! draws across packet counts so curves are directly comparable.

mod beamformer;
mod channel;
mod linalg;
mod monte_carlo;
mod rate;

pub use beamformer::{zf_beamformer, BeamformerSet};
pub use channel::{sample_channel, ChannelRealization, Generator, RngSpec};
pub use monte_carlo::{
    monte_carlo_rate, monte_carlo_trials, rate_advantage, AdvantageRow, RateCurve, RatePoint,
    SweepSpec, TrialMatrix,
};
pub use rate::{mac_symmetric_rate, symmetric_rate};

use thiserror::Error;

use crate::delivery::DeliveryError;

#[derive(Debug, Error)]
pub enum PhyError {
    #[error("suppression channels are numerically dependent (smallest singular value {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },
    #[error("target user {target} is not contained in subset {subset:?}")]
    TargetNotInSubset { target: usize, subset: Vec<usize> },
    #[error("nulling {needed} users exceeds the budget of {available} antennas minus one")]
    NullingBudget { needed: usize, available: usize },
    #[error("channel has {got} antenna rows, expected {expected}")]
    AntennaMismatch { got: usize, expected: usize },
    #[error("channel covers {got} users, expected {expected}")]
    UserMismatch { got: usize, expected: usize },
    #[error("user index {user} is outside the channel's {users} users")]
    UserOutOfRange { user: usize, users: usize },
    #[error("schedule contains no nonempty transmission")]
    EmptySchedule,
    #[error("sweep needs at least one placement")]
    EmptySweep,
    #[error("placement disagrees with sweep parameters: {0}")]
    SweepMismatch(String),
    #[error("unknown RNG generator '{0}' (supported: chacha12)")]
    UnknownGenerator(String),
    #[error(transparent)]
    Delivery(#[from] DeliveryError),
}
