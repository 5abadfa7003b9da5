//! Multi-antenna coded caching with flexible subpacketization.
//!
//! A server with `L` transmit antennas serves `K` cache-equipped users over
//! a fading broadcast channel. Files are split into `P` packets and cached
//! according to a binary placement matrix; delivery sends XOR codewords to
//! user subsets behind zero-forcing beamformers. Unlike the classic scheme,
//! which fixes `P = C(K, t)`, placement matrices are assembled here from
//! circular-shift blocks, so `P` can be traded against delivery efficiency.
//!
//! Crate layout:
//!
//! * [`params`] - network dimensions and derived quantities
//! * [`placement`] - placement matrices, blocks, validation
//! * [`delivery`] - codeword construction, delivery schedules, decode checks
//! * [`metrics`] - transmission-efficiency index and subpacketization
//! * [`phy`] - fading channels, ZF beamformers, MAC rates, Monte-Carlo sweeps
//! * [`io`] - matrix text format, schedule export, CSV rendering

pub mod delivery;
pub mod io;
pub mod metrics;
pub mod params;
pub mod phy;
pub mod placement;

pub use delivery::{
    Codeword, CodewordPart, DecodeReport, DeliveryError, DeliverySchedule, SubpacketCounters,
    SubpacketId, TransmissionSpec,
};
pub use metrics::{EfficiencyProfile, EfficiencyReport, MetricsError, SlotEfficiency, TermClass};
pub use params::{NetworkParams, ParamError};
pub use phy::{
    AdvantageRow, BeamformerSet, ChannelRealization, Generator, PhyError, RateCurve, RatePoint,
    RngSpec, SweepSpec, TrialMatrix,
};
pub use placement::{PlacementBlock, PlacementError, PlacementMatrix, ValidationReport, Violation};
