//! Coexistence simulator and statistics toolkit for wireless body area networks.
//!
//! The crate covers the full pipeline from channel data to outage statistics:
//!
//! * [`channel`] — link-gain traces: Jakes-model small-scale synthesis, path
//!   loss, shadowing, resampling, coherence time, shadow extraction, overlay,
//!   and a CSV trace format.
//! * [`scenario`] — WBAN topologies, relay modes, the two-subject corridor
//!   motion model, and analysis-set enumeration.
//! * [`mac`] — intra-WBAN TDMA superframes and the non-coordinated
//!   inter-WBAN cycle scheduler with random uniform start offsets.
//! * [`link`] — per-packet SINR, opportunistic relay selection, and the
//!   experiment engine producing per-scheme SINR series.
//! * [`stats`] — outage probability, level crossing rate, average outage
//!   duration (empirical and theoretical), ML distribution fitting over six
//!   families, cross-correlation and independence checks.
//! * [`synth`] — synthetic trace generation for whole scenarios.
//!
//! All numeric kernels are generic over the scalar type through the
//! [`scalar::Real`] trait; concrete aliases for the common instantiations
//! live at the crate root.

pub mod channel;
pub mod error;
pub mod link;
pub mod mac;
pub mod scalar;
pub mod scenario;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` channel trace, the default working type.
pub type Trace64 = channel::ChannelTrace<f64>;
/// `f32` channel trace for memory-constrained batch work.
pub type Trace32 = channel::ChannelTrace<f32>;
/// `f64` fading specification.
pub type FadingSpec64 = channel::FadingSpec<f64>;
/// `f64` SINR series.
pub type SinrSeries64 = link::SinrSeries<f64>;
/// `f64` fitted distribution.
pub type FittedDistribution64 = stats::FittedDistribution<f64>;
