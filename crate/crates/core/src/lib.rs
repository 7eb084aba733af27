//! Analytics and simulation for a covert wireless link protected by
//! threshold-selected distributed jammers over Rayleigh slow-fading channels.
//!
//! A transmitter T talks to a receiver R while a warden W runs a radiometer
//! (average received power against a threshold) to detect the transmission.
//! Friendly helper nodes whose instantaneous channel gain to R falls below a
//! selection threshold radiate jamming, degrading W's hypothesis test while
//! leaving R mostly unharmed. This crate computes the warden's false-alarm /
//! miss-detection / detection-error probabilities, the receiver's transmission
//! outage probability, the covert throughput, and the jointly optimal
//! selection threshold and transmission rate under a covertness constraint.
//! A seeded Monte-Carlo engine provides an independent oracle for every
//! closed-form quantity.
//!
//! All internal computation uses linear units (watts, meters); powers cross
//! the API in watts with dBm helpers in [`geometry`].

pub mod detection;
mod error;
pub mod geometry;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;
pub mod outage;
pub mod subsets;
mod util;

pub use detection::{DetectionContext, DetectionReport};
pub use error::ModelError;
pub use geometry::{dbm_to_watts, watts_to_dbm, NetworkGeometry, NodePosition, SystemParams};
pub use montecarlo::{DetectionSim, McConfig, McEstimate, McHorizon};
pub use optimizer::{CsiCase, OptimizationResult};
pub use outage::{OutageContext, ThroughputReport};
pub use subsets::{SubsetEnsemble, SubsetModel};
