//! Simulation and analysis of queues fed by pre-scheduled random arrivals.
//!
//! Customers are scheduled at regular spacing `1/λ` and each one is displaced
//! by an independent zero-mean delay; optionally each scheduled customer is
//! cancelled with probability `1 - γ`. The crate generates such streams
//! ([`arrivals`]), runs them through a single FIFO server ([`queueing`]),
//! compares the resulting distributions and slot-count correlations
//! ([`analytics`]), reduces raw flight records to queue-time samples
//! ([`ingestion`]) and orchestrates the reference experiments
//! ([`experiments`]).
//!
//! The numerical core is generic over [`Real`] (and the queue recursion over
//! the weaker [`Scalar`], so it also runs on exact rationals). The aliases
//! below fix the scalar to `f64`; `*F32` variants are provided for the
//! single-precision build.

pub mod analytics;
pub mod arrivals;
pub mod error;
pub mod experiments;
pub mod format;
pub mod ingestion;
pub mod laws;
pub mod queueing;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use rng::{Purpose, Seed, SimRng};
pub use scalar::{Real, Scalar};

pub use arrivals::DelayFamily;

pub type DelaySpec = arrivals::DelaySpec<f64>;
pub type ProcessSpec = arrivals::ProcessSpec<f64>;
pub type Horizon = arrivals::Horizon<f64>;
pub type ArrivalStream = arrivals::ArrivalStream<f64>;
pub type ServiceSpec = queueing::ServiceSpec<f64>;
pub type QueueTrace = queueing::QueueTrace<f64>;
pub type Warmup = queueing::Warmup<f64>;
pub type EmpiricalDistribution = queueing::EmpiricalDistribution<f64>;
pub type SlotPair = analytics::SlotPair<f64>;

pub type DelaySpecF32 = arrivals::DelaySpec<f32>;
pub type ProcessSpecF32 = arrivals::ProcessSpec<f32>;
pub type HorizonF32 = arrivals::Horizon<f32>;
pub type ArrivalStreamF32 = arrivals::ArrivalStream<f32>;
pub type ServiceSpecF32 = queueing::ServiceSpec<f32>;
pub type QueueTraceF32 = queueing::QueueTrace<f32>;
pub type EmpiricalDistributionF32 = queueing::EmpiricalDistribution<f32>;
pub type SlotPairF32 = analytics::SlotPair<f32>;
