//! Reliability, risk and reactive-resiliency quantification for repairable
//! systems.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs except the per-trajectory random streams in
//! [`rng`]. Enable the `parallel` feature to run Monte Carlo trajectories on
//! the rayon thread pool; results are bit-identical either way.
//!
//! Modules:
//! - [`lifetime`]: parametric time-to-failure laws and bathtub hazard profiles
//! - [`risk`]: scenario risk, system risk and the risk-complement reliability proxy
//! - [`pointproc`]: HPP / RP / NHPP / GRP failure processes, simulation and summary measures
//! - [`resiliency`]: reactive resiliency, resiliency degrees and performance trajectories
//! - [`estimation`]: maximum-likelihood fitting of the point-process models

#![cfg_attr(not(feature = "parallel"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod estimation;
pub mod lifetime;
pub mod pointproc;
pub mod resiliency;
pub mod risk;
pub mod rng;

pub use error::{Error, Result};
pub use lifetime::{BathtubProfile, HazardLaw, LifetimeDistribution};
pub use pointproc::{
    EventHistory, KijimaVariant, PointProcessModel, RepairPolicy, Rocof, SimulationConfig,
    Simulator,
};
pub use resiliency::{MissionContext, ResiliencyDegree, ResiliencyEvent};
pub use risk::{RiskPortfolio, Scenario};
