//! UAV-relayed double-uplink NOMA with adaptive SIC ordering: channel models,
//! closed-form outage analysis over Mixture-of-Gamma variates, Monte Carlo
//! validation and power-allocation search.
//!
//! Modules are generic over the scalar type through [`num::Real`]; the
//! aliases at the crate root fix it to `f64` for everyday use.

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod mgdist;
pub mod montecarlo;
pub mod num;
pub mod optimizer;
pub mod protocol;
pub mod system;

#[cfg(test)]
#[path = "../tests/common/quad.rs"]
#[allow(dead_code)]
mod quad;

pub use error::{Error, Result};
pub use num::Real;

pub type Position = geometry::Position3D<f64>;
pub type Topology = geometry::Topology<f64>;
pub type MgDist = mgdist::MgDist<f64>;
pub type SystemModel = system::SystemModel<f64>;
pub type PowerAllocation = protocol::PowerAllocation<f64>;
pub type Thresholds = protocol::Thresholds<f64>;
pub type OutageSet = analytics::OutageSet<f64>;

pub type Position32 = geometry::Position3D<f32>;
pub type MgDist32 = mgdist::MgDist<f32>;
pub type SystemModel32 = system::SystemModel<f32>;
