//! Soft random geometric graphs (SRGGs) in the connectivity regime.
//!
//! Points are placed uniformly in a unit-volume domain and each pair connects
//! independently with probability `p(r / s)`. The library provides the
//! ensemble itself, its entropy rate `h*`, information-density (AEP) checks,
//! brute-force tables for tiny graphs, and a random-binning distributed
//! source coding simulator with its rate region.

pub mod cli;
pub mod connection;
pub mod dsc;
pub mod error;
pub mod geometry;
pub mod infotheory;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use connection::{check_assumptions, AssumptionReport, ConnectionProfile, SparsitySchedule};
pub use error::{Error, Result};
pub use geometry::{small_r_sphere_area, DomainSpec, PointSet, Shape};
pub use sampler::{expected_edge_count, sample_srgg, Srgg};
