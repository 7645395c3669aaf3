//! Unsplittable capacitated vehicle routing on trees.
//!
//! The crate covers the instance model with exact rational arithmetic, the
//! multi-level tree decomposition, the local simplification of subtours, the
//! height reduction and value sets, a dynamic program producing explicit
//! tours, and exact or heuristic baselines.

pub mod assignment;
pub mod baselines;
pub mod decompose;
pub mod dp;
pub mod instance;
pub mod local;
pub mod params;
pub mod rational;
pub mod structure;

pub use instance::{Instance, InstanceError, Solution, Tour, VertexId};
pub use params::Params;
pub use rational::Rational;
