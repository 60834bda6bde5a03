//! Free-energy based reinforcement learning with clamped classical and
//! transverse-field Boltzmann machines.

pub mod agent;
pub mod dqn;
pub mod error;
pub mod experiment;
pub mod free_energy;
pub mod gridworld;
pub mod ising;
pub mod par;
pub mod sampler;
pub mod topology;

pub use error::{Error, Result};
