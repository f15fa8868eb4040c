//! Finite-temperature Gaussian boson sampling: thermal-loss noise, phase-space
//! classicality criteria, and a classical sampler checked against exact click
//! statistics.

pub mod channels;
pub mod cli;
pub mod criteria;
pub mod detectors;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod interferometer;
pub mod linalg;
pub mod rng;
pub mod sampler;
pub mod state;

pub use error::{Error, Result};
