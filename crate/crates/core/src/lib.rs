//! Pseudospectral laboratory for shallow-water models (classical Boussinesq,
//! the abcd family, Green-Naghdi) on large periodic boxes, with exact linear
//! propagators, a rigid-lid rate-verification harness, a dispersion-phase
//! classifier and oscillatory-kernel decay probes.

pub mod config;
pub mod error;
pub mod models;
pub mod norms;
pub mod persist;
pub mod phase;
pub mod ratelab;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
