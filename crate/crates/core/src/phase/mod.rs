//! Dispersion-phase analysis: the phase/ratio pair of an abcd system,
//! classification of its derivative zeros and tail exponents, and numerical
//! decay probes for the oscillatory kernels those constants control.

pub mod classify;
pub mod kernel;
pub mod pair;

pub use classify::{classify, classify_with_scan, PhaseClassification};
pub use kernel::{
    geometric_times, kernel_decay_probe, KernelProbeResult, KernelProbeSpec, ProbeBand, ProbePhase,
};
pub use pair::PhasePair;

use crate::error::Result;
use crate::models::params::AbcdParams;

/// Closed-form `(g, g', g'', g''')` at radius `r >= 0`.
pub fn phase_derivatives(abcd: &AbcdParams, r: f64) -> Result<(f64, f64, f64, f64)> {
    abcd.check_admissible()?;
    Ok(PhasePair::new(*abcd).derivatives(r))
}
