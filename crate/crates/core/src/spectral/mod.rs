//! Spectral infrastructure: periodic grids, unitary transforms, radial
//! Fourier multipliers, Hodge/Riesz projectors, dyadic and cutoff filters,
//! and Gaussian physical-space weights.
//!
//! Everything here treats ordinary space as a large periodic box; domains
//! must be sized so that fields stay negligible near the boundary for the
//! duration of a run (the solver monitors this).

pub mod field;
pub mod filters;
pub mod grid;
pub mod multiplier;
pub mod weight;

pub use field::SpectralField;
pub use grid::Grid;
pub use multiplier::{
    apply_multiplier, curl, divergence, riesz_gradient_projector, riesz_rotational_projector,
    ModeFactor, MultiplierSpec,
};
