//! Model definitions: parameters, linear symbols and their exact semigroups,
//! slow nonlinear tendencies, the Green-Naghdi depth operators, and the 2D
//! incompressible Euler reference system.

pub mod euler;
pub mod green_naghdi;
pub mod linear;
pub mod nonlinear;
pub mod ops;
pub mod params;
pub mod state;

pub use euler::{biot_savart, euler2d_rhs};
pub use green_naghdi::{gn_q_apply, gn_solve_momentum, gn_t_apply, GnOptions};
pub use linear::{linear_energy, linear_symbol, semigroup_symbol, LinearPropagator};
pub use nonlinear::{nonlinearity, Tendency, TendencyOpts};
pub use params::{AbcdParams, Dim, ModelKind, ModelSpec};
pub use state::{State, Velocity};
