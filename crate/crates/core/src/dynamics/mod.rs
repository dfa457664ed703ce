//! Method-of-lines evolution of `(mu, gamma)` on a periodic grid.

pub mod fd;
mod integrate;
mod model;
mod rhs;
mod state;

pub use fd::{periodic_cubic, spatial_derivative};
pub use integrate::{cfl_dt, integrate, step_rk4};
pub use model::{ModelSpec, SectionalOp, So3Params, System};
pub use rhs::{rhs, rhs_chiral, rhs_compact, rhs_normal};
pub use state::{equilibrium_state, perturb, Field, StrandState, MIN_GRID};
