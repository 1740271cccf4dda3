//! Reference solutions used to validate the solver.

pub mod ode;
pub mod riemann;
pub mod scalar;
pub mod type1;
pub mod type2;

pub use ode::{OdeRefParams, OdeTrajectory, ode_ref_solution};
pub use riemann::riemann_left_state;
pub use type1::type1_evolve;
pub use type2::{QuasiStatParams, type2_build, type2_evolve};
