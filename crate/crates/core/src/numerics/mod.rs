//! Shared numerical kernel: endpoint-aware quadrature, damped Newton,
//! adaptive complex ODE integration and limit extrapolation.

mod extrapolate;
mod ode;
mod quadrature;
mod solve;

pub use extrapolate::{extrapolate_limit, extrapolate_limit_real, Extrapolation};
pub use ode::{integrate_ode, OdeOptions, OdeSolution, OdeStatus};
pub use quadrature::{adaptive_gk, integrate, GaussJacobi, Quadrature, QuadratureSpec};
pub use solve::{brent, solve_system, SolveOptions, SolveReport};
