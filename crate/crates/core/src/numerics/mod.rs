//! Scalar-generic numerical kernels: ODE integration, quadrature, 1-D minimization.

pub mod minimize;
pub mod ode;
pub mod quadrature;

pub use minimize::{minimize_scalar, Minimum};
pub use ode::{integrate_ivp, integrate_ivp_with, IvpOptions, Trajectory};
pub use quadrature::cumulative_trapezoid;
