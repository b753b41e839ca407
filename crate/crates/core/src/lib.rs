//! Rotation curves of a self-gravitating isothermal neutrino gas, and a
//! Fraunhofer model of the crossed-beam wire scan with complementarity metrics.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below pin the double-precision types the CLI uses.

// NaN-rejecting guards are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fitting;
pub mod gas;
pub mod io;
pub mod numerics;
pub mod optics;
pub mod real;
pub mod units;

pub mod cli;

pub use error::{Error, Result};
pub use real::Real;

pub type Trajectory = numerics::Trajectory<f64>;
pub type GasParameters = gas::GasParameters<f64>;
pub type DensityProfile = gas::DensityProfile<f64>;
pub type RotationCurve = gas::RotationCurve<f64>;
pub type ObservedCurve = fitting::ObservedCurve<f64>;
pub type ObservedPoint = fitting::ObservedPoint<f64>;
pub type FitResult = fitting::FitResult<f64>;
pub type BeamConfig = optics::BeamConfig<f64>;
pub type WireSpec = optics::WireSpec<f64>;
pub type WireScanResult = optics::WireScanResult<f64>;
pub type ComplementarityMetrics = optics::ComplementarityMetrics<f64>;

pub type GasParametersF32 = gas::GasParameters<f32>;
pub type DensityProfileF32 = gas::DensityProfile<f32>;
pub type RotationCurveF32 = gas::RotationCurve<f32>;
pub type BeamConfigF32 = optics::BeamConfig<f32>;
