//! Steady transonic shock past a two-dimensional wedge: shock polar,
//! Lagrangian potential formulation, partial hodograph transform, the
//! free-boundary elliptic solver and the outer entropy iteration.
//!
//! Pointwise gas dynamics is generic over [`Real`]; the aliases below fix
//! the scalar to `f64`.

// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod elliptic;
pub mod error;
pub mod gas;
pub mod hodograph;
pub mod lagrangian;
pub mod real;
pub mod roots;
pub mod shock_polar;

pub use error::{Error, ErrorClass, Result};
pub use real::Real;

pub type Gas = gas::GasModel<f64>;
pub type State = gas::FlowState<f64>;
pub type Polar = shock_polar::ShockPolar<f64>;
pub type PolarPoint = shock_polar::PolarPoint<f64>;
pub type PolarSummary = shock_polar::PolarSummary<f64>;
pub type Background = hodograph::Background<f64>;
pub type Upstream = hodograph::UpstreamField<f64>;
pub type FarField = hodograph::FarFieldState<f64>;
pub type EntropyCurve = hodograph::Profile<f64>;
pub type ShockOptions = hodograph::ShockSolveOptions<f64>;
pub type LagrangianGradient = lagrangian::LagrangianGradient<f64>;
pub type StreamData = lagrangian::StreamData<f64>;
