//! Elliptic solves on the truncated quarter-plane.

pub mod comparison;
pub mod grid;
pub mod linear;
pub mod nonlinear;
pub mod norms;
pub mod stencil;
pub mod verify;

pub use grid::{NodeTag, PotentialField, Stretching, TruncatedGrid};
pub use linear::{assemble_linearized, solve_cg, solve_linear, solve_system, FaceCoef, LinearCoefficients, LinearSystem, ObliqueCoef, ShockBc};
pub use nonlinear::{far_field_values, nonlinear_residual, residual_split, solve_nonlinear, IterationRecord, NonlinearOptions, NonlinearProblem, NonlinearSolution};
pub use norms::{centered_gradient, dyadic_sups, fit_decay, loglog_slope, measure_decay, weighted_norm, AnnulusSup, DecayFit, WeightedNormReport};
pub use comparison::{barrier_sup, comparison_check, k_factor, quarter_annulus, randomized_trial, vbar, vbar_laplacian, BarrierKind, ComparisonVariant, ComparisonVerdict, CornerBarrier, GridOperator, HarnessOutcome};
