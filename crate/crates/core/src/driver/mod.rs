//! Outer entropy iteration, Eulerian reconstruction and verification.

pub mod diagnostics;
pub mod entropy;
pub mod eulerian;
pub mod pipeline;
pub mod report;
pub mod spec;

pub use diagnostics::{decay_diagnostics, ratio_spread, stability_from_outcomes, stability_probe, sweep_row, DecayReport, StabilityProbe, SweepAxis, SweepRow};
pub use entropy::{anchor_a0, cutoff_chi, cutoff_wt, x_norm, z_norm, EntropyProfile};
pub use eulerian::{reconstruct_eulerian, rh_residual, EulerianChecks, EulerianNode, EulerianSolution, Located, ResidualWindow, ShockPoint};
pub use pipeline::{entropy_fixed_point, OuterRecord, SolveOutcome, TaggedIteration};
pub use report::{build_report, solve, ErrorReport, SolveReport, Solved, Thresholds};
pub use spec::{Bookkeeping, Bump, BumpKind, GridSpec, PerturbationSpec, Prepared, ProblemSpec, SolverSpec, UpstreamSpec, WedgeSpec};
