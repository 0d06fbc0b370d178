//! End-to-end solve: entropy fixed point, reconstruction, checks and decay.

use super::diagnostics::{decay_diagnostics, DecayReport};
use super::entropy::x_norm;
use super::eulerian::{reconstruct_eulerian, EulerianSolution, Located, ResidualWindow};
use super::pipeline::{entropy_fixed_point, SolveOutcome};
use super::spec::ProblemSpec;
use crate::error::{Error, ErrorClass, Result};
use serde::{Deserialize, Serialize};

/// Bounds a converged solve must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `g`, `H` and continuity on the shock.
    pub shock: f64,
    pub rh: f64,
    pub slip: f64,
    pub entropy_streamline: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { shock: 1e-8, rh: 1e-6, slip: 1e-8, entropy_streamline: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub class: ErrorClass,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        Self { class: e.class(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub error: Option<ErrorReport>,
    pub outer_iterations: usize,
    pub outer_updates: Vec<f64>,
    pub outer_ratios: Vec<f64>,
    pub inner_iterations: usize,
    pub anchor: f64,
    pub a0_plus: f64,
    /// `|A(0) - anchor|`.
    pub anchor_error: f64,
    pub residual_interior: f64,
    pub residual_gtilde: f64,
    pub residual_htilde: f64,
    /// `max |phi(sigma, y2) - phi^-(sigma, y2)|` on the shock.
    pub phi_continuity: f64,
    pub rh: Located,
    pub slip: Located,
    pub entropy_streamline: f64,
    pub lagrangian: [f64; 4],
    /// Perturbation size: wedge bump amplitude plus upstream amplitude.
    pub epsilon: f64,
    /// X-norm of `A - A0+`.
    pub entropy_deviation: f64,
    /// `C0 epsilon`.
    pub entropy_bound: f64,
    pub within_entropy_bound: bool,
    pub decay: Option<DecayReport>,
    pub decay_error: Option<String>,
    pub thresholds: Thresholds,
}

impl SolveReport {
    /// Report for a solve that failed before convergence.
    pub fn failed(e: &Error) -> Self {
        Self {
            converged: false,
            error: Some(e.into()),
            outer_iterations: 0,
            outer_updates: Vec::new(),
            outer_ratios: Vec::new(),
            inner_iterations: 0,
            anchor: f64::NAN,
            a0_plus: f64::NAN,
            anchor_error: f64::NAN,
            residual_interior: f64::NAN,
            residual_gtilde: f64::NAN,
            residual_htilde: f64::NAN,
            phi_continuity: f64::NAN,
            rh: Located { value: f64::NAN, at: [f64::NAN; 2] },
            slip: Located { value: f64::NAN, at: [f64::NAN; 2] },
            entropy_streamline: f64::NAN,
            lagrangian: [f64::NAN; 4],
            epsilon: f64::NAN,
            entropy_deviation: f64::NAN,
            entropy_bound: f64::NAN,
            within_entropy_bound: false,
            decay: None,
            decay_error: None,
            thresholds: Thresholds::default(),
        }
    }
}

/// Everything produced by one solve.
#[derive(Debug, Clone)]
pub struct Solved {
    pub outcome: SolveOutcome,
    pub eulerian: EulerianSolution,
    pub report: SolveReport,
}

pub fn epsilon(spec: &ProblemSpec) -> f64 {
    spec.wedge.bump.map_or(0.0, |b| b.amplitude.abs()) + spec.upstream.perturbation.map_or(0.0, |p| p.amplitude.abs())
}

/// Builds the report of a converged fixed point.
pub fn build_report(out: &SolveOutcome, eul: &EulerianSolution, window: ResidualWindow) -> SolveReport {
    let th = Thresholds::default();
    let checks = eul.checks(out, window);
    let up = &out.prepared.upstream;
    let phi_continuity = eul.shock.iter().fold(0.0f64, |m, p| m.max((p.x2 - up.eval(p.sigma, p.z2).phi).abs()));
    let (decay, decay_error) = match decay_diagnostics(eul, out) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let bk = out.spec.bookkeeping;
    let eps = epsilon(&out.spec);
    let entropy_deviation = x_norm(&out.entropy.nodes, &out.entropy.deviation(), bk.alpha, bk.beta);
    let residual_gtilde = out.solution.residual_shock;
    let converged = residual_gtilde <= th.shock
        && out.h_residual <= th.shock
        && phi_continuity <= th.shock
        && checks.rh.value <= th.rh
        && checks.slip.value <= th.slip
        && checks.entropy_streamline <= th.entropy_streamline;
    SolveReport {
        converged,
        error: None,
        outer_iterations: out.outer.len(),
        outer_updates: out.outer.iter().map(|r| r.update_norm).collect(),
        outer_ratios: out.outer.iter().filter_map(|r| r.ratio).collect(),
        inner_iterations: out.inner.len(),
        anchor: out.entropy.anchor,
        a0_plus: out.entropy.a0_plus,
        anchor_error: (out.entropy.values[0] - out.entropy.anchor).abs(),
        residual_interior: out.solution.residual_interior,
        residual_gtilde,
        residual_htilde: out.h_residual,
        phi_continuity,
        rh: checks.rh,
        slip: checks.slip,
        entropy_streamline: checks.entropy_streamline,
        lagrangian: checks.lagrangian,
        epsilon: eps,
        entropy_deviation,
        entropy_bound: bk.c0 * eps,
        within_entropy_bound: entropy_deviation <= bk.c0 * eps + 1e-12,
        decay,
        decay_error,
        thresholds: th,
    }
}

/// Runs the fixed point, reconstructs the Eulerian flow and evaluates every check.
pub fn solve(spec: &ProblemSpec) -> Result<Solved> {
    let outcome = entropy_fixed_point(spec)?;
    let eulerian = reconstruct_eulerian(&outcome)?;
    let report = build_report(&outcome, &eulerian, ResidualWindow::default());
    Ok(Solved { outcome, eulerian, report })
}
