//! Outer entropy fixed point around the nonlinear hodograph solve.

use super::entropy::{anchor_a0, x_norm, EntropyProfile};
use super::spec::{Prepared, ProblemSpec};
use crate::elliptic::stencil::shock_gradient;
use crate::elliptic::{solve_nonlinear, IterationRecord, NonlinearProblem, NonlinearSolution};
use crate::error::{Error, ErrorClass, Result};
use crate::hodograph::{entropy_update_h, FarFieldState, Profile};
use crate::shock_polar::Root;
use faer::prelude::*;
use serde::{Deserialize, Serialize};

/// Inner tolerance relative to the last outer update norm.
const INNER_FORCING: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub iteration: usize,
    /// X-norm of `omega (h - A)`.
    pub update_norm: f64,
    /// Ratio to the previous update norm.
    pub ratio: Option<f64>,
    pub inner_iterations: usize,
    pub inner_residual: f64,
}

/// One inner iteration tagged with its outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedIteration {
    pub outer: usize,
    #[serde(flatten)]
    pub record: IterationRecord,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub spec: ProblemSpec,
    pub prepared: Prepared,
    pub entropy: EntropyProfile,
    pub solution: NonlinearSolution,
    pub far_field: FarFieldState<f64>,
    /// Wedge trace `btilde(z1_i)` and its derivative.
    pub wedge_trace: Vec<f64>,
    pub wedge_slope: Vec<f64>,
    pub outer: Vec<OuterRecord>,
    pub inner: Vec<TaggedIteration>,
    /// `max |h - A|` over the shock nodes of the returned iterate.
    pub h_residual: f64,
}

impl SolveOutcome {
    pub fn profile(&self) -> Result<Profile<f64>> {
        self.entropy.profile()
    }
}

/// Shock-column rows carrying entropy samples: the vertex and the shock nodes.
pub fn entropy_rows(p: &Prepared) -> Vec<usize> {
    let mut rows = vec![0];
    rows.extend(p.grid.shock_rows());
    rows
}

/// Damped entropy iteration `A <- A + omega (h(varphi_A) - A)` with `A(0)`
/// pinned to the anchor; each `varphi_A` is a converged nonlinear solve.
pub fn entropy_fixed_point(spec: &ProblemSpec) -> Result<SolveOutcome> {
    let prep = spec.prepare()?;
    let g = &prep.grid;
    let bg = prep.background;
    let rows = entropy_rows(&prep);
    let nodes: Vec<f64> = rows.iter().map(|&j| g.z2()[j]).collect();
    let anchor = anchor_a0(prep.upstream.state_on_streamline(0.0), spec.wedge.b(0.0).1, prep.gas, Root::Weak)?;
    let mut entropy = EntropyProfile::initial(nodes.clone(), anchor, bg.a0);
    let mut wedge_trace = Vec::with_capacity(g.n1() + 1);
    let mut wedge_slope = Vec::with_capacity(g.n1() + 1);
    for &z in g.z1() {
        let (y, dy) = prep.wedge_trace(&spec.wedge, z)?;
        wedge_trace.push(y);
        wedge_slope.push(dy);
    }
    let omega = spec.solver.damping;
    let (alpha, beta) = (spec.bookkeeping.alpha, spec.bookkeeping.beta);
    let mut field: Option<Vec<f64>> = None;
    let mut outer: Vec<OuterRecord> = Vec::new();
    let mut inner = Vec::new();
    let mut best = f64::INFINITY;
    let mut mixer = Anderson::new(spec.solver.anderson_depth);
    let mut fallback: Option<Vec<f64>> = None;
    for it in 1..=spec.solver.outer_max_iter {
        let profile = entropy.profile()?;
        let far_field = FarFieldState::new(profile.clone(), prep.upstream.clone(), spec.wedge.theta0, prep.w0, bg.downstream.p)?;
        let problem = NonlinearProblem {
            grid: g,
            entropy: &profile,
            upstream: &prep.upstream,
            far_field: &far_field,
            wedge: &wedge_trace,
            a_ref: bg.a0,
            shock_opts: prep.shock_opts,
        };
        // Inexact inner solves: the tolerance tracks the last outer update.
        let mut inner_opts = spec.solver.inner;
        if let Some(last) = outer.last() {
            inner_opts.tol = inner_opts.tol.max(INNER_FORCING * last.update_norm);
        }
        let solution = match solve_nonlinear(&problem, &inner_opts, field.as_deref()) {
            Ok(s) => s,
            // An extrapolated profile can leave the subsonic range; retreat to the plain step.
            Err(e) if e.class() != ErrorClass::Input && fallback.is_some() => {
                entropy.values = fallback.take().unwrap_or_default();
                mixer.reset();
                continue;
            }
            Err(e) => return Err(e),
        };
        fallback = None;
        inner.extend(solution.history.iter().map(|&record| TaggedIteration { outer: it, record }));
        let mut update = vec![0.0; rows.len()];
        let mut h_residual = 0.0f64;
        for (k, &j) in rows.iter().enumerate().skip(1) {
            let (v, d) = shock_gradient(g, j).apply(&solution.field.values);
            let h = entropy_update_h(g.z2()[j], v, d, &prep.upstream, bg.a0, &prep.shock_opts)?;
            h_residual = h_residual.max((h - entropy.values[k]).abs());
            update[k] = h - entropy.values[k];
        }
        update[0] = anchor - entropy.values[0];
        let update: Vec<f64> = update.iter().map(|u| omega * u).collect();
        let norm = x_norm(&nodes, &update, alpha, beta);
        let ratio = outer.last().map(|r: &OuterRecord| norm / r.update_norm);
        outer.push(OuterRecord {
            iteration: it,
            update_norm: norm,
            ratio,
            inner_iterations: solution.history.len(),
            inner_residual: solution.field.residual,
        });
        if !norm.is_finite() || (it > 3 && norm > 10.0 * best) {
            return Err(Error::OuterDiverged(format!("update norm {norm} at outer iteration {it} (best {best})")));
        }
        best = best.min(norm);
        if norm <= spec.solver.outer_tol {
            return Ok(SolveOutcome {
                spec: *spec,
                prepared: prep.clone(),
                entropy,
                solution,
                far_field,
                wedge_trace,
                wedge_slope,
                outer,
                inner,
                h_residual,
            });
        }
        let (next, plain) = mixer.next(&entropy.values, &update);
        entropy.values = next;
        entropy.values[0] = anchor;
        if entropy.values != plain {
            fallback = Some(plain);
        }
        field = Some(solution.field.values);
    }
    Err(Error::OuterDiverged(format!(
        "no convergence after {} outer iterations (last update {})",
        spec.solver.outer_max_iter,
        outer.last().map_or(f64::NAN, |r| r.update_norm)
    )))
}

/// Anderson mixing for `A = h(A)`, fed with the damped residuals `omega (h - A)`.
#[derive(Debug, Clone)]
struct Anderson {
    depth: usize,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    d_a: Vec<Vec<f64>>,
    d_f: Vec<Vec<f64>>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Self { depth, prev: None, d_a: Vec::new(), d_f: Vec::new() }
    }

    fn reset(&mut self) {
        self.prev = None;
        self.d_a.clear();
        self.d_f.clear();
    }

    /// Mixed and plain next iterates from `a` and the damped residual `f`.
    fn next(&mut self, a: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let plain: Vec<f64> = a.iter().zip(f).map(|(x, y)| x + y).collect();
        if self.depth == 0 {
            return (plain.clone(), plain);
        }
        if let Some((pa, pf)) = self.prev.take() {
            self.d_a.push(a.iter().zip(&pa).map(|(x, y)| x - y).collect());
            self.d_f.push(f.iter().zip(&pf).map(|(x, y)| x - y).collect());
            if self.d_a.len() > self.depth {
                self.d_a.remove(0);
                self.d_f.remove(0);
            }
        }
        self.prev = Some((a.to_vec(), f.to_vec()));
        let m = self.d_f.len();
        if m == 0 {
            return (plain.clone(), plain);
        }
        let n = f.len();
        let df = Mat::<f64>::from_fn(n, m, |i, j| self.d_f[j][i]);
        let rhs = Mat::<f64>::from_fn(n, 1, |i, _| f[i]);
        let gamma = df.qr().solve_lstsq(&rhs);
        if (0..m).any(|j| !gamma[(j, 0)].is_finite()) {
            self.reset();
            return (plain.clone(), plain);
        }
        let mut out = plain.clone();
        for j in 0..m {
            let g = gamma[(j, 0)];
            for i in 0..n {
                out[i] -= g * (self.d_a[j][i] + self.d_f[j][i]);
            }
        }
        (out, plain)
    }
}
