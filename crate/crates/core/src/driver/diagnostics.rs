//! Decay toward the asymptotic state and finite-difference stability probes.

use super::entropy::{x_norm, z_norm};
use super::eulerian::EulerianSolution;
use super::pipeline::SolveOutcome;
use super::spec::ProblemSpec;
use crate::elliptic::{fit_decay, DecayFit};
use crate::error::{Error, Result};
use crate::gas::FlowState;
use serde::{Deserialize, Serialize};

/// State differences below this are treated as round-off.
const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// Largest radius used by the fits.
    pub r_max: f64,
    /// Decay of `max_k |U_k - V_inf,k|`.
    pub state: DecayFit,
    /// Decay of `|sigma' - s0|`.
    pub shock_slope: DecayFit,
    pub sup_state: f64,
    pub sup_shock_slope: f64,
    /// `max |g(l(y)) - y|` over sampled streamlines.
    pub g_l_identity: f64,
}

fn state_gap(a: &FlowState<f64>, b: &FlowState<f64>) -> f64 {
    (a.u1 - b.u1).abs().max((a.u2 - b.u2).abs()).max((a.p - b.p).abs()).max((a.rho - b.rho).abs())
}

fn chop(v: f64) -> f64 {
    if v.abs() <= ROUNDOFF {
        0.0
    } else {
        v
    }
}

/// Fits `|U - V_inf(x2 - tan(theta0) x1)|` and `|sigma' - s0|` over dyadic
/// annuli, with `V_inf(s) = U_inf(g(s))` and `g = l^-1`.
pub fn decay_diagnostics(eul: &EulerianSolution, out: &SolveOutcome) -> Result<DecayReport> {
    let ff = &out.far_field;
    let t = ff.tan_theta0();
    let r_max = eul.r_inscribed;
    let mut states = Vec::with_capacity(eul.nodes.len());
    let mut sup_state = 0.0f64;
    for n in &eul.nodes {
        let r = n.x[0].hypot(n.x[1]);
        if r > r_max {
            continue;
        }
        let y = ff.l_inverse(n.x[1] - t * n.x[0])?;
        let v = chop(state_gap(&n.state, &ff.state_inf(y)?));
        sup_state = sup_state.max(v);
        states.push((r, v));
    }
    let s0 = out.prepared.background.s0;
    let mut slopes = Vec::with_capacity(eul.shock.len());
    let mut sup_shock_slope = 0.0f64;
    for p in &eul.shock {
        let v = chop(p.sigma_prime - s0).abs();
        sup_shock_slope = sup_shock_slope.max(v);
        slopes.push((p.sigma.hypot(p.x2), v));
    }
    let mut g_l_identity = 0.0f64;
    let top = out.prepared.grid.z2().last().copied().unwrap_or(1.0);
    for k in 0..=64 {
        let y = top * k as f64 / 64.0;
        g_l_identity = g_l_identity.max((ff.l_inverse(ff.l(y)?)? - y).abs());
    }
    Ok(DecayReport {
        r_max,
        state: fit_decay(&states, r_max, ROUNDOFF)?,
        shock_slope: fit_decay(&slopes, r_max, ROUNDOFF)?,
        sup_state,
        sup_shock_slope,
        g_l_identity,
    })
}

/// Discrete Y-norm of the difference of two incoming streams on the shock
/// nodes: `sup (1+y)^(1+beta) |dU| + sup (1+y)^(2+beta) |dU'|`.
pub fn upstream_difference_norm(a: &SolveOutcome, b: &SolveOutcome, beta: f64) -> f64 {
    let nodes = &a.entropy.nodes;
    let diff: Vec<[f64; 4]> = nodes
        .iter()
        .map(|&y| {
            let (sa, sb) = (a.prepared.upstream.state_on_streamline(y), b.prepared.upstream.state_on_streamline(y));
            [sa.u1 - sb.u1, sa.u2 - sb.u2, sa.p - sb.p, sa.rho - sb.rho]
        })
        .collect();
    let mut s0 = 0.0f64;
    let mut s1 = 0.0f64;
    for k in 0..nodes.len() {
        let m = diff[k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        s0 = s0.max((1.0 + nodes[k]).powf(1.0 + beta) * m);
        if k > 0 {
            let h = nodes[k] - nodes[k - 1];
            let d = (0..4).fold(0.0f64, |m, c| m.max(((diff[k][c] - diff[k - 1][c]) / h).abs()));
            s1 = s1.max((1.0 + 0.5 * (nodes[k] + nodes[k - 1])).powf(2.0 + beta) * d);
        }
    }
    s0 + s1
}

/// Discrete Z-norm of the difference of two wedge perturbations over `[0, x_max]`.
pub fn wedge_difference_norm(a: &ProblemSpec, b: &ProblemSpec, x_max: f64) -> f64 {
    let n = 4096;
    let samples: Vec<(f64, f64, f64)> = (0..=n)
        .map(|k| {
            let x = x_max * k as f64 / n as f64;
            let (ma, da) = a.wedge.mu(x);
            let (mb, db) = b.wedge.mu(x);
            (x, ma - mb, da - db)
        })
        .collect();
    z_norm(&samples, a.bookkeeping.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityProbe {
    /// X-norm of the entropy difference.
    pub entropy_difference: f64,
    pub upstream_difference: f64,
    pub wedge_difference: f64,
    /// `X / (Y + Z)`; `None` when the specs coincide.
    pub ratio: Option<f64>,
    pub identical: bool,
}

/// Compares two converged solves on the same grid.
pub fn stability_from_outcomes(a: &SolveOutcome, b: &SolveOutcome) -> Result<StabilityProbe> {
    if a.entropy.nodes != b.entropy.nodes {
        return Err(Error::InvalidInput("stability probe needs both solves on the same grid".into()));
    }
    let bk = a.spec.bookkeeping;
    let d: Vec<f64> = a.entropy.values.iter().zip(&b.entropy.values).map(|(x, y)| x - y).collect();
    let entropy_difference = x_norm(&a.entropy.nodes, &d, bk.alpha, bk.beta);
    let upstream_difference = upstream_difference_norm(a, b, bk.beta);
    let wedge_difference = wedge_difference_norm(&a.spec, &b.spec, 4.0 * a.spec.grid.radius);
    let input = upstream_difference + wedge_difference;
    let identical = input == 0.0 && entropy_difference == 0.0;
    let ratio = if input > 0.0 { Some(entropy_difference / input) } else { None };
    Ok(StabilityProbe { entropy_difference, upstream_difference, wedge_difference, ratio, identical })
}

/// Solves both specs concurrently and compares them.
pub fn stability_probe(a: &ProblemSpec, b: &ProblemSpec) -> Result<StabilityProbe> {
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| super::entropy_fixed_point(a));
        let rb = super::entropy_fixed_point(b);
        (ha.join().expect("solver thread panicked"), rb)
    });
    stability_from_outcomes(&ra?, &rb?)
}

/// Which input a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    WedgeBump,
    Upstream,
}

impl ProblemSpec {
    /// Copy with the amplitude along `axis` replaced.
    pub fn with_amplitude(&self, axis: SweepAxis, amplitude: f64) -> Self {
        match axis {
            SweepAxis::WedgeBump => self.with_bump_amplitude(amplitude),
            SweepAxis::Upstream => self.with_upstream_amplitude(amplitude),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub amplitude: f64,
    pub outer_iterations: usize,
    /// `sup |varphi - varphi_inf|`.
    pub sup_perturbation: f64,
    /// `sup |A - A0+|` on the shock nodes.
    pub sup_entropy_deviation: f64,
    pub sup_state_decay: f64,
    pub stability: StabilityProbe,
    pub state_exponent: Option<f64>,
    pub shock_slope_exponent: Option<f64>,
}

/// One sweep point measured against the unperturbed `reference` solve.
pub fn sweep_row(base: &ProblemSpec, reference: &SolveOutcome, axis: SweepAxis, amplitude: f64) -> Result<SweepRow> {
    let spec = base.with_amplitude(axis, amplitude);
    let out = super::entropy_fixed_point(&spec)?;
    let eul = super::reconstruct_eulerian(&out)?;
    let decay = decay_diagnostics(&eul, &out).ok();
    Ok(SweepRow {
        amplitude,
        outer_iterations: out.outer.len(),
        sup_perturbation: out.solution.perturbation().iter().fold(0.0, |m, v| m.max(v.abs())),
        sup_entropy_deviation: out.entropy.deviation().iter().fold(0.0, |m, v| m.max(v.abs())),
        sup_state_decay: decay.as_ref().map_or(f64::NAN, |d| d.sup_state),
        stability: stability_from_outcomes(&out, reference)?,
        state_exponent: decay.as_ref().and_then(|d| d.state.exponent),
        shock_slope_exponent: decay.as_ref().and_then(|d| d.shock_slope.exponent),
    })
}

/// Largest over smallest of the finite sensitivity ratios.
pub fn ratio_spread(rows: &[SweepRow]) -> Option<f64> {
    let r: Vec<f64> = rows.iter().filter_map(|r| r.stability.ratio).filter(|x| x.is_finite() && *x > 0.0).collect();
    if r.is_empty() {
        return None;
    }
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    Some(hi / lo)
}
