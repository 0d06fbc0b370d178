//! Eulerian reconstruction: `x1 = varphi(z)`, `x2 = z1 + phi^-(varphi, z2)`,
//! states from the flux inversion, and the shock curve `x1 = sigma(x2)`.

use super::pipeline::SolveOutcome;
use crate::elliptic::stencil::shock_gradient;
use crate::elliptic::{centered_gradient, NodeTag, TruncatedGrid};
use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::hodograph::{downstream_gradient, mbar_eval};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerianNode {
    pub i: usize,
    pub j: usize,
    pub z: [f64; 2],
    pub x: [f64; 2],
    pub tag: NodeTag,
    /// Hodograph gradient used for the state.
    pub grad: [f64; 2],
    pub state: FlowState<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockPoint {
    pub z2: f64,
    pub x2: f64,
    pub sigma: f64,
    pub sigma_prime: f64,
    pub upstream: FlowState<f64>,
    pub downstream: FlowState<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerianSolution {
    pub grid: TruncatedGrid,
    /// Nodes with a reconstructed state, in grid order.
    pub nodes: Vec<EulerianNode>,
    /// Node index in `nodes` per grid node.
    pub index: Vec<Option<usize>>,
    pub shock: Vec<ShockPoint>,
    /// Half the distance from the origin to the nearest cutoff node in `x`.
    pub r_inscribed: f64,
}

/// Z-box where the Lagrangian equations are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualWindow {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ResidualWindow {
    fn default() -> Self {
        Self { lo: 1.0, hi: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Located {
    pub value: f64,
    /// `(x1, x2)` where the sup is attained.
    pub at: [f64; 2],
}

impl Located {
    fn zero() -> Self {
        Self { value: 0.0, at: [f64::NAN; 2] }
    }

    fn offer(&mut self, v: f64, at: [f64; 2]) {
        if v > self.value || v.is_nan() {
            *self = Self { value: v, at };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerianChecks {
    /// Sup of the normalized Eulerian jump residuals along the shock.
    pub rh: Located,
    /// Sup of `|u2/u1 - b'(x1)|` on the wedge.
    pub slip: Located,
    /// Largest spread of `A` along a streamline.
    pub entropy_streamline: f64,
    /// Sups of the four Lagrangian equation residuals over the window.
    pub lagrangian: [f64; 4],
}

fn one_sided(z: &[f64], f0: f64, f1: f64, f2: f64) -> f64 {
    let (h1, h2) = (z[1] - z[0], z[2] - z[1]);
    -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f0 + (h1 + h2) / (h1 * h2) * f1 - h1 / (h2 * (h1 + h2)) * f2
}

/// Gas Bernoulli quantity `|u|^2/2 + gamma p / ((gamma - 1) rho)`.
fn bernoulli(gas: &GasModel<f64>, s: &FlowState<f64>) -> f64 {
    gas.bernoulli_b(s)
}

/// Normalized residuals of mass, momentum and energy across a curve `x1 = sigma(x2)`.
pub fn rh_residual(gas: &GasModel<f64>, up: &FlowState<f64>, down: &FlowState<f64>, sigma_prime: f64) -> f64 {
    let flux = |s: &FlowState<f64>| {
        let b = bernoulli(gas, s);
        let f = [s.rho * s.u1, s.rho * s.u1 * s.u1 + s.p, s.rho * s.u1 * s.u2, s.rho * s.u1 * b];
        let g = [s.rho * s.u2, s.rho * s.u1 * s.u2, s.rho * s.u2 * s.u2 + s.p, s.rho * s.u2 * b];
        (f, g)
    };
    let (fu, gu) = flux(up);
    let (fd, gd) = flux(down);
    (0..4)
        .map(|k| {
            let jump = (fd[k] - fu[k]) - sigma_prime * (gd[k] - gu[k]);
            let scale = fu[k].abs() + sigma_prime.abs() * gu[k].abs() + fd[k].abs();
            jump.abs() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Rebuilds the Eulerian flow from a converged solve.
pub fn reconstruct_eulerian(out: &SolveOutcome) -> Result<EulerianSolution> {
    let g = &out.prepared.grid;
    let phi = &out.solution.field.values;
    let far = &out.solution.far;
    let pert: Vec<f64> = phi.iter().zip(far).map(|(a, b)| a - b).collect();
    let ff = &out.far_field;
    let profile = out.profile()?;
    let up = &out.prepared.upstream;
    let gas = out.prepared.gas;
    let (z1, z2) = (g.z1(), g.z2());
    let active = |i: usize, j: usize| i <= g.n1() && j <= g.n2() && g.tag(i, j) != NodeTag::Inactive;

    let mut nodes = Vec::new();
    let mut index = vec![None; g.len()];
    let mut r_cut = f64::INFINITY;
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            let tag = g.tag(i, j);
            if tag == NodeTag::Inactive {
                continue;
            }
            let v = phi[g.id(i, j)];
            let sample = up.eval(v, z2[j]);
            let x = [v, z1[i] + sample.phi];
            if tag == NodeTag::Cutoff {
                r_cut = r_cut.min(x[0].hypot(x[1]));
                continue;
            }
            let grad = match tag {
                // Exact far-field gradient plus the differenced perturbation: differencing
                // varphi_inf itself leaves an error constant along streamlines.
                NodeTag::Interior => {
                    let [a, b] = centered_gradient(g, &pert, i, j);
                    let [c, d] = ff.varphi_inf(z1[i], z2[j])?.1;
                    [a + c, b + d]
                }
                NodeTag::Shock => shock_gradient(g, j).apply(phi).1,
                _ => {
                    if !active(i, 2) {
                        continue;
                    }
                    let d2 = one_sided(z2, pert[g.id(i, 0)], pert[g.id(i, 1)], pert[g.id(i, 2)]);
                    [out.wedge_slope[i], d2 + ff.varphi_inf(z1[i], z2[j])?.1[1]]
                }
            };
            let m = mbar_eval(&sample, profile.eval(z2[j]), grad, &gas, None)?;
            let (down, _) = downstream_gradient(grad, sample.grad_phi)?;
            if !(down.phi_y2 > 0.0) {
                return Err(Error::JacobianDegenerate { i, j, value: down.phi_y2 });
            }
            index[g.id(i, j)] = Some(nodes.len());
            nodes.push(EulerianNode { i, j, z: [z1[i], z2[j]], x, tag, grad, state: m.flux.state });
        }
    }

    let mut shock = Vec::new();
    let mut rows = vec![0];
    rows.extend(g.shock_rows());
    for j in rows {
        let Some(k) = index[g.id(0, j)] else { continue };
        let n = &nodes[k];
        let sample = up.eval(n.x[0], z2[j]);
        // Lagrangian slope d sigma_hat / d y2 is varphi_z2 on z1 = 0.
        let hat = n.grad[1];
        let dx2 = sample.grad_phi[0] * hat + sample.grad_phi[1];
        shock.push(ShockPoint { z2: z2[j], x2: n.x[1], sigma: n.x[0], sigma_prime: hat / dx2, upstream: sample.state, downstream: n.state });
    }
    let r_inscribed = if r_cut.is_finite() { 0.5 * r_cut } else { 0.0 };
    Ok(EulerianSolution { grid: g.clone(), nodes, index, shock, r_inscribed })
}

impl EulerianSolution {
    pub fn node(&self, i: usize, j: usize) -> Option<&EulerianNode> {
        self.index[self.grid.id(i, j)].map(|k| &self.nodes[k])
    }

    /// CSV with columns `x1,x2,u1,u2,p,rho,region`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x1,x2,u1,u2,p,rho,region\n");
        for n in &self.nodes {
            let u = &n.state;
            let region = if n.i == 0 && n.j == 0 { "corner" } else { n.tag.label() };
            let _ = writeln!(s, "{:e},{:e},{:e},{:e},{:e},{:e},{region}", n.x[0], n.x[1], u.u1, u.u2, u.p, u.rho);
        }
        s
    }

    /// CSV with columns `x2,sigma,sigma_prime`.
    pub fn shock_csv(&self) -> String {
        let mut s = String::from("x2,sigma,sigma_prime\n");
        for p in &self.shock {
            let _ = writeln!(s, "{:e},{:e},{:e}", p.x2, p.sigma, p.sigma_prime);
        }
        s
    }

    pub fn checks(&self, out: &SolveOutcome, window: ResidualWindow) -> EulerianChecks {
        let gas = out.prepared.gas;
        let mut rh = Located::zero();
        // The vertex value is Dirichlet data; the shock condition is imposed from the first row up.
        for p in self.shock.iter().filter(|p| p.z2 > 0.0) {
            rh.offer(rh_residual(&gas, &p.upstream, &p.downstream, p.sigma_prime), [p.sigma, p.x2]);
        }
        let mut slip = Located::zero();
        let mut entropy_streamline = 0.0f64;
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); self.grid.n2() + 1];
        for n in &self.nodes {
            if n.j == 0 {
                let b1 = out.spec.wedge.b(n.x[0]).1;
                slip.offer((n.state.u2 / n.state.u1 - b1).abs(), n.x);
            }
            rows[n.j].push(gas.entropy_a(&n.state));
        }
        for r in rows.iter().filter(|r| !r.is_empty()) {
            let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            entropy_streamline = entropy_streamline.max((hi - lo) / hi.abs());
        }
        EulerianChecks { rh, slip, entropy_streamline, lagrangian: self.lagrangian_residuals(&gas, window) }
    }

    /// Sups of the Lagrangian Euler residuals
    ///
    /// ```text
    /// (1/(rho u1))_y1 - (u2/u1)_y2,  (u1 + p/(rho u1))_y1 - (p u2/u1)_y2,
    /// (u2)_y1 + p_y2,                B_y1,
    /// ```
    ///
    /// at interior nodes inside the window, using `q_y1 = q_z1 / varphi_z1`
    /// and `q_y2 = q_z2 - q_z1 varphi_z2 / varphi_z1`.
    pub fn lagrangian_residuals(&self, gas: &GasModel<f64>, window: ResidualWindow) -> [f64; 4] {
        let g = &self.grid;
        let quantities = |s: &FlowState<f64>| {
            [
                1.0 / (s.rho * s.u1),
                s.u2 / s.u1,
                s.u1 + s.p / (s.rho * s.u1),
                s.p * s.u2 / s.u1,
                s.u2,
                s.p,
                gas.bernoulli_b(s),
            ]
        };
        let q: Vec<[f64; 7]> = self.nodes.iter().map(|n| quantities(&n.state)).collect();
        let mut sup = [0.0f64; 4];
        let inside = |t: f64| t >= window.lo && t <= window.hi;
        for n in &self.nodes {
            if n.tag != NodeTag::Interior || !inside(n.z[0]) || !inside(n.z[1]) {
                continue;
            }
            let (i, j) = (n.i, n.j);
            let nb = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
            let Some(ks) = nb.iter().map(|&(a, b)| self.index[g.id(a, b)]).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let dz1 = g.z1()[i + 1] - g.z1()[i - 1];
            let dz2 = g.z2()[j + 1] - g.z2()[j - 1];
            let [v1, v2] = n.grad;
            let dy = |c: usize| {
                let d1 = (q[ks[0]][c] - q[ks[1]][c]) / dz1;
                let d2 = (q[ks[2]][c] - q[ks[3]][c]) / dz2;
                (d1 / v1, d2 - d1 * v2 / v1)
            };
            let r = [
                dy(0).0 - dy(1).1,
                dy(2).0 - dy(3).1,
                dy(4).0 + dy(5).1,
                dy(6).0,
            ];
            for k in 0..4 {
                sup[k] = sup[k].max(r[k].abs());
            }
        }
        sup
    }
}

