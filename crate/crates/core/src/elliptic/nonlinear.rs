//! Nonlinear hodograph equation `div Mbar(z, A, varphi, grad varphi) = 0` with
//! the wedge trace on `z2 = 0`, `gtilde = 0` on the shock and the far field on
//! the cutoff.
//!
//! Writing `varphi = varphi_inf + v`, the discrete residual satisfies
//! `R(varphi_inf + v) = R(varphi_inf) + L(v) v`, where `L(v)` carries secant
//! coefficients averaged over `varphi_inf + s v`, `s in [0, 1]`. Picard solves
//! `L(v_old) v_new = -R(varphi_inf)`; Newton uses tangent coefficients.

use super::grid::{NodeTag, PotentialField, TruncatedGrid};
use super::linear::{assemble_linearized, needs_x_face, needs_y_face, solve_system, FaceCoef, LinearCoefficients, ObliqueCoef, ShockBc};
use super::norms::weighted_norm;
use super::stencil::{shock_gradient, x_face, y_face, GradientStencil};
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::hodograph::{mbar_eval, shock_condition_g, FarFieldState, Profile, ShockSolveOptions, UpstreamField};
use serde::{Deserialize, Serialize};

/// Three-point Gauss-Legendre rule on `[0, 1]`.
const SECANT_S: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
const SECANT_W: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

#[derive(Clone, Copy)]
pub struct NonlinearProblem<'a> {
    pub grid: &'a TruncatedGrid,
    pub entropy: &'a Profile<f64>,
    pub upstream: &'a UpstreamField<f64>,
    pub far_field: &'a FarFieldState<f64>,
    /// Wedge trace `btilde` at the nodes `z1_i`.
    pub wedge: &'a [f64],
    /// Reference entropy for the shock `A`-solves.
    pub a_ref: f64,
    pub shock_opts: ShockSolveOptions<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearOptions {
    /// Stop when the weighted norm of the update is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Radius of the admissible ball around the far field.
    pub delta: f64,
    /// Decay weight exponent of the norm.
    pub beta: f64,
    pub newton: bool,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 50, delta: 0.1, beta: 0.25, newton: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Discrete nonlinear residual after the step (max norm).
    pub residual: f64,
    /// Weighted norm of `v = varphi - varphi_inf`.
    pub delta_norm: f64,
    /// Weighted norm of the step.
    pub update_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSolution {
    pub field: PotentialField,
    /// Far-field values `varphi_inf` at the nodes.
    pub far: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub residual_interior: f64,
    pub residual_shock: f64,
}

impl NonlinearSolution {
    /// `v = varphi - varphi_inf` at every node.
    pub fn perturbation(&self) -> Vec<f64> {
        self.field.values.iter().zip(&self.far).map(|(a, b)| a - b).collect()
    }
}

/// Far-field values at active nodes, computed row by row.
pub fn far_field_values(grid: &TruncatedGrid, ff: &FarFieldState<f64>) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.len()];
    for j in 0..=grid.n2() {
        let z2 = grid.z2()[j];
        if (0..=grid.n1()).all(|i| grid.tag(i, j) == NodeTag::Inactive) {
            continue;
        }
        let l = ff.l(z2)?;
        let lp = ff.l_prime(z2)?;
        for i in 0..=grid.n1() {
            if grid.tag(i, j) != NodeTag::Inactive {
                out[grid.id(i, j)] = ff.varphi_inf_given(grid.z1()[i], z2, l, lp)?.0;
            }
        }
    }
    Ok(out)
}

fn gas(p: &NonlinearProblem) -> GasModel<f64> {
    *p.upstream.gas()
}

fn face_entropy(p: &NonlinearProblem, st: &GradientStencil) -> f64 {
    p.entropy.eval(st.z.1)
}

fn mbar_at(p: &NonlinearProblem, st: &GradientStencil, val: f64, grad: [f64; 2]) -> Result<crate::hodograph::MbarJacobian<f64>> {
    let sample = p.upstream.eval(val, st.z.1);
    mbar_eval(&sample, face_entropy(p, st), grad, &gas(p), None)
}

fn mbar_dphi(p: &NonlinearProblem, st: &GradientStencil, val: f64, grad: [f64; 2]) -> Result<[f64; 2]> {
    if !p.upstream.depends_on_y1(val, st.z.1) {
        return Ok([0.0; 2]);
    }
    let h = 1e-6 * (1.0 + val.abs());
    let a = mbar_at(p, st, val + h, grad)?.mbar;
    let b = mbar_at(p, st, val - h, grad)?.mbar;
    Ok([(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)])
}

/// Per-row residuals of the discrete nonlinear problem, ordered as the grid's
/// unknowns: finite-volume balances at interior nodes and `gtilde` on the shock.
pub fn nonlinear_residual(p: &NonlinearProblem, phi: &[f64]) -> Result<Vec<f64>> {
    let g = p.grid;
    let mut fx = vec![[0.0; 2]; g.len()];
    let mut fy = vec![[0.0; 2]; g.len()];
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            if needs_x_face(g, i, j) {
                let st = x_face(g, i, j);
                let (v, d) = st.apply(phi);
                fx[g.id(i, j)] = mbar_at(p, &st, v, d)?.mbar;
            }
            if needs_y_face(g, i, j) {
                let st = y_face(g, i, j);
                let (v, d) = st.apply(phi);
                fy[g.id(i, j)] = mbar_at(p, &st, v, d)?.mbar;
            }
        }
    }
    let mut out = Vec::with_capacity(g.n_unknowns());
    for &(i, j) in g.unknown_nodes() {
        if i == 0 {
            let st = shock_gradient(g, j);
            let (v, d) = st.apply(phi);
            out.push(shock_condition_g(g.z2()[j], v, d, p.upstream, p.a_ref, &p.shock_opts)?.gtilde);
        } else {
            let r = g.dz2(j) * (fx[g.id(i, j)][0] - fx[g.id(i - 1, j)][0]) + g.dz1(i) * (fy[g.id(i, j)][1] - fy[g.id(i, j - 1)][1]);
            out.push(r);
        }
    }
    Ok(out)
}

/// Splits a residual vector into interior and shock max norms.
pub fn residual_split(grid: &TruncatedGrid, r: &[f64]) -> (f64, f64) {
    let mut interior = 0.0f64;
    let mut shock = 0.0f64;
    for (k, &(i, _)) in grid.unknown_nodes().iter().enumerate() {
        if i == 0 {
            shock = shock.max(r[k].abs());
        } else {
            interior = interior.max(r[k].abs());
        }
    }
    (interior, shock)
}

/// Secant (or tangent, with `tangent = true`) coefficients between `base` and `base + v`.
fn coefficients(p: &NonlinearProblem, base: &[f64], v: &[f64], tangent: bool) -> Result<(Vec<FaceCoef>, Vec<FaceCoef>, Vec<ObliqueCoef>)> {
    let g = p.grid;
    let (s_pts, s_wts): (&[f64], &[f64]) = if tangent { (&[1.0], &[1.0]) } else { (&SECANT_S, &SECANT_W) };
    let face = |st: &GradientStencil| -> Result<FaceCoef> {
        let (b0, d0) = st.apply(base);
        let (dv, dd) = st.apply(v);
        let mut c = FaceCoef::default();
        for (&s, &w) in s_pts.iter().zip(s_wts) {
            let val = b0 + s * dv;
            let grad = [d0[0] + s * dd[0], d0[1] + s * dd[1]];
            let mj = mbar_at(p, st, val, grad)?;
            let dphi = mbar_dphi(p, st, val, grad)?;
            for a in 0..2 {
                for b in 0..2 {
                    c.a[a][b] += w * mj.jac[a][b];
                }
                c.b[a] += w * dphi[a];
            }
        }
        Ok(c)
    };
    let mut xf = vec![FaceCoef::default(); g.len()];
    let mut yf = vec![FaceCoef::default(); g.len()];
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            if needs_x_face(g, i, j) {
                xf[g.id(i, j)] = face(&x_face(g, i, j))?;
            }
            if needs_y_face(g, i, j) {
                yf[g.id(i, j)] = face(&y_face(g, i, j))?;
            }
        }
    }
    let mut ob = vec![ObliqueCoef::default(); g.n2() + 1];
    for j in g.shock_rows() {
        let st = shock_gradient(g, j);
        let (b0, d0) = st.apply(base);
        let (dv, dd) = st.apply(v);
        let mut oc = ObliqueCoef::default();
        for (&s, &w) in s_pts.iter().zip(s_wts) {
            let sc = shock_condition_g(g.z2()[j], b0 + s * dv, [d0[0] + s * dd[0], d0[1] + s * dd[1]], p.upstream, p.a_ref, &p.shock_opts)?;
            oc.nu[0] += w * sc.nu[0];
            oc.nu[1] += w * sc.nu[1];
            oc.c += w * sc.c;
        }
        ob[j] = oc;
    }
    Ok((xf, yf, ob))
}

/// Linear step: solves `L dv = -r` with Dirichlet values `bc` for `dv`.
fn linear_step(p: &NonlinearProblem, coef: (Vec<FaceCoef>, Vec<FaceCoef>, Vec<ObliqueCoef>), r: &[f64], bc: &[f64]) -> Result<Vec<f64>> {
    let g = p.grid;
    let (x_faces, y_faces, mut ob) = coef;
    let mut source = vec![0.0; g.len()];
    for (k, &(i, j)) in g.unknown_nodes().iter().enumerate() {
        if i == 0 {
            ob[j].g0 = -r[k];
        } else {
            source[g.id(i, j)] = -r[k] / (g.dz1(i) * g.dz2(j));
        }
    }
    let coeffs = LinearCoefficients { x_faces, y_faces, shock: ShockBc::Oblique(ob), source };
    let sys = assemble_linearized(g, &coeffs, bc)?;
    let x = solve_system(&sys)?;
    let mut out = bc.to_vec();
    for (k, &node) in sys.nodes.iter().enumerate() {
        out[node] = x[k];
    }
    Ok(out)
}

/// Solves the nonlinear problem starting from `initial` (defaults to the far field).
pub fn solve_nonlinear(p: &NonlinearProblem, opts: &NonlinearOptions, initial: Option<&[f64]>) -> Result<NonlinearSolution> {
    let g = p.grid;
    if p.wedge.len() != g.n1() + 1 {
        return Err(Error::InvalidInput(format!("wedge trace has {} values for {} columns", p.wedge.len(), g.n1() + 1)));
    }
    let far = far_field_values(g, p.far_field)?;
    // Dirichlet data for v: wedge trace minus far field, zero on the cutoff.
    let mut bc = vec![0.0; g.len()];
    for i in 0..=g.n1() {
        bc[g.id(i, 0)] = p.wedge[i] - far[g.id(i, 0)];
    }
    let mut v = match initial {
        Some(init) if init.len() == g.len() => {
            let mut v: Vec<f64> = init.iter().zip(&far).map(|(a, b)| a - b).collect();
            for (k, t) in g.tags().iter().enumerate() {
                if !t.is_unknown() {
                    v[k] = bc[k];
                }
            }
            v
        }
        Some(_) => return Err(Error::InvalidInput("initial field does not match the grid".into())),
        None => bc.clone(),
    };
    // Without a start field the first step linearizes about the far field; the
    // raw Dirichlet lift has an O(1/h) gradient on the wedge row.
    let mut coef_v = if initial.is_none() { vec![0.0; g.len()] } else { v.clone() };
    let r_far = nonlinear_residual(p, &far)?;
    let mut history = Vec::new();
    let phi_of = |v: &[f64]| -> Vec<f64> { far.iter().zip(v).map(|(a, b)| a + b).collect() };
    for it in 1..=opts.max_iter {
        // Newton starts after one Picard step; the raw Dirichlet lift is too rough to linearize about.
        let v_new = if opts.newton && it > 1 {
            let phi = phi_of(&v);
            let r = nonlinear_residual(p, &phi)?;
            let coef = coefficients(p, &phi, &vec![0.0; g.len()], true)?;
            let dv = linear_step(p, coef, &r, &vec![0.0; g.len()])?;
            v.iter().zip(&dv).map(|(a, b)| a + b).collect::<Vec<_>>()
        } else {
            let coef = coefficients(p, &far, &coef_v, false)?;
            linear_step(p, coef, &r_far, &bc)?
        };
        let step: Vec<f64> = v_new.iter().zip(&v).map(|(a, b)| a - b).collect();
        let update_norm = weighted_norm(g, &step, opts.beta);
        let delta_norm = weighted_norm(g, &v_new, opts.beta);
        v = v_new;
        coef_v.clone_from(&v);
        let phi = phi_of(&v);
        let r = nonlinear_residual(p, &phi)?;
        let (ri, rs) = residual_split(g, &r);
        history.push(IterationRecord { iteration: it, residual: ri.max(rs), delta_norm, update_norm });
        if !(delta_norm <= opts.delta) {
            return Err(Error::LeftDeltaBall { norm: delta_norm, delta: opts.delta });
        }
        if update_norm <= opts.tol {
            let mut field = PotentialField::new(g.clone(), phi)?;
            field.iterations = it;
            field.residual = ri.max(rs);
            return Ok(NonlinearSolution { field, far, history, residual_interior: ri, residual_shock: rs });
        }
    }
    let last = history.last().map_or(f64::NAN, |h| h.update_norm);
    Err(Error::MaxIterations { iterations: opts.max_iter, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::grid::Stretching;
    use crate::gas::FlowState;
    use crate::hodograph::Background;
    use crate::shock_polar::Root;

    struct Setup {
        grid: TruncatedGrid,
        entropy: Profile<f64>,
        upstream: UpstreamField<f64>,
        far: FarFieldState<f64>,
        bg: Background<f64>,
    }

    fn setup(n: usize) -> Setup {
        let gas = GasModel::new(1.4).unwrap();
        let up = FlowState::horizontal(2.0, 1.0, 1.0, &gas).unwrap();
        let bg = Background::new(up, &gas, 22.85f64.to_radians(), Root::Weak).unwrap();
        let upstream = UpstreamField::uniform(up, gas, bg.s1).unwrap();
        let entropy = Profile::constant(bg.a0);
        let far = FarFieldState::new(entropy.clone(), upstream.clone(), bg.theta0, 0.0, bg.downstream.p).unwrap();
        let grid = TruncatedGrid::new(16.0, 1.0, n, n, Stretching::Graded(1.05)).unwrap();
        Setup { grid, entropy, upstream, far, bg }
    }

    fn bump(z1: f64) -> f64 {
        if z1 > 1.0 && z1 < 3.0 {
            let x = z1 - 2.0;
            (1.0 - x * x).powi(3)
        } else {
            0.0
        }
    }

    fn problem<'a>(s: &'a Setup, wedge: &'a [f64]) -> NonlinearProblem<'a> {
        NonlinearProblem {
            grid: &s.grid,
            entropy: &s.entropy,
            upstream: &s.upstream,
            far_field: &s.far,
            wedge,
            a_ref: s.bg.a0,
            shock_opts: ShockSolveOptions::default(),
        }
    }

    #[test]
    fn background_is_a_fixed_point() {
        let s = setup(16);
        let wedge: Vec<f64> = s.grid.z1().iter().map(|&z| s.bg.varphi(z, 0.0)).collect();
        let p = problem(&s, &wedge);
        let sol = solve_nonlinear(&p, &NonlinearOptions::default(), None).unwrap();
        assert_eq!(sol.history.len(), 1);
        assert!(sol.field.residual < 1e-10, "{}", sol.field.residual);
        for (k, t) in s.grid.tags().iter().enumerate() {
            if *t != NodeTag::Inactive {
                let (i, j) = s.grid.ij(k);
                let (a, b) = s.grid.point(i, j);
                assert!((sol.field.values[k] - s.bg.varphi(a, b)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn small_bump_converges() {
        let s = setup(24);
        let eps = 1e-3;
        let wedge: Vec<f64> = s.grid.z1().iter().map(|&z| s.bg.varphi(z, 0.0) + eps * bump(z)).collect();
        let p = problem(&s, &wedge);
        let sol = solve_nonlinear(&p, &NonlinearOptions::default(), None).unwrap();
        assert!(sol.residual_shock <= 1e-8, "{}", sol.residual_shock);
        assert!(sol.residual_interior <= 1e-8, "{}", sol.residual_interior);
        // Updates contract.
        let h = &sol.history;
        assert!(h.len() >= 2 && h[h.len() - 1].update_norm < h[0].update_norm);
        // Newton from the Picard start lands on the same field.
        let newton = solve_nonlinear(&p, &NonlinearOptions { newton: true, ..Default::default() }, None).unwrap();
        let diff = newton.field.values.iter().zip(&sol.field.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-9, "{diff}");
        assert!(newton.history.len() <= sol.history.len());
    }

    #[test]
    fn response_is_linear_for_small_data() {
        let s = setup(16);
        let run = |eps: f64| {
            let wedge: Vec<f64> = s.grid.z1().iter().map(|&z| s.bg.varphi(z, 0.0) + eps * bump(z)).collect();
            let p = problem(&s, &wedge);
            let sol = solve_nonlinear(&p, &NonlinearOptions::default(), None).unwrap();
            sol.perturbation().iter().fold(0.0f64, |m, x| m.max(x.abs()))
        };
        // Halving the amplitude halves sup |v|.
        let ratio = run(1e-3) / run(2e-3);
        assert!((0.4..=0.6).contains(&ratio), "{ratio}");
        assert!((ratio - 0.5).abs() < 1e-2, "{ratio}");
    }
}
