//! Verification studies for the linear solver: manufactured solutions, a
//! one-dimensional reduction and the oblique corner counterexample.

use super::grid::{NodeTag, PotentialField, Stretching, TruncatedGrid};
use super::linear::{solve_linear, LinearCoefficients, ObliqueCoef, ShockBc};
use super::norms::{dyadic_sups, loglog_slope};
use crate::error::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsReport {
    pub n: Vec<usize>,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log2` of successive error ratios.
    pub orders: Vec<f64>,
}

impl MmsReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub const MMS_NU: [f64; 2] = [1.0, -0.5];
pub const MMS_C: f64 = 0.3;

pub fn mms_exact(z1: f64, z2: f64) -> f64 {
    z1.sin() * (-z2).exp()
}

fn mms_grad(z1: f64, z2: f64) -> [f64; 2] {
    [z1.cos() * (-z2).exp(), -z1.sin() * (-z2).exp()]
}

pub fn mms_a(z1: f64, z2: f64) -> [[f64; 2]; 2] {
    [[2.0 + 0.5 * z1.sin(), 0.3 + 0.1 * z2.cos()], [-0.1 + 0.1 * (z1 * z2).sin(), 1.0 + 0.25 * (z1 - z2).cos()]]
}

pub fn mms_b(z1: f64, z2: f64) -> [f64; 2] {
    [0.2 * z2.cos(), -0.1 * z1.sin()]
}

fn mms_flux(z1: f64, z2: f64) -> [f64; 2] {
    let a = mms_a(z1, z2);
    let b = mms_b(z1, z2);
    let g = mms_grad(z1, z2);
    let v = mms_exact(z1, z2);
    [a[0][0] * g[0] + a[0][1] * g[1] + b[0] * v, a[1][0] * g[0] + a[1][1] * g[1] + b[1] * v]
}

/// `div(a grad v* + b v*)` by fourth-order central differences.
pub fn mms_source(z1: f64, z2: f64) -> f64 {
    let h = 1e-3;
    let d = |f: &dyn Fn(f64) -> f64| (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
    d(&|t| mms_flux(z1 + t, z2)[0]) + d(&|t| mms_flux(z1, z2 + t)[1])
}

/// Max nodal error of the manufactured solution on the triangle of size `r`.
pub fn mms_error(n: usize, r: f64) -> Result<f64> {
    let g = TruncatedGrid::new(r, 1.0, n, n, Stretching::Uniform)?;
    let ob: Vec<ObliqueCoef> = g
        .z2()
        .iter()
        .map(|&z2| {
            let gr = mms_grad(0.0, z2);
            ObliqueCoef { nu: MMS_NU, c: MMS_C, g0: MMS_NU[0] * gr[0] + MMS_NU[1] * gr[1] + MMS_C * mms_exact(0.0, z2) }
        })
        .collect();
    let coeffs = LinearCoefficients::from_fn(&g, mms_a, mms_b, mms_source, ShockBc::Oblique(ob));
    let boundary = PotentialField::from_fn(g.clone(), mms_exact).values;
    let f = solve_linear(&g, &coeffs, &boundary)?;
    Ok(max_error(&f, mms_exact))
}

fn max_error(f: &PotentialField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let g = &f.grid;
    let mut e = 0.0f64;
    for &(i, j) in g.unknown_nodes() {
        let (a, b) = g.point(i, j);
        e = e.max((f.at(i, j) - exact(a, b)).abs());
    }
    e
}

/// Manufactured-solution convergence study over the given resolutions.
pub fn mms_study(levels: &[usize]) -> Result<MmsReport> {
    let r = 3.0;
    let mut errors = Vec::with_capacity(levels.len());
    for &n in levels {
        errors.push(mms_error(n, r)?);
    }
    let h: Vec<f64> = levels.iter().map(|&n| r / n as f64).collect();
    let orders = errors.windows(2).zip(h.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect();
    Ok(MmsReport { n: levels.to_vec(), h, errors, orders })
}

/// One-dimensional reduction: `((1 + z1) u')' = 2 + 4 z1`, `u = z1^2`, with
/// an oblique condition on the shock column. Returns the max nodal error.
pub fn two_point_bvp_error(n: usize) -> Result<f64> {
    let g = TruncatedGrid::new(2.0, 1.0, n, n, Stretching::Uniform)?;
    let exact = |z1: f64, _: f64| z1 * z1;
    let ob = vec![ObliqueCoef { nu: MMS_NU, c: MMS_C, g0: 0.0 }; g.n2() + 1];
    let coeffs = LinearCoefficients::from_fn(&g, |z1, _| [[1.0 + z1, 0.0], [0.0, 1.0]], |_, _| [0.0; 2], |z1, _| 2.0 + 4.0 * z1, ShockBc::Oblique(ob));
    let boundary = PotentialField::from_fn(g.clone(), exact).values;
    let f = solve_linear(&g, &coeffs, &boundary)?;
    Ok(max_error(&f, exact))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    /// Hoelder exponent of `r^(1/2) sin(theta/2)` at the corner, fitted on dyadic annuli.
    pub analytic_exponent: f64,
    /// The same fit applied to the discrete solve.
    pub discrete_exponent: f64,
    /// Max of `|u|` on the Dirichlet side.
    pub dirichlet_residual: f64,
    /// Max of `|grad u . nu|` on the oblique side.
    pub oblique_residual: f64,
    /// Max relative five-point Laplacian of `u` away from the corner.
    pub laplace_residual: f64,
    pub discrete_error: f64,
}

pub const CORNER_NU: [f64; 2] = [-1.0, -1.0];

pub fn corner_exact(z1: f64, z2: f64) -> f64 {
    z1.hypot(z2).sqrt() * (0.5 * z2.atan2(z1)).sin()
}

fn corner_grad(z1: f64, z2: f64) -> [f64; 2] {
    let r = z1.hypot(z2);
    let th = z2.atan2(z1);
    let (ur, ut) = (0.5 * r.powf(-0.5) * (0.5 * th).sin(), 0.5 * r.powf(-0.5) * (0.5 * th).cos());
    [ur * th.cos() - ut * th.sin(), ur * th.sin() + ut * th.cos()]
}

/// Laplace equation in the quarter plane with `u = 0` on `z2 = 0` and
/// `grad u . (-1, -1) = 0` on `z1 = 0`, solved by `r^(1/2) sin(theta/2)`.
pub fn corner_counterexample(n: usize) -> Result<CornerReport> {
    let mut samples = Vec::new();
    for k in 0..=240 {
        let r = 2f64.powf(-12.0 + k as f64 * 11.0 / 240.0);
        for m in 0..=32 {
            let th = std::f64::consts::FRAC_PI_2 * m as f64 / 32.0;
            samples.push((r, corner_exact(r * th.cos(), r * th.sin())));
        }
    }
    let analytic_exponent = loglog_slope(&dyadic_sups(&samples, 2f64.powi(-12), 0.5), 0.0)?;

    let mut dirichlet_residual = 0.0f64;
    let mut oblique_residual = 0.0f64;
    let mut laplace_residual = 0.0f64;
    for k in 1..=200 {
        let t = k as f64 / 200.0;
        dirichlet_residual = dirichlet_residual.max(corner_exact(t, 0.0).abs());
        let gr = corner_grad(0.0, t);
        oblique_residual = oblique_residual.max((gr[0] * CORNER_NU[0] + gr[1] * CORNER_NU[1]).abs());
        let (x, y, h) = (0.5 + 0.5 * t, 0.3 * t + 0.1, 1e-3);
        let lap = (corner_exact(x + h, y) + corner_exact(x - h, y) + corner_exact(x, y + h) + corner_exact(x, y - h) - 4.0 * corner_exact(x, y)) / (h * h);
        let scale = x.hypot(y).powf(-1.5);
        laplace_residual = laplace_residual.max(lap.abs() / scale);
    }

    let g = TruncatedGrid::new(1.0, 1.0, n, n, Stretching::Graded(1.1))?;
    let ob = vec![ObliqueCoef { nu: CORNER_NU, c: 0.0, g0: 0.0 }; g.n2() + 1];
    let coeffs = LinearCoefficients::from_fn(&g, |_, _| [[1.0, 0.0], [0.0, 1.0]], |_, _| [0.0; 2], |_, _| 0.0, ShockBc::Oblique(ob));
    let boundary = PotentialField::from_fn(g.clone(), corner_exact).values;
    let f = solve_linear(&g, &coeffs, &boundary)?;
    let mut disc = Vec::new();
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            if g.tag(i, j) != NodeTag::Inactive {
                let (a, b) = g.point(i, j);
                disc.push((a.hypot(b), f.at(i, j)));
            }
        }
    }
    let h_min = g.z1()[1];
    let discrete_exponent = loglog_slope(&dyadic_sups(&disc, 8.0 * h_min, 0.25), 0.0)?;
    Ok(CornerReport {
        analytic_exponent,
        discrete_exponent,
        dirichlet_residual,
        oblique_residual,
        laplace_residual,
        discrete_error: max_error(&f, corner_exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_solution_second_order() {
        let rep = mms_study(&[12, 24, 48]).unwrap();
        assert!(rep.min_order() >= 1.9, "{rep:?}");
    }

    #[test]
    fn one_dimensional_reduction_is_exact() {
        assert!(two_point_bvp_error(16).unwrap() < 1e-8);
    }

    #[test]
    fn corner_exponent_is_one_half() {
        let rep = corner_counterexample(64).unwrap();
        assert!((rep.analytic_exponent - 0.5).abs() < 0.05, "{rep:?}");
        assert!((rep.discrete_exponent - 0.5).abs() < 0.05, "{rep:?}");
        assert!(rep.dirichlet_residual < 1e-15 && rep.oblique_residual < 1e-12);
        assert!(rep.laplace_residual < 1e-4, "{rep:?}");
    }
}
