//! Divergence-form linear problem
//!
//! ```text
//! d_i (a_ij d_j v + b_i v) = f            in Q^R,
//! v = Dirichlet data                      on the wedge and cutoff,
//! nu1 v_z1 + nu2 v_z2 + c v = g0          on the shock (or Dirichlet),
//! ```
//!
//! discretized by finite volumes on the truncated grid.

use super::grid::{NodeTag, PotentialField, TruncatedGrid};
use super::stencil::{shock_gradient, x_face, y_face, GradientStencil, Stencil};
use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceCoef {
    /// `a[i][j]`: flux component `i` per unit `d_j v`.
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObliqueCoef {
    pub nu: [f64; 2],
    pub c: f64,
    pub g0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShockBc {
    /// Coefficients indexed by the row `j`.
    Oblique(Vec<ObliqueCoef>),
    /// Shock-column values taken from the boundary array.
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoefficients {
    /// Face `(i+1/2, j)` stored at node index `(i, j)`.
    pub x_faces: Vec<FaceCoef>,
    /// Face `(i, j+1/2)` stored at node index `(i, j)`.
    pub y_faces: Vec<FaceCoef>,
    pub shock: ShockBc,
    /// Nodal source `f`.
    pub source: Vec<f64>,
}

/// Whether the x-face right of `(i, j)` borders an interior node.
pub fn needs_x_face(g: &TruncatedGrid, i: usize, j: usize) -> bool {
    i < g.n1() && (g.tag(i, j) == NodeTag::Interior || g.tag(i + 1, j) == NodeTag::Interior)
}

/// Whether the y-face above `(i, j)` borders an interior node.
pub fn needs_y_face(g: &TruncatedGrid, i: usize, j: usize) -> bool {
    j < g.n2() && (g.tag(i, j) == NodeTag::Interior || g.tag(i, j + 1) == NodeTag::Interior)
}

impl LinearCoefficients {
    /// Samples coefficient functions at face midpoints and the source at nodes.
    pub fn from_fn(
        g: &TruncatedGrid,
        a: impl Fn(f64, f64) -> [[f64; 2]; 2],
        b: impl Fn(f64, f64) -> [f64; 2],
        source: impl Fn(f64, f64) -> f64,
        shock: ShockBc,
    ) -> Self {
        let mut x_faces = vec![FaceCoef::default(); g.len()];
        let mut y_faces = vec![FaceCoef::default(); g.len()];
        let mut src = vec![0.0; g.len()];
        for i in 0..=g.n1() {
            for j in 0..=g.n2() {
                let (z1, z2) = g.point(i, j);
                if needs_x_face(g, i, j) {
                    let zm = 0.5 * (z1 + g.z1()[i + 1]);
                    x_faces[g.id(i, j)] = FaceCoef { a: a(zm, z2), b: b(zm, z2) };
                }
                if needs_y_face(g, i, j) {
                    let zm = 0.5 * (z2 + g.z2()[j + 1]);
                    y_faces[g.id(i, j)] = FaceCoef { a: a(z1, zm), b: b(z1, zm) };
                }
                src[g.id(i, j)] = source(z1, z2);
            }
        }
        Self { x_faces, y_faces, shock, source: src }
    }
}

/// Square sparse system in compressed rows, one row per unknown node.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Unknown index to node id; shock nodes are excluded under Dirichlet data.
    pub nodes: Vec<usize>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.rhs.len()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum())
            .collect()
    }

    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.mul(x).iter().zip(&self.rhs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let entry = |r: usize, c: usize| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).find(|&k| self.cols[k] == c).map_or(0.0, |k| self.vals[k])
        };
        (0..self.n()).all(|r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).all(|k| (self.vals[k] - entry(self.cols[k], r)).abs() <= tol * self.vals[k].abs().max(1.0))
        })
    }
}

/// Row builder merging repeated columns.
struct Row {
    entries: Vec<(usize, f64)>,
    rhs: f64,
}

impl Row {
    fn add(&mut self, node: usize, w: f64, unknown: &[usize], boundary: &[f64]) {
        let u = unknown[node];
        if u == usize::MAX {
            self.rhs -= w * boundary[node];
        } else {
            self.entries.push((u, w));
        }
    }

    fn add_stencil(&mut self, s: &Stencil, scale: f64, unknown: &[usize], boundary: &[f64]) {
        for (node, w) in s.entries() {
            self.add(node, w * scale, unknown, boundary);
        }
    }

    fn add_flux(&mut self, st: &GradientStencil, coef: &FaceCoef, comp: usize, scale: f64, unknown: &[usize], boundary: &[f64]) {
        self.add_stencil(&st.d1, scale * coef.a[comp][0], unknown, boundary);
        self.add_stencil(&st.d2, scale * coef.a[comp][1], unknown, boundary);
        self.add_stencil(&st.value, scale * coef.b[comp], unknown, boundary);
    }
}

fn check_ellipticity(coef: &FaceCoef, i: usize, j: usize) -> Result<()> {
    let a = coef.a;
    let off = 0.5 * (a[0][1] + a[1][0]);
    let disc = a[0][0] * a[1][1] - off * off;
    if !(a[0][0] > 0.0 && a[1][1] > 0.0 && disc > 0.0) {
        return Err(Error::EllipticityLost { i, j, disc });
    }
    Ok(())
}

/// Assembles the finite-volume system; `boundary` holds Dirichlet values at
/// wedge, cutoff and (under Dirichlet shock data) shock nodes.
pub fn assemble_linearized(g: &TruncatedGrid, coeffs: &LinearCoefficients, boundary: &[f64]) -> Result<LinearSystem> {
    if boundary.len() != g.len() || coeffs.source.len() != g.len() {
        return Err(Error::InvalidInput("boundary and source arrays must cover every node".into()));
    }
    let dirichlet_shock = matches!(coeffs.shock, ShockBc::Dirichlet);
    let mut unknown = vec![usize::MAX; g.len()];
    let mut nodes = Vec::new();
    for &(i, j) in g.unknown_nodes() {
        if dirichlet_shock && i == 0 {
            continue;
        }
        unknown[g.id(i, j)] = nodes.len();
        nodes.push(g.id(i, j));
    }
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = Vec::with_capacity(nodes.len());
    for &node in &nodes {
        let (i, j) = g.ij(node);
        let mut row = Row { entries: Vec::with_capacity(24), rhs: 0.0 };
        if i == 0 {
            let ShockBc::Oblique(ob) = &coeffs.shock else { unreachable!() };
            let oc = ob.get(j).copied().ok_or_else(|| Error::InvalidInput(format!("missing oblique data for row {j}")))?;
            let norm = oc.nu[0].hypot(oc.nu[1]);
            if !(oc.nu[0].abs() > 1e-10 * norm) || !norm.is_finite() {
                return Err(Error::ObliquenessLost { j, nu1: oc.nu[0], nu2: oc.nu[1] });
            }
            let st = shock_gradient(g, j);
            row.add_stencil(&st.d1, oc.nu[0], &unknown, boundary);
            row.add_stencil(&st.d2, oc.nu[1], &unknown, boundary);
            row.add_stencil(&st.value, oc.c, &unknown, boundary);
            row.rhs += oc.g0;
        } else {
            let (w1, w2) = (g.dz1(i), g.dz2(j));
            let xr = &coeffs.x_faces[g.id(i, j)];
            let xl = &coeffs.x_faces[g.id(i - 1, j)];
            let yt = &coeffs.y_faces[g.id(i, j)];
            let yb = &coeffs.y_faces[g.id(i, j - 1)];
            for (c, fi, fj) in [(xr, i, j), (xl, i - 1, j), (yt, i, j), (yb, i, j - 1)] {
                check_ellipticity(c, fi, fj)?;
            }
            row.add_flux(&x_face(g, i, j), xr, 0, w2, &unknown, boundary);
            row.add_flux(&x_face(g, i - 1, j), xl, 0, -w2, &unknown, boundary);
            row.add_flux(&y_face(g, i, j), yt, 1, w1, &unknown, boundary);
            row.add_flux(&y_face(g, i, j - 1), yb, 1, -w1, &unknown, boundary);
            row.rhs += coeffs.source[node] * w1 * w2;
        }
        row.entries.sort_unstable_by_key(|e| e.0);
        let mut last = usize::MAX;
        for (c, w) in row.entries {
            if c == last {
                *vals.last_mut().unwrap() += w;
            } else {
                cols.push(c);
                vals.push(w);
                last = c;
            }
        }
        row_ptr.push(cols.len());
        rhs.push(row.rhs);
    }
    Ok(LinearSystem { row_ptr, cols, vals, rhs, nodes })
}

/// Direct sparse LU solve with one step of iterative refinement.
pub fn solve_system(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut trip = Vec::with_capacity(sys.vals.len());
    for r in 0..n {
        for k in sys.row_ptr[r]..sys.row_ptr[r + 1] {
            trip.push(Triplet::new(r, sys.cols[k], sys.vals[k]));
        }
    }
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| Error::SolverDiverged(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| Error::SolverDiverged(format!("sparse LU failed: {e:?}")))?;
    let b = faer::Col::<f64>::from_fn(n, |k| sys.rhs[k]);
    let x0 = lu.solve(&b);
    let mut x: Vec<f64> = (0..n).map(|k| x0[k]).collect();
    let ax = sys.mul(&x);
    let r = faer::Col::<f64>::from_fn(n, |k| sys.rhs[k] - ax[k]);
    let dx = lu.solve(&r);
    for (k, xk) in x.iter_mut().enumerate() {
        *xk += dx[k];
    }
    let scale = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let row_norm = (0..n).map(|r| (sys.row_ptr[r]..sys.row_ptr[r + 1]).map(|k| sys.vals[k].abs()).sum::<f64>()).fold(0.0, f64::max);
    let xnorm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let res = sys.residual_inf(&x);
    let tol = 1e-10 * scale.max(row_norm * xnorm).max(f64::MIN_POSITIVE);
    if !(res <= tol) {
        return Err(Error::SolverDiverged(format!("linear residual {res:e} exceeds {tol:e}")));
    }
    Ok(x)
}

/// Scatters a solution vector into a full field with the boundary values.
pub fn scatter(g: &TruncatedGrid, sys: &LinearSystem, x: &[f64], boundary: &[f64]) -> Result<PotentialField> {
    let mut values = boundary.to_vec();
    for (k, &node) in sys.nodes.iter().enumerate() {
        values[node] = x[k];
    }
    for (v, t) in values.iter_mut().zip(g.tags()) {
        if *t == NodeTag::Inactive {
            *v = 0.0;
        }
    }
    let mut f = PotentialField::new(g.clone(), values)?;
    f.residual = sys.residual_inf(x);
    f.iterations = 1;
    Ok(f)
}

pub fn solve_linear(g: &TruncatedGrid, coeffs: &LinearCoefficients, boundary: &[f64]) -> Result<PotentialField> {
    let sys = assemble_linearized(g, coeffs, boundary)?;
    let x = solve_system(&sys)?;
    scatter(g, &sys, &x, boundary)
}

/// Conjugate gradients for a symmetric system written as `-A` with `A`
/// positive definite. Returns the solution and the energy
/// `E(x) = x^T A x / 2 - b^T x` after every sweep.
pub fn solve_cg(sys: &LinearSystem, tol: f64, max_iter: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !sys.is_symmetric(1e-12) {
        return Err(Error::InvalidInput("conjugate gradients needs a symmetric system".into()));
    }
    let n = sys.n();
    // The divergence form is negative definite; solve (-A) x = -b.
    let neg = |v: Vec<f64>| v.into_iter().map(|a| -a).collect::<Vec<_>>();
    let b: Vec<f64> = sys.rhs.iter().map(|v| -v).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let energy = |x: &[f64]| {
        let ax = neg(sys.mul(x));
        0.5 * dot(x, &ax) - dot(&b, x)
    };
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let b_norm = rr.sqrt().max(f64::MIN_POSITIVE);
    let mut log = vec![energy(&x)];
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * b_norm {
            return Ok((x, log));
        }
        let ap = neg(sys.mul(&p));
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SolverDiverged("matrix is not positive definite".into()));
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        log.push(energy(&x));
    }
    if rr.sqrt() <= tol * b_norm {
        Ok((x, log))
    } else {
        Err(Error::SolverDiverged(format!("conjugate gradients stalled at relative residual {:e}", rr.sqrt() / b_norm)))
    }
}
