//! Discrete comparison principles and corner barrier functions.
//!
//! The operator here is the non-divergence form
//! `L u = a11 u_11 + 2 a12 u_12 + a22 u_22 + b1 u_1 + b2 u_2` on a uniform
//! square grid, discretized with a positive-type nine-point stencil so that
//! the discrete maximum principle holds whenever `a11, a22 >= |a12|` and the
//! cell Peclet condition is met.

use super::linear::{solve_system, LinearSystem};
use crate::error::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonVariant {
    /// `Lv >= 0 >= Lw`: `sup v/w <= sup_boundary v+/w`.
    Subsolution,
    /// `Lv >= Lw`, `Lw < 0`: `sup v/w <= max(sup_boundary v+/w, 1)`.
    Capped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub variant: ComparisonVariant,
    pub interior_sup: f64,
    pub boundary_sup: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Nine-point operator on the nodes of `[0, side]^2` with `n` cells per side.
#[derive(Debug, Clone)]
pub struct GridOperator {
    n: usize,
    h: f64,
    a: Vec<[[f64; 2]; 2]>,
    b: Vec<[f64; 2]>,
    interior: Vec<bool>,
    boundary: Vec<bool>,
}

const NEIGHBOURS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

impl GridOperator {
    /// Interior nodes are those inside `domain` whose eight neighbours exist;
    /// boundary nodes are the remaining neighbours of interior nodes.
    pub fn new(
        n: usize,
        side: f64,
        a: impl Fn(f64, f64) -> [[f64; 2]; 2],
        b: impl Fn(f64, f64) -> [f64; 2],
        domain: impl Fn(f64, f64) -> bool,
    ) -> Result<Self> {
        if n < 4 || !(side > 0.0) {
            return Err(Error::InvalidInput(format!("grid operator needs n >= 4 and side > 0, got {n}, {side}")));
        }
        let h = side / n as f64;
        let m = n + 1;
        let mut av = Vec::with_capacity(m * m);
        let mut bv = Vec::with_capacity(m * m);
        let mut interior = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (i as f64 * h, j as f64 * h);
                av.push(a(x, y));
                bv.push(b(x, y));
                interior[i * m + j] = i > 0 && j > 0 && i < n && j < n && domain(x, y);
            }
        }
        let mut boundary = vec![false; m * m];
        for i in 1..n {
            for j in 1..n {
                if interior[i * m + j] {
                    for (di, dj) in NEIGHBOURS {
                        let k = (i as isize + di) as usize * m + (j as isize + dj) as usize;
                        if !interior[k] {
                            boundary[k] = true;
                        }
                    }
                }
            }
        }
        Ok(Self { n, h, a: av, b: bv, interior, boundary })
    }

    pub fn len(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let m = self.n + 1;
        ((k / m) as f64 * self.h, (k % m) as f64 * self.h)
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.interior[k]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.boundary[k]
    }

    /// Stencil at an interior node as `(node, weight)` pairs, centre first.
    pub fn stencil(&self, k: usize) -> [(usize, f64); 9] {
        let m = self.n + 1;
        let h2 = self.h * self.h;
        let [[a11, a12], [_, a22]] = self.a[k];
        let [b1, b2] = self.b[k];
        let c = a12.abs() / h2;
        let off = |di: isize, dj: isize| (k as isize + di * m as isize + dj) as usize;
        let x = (a11 / h2 - c, b1 / (2.0 * self.h));
        let y = (a22 / h2 - c, b2 / (2.0 * self.h));
        let (d1, d2) = if a12 >= 0.0 { ((1, 1), (-1, -1)) } else { ((1, -1), (-1, 1)) };
        [
            (k, -2.0 * a11 / h2 - 2.0 * a22 / h2 + 2.0 * c),
            (off(1, 0), x.0 + x.1),
            (off(-1, 0), x.0 - x.1),
            (off(0, 1), y.0 + y.1),
            (off(0, -1), y.0 - y.1),
            (off(d1.0, d1.1), c),
            (off(d2.0, d2.1), c),
            (off(-d1.0, d1.1), 0.0),
            (off(d1.0, -d1.1), 0.0),
        ]
    }

    /// Whether every interior stencil has nonnegative off-diagonal weights.
    pub fn is_monotone(&self) -> bool {
        (0..self.len()).filter(|&k| self.interior[k]).all(|k| self.stencil(k)[1..].iter().all(|e| e.1 >= 0.0))
    }

    /// `L u` at interior nodes (zero elsewhere) and the per-node round-off scale.
    pub fn apply(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut out = vec![0.0; self.len()];
        let mut scale = vec![0.0; self.len()];
        for k in (0..self.len()).filter(|&k| self.interior[k]) {
            for (node, w) in self.stencil(k) {
                out[k] += w * u[node];
                scale[k] += (w * u[node]).abs();
            }
        }
        (out, scale)
    }

    /// Solves `L u = f` at interior nodes with `u = g` on boundary nodes.
    pub fn solve(&self, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let mut index = vec![usize::MAX; self.len()];
        let nodes: Vec<usize> = (0..self.len()).filter(|&k| self.interior[k]).collect();
        for (r, &k) in nodes.iter().enumerate() {
            index[k] = r;
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut rhs = Vec::with_capacity(nodes.len());
        for &k in &nodes {
            let mut st: Vec<(usize, f64)> = Vec::with_capacity(9);
            let mut r = f[k];
            for (node, w) in self.stencil(k) {
                if w == 0.0 {
                    continue;
                }
                if self.interior[node] {
                    st.push((index[node], w));
                } else {
                    r -= w * g[node];
                }
            }
            st.sort_unstable_by_key(|e| e.0);
            for (c, w) in st {
                cols.push(c);
                vals.push(w);
            }
            row_ptr.push(cols.len());
            rhs.push(r);
        }
        let sys = LinearSystem { row_ptr, cols, vals, rhs, nodes: nodes.clone() };
        let x = solve_system(&sys)?;
        let mut u = g.to_vec();
        for (r, &k) in nodes.iter().enumerate() {
            u[k] = x[r];
        }
        Ok(u)
    }
}

/// Checks the discrete differential inequalities for `variant`, then compares
/// interior and boundary ratios `v / w` with slack `slack`.
pub fn comparison_check(op: &GridOperator, v: &[f64], w: &[f64], variant: ComparisonVariant, slack: f64) -> Result<ComparisonVerdict> {
    if v.len() != op.len() || w.len() != op.len() {
        return Err(Error::InvalidInput("fields must cover every grid node".into()));
    }
    let active = |k: usize| op.is_interior(k) || op.is_boundary(k);
    if let Some(k) = (0..op.len()).find(|&k| active(k) && !(w[k] > 0.0)) {
        return Err(Error::PreconditionViolated(format!("w = {} is not positive at node {k}", w[k])));
    }
    let (lv, sv) = op.apply(v);
    let (lw, sw) = op.apply(w);
    for k in (0..op.len()).filter(|&k| op.is_interior(k)) {
        let tol = 1e-10 * (sv[k] + sw[k]);
        let ok = match variant {
            ComparisonVariant::Subsolution => lv[k] >= -tol && lw[k] <= tol,
            ComparisonVariant::Capped => lv[k] - lw[k] >= -tol && lw[k] < 0.0,
        };
        if !ok {
            return Err(Error::PreconditionViolated(format!("differential inequality fails at node {k}: Lv = {}, Lw = {}", lv[k], lw[k])));
        }
    }
    let mut interior_sup = f64::NEG_INFINITY;
    let mut boundary_sup = 0.0f64;
    for k in 0..op.len() {
        if op.is_interior(k) {
            interior_sup = interior_sup.max(v[k] / w[k]);
        } else if op.is_boundary(k) {
            boundary_sup = boundary_sup.max(v[k].max(0.0) / w[k]);
        }
    }
    let bound = match variant {
        ComparisonVariant::Subsolution => boundary_sup,
        ComparisonVariant::Capped => boundary_sup.max(1.0),
    };
    Ok(ComparisonVerdict { variant, interior_sup, boundary_sup, bound, holds: interior_sup <= bound + slack })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BarrierKind {
    /// `r^-beta sin(alpha theta + tau) + r^-beta sin^alpha theta`.
    Decay { beta: f64, alpha: f64, tau: f64 },
    /// `r^(1+alpha) sin((1+alpha+tau) theta + tau)`.
    Regularity { alpha: f64, tau: f64 },
}

/// Barrier in the polar coordinates of `zbar = K^-1 z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerBarrier {
    pub kind: BarrierKind,
    k: [[f64; 2]; 2],
    kinv: [[f64; 2]; 2],
}

/// `r^s sin(t theta + tau)`.
pub fn vbar(r: f64, theta: f64, s: f64, t: f64, tau: f64) -> f64 {
    r.powf(s) * (t * theta + tau).sin()
}

/// Closed-form Laplacian of [`vbar`] in the barred coordinates.
pub fn vbar_laplacian(r: f64, theta: f64, s: f64, t: f64, tau: f64) -> f64 {
    (s * s - t * t) * r.powf(s - 2.0) * (t * theta + tau).sin()
}

/// Upper-triangular `K` with `K K^T = a` for the symmetric part of `a`.
pub fn k_factor(a: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let a12 = 0.5 * (a[0][1] + a[1][0]);
    let det = a[0][0] * a[1][1] - a12 * a12;
    if !(a[1][1] > 0.0 && det > 0.0) {
        return Err(Error::InvalidInput(format!("coefficient matrix is not positive definite (a22 = {}, det = {det})", a[1][1])));
    }
    let s = a[1][1].sqrt();
    Ok([[(det / a[1][1]).sqrt(), a12 / s], [0.0, s]])
}

impl CornerBarrier {
    pub fn new(kind: BarrierKind, k: [[f64; 2]; 2]) -> Result<Self> {
        match kind {
            BarrierKind::Decay { beta, alpha, tau } => {
                if !(0.0 < beta && beta < alpha && alpha < 1.0) || !(tau >= 0.0) {
                    return Err(Error::BadExponents(format!("decay barrier needs 0 < beta < alpha < 1 and tau >= 0, got beta {beta}, alpha {alpha}, tau {tau}")));
                }
            }
            BarrierKind::Regularity { alpha, tau } => {
                if !(0.0 < alpha && alpha < 1.0) || !(0.0..1.0).contains(&tau) {
                    return Err(Error::BadExponents(format!("regularity barrier needs 0 < alpha < 1 and 0 <= tau < 1, got alpha {alpha}, tau {tau}")));
                }
            }
        }
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            return Err(Error::InvalidInput("K must be invertible".into()));
        }
        let kinv = [[k[1][1] / det, -k[0][1] / det], [-k[1][0] / det, k[0][0] / det]];
        Ok(Self { kind, k, kinv })
    }

    pub fn k(&self) -> [[f64; 2]; 2] {
        self.k
    }

    /// Polar coordinates of `K^-1 z`.
    pub fn polar(&self, z1: f64, z2: f64) -> (f64, f64) {
        let b1 = self.kinv[0][0] * z1 + self.kinv[0][1] * z2;
        let b2 = self.kinv[1][0] * z1 + self.kinv[1][1] * z2;
        (b1.hypot(b2), b2.atan2(b1))
    }

    /// Angle of the image of the positive `z2`-axis.
    pub fn opening_angle(&self) -> f64 {
        self.polar(0.0, 1.0).1
    }

    pub fn eval(&self, z1: f64, z2: f64) -> f64 {
        let (r, th) = self.polar(z1, z2);
        match self.kind {
            BarrierKind::Decay { beta, alpha, tau } => vbar(r, th, -beta, alpha, tau) + r.powf(-beta) * th.sin().max(0.0).powf(alpha),
            BarrierKind::Regularity { alpha, tau } => vbar(r, th, 1.0 + alpha, 1.0 + alpha + tau, tau),
        }
    }

    /// Closed form of `sum a_ij d_ij` applied to the barrier, `a = K K^T`.
    pub fn principal_part(&self, z1: f64, z2: f64) -> f64 {
        let (r, th) = self.polar(z1, z2);
        match self.kind {
            BarrierKind::Decay { beta, alpha, tau } => {
                let s = th.sin();
                vbar_laplacian(r, th, -beta, alpha, tau) + (beta * beta - alpha * alpha) * r.powf(-beta - 2.0) * s.powf(alpha)
                    - alpha * (1.0 - alpha) * r.powf(-beta - 2.0) * s.powf(alpha - 2.0)
            }
            BarrierKind::Regularity { alpha, tau } => vbar_laplacian(r, th, 1.0 + alpha, 1.0 + alpha + tau, tau),
        }
    }
}

/// Quarter annulus `r_in < |z| < r_out` in the open first quadrant.
pub fn quarter_annulus(r_in: f64, r_out: f64) -> impl Fn(f64, f64) -> bool {
    move |x, y| {
        let r = x.hypot(y);
        x > 0.0 && y > 0.0 && r > r_in && r < r_out
    }
}

/// Largest value of the discrete `L v` over interior nodes, for a barrier `v`.
pub fn barrier_sup(op: &GridOperator, barrier: &CornerBarrier) -> f64 {
    let v: Vec<f64> = (0..op.len()).map(|k| {
        let (x, y) = op.point(k);
        if op.is_interior(k) || op.is_boundary(k) {
            barrier.eval(x, y)
        } else {
            0.0
        }
    }).collect();
    let (lv, _) = op.apply(&v);
    (0..op.len()).filter(|&k| op.is_interior(k)).fold(f64::NEG_INFINITY, |m, k| m.max(lv[k]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessOutcome {
    pub seed: u64,
    pub subsolution: ComparisonVerdict,
    pub capped: ComparisonVerdict,
    pub barrier_sup: f64,
}

/// Random smooth field `1 + amp * sum c_k sin(p_k x + q_k y + r_k)`.
fn random_field(rng: &mut StdRng, amp: f64) -> impl Fn(f64, f64) -> f64 {
    let modes: Vec<[f64; 4]> = (0..3)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.0..6.3)])
        .collect();
    move |x, y| 1.0 + amp * modes.iter().map(|m| m[0] * (m[1] * x + m[2] * y + m[3]).sin()).sum::<f64>() / 3.0
}

/// One randomized comparison trial on a quarter annulus. The operator is a
/// smooth perturbation of a random constant elliptic matrix; `w = 1 + v3` with
/// `v3` the decay barrier adapted to that matrix.
pub fn randomized_trial(seed: u64, n: usize) -> Result<HarnessOutcome> {
    let mut rng = StdRng::seed_from_u64(seed);
    let a11 = rng.gen_range(0.8..1.5);
    let a22 = rng.gen_range(0.8..1.5);
    let a12 = rng.gen_range(-0.25..0.25);
    let (p11, p22, p12) = (random_field(&mut rng, 0.05), random_field(&mut rng, 0.05), random_field(&mut rng, 0.05));
    let (q1, q2) = (random_field(&mut rng, 1.0), random_field(&mut rng, 1.0));
    let bamp = rng.gen_range(0.0..0.02);
    let a = move |x: f64, y: f64| {
        let c = a12 * p12(x, y);
        [[a11 * p11(x, y), c], [c, a22 * p22(x, y)]]
    };
    let b = move |x: f64, y: f64| [bamp * (q1(x, y) - 1.0), bamp * (q2(x, y) - 1.0)];
    let op = GridOperator::new(n, 3.0, a, b, quarter_annulus(1.0, 3.0))?;
    if !op.is_monotone() {
        return Err(Error::PreconditionViolated(format!("trial {seed}: stencil is not monotone")));
    }
    let barrier = CornerBarrier::new(BarrierKind::Decay { beta: 0.1, alpha: 0.5, tau: 0.1 }, k_factor([[a11, a12], [a12, a22]])?)?;
    let bsup = barrier_sup(&op, &barrier);
    let w: Vec<f64> = (0..op.len()).map(|k| {
        let (x, y) = op.point(k);
        1.0 + barrier.eval(x, y)
    }).collect();
    let (lw, _) = op.apply(&w);
    let mut g = vec![0.0; op.len()];
    let mut f1 = vec![0.0; op.len()];
    let mut f2 = vec![0.0; op.len()];
    for k in 0..op.len() {
        g[k] = rng.gen_range(-1.0..1.5);
        let f = rng.gen_range(0.0..1.0);
        f1[k] = f;
        f2[k] = lw[k] + f;
    }
    let v1 = op.solve(&f1, &g)?;
    let v2 = op.solve(&f2, &g)?;
    Ok(HarnessOutcome {
        seed,
        subsolution: comparison_check(&op, &v1, &w, ComparisonVariant::Subsolution, 1e-8)?,
        capped: comparison_check(&op, &v2, &w, ComparisonVariant::Capped, 1e-8)?,
        barrier_sup: bsup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> GridOperator {
        GridOperator::new(n, 1.0, |_, _| [[1.0, 0.0], [0.0, 1.0]], |_, _| [0.0; 2], |_, _| true).unwrap()
    }

    #[test]
    fn harmonic_over_constant() {
        let op = laplacian(20);
        let g: Vec<f64> = (0..op.len()).map(|k| {
            let (x, y) = op.point(k);
            (x * x - y * y).clamp(-1.0, 1.0)
        }).collect();
        let v = op.solve(&vec![0.0; op.len()], &g).unwrap();
        let w = vec![2.0; op.len()];
        let verdict = comparison_check(&op, &v, &w, ComparisonVariant::Subsolution, 1e-8).unwrap();
        assert!(verdict.holds && verdict.interior_sup <= 0.5 + 1e-12);
        assert!((verdict.boundary_sup - 0.5).abs() < 1e-12);
    }

    #[test]
    fn precondition_is_enforced() {
        let op = laplacian(10);
        let v: Vec<f64> = (0..op.len()).map(|k| -op.point(k).0.powi(2)).collect();
        let w = vec![1.0; op.len()];
        assert!(matches!(comparison_check(&op, &v, &w, ComparisonVariant::Subsolution, 1e-8), Err(Error::PreconditionViolated(_))));
        let w0 = vec![0.0; op.len()];
        assert!(matches!(comparison_check(&op, &w, &w0, ComparisonVariant::Subsolution, 1e-8), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn barrier_laplacian_closed_form() {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let (beta, alpha) = (0.2, 0.6);
        let b = CornerBarrier::new(BarrierKind::Decay { beta, alpha, tau: 0.0 }, id).unwrap();
        for &(x, y) in &[(1.0, 0.5), (0.3, 2.0), (3.0, 3.0)] {
            let (r, th) = b.polar(x, y);
            let lap = vbar_laplacian(r, th, -beta, alpha, 0.0);
            assert!(lap < 0.0);
            assert!((lap - (beta * beta - alpha * alpha) * r.powf(-beta - 2.0) * (alpha * th).sin()).abs() < 1e-15);
            // s = t gives a harmonic function.
            assert_eq!(vbar_laplacian(r, th, 0.7, 0.7, 0.1), 0.0);
        }
        // Five-point Laplacian converges to the closed form at second order.
        let (x, y) = (1.0, 0.7);
        let (r, th) = b.polar(x, y);
        let f = |x: f64, y: f64| {
            let (r, th) = b.polar(x, y);
            vbar(r, th, -beta, alpha, 0.0)
        };
        let exact = vbar_laplacian(r, th, -beta, alpha, 0.0);
        let err = |h: f64| ((f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h) - exact).abs();
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn principal_part_matches_anisotropic_differences() {
        let a = [[1.3, 0.2], [0.2, 0.9]];
        let k = k_factor(a).unwrap();
        let kk = [[k[0][0] * k[0][0] + k[0][1] * k[0][1], k[0][1] * k[1][1]], [0.0, k[1][1] * k[1][1]]];
        assert!((kk[0][0] - 1.3).abs() < 1e-14 && (kk[0][1] - 0.2).abs() < 1e-14 && (kk[1][1] - 0.9).abs() < 1e-14);
        for kind in [BarrierKind::Decay { beta: 0.1, alpha: 0.5, tau: 0.1 }, BarrierKind::Regularity { alpha: 0.3, tau: 0.05 }] {
            let b = CornerBarrier::new(kind, k).unwrap();
            let (x, y, h) = (0.8, 0.9, 1e-3);
            let f = |x: f64, y: f64| b.eval(x, y);
            let dxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
            let dyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
            let dxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
            let lhs = a[0][0] * dxx + 2.0 * a[0][1] * dxy + a[1][1] * dyy;
            assert!((lhs - b.principal_part(x, y)).abs() < 1e-5, "{lhs} {}", b.principal_part(x, y));
        }
    }

    #[test]
    fn bad_exponents() {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(CornerBarrier::new(BarrierKind::Decay { beta: 0.6, alpha: 0.5, tau: 0.0 }, id), Err(Error::BadExponents(_))));
        assert!(matches!(CornerBarrier::new(BarrierKind::Regularity { alpha: 1.5, tau: 0.0 }, id), Err(Error::BadExponents(_))));
    }

    #[test]
    fn corner_barrier_is_a_strict_supersolution() {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let op = GridOperator::new(60, 3.0, |_, _| id, |_, _| [0.0; 2], quarter_annulus(1.0, 3.0)).unwrap();
        let b = CornerBarrier::new(BarrierKind::Decay { beta: 0.1, alpha: 0.5, tau: 0.1 }, id).unwrap();
        assert!(barrier_sup(&op, &b) < 0.0);
    }

    #[test]
    fn randomized_trials_hold() {
        for seed in 0..10 {
            let out = randomized_trial(seed, 48).unwrap();
            assert!(out.subsolution.holds && out.capped.holds, "{out:?}");
            assert!(out.barrier_sup < 0.0);
        }
    }
}
