//! Difference stencils shared by the linear assembly and nonlinear residuals.

use super::grid::TruncatedGrid;

/// Linear combination of at most six nodal values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub idx: [usize; 6],
    pub w: [f64; 6],
    pub n: usize,
}

impl Stencil {
    pub fn empty() -> Self {
        Self { idx: [0; 6], w: [0.0; 6], n: 0 }
    }

    pub fn push(&mut self, idx: usize, w: f64) {
        self.idx[self.n] = idx;
        self.w[self.n] = w;
        self.n += 1;
    }

    pub fn apply(&self, u: &[f64]) -> f64 {
        (0..self.n).map(|k| self.w[k] * u[self.idx[k]]).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n).map(|k| (self.idx[k], self.w[k]))
    }

    fn extend_scaled(&mut self, other: &Stencil, s: f64) {
        for (i, w) in other.entries() {
            self.push(i, w * s);
        }
    }
}

/// Value and gradient stencils at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientStencil {
    pub z: (f64, f64),
    pub value: Stencil,
    pub d1: Stencil,
    pub d2: Stencil,
}

impl GradientStencil {
    pub fn apply(&self, u: &[f64]) -> (f64, [f64; 2]) {
        (self.value.apply(u), [self.d1.apply(u), self.d2.apply(u)])
    }
}

/// Centered `d/dz2` at a node, `1 <= j < n2`.
fn centered_d2(g: &TruncatedGrid, i: usize, j: usize) -> Stencil {
    let z = g.z2();
    let h = z[j + 1] - z[j - 1];
    let mut s = Stencil::empty();
    s.push(g.id(i, j + 1), 1.0 / h);
    s.push(g.id(i, j - 1), -1.0 / h);
    s
}

/// Centered `d/dz1` at a node, `1 <= i < n1`.
fn centered_d1(g: &TruncatedGrid, i: usize, j: usize) -> Stencil {
    let z = g.z1();
    let h = z[i + 1] - z[i - 1];
    let mut s = Stencil::empty();
    s.push(g.id(i + 1, j), 1.0 / h);
    s.push(g.id(i - 1, j), -1.0 / h);
    s
}

/// Face between `(i, j)` and `(i+1, j)`.
pub fn x_face(g: &TruncatedGrid, i: usize, j: usize) -> GradientStencil {
    let z1 = g.z1();
    let h = z1[i + 1] - z1[i];
    let (a, b) = (g.id(i, j), g.id(i + 1, j));
    let mut value = Stencil::empty();
    value.push(a, 0.5);
    value.push(b, 0.5);
    let mut d1 = Stencil::empty();
    d1.push(b, 1.0 / h);
    d1.push(a, -1.0 / h);
    let mut d2 = Stencil::empty();
    d2.extend_scaled(&centered_d2(g, i, j), 0.5);
    d2.extend_scaled(&centered_d2(g, i + 1, j), 0.5);
    GradientStencil { z: (0.5 * (z1[i] + z1[i + 1]), g.z2()[j]), value, d1, d2 }
}

/// Face between `(i, j)` and `(i, j+1)`, `i >= 1`.
pub fn y_face(g: &TruncatedGrid, i: usize, j: usize) -> GradientStencil {
    let z2 = g.z2();
    let h = z2[j + 1] - z2[j];
    let (a, b) = (g.id(i, j), g.id(i, j + 1));
    let mut value = Stencil::empty();
    value.push(a, 0.5);
    value.push(b, 0.5);
    let mut d2 = Stencil::empty();
    d2.push(b, 1.0 / h);
    d2.push(a, -1.0 / h);
    let mut d1 = Stencil::empty();
    d1.extend_scaled(&centered_d1(g, i, j), 0.5);
    d1.extend_scaled(&centered_d1(g, i, j + 1), 0.5);
    GradientStencil { z: (g.z1()[i], 0.5 * (z2[j] + z2[j + 1])), value, d1, d2 }
}

/// One-sided second-order gradient at a shock node `(0, j)`.
pub fn shock_gradient(g: &TruncatedGrid, j: usize) -> GradientStencil {
    let z1 = g.z1();
    let h1 = z1[1] - z1[0];
    let h2 = z1[2] - z1[1];
    let mut value = Stencil::empty();
    value.push(g.id(0, j), 1.0);
    let mut d1 = Stencil::empty();
    d1.push(g.id(0, j), -(2.0 * h1 + h2) / (h1 * (h1 + h2)));
    d1.push(g.id(1, j), (h1 + h2) / (h1 * h2));
    d1.push(g.id(2, j), -h1 / (h2 * (h1 + h2)));
    GradientStencil { z: (0.0, g.z2()[j]), value, d1, d2: centered_d2(g, 0, j) }
}
