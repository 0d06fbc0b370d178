//! Truncated quarter-plane grid `Q^R = {0 < z2 < -k (z1 - R), z1 > 0}`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "ratio")]
pub enum Stretching {
    Uniform,
    /// Geometric spacing growing away from the corner by `ratio` per cell.
    Graded(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeTag {
    /// `z2 = 0`, Dirichlet.
    Wedge,
    /// `z1 = 0`, oblique or Dirichlet.
    Shock,
    Interior,
    /// Outside `Q^R` but referenced by a stencil; Dirichlet.
    Cutoff,
    Inactive,
}

impl NodeTag {
    pub fn label(self) -> &'static str {
        match self {
            NodeTag::Wedge => "wedge",
            NodeTag::Shock => "shock",
            NodeTag::Interior => "interior",
            NodeTag::Cutoff => "cutoff",
            NodeTag::Inactive => "inactive",
        }
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, NodeTag::Shock | NodeTag::Interior)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedGrid {
    r: f64,
    k: f64,
    n1: usize,
    n2: usize,
    stretching: Stretching,
    z1: Vec<f64>,
    z2: Vec<f64>,
    tags: Vec<NodeTag>,
    /// Unknown index per node, `usize::MAX` for Dirichlet or inactive nodes.
    unknown: Vec<usize>,
    unknown_nodes: Vec<(usize, usize)>,
}

fn axis(len: f64, n: usize, stretching: Stretching) -> Vec<f64> {
    match stretching {
        Stretching::Graded(ratio) if ratio > 1.0 => {
            let denom = ratio.powi(n as i32) - 1.0;
            (0..=n).map(|i| len * (ratio.powi(i as i32) - 1.0) / denom).collect()
        }
        _ => (0..=n).map(|i| len * i as f64 / n as f64).collect(),
    }
}

impl TruncatedGrid {
    pub fn new(r: f64, k: f64, n1: usize, n2: usize, stretching: Stretching) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("grid needs R > 0 and k > 0, got R = {r}, k = {k}")));
        }
        if n1 < 4 || n2 < 4 {
            return Err(Error::InvalidInput(format!("grid needs at least 4 cells per axis, got {n1} x {n2}")));
        }
        if let Stretching::Graded(ratio) = stretching {
            if !(1.0..=1.2).contains(&ratio) {
                return Err(Error::InvalidInput(format!("grading ratio must lie in [1, 1.2], got {ratio}")));
            }
        }
        let z1 = axis(r, n1, stretching);
        let z2 = axis(k * r, n2, stretching);
        let inside = |i: usize, j: usize| z2[j] < k * (r - z1[i]) * (1.0 - 1e-12);
        let mut tags = vec![NodeTag::Inactive; (n1 + 1) * (n2 + 1)];
        let id = |i: usize, j: usize| i * (n2 + 1) + j;
        for i in 0..=n1 {
            for j in 0..=n2 {
                tags[id(i, j)] = if j == 0 {
                    NodeTag::Wedge
                } else if i == 0 && inside(0, j) {
                    NodeTag::Shock
                } else if i >= 1 && inside(i, j) {
                    NodeTag::Interior
                } else {
                    NodeTag::Inactive
                };
            }
        }
        // Nodes referenced by unknown stencils (3x3 block, three columns at the shock).
        let mut referenced = Vec::new();
        for i in 0..=n1 {
            for j in 0..=n2 {
                let t = tags[id(i, j)];
                if !t.is_unknown() {
                    continue;
                }
                let (ilo, ihi) = if t == NodeTag::Shock { (0, 2) } else { (i - 1, i + 1) };
                for a in ilo..=ihi.min(n1) {
                    for b in (j - 1)..=(j + 1).min(n2) {
                        if tags[id(a, b)] == NodeTag::Inactive {
                            referenced.push(id(a, b));
                        }
                    }
                }
            }
        }
        for k in referenced {
            tags[k] = NodeTag::Cutoff;
        }
        let mut unknown = vec![usize::MAX; tags.len()];
        let mut unknown_nodes = Vec::new();
        for i in 0..=n1 {
            for j in 0..=n2 {
                if tags[id(i, j)].is_unknown() {
                    unknown[id(i, j)] = unknown_nodes.len();
                    unknown_nodes.push((i, j));
                }
            }
        }
        Ok(Self { r, k, n1, n2, stretching, z1, z2, tags, unknown, unknown_nodes })
    }

    /// Doubles the resolution; coarse nodes are a subset of the fine ones.
    pub fn refined(&self) -> Result<Self> {
        let s = match self.stretching {
            Stretching::Uniform => Stretching::Uniform,
            Stretching::Graded(r) => Stretching::Graded(r.sqrt()),
        };
        Self::new(self.r, self.k, 2 * self.n1, 2 * self.n2, s)
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn cutoff_slope(&self) -> f64 {
        self.k
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn stretching(&self) -> Stretching {
        self.stretching
    }

    pub fn z1(&self) -> &[f64] {
        &self.z1
    }

    pub fn z2(&self) -> &[f64] {
        &self.z2
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn id(&self, i: usize, j: usize) -> usize {
        i * (self.n2 + 1) + j
    }

    pub fn ij(&self, id: usize) -> (usize, usize) {
        (id / (self.n2 + 1), id % (self.n2 + 1))
    }

    pub fn tag(&self, i: usize, j: usize) -> NodeTag {
        self.tags[self.id(i, j)]
    }

    pub fn tags(&self) -> &[NodeTag] {
        &self.tags
    }

    pub fn unknown_index(&self, i: usize, j: usize) -> Option<usize> {
        let u = self.unknown[self.id(i, j)];
        (u != usize::MAX).then_some(u)
    }

    pub fn unknown_nodes(&self) -> &[(usize, usize)] {
        &self.unknown_nodes
    }

    pub fn n_unknowns(&self) -> usize {
        self.unknown_nodes.len()
    }

    /// Shock-column node indices `j`, in increasing order.
    pub fn shock_rows(&self) -> Vec<usize> {
        (1..=self.n2).filter(|&j| self.tag(0, j) == NodeTag::Shock).collect()
    }

    /// Control-volume widths.
    pub fn dz1(&self, i: usize) -> f64 {
        let lo = self.z1[i.saturating_sub(1)];
        let hi = self.z1[(i + 1).min(self.n1)];
        0.5 * (hi - lo)
    }

    pub fn dz2(&self, j: usize) -> f64 {
        let lo = self.z2[j.saturating_sub(1)];
        let hi = self.z2[(j + 1).min(self.n2)];
        0.5 * (hi - lo)
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.z1[i], self.z2[j])
    }

    /// Smallest and largest neighbouring spacing ratio along both axes.
    pub fn max_spacing(&self) -> f64 {
        self.z1.windows(2).chain(self.z2.windows(2)).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Grid function with its grid and solve metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub grid: TruncatedGrid,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl PotentialField {
    pub fn new(grid: TruncatedGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!("field has {} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().zip(grid.tags()).any(|(v, t)| *t != NodeTag::Inactive && !v.is_finite()) {
            return Err(Error::InvalidInput("field has non-finite values".into()));
        }
        Ok(Self { grid, values, iterations: 0, residual: 0.0 })
    }

    pub fn from_fn(grid: TruncatedGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for i in 0..=grid.n1() {
            for j in 0..=grid.n2() {
                if grid.tag(i, j) != NodeTag::Inactive {
                    let (a, b) = grid.point(i, j);
                    values[grid.id(i, j)] = f(a, b);
                }
            }
        }
        Self { grid, values, iterations: 0, residual: 0.0 }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.id(i, j)]
    }

    /// Largest absolute value over active nodes.
    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.tags())
            .filter(|(_, t)| **t != NodeTag::Inactive)
            .fold(0.0, |m, (v, _)| m.max(v.abs()))
    }

    /// CSV with columns `z1,z2,value,tag`, active nodes only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z1,z2,value,tag\n");
        for i in 0..=self.grid.n1() {
            for j in 0..=self.grid.n2() {
                let t = self.grid.tag(i, j);
                if t != NodeTag::Inactive {
                    let (a, b) = self.grid.point(i, j);
                    out.push_str(&format!("{a:e},{b:e},{:e},{}\n", self.at(i, j), t.label()));
                }
            }
        }
        out
    }
}
