//! Entropy profile on the shock: anchoring at the vertex, the cutoff `w_t`
//! and the discrete X-norm.

use crate::error::Result;
use crate::gas::{FlowState, GasModel};
use crate::hodograph::Profile;
use crate::shock_polar::{Root, ShockPolar};
use serde::{Deserialize, Serialize};

/// Entropy behind the polar root for the local data at the vertex.
pub fn anchor_a0(upstream_at_origin: FlowState<f64>, wedge_slope: f64, gas: GasModel<f64>, root: Root) -> Result<f64> {
    let polar = ShockPolar::new(upstream_at_origin, gas)?;
    let pt = polar.solve(wedge_slope.atan(), root)?;
    Ok(gas.entropy_a(&pt.downstream))
}

/// `chi`: 1 on `[0, 1]`, 0 on `[2, inf)`, a monotone quintic bridge between.
pub fn cutoff_chi(z2: f64) -> f64 {
    if z2 <= 1.0 {
        1.0
    } else if z2 >= 2.0 {
        0.0
    } else {
        let t = z2 - 1.0;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// `w_t(z2) = A0 + (anchor - A0) chi(z2)`.
pub fn cutoff_wt(anchor: f64, a0_plus: f64) -> impl Fn(f64) -> f64 {
    move |z2| a0_plus + (anchor - a0_plus) * cutoff_chi(z2)
}

/// Entropy samples on the shock nodes `z2_j`, `j = 0..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub anchor: f64,
    pub a0_plus: f64,
}

impl EntropyProfile {
    /// Starts from `w_t` on the given nodes.
    pub fn initial(nodes: Vec<f64>, anchor: f64, a0_plus: f64) -> Self {
        let wt = cutoff_wt(anchor, a0_plus);
        let values = nodes.iter().map(|&z| wt(z)).collect();
        Self { nodes, values, anchor, a0_plus }
    }

    pub fn profile(&self) -> Result<Profile<f64>> {
        Profile::new(self.nodes.clone(), self.values.clone())
    }

    /// `lambda = A - w_t`, which vanishes at the vertex.
    pub fn lambda(&self) -> Vec<f64> {
        let wt = cutoff_wt(self.anchor, self.a0_plus);
        self.nodes.iter().zip(&self.values).map(|(&z, &a)| a - wt(z)).collect()
    }

    /// `A - A0` at the nodes.
    pub fn deviation(&self) -> Vec<f64> {
        self.values.iter().map(|a| a - self.a0_plus).collect()
    }
}

/// Discrete X-norm on `(0, inf)`: `sup (1+z)^(1+beta) |f|` plus
/// `sup (1+z)^(2+beta) min(z, 1)^(1-alpha) |f'|` with midpoint difference quotients.
pub fn x_norm(nodes: &[f64], f: &[f64], alpha: f64, beta: f64) -> f64 {
    let mut s0 = 0.0f64;
    for (&z, &v) in nodes.iter().zip(f) {
        s0 = s0.max((1.0 + z).powf(1.0 + beta) * v.abs());
    }
    let mut s1 = 0.0f64;
    for k in 1..nodes.len() {
        let zm = 0.5 * (nodes[k] + nodes[k - 1]);
        let d = (f[k] - f[k - 1]) / (nodes[k] - nodes[k - 1]);
        s1 = s1.max((1.0 + zm).powf(2.0 + beta) * zm.min(1.0).powf(1.0 - alpha) * d.abs());
    }
    s0 + s1
}

/// Discrete Z-norm on `(0, inf)`: `sup |f| + sup (1+x)^(1+beta) |f'|`.
pub fn z_norm(samples: &[(f64, f64, f64)], beta: f64) -> f64 {
    let s0 = samples.iter().fold(0.0f64, |m, s| m.max(s.1.abs()));
    let s1 = samples.iter().fold(0.0f64, |m, s| m.max((1.0 + s.0).powf(1.0 + beta) * s.2.abs()));
    s0 + s1
}
