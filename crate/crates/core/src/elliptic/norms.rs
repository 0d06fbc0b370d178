//! Discrete weighted norms and dyadic-annulus decay fits.

use super::grid::{NodeTag, PotentialField, TruncatedGrid};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// `sup (1+r)^beta |w| + sup (1+r)^(1+beta) |grad_h w|` over the grid, the
/// gradient part taken at interior nodes with centered differences.
pub fn weighted_norm(g: &TruncatedGrid, w: &[f64], beta: f64) -> f64 {
    let mut s0 = 0.0f64;
    let mut s1 = 0.0f64;
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            let t = g.tag(i, j);
            if t == NodeTag::Inactive {
                continue;
            }
            let (a, b) = g.point(i, j);
            let r = a.hypot(b);
            s0 = s0.max((1.0 + r).powf(beta) * w[g.id(i, j)].abs());
            if t == NodeTag::Interior {
                let [d1, d2] = centered_gradient(g, w, i, j);
                s1 = s1.max((1.0 + r).powf(1.0 + beta) * d1.hypot(d2));
            }
        }
    }
    s0 + s1
}

/// Centered gradient at an interior node.
pub fn centered_gradient(g: &TruncatedGrid, w: &[f64], i: usize, j: usize) -> [f64; 2] {
    let (z1, z2) = (g.z1(), g.z2());
    [
        (w[g.id(i + 1, j)] - w[g.id(i - 1, j)]) / (z1[i + 1] - z1[i - 1]),
        (w[g.id(i, j + 1)] - w[g.id(i, j - 1)]) / (z2[j + 1] - z2[j - 1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSup {
    pub r_lo: f64,
    pub r_hi: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub annuli: Vec<AnnulusSup>,
    /// Decay exponent `e` in `sup ~ r^(-e)`; `None` for an identically zero field.
    pub exponent: Option<f64>,
    pub identically_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormReport {
    pub sup_weighted_value: f64,
    pub value: DecayFit,
    /// Decay of `r |grad v|`.
    pub gradient: DecayFit,
    /// Whether the value exponent reaches `beta - 0.1`.
    pub meets_target: bool,
}

/// Sup of `|v|` over dyadic annuli `[2^k, 2^(k+1))` inside `[r_min, r_max]`.
pub fn dyadic_sups(samples: &[(f64, f64)], r_min: f64, r_max: f64) -> Vec<AnnulusSup> {
    let mut annuli = Vec::new();
    let mut k = r_min.log2().ceil() as i32;
    while 2f64.powi(k + 1) <= r_max * (1.0 + 1e-12) {
        let (lo, hi) = (2f64.powi(k), 2f64.powi(k + 1));
        let mut sup = 0.0f64;
        let mut any = false;
        for &(r, v) in samples {
            if r >= lo && r < hi {
                sup = sup.max(v.abs());
                any = true;
            }
        }
        if any {
            annuli.push(AnnulusSup { r_lo: lo, r_hi: hi, sup });
        }
        k += 1;
    }
    annuli
}

/// Least-squares slope of `log sup` against `log r`, skipping annuli whose
/// sup falls below `floor` times the largest one.
pub fn loglog_slope(annuli: &[AnnulusSup], floor: f64) -> Result<f64> {
    let top = annuli.iter().fold(0.0f64, |m, a| m.max(a.sup));
    let pts: Vec<(f64, f64)> = annuli
        .iter()
        .filter(|a| a.sup > floor * top && a.sup > 0.0)
        .map(|a| ((a.r_lo * a.r_hi).sqrt().ln(), a.sup.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientAnnuli { found: pts.len(), needed: 3 });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Decay exponent `e` in `sup ~ r^(-e)` over the dyadic annuli in `[1, r_max]`.
/// Annuli whose sup falls below `floor` times the largest sup are treated as
/// round-off and dropped.
pub fn fit_decay(samples: &[(f64, f64)], r_max: f64, floor: f64) -> Result<DecayFit> {
    let annuli = dyadic_sups(samples, 1.0, r_max);
    if annuli.iter().all(|a| a.sup == 0.0) {
        if annuli.len() < 3 {
            return Err(Error::InsufficientAnnuli { found: annuli.len(), needed: 3 });
        }
        return Ok(DecayFit { annuli, exponent: None, identically_zero: true });
    }
    let slope = loglog_slope(&annuli, floor)?;
    Ok(DecayFit { annuli, exponent: Some(-slope), identically_zero: false })
}

/// Decay of `field - reference` over the grid's inscribed quarter disc.
pub fn measure_decay(field: &PotentialField, reference: &[f64], beta: f64) -> Result<WeightedNormReport> {
    let g = &field.grid;
    let k = g.cutoff_slope();
    let r_max = 0.5 * k * g.radius() / (1.0 + k * k).sqrt();
    let w: Vec<f64> = field.values.iter().zip(reference).map(|(a, b)| a - b).collect();
    let mut vals = Vec::new();
    let mut grads = Vec::new();
    for i in 0..=g.n1() {
        for j in 0..=g.n2() {
            let t = g.tag(i, j);
            if t == NodeTag::Inactive {
                continue;
            }
            let (a, b) = g.point(i, j);
            let r = a.hypot(b);
            vals.push((r, w[g.id(i, j)]));
            if t == NodeTag::Interior {
                let [d1, d2] = centered_gradient(g, &w, i, j);
                grads.push((r, r * d1.hypot(d2)));
            }
        }
    }
    let value = fit_decay(&vals, r_max, 1e-12)?;
    let gradient = fit_decay(&grads, r_max, 1e-12)?;
    let meets_target = value.exponent.is_some_and(|e| e >= beta - 0.1);
    Ok(WeightedNormReport { sup_weighted_value: weighted_norm(g, &w, beta), value, gradient, meets_target })
}
