//! Transformed fluxes `Mbar` of the hodograph equation.
//!
//! With `[phi_y1] = 1/varphi_z1` and `[phi_y2] = -varphi_z2/varphi_z1`, the
//! downstream gradient is the upstream one plus these jumps and
//!
//! ```text
//! Mbar^1 = -N^1 + N^2 varphi_z2,   Mbar^2 = -N^2 varphi_z1.
//! ```

use super::upstream::{UpstreamField, UpstreamSample};
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::lagrangian::{flux_n_jacobian_guess, FluxJacobian, LagrangianGradient, StreamData};
use crate::real::Real;

/// Hodograph unknown at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HodographPoint<T> {
    pub z1: T,
    pub z2: T,
    pub varphi: T,
    pub grad_varphi: [T; 2],
}

/// `Mbar`, its gradient Jacobian and `A`-derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbarJacobian<T> {
    pub mbar: [T; 2],
    /// `jac[i][j] = d Mbar^i / d varphi_zj`.
    pub jac: [[T; 2]; 2],
    pub dmbar_da: [T; 2],
    pub discriminant: T,
    /// Jumps `([phi_y1], [phi_y2])`.
    pub jump: [T; 2],
    pub flux: FluxJacobian<T>,
}

/// Downstream Lagrangian gradient and the jumps for a hodograph gradient.
pub fn downstream_gradient<T: Real>(grad_varphi: [T; 2], up_grad: [T; 2]) -> Result<(LagrangianGradient<T>, [T; 2])> {
    let [v1, v2] = grad_varphi;
    if !(v1 > T::zero()) || !v1.is_finite() || !v2.is_finite() {
        return Err(Error::TransformDegenerate(v1.to_f64_lossy()));
    }
    let j1 = T::one() / v1;
    let j2 = -v2 / v1;
    Ok((LagrangianGradient::new(up_grad[0] + j1, up_grad[1] + j2), [j1, j2]))
}

/// Evaluates `Mbar` and its derivatives given an upstream sample.
pub fn mbar_eval<T: Real>(
    sample: &UpstreamSample<T>,
    a: T,
    grad_varphi: [T; 2],
    gas: &GasModel<T>,
    rho_guess: Option<T>,
) -> Result<MbarJacobian<T>> {
    let (grad, jump) = downstream_gradient(grad_varphi, sample.grad_phi)?;
    let sd = StreamData { a, b: sample.bernoulli };
    let f = flux_n_jacobian_guess(&grad, &sd, gas, rho_guess)?;
    let [j1, j2] = jump;
    let [n1, n2] = f.n;
    let [[n11, n12], [_, n22]] = f.dn;
    let [v1, v2] = grad_varphi;
    let mbar = [-n1 + n2 * v2, -n2 * v1];
    let m11 = j1 * j1 * n11 + T::lit(2.0) * n12 * j1 * j2 + n22 * j2 * j2;
    let cross = n12 * j1 + n22 * j2;
    let jac = [[m11, cross + n2], [cross - n2, n22]];
    let dmbar_da = [-f.dn_da[0] + f.dn_da[1] * v2, -f.dn_da[1] * v1];
    let discriminant = n2 * n2 + j1 * j1 * f.discriminant;
    Ok(MbarJacobian { mbar, jac, dmbar_da, discriminant, jump, flux: f })
}

/// `Mbar(z, A, varphi, grad varphi)`.
pub fn mbar_flux<T: Real>(
    pt: &HodographPoint<T>,
    a: T,
    upstream: &UpstreamField<T>,
    gas: &GasModel<T>,
) -> Result<[T; 2]> {
    Ok(mbar_jacobian(pt, a, upstream, gas)?.mbar)
}

pub fn mbar_jacobian<T: Real>(
    pt: &HodographPoint<T>,
    a: T,
    upstream: &UpstreamField<T>,
    gas: &GasModel<T>,
) -> Result<MbarJacobian<T>> {
    let sample = upstream.eval(pt.varphi, pt.z2);
    mbar_eval(&sample, a, pt.grad_varphi, gas, None)
}

/// `d Mbar / d varphi` through the upstream field; zero where the extended
/// upstream potential does not depend on `y1`.
pub fn mbar_varphi_derivative<T: Real>(
    pt: &HodographPoint<T>,
    a: T,
    upstream: &UpstreamField<T>,
    gas: &GasModel<T>,
) -> Result<[T; 2]> {
    if !upstream.depends_on_y1(pt.varphi, pt.z2) {
        return Ok([T::zero(), T::zero()]);
    }
    let h = T::lit(1e-6) * (T::one() + pt.varphi.abs());
    let plus = HodographPoint { varphi: pt.varphi + h, ..*pt };
    let minus = HodographPoint { varphi: pt.varphi - h, ..*pt };
    let mp = mbar_flux(&plus, a, upstream, gas)?;
    let mm = mbar_flux(&minus, a, upstream, gas)?;
    let two_h = T::lit(2.0) * h;
    Ok([(mp[0] - mm[0]) / two_h, (mp[1] - mm[1]) / two_h])
}
