//! Shock conditions in the hodograph variables.
//!
//! With `[.]` the jump between the downstream gradient `f = grad phi` and the
//! upstream data,
//!
//! ```text
//! G = [phi_y1] [u1 + p phi_y2] - [phi_y2] [p phi_y1]
//! H = [phi_y1] [N^1] + [phi_y2] [N^2]
//! ```
//!
//! `g1` and `g2` are the roots in `A` of `G = 0` and `H = 0`; the boundary
//! operator is `gtilde = g2 - g1`.

use super::flux::downstream_gradient;
use super::upstream::{UpstreamField, UpstreamSample};
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::lagrangian::{flux_n_jacobian_guess, FluxJacobian, LagrangianGradient, StreamData};
use crate::real::Real;

/// Bracket and tolerance for the one-dimensional `A` solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSolveOptions<T> {
    /// Roots are searched in `[a_ref / factor, a_ref * factor]`.
    pub bracket_factor: T,
    /// Relative step tolerance.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for ShockSolveOptions<T> {
    fn default() -> Self {
        Self { bracket_factor: T::lit(2.0), tol: T::lit(1e-14), max_iter: 100 }
    }
}

/// `G` or `H` together with its partials in `(f1, f2, A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionValue<T> {
    pub a: T,
    pub value: T,
    pub d_grad: [T; 2],
    pub d_a: T,
    pub flux: FluxJacobian<T>,
}

/// `gtilde` with its linearization at one shock point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockCondition<T> {
    pub g1: T,
    pub g2: T,
    pub gtilde: T,
    /// `d gtilde / d grad varphi`.
    pub nu: [T; 2],
    /// `d gtilde / d varphi` through the upstream field.
    pub c: T,
    pub g_a: T,
    pub h_a: T,
}

struct Jumps<T> {
    f: [T; 2],
    up: UpstreamSample<T>,
}

impl<T: Real> Jumps<T> {
    fn j(&self) -> [T; 2] {
        [self.f[0] - self.up.grad_phi[0], self.f[1] - self.up.grad_phi[1]]
    }
}

fn eval_flux<T: Real>(jm: &Jumps<T>, a: T, gas: &GasModel<T>) -> Result<FluxJacobian<T>> {
    let grad = LagrangianGradient::new(jm.f[0], jm.f[1]);
    let sd = StreamData { a, b: jm.up.bernoulli };
    flux_n_jacobian_guess(&grad, &sd, gas, None)
}

fn g_value<T: Real>(jm: &Jumps<T>, a: T, gas: &GasModel<T>) -> Result<ConditionValue<T>> {
    let fj = eval_flux(jm, a, gas)?;
    let [f1, f2] = jm.f;
    let [j1, j2] = jm.j();
    let up = &jm.up.state;
    let [fm1, fm2] = jm.up.grad_phi;
    let s = fj.state;
    let (u1, p, rho) = (s.u1, s.p, s.rho);
    let c2 = gas.sonic_speed_sq(&s);
    let [r1, r2, ra] = fj.drho;
    let u1_f1 = -u1 * r1 / rho;
    let u1_f2 = -u1 * (r2 / rho + T::one() / f2);
    let u1_a = -u1 * ra / rho;
    let p_f1 = c2 * r1;
    let p_f2 = c2 * r2;
    let p_a = rho.powf(gas.gamma()) + c2 * ra;
    let mom = u1 + p * f2 - (up.u1 + up.p * fm2);
    let tan = p * f1 - up.p * fm1;
    let value = j1 * mom - j2 * tan;
    let g_f1 = mom + j1 * (u1_f1 + p_f1 * f2) - j2 * (p_f1 * f1 + p);
    let g_f2 = j1 * (u1_f2 + p_f2 * f2 + p) - tan - j2 * p_f2 * f1;
    let g_a = j1 * (u1_a + p_a * f2) - j2 * p_a * f1;
    Ok(ConditionValue { a, value, d_grad: [g_f1, g_f2], d_a: g_a, flux: fj })
}

fn h_value<T: Real>(jm: &Jumps<T>, a: T, gas: &GasModel<T>) -> Result<ConditionValue<T>> {
    let fj = eval_flux(jm, a, gas)?;
    let [j1, j2] = jm.j();
    let up = &jm.up.state;
    let [n1, n2] = fj.n;
    let [[n11, n12], [_, n22]] = fj.dn;
    let value = j1 * (n1 - up.u2) + j2 * (n2 - up.p);
    let h_f1 = (n1 - up.u2) + j1 * n11 + j2 * n12;
    let h_f2 = j1 * n12 + (n2 - up.p) + j2 * n22;
    let h_a = j1 * fj.dn_da[0] + j2 * fj.dn_da[1];
    Ok(ConditionValue { a, value, d_grad: [h_f1, h_f2], d_a: h_a, flux: fj })
}

/// Damped Newton for a monotone condition in `A`, kept inside the bracket.
/// `sign` is the required sign of the `A`-derivative.
fn solve_in_a<T: Real, F>(mut eval: F, a_ref: T, a_guess: T, sign: T, opts: &ShockSolveOptions<T>, what: &str) -> Result<ConditionValue<T>>
where
    F: FnMut(T) -> Result<ConditionValue<T>>,
{
    let lo = a_ref / opts.bracket_factor;
    let hi = a_ref * opts.bracket_factor;
    let start = a_guess.max(lo).min(hi);
    // Search outward from the guess for an admissible starting point.
    let mut first = None;
    for k in 0..=64 {
        let frac = T::from_usize(k / 2).unwrap() / T::lit(32.0);
        let trial = if k % 2 == 0 { start + (hi - start) * frac } else { start - (start - lo) * frac };
        if let Ok(v) = eval(trial) {
            first = Some((trial, v));
            break;
        }
    }
    let Some((mut a, mut cur)) = first else {
        return Err(Error::RootBracketFail(format!("{what}: no admissible A in [{lo}, {hi}]")));
    };
    for _ in 0..opts.max_iter {
        if !(cur.d_a * sign > T::zero()) {
            return Err(Error::RootBracketFail(format!(
                "{what}: monotonicity violated at A = {a} (derivative {})",
                cur.d_a
            )));
        }
        let full = -cur.value / cur.d_a;
        let mut step = full;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = (a + step).max(lo).min(hi);
            if let Ok(v) = eval(trial) {
                if v.value.abs() < cur.value.abs() || step.abs() <= opts.tol * a_ref {
                    accepted = Some((trial, v));
                    break;
                }
            }
            step = step * T::lit(0.5);
        }
        let Some((next, v)) = accepted else {
            if cur.value == T::zero() {
                return Ok(cur);
            }
            return Err(Error::RootBracketFail(format!("{what}: no descent from A = {a}, residual {}", cur.value)));
        };
        let moved = (next - a).abs();
        a = next;
        cur = v;
        if moved <= opts.tol * a_ref || cur.value == T::zero() {
            return Ok(cur);
        }
        if (a == lo || a == hi) && (full.abs() > (hi - lo)) {
            return Err(Error::RootBracketFail(format!("{what}: root outside [{lo}, {hi}]")));
        }
    }
    Err(Error::RootBracketFail(format!("{what}: no convergence from A = {a_guess}")))
}

fn jumps_at<T: Real>(z2: T, varphi: T, grad_varphi: [T; 2], upstream: &UpstreamField<T>) -> Result<Jumps<T>> {
    let up = upstream.eval(varphi, z2);
    let (grad, _) = downstream_gradient(grad_varphi, up.grad_phi)?;
    Ok(Jumps { f: [grad.phi_y1, grad.phi_y2], up })
}

/// Chain rule from `d/d(f1, f2)` to `d/d(varphi_z1, varphi_z2)`.
fn to_varphi_gradient<T: Real>(d: [T; 2], grad_varphi: [T; 2]) -> [T; 2] {
    let j1 = T::one() / grad_varphi[0];
    let j2 = -grad_varphi[1] / grad_varphi[0];
    [-j1 * j1 * d[0] - j1 * j2 * d[1], -j1 * d[1]]
}

/// `G` at explicit `A`, exposed for diagnostics.
pub fn condition_g<T: Real>(z2: T, varphi: T, grad_varphi: [T; 2], a: T, upstream: &UpstreamField<T>) -> Result<ConditionValue<T>> {
    g_value(&jumps_at(z2, varphi, grad_varphi, upstream)?, a, upstream.gas())
}

/// `Htilde` at explicit `A`.
pub fn condition_h<T: Real>(z2: T, varphi: T, grad_varphi: [T; 2], a: T, upstream: &UpstreamField<T>) -> Result<ConditionValue<T>> {
    h_value(&jumps_at(z2, varphi, grad_varphi, upstream)?, a, upstream.gas())
}

/// Solves `Htilde = 0` for `A`.
pub fn entropy_update_h<T: Real>(
    z2: T,
    varphi: T,
    grad_varphi: [T; 2],
    upstream: &UpstreamField<T>,
    a_ref: T,
    opts: &ShockSolveOptions<T>,
) -> Result<T> {
    let jm = jumps_at(z2, varphi, grad_varphi, upstream)?;
    let gas = upstream.gas();
    Ok(solve_in_a(|a| h_value(&jm, a, gas), a_ref, a_ref, T::one(), opts, "H")?.a)
}

fn g_tilde_at<T: Real>(jm: &Jumps<T>, gas: &GasModel<T>, a_ref: T, opts: &ShockSolveOptions<T>) -> Result<(T, T, ConditionValue<T>, ConditionValue<T>)> {
    let g = solve_in_a(|a| g_value(jm, a, gas), a_ref, a_ref, -T::one(), opts, "G")?;
    let h = solve_in_a(|a| h_value(jm, a, gas), a_ref, a_ref, T::one(), opts, "H")?;
    Ok((g.a, h.a, g, h))
}

/// `gtilde = g2 - g1` with its oblique coefficients.
pub fn shock_condition_g<T: Real>(
    z2: T,
    varphi: T,
    grad_varphi: [T; 2],
    upstream: &UpstreamField<T>,
    a_ref: T,
    opts: &ShockSolveOptions<T>,
) -> Result<ShockCondition<T>> {
    let gas = upstream.gas();
    let jm = jumps_at(z2, varphi, grad_varphi, upstream)?;
    let (g1, g2, gc, hc) = g_tilde_at(&jm, gas, a_ref, opts)?;
    let d_f = [
        -hc.d_grad[0] / hc.d_a + gc.d_grad[0] / gc.d_a,
        -hc.d_grad[1] / hc.d_a + gc.d_grad[1] / gc.d_a,
    ];
    let nu = to_varphi_gradient(d_f, grad_varphi);
    let c = if upstream.depends_on_y1(varphi, z2) {
        let h = T::lit(1e-6) * (T::one() + varphi.abs());
        let plus = jumps_at(z2, varphi + h, grad_varphi, upstream)?;
        let minus = jumps_at(z2, varphi - h, grad_varphi, upstream)?;
        let (a1, a2, _, _) = g_tilde_at(&plus, gas, a_ref, opts)?;
        let (b1, b2, _, _) = g_tilde_at(&minus, gas, a_ref, opts)?;
        ((a2 - a1) - (b2 - b1)) / (T::lit(2.0) * h)
    } else {
        T::zero()
    };
    Ok(ShockCondition { g1, g2, gtilde: g2 - g1, nu, c, g_a: gc.d_a, h_a: hc.d_a })
}
