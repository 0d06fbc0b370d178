//! Lagrangian coordinates `(y1, y2) = (x1, psi)` and the potential `x2 = phi(y)`.
//!
//! In these coordinates `phi_y = (u2/u1, 1/(rho u1))`, the entropy `A` and the
//! Bernoulli quantity `B` are functions of `y2` alone, and the state is
//! recovered from `(A, B, grad phi)` through the subsonic density root of
//!
//! ```text
//! (phi_y1^2 + 1) / (2 phi_y2^2) + gamma/(gamma-1) A rho^(gamma+1) = B rho^2.
//! ```

use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::real::Real;
use crate::roots::newton_bracketed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianGradient<T> {
    pub phi_y1: T,
    pub phi_y2: T,
}

/// Streamline invariants `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamData<T> {
    pub a: T,
    pub b: T,
}

/// Fluxes `N = (u2, p)` with their derivatives at one gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxJacobian<T> {
    pub state: FlowState<T>,
    pub n: [T; 2],
    /// `dn[i][j] = dN^i / d phi_yj`.
    pub dn: [[T; 2]; 2],
    /// `dN^i / dA`.
    pub dn_da: [T; 2],
    /// `d rho / d (phi_y1, phi_y2, A)`.
    pub drho: [T; 3],
    pub discriminant: T,
    /// `c^2 - q^2`.
    pub sonic_gap: T,
}

impl<T: Real> LagrangianGradient<T> {
    pub fn new(phi_y1: T, phi_y2: T) -> Self {
        Self { phi_y1, phi_y2 }
    }
}

impl<T: Real> StreamData<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput(format!("stream data needs A > 0 and B > 0, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn of_state(s: &FlowState<T>, gas: &GasModel<T>) -> Self {
        Self { a: gas.entropy_a(s), b: gas.bernoulli_b(s) }
    }
}

pub fn to_lagrangian_gradient<T: Real>(s: &FlowState<T>) -> Result<LagrangianGradient<T>> {
    if !(s.u1 > T::zero()) || !(s.rho > T::zero()) {
        return Err(Error::Stagnation { u1: s.u1.to_f64_lossy() });
    }
    Ok(LagrangianGradient { phi_y1: s.u2 / s.u1, phi_y2: T::one() / (s.rho * s.u1) })
}

/// Density at which the Bernoulli relation turns sonic.
pub fn sonic_density<T: Real>(sd: &StreamData<T>, gas: &GasModel<T>) -> T {
    let g = gas.gamma();
    (T::lit(2.0) * (g - T::one()) * sd.b / (g * (g + T::one()) * sd.a)).powf(T::one() / (g - T::one()))
}

/// Stagnation density, where the enthalpy term alone balances `B rho^2`.
pub fn max_density<T: Real>(sd: &StreamData<T>, gas: &GasModel<T>) -> T {
    let g = gas.gamma();
    (sd.b * (g - T::one()) / (g * sd.a)).powf(T::one() / (g - T::one()))
}

/// Residual of the Bernoulli density relation and its `rho` derivative.
pub fn density_residual<T: Real>(rho: T, grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> (T, T) {
    let g = gas.gamma();
    let h = gas.enthalpy_factor();
    let kin = (grad.phi_y1 * grad.phi_y1 + T::one()) / (T::lit(2.0) * grad.phi_y2 * grad.phi_y2);
    let rg = rho.powf(g);
    let f = kin + h * sd.a * rg * rho - sd.b * rho * rho;
    let df = (g + T::one()) * h * sd.a * rg - T::lit(2.0) * sd.b * rho;
    (f, df)
}

/// Subsonic density root, started from `guess` when it lies in the bracket.
pub fn rho_from_gradient_guess<T: Real>(
    grad: &LagrangianGradient<T>,
    sd: &StreamData<T>,
    gas: &GasModel<T>,
    guess: Option<T>,
) -> Result<T> {
    if !(grad.phi_y2 > T::zero()) || !grad.phi_y1.is_finite() {
        return Err(Error::NoSubsonicRoot);
    }
    let lo = sonic_density(sd, gas);
    let hi = max_density(sd, gas);
    let (f_lo, _) = density_residual(lo, grad, sd, gas);
    if !(f_lo < T::zero()) {
        return Err(Error::NoSubsonicRoot);
    }
    let x0 = guess.unwrap_or(hi);
    let xtol = T::lit(4.0) * T::eps() * hi;
    newton_bracketed(|r| density_residual(r, grad, sd, gas), lo, hi, x0, xtol, 200).map_err(|_| Error::NoSubsonicRoot)
}

pub fn rho_from_gradient<T: Real>(grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> Result<T> {
    rho_from_gradient_guess(grad, sd, gas, None)
}

fn state_with_rho<T: Real>(rho: T, grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> FlowState<T> {
    let u1 = T::one() / (rho * grad.phi_y2);
    FlowState { u1, u2: grad.phi_y1 * u1, p: gas.pressure(sd.a, rho), rho }
}

pub fn state_from_gradient<T: Real>(grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> Result<FlowState<T>> {
    let rho = rho_from_gradient(grad, sd, gas)?;
    Ok(state_with_rho(rho, grad, sd, gas))
}

pub fn flux_n<T: Real>(grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> Result<(T, T)> {
    let s = state_from_gradient(grad, sd, gas)?;
    Ok((s.u2, s.p))
}

/// Closed-form Jacobian of `N` in the gradient, plus `A`-derivatives.
pub fn flux_n_jacobian<T: Real>(grad: &LagrangianGradient<T>, sd: &StreamData<T>, gas: &GasModel<T>) -> Result<FluxJacobian<T>> {
    flux_n_jacobian_guess(grad, sd, gas, None)
}

pub fn flux_n_jacobian_guess<T: Real>(
    grad: &LagrangianGradient<T>,
    sd: &StreamData<T>,
    gas: &GasModel<T>,
    guess: Option<T>,
) -> Result<FluxJacobian<T>> {
    let rho = rho_from_gradient_guess(grad, sd, gas, guess)?;
    let s = state_with_rho(rho, grad, sd, gas);
    jacobian_at_state(s, grad, gas)
}

/// Jacobian of `N` at an already reconstructed state.
pub fn jacobian_at_state<T: Real>(s: FlowState<T>, grad: &LagrangianGradient<T>, gas: &GasModel<T>) -> Result<FluxJacobian<T>> {
    let g = gas.gamma();
    let h = gas.enthalpy_factor();
    let c2 = gas.sonic_speed_sq(&s);
    let q2 = s.speed_sq();
    let gap = c2 - q2;
    if !(gap > T::zero()) {
        return Err(Error::SonicDegeneracy { gap: gap.to_f64_lossy() });
    }
    let rho = s.rho;
    let (u1, u2) = (s.u1, s.u2);
    let n11 = u1 * (c2 - u1 * u1) / gap;
    let n12 = -c2 * rho * u1 * u2 / gap;
    let n22 = c2 * rho * rho * q2 * u1 / gap;
    let rg1 = rho.powf(g - T::one());
    let n1a = h * rg1 * u2 / gap;
    let n2a = -rho.powf(g) * (q2 + c2 / (g - T::one())) / gap;
    let f_rho = rho * gap;
    let f1 = grad.phi_y1;
    let f2 = grad.phi_y2;
    let drho = [
        -(f1 / (f2 * f2)) / f_rho,
        ((f1 * f1 + T::one()) / (f2 * f2 * f2)) / f_rho,
        -(h * rho.powf(g + T::one())) / f_rho,
    ];
    Ok(FluxJacobian {
        state: s,
        n: [u2, s.p],
        dn: [[n11, n12], [n12, n22]],
        dn_da: [n1a, n2a],
        drho,
        discriminant: c2 * rho * rho * u1 * u1 * u1 * u1 / gap,
        sonic_gap: gap,
    })
}

/// Lagrangian shock slope `-[phi_y2]/[phi_y1]` from the two one-sided gradients.
pub fn shock_slope_from_jump<T: Real>(up: &LagrangianGradient<T>, down: &LagrangianGradient<T>) -> Result<T> {
    let j1 = down.phi_y1 - up.phi_y1;
    let j2 = down.phi_y2 - up.phi_y2;
    let scale = up.phi_y1.abs() + down.phi_y1.abs() + T::one();
    if j1.abs() <= T::lit(16.0) * T::eps() * scale {
        return Err(Error::ParallelJump);
    }
    Ok(-j2 / j1)
}

/// Cumulative trapezoidal integral of `f` over the nodes `x`, starting at 0.
pub fn cumulative_trapezoid<T: Real>(x: &[T], f: &[T]) -> Vec<T> {
    assert_eq!(x.len(), f.len());
    let mut out = Vec::with_capacity(x.len());
    let mut acc = T::zero();
    for k in 0..x.len() {
        if k > 0 {
            acc = acc + T::lit(0.5) * (f[k] + f[k - 1]) * (x[k] - x[k - 1]);
        }
        out.push(acc);
    }
    out
}

/// Stream function along one vertical line from samples of `rho u1`.
pub fn stream_function_column<T: Real>(x2: &[T], rho_u1: &[T]) -> Vec<T> {
    cumulative_trapezoid(x2, rho_u1)
}

/// Heights `x2 = phi` along one streamline-transverse line from `1/(rho u1)`.
pub fn potential_column<T: Real>(y2: &[T], inv_flux: &[T]) -> Vec<T> {
    cumulative_trapezoid(y2, inv_flux)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air() -> GasModel<f64> {
        GasModel::new(1.4).unwrap()
    }

    fn normal_shock_down() -> FlowState<f64> {
        FlowState::new(0.887_411_967_464_942_3, 0.0, 4.5, 8.0 / 3.0).unwrap()
    }

    #[test]
    fn gradient_definition() {
        let s = FlowState::new(2.0, 0.0, 1.0, 0.5).unwrap();
        let g = to_lagrangian_gradient(&s).unwrap();
        assert_eq!((g.phi_y1, g.phi_y2), (0.0, 1.0));
        let t = 0.3f64;
        let s = FlowState::new(1.2, 1.2 * t.tan(), 1.0, 1.0).unwrap();
        assert!((to_lagrangian_gradient(&s).unwrap().phi_y1 - t.tan()).abs() < 1e-15);
        let back = FlowState { u1: -1.0, u2: 0.0, p: 1.0, rho: 1.0 };
        assert!(matches!(to_lagrangian_gradient(&back), Err(Error::Stagnation { .. })));
    }

    #[test]
    fn density_recovers_normal_shock_state() {
        let g = air();
        let d = normal_shock_down();
        let grad = to_lagrangian_gradient(&d).unwrap();
        let sd = StreamData::of_state(&d, &g);
        let rho = rho_from_gradient(&grad, &sd, &g).unwrap();
        assert!((rho - 8.0 / 3.0).abs() < 1e-10);
        let (res, _) = density_residual(rho, &grad, &sd, &g);
        assert!(res.abs() / (sd.b * rho * rho) < 1e-12);
        let (n1, n2) = flux_n(&grad, &sd, &g).unwrap();
        assert_eq!(n1, 0.0);
        assert!((n2 - 4.5).abs() < 1e-10);
    }

    #[test]
    fn sonic_threshold_is_the_minimum_of_the_residual() {
        let g = air();
        let sd = StreamData::of_state(&normal_shock_down(), &g);
        let grad = to_lagrangian_gradient(&normal_shock_down()).unwrap();
        let rs = sonic_density(&sd, &g);
        let (_, d) = density_residual(rs, &grad, &sd, &g);
        assert!(d.abs() < 1e-12 * sd.b * rs);
    }

    #[test]
    fn supersonic_gradient_has_no_subsonic_root() {
        let g = air();
        let up = FlowState::horizontal(2.0, 1.0, 1.0, &g).unwrap();
        let sd = StreamData::of_state(&up, &g);
        // Far too little mass flux per unit height for the available enthalpy.
        let grad = LagrangianGradient::new(0.0, 0.05);
        assert_eq!(rho_from_gradient(&grad, &sd, &g), Err(Error::NoSubsonicRoot));
    }

    #[test]
    fn state_round_trip() {
        let g = air();
        let s = FlowState::new(0.6, 0.2, 2.0, 1.7).unwrap();
        let grad = to_lagrangian_gradient(&s).unwrap();
        let sd = StreamData::of_state(&s, &g);
        let r = state_from_gradient(&grad, &sd, &g).unwrap();
        for (a, b) in r.as_array().iter().zip(s.as_array()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((g.entropy_a(&r) - sd.a).abs() < 1e-10);
        assert!((g.bernoulli_b(&r) - sd.b).abs() < 1e-10);
    }

    #[test]
    fn jacobian_symmetry_and_discriminant() {
        let g = air();
        let s = FlowState::new(0.6, 0.2, 2.0, 1.7).unwrap();
        let grad = to_lagrangian_gradient(&s).unwrap();
        let sd = StreamData::of_state(&s, &g);
        let j = flux_n_jacobian(&grad, &sd, &g).unwrap();
        assert_eq!(j.dn[0][1], j.dn[1][0]);
        let det = j.dn[0][0] * j.dn[1][1] - j.dn[0][1] * j.dn[1][0];
        assert!(j.discriminant > 0.0);
        assert!((det - j.discriminant).abs() < 1e-9 * j.discriminant);
    }

    #[test]
    fn jacobian_matches_differences() {
        let g = air();
        let s = FlowState::new(0.7, 0.25, 1.8, 1.5).unwrap();
        let grad = to_lagrangian_gradient(&s).unwrap();
        let sd = StreamData::of_state(&s, &g);
        let j = flux_n_jacobian(&grad, &sd, &g).unwrap();
        let h = 1e-6;
        let n_at = |f1: f64, f2: f64, a: f64| {
            let (n1, n2) = flux_n(&LagrangianGradient::new(f1, f2), &StreamData { a, b: sd.b }, &g).unwrap();
            [n1, n2]
        };
        for i in 0..2 {
            let d1 = (n_at(grad.phi_y1 + h, grad.phi_y2, sd.a)[i] - n_at(grad.phi_y1 - h, grad.phi_y2, sd.a)[i]) / (2.0 * h);
            let d2 = (n_at(grad.phi_y1, grad.phi_y2 + h, sd.a)[i] - n_at(grad.phi_y1, grad.phi_y2 - h, sd.a)[i]) / (2.0 * h);
            let da = (n_at(grad.phi_y1, grad.phi_y2, sd.a + h)[i] - n_at(grad.phi_y1, grad.phi_y2, sd.a - h)[i]) / (2.0 * h);
            assert!((d1 - j.dn[i][0]).abs() < 1e-6 * j.dn[i][0].abs().max(1.0));
            assert!((d2 - j.dn[i][1]).abs() < 1e-6 * j.dn[i][1].abs().max(1.0));
            assert!((da - j.dn_da[i]).abs() < 1e-6 * j.dn_da[i].abs().max(1.0));
        }
    }

    #[test]
    fn sonic_state_is_degenerate() {
        let g = air();
        let c = (1.4f64).sqrt();
        let s = FlowState::new(c, 0.0, 1.0, 1.0).unwrap();
        let grad = to_lagrangian_gradient(&s).unwrap();
        assert!(matches!(jacobian_at_state(s, &grad, &g), Err(Error::SonicDegeneracy { .. })));
    }

    #[test]
    fn slope_from_jump() {
        let up = LagrangianGradient::new(0.0_f64, 0.5);
        assert_eq!(shock_slope_from_jump(&up, &up), Err(Error::ParallelJump));
        let down = LagrangianGradient::new(0.2, 0.4);
        assert!((shock_slope_from_jump::<f64>(&up, &down).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let x: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let f: Vec<f64> = x.iter().map(|x| 2.0 * x + 1.0).collect();
        let i = cumulative_trapezoid(&x, &f);
        assert!((i[10] - 2.0).abs() < 1e-14);
    }
}
