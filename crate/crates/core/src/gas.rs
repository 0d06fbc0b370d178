//! Polytropic gas thermodynamics and primitive flow states.

use crate::error::{Error, Result};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// Polytropic gas with adiabatic exponent `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel<T> {
    gamma: T,
}

/// Primitive steady Euler state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState<T> {
    pub u1: T,
    pub u2: T,
    pub p: T,
    pub rho: T,
}

impl<T: Real> GasModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma.is_finite() && gamma > T::one()) {
            return Err(Error::InvalidInput(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    #[inline]
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `gamma / (gamma - 1)`, the enthalpy factor.
    #[inline]
    pub fn enthalpy_factor(&self) -> T {
        self.gamma / (self.gamma - T::one())
    }

    #[inline]
    pub fn sonic_speed(&self, s: &FlowState<T>) -> T {
        (self.gamma * s.p / s.rho).sqrt()
    }

    #[inline]
    pub fn sonic_speed_sq(&self, s: &FlowState<T>) -> T {
        self.gamma * s.p / s.rho
    }

    #[inline]
    pub fn mach(&self, s: &FlowState<T>) -> T {
        s.speed() / self.sonic_speed(s)
    }

    #[inline]
    pub fn is_subsonic(&self, s: &FlowState<T>) -> bool {
        self.mach(s) < T::one()
    }

    /// Entropy variable `A = p / rho^gamma`.
    #[inline]
    pub fn entropy_a(&self, s: &FlowState<T>) -> T {
        s.p / s.rho.powf(self.gamma)
    }

    /// Bernoulli quantity `|u|^2/2 + gamma p / ((gamma-1) rho)`.
    #[inline]
    pub fn bernoulli_b(&self, s: &FlowState<T>) -> T {
        T::lit(0.5) * s.speed_sq() + self.enthalpy_factor() * s.p / s.rho
    }

    /// Gradient of `A` with respect to `(u1, u2, p, rho)`.
    pub fn entropy_a_gradient(&self, s: &FlowState<T>) -> [T; 4] {
        let a = self.entropy_a(s);
        [T::zero(), T::zero(), a / s.p, -self.gamma * a / s.rho]
    }

    /// Gradient of `B` with respect to `(u1, u2, p, rho)`.
    pub fn bernoulli_b_gradient(&self, s: &FlowState<T>) -> [T; 4] {
        let h = self.enthalpy_factor();
        [s.u1, s.u2, h / s.rho, -h * s.p / (s.rho * s.rho)]
    }

    /// Pressure on the isentrope `A` at density `rho`.
    #[inline]
    pub fn pressure(&self, a: T, rho: T) -> T {
        a * rho.powf(self.gamma)
    }
}

impl<T: Real> FlowState<T> {
    pub fn new(u1: T, u2: T, p: T, rho: T) -> Result<Self> {
        let s = Self { u1, u2, p, rho };
        s.validate()?;
        Ok(s)
    }

    /// Horizontal state of Mach number `mach` with the given pressure and density.
    pub fn horizontal(mach: T, p: T, rho: T, gas: &GasModel<T>) -> Result<Self> {
        let c = (gas.gamma() * p / rho).sqrt();
        Self::new(mach * c, T::zero(), p, rho)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.u1.is_finite() && self.u2.is_finite() && self.p.is_finite() && self.rho.is_finite();
        if !finite || self.p <= T::zero() || self.rho <= T::zero() {
            return Err(Error::InvalidInput(format!(
                "flow state needs finite values with p > 0 and rho > 0: {self:?}"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn speed_sq(&self) -> T {
        self.u1 * self.u1 + self.u2 * self.u2
    }

    #[inline]
    pub fn speed(&self) -> T {
        self.speed_sq().sqrt()
    }

    /// Flow angle `atan(u2/u1)`.
    #[inline]
    pub fn angle(&self) -> T {
        self.u2.atan2(self.u1)
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.u1, self.u2, self.p, self.rho]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self { u1: a[0], u2: a[1], p: a[2], rho: a[3] }
    }

    /// Conversion to another scalar type.
    pub fn cast<U: Real>(&self) -> FlowState<U> {
        FlowState {
            u1: U::lit(self.u1.to_f64_lossy()),
            u2: U::lit(self.u2.to_f64_lossy()),
            p: U::lit(self.p.to_f64_lossy()),
            rho: U::lit(self.rho.to_f64_lossy()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air() -> GasModel<f64> {
        GasModel::new(1.4).unwrap()
    }

    fn st(u1: f64, u2: f64, p: f64, rho: f64) -> FlowState<f64> {
        FlowState::new(u1, u2, p, rho).unwrap()
    }

    #[test]
    fn rejects_gamma_at_most_one() {
        assert!(GasModel::new(1.0).is_err());
        assert!(GasModel::new(0.5f32).is_err());
    }

    #[test]
    fn rejects_nonpositive_state() {
        assert!(FlowState::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(FlowState::new(1.0, 0.0, 1.0, -1.0).is_err());
        assert!(FlowState::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sonic_speed_values() {
        let g = air();
        assert!((g.sonic_speed(&st(0.0, 0.0, 1.4, 1.4)) - 1.4f64.sqrt()).abs() < 1e-15);
        assert!((g.sonic_speed(&st(0.0, 0.0, 1.0, 1.4)) - 1.0).abs() < 1e-15);
        let c = g.sonic_speed(&st(0.0, 0.0, 4.5, 8.0 / 3.0));
        assert!((c - 1.537_042_614_893_939_8).abs() < 1e-12);
    }

    #[test]
    fn mach_and_subsonic_flag() {
        let g = air();
        let rest = st(0.0, 0.0, 1.0, 1.0);
        assert_eq!(g.mach(&rest), 0.0);
        assert!(g.is_subsonic(&rest));
        let c = g.sonic_speed(&rest);
        let sonic = st(c, 0.0, 1.0, 1.0);
        assert!((g.mach(&sonic) - 1.0).abs() < 1e-15);
        assert!(!g.is_subsonic(&st(c * (1.0 + 1e-12), 0.0, 1.0, 1.0)));
        let up = FlowState::horizontal(2.0, 1.0, 1.0, &g).unwrap();
        assert!((g.mach(&up) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        let g = air();
        assert_eq!(g.entropy_a(&st(0.0, 0.0, 1.0, 1.0)), 1.0);
        let a = g.entropy_a(&st(0.0, 0.0, 4.5, 8.0 / 3.0));
        assert!((a - 1.139_872_532_501_767_8).abs() < 1e-12);
        let a2 = g.entropy_a(&st(0.3, 0.1, 9.0, 8.0 / 3.0));
        assert!((a2 - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_values() {
        let g = air();
        assert!((g.bernoulli_b(&st(0.0, 0.0, 1.0, 1.0)) - 3.5).abs() < 1e-15);
        let up = FlowState::horizontal(2.0, 1.0, 1.0, &g).unwrap();
        let down = st(0.887_411_967_464_942_3, 0.0, 4.5, 8.0 / 3.0);
        assert!((g.bernoulli_b(&up) - 6.3).abs() < 1e-13);
        assert!((g.bernoulli_b(&down) - 6.3).abs() < 1e-13);
    }

    #[test]
    fn works_in_f32() {
        let g = GasModel::new(1.4f32).unwrap();
        let s = FlowState::new(0.0f32, 0.0, 1.0, 1.0).unwrap();
        assert!((g.bernoulli_b(&s) - 3.5).abs() < 1e-6);
    }
}
