//! Analytic supersonic incoming flow and its extension past the shock.
//!
//! The incoming flow is a steady parallel shear flow: `u2 = 0`, constant
//! pressure, and `rho`, `u1` depending on the stream label `y2` only, with an
//! envelope `(1 + y2)^(-1-beta)`. Such flows solve the Euler equations exactly.

use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// How the density perturbation is balanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShearMode {
    /// `rho u1` stays at its background value; `u1` absorbs the change.
    MassFluxPreserving,
    /// `u1` stays at its background value.
    FixedVelocity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearPerturbation<T> {
    pub amplitude: T,
    pub beta: T,
    pub mode: ShearMode,
}

/// Upstream data at one Lagrangian point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpstreamSample<T> {
    pub state: FlowState<T>,
    pub phi: T,
    pub grad_phi: [T; 2],
    pub bernoulli: T,
}

#[derive(Debug, Clone)]
pub struct UpstreamField<T> {
    background: FlowState<T>,
    gas: GasModel<T>,
    mass_flux: T,
    band_slope: T,
    perturbation: Option<ShearPerturbation<T>>,
}

/// Quintic smoothstep from 1 (t <= 0) to 0 (t >= 1), with its derivative.
fn band_weight<T: Real>(t: T) -> (T, T) {
    if t <= T::zero() {
        (T::one(), T::zero())
    } else if t >= T::one() {
        (T::zero(), T::zero())
    } else {
        let t2 = t * t;
        let s = t2 * t * (T::lit(10.0) - T::lit(15.0) * t + T::lit(6.0) * t2);
        let ds = T::lit(30.0) * t2 * (T::one() - t) * (T::one() - t);
        (T::one() - s, -ds)
    }
}

impl<T: Real> UpstreamField<T> {
    /// Uniform horizontal stream; `shock_slope` is the background Lagrangian
    /// shock slope `s1`, which fixes the extension band `y1 ~ 2 s1 y2`.
    pub fn uniform(background: FlowState<T>, gas: GasModel<T>, shock_slope: T) -> Result<Self> {
        background.validate()?;
        if background.u2 != T::zero() || !(background.u1 > T::zero()) {
            return Err(Error::NotHorizontal { u2: background.u2.to_f64_lossy() });
        }
        if !(shock_slope > T::zero()) {
            return Err(Error::InvalidInput(format!("background shock slope must be positive, got {shock_slope}")));
        }
        Ok(Self {
            background,
            gas,
            mass_flux: background.rho * background.u1,
            band_slope: T::lit(2.0) * shock_slope,
            perturbation: None,
        })
    }

    pub fn with_perturbation(mut self, pert: ShearPerturbation<T>) -> Result<Self> {
        if !(pert.beta > T::zero()) || !pert.amplitude.is_finite() || pert.amplitude.abs() >= T::lit(0.5) {
            return Err(Error::InvalidInput(format!(
                "shear perturbation needs beta > 0 and |amplitude| < 0.5, got {pert:?}"
            )));
        }
        self.perturbation = if pert.amplitude == T::zero() { None } else { Some(pert) };
        for y2 in [T::zero(), T::one(), T::lit(10.0)] {
            let s = self.state_on_streamline(y2);
            if self.gas.mach(&s) <= T::one() {
                return Err(Error::NotSupersonic { mach: self.gas.mach(&s).to_f64_lossy() });
            }
        }
        Ok(self)
    }

    pub fn background(&self) -> &FlowState<T> {
        &self.background
    }

    pub fn gas(&self) -> &GasModel<T> {
        &self.gas
    }

    pub fn mass_flux(&self) -> T {
        self.mass_flux
    }

    pub fn perturbation(&self) -> Option<&ShearPerturbation<T>> {
        self.perturbation.as_ref()
    }

    pub fn is_uniform(&self) -> bool {
        self.perturbation.is_none()
    }

    fn envelope(&self, y2: T) -> (T, T, T) {
        match self.perturbation {
            None => (T::zero(), T::zero(), T::zero()),
            Some(p) => {
                let y = y2.max(T::zero());
                let e = (T::one() + y).powf(-(T::one() + p.beta));
                let big_e = (T::one() - (T::one() + y).powf(-p.beta)) / p.beta;
                (p.amplitude, e, big_e)
            }
        }
    }

    /// Incoming state on the streamline labelled `y2`.
    pub fn state_on_streamline(&self, y2: T) -> FlowState<T> {
        let bg = &self.background;
        let (eps, e, _) = self.envelope(y2);
        match self.perturbation.map(|p| p.mode) {
            None => *bg,
            Some(ShearMode::MassFluxPreserving) => {
                let rho = bg.rho * (T::one() + eps * e);
                FlowState { u1: self.mass_flux / rho, u2: T::zero(), p: bg.p, rho }
            }
            Some(ShearMode::FixedVelocity) => {
                let rho = bg.rho / (T::one() + eps * e);
                FlowState { u1: bg.u1, u2: T::zero(), p: bg.p, rho }
            }
        }
    }

    pub fn bernoulli(&self, y2: T) -> T {
        self.gas.bernoulli_b(&self.state_on_streamline(y2))
    }

    /// Background upstream potential `y2 / (rho0 u10)`.
    pub fn background_potential(&self, y2: T) -> T {
        y2 / self.mass_flux
    }

    /// Potential and its gradient, including the band extension.
    fn potential(&self, y1: T, y2: T) -> (T, [T; 2]) {
        let m = self.mass_flux;
        match self.perturbation {
            Some(ShearPerturbation { mode: ShearMode::FixedVelocity, .. }) => {
                let (eps, e, big_e) = self.envelope(y2);
                let (w, dw) = band_weight(y1 - self.band_slope * y2);
                let phi = (y2 + w * eps * big_e) / m;
                let d1 = dw * eps * big_e / m;
                let d2 = (T::one() + w * eps * e - dw * self.band_slope * eps * big_e) / m;
                (phi, [d1, d2])
            }
            _ => (y2 / m, [T::zero(), T::one() / m]),
        }
    }

    pub fn eval(&self, y1: T, y2: T) -> UpstreamSample<T> {
        let state = self.state_on_streamline(y2);
        let (phi, grad_phi) = self.potential(y1, y2);
        UpstreamSample { state, phi, grad_phi, bernoulli: self.gas.bernoulli_b(&state) }
    }

    /// Whether the extended potential varies with `y1` at this point.
    pub fn depends_on_y1(&self, y1: T, y2: T) -> bool {
        match self.perturbation {
            Some(ShearPerturbation { mode: ShearMode::FixedVelocity, .. }) => {
                let t = y1 - self.band_slope * y2;
                t > T::zero() && t < T::one()
            }
            _ => false,
        }
    }
}
