//! Oblique shocks off a uniform horizontal supersonic stream.
//!
//! The Rankine-Hugoniot system is eliminated in closed form in the downstream
//! pressure `p`: with `m = rho- u1-` the mass flux and `[f] = f+ - f-`,
//!
//! ```text
//! u1  = u1- - [p]/m
//! rho = (gamma p/(gamma-1) - [p]/2) / (B - u1^2/2 - u1 [p]/(2m))
//! k^2 = ([p]/u1) (1/m - 1/(rho u1)),   u2 = k u1,   s = u1 k/[p]
//! ```
//!
//! so the polar is single-valued in `p` between the upstream pressure and the
//! normal-shock pressure. Wedge angles are mapped to `p` by a bracketed 1D
//! solve on the strong or weak side of the tangency pressure.

use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::real::Real;
use crate::roots::{brent, scan_bracket};
use serde::{Deserialize, Serialize};

/// Which of the two attached-shock roots to select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Root {
    Strong,
    Weak,
}

/// Location of a downstream state on the polar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arc {
    TS,
    TH,
    Tangent,
    Sonic,
    NormalS,
    Other,
}

impl Arc {
    pub fn label(&self) -> &'static str {
        match self {
            Arc::TS => "TS",
            Arc::TH => "TH",
            Arc::Tangent => "Tangent",
            Arc::Sonic => "Sonic",
            Arc::NormalS => "NormalS",
            Arc::Other => "Other",
        }
    }
}

/// A downstream state on the shock polar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint<T> {
    pub downstream: FlowState<T>,
    /// Lagrangian shock slope `s` of the front `y1 = s y2`.
    pub shock_slope_s: T,
    /// Flow deflection `atan(u2/u1)` in radians.
    pub wedge_angle: T,
    pub arc: Arc,
    pub cp: T,
}

/// Sonic and detachment angles of a polar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSummary<T> {
    pub theta_sonic: T,
    pub theta_critical: T,
    pub upstream: FlowState<T>,
    pub p_sonic: T,
    pub p_tangent: T,
    pub p_normal: T,
}

/// Precomputed polar for one upstream state.
#[derive(Debug, Clone)]
pub struct ShockPolar<T> {
    upstream: FlowState<T>,
    gas: GasModel<T>,
    mass_flux: T,
    bernoulli: T,
    p_normal: T,
    p_tangent: T,
    p_sonic: T,
    theta_critical: T,
    theta_sonic: T,
}

const SCAN_INTERVALS: usize = 256;

fn check_upstream<T: Real>(upstream: &FlowState<T>, gas: &GasModel<T>) -> Result<()> {
    upstream.validate()?;
    if upstream.u2 != T::zero() {
        return Err(Error::NotHorizontal { u2: upstream.u2.to_f64_lossy() });
    }
    let mach = gas.mach(upstream);
    let mach_f = mach.to_f64_lossy();
    if upstream.u1 <= T::zero() || mach <= T::one() {
        return Err(Error::NotSupersonic { mach: mach_f });
    }
    if mach - T::one() < T::lit(1e-6) {
        return Err(Error::NearSonic { mach: mach_f });
    }
    Ok(())
}

impl<T: Real> ShockPolar<T> {
    pub fn new(upstream: FlowState<T>, gas: GasModel<T>) -> Result<Self> {
        check_upstream(&upstream, &gas)?;
        let g = gas.gamma();
        let mach = gas.mach(&upstream);
        let p_normal = upstream.p * (T::lit(2.0) * g * mach * mach - (g - T::one())) / (g + T::one());
        let mut polar = Self {
            upstream,
            gas,
            mass_flux: upstream.rho * upstream.u1,
            bernoulli: gas.bernoulli_b(&upstream),
            p_normal,
            p_tangent: T::nan(),
            p_sonic: T::nan(),
            theta_critical: T::nan(),
            theta_sonic: T::nan(),
        };
        let span = p_normal - upstream.p;
        let lo = upstream.p + span * T::lit(1e-6);
        let xtol = T::lit(8.0) * T::eps() * p_normal;

        let cp_at = |p: T| polar.cp_at_pressure(p);
        let (a, b) = scan_bracket(cp_at, lo, p_normal, SCAN_INTERVALS)
            .ok_or_else(|| Error::RootBracketFail("no tangency point on the polar".into()))?;
        let p_tangent = brent(|p| polar.cp_at_pressure(p), a, b, xtol, 200)?;

        let mach_gap = |p: T| match polar.state_at_pressure(p) {
            Ok(s) => polar.gas.mach(&s) - T::one(),
            Err(_) => T::nan(),
        };
        let (a, b) = scan_bracket(mach_gap, lo, p_normal, SCAN_INTERVALS)
            .ok_or_else(|| Error::RootBracketFail("no sonic point on the polar".into()))?;
        let p_sonic = brent(mach_gap, a, b, xtol, 200)?;

        polar.p_tangent = p_tangent;
        polar.p_sonic = p_sonic;
        polar.theta_critical = polar.angle_at_pressure(p_tangent)?;
        polar.theta_sonic = polar.angle_at_pressure(p_sonic)?;
        Ok(polar)
    }

    pub fn upstream(&self) -> &FlowState<T> {
        &self.upstream
    }

    pub fn gas(&self) -> &GasModel<T> {
        &self.gas
    }

    pub fn p_normal(&self) -> T {
        self.p_normal
    }

    pub fn p_tangent(&self) -> T {
        self.p_tangent
    }

    pub fn p_sonic(&self) -> T {
        self.p_sonic
    }

    pub fn theta_critical(&self) -> T {
        self.theta_critical
    }

    pub fn theta_sonic(&self) -> T {
        self.theta_sonic
    }

    pub fn summary(&self) -> PolarSummary<T> {
        PolarSummary {
            theta_sonic: self.theta_sonic,
            theta_critical: self.theta_critical,
            upstream: self.upstream,
            p_sonic: self.p_sonic,
            p_tangent: self.p_tangent,
            p_normal: self.p_normal,
        }
    }

    /// Downstream state at pressure `p` in `[p-, p_normal]`.
    pub fn state_at_pressure(&self, p: T) -> Result<FlowState<T>> {
        let up = &self.upstream;
        let slack = T::lit(64.0) * T::eps() * self.p_normal;
        if !(p >= up.p - slack && p <= self.p_normal + slack) {
            return Err(Error::DegeneratePoint(format!(
                "pressure {p} outside the polar range [{}, {}]",
                up.p, self.p_normal
            )));
        }
        let p = p.max(up.p).min(self.p_normal);
        let jp = p - up.p;
        if jp == T::zero() {
            return Ok(*up);
        }
        let m = self.mass_flux;
        let half = T::lit(0.5);
        let u1 = up.u1 - jp / m;
        let rho = (self.gas.enthalpy_factor() * p - half * jp) / (self.bernoulli - half * u1 * u1 - half * u1 * jp / m);
        let k2 = (jp / u1) * (T::one() / m - T::one() / (rho * u1));
        let k = k2.max(T::zero()).sqrt();
        FlowState::new(u1, k * u1, p, rho)
    }

    pub fn angle_at_pressure(&self, p: T) -> Result<T> {
        Ok(self.state_at_pressure(p)?.angle())
    }

    fn cp_at_pressure(&self, p: T) -> T {
        match self.state_at_pressure(p) {
            Ok(s) => cp_value(&s, &self.upstream, &self.gas),
            Err(_) => T::nan(),
        }
    }

    /// Polar point at pressure `p`, with shock slope and arc label.
    pub fn point_at_pressure(&self, p: T) -> Result<PolarPoint<T>> {
        let down = self.state_at_pressure(p)?;
        let jp = down.p - self.upstream.p;
        let cp = cp_value(&down, &self.upstream, &self.gas);
        let shock_slope_s = if jp > T::zero() { down.u2 / jp } else { T::zero() };
        let mach = self.gas.mach(&down);
        let arc = if jp == T::zero() {
            Arc::Other
        } else if (mach - T::one()).abs() <= T::lit(1e-9) {
            Arc::Sonic
        } else if mach > T::one() {
            Arc::Other
        } else if down.u2 == T::zero() {
            Arc::NormalS
        } else {
            arc_from_cp(cp, jp, &down, &self.gas)
        };
        Ok(PolarPoint { downstream: down, shock_slope_s, wedge_angle: down.angle(), arc, cp })
    }

    /// Solves for the downstream state behind a wedge of half-angle `theta`.
    pub fn solve(&self, theta: T, root: Root) -> Result<PolarPoint<T>> {
        if !(theta.is_finite() && theta >= T::zero()) {
            return Err(Error::InvalidInput(format!("wedge angle must be non-negative, got {theta}")));
        }
        let tc = self.theta_critical;
        if theta > tc * (T::one() + T::lit(1e-12)) {
            return Err(Error::Detached {
                angle_deg: theta.to_f64_lossy().to_degrees(),
                critical_deg: tc.to_f64_lossy().to_degrees(),
            });
        }
        if theta >= tc {
            return self.point_at_pressure(self.p_tangent);
        }
        if theta == T::zero() {
            return match root {
                Root::Strong => self.point_at_pressure(self.p_normal),
                Root::Weak => self.point_at_pressure(self.upstream.p),
            };
        }
        let (lo, hi) = match root {
            Root::Strong => (self.p_tangent, self.p_normal),
            Root::Weak => (self.upstream.p, self.p_tangent),
        };
        let f = |p: T| match self.angle_at_pressure(p) {
            Ok(a) => a - theta,
            Err(_) => T::nan(),
        };
        let xtol = T::lit(4.0) * T::eps() * self.p_normal;
        let p = brent(f, lo, hi, xtol, 300)?;
        self.point_at_pressure(p)
    }

    /// Samples both branches, from the normal shock down towards the
    /// vanishing-strength end, uniformly in pressure.
    pub fn curve(&self, n_samples: usize) -> Result<Vec<PolarPoint<T>>> {
        if n_samples < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 polar samples, got {n_samples}")));
        }
        let n = T::from_usize(n_samples).unwrap();
        let span = self.p_normal - self.upstream.p;
        (0..n_samples)
            .map(|k| {
                let p = self.p_normal - span * T::from_usize(k).unwrap() / n;
                self.point_at_pressure(p)
            })
            .collect()
    }

    /// Relative residuals of the four polar Rankine-Hugoniot relations.
    pub fn rh_residuals(&self, pt: &PolarPoint<T>) -> [T; 4] {
        rh_residuals(&self.upstream, &pt.downstream, pt.shock_slope_s, &self.gas)
    }
}

/// `C_p` of a downstream state, all unjumped quantities downstream.
pub fn cp_value<T: Real>(down: &FlowState<T>, up: &FlowState<T>, gas: &GasModel<T>) -> T {
    let g = gas.gamma();
    let c2 = gas.sonic_speed_sq(down);
    let q2 = down.speed_sq();
    let jp = down.p - up.p;
    let j_inv_flux = T::one() / (down.rho * down.u1) - T::one() / (up.rho * up.u1);
    jp * (c2 + (g - T::one()) * q2 - g * down.u1 * down.u1)
        + (g - T::one()) * down.rho * q2 * down.u2 * down.u2
        + j_inv_flux * down.rho * down.rho * c2 * down.u1 * q2
}

fn arc_from_cp<T: Real>(cp: T, jp: T, down: &FlowState<T>, gas: &GasModel<T>) -> Arc {
    let tol = T::lit(1e-10) * jp.abs() * gas.sonic_speed_sq(down);
    if cp < -tol {
        Arc::TS
    } else if cp > tol {
        Arc::TH
    } else {
        Arc::Tangent
    }
}

/// Classifies a subsonic downstream state by the sign of `C_p`.
pub fn classify_arc<T: Real>(pt: &PolarPoint<T>, upstream: &FlowState<T>, gas: &GasModel<T>) -> Result<(Arc, T)> {
    let mach = gas.mach(&pt.downstream);
    if mach >= T::one() {
        return Err(Error::NotSubsonic { mach: mach.to_f64_lossy() });
    }
    let cp = cp_value(&pt.downstream, upstream, gas);
    let jp = pt.downstream.p - upstream.p;
    Ok((arc_from_cp(cp, jp, &pt.downstream, gas), cp))
}

/// Closed-form derivative of `k = u2/u1` with respect to downstream pressure.
pub fn kp_formula<T: Real>(pt: &PolarPoint<T>, upstream: &FlowState<T>, gas: &GasModel<T>) -> Result<T> {
    let d = &pt.downstream;
    if d.u2 == T::zero() {
        return Err(Error::DegeneratePoint("k_p undefined where u2 = 0".into()));
    }
    let g = gas.gamma();
    let c0 = d.u1.powi(3) * d.u2 * d.rho * d.rho * ((g + T::one()) * d.p + (g - T::one()) * upstream.p);
    Ok(-d.rho * cp_value(d, upstream, gas) / c0)
}

/// Matrix and right-hand side of the linear system for `(rho_p, u1_p, k_p)`.
pub fn derivative_system<T: Real>(
    pt: &PolarPoint<T>,
    upstream: &FlowState<T>,
    gas: &GasModel<T>,
) -> ([[T; 3]; 3], [T; 3]) {
    let d = &pt.downstream;
    let (rho, u1, p) = (d.rho, d.u1, d.p);
    let k = d.u2 / d.u1;
    let jp = p - upstream.p;
    let h = gas.enthalpy_factor();
    let m = upstream.rho * upstream.u1;
    let two = T::lit(2.0);
    let b = [
        [-jp / (rho * rho * u1), k * k - jp / (rho * u1 * u1), two * u1 * k],
        [-p * jp / (rho * rho * u1), p * k * k - p * jp / (rho * u1 * u1) + jp, two * p * u1 * k],
        [h * p / (rho * rho), -u1 * (k * k + T::one()), -u1 * u1 * k],
    ];
    let j_inv = T::one() / (rho * u1) - T::one() / m;
    let j_mom = (u1 + p / (rho * u1)) - (upstream.u1 + upstream.p / m);
    let f = [-j_inv, -j_mom - jp / (rho * u1) - u1 * k * k, h / rho];
    (b, f)
}

/// Relative residuals of the polar relations for a state pair and slope `s`.
pub fn rh_residuals<T: Real>(up: &FlowState<T>, down: &FlowState<T>, s: T, gas: &GasModel<T>) -> [T; 4] {
    let m = up.rho * up.u1;
    let k = down.u2 / down.u1;
    let jp = down.p - up.p;
    let r1 = (T::one() / (down.rho * down.u1) - T::one() / m + k * s) * m;
    let mom_scale = up.u1 + up.p / m;
    let r2 = ((down.u1 + down.p / (down.rho * down.u1)) - mom_scale + down.p * k * s) / mom_scale;
    let r3 = (down.u1 * k - jp * s) / up.u1;
    let b_up = gas.bernoulli_b(up);
    let r4 = (gas.bernoulli_b(down) - b_up) / b_up;
    [r1, r2, r3, r4]
}

pub fn solve_downstream<T: Real>(
    upstream: &FlowState<T>,
    wedge_angle: T,
    root: Root,
    gas: &GasModel<T>,
) -> Result<PolarPoint<T>> {
    ShockPolar::new(*upstream, *gas)?.solve(wedge_angle, root)
}

pub fn polar_curve<T: Real>(upstream: &FlowState<T>, gas: &GasModel<T>, n_samples: usize) -> Result<Vec<PolarPoint<T>>> {
    ShockPolar::new(*upstream, *gas)?.curve(n_samples)
}

pub fn polar_summary<T: Real>(upstream: &FlowState<T>, gas: &GasModel<T>) -> Result<PolarSummary<T>> {
    Ok(ShockPolar::new(*upstream, *gas)?.summary())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(mach: f64) -> (FlowState<f64>, GasModel<f64>) {
        let g = GasModel::new(1.4).unwrap();
        (FlowState::horizontal(mach, 1.0, 1.0, &g).unwrap(), g)
    }

    #[test]
    fn normal_shock_strong_root() {
        let (up, g) = setup(2.0);
        let pt = solve_downstream(&up, 0.0, Root::Strong, &g).unwrap();
        assert!((pt.downstream.p - 4.5).abs() < 1e-12);
        assert!((pt.downstream.rho - 8.0 / 3.0).abs() < 1e-12);
        assert!((pt.downstream.u1 - 0.887_411_967_464_942_3).abs() < 1e-12);
        assert_eq!(pt.downstream.u2, 0.0);
        assert_eq!(pt.arc, Arc::NormalS);
    }

    #[test]
    fn zero_angle_weak_root_is_upstream() {
        let (up, g) = setup(2.0);
        let pt = solve_downstream(&up, 0.0, Root::Weak, &g).unwrap();
        assert_eq!(pt.downstream, up);
    }

    #[test]
    fn roots_merge_at_detachment() {
        let (up, g) = setup(2.0);
        let polar = ShockPolar::new(up, g).unwrap();
        let tc = polar.theta_critical();
        let s = polar.solve(tc, Root::Strong).unwrap();
        let w = polar.solve(tc, Root::Weak).unwrap();
        assert!((s.downstream.p - w.downstream.p).abs() < 1e-6);
        let near = tc * (1.0 - 1e-12);
        let s = polar.solve(near, Root::Strong).unwrap();
        let w = polar.solve(near, Root::Weak).unwrap();
        assert!((s.downstream.p - w.downstream.p).abs() / s.downstream.p < 1e-4);
    }

    #[test]
    fn detached_and_precondition_errors() {
        let (up, g) = setup(2.0);
        assert!(matches!(solve_downstream(&up, 0.5, Root::Strong, &g), Err(Error::Detached { .. })));
        let (sub, g) = setup(0.8);
        assert!(matches!(ShockPolar::new(sub, g), Err(Error::NotSupersonic { .. })));
        let (near, g) = setup(1.0 + 1e-7);
        assert!(matches!(ShockPolar::new(near, g), Err(Error::NearSonic { .. })));
        let tilted = FlowState::new(2.0, 0.1, 1.0, 1.0).unwrap();
        assert!(matches!(ShockPolar::new(tilted, g), Err(Error::NotHorizontal { .. })));
    }

    #[test]
    fn curve_endpoints_and_conservation() {
        let (up, g) = setup(2.0);
        let polar = ShockPolar::new(up, g).unwrap();
        let pts = polar.curve(400).unwrap();
        assert_eq!(pts[0].downstream.u2, 0.0);
        assert!((pts[0].downstream.p - 4.5).abs() < 1e-12);
        let last = pts.last().unwrap();
        assert!(last.downstream.p - up.p < 0.01);
        let b0 = g.bernoulli_b(&up);
        let a0 = g.entropy_a(&up);
        for pt in &pts {
            assert!((g.bernoulli_b(&pt.downstream) - b0).abs() / b0 < 1e-10);
            assert!(g.entropy_a(&pt.downstream) > a0);
            for r in polar.rh_residuals(pt) {
                assert!(r.abs() < 1e-10, "{r}");
            }
        }
    }

    #[test]
    fn normal_shock_is_on_the_strong_arc_th() {
        let (up, g) = setup(2.0);
        let pt = solve_downstream(&up, 0.0, Root::Strong, &g).unwrap();
        let (arc, cp) = classify_arc(&pt, &up, &g).unwrap();
        assert_eq!(arc, Arc::TH);
        assert!(cp > 0.0);
    }

    #[test]
    fn weak_subsonic_root_is_ts_and_tangent_at_critical() {
        let (up, g) = setup(2.0);
        let polar = ShockPolar::new(up, g).unwrap();
        let mid = 0.5 * (polar.theta_sonic() + polar.theta_critical());
        let w = polar.solve(mid, Root::Weak).unwrap();
        assert_eq!(w.arc, Arc::TS);
        let t = polar.solve(polar.theta_critical(), Root::Strong).unwrap();
        assert_eq!(classify_arc(&t, &up, &g).unwrap().0, Arc::Tangent);
    }

    #[test]
    fn classify_rejects_supersonic_downstream() {
        let (up, g) = setup(2.0);
        let pt = solve_downstream(&up, 0.2, Root::Weak, &g).unwrap();
        assert!(matches!(classify_arc(&pt, &up, &g), Err(Error::NotSubsonic { .. })));
    }

    #[test]
    fn kp_matches_difference_quotient_at_15_degrees() {
        let (up, g) = setup(2.0);
        let polar = ShockPolar::new(up, g).unwrap();
        let pt = polar.solve(15f64.to_radians(), Root::Strong).unwrap();
        let p = pt.downstream.p;
        let k = |p: f64| {
            let s = polar.state_at_pressure(p).unwrap();
            s.u2 / s.u1
        };
        let dp = 1e-5;
        let fd = (k(p + dp) - k(p - dp)) / (2.0 * dp);
        let kp = kp_formula(&pt, &up, &g).unwrap();
        assert!(((kp - fd) / fd).abs() < 1e-5, "{kp} vs {fd}");
        assert!(kp < 0.0);
    }

    #[test]
    fn kp_degenerate_at_normal_shock() {
        let (up, g) = setup(2.0);
        let pt = solve_downstream(&up, 0.0, Root::Strong, &g).unwrap();
        assert!(matches!(kp_formula(&pt, &up, &g), Err(Error::DegeneratePoint(_))));
    }

    #[test]
    fn summary_ordering_and_values() {
        let (up, g) = setup(2.0);
        let s = polar_summary(&up, &g).unwrap();
        assert!(0.0 < s.theta_sonic && s.theta_sonic < s.theta_critical && s.theta_critical < std::f64::consts::FRAC_PI_2);
        assert!((s.theta_critical.to_degrees() - 22.97).abs() < 0.05);
        assert!((s.theta_sonic.to_degrees() - 22.71).abs() < 0.05);
    }

    #[test]
    fn near_sonic_polar_is_small() {
        let (up, g) = setup(1.01);
        let s = polar_summary(&up, &g).unwrap();
        assert!(s.theta_critical.to_degrees() < 1.0);
        assert!(s.theta_sonic.to_degrees() < 1.0);
        assert!(s.theta_sonic > 0.0);
    }

    #[test]
    fn polar_in_f32() {
        let g = GasModel::new(1.4f32).unwrap();
        let up = FlowState::horizontal(2.0f32, 1.0, 1.0, &g).unwrap();
        let pt = solve_downstream(&up, 0.0, Root::Strong, &g).unwrap();
        assert!((pt.downstream.p - 4.5).abs() < 1e-4);
    }
}
