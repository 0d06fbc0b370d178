//! A-priori far-field state.
//!
//! Far downstream the flow is parallel to the asymptotic wedge direction
//! `theta0` at the background pressure `p0`. On each streamline this fixes
//!
//! ```text
//! rho_inf = (p0 / A)^(1/gamma),
//! l'(y2)  = sqrt((tan^2 theta0 + 1) / (2 (B rho_inf^2 - gamma/(gamma-1) A rho_inf^(gamma+1)))),
//! ```
//!
//! with `l(0) = w0`. The limit potential is `phi_inf = tan(theta0) y1 + l(y2)`
//! and `varphi_inf` solves `z1 = phi_inf(varphi, z2) - phi^-(varphi, z2)`.

use super::upstream::UpstreamField;
use crate::error::{Error, Result};
use crate::gas::FlowState;
use crate::real::Real;

/// Piecewise-linear profile in `z2`, extended as a constant beyond its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    nodes: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> Profile<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::InvalidInput("profile needs matching, nonempty nodes and values".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("profile nodes must increase strictly".into()));
        }
        Ok(Self { nodes, values })
    }

    pub fn constant(value: T) -> Self {
        Self { nodes: vec![T::zero()], values: vec![value] }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let k = self.nodes.partition_point(|&t| t <= x) - 1;
        let t = (x - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]);
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }
}

const GL_X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Four-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Real, F: FnMut(T) -> Result<T>>(a: T, b: T, mut f: F) -> Result<T> {
    let mid = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let mut s = T::zero();
    for (x, w) in GL_X.iter().zip(GL_W.iter()) {
        s = s + T::lit(*w) * f(mid + half * T::lit(*x))?;
    }
    Ok(s * half)
}

#[derive(Debug, Clone)]
pub struct FarFieldState<T> {
    entropy: Profile<T>,
    upstream: UpstreamField<T>,
    tan_theta0: T,
    w0: T,
    p_inf: T,
    /// `l` at the entropy-profile nodes.
    l_nodes: Vec<T>,
    /// Lower and upper bounds of `l'` over the sampled nodes.
    l_prime_range: (T, T),
}

impl<T: Real> FarFieldState<T> {
    /// Builds the far field; `p_inf` is the background downstream pressure.
    pub fn new(entropy: Profile<T>, upstream: UpstreamField<T>, theta0: T, w0: T, p_inf: T) -> Result<Self> {
        if !(theta0 > T::zero() && theta0 < T::FRAC_PI_2()) {
            return Err(Error::InvalidInput(format!("far-field angle must lie in (0, pi/2), got {theta0}")));
        }
        if !(p_inf > T::zero()) {
            return Err(Error::InvalidInput(format!("far-field pressure must be positive, got {p_inf}")));
        }
        if entropy.values.iter().any(|&a| !(a > T::zero())) {
            return Err(Error::InvalidInput("entropy profile must be positive".into()));
        }
        let mut ff = Self {
            entropy,
            upstream,
            tan_theta0: theta0.tan(),
            w0,
            p_inf,
            l_nodes: Vec::new(),
            l_prime_range: (T::zero(), T::zero()),
        };
        let nodes = ff.entropy.nodes.clone();
        let mut l = Vec::with_capacity(nodes.len());
        let mut acc = ff.w0 + ff.integrate(T::zero(), nodes[0])?;
        l.push(acc);
        let mut lo = ff.l_prime(nodes[0])?;
        let mut hi = lo;
        for w in nodes.windows(2) {
            acc = acc + ff.integrate(w[0], w[1])?;
            l.push(acc);
            let lp = ff.l_prime(w[1])?;
            lo = lo.min(lp);
            hi = hi.max(lp);
        }
        ff.l_nodes = l;
        ff.l_prime_range = (lo, hi);
        Ok(ff)
    }

    pub fn tan_theta0(&self) -> T {
        self.tan_theta0
    }

    pub fn w0(&self) -> T {
        self.w0
    }

    pub fn entropy(&self) -> &Profile<T> {
        &self.entropy
    }

    pub fn upstream(&self) -> &UpstreamField<T> {
        &self.upstream
    }

    pub fn l_prime_range(&self) -> (T, T) {
        self.l_prime_range
    }

    /// Whether `1/C <= l' <= C` on the sampled nodes.
    pub fn l_prime_bounded(&self, c: T) -> bool {
        self.l_prime_range.0 >= T::one() / c && self.l_prime_range.1 <= c
    }

    pub fn p_inf(&self) -> T {
        self.p_inf
    }

    /// Limit state on streamline `y2`: pressure `p_inf`, flow along `theta0`.
    pub fn state_inf(&self, y2: T) -> Result<FlowState<T>> {
        let rho = self.rho_inf(y2);
        let u1 = T::one() / (rho * self.l_prime(y2)?);
        Ok(FlowState { u1, u2: self.tan_theta0 * u1, p: self.p_inf, rho })
    }

    /// `g = l^-1`, with `g(s) = 0` for `s <= l(0)`.
    pub fn l_inverse(&self, s: T) -> Result<T> {
        let l0 = self.l(T::zero())?;
        if s <= l0 {
            return Ok(T::zero());
        }
        let mut y = (s - l0) / self.l_prime(T::zero())?;
        for _ in 0..60 {
            let step = (self.l(y)? - s) / self.l_prime(y)?;
            y = (y - step).max(T::zero());
            if step.abs() <= T::lit(1e-14) * (T::one() + y.abs()) {
                break;
            }
        }
        Ok(y)
    }

    /// Far-field density on streamline `y2`.
    pub fn rho_inf(&self, y2: T) -> T {
        (self.p_inf / self.entropy.eval(y2)).powf(T::one() / self.upstream.gas().gamma())
    }

    pub fn l_prime(&self, y2: T) -> Result<T> {
        let gas = self.upstream.gas();
        let a = self.entropy.eval(y2);
        let b = self.upstream.bernoulli(y2);
        let rho = self.rho_inf(y2);
        let denom = b * rho * rho - gas.enthalpy_factor() * a * rho.powf(gas.gamma() + T::one());
        if !(denom > T::zero()) {
            return Err(Error::NoSubsonicRoot);
        }
        let t2 = self.tan_theta0 * self.tan_theta0;
        let lp = ((t2 + T::one()) / (T::lit(2.0) * denom)).sqrt();
        // Subsonicity of the far-field state.
        let u1 = T::one() / (rho * lp);
        let q2 = u1 * u1 * (T::one() + t2);
        if !(q2 < gas.gamma() * self.p_inf / rho) {
            return Err(Error::NoSubsonicRoot);
        }
        Ok(lp)
    }

    fn integrate(&self, a: T, b: T) -> Result<T> {
        if b <= a {
            return Ok(T::zero());
        }
        // Substitution s = ln(1 + y) resolves the power-law envelope.
        let sa = (T::one() + a).ln();
        let sb = (T::one() + b).ln();
        let pieces = 8usize;
        let ds = (sb - sa) / T::from_usize(pieces).unwrap();
        let mut total = T::zero();
        for k in 0..pieces {
            let lo = sa + ds * T::from_usize(k).unwrap();
            total = total + gauss_legendre(lo, lo + ds, |s| Ok(self.l_prime(s.exp() - T::one())? * s.exp()))?;
        }
        Ok(total)
    }

    pub fn l(&self, y2: T) -> Result<T> {
        let nodes = &self.entropy.nodes;
        if y2 <= nodes[0] {
            return Ok(self.w0 + self.integrate(T::zero(), y2)?);
        }
        let k = nodes.partition_point(|&t| t <= y2) - 1;
        let k = k.min(nodes.len() - 1);
        Ok(self.l_nodes[k] + self.integrate(nodes[k], y2)?)
    }

    /// `varphi_inf(z)` and its gradient.
    pub fn varphi_inf(&self, z1: T, z2: T) -> Result<(T, [T; 2])> {
        self.varphi_inf_given(z1, z2, self.l(z2)?, self.l_prime(z2)?)
    }

    /// `varphi_inf` with `l(z2)` and `l'(z2)` supplied, for row-wise sweeps.
    pub fn varphi_inf_given(&self, z1: T, z2: T, l: T, lp: T) -> Result<(T, [T; 2])> {
        let t = self.tan_theta0;
        let mut y1 = (z1 - l + self.upstream.background_potential(z2)) / t;
        for _ in 0..50 {
            let up = self.upstream.eval(y1, z2);
            let r = t * y1 + l - up.phi - z1;
            let d = t - up.grad_phi[0];
            let step = r / d;
            y1 = y1 - step;
            if step.abs() <= T::lit(1e-15) * (T::one() + y1.abs()) {
                break;
            }
        }
        let up = self.upstream.eval(y1, z2);
        let d = t - up.grad_phi[0];
        if !(d > T::zero()) {
            return Err(Error::TransformDegenerate(d.to_f64_lossy()));
        }
        Ok((y1, [T::one() / d, (up.grad_phi[1] - lp) / d]))
    }

    /// Residual of the defining relation at `(z1, z2)`.
    pub fn varphi_inf_residual(&self, z1: T, z2: T) -> Result<T> {
        let (y1, _) = self.varphi_inf(z1, z2)?;
        let up = self.upstream.eval(y1, z2);
        Ok(self.tan_theta0 * y1 + self.l(z2)? - up.phi - z1)
    }

    /// Wedge trace of the far field: `btilde0(z1) = (z1 - w0) / tan(theta0)`.
    pub fn b_tilde0(&self, z1: T) -> Result<T> {
        Ok(self.varphi_inf(z1, T::zero())?.0)
    }
}
