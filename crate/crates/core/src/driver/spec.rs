//! Problem specification: gas, incoming flow, wedge, grid and solver settings.

use crate::elliptic::{NonlinearOptions, Stretching, TruncatedGrid};
use crate::error::{Error, Result};
use crate::gas::{FlowState, GasModel};
use crate::hodograph::{Background, ShearMode, ShearPerturbation, ShockSolveOptions, UpstreamField};
use crate::shock_polar::{Root, ShockPolar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpKind {
    /// `amplitude (1 - exp(-(x/w)^2)) exp(-((x - c)/w)^2)`.
    Gaussian,
    /// `amplitude (1 - ((x - c)/w)^2)^3` on `|x - c| < w`.
    CompactPoly,
}

/// Wedge perturbation `mu(x1) = b(x1) - x1 tan(theta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub kind: BumpKind,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || !(self.width > 0.0) || !self.center.is_finite() {
            return Err(Error::InvalidInput(format!("bump needs finite amplitude and center and positive width, got {self:?}")));
        }
        if self.kind == BumpKind::CompactPoly && self.center < self.width {
            return Err(Error::InvalidInput(format!(
                "compact bump support [{}, {}] must not reach behind the wedge vertex",
                self.center - self.width,
                self.center + self.width
            )));
        }
        Ok(())
    }

    /// `mu(x)` and `mu'(x)`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (a, c, w) = (self.amplitude, self.center, self.width);
        let xi = (x - c) / w;
        match self.kind {
            BumpKind::CompactPoly => {
                if xi.abs() >= 1.0 {
                    (0.0, 0.0)
                } else {
                    let q = 1.0 - xi * xi;
                    (a * q * q * q, -6.0 * a * q * q * xi / w)
                }
            }
            BumpKind::Gaussian => {
                let g = (-xi * xi).exp();
                let e = (-(x / w) * (x / w)).exp();
                let ramp = 1.0 - e;
                (a * ramp * g, a * (2.0 * x / (w * w) * e * g - 2.0 * xi / w * ramp * g))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeSpec {
    /// Asymptotic wedge angle in radians.
    pub theta0: f64,
    pub bump: Option<Bump>,
    /// Asymptotic offset `lim b(x1) - x1 tan(theta0)`; estimated at the cutoff when absent.
    pub w0: Option<f64>,
}

impl WedgeSpec {
    pub fn mu(&self, x: f64) -> (f64, f64) {
        self.bump.map_or((0.0, 0.0), |b| b.eval(x))
    }

    /// `b(x1)` and `b'(x1)`.
    pub fn b(&self, x: f64) -> (f64, f64) {
        let (m, dm) = self.mu(x);
        (x * self.theta0.tan() + m, self.theta0.tan() + dm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radius: f64,
    pub cutoff_slope: f64,
    pub n1: usize,
    pub n2: usize,
    pub stretching: Stretching,
}

impl GridSpec {
    pub fn build(&self) -> Result<TruncatedGrid> {
        TruncatedGrid::new(self.radius, self.cutoff_slope, self.n1, self.n2, self.stretching)
    }

    /// Same domain with twice the nodes per axis.
    pub fn refined(&self) -> Self {
        let stretching = match self.stretching {
            Stretching::Uniform => Stretching::Uniform,
            Stretching::Graded(r) => Stretching::Graded(r.sqrt()),
        };
        Self { n1: 2 * self.n1, n2: 2 * self.n2, stretching, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub inner: NonlinearOptions,
    /// Stop the entropy iteration when the X-norm of the update is below this.
    pub outer_tol: f64,
    pub outer_max_iter: usize,
    /// Damping `omega` of the entropy update.
    pub damping: f64,
    /// `A`-root bracket factor around the background entropy.
    pub bracket_factor: f64,
    /// Anderson mixing depth of the entropy iteration; 0 gives plain damped Picard.
    pub anderson_depth: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            inner: NonlinearOptions { tol: 1e-11, ..NonlinearOptions::default() },
            outer_tol: 1e-9,
            outer_max_iter: 40,
            damping: 0.7,
            bracket_factor: 2.0,
            anderson_depth: 4,
        }
    }
}

/// Weight exponents and bookkeeping constants of the weighted norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bookkeeping {
    pub beta: f64,
    pub alpha: f64,
    /// Bound constant in `|A - A0| <= C0 eps`.
    pub c0: f64,
}

impl Default for Bookkeeping {
    fn default() -> Self {
        Self { beta: 0.25, alpha: 0.5, c0: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpstreamSpec {
    pub mach: f64,
    pub p: f64,
    pub rho: f64,
    pub perturbation: Option<PerturbationSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    pub beta: f64,
    pub mode: ShearMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub gamma: f64,
    pub upstream: UpstreamSpec,
    pub wedge: WedgeSpec,
    pub grid: GridSpec,
    pub solver: SolverSpec,
    pub bookkeeping: Bookkeeping,
}

/// Objects derived from a validated spec.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub gas: GasModel<f64>,
    pub polar: ShockPolar<f64>,
    pub background: Background<f64>,
    pub upstream: UpstreamField<f64>,
    pub grid: TruncatedGrid,
    pub w0: f64,
    pub shock_opts: ShockSolveOptions<f64>,
}

impl ProblemSpec {
    /// Checks the hypotheses and builds the background, incoming flow and grid.
    pub fn prepare(&self) -> Result<Prepared> {
        let gas = GasModel::new(self.gamma)?;
        let up = FlowState::horizontal(self.upstream.mach, self.upstream.p, self.upstream.rho, &gas)?;
        let polar = ShockPolar::new(up, gas)?;
        let (ts, tc) = (polar.theta_sonic(), polar.theta_critical());
        let th = self.wedge.theta0;
        if th >= tc {
            return Err(Error::Detached { angle_deg: th.to_degrees(), critical_deg: tc.to_degrees() });
        }
        if th <= ts {
            let pt = polar.solve(th, Root::Weak)?;
            return Err(Error::NotSubsonic { mach: gas.mach(&pt.downstream) });
        }
        let background = Background::from_polar(&polar, th, Root::Weak)?;
        let mut upstream = UpstreamField::uniform(up, gas, background.s1)?;
        if let Some(p) = self.upstream.perturbation {
            upstream = upstream.with_perturbation(ShearPerturbation { amplitude: p.amplitude, beta: p.beta, mode: p.mode })?;
        }
        if let Some(b) = self.wedge.bump {
            b.validate()?;
        }
        if !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("damping must lie in (0, 1], got {}", self.solver.damping)));
        }
        if !(self.solver.bracket_factor > 1.0) {
            return Err(Error::InvalidInput(format!("bracket factor must exceed 1, got {}", self.solver.bracket_factor)));
        }
        let grid = self.grid.build()?;
        // The wedge must stay a graph with positive slope for the trace inversion.
        let n = 4000;
        for k in 0..=n {
            let x = self.grid.radius * 4.0 * k as f64 / n as f64;
            let (_, db) = self.wedge.b(x);
            if !(db > 0.0) {
                return Err(Error::InvalidInput(format!("wedge slope b'({x}) = {db} must stay positive")));
            }
        }
        let w0 = self.wedge.w0.unwrap_or_else(|| self.wedge.mu(grid.radius()).0);
        let shock_opts = ShockSolveOptions { bracket_factor: self.solver.bracket_factor, ..ShockSolveOptions::default() };
        Ok(Prepared { gas, polar, background, upstream, grid, w0, shock_opts })
    }

    /// Copy with the wedge bump amplitude replaced (no bump for zero).
    pub fn with_bump_amplitude(&self, amplitude: f64) -> Self {
        let mut s = *self;
        s.wedge.bump = s.wedge.bump.map(|b| Bump { amplitude, ..b });
        s
    }

    /// Copy with the upstream perturbation amplitude replaced.
    pub fn with_upstream_amplitude(&self, amplitude: f64) -> Self {
        let mut s = *self;
        s.upstream.perturbation = s.upstream.perturbation.map(|p| PerturbationSpec { amplitude, ..p });
        s
    }
}

impl Prepared {
    /// Wedge trace `btilde(z1)` and its derivative: `b(y1) - phi^-(y1, 0) = z1`.
    pub fn wedge_trace(&self, wedge: &WedgeSpec, z1: f64) -> Result<(f64, f64)> {
        let t = wedge.theta0.tan();
        let mut y = z1 / t;
        for _ in 0..100 {
            let (b, db) = wedge.b(y);
            let up = self.upstream.eval(y, 0.0);
            let r = b - up.phi - z1;
            let d = db - up.grad_phi[0];
            if !(d > 0.0) {
                return Err(Error::TransformDegenerate(d));
            }
            let step = r / d;
            y -= step;
            if step.abs() <= 1e-15 * (1.0 + y.abs()) {
                break;
            }
        }
        let (b, db) = wedge.b(y);
        let up = self.upstream.eval(y, 0.0);
        let r = b - up.phi - z1;
        if !(r.abs() <= 1e-12 * (1.0 + z1.abs())) {
            return Err(Error::RootBracketFail(format!("wedge trace inversion at z1 = {z1} left residual {r}")));
        }
        Ok((y, 1.0 / (db - up.grad_phi[0])))
    }
}
