//! Run configuration: a strict TOML schema with angles in degrees.
//!
//! Physics parameters have no defaults; solver tolerances, bookkeeping
//! constants and output settings do.

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use transonic_core::driver::{Bookkeeping, Bump, BumpKind, GridSpec, PerturbationSpec, ProblemSpec, SolverSpec, SweepAxis, UpstreamSpec, WedgeSpec};
use transonic_core::elliptic::{NonlinearOptions, Stretching};
use transonic_core::hodograph::ShearMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasConfig,
    pub upstream: UpstreamConfig,
    pub wedge: WedgeConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub bookkeeping: BookkeepingConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasConfig {
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpstreamConfig {
    pub mach: f64,
    pub p: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub amplitude: f64,
    /// Decay exponent of the shear envelope `(1 + y2)^(-1 - beta)`.
    pub beta: f64,
    pub mode: ShearMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    pub theta0_deg: f64,
    /// Asymptotic wedge offset; estimated at the cutoff when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump: Option<BumpConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub kind: BumpKind,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Truncation radius.
    #[serde(rename = "R")]
    pub r: f64,
    /// Slope of the cutoff line.
    pub k: f64,
    pub n1: usize,
    pub n2: usize,
    /// Geometric cell growth away from the corner; 1 is uniform.
    pub grading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// Radius of the admissible ball around the far field.
    pub delta: f64,
    pub newton: bool,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
    pub damping: f64,
    pub anderson_depth: usize,
    pub bracket_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverSpec::default();
        Self {
            inner_tol: s.inner.tol,
            inner_max_iter: s.inner.max_iter,
            delta: s.inner.delta,
            newton: s.inner.newton,
            outer_tol: s.outer_tol,
            outer_max_iter: s.outer_max_iter,
            damping: s.damping,
            anderson_depth: s.anderson_depth,
            bracket_factor: s.bracket_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BookkeepingConfig {
    pub beta: f64,
    pub alpha: f64,
    pub c0: f64,
}

impl Default for BookkeepingConfig {
    fn default() -> Self {
        let b = Bookkeeping::default();
        Self { beta: b.beta, alpha: b.alpha, c0: b.c0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<Format>,
    /// Samples along the polar curve.
    pub polar_samples: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: "out".into(), formats: vec![Format::Csv, Format::Json, Format::Jsonl], polar_samples: 401 }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub amplitudes: Vec<f64>,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&crate::io::read(path)?, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Solver input in radians.
    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let bad = |message: String| CliError::Config { path: "grid.grading".into(), message };
        let stretching = if self.grid.grading == 1.0 {
            Stretching::Uniform
        } else if self.grid.grading > 1.0 && self.grid.grading.is_finite() {
            Stretching::Graded(self.grid.grading)
        } else {
            return Err(bad(format!("grading must be at least 1, got {}", self.grid.grading)));
        };
        let s = &self.solver;
        let bk = &self.bookkeeping;
        Ok(ProblemSpec {
            gamma: self.gas.gamma,
            upstream: UpstreamSpec {
                mach: self.upstream.mach,
                p: self.upstream.p,
                rho: self.upstream.rho,
                perturbation: self.upstream.perturbation.map(|p| PerturbationSpec { amplitude: p.amplitude, beta: p.beta, mode: p.mode }),
            },
            wedge: WedgeSpec {
                theta0: self.wedge.theta0_deg.to_radians(),
                bump: self.wedge.bump.map(|b| Bump { kind: b.kind, amplitude: b.amplitude, center: b.center, width: b.width }),
                w0: self.wedge.w0,
            },
            grid: GridSpec { radius: self.grid.r, cutoff_slope: self.grid.k, n1: self.grid.n1, n2: self.grid.n2, stretching },
            solver: SolverSpec {
                inner: NonlinearOptions { tol: s.inner_tol, max_iter: s.inner_max_iter, delta: s.delta, beta: bk.beta, newton: s.newton },
                outer_tol: s.outer_tol,
                outer_max_iter: s.outer_max_iter,
                damping: s.damping,
                bracket_factor: s.bracket_factor,
                anderson_depth: s.anderson_depth,
            },
            bookkeeping: Bookkeeping { beta: bk.beta, alpha: bk.alpha, c0: bk.c0 },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[gas]
gamma = 1.4

[upstream]
mach = 2.0
p = 1.0
rho = 1.0

[wedge]
theta0_deg = 22.93

[wedge.bump]
kind = "compact-poly"
amplitude = 1e-3
center = 2.0
width = 1.0

[grid]
R = 16.0
k = 1.0
n1 = 16
n2 = 16
grading = 1.1
"#;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("test.toml"))
    }

    #[test]
    fn round_trips() {
        let mut c = parse(BASE).unwrap();
        c.upstream.perturbation = Some(PerturbationConfig { amplitude: 1e-3, beta: 0.25, mode: ShearMode::FixedVelocity });
        c.wedge.w0 = Some(0.125);
        c.sweep = Some(SweepConfig { axis: SweepAxis::WedgeBump, amplitudes: vec![1e-3, 5e-4, 2.5e-4] });
        let back = parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), c.to_toml());
    }

    #[test]
    fn angles_are_degrees() {
        let s = parse(BASE).unwrap().to_spec().unwrap();
        assert_eq!(s.wedge.theta0, 22.93f64.to_radians());
        assert_eq!(s.grid.stretching, Stretching::Graded(1.1));
    }

    #[test]
    fn defaults_cover_only_numerics() {
        let c = parse(BASE).unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.output, OutputConfig::default());
        assert_eq!(c.to_spec().unwrap().solver, SolverSpec::default());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let e = parse(&BASE.replace("rho = 1.0", "rho = 1.0\nrh0 = 1.0")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("rh0") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn physics_keys_are_required() {
        let e = parse(&BASE.replace("gamma = 1.4", "")).unwrap_err();
        assert!(e.to_string().contains("gamma"), "{e}");
        assert!(parse(&BASE.replace("theta0_deg = 22.93", "")).is_err());
    }

    #[test]
    fn grading_below_one_is_rejected() {
        assert!(parse(&BASE.replace("grading = 1.1", "grading = 0.9")).unwrap().to_spec().is_err());
        assert_eq!(parse(&BASE.replace("grading = 1.1", "grading = 1.0")).unwrap().to_spec().unwrap().grid.stretching, Stretching::Uniform);
    }

    #[test]
    fn bad_bump_kind_is_a_config_error() {
        let e = parse(&BASE.replace("compact-poly", "box")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
