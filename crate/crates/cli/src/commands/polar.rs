use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::io::{write_atomic, write_json};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use transonic_core::{Gas, Polar, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarSummaryFile {
    pub mach: f64,
    pub gamma: f64,
    pub theta_sonic_deg: f64,
    pub theta_critical_deg: f64,
    pub p_sonic: f64,
    pub p_tangent: f64,
    pub p_normal: f64,
}

pub fn polar_csv(polar: &Polar, samples: usize) -> Result<String> {
    let gas = polar.gas();
    let mut s = String::from("p,rho,u1,u2,wedge_angle_deg,shock_slope_s,mach_down,Cp,arc\n");
    for pt in polar.curve(samples)? {
        let d = &pt.downstream;
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            d.p,
            d.rho,
            d.u1,
            d.u2,
            pt.wedge_angle.to_degrees(),
            pt.shock_slope_s,
            gas.mach(d),
            pt.cp,
            pt.arc.label()
        );
    }
    Ok(s)
}

/// Samples the polar of the configured upstream state.
pub fn cmd_polar(cfg: &RunConfig, out: &Path) -> Result<PolarSummaryFile> {
    let gas = Gas::new(cfg.gas.gamma)?;
    let up = State::horizontal(cfg.upstream.mach, cfg.upstream.p, cfg.upstream.rho, &gas)?;
    let polar = Polar::new(up, gas)?;
    let summary = PolarSummaryFile {
        mach: cfg.upstream.mach,
        gamma: cfg.gas.gamma,
        theta_sonic_deg: polar.theta_sonic().to_degrees(),
        theta_critical_deg: polar.theta_critical().to_degrees(),
        p_sonic: polar.p_sonic(),
        p_tangent: polar.p_tangent(),
        p_normal: polar.p_normal(),
    };
    if cfg.output.wants(Format::Csv) {
        write_atomic(&out.join("polar.csv"), &polar_csv(&polar, cfg.output.polar_samples)?)?;
    }
    if cfg.output.wants(Format::Json) {
        write_json(&out.join("summary.json"), &summary)?;
    }
    Ok(summary)
}
