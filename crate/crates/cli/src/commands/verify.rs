//! Invariant suites over a solution dump or a fresh solve.
//!
//! The flow suites always read the CSV artifacts, so a fresh solve and a
//! dump on disk are checked by the same code.

use super::solve::CONFIG_FILE;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{read, write_json};
use serde::{Deserialize, Serialize};
use std::path::Path;
use transonic_core::driver::{rh_residual, solve, Prepared, ProblemSpec};
use transonic_core::elliptic::randomized_trial;
use transonic_core::elliptic::verify::mms_study;
use transonic_core::hodograph::UpstreamField;
use transonic_core::State;

pub const RH_TOL: f64 = 1e-6;
pub const SLIP_TOL: f64 = 1e-8;
pub const ENTROPY_TOL: f64 = 1e-8;
pub const MMS_MIN_ORDER: f64 = 1.9;
const COMPARISON_TRIALS: u64 = 20;
const COMPARISON_N: usize = 48;
const MMS_LEVELS: [usize; 3] = [12, 24, 48];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub status: Status,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    /// `(x1, x2)` of the worst node.
    pub at: Option<[f64; 2]>,
    /// Line of the worst node in `eulerian.csv`, header included.
    pub line: Option<usize>,
    pub detail: String,
}

impl SuiteResult {
    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: Status::Skipped, value: None, threshold: None, at: None, line: None, detail: detail.into() }
    }

    fn bounded(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        let status = if value <= threshold { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, value: Some(value), threshold: Some(threshold), at: None, line: None, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub source: String,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EulerianRow {
    pub x1: f64,
    pub x2: f64,
    pub u1: f64,
    pub u2: f64,
    pub p: f64,
    pub rho: f64,
    pub region: String,
}

impl EulerianRow {
    fn state(&self) -> State {
        State { u1: self.u1, u2: self.u2, p: self.p, rho: self.rho }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ShockRow {
    pub x2: f64,
    pub sigma: f64,
    pub sigma_prime: f64,
}

fn parse_csv<T: for<'de> Deserialize<'de>>(text: &str, name: &Path) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::Dump { path: name.to_path_buf(), message: e.to_string() })
}

/// Stream label `y2` of the incoming streamline through `(x1, x2)`.
fn stream_label(up: &UpstreamField<f64>, x1: f64, x2: f64) -> f64 {
    let phi = |y: f64| up.eval(x1, y).phi;
    let mut hi = 1.0;
    while phi(hi) < x2 && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < x2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn worst(name: &str, threshold: f64, items: impl Iterator<Item = (f64, usize, [f64; 2])>, detail: &str) -> SuiteResult {
    let mut best: Option<(f64, usize, [f64; 2])> = None;
    let mut count = 0;
    for it in items {
        count += 1;
        if best.is_none_or(|b| it.0 > b.0 || it.0.is_nan()) {
            best = Some(it);
        }
    }
    match best {
        None => SuiteResult::skipped(name, format!("no {detail} nodes")),
        Some((v, row, at)) => SuiteResult {
            at: Some(at),
            line: Some(row + 2),
            ..SuiteResult::bounded(name, v, threshold, format!("{count} {detail} nodes"))
        },
    }
}

/// Rankine-Hugoniot residual at every shock row above the vertex.
pub fn rh_suite(prep: &Prepared, nodes: &[EulerianRow], shock: &[ShockRow]) -> SuiteResult {
    let shock_nodes: Vec<(usize, &EulerianRow)> = nodes.iter().enumerate().filter(|(_, n)| n.region == "shock").collect();
    let items = shock.iter().filter(|s| s.x2 > 0.0).filter_map(|s| {
        let &(row, node) = shock_nodes.iter().min_by(|a, b| {
            let d = |n: &EulerianRow| (n.x1 - s.sigma).hypot(n.x2 - s.x2);
            d(a.1).total_cmp(&d(b.1))
        })?;
        let up = prep.upstream.eval(s.sigma, stream_label(&prep.upstream, s.sigma, s.x2)).state;
        Some((rh_residual(&prep.gas, &up, &node.state(), s.sigma_prime), row, [node.x1, node.x2]))
    });
    worst("rh", RH_TOL, items, "shock")
}

/// Flow tangency `u2/u1 = b'(x1)` on the wedge.
pub fn slip_suite(spec: &ProblemSpec, nodes: &[EulerianRow]) -> SuiteResult {
    let items = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.region == "wedge" || n.region == "corner")
        .map(|(row, n)| ((n.u2 / n.u1 - spec.wedge.b(n.x1).1).abs(), row, [n.x1, n.x2]));
    worst("slip", SLIP_TOL, items, "wedge")
}

pub fn comparison_suite() -> SuiteResult {
    let mut failed = Vec::new();
    let mut barrier = f64::NEG_INFINITY;
    for seed in 0..COMPARISON_TRIALS {
        match randomized_trial(seed, COMPARISON_N) {
            Ok(t) => {
                if !(t.subsolution.holds && t.capped.holds) {
                    failed.push(seed);
                }
                barrier = barrier.max(t.barrier_sup);
            }
            Err(_) => failed.push(seed),
        }
    }
    let mut r = SuiteResult::bounded("comparison", barrier, 0.0, format!("{COMPARISON_TRIALS} randomized operators at n = {COMPARISON_N}, max L v3 = {barrier:e}"));
    if !failed.is_empty() || barrier.is_nan() || barrier >= 0.0 {
        r.status = Status::Fail;
        r.detail = format!("{}; failing seeds {failed:?}", r.detail);
    }
    r
}

pub fn mms_suite() -> SuiteResult {
    match mms_study(&MMS_LEVELS) {
        Ok(rep) => {
            let order = rep.min_order();
            let status = if order >= MMS_MIN_ORDER { Status::Pass } else { Status::Fail };
            SuiteResult {
                name: "mms".into(),
                status,
                value: Some(order),
                threshold: Some(MMS_MIN_ORDER),
                at: None,
                line: None,
                detail: format!("levels {MMS_LEVELS:?}, orders {:?}", rep.orders),
            }
        }
        Err(e) => SuiteResult { status: Status::Fail, ..SuiteResult::skipped("mms", e.to_string()) },
    }
}

fn flow_suites(cfg: &RunConfig, eulerian: &str, shock: &str, dir: &Path) -> Result<Vec<SuiteResult>> {
    let spec = cfg.to_spec()?;
    let prep = spec.prepare()?;
    let nodes: Vec<EulerianRow> = parse_csv(eulerian, &dir.join("eulerian.csv"))?;
    let shock: Vec<ShockRow> = parse_csv(shock, &dir.join("shock.csv"))?;
    Ok(vec![rh_suite(&prep, &nodes, &shock), slip_suite(&spec, &nodes)])
}

fn finish(source: String, suites: Vec<SuiteResult>) -> VerifyReport {
    let pass = suites.iter().all(|s| s.status != Status::Fail);
    VerifyReport { source, pass, suites }
}

/// Checks a solution directory written by `solve`.
pub fn verify_dump(dir: &Path) -> Result<VerifyReport> {
    let cfg = RunConfig::load(&dir.join(CONFIG_FILE))?;
    let mut suites = flow_suites(&cfg, &read(&dir.join("eulerian.csv"))?, &read(&dir.join("shock.csv"))?, dir)?;
    suites.push(SuiteResult::skipped("entropy-streamline", "stream labels are not part of the dump"));
    suites.push(comparison_suite());
    suites.push(mms_suite());
    Ok(finish(dir.display().to_string(), suites))
}

/// Solves the configuration and checks the result.
pub fn verify_config(cfg: &RunConfig, source: &Path) -> Result<VerifyReport> {
    let spec = cfg.to_spec()?;
    let mut suites = match solve(&spec) {
        Ok(s) => {
            let mut v = flow_suites(cfg, &s.eulerian.to_csv(), &s.eulerian.shock_csv(), Path::new("<solve>"))?;
            v.push(SuiteResult::bounded("entropy-streamline", s.report.entropy_streamline, ENTROPY_TOL, "relative spread of A per streamline"));
            v
        }
        Err(e) => vec![SuiteResult { status: Status::Fail, ..SuiteResult::skipped("solve", e.to_string()) }],
    };
    suites.push(comparison_suite());
    suites.push(mms_suite());
    Ok(finish(source.display().to_string(), suites))
}

pub fn cmd_verify(report: &VerifyReport, out: &Path) -> Result<()> {
    write_json(&out.join("verify.json"), report)
}
