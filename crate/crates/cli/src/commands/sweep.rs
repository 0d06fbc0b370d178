//! Amplitude sweeps against the unperturbed reference solve.

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{write_atomic, write_json};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use transonic_core::driver::{entropy_fixed_point, ratio_spread, sweep_row, ErrorReport, SweepAxis, SweepRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub index: usize,
    pub amplitude: f64,
    pub row: Option<SweepRow>,
    pub error: Option<ErrorReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: SweepAxis,
    pub rows: Vec<RowRecord>,
    /// Largest over smallest sensitivity ratio among the finished rows.
    pub ratio_spread: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

pub fn sweep_csv(rows: &[RowRecord]) -> String {
    let mut s = String::from(
        "amplitude,outer_iterations,sup_perturbation,sup_entropy_deviation,sup_state_decay,entropy_difference,upstream_difference,wedge_difference,ratio,state_exponent,shock_slope_exponent,error\n",
    );
    for r in rows {
        match (&r.row, &r.error) {
            (Some(w), _) => {
                let st = &w.stability;
                let _ = writeln!(
                    s,
                    "{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{},",
                    r.amplitude,
                    w.outer_iterations,
                    w.sup_perturbation,
                    w.sup_entropy_deviation,
                    w.sup_state_decay,
                    st.entropy_difference,
                    st.upstream_difference,
                    st.wedge_difference,
                    opt(st.ratio),
                    opt(w.state_exponent),
                    opt(w.shock_slope_exponent)
                );
            }
            (None, e) => {
                let msg = e.as_ref().map_or(String::new(), |e| e.message.replace([',', '\n'], ";"));
                let _ = writeln!(s, "{:e},,,,,,,,,,,{msg}", r.amplitude);
            }
        }
    }
    s
}

/// One row per amplitude; rows run on the rayon pool and each lands in `rows/` as soon as it finishes.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<SweepSummary> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config { path: "sweep".into(), message: "missing [sweep] table".into() })?;
    if sweep.amplitudes.is_empty() {
        return Err(CliError::EmptySweep);
    }
    let base = cfg.to_spec()?;
    let missing = match sweep.axis {
        SweepAxis::WedgeBump => base.wedge.bump.is_none().then_some("wedge-bump axis needs [wedge.bump]"),
        SweepAxis::Upstream => base.upstream.perturbation.is_none().then_some("upstream axis needs [upstream.perturbation]"),
    };
    if let Some(message) = missing {
        return Err(CliError::Config { path: "sweep.axis".into(), message: message.into() });
    }
    let reference = entropy_fixed_point(&base.with_amplitude(sweep.axis, 0.0))?;
    let rows_dir = out.join("rows");
    let rows = sweep
        .amplitudes
        .par_iter()
        .enumerate()
        .map(|(index, &amplitude)| {
            let rec = match sweep_row(&base, &reference, sweep.axis, amplitude) {
                Ok(row) => RowRecord { index, amplitude, row: Some(row), error: None },
                Err(e) => RowRecord { index, amplitude, row: None, error: Some((&e).into()) },
            };
            write_json(&rows_dir.join(format!("row_{index:04}.json")), &rec)?;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let finished: Vec<SweepRow> = rows.iter().filter_map(|r| r.row.clone()).collect();
    let summary = SweepSummary { axis: sweep.axis, ratio_spread: ratio_spread(&finished), rows };
    if cfg.output.wants(Format::Csv) {
        write_atomic(&out.join("sweep.csv"), &sweep_csv(&summary.rows))?;
    }
    if cfg.output.wants(Format::Json) {
        write_json(&out.join("sweep.json"), &summary)?;
    }
    Ok(summary)
}
