use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{write_atomic, write_json};
use serde::Serialize;
use std::path::Path;
use transonic_core::driver::{solve, OuterRecord, SolveReport, Solved, TaggedIteration};

pub const CONFIG_FILE: &str = "config.toml";

#[derive(Serialize)]
#[serde(tag = "level", rename_all = "lowercase")]
enum IterationLine<'a> {
    Inner(&'a TaggedIteration),
    Outer(&'a OuterRecord),
}

/// One JSON object per inner iteration, followed by the outer record it closes.
pub fn iterations_jsonl(s: &Solved) -> Result<String> {
    let mut out = String::new();
    for rec in &s.outcome.outer {
        for t in s.outcome.inner.iter().filter(|t| t.outer == rec.iteration) {
            out.push_str(&serde_json::to_string(&IterationLine::Inner(t))?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&IterationLine::Outer(rec))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_solution(cfg: &RunConfig, s: &Solved, out: &Path) -> Result<()> {
    write_atomic(&out.join(CONFIG_FILE), &cfg.to_toml())?;
    if cfg.output.wants(Format::Json) {
        write_json(&out.join("report.json"), &s.report)?;
    }
    if cfg.output.wants(Format::Csv) {
        write_atomic(&out.join("eulerian.csv"), &s.eulerian.to_csv())?;
        write_atomic(&out.join("shock.csv"), &s.eulerian.shock_csv())?;
    }
    if cfg.output.wants(Format::Jsonl) {
        write_atomic(&out.join("iterations.jsonl"), &iterations_jsonl(s)?)?;
    }
    Ok(())
}

/// Full solve; a failed solve still leaves a report with the structured error.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<SolveReport> {
    let spec = cfg.to_spec()?;
    match solve(&spec) {
        Ok(s) => {
            write_solution(cfg, &s, out)?;
            Ok(s.report)
        }
        Err(e) => {
            write_atomic(&out.join(CONFIG_FILE), &cfg.to_toml())?;
            write_json(&out.join("report.json"), &SolveReport::failed(&e))?;
            Err(CliError::Core(e))
        }
    }
}
