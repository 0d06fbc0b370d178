use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use transonic_cli::commands::{cmd_polar, cmd_solve, cmd_sweep, cmd_verify, verify_config, verify_dump, Status};
use transonic_cli::{CliError, Result, RunConfig};

#[derive(Parser)]
#[command(name = "transonic", version, about = "Transonic shock past a two-dimensional wedge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML); for `verify` also a solution directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample the shock polar: polar.csv and summary.json.
    Polar,
    /// Solve the free-boundary problem: report.json, eulerian.csv, shock.csv, iterations.jsonl.
    Solve,
    /// Run the invariant suites on a configuration or a solution directory.
    Verify,
    /// Amplitude sweep: one row per amplitude, aggregated into sweep.csv.
    Sweep,
}

fn config_path(cli: &Cli) -> Result<&Path> {
    cli.config.as_deref().ok_or_else(|| CliError::Config { path: "--config".into(), message: "required".into() })
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Threads(e.to_string()))?;
    }
    let path = config_path(cli)?;
    match cli.command {
        Command::Polar => {
            let (cfg, out) = load(cli, path)?;
            let s = cmd_polar(&cfg, &out)?;
            println!("theta_sonic_deg {:.6} theta_critical_deg {:.6}", s.theta_sonic_deg, s.theta_critical_deg);
            Ok(0)
        }
        Command::Solve => {
            let (cfg, out) = load(cli, path)?;
            let r = cmd_solve(&cfg, &out)?;
            println!(
                "converged {} outer {} rh {:e} g {:e} H {:e} slip {:e}",
                r.converged, r.outer_iterations, r.rh.value, r.residual_gtilde, r.residual_htilde, r.slip.value
            );
            if let Some(d) = &r.decay {
                println!("decay exponents: state {:?} shock slope {:?}", d.state.exponent, d.shock_slope.exponent);
            }
            Ok(if r.converged { 0 } else { 4 })
        }
        Command::Sweep => {
            let (cfg, out) = load(cli, path)?;
            let s = cmd_sweep(&cfg, &out)?;
            for r in &s.rows {
                match (&r.row, &r.error) {
                    (Some(w), _) => println!("amplitude {:e}: ratio {:?}", r.amplitude, w.stability.ratio),
                    (None, e) => println!("amplitude {:e}: failed {}", r.amplitude, e.as_ref().map_or("", |e| e.message.as_str())),
                }
            }
            println!("ratio spread {:?}", s.ratio_spread);
            Ok(0)
        }
        Command::Verify => verify(cli, path),
    }
}

fn load(cli: &Cli, path: &Path) -> Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(path)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    Ok((cfg, out))
}

/// Failed suites are report content, not an error exit.
fn verify(cli: &Cli, path: &Path) -> Result<u8> {
    let (report, out) = if path.is_dir() {
        (verify_dump(path)?, cli.out.clone().unwrap_or_else(|| path.to_path_buf()))
    } else {
        let (cfg, out) = load(cli, path)?;
        (verify_config(&cfg, path)?, out)
    };
    cmd_verify(&report, &out)?;
    for s in &report.suites {
        let tag = match s.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let value = s.value.map_or(String::new(), |v| format!(" {v:e}"));
        let at = s.at.map_or(String::new(), |a| format!(" at x = ({:e}, {:e}), eulerian.csv line {}", a[0], a[1], s.line.unwrap_or(0)));
        println!("{tag} {}{value}{at}: {}", s.name, s.detail);
    }
    println!("verify: {}", if report.pass { "pass" } else { "fail" });
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
