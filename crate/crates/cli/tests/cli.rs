//! End-to-end runs of the `transonic` binary on coarse grids.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;
use transonic_cli::RunConfig;

const BASE: &str = r#"
[gas]
gamma = 1.4

[upstream]
mach = 2.0
p = 1.0
rho = 1.0

[wedge]
theta0_deg = 22.93

[grid]
R = 16.0
k = 1.0
n1 = 16
n2 = 16
grading = 1.1
"#;

const BUMP: &str = r#"
[wedge.bump]
kind = "compact-poly"
amplitude = 1e-3
center = 2.0
width = 1.0
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transonic"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Bump on a grid large enough for three dyadic annuli.
fn bump_config(extra: &str) -> String {
    let grid = BASE.replace("R = 16.0", "R = 64.0").replace("= 16", "= 32").replace("1.1\n", "1.15\n");
    format!("{grid}{BUMP}{extra}")
}

#[test]
fn polar_reports_the_m2_angles() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["polar"], &write_config(dir.path(), BASE), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("summary.json"));
    let tc = s["theta_critical_deg"].as_f64().unwrap();
    let ts = s["theta_sonic_deg"].as_f64().unwrap();
    assert!((tc - 22.97).abs() <= 0.05 && (ts - 22.71).abs() <= 0.05 && ts < tc);
    let csv = fs::read_to_string(out.join("polar.csv")).unwrap();
    assert!(csv.starts_with("p,rho,u1,u2,wedge_angle_deg,shock_slope_s,mach_down,Cp,arc\n"));
    assert_eq!(csv.lines().count(), 402);
}

#[test]
fn polar_at_m12_has_positive_angles() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["polar"], &write_config(dir.path(), &BASE.replace("mach = 2.0", "mach = 1.2")), &out);
    assert_eq!(o.status.code(), Some(0));
    let s = json(&out.join("summary.json"));
    assert!(s["theta_sonic_deg"].as_f64().unwrap() > 0.0 && s["theta_critical_deg"].as_f64().unwrap() > 0.0);
}

#[test]
fn subsonic_upstream_is_a_precondition_exit() {
    let dir = TempDir::new().unwrap();
    let o = run(&["polar"], &write_config(dir.path(), &BASE.replace("mach = 2.0", "mach = 0.8")), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not supersonic"));
}

#[test]
fn unknown_key_is_a_config_exit_with_location() {
    let dir = TempDir::new().unwrap();
    let o = run(&["solve"], &write_config(dir.path(), &BASE.replace("n2 = 16", "n2 = 16\nn3 = 4")), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("n3") && err.contains("line"), "{err}");
}

#[test]
fn missing_config_is_a_config_exit() {
    let o = Command::new(env!("CARGO_BIN_EXE_transonic")).arg("solve").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn background_solve_converges_in_one_outer_iteration() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["solve"], &write_config(dir.path(), BASE), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("report.json"));
    assert_eq!(r["converged"], true);
    assert_eq!(r["outer_iterations"], 1);
    for key in ["residual_interior", "residual_gtilde", "residual_htilde", "entropy_streamline"] {
        assert!(r[key].as_f64().unwrap() <= 1e-10, "{key}: {}", r[key]);
    }
    assert!(r["rh"]["value"].as_f64().unwrap() <= 1e-10);
    assert!(fs::read_to_string(out.join("eulerian.csv")).unwrap().starts_with("x1,x2,u1,u2,p,rho,region\n"));
    assert!(fs::read_to_string(out.join("shock.csv")).unwrap().starts_with("x2,sigma,sigma_prime\n"));
    let lines: Vec<serde_json::Value> =
        fs::read_to_string(out.join("iterations.jsonl")).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.last().unwrap()["level"], "outer");
    assert!(lines.iter().any(|l| l["level"] == "inner"));
}

#[test]
fn detached_wedge_writes_a_structured_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["solve"], &write_config(dir.path(), &BASE.replace("22.93", "30.0")), &out);
    assert_eq!(o.status.code(), Some(3));
    let r = json(&out.join("report.json"));
    assert_eq!(r["converged"], false);
    assert_eq!(r["error"]["class"], "physics");
    assert!(r["error"]["message"].as_str().unwrap().contains("detachment"));
}

#[test]
fn bump_solve_is_bit_identical_and_reports_decay() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &bump_config(""));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["solve"], &cfg, &a).status.code(), Some(0));
    assert_eq!(run(&["solve"], &cfg, &b).status.code(), Some(0));
    for f in ["report.json", "eulerian.csv", "shock.csv", "iterations.jsonl", "config.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let r = json(&a.join("report.json"));
    assert_eq!(r["converged"], true);
    assert!(r["decay"]["state"]["exponent"].is_number(), "{}", r["decay"]);
}

#[test]
fn verify_locates_a_hand_edited_pressure() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["solve"], &write_config(dir.path(), BASE), &out).status.code(), Some(0));
    let fresh = run(&["verify"], &out, &out);
    assert_eq!(fresh.status.code(), Some(0));
    assert_eq!(json(&out.join("verify.json"))["pass"], true);

    let path = out.join("eulerian.csv");
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    let k = lines.iter().enumerate().filter(|(_, l)| l.ends_with(",shock")).nth(4).unwrap().0;
    let mut f: Vec<String> = lines[k].split(',').map(String::from).collect();
    f[4] = format!("{:e}", f[4].parse::<f64>().unwrap() * 1.01);
    lines[k] = f.join(",");
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    assert_eq!(run(&["verify"], &out, &out).status.code(), Some(0));
    let v = json(&out.join("verify.json"));
    assert_eq!(v["pass"], false);
    let rh = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "rh").unwrap();
    assert_eq!(rh["status"], "fail");
    assert_eq!(rh["line"].as_u64().unwrap() as usize, k + 1);
    let slip = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "slip").unwrap();
    assert_eq!(slip["status"], "pass");
}

#[test]
fn verify_on_a_config_runs_every_suite() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["verify"], &write_config(dir.path(), BASE), &out).status.code(), Some(0));
    let v = json(&out.join("verify.json"));
    assert_eq!(v["pass"], true, "{v}");
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["rh", "slip", "entropy-streamline", "comparison", "mms"]);
    let mms = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "mms").unwrap();
    assert!(mms["value"].as_f64().unwrap() >= 1.9);
}

#[test]
fn empty_sweep_axis_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &bump_config("\n[sweep]\naxis = \"wedge-bump\"\namplitudes = []\n"));
    let o = run(&["sweep"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no amplitudes"));
}

#[test]
fn single_point_sweep_matches_the_solve() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &bump_config("\n[sweep]\naxis = \"wedge-bump\"\namplitudes = [1e-3]\n"));
    let (sw, so) = (dir.path().join("sweep"), dir.path().join("solve"));
    assert_eq!(run(&["sweep"], &cfg, &sw).status.code(), Some(0));
    assert_eq!(run(&["solve"], &cfg, &so).status.code(), Some(0));
    let s = json(&sw.join("sweep.json"));
    let rows = s["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let r = json(&so.join("report.json"));
    let row = &rows[0]["row"];
    assert_eq!(row["outer_iterations"], r["outer_iterations"]);
    assert_eq!(row["state_exponent"], r["decay"]["state"]["exponent"]);
    assert_eq!(row["shock_slope_exponent"], r["decay"]["shock_slope"]["exponent"]);
    assert_eq!(row["sup_state_decay"], r["decay"]["sup_state"]);
}

#[test]
fn sweep_rows_are_thread_count_independent() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &bump_config("\n[sweep]\naxis = \"wedge-bump\"\namplitudes = [1e-3, 5e-4, 2.5e-4]\n"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let one = Command::new(env!("CARGO_BIN_EXE_transonic")).args(["sweep", "--threads", "1", "--config"]).arg(&cfg).arg("--out").arg(&a).output().unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_transonic")).args(["sweep", "--threads", "3", "--config"]).arg(&cfg).arg("--out").arg(&b).output().unwrap();
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(three.status.code(), Some(0));
    let csv = fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.join("sweep.csv")).unwrap());
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(fs::read_dir(a.join("rows")).unwrap().count(), 3);
    let spread = json(&a.join("sweep.json"))["ratio_spread"].as_f64().unwrap();
    assert!(spread <= 2.0, "{spread}");
}

#[test]
fn shipped_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_toml(), &path).unwrap(), cfg, "{}", path.display());
        cfg.to_spec().unwrap().prepare().unwrap();
        n += 1;
    }
    assert!(n >= 3);
}
