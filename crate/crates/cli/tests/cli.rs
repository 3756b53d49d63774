use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nullgeom");

fn nullgeom(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("SOURCE_DATE_EPOCH").env_remove("NULLGEOM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

fn verdicts(report: &Value) -> Vec<String> {
    report["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["verdict"].as_str().unwrap().to_string())
        .collect()
}

/// A cheap sphere scenario; `extra` is appended to the scenario table.
fn sphere_config(extra: &str) -> String {
    format!(
        r#"
[[scenario]]
name = "sphere"
resolutions = [[8, 16], [12, 24]]
{extra}

[scenario.spacetime]
family = "schwarzschild"
m = 1.0

[scenario.surface]
family = "sphere"
r0 = 4.0

[[scenario.identity]]
kind = "minkowski-k1"

[[scenario.identity]]
kind = "theorem-f"
"#
    )
}

#[test]
fn list_scenarios_names_every_bundled_config() {
    let out = nullgeom(&["list-scenarios"], &[]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for (name, _, _) in nullgeom_cli::bundled::SCENARIOS {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn every_bundled_config_validates() {
    for (name, _, _) in nullgeom_cli::bundled::SCENARIOS {
        nullgeom_cli::prepare(name, &Default::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn schwarzschild_sphere_passes_every_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["run", "schwarzschild-sphere", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = report(dir.path());
    assert_eq!(rep["schema_version"], 1);
    let v = verdicts(&rep);
    assert!(v.len() > 20);
    assert!(v.iter().all(|v| v == "pass"), "{v:?}");
    let hash = rep["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(rep["reports"].as_array().unwrap().iter().all(|r| r["config_hash"] == hash));
}

#[test]
fn negative_mass_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &sphere_config("").replace("m = 1.0", "m = -1.0"));
    let out = nullgeom(&["run", &cfg, "--out", dir.path().join("out").to_str().unwrap()], &[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("configuration error"), "{}", stderr(&out));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        sphere_config("colour = \"red\""),
        sphere_config("").replace("r0 = 4.0", "r0 = 4.0\nradius = 4.0"),
        format!("sede = 3\n{}", sphere_config("")),
    ] {
        let cfg = write_config(dir.path(), &bad);
        let out = nullgeom(&["run", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
        assert_eq!(code(&out), 1, "{bad}\n{}", stderr(&out));
    }
}

#[test]
fn fields_foreign_to_a_kind_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &sphere_config("").replace("r0 = 4.0", "r0 = 4.0\neccentricity = 0.3"));
    let out = nullgeom(&["run", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("eccentricity"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&nullgeom(&["run", "/nonexistent/config.toml"], &[])), 1);
    assert_eq!(code(&nullgeom(&["frobnicate"], &[])), 1);
    assert_eq!(code(&nullgeom(&["run"], &[])), 1);
    assert_eq!(code(&nullgeom(&["--help"], &[])), 0);
    let out = nullgeom(&["list-scenarios"], &[("NULLGEOM_THREADS", "zero")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn violated_hypotheses_are_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["run", "non-star-shaped", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("not applicable"), "{}", stderr(&out));
    let v = verdicts(&report(dir.path()));
    assert!(v.iter().any(|v| v == "not-applicable"), "{v:?}");
    assert!(!v.iter().any(|v| v == "fail"), "{v:?}");
}

#[test]
fn failed_tolerance_exits_two_and_tol_scale_relaxes_it() {
    let dir = tempfile::tempdir().unwrap();
    // At 4×8 the residual of the quadrature is about 1.7e-8 relative.
    let text = r#"
[[scenario]]
name = "coarse"
resolutions = [[4, 8]]
tolerance = 1e-9

[scenario.spacetime]
family = "minkowski"

[scenario.surface]
family = "sphere"
r0 = 1.0

[[scenario.identity]]
kind = "quadrature"
"#;
    let cfg = write_config(dir.path(), text);
    let out_dir = dir.path().join("out");
    let out = nullgeom(&["run", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert_eq!(verdicts(&report(&out_dir)), ["fail"]);
    let strict_hash = report(&out_dir)["config_hash"].clone();

    let out = nullgeom(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--tol-scale", "100"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = report(&out_dir);
    assert_eq!(verdicts(&rep), ["pass"]);
    assert_eq!(rep["tol_scale"], 100.0);
    let tol = rep["reports"][0]["tolerance"].as_f64().unwrap();
    assert!((tol - 1e-7).abs() < 1e-20);
    assert_ne!(rep["config_hash"], strict_hash);
}

#[test]
fn run_writes_tables_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["run", "null-flow", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sc = dir.path().join("null-flow");
    for f in ["flow-monotonicity.csv", "raychaudhuri.csv", "residuals.svg", "flow-32x64.csv", "flow-32x64.svg"] {
        assert!(sc.join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(sc.join("flow-32x64.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let svg = std::fs::read_to_string(sc.join("flow-32x64.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    // No temporary files are left behind.
    let stray: Vec<_> = std::fs::read_dir(&sc)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !(n.ends_with(".csv") || n.ends_with(".svg")))
        .collect();
    assert!(stray.is_empty(), "{stray:?}");
}

#[test]
fn relative_output_dir_resolves_against_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("output_dir = \"results\"\n{}", sphere_config("")));
    let out = nullgeom(&["run", &cfg], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.path().join("results/report.json").is_file());
    assert!(dir.path().join("results/sphere/minkowski-k1.csv").is_file());
}

#[test]
fn report_is_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let env = [("SOURCE_DATE_EPOCH", "1700000000")];
    let out = nullgeom(&["run", "acceptance", "--out", a.path().to_str().unwrap()], &[env[0], ("NULLGEOM_THREADS", "1")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = nullgeom(&["run", "acceptance", "--out", b.path().to_str().unwrap()], &[env[0], ("NULLGEOM_THREADS", "3")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ra = std::fs::read(a.path().join("report.json")).unwrap();
    let rb = std::fs::read(b.path().join("report.json")).unwrap();
    assert!(ra == rb, "report.json differs between thread counts");
    assert_eq!(report(a.path())["timestamp"], 1_700_000_000);
    for f in ["random-graph/minkowski-k1.csv", "null-flow/flow-24x48.csv", "null-flow/flow-24x48.svg"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_override_changes_random_surfaces_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[[scenario]]
name = "graph"
resolutions = [[12, 24]]

[scenario.spacetime]
family = "schwarzschild"
m = 1.0

[scenario.surface]
family = "random-graph"
r0 = 5.0
epsilon = 0.1
time_amplitude = 0.2

[[scenario.identity]]
kind = "heintze-karcher"
direction = "future-incoming"
"#;
    let cfg = write_config(dir.path(), text);
    let value = |seed: &str| {
        let out_dir = dir.path().join(seed);
        let out = nullgeom(&["run", &cfg, "--seed", seed, "--out", out_dir.to_str().unwrap()], &[]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let rep = report(&out_dir);
        assert_eq!(rep["seed"], seed.parse::<u64>().unwrap());
        (rep["reports"][0]["residual"].as_f64().unwrap(), rep["config_hash"].clone())
    };
    let (a, ha) = value("1");
    let (b, hb) = value("2");
    let (c, hc) = value("1");
    assert_ne!(a, b);
    assert_ne!(ha, hb);
    assert_eq!(a, c);
    assert_eq!(ha, hc);
}

#[test]
fn convergence_measures_declared_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["convergence", "random-graph", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(table.as_bytes());
    let mut checked = 0;
    for row in rows.records() {
        let row = row.unwrap();
        if &row[1] == "minkowski-k1" || &row[1] == "theorem-f" {
            let order: f64 = row[4].parse().unwrap();
            assert!(order >= 3.5, "{row:?}");
            assert_eq!(&row[6], "pass");
            checked += 1;
        }
    }
    assert_eq!(checked, 2);
    assert!(dir.path().join("random-graph/convergence.svg").is_file());
}

#[test]
fn convergence_fails_when_the_declared_order_is_out_of_reach() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[[scenario]]
name = "step"
resolutions = [[8, 16]]

[scenario.spacetime]
family = "minkowski"

[scenario.surface]
family = "sphere"
r0 = 1.0

[[scenario.identity]]
kind = "quadrature"

[[scenario]]
name = "spectral"
resolutions = [[4, 8], [5, 10], [6, 12]]

[scenario.spacetime]
family = "minkowski"

[scenario.surface]
family = "sphere"
r0 = 1.0

[[scenario.identity]]
kind = "quadrature"
order = 40.0
"#;
    let cfg = write_config(dir.path(), text);
    let out = nullgeom(&["convergence", &cfg, "--out", dir.path().join("out").to_str().unwrap()], &[]);
    assert_eq!(code(&out), 2, "{}\n{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("FAIL"));
    assert!(stdout(&out).contains("INSUFFICIENT"));
}

#[test]
fn flow_step_refinement_is_fourth_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["convergence", "null-flow", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let row = table.lines().find(|l| l.contains("raychaudhuri@32x64")).expect("step row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[2], "step");
    assert!(fields[4].parse::<f64>().unwrap() >= 3.5, "{row}");
    assert!(dir.path().join("null-flow/step-refinement.svg").is_file());
}

#[test]
fn flux_is_the_same_on_homologous_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullgeom(&["run", "flux-homologous", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep = report(dir.path());
    let spread: Vec<&Value> = rep["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["id"] == "flux-spread")
        .collect();
    assert_eq!(spread.len(), 2);
    let scale = 32.0 * std::f64::consts::PI;
    for r in spread {
        assert!(r["residual"].as_f64().unwrap().abs() <= 1e-4 * scale, "{r}");
        assert_eq!(r["diagnostics"].as_array().unwrap().len(), 3);
    }
}
