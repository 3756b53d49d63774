//! Output files. Every file is written to a temporary sibling and renamed into
//! place, so readers never see a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nullgeom::verify::IdentityReport;

use crate::config::RunConfig;
use crate::convergence::OrderRow;
use crate::evaluate::ScenarioResult;
use crate::svg::{plot, Axes, Series};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable fixing the report timestamp, for reproducible builds.
pub const TIMESTAMP_ENV: &str = "SOURCE_DATE_EPOCH";

/// The top level of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub reports: Vec<ScenarioReport>,
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    #[serde(flatten)]
    pub report: IdentityReport,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `bytes` to `path` atomically, creating parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io(path, e))?;
    tmp.persist(path).map_err(|e| io(path, e.error))?;
    Ok(())
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var(TIMESTAMP_ENV).ok().and_then(|v| v.parse().ok()) {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// File-system safe form of a report id.
pub fn file_stem(id: &str) -> String {
    let mut out = String::new();
    for c in id.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

#[derive(Serialize)]
struct ResidualRow<'a> {
    n_theta: usize,
    n_phi: usize,
    residual: f64,
    scale: f64,
    rel_residual: f64,
    tolerance: f64,
    verdict: &'a str,
    equality: String,
}

/// Writes `report.json`, per-identity CSV tables, flow traces and plots. Returns the
/// path of `report.json`.
pub fn write_run(
    cfg: &RunConfig,
    hash: &str,
    command: &str,
    results: &[ScenarioResult],
    out: &Path,
) -> Result<PathBuf, CliError> {
    let file = ReportFile {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config_hash: hash.to_string(),
        seed: cfg.seed,
        tol_scale: cfg.tol_scale,
        reports: results
            .iter()
            .flat_map(|res| {
                res.entries.iter().map(|e| ScenarioReport {
                    scenario: res.name.clone(),
                    report: e.report.clone(),
                })
            })
            .collect(),
        timestamp: timestamp(),
    };
    let mut json = serde_json::to_vec_pretty(&file).map_err(|e| CliError::Io(format!("json: {e}")))?;
    json.push(b'\n');
    let report_path = out.join("report.json");
    write_atomic(&report_path, &json)?;
    for res in results {
        write_scenario(res, &out.join(&res.name))?;
    }
    Ok(report_path)
}

fn write_scenario(res: &ScenarioResult, dir: &Path) -> Result<(), CliError> {
    let mut ids: Vec<&str> = Vec::new();
    for e in &res.entries {
        if !ids.contains(&e.report.id.as_str()) {
            ids.push(&e.report.id);
        }
    }
    let mut series = Vec::new();
    for id in ids {
        let reps: Vec<&IdentityReport> = res.entries.iter().map(|e| &e.report).filter(|r| r.id == id).collect();
        let rows: Vec<ResidualRow> = reps
            .iter()
            .map(|r| ResidualRow {
                n_theta: r.resolution[0],
                n_phi: r.resolution[1],
                residual: r.residual,
                scale: r.scale,
                rel_residual: r.rel_residual,
                tolerance: r.tolerance,
                verdict: match r.verdict {
                    nullgeom::verify::Verdict::Pass => "pass",
                    nullgeom::verify::Verdict::Fail => "fail",
                    nullgeom::verify::Verdict::NotApplicable => "not-applicable",
                },
                equality: r.equality.map_or(String::new(), |b| b.to_string()),
            })
            .collect();
        write_atomic(&dir.join(format!("{}.csv", file_stem(id))), &csv_bytes(&rows)?)?;
        series.push(Series {
            name: id.to_string(),
            points: reps.iter().map(|r| (r.resolution[0] as f64, r.rel_residual)).collect(),
        });
    }
    let svg = plot(
        &format!("{}: relative residual", res.name),
        "n_theta",
        "|residual| / scale",
        Axes::LogLog,
        &series,
    );
    write_atomic(&dir.join("residuals.svg"), svg.as_bytes())?;
    for t in &res.traces {
        let [nt, np] = t.resolution;
        let stem = format!("flow-{nt}x{np}");
        write_atomic(&dir.join(format!("{stem}.csv")), &csv_bytes(&t.records)?)?;
        let f = Series {
            name: "F".into(),
            points: t.records.iter().map(|r| (r.s, r.f_value)).collect(),
        };
        let svg = plot(
            &format!("{}: F along the null flow ({nt}x{np}, ds = {:.3e})", res.name, t.ds),
            "affine parameter s",
            "F",
            Axes::Linear,
            &[f],
        );
        write_atomic(&dir.join(format!("{stem}.svg")), svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct OrderCsvRow<'a> {
    scenario: &'a str,
    identity: &'a str,
    refinement: String,
    levels: usize,
    order: Option<f64>,
    declared: Option<f64>,
    status: String,
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Writes `convergence.csv` and a refinement plot per scenario.
pub fn write_orders(rows: &[OrderRow], out: &Path) -> Result<(), CliError> {
    let table: Vec<OrderCsvRow> = rows
        .iter()
        .map(|r| OrderCsvRow {
            scenario: &r.scenario,
            identity: &r.identity,
            refinement: label(&r.refinement),
            levels: r.points.len(),
            order: r.order,
            declared: r.declared,
            status: label(&r.status),
        })
        .collect();
    write_atomic(&out.join("convergence.csv"), &csv_bytes(&table)?)?;
    let mut scenarios: Vec<&str> = Vec::new();
    for r in rows {
        if !scenarios.contains(&r.scenario.as_str()) {
            scenarios.push(&r.scenario);
        }
    }
    for sc in scenarios {
        for (refinement, file, x_label) in [
            (crate::convergence::Refinement::Resolution, "convergence.svg", "n_theta"),
            (crate::convergence::Refinement::Step, "step-refinement.svg", "ds"),
        ] {
            let series: Vec<Series> = rows
                .iter()
                .filter(|r| r.scenario == sc && r.refinement == refinement && !r.points.is_empty())
                .map(|r| Series {
                    name: match r.order {
                        Some(p) => format!("{} (order {p:.2})", r.identity),
                        None => r.identity.clone(),
                    },
                    points: r.points.clone(),
                })
                .collect();
            if !series.is_empty() {
                let svg = plot(&format!("{sc}: convergence"), x_label, "error", Axes::LogLog, &series);
                write_atomic(&out.join(sc).join(file), svg.as_bytes())?;
            }
        }
    }
    Ok(())
}
