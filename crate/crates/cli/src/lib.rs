//! Configuration-driven runner for the nullgeom verification suite: reads a TOML
//! run configuration, evaluates every scenario and writes `report.json`, per-identity
//! CSV tables, flow traces and SVG plots.

pub mod bundled;
pub mod config;
pub mod convergence;
pub mod evaluate;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use config::RunConfig;
use convergence::{OrderRow, Refinement};
use evaluate::{evaluate, raychaudhuri_refinement, ScenarioResult};
use nullgeom::verify::{Relation, Verdict};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "NULLGEOM_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_scale: Option<f64>,
}

/// Loads `arg` as a file if it exists, otherwise as a bundled scenario name, applies
/// the overrides and validates. Returns the configuration and the output directory.
pub fn prepare(arg: &str, overrides: &Overrides) -> Result<(RunConfig, PathBuf), CliError> {
    let path = Path::new(arg);
    let mut cfg = if path.is_file() {
        RunConfig::load(path)?
    } else if let Some(text) = bundled::get(arg) {
        RunConfig::parse(text, Path::new("."))?
    } else {
        return Err(CliError::Usage(format!(
            "{arg} is neither a readable file nor a bundled scenario (see list-scenarios)"
        )));
    };
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(t) = overrides.tol_scale {
        cfg.tol_scale = t;
    }
    cfg.validate()?;
    let out = match (&overrides.out, &cfg.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => cfg.base_dir.join(o),
        (None, None) => PathBuf::from("nullgeom-out"),
    };
    Ok((cfg, out))
}

/// Evaluates all scenarios concurrently; results keep the configuration's order.
pub fn evaluate_all(cfg: &RunConfig) -> Result<(String, Vec<ScenarioResult>), CliError> {
    let hash = cfg.hash();
    let results = cfg
        .scenarios
        .par_iter()
        .map(|sc| evaluate(cfg, sc, &hash))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((hash, results))
}

/// Outcome of a command: its exit code and the files it wrote.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report_path: PathBuf,
}

/// `run`: evaluates, writes every output and reports verdicts. Exit 0 unless some
/// identity fails its tolerance; not-applicable verdicts only warn.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (hash, results) = evaluate_all(cfg)?;
    let report_path = output::write_run(cfg, &hash, "run", &results, out)?;
    let mut failed = false;
    for res in &results {
        for e in &res.entries {
            let r = &e.report;
            let [nt, np] = r.resolution;
            println!(
                "{:<14} {:<20} {:<48} {:>4}x{:<4} rel={:.3e} tol={:.1e}",
                verdict_label(r.verdict),
                res.name,
                r.id,
                nt,
                np,
                r.rel_residual,
                r.tolerance
            );
            match r.verdict {
                Verdict::Fail => failed = true,
                Verdict::NotApplicable => {
                    eprintln!("warning: {} {} not applicable: {}", res.name, r.id, r.warnings.join("; "))
                }
                Verdict::Pass => {}
            }
            if r.verdict == Verdict::Pass {
                for w in &r.warnings {
                    eprintln!("warning: {} {}: {w}", res.name, r.id);
                }
            }
        }
    }
    Ok(Outcome {
        exit_code: if failed { EXIT_FAILED } else { EXIT_OK },
        report_path,
    })
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::NotApplicable => "NOT-APPLICABLE",
    }
}

/// Order table of a set of results: one row per identity over resolutions, and one
/// per flow over step refinement at the finest resolution.
pub fn order_table(cfg: &RunConfig, results: &[ScenarioResult]) -> Result<Vec<OrderRow>, CliError> {
    let mut rows = Vec::new();
    for (sc, res) in cfg.scenarios.iter().zip(results) {
        for (index, id) in sc.identities.iter().enumerate() {
            if id.kind == config::IdentityKind::Flow {
                let &[nt, np] = sc.resolutions.last().expect("validated");
                let study = raychaudhuri_refinement(cfg, sc, id, nt, np)?;
                let label = format!("raychaudhuri@{nt}x{np}");
                let row = if study.iter().all(|(_, r)| r.is_ok()) {
                    let points = study.into_iter().map(|(ds, r)| (ds, r.expect("checked"))).collect();
                    OrderRow::new(&sc.name, &label, Refinement::Step, points, id.order)
                } else {
                    for (ds, r) in &study {
                        if let Err(e) = r {
                            eprintln!("warning: {} {label} at ds = {ds}: {e}", sc.name);
                        }
                    }
                    OrderRow::failed(&sc.name, &label, Refinement::Step, id.order)
                };
                rows.push(row);
                continue;
            }
            // Reports of this identity, grouped by id in first-seen order.
            let mut ids: Vec<String> = Vec::new();
            for e in res.entries.iter().filter(|e| e.identity == index) {
                if !ids.contains(&e.report.id) {
                    ids.push(e.report.id.clone());
                }
            }
            for rid in ids {
                let reps: Vec<_> = res
                    .entries
                    .iter()
                    .filter(|e| e.identity == index && e.report.id == rid)
                    .map(|e| &e.report)
                    .collect();
                if reps.iter().any(|r| r.verdict == Verdict::NotApplicable && r.scale == 0.0) {
                    rows.push(OrderRow::failed(&sc.name, &rid, Refinement::Resolution, id.order));
                    continue;
                }
                let points: Vec<(f64, f64)> = match reps.first().map(|r| r.relation) {
                    Some(Relation::Inequality) => reps
                        .windows(2)
                        .map(|w| {
                            let d = (w[0].residual - w[1].residual).abs() / w[1].scale.max(f64::MIN_POSITIVE);
                            (w[0].resolution[0] as f64, d)
                        })
                        .collect(),
                    _ => reps.iter().map(|r| (r.resolution[0] as f64, r.rel_residual)).collect(),
                };
                rows.push(OrderRow::new(&sc.name, &rid, Refinement::Resolution, points, id.order));
            }
        }
    }
    Ok(rows)
}

/// `convergence`: evaluates, fits orders and writes the order table. Exit 2 when a
/// measured order falls more than the slack below the declared one.
pub fn convergence(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (hash, results) = evaluate_all(cfg)?;
    let report_path = output::write_run(cfg, &hash, "convergence", &results, out)?;
    let rows = order_table(cfg, &results)?;
    output::write_orders(&rows, out)?;
    let mut failed = false;
    for row in &rows {
        let order = row.order.map_or("-".to_string(), |p| format!("{p:.2}"));
        let declared = row.declared.map_or("-".to_string(), |p| format!("{p:.1}"));
        println!(
            "{:<13} {:<20} {:<48} order={:<7} declared={}",
            serde_json::to_value(row.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_uppercase))
                .unwrap_or_default(),
            row.scenario,
            row.identity,
            order,
            declared
        );
        failed |= row.fails();
    }
    Ok(Outcome {
        exit_code: if failed { EXIT_FAILED } else { EXIT_OK },
        report_path,
    })
}

/// Applies the thread-count override once per process.
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        // A pool that already exists keeps its size; results do not depend on it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
