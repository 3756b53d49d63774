//! Evaluates the identities of one scenario at each of its resolutions.

use std::sync::Arc;

use nullgeom::nullflow::{default_step, evolve, FlowRecord, FlowState, FlowTrace};
use nullgeom::surface::{Ambient, Gauge, Immersion, NullFrameField, SurfaceMesh};
use nullgeom::verify::*;
use nullgeom::GeomError;

use crate::config::{IdentityConfig, IdentityKind, RunConfig, ScenarioConfig};
use crate::CliError;

/// Default number of flow steps.
pub const FLOW_STEPS: usize = 20;

/// Everything one scenario produced.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub name: String,
    /// Resolution-major: all identities at the first resolution, then the next.
    pub entries: Vec<Entry>,
    pub traces: Vec<TraceResult>,
}

/// A report and the index of the configured identity that produced it.
#[derive(Debug, Clone)]
pub struct Entry {
    pub identity: usize,
    pub report: IdentityReport,
}

#[derive(Debug, Clone)]
pub struct TraceResult {
    pub resolution: [usize; 2],
    pub ds: f64,
    pub records: Vec<FlowRecord>,
}

/// Stable label of a configured identity, used when it cannot be evaluated.
pub fn identity_label(id: &IdentityConfig) -> String {
    let mut args = Vec::new();
    for (name, v) in [("r", id.r), ("s", id.s), ("k", id.k)] {
        if let Some(v) = v {
            args.push(format!("{name}={v}"));
        }
    }
    if let Some(v) = id.variant {
        args.push(format!("variant={}", v.name()));
    }
    if let Some(m) = id.mode {
        args.push(format!("mode={}", if m == SchwarzschildMode::L { "l" } else { "lbar" }));
    }
    if let Some(d) = id.direction {
        args.push(format!("direction={}", d.name()));
    }
    if args.is_empty() {
        id.kind_name()
    } else {
        format!("{}({})", id.kind_name(), args.join(","))
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    sc: &'a ScenarioConfig,
    amb: Ambient,
    gauge: Gauge,
}

impl Context<'_> {
    fn config_error(&self, e: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("scenario {:?}: {e}", self.sc.name))
    }

    fn field(&self, imm: Arc<dyn Immersion>, nt: usize, np: usize) -> Result<NullFrameField, CliError> {
        let mut mesh = SurfaceMesh::build(self.amb, imm, nt, np).map_err(|e| self.config_error(e))?;
        if let Some(h) = self.sc.stencil_step {
            mesh = mesh.with_stencil_step(h).map_err(|e| self.config_error(e))?;
        }
        NullFrameField::build(Arc::new(mesh), self.gauge.clone()).map_err(|e| self.config_error(e))
    }

    fn immersion(&self, s: &crate::config::SurfaceConfig, nt: usize, np: usize) -> Result<Arc<dyn Immersion>, CliError> {
        s.immersion(&self.sc.name, &self.amb, nt, np, &self.cfg.base_dir, self.cfg.seed)
    }

    fn finish(&self, id: &IdentityConfig, rep: IdentityReport, hash: &str) -> IdentityReport {
        let base = id.tolerance.or(self.sc.tolerance).unwrap_or(rep.tolerance);
        rep.with_tolerance(base * self.cfg.tol_scale).with_config_hash(hash)
    }
}

pub fn evaluate(cfg: &RunConfig, sc: &ScenarioConfig, hash: &str) -> Result<ScenarioResult, CliError> {
    let ctx = Context {
        cfg,
        sc,
        amb: sc.spacetime.ambient(&sc.name)?,
        gauge: sc.gauge.gauge(&sc.name)?,
    };
    let mut entries = Vec::new();
    let mut traces = Vec::new();
    for &[nt, np] in &sc.resolutions {
        let field = ctx.field(ctx.immersion(&sc.surface, nt, np)?, nt, np)?;
        for (index, id) in sc.identities.iter().enumerate() {
            let produced = match id.kind {
                IdentityKind::Flow => {
                    let (reps, trace) = run_flow(&field, id);
                    if let Some(t) = trace {
                        traces.push(TraceResult {
                            resolution: [nt, np],
                            ds: t.ds,
                            records: t.records(),
                        });
                    }
                    reps
                }
                IdentityKind::FluxSpread => {
                    let mut fields = vec![field.clone()];
                    for s in &id.surfaces {
                        fields.push(ctx.field(ctx.immersion(s, nt, np)?, nt, np)?);
                    }
                    let refs: Vec<&NullFrameField> = fields.iter().collect();
                    vec![flux_spread(&refs)]
                }
                _ => vec![single(&field, id)],
            };
            for rep in produced {
                let rep = rep.unwrap_or_else(|e| {
                    IdentityReport::from_error(identity_label(id), &field.mesh, field.gauge.name(), &e)
                });
                entries.push(Entry {
                    identity: index,
                    report: ctx.finish(id, rep, hash),
                });
            }
        }
    }
    Ok(ScenarioResult {
        name: sc.name.clone(),
        entries,
        traces,
    })
}

fn param(v: Option<usize>) -> usize {
    v.expect("validated")
}

fn single(field: &NullFrameField, id: &IdentityConfig) -> nullgeom::Result<IdentityReport> {
    let mesh = &field.mesh;
    match id.kind {
        IdentityKind::Quadrature => Ok(quadrature_check(mesh)),
        IdentityKind::MinkowskiK1 => minkowski_k1(field),
        IdentityKind::MinkowskiK1Reduced => minkowski_k1_reduced(field),
        IdentityKind::MinkowskiRs => minkowski_rs(field, param(id.r), param(id.s), id.variant.expect("validated")),
        IdentityKind::ClassicalMinkowski => classical_minkowski(mesh, param(id.k)),
        IdentityKind::ClassicalRecovery => classical_recovery(field, param(id.k)),
        IdentityKind::BrendleHk => brendle_slice_hk(mesh),
        IdentityKind::BrendleEichmair => brendle_eichmair(mesh, param(id.k)),
        IdentityKind::HeintzeKarcher => heintze_karcher(field, id.direction.expect("validated")),
        IdentityKind::NewtonMaclaurin => newton_maclaurin_chain(field, param(id.r), param(id.s)),
        IdentityKind::AlexandrovSandwich => alexandrov_sandwich(field, param(id.r), param(id.s)),
        IdentityKind::TheoremF => theorem_f(field),
        IdentityKind::Flux => flux_report(field),
        IdentityKind::Divergence => divergence_check(field, param(id.r), param(id.s)),
        IdentityKind::SchwarzschildInequality => {
            schwarzschild_inequalities(field, param(id.k), id.mode.expect("validated"))
        }
        IdentityKind::FluxSpread | IdentityKind::Flow => unreachable!("handled by the caller"),
    }
}

/// The four flow reports, and the trace when the flow could start.
fn run_flow(field: &NullFrameField, id: &IdentityConfig) -> (Vec<nullgeom::Result<IdentityReport>>, Option<FlowTrace>) {
    let ds = id.ds.unwrap_or_else(|| default_step(field));
    let steps = id.steps.unwrap_or(FLOW_STEPS);
    let trace = match FlowState::initial(field.clone()).and_then(|s| evolve(s, ds, steps)) {
        Ok(t) => t,
        Err(e) => return (vec![Err(e)], None),
    };
    let reps = vec![
        Ok(trace.monotonicity_report()),
        trace.q_rate_report(),
        trace.ratio_rate_report(),
        trace.raychaudhuri_report(),
    ];
    (reps, Some(trace))
}

/// Raychaudhuri residual at the middle of the flow for steps `h`, `h/2`, `h/4` at the
/// given resolution, `h = refine_ds` (default: the flow step); entries are `(step, residual)`.
pub fn raychaudhuri_refinement(
    cfg: &RunConfig,
    sc: &ScenarioConfig,
    id: &IdentityConfig,
    nt: usize,
    np: usize,
) -> Result<Vec<(f64, nullgeom::Result<f64>)>, CliError> {
    let ctx = Context {
        cfg,
        sc,
        amb: sc.spacetime.ambient(&sc.name)?,
        gauge: sc.gauge.gauge(&sc.name)?,
    };
    let field = ctx.field(ctx.immersion(&sc.surface, nt, np)?, nt, np)?;
    let ds = id.ds.unwrap_or_else(|| default_step(&field));
    let length = ds * id.steps.unwrap_or(FLOW_STEPS) as f64;
    let ds0 = id.refine_ds.unwrap_or(ds);
    // An even step count keeps the midpoint on the coarsest grid.
    let n0 = (((length / ds0).round() as usize).max(4) + 1) / 2 * 2;
    let mut out = Vec::new();
    for level in 0..3 {
        let factor = 1usize << level;
        let ds = ds0 / factor as f64;
        let res = FlowState::initial(field.clone())
            .and_then(|s| evolve(s, ds, n0 * factor))
            .and_then(|t| {
                if t.termination.is_some() {
                    return Err(GeomError::FlowTerminated(format!("{:?}", t.termination)));
                }
                t.raychaudhuri_residual(n0 * factor / 2)
            });
        out.push((ds, res));
    }
    Ok(out)
}
