//! The affine null flow of a surface along its future incoming null hypersurface,
//! and the functional
//! `F = (n−1)/n ∫⟨ξ,L̄⟩/⟨H,L̄⟩ dμ − ½∫Q(L,L̄) dμ`, `ξ = −n∂_t`, which it decreases.
//!
//! Every node follows the null geodesic through it with initial velocity `L̄`. After
//! each step the surface is refitted spectrally through the new positions and its
//! geometry rebuilt; `L` is reconstructed on the new surface, `L̄` is the transported
//! velocity. The geodesics continue from their integrated positions, never from the
//! refit, so truncation error of the fit stays out of the trajectories.

use std::io::Write;
use std::sync::Arc;

use nalgebra::Vector4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::surface::{
    dot, gamma_apply, riem4, Ambient, Gauge, NullFrameField, Spectral, SurfaceMesh,
};
use crate::verify::{IdentityReport, Relation, Term};

/// Stop once `min⟨H,L̄⟩` falls below this fraction of its initial value.
pub const SIGN_LOSS_FRACTION: f64 = 1e-3;
/// Stop once the area falls below this fraction of its initial value (caustic).
pub const CAUSTIC_AREA_FRACTION: f64 = 1e-3;

/// `F(Σ, [L̄])`; invariant under `L → aL`, `L̄ → L̄/a`.
pub fn f_functional(field: &NullFrameField) -> Result<f64> {
    let (ratio, q) = f_terms(field)?;
    Ok(ratio - q)
}

/// `((n−1)/n ∫⟨ξ,L̄⟩/⟨H,L̄⟩, ½∫Q(L,L̄))`.
fn f_terms(field: &NullFrameField) -> Result<(f64, f64)> {
    let bad: Vec<usize> = (0..field.len()).filter(|&i| !(field.nodes[i].h_lbar > 0.0)).collect();
    if let Some(&i) = bad.first() {
        let (j, k) = field.mesh.grid.unflatten(i);
        return Err(GeomError::Precondition(format!(
            "<H,Lbar> > 0 fails at {} nodes, first ({j}, {k})",
            bad.len()
        )));
    }
    let n = field.mesh.ambient.family.n() as f64;
    let ratio = field.integrate(|_, _, nf| (n - 1.0) / n * (-n * nf.dt_lbar) / nf.h_lbar)?;
    let q = field.integrate(|_, _, nf| 0.5 * nf.q_llbar)?;
    Ok((ratio, q))
}

/// Scalar summary of one flow state; one CSV row of the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub step: usize,
    pub s: f64,
    #[serde(rename = "F")]
    pub f_value: f64,
    /// `min ⟨H, L̄⟩` for the transported `L̄`.
    pub min_h_lbar: f64,
    pub area: f64,
    /// `∫Q(L, L̄)`.
    pub q_integral: f64,
    /// `∫⟨ξ,L̄⟩/⟨H,L̄⟩`.
    pub ratio_integral: f64,
    /// `∫⟨ξ,L̄⟩`.
    pub xi_integral: f64,
    /// `max |⟨L̄,L̄⟩|` after the step, before projecting back to the null cone.
    pub null_defect: f64,
    /// `max |L̄^⊤|_σ / c` with `c = −½⟨L̄, L⟩`: how far the transported `L̄` is from normal.
    pub normal_defect: f64,
    /// `max |x_fit − x|` over nodes: how well the refitted surface passes through the generators.
    pub fit_defect: f64,
}

/// A surface on the flow with its transported null normal.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub record: FlowRecord,
    /// Frame of the current surface, slice gauge for the initial gauge's `[L̄]`.
    pub field: NullFrameField,
    /// Generator positions and velocities; the positions are the integrated ones, not
    /// the refitted surface's nodes.
    pub position: Vec<Vector4<f64>>,
    pub velocity: Vec<Vector4<f64>>,
    /// Per node: `⟨H, L̄⟩` and `|χ̄|² + Ric(L̄, L̄)` for the transported `L̄`.
    pub h_lbar: Vec<f64>,
    pub raychaudhuri_rhs: Vec<f64>,
}

impl FlowState {
    /// Starts the flow with `L̄` of the given frame as initial velocity.
    pub fn initial(field: NullFrameField) -> Result<Self> {
        let velocity = field.nodes.iter().map(|nf| nf.frame.lbar).collect();
        let position = field.mesh.nodes.iter().map(|pg| pg.x).collect();
        Self::assemble(0, 0.0, field, position, velocity, 0.0)
    }

    fn assemble(
        step: usize,
        s: f64,
        field: NullFrameField,
        position: Vec<Vector4<f64>>,
        velocity: Vec<Vector4<f64>>,
        null_defect: f64,
    ) -> Result<Self> {
        let amb = field.mesh.ambient;
        let n = amb.family.n() as f64;
        let per: Vec<(f64, f64, f64, f64)> = (0..field.len())
            .into_par_iter()
            .map(|i| {
                let (pg, nf) = (&field.mesh.nodes[i], &field.nodes[i]);
                let v = &velocity[i];
                // v = c·L̄ + tangential error.
                let c = -0.5 * pg.dot(v, &nf.frame.l);
                let t = pg.tangential(v);
                let tangential = (t.transpose() * pg.sigma * t)[(0, 0)].max(0.0).sqrt();
                let si = pg.sigma_inv;
                let chibar2 = (si * nf.frame.chibar * si * nf.frame.chibar).trace();
                let ric = ricci_along(&amb, &pg.x, &nf.frame.lbar)?;
                Ok((
                    c * nf.h_lbar,
                    c * c * (chibar2 + ric),
                    c * nf.dt_lbar,
                    tangential / c.abs().max(f64::MIN_POSITIVE),
                ))
            })
            .collect::<Result<_>>()?;
        let h_lbar: Vec<f64> = per.iter().map(|p| p.0).collect();
        let raychaudhuri_rhs = per.iter().map(|p| p.1).collect();
        let (ratio_term, q_half) = f_terms(&field)?;
        let xi: Vec<f64> = per.iter().map(|p| -n * p.2).collect();
        let xi_integral = field.mesh.integrate(&xi)?;
        let record = FlowRecord {
            step,
            s,
            f_value: ratio_term - q_half,
            min_h_lbar: h_lbar.iter().copied().fold(f64::INFINITY, f64::min),
            area: field.mesh.area(),
            q_integral: 2.0 * q_half,
            ratio_integral: ratio_term * n / (n - 1.0),
            xi_integral,
            null_defect,
            normal_defect: per.iter().map(|p| p.3).fold(0.0, f64::max),
            fit_defect: field
                .mesh
                .nodes
                .iter()
                .zip(&position)
                .map(|(pg, x)| (pg.x - x).amax())
                .fold(0.0, f64::max),
        };
        Ok(Self {
            record,
            field,
            position,
            velocity,
            h_lbar,
            raychaudhuri_rhs,
        })
    }

    /// One RK4 step of length `ds` for every generator, then a rebuild.
    pub fn advance(&self, ds: f64) -> Result<Self> {
        let mesh = &self.field.mesh;
        let amb = mesh.ambient;
        let moved: Vec<(Vector4<f64>, Vector4<f64>, f64)> = (0..mesh.len())
            .into_par_iter()
            .map(|i| {
                let (x, v) = rk4_geodesic(&amb, self.position[i], self.velocity[i], ds)?;
                let defect = dot(&amb.metric(&x), &v, &v).abs();
                Ok((x, project_null(&amb, &x, v), defect))
            })
            .collect::<Result<_>>()?;
        let samples: Vec<[f64; 4]> = moved.iter().map(|(x, _, _)| [x[0], x[1], x[2], x[3]]).collect();
        let label = format!("null flow of {} at s = {}", mesh.immersion.name(), self.record.s + ds);
        let imm = Spectral::fit(&mesh.grid, &samples, &label)?;
        let (nt, np) = mesh.resolution();
        let new_mesh = SurfaceMesh::build(amb, Arc::new(imm), nt, np)?.with_stencil_step(mesh.stencil_step)?;
        let field = NullFrameField::build(Arc::new(new_mesh), Gauge::Slice)?;
        let position = moved.iter().map(|(x, _, _)| *x).collect();
        let velocity = moved.iter().map(|(_, v, _)| *v).collect();
        let defect = moved.iter().map(|m| m.2).fold(0.0, f64::max);
        Self::assemble(self.record.step + 1, self.record.s + ds, field, position, velocity, defect)
    }
}

/// `Ric(v, v) = g^{αγ} R̄(e_α, v, e_γ, v)`; zero for every vacuum or Einstein member.
fn ricci_along(amb: &Ambient, x: &Vector4<f64>, v: &Vector4<f64>) -> Result<f64> {
    if amb.family.is_constant_curvature() || amb.family.is_vacuum_schwarzschild() {
        return Ok(0.0);
    }
    let r = amb.riemann(x)?;
    let gi = amb.inverse_metric(x);
    let e = |a: usize| Vector4::from_fn(|k, _| if k == a { 1.0 } else { 0.0 });
    let mut acc = 0.0;
    for a in 0..4 {
        for c in 0..4 {
            if gi[(a, c)] != 0.0 {
                acc += gi[(a, c)] * riem4(&r, &e(a), v, &e(c), v);
            }
        }
    }
    Ok(acc)
}

/// Classical RK4 for `ẍ = −Γ(ẋ, ẋ)`.
fn rk4_geodesic(amb: &Ambient, x: Vector4<f64>, v: Vector4<f64>, ds: f64) -> Result<(Vector4<f64>, Vector4<f64>)> {
    let acc = |x: &Vector4<f64>, v: &Vector4<f64>| -> Result<Vector4<f64>> {
        amb.check(x)?;
        Ok(-gamma_apply(&amb.christoffel(x), v, v))
    };
    let k1x = v;
    let k1v = acc(&x, &v)?;
    let k2x = v + k1v * (0.5 * ds);
    let k2v = acc(&(x + k1x * (0.5 * ds)), &k2x)?;
    let k3x = v + k2v * (0.5 * ds);
    let k3v = acc(&(x + k2x * (0.5 * ds)), &k3x)?;
    let k4x = v + k3v * ds;
    let k4v = acc(&(x + k3x * ds), &k4x)?;
    let x1 = x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (ds / 6.0);
    let v1 = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (ds / 6.0);
    amb.check(&x1)?;
    Ok((x1, v1))
}

/// Rescales the time component so that `⟨v, v⟩ = 0`; the metric has no `dt dx` terms.
fn project_null(amb: &Ambient, x: &Vector4<f64>, v: Vector4<f64>) -> Vector4<f64> {
    let g = amb.metric(x);
    let spatial: f64 = (1..4).flat_map(|i| (1..4).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] * v[i] * v[j]).sum();
    let mut out = v;
    out[0] = v[0].signum() * (spatial / -g[(0, 0)]).sqrt();
    out
}

/// Why a flow stopped early.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `min⟨H,L̄⟩` dropped below the sign-loss fraction of its initial value.
    SignLoss { step: usize, min_h_lbar: f64 },
    /// The area collapsed towards a caustic.
    Caustic { step: usize, area: f64 },
    /// A geometric precondition failed on the new surface.
    Degenerate { step: usize, reason: String },
}

/// The states of a flow, the initial one first.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub ds: f64,
    pub states: Vec<FlowState>,
    pub termination: Option<Termination>,
}

/// Default step `0.01·min r` over the initial surface.
pub fn default_step(field: &NullFrameField) -> f64 {
    let rmin = field
        .mesh
        .nodes
        .iter()
        .map(|pg| Ambient::radius(&pg.x))
        .fold(f64::INFINITY, f64::min);
    0.01 * rmin
}

/// Runs `n_steps` steps of length `ds`. Leaving the spacetime's domain is an error;
/// sign loss, caustics and degenerate surfaces end the trace with a [`Termination`].
pub fn evolve(initial: FlowState, ds: f64, n_steps: usize) -> Result<FlowTrace> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(GeomError::Config(format!("flow step {ds} must be positive")));
    }
    let (h0, a0) = (initial.record.min_h_lbar, initial.record.area);
    if !(h0 > 0.0) {
        return Err(GeomError::Precondition("the flow needs <H,Lbar> > 0 initially".into()));
    }
    let mut states = vec![initial];
    let mut termination = None;
    for _ in 0..n_steps {
        let last = states.last().expect("non-empty");
        let step = last.record.step + 1;
        let next = match last.advance(ds) {
            Ok(next) => next,
            Err(e @ GeomError::Domain(_)) => return Err(e),
            Err(e) => {
                termination = Some(Termination::Degenerate {
                    step,
                    reason: e.to_string(),
                });
                break;
            }
        };
        let (h, a) = (next.record.min_h_lbar, next.record.area);
        states.push(next);
        if h < SIGN_LOSS_FRACTION * h0 {
            termination = Some(Termination::SignLoss { step, min_h_lbar: h });
            break;
        }
        if a < CAUSTIC_AREA_FRACTION * a0 {
            termination = Some(Termination::Caustic { step, area: a });
            break;
        }
    }
    Ok(FlowTrace { ds, states, termination })
}

/// Fourth-order central difference of `f` at index `k`.
fn d5(f: &[f64], k: usize, ds: f64) -> f64 {
    (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * ds)
}

impl FlowTrace {
    pub fn records(&self) -> Vec<FlowRecord> {
        self.states.iter().map(|s| s.record.clone()).collect()
    }

    /// Writes the trace as CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.records() {
            w.serialize(r).map_err(|e| GeomError::Config(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| GeomError::Config(format!("csv: {e}")))?;
        Ok(())
    }

    fn interior(&self) -> Result<std::ops::Range<usize>> {
        if self.states.len() < 5 {
            return Err(GeomError::Precondition(
                "rate checks need at least five flow states".into(),
            ));
        }
        Ok(2..self.states.len() - 2)
    }

    fn base_report(&self, id: &str, relation: Relation, residual: f64, scale: f64) -> IdentityReport {
        let f = &self.states[0].field;
        let mut rep = IdentityReport::explicit(id, relation, &f.mesh, f.gauge.name(), residual, scale);
        rep.diagnostics.push(Term::new("ds", self.ds));
        rep.diagnostics.push(Term::new("steps", (self.states.len() - 1) as f64));
        if let Some(t) = &self.termination {
            rep.warnings.push(format!("flow terminated early: {t:?}"));
        }
        rep
    }

    /// `F(s_{k+1}) ≤ F(s_k)` at every step, within `1e−7` of the size of `F`'s terms.
    pub fn monotonicity_report(&self) -> IdentityReport {
        let f: Vec<f64> = self.states.iter().map(|s| s.record.f_value).collect();
        let worst = f.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        let worst = if worst.is_finite() { worst } else { 0.0 };
        let r0 = &self.states[0].record;
        let scale = r0.ratio_integral.abs() + r0.q_integral.abs();
        let mut rep = self.base_report("flow-monotonicity", Relation::Inequality, worst, scale);
        rep.lhs = vec![Term::new("min_k F(s_k) - F(s_k+1)", worst)];
        rep.diagnostics.push(Term::new("F initial", f[0]));
        rep.diagnostics.push(Term::new("F final", *f.last().expect("non-empty")));
        rep.with_tolerance(1e-7)
    }

    /// `d/ds ∫Q(L,L̄) = −2∫⟨ξ,L̄⟩`, derivative by 4th-order differences.
    pub fn q_rate_report(&self) -> Result<IdentityReport> {
        let q: Vec<f64> = self.states.iter().map(|s| s.record.q_integral).collect();
        let mut residual = 0.0_f64;
        let mut scale = 0.0_f64;
        for k in self.interior()? {
            let rhs = -2.0 * self.states[k].record.xi_integral;
            let diff = d5(&q, k, self.ds) - rhs;
            if diff.abs() > residual.abs() {
                residual = diff;
            }
            scale = scale.max(rhs.abs());
        }
        let mut rep = self.base_report("flow-q-rate", Relation::Identity, residual, scale);
        rep.lhs = vec![Term::new("max |d/ds int Q + 2 int <xi,Lbar>|", residual)];
        Ok(rep)
    }

    /// `d/ds ∫⟨ξ,L̄⟩/⟨H,L̄⟩ ≤ −n/(n−1)∫⟨ξ,L̄⟩`; the value is the smallest margin.
    pub fn ratio_rate_report(&self) -> Result<IdentityReport> {
        let n = self.states[0].field.mesh.ambient.family.n() as f64;
        let ratio: Vec<f64> = self.states.iter().map(|s| s.record.ratio_integral).collect();
        let mut margin = f64::INFINITY;
        let mut scale = 0.0_f64;
        for k in self.interior()? {
            let bound = -n / (n - 1.0) * self.states[k].record.xi_integral;
            let rate = d5(&ratio, k, self.ds);
            margin = margin.min(bound - rate);
            scale = scale.max(bound.abs() + rate.abs());
        }
        let mut rep = self.base_report("flow-ratio-rate", Relation::Inequality, margin, scale);
        rep.lhs = vec![Term::new("min (bound - d/ds int <xi,Lbar>/<H,Lbar>)", margin)];
        Ok(rep)
    }

    /// `max_nodes |∂_s⟨H,L̄⟩ − |χ̄|² − Ric(L̄,L̄)|` at state `k`.
    pub fn raychaudhuri_residual(&self, k: usize) -> Result<f64> {
        let range = self.interior()?;
        if !range.contains(&k) {
            return Err(GeomError::Precondition(format!(
                "state {k} has no centred 5-point stencil in a trace of {}",
                self.states.len()
            )));
        }
        let nodes = self.states[k].h_lbar.len();
        Ok((0..nodes)
            .map(|i| {
                let h: Vec<f64> = (k - 2..=k + 2).map(|j| self.states[j].h_lbar[i]).collect();
                let rate = d5(&h, 2, self.ds);
                (rate - self.states[k].raychaudhuri_rhs[i]).abs()
            })
            .fold(0.0, f64::max))
    }

    /// Raychaudhuri residual over all interior states, relative to `max |χ̄|²`.
    pub fn raychaudhuri_report(&self) -> Result<IdentityReport> {
        let mut residual = 0.0_f64;
        let mut scale = 0.0_f64;
        for k in self.interior()? {
            residual = residual.max(self.raychaudhuri_residual(k)?);
            scale = scale.max(self.states[k].raychaudhuri_rhs.iter().map(|v| v.abs()).fold(0.0, f64::max));
        }
        let mut rep = self.base_report("raychaudhuri", Relation::Identity, residual, scale);
        rep.lhs = vec![Term::new("max |d/ds <H,Lbar> - |chibar|^2 - Ric(Lbar,Lbar)|", residual)];
        Ok(rep)
    }

    /// Largest null defect before projection over the trace.
    pub fn max_null_defect(&self) -> f64 {
        self.states.iter().map(|s| s.record.null_defect).fold(0.0, f64::max)
    }
}
