//! Gauge choices for the null pair and the mean-curvature gauge report.

use nalgebra::Vector2;
use rayon::prelude::*;

use super::{norm_sigma, stencil_gradient, PointFrame, Scaling, SurfaceMesh};
use crate::error::{GeomError, Result};
use crate::harmonics::{count, index, max_degree, ylm_all, SphereField};

/// Normalization of the null pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    /// `e₄` along the normal projection of `∂_t`.
    Slice,
    /// `e₃ = −H/|H|`, `e₄ = J/|H|`.
    MeanCurvature,
    /// Rescaling `a = exp(u)` with `du` the closest exact form to `ζ`, fitted up to
    /// degree `lmax`. Torsion-free whenever `ζ` is exact and resolved.
    Cone { lmax: usize },
    /// Slice gauge rescaled by `a = exp(log_a)`.
    Rescaled(SphereField),
}

impl Gauge {
    pub fn name(&self) -> &'static str {
        match self {
            Gauge::Slice => "slice",
            Gauge::MeanCurvature => "mean-curvature",
            Gauge::Cone { .. } => "cone",
            Gauge::Rescaled(_) => "rescaled",
        }
    }
}

/// Turns a gauge into a scaling of the slice frame. For the cone gauge also returns
/// the torsion the fit leaves behind.
pub(crate) fn resolve(mesh: &SurfaceMesh, gauge: &Gauge) -> Result<(Scaling, Option<f64>)> {
    match gauge {
        Gauge::Slice => Ok((Scaling::None, None)),
        Gauge::MeanCurvature => Ok((Scaling::MeanCurvature, None)),
        Gauge::Rescaled(f) => Ok((Scaling::Field(f.clone()), None)),
        Gauge::Cone { lmax } => {
            let u = fit_exact_part(mesh, *lmax)?;
            let scaling = Scaling::Field(u);
            let resid = (0..mesh.len())
                .into_par_iter()
                .map(|i| {
                    let (la, dla) = log_scale(mesh, &scaling, i)?;
                    let f = PointFrame::compute(&mesh.nodes[i], la, dla)?;
                    Ok(norm_sigma(&mesh.nodes[i], &f.zeta))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((scaling, Some(resid)))
        }
    }
}

/// Least-squares `u` with `du ≈ ζ` in the round metric of the parameter sphere:
/// `u_lm = ∫⟨∇Y_lm, ζ⟩ / (l(l+1))`.
fn fit_exact_part(mesh: &SurfaceMesh, lmax: usize) -> Result<SphereField> {
    let lmax = lmax.min(max_degree(&mesh.grid));
    if lmax == 0 {
        return Err(GeomError::Config("cone gauge needs lmax ≥ 1".into()));
    }
    let per_node: Vec<Vec<f64>> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let f = PointFrame::compute(&mesh.nodes[i], 0.0, Vector2::zeros())?;
            let y = ylm_all(&mesh.charts[i].unit_jets(0.0, 0.0), lmax);
            let w = mesh.grid.round_weight(i);
            Ok(y.iter()
                .map(|yj| w * (yj.g[0] * f.zeta[0] + yj.g[1] * f.zeta[1]))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut field = SphereField::zero(lmax);
    for l in 1..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let k = index(l, m);
            let terms: Vec<f64> = per_node.iter().map(|v| v[k]).collect();
            field.coeffs[k] = crate::quadrature::pairwise_sum(&terms) / (l * (l + 1)) as f64;
        }
    }
    debug_assert_eq!(field.coeffs.len(), count(lmax));
    Ok(field)
}

/// `(log a, ∂_a log a)` at node `i` in its node chart.
pub(crate) fn log_scale(mesh: &SurfaceMesh, scaling: &Scaling, i: usize) -> Result<(f64, Vector2<f64>)> {
    match scaling {
        Scaling::None => Ok((0.0, Vector2::zeros())),
        Scaling::Field(f) => {
            let v = f.eval(&mesh.charts[i].unit_jets(0.0, 0.0));
            Ok((v.v, Vector2::new(v.g[0], v.g[1])))
        }
        Scaling::MeanCurvature => {
            let beta = |pg: &super::PointGeometry| -> Result<Vec<f64>> {
                let (e3, e4, _) = pg.slice_normals()?;
                let (b, hn) = PointFrame::mean_curvature_angle(pg, &e3, &e4)?;
                Ok(vec![b, hn.ln()])
            };
            let centre = beta(&mesh.nodes[i])?;
            let samples = mesh
                .stencil_geometry(i)?
                .iter()
                .map(beta)
                .collect::<Result<Vec<_>>>()?;
            let d = stencil_gradient(&samples, mesh.stencil_step);
            Ok((centre[0], Vector2::new(d[0][0], d[1][0])))
        }
    }
}

/// Connection form of the mean-curvature gauge against `d log|H|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvatureGaugeReport {
    /// Per node: `|H|`, `α_H` and `d log|H|` in node-chart components.
    pub h_norm: Vec<f64>,
    pub alpha: Vec<Vector2<f64>>,
    pub dlog_h: Vec<Vector2<f64>>,
    /// `max |α_H + d log|H||_σ`, the residual of case (1).
    pub residual_minus: f64,
    /// `max |α_H − d log|H||_σ`, the residual of case (2).
    pub residual_plus: f64,
    /// `max |α_H|_σ + max |d log|H||_σ`.
    pub scale: f64,
    /// `max |α_H|_σ`; zero for a parallel mean curvature vector together with constant `|H|`.
    pub alpha_max: f64,
    /// Relative spread `(max|H| − min|H|)/max|H|`.
    pub h_spread: f64,
}

/// Computes `α_H(V) = ⟨D_V e₃^H, e₄^H⟩` and `d log|H|` at every node.
pub fn mean_curvature_gauge_report(mesh: &SurfaceMesh) -> Result<MeanCurvatureGaugeReport> {
    let per: Vec<(f64, Vector2<f64>, Vector2<f64>)> = (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let (j, k) = mesh.grid.unflatten(i);
            let tag = |e: GeomError| super::relabel(e, j, k);
            let pg = &mesh.nodes[i];
            let sample = |pg: &super::PointGeometry| -> Result<Vec<f64>> {
                let (e3, e4, _) = pg.slice_normals()?;
                let (b, hn) = PointFrame::mean_curvature_angle(pg, &e3, &e4)?;
                Ok(vec![b, hn.ln()])
            };
            let centre = sample(pg).map_err(tag)?;
            let samples = mesh
                .stencil_geometry(i)?
                .iter()
                .map(sample)
                .collect::<Result<Vec<_>>>()
                .map_err(tag)?;
            let d = stencil_gradient(&samples, mesh.stencil_step);
            let dbeta = Vector2::new(d[0][0], d[1][0]);
            let dlog = Vector2::new(d[0][1], d[1][1]);
            let slice = PointFrame::compute(pg, 0.0, Vector2::zeros()).map_err(tag)?;
            Ok((centre[1].exp(), slice.zeta - dbeta, dlog))
        })
        .collect::<Result<_>>()?;
    let mut rep = MeanCurvatureGaugeReport {
        h_norm: per.iter().map(|p| p.0).collect(),
        alpha: per.iter().map(|p| p.1).collect(),
        dlog_h: per.iter().map(|p| p.2).collect(),
        residual_minus: 0.0,
        residual_plus: 0.0,
        scale: 0.0,
        alpha_max: 0.0,
        h_spread: 0.0,
    };
    let mut dmax = 0.0_f64;
    for (i, pg) in mesh.nodes.iter().enumerate() {
        let (a, d) = (rep.alpha[i], rep.dlog_h[i]);
        rep.residual_minus = rep.residual_minus.max(norm_sigma(pg, &(a + d)));
        rep.residual_plus = rep.residual_plus.max(norm_sigma(pg, &(a - d)));
        rep.alpha_max = rep.alpha_max.max(norm_sigma(pg, &a));
        dmax = dmax.max(norm_sigma(pg, &d));
    }
    rep.scale = rep.alpha_max + dmax;
    let hmax = rep.h_norm.iter().copied().fold(f64::MIN, f64::max);
    let hmin = rep.h_norm.iter().copied().fold(f64::MAX, f64::min);
    rep.h_spread = (hmax - hmin) / hmax;
    Ok(rep)
}
