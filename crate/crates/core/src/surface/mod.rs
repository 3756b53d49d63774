//! Spacelike 2-spheres in a four-dimensional static spacetime: meshes, null frames,
//! gauges and derived fields.
//!
//! Conventions:
//!
//! * `L = a(e₄ + e₃)`, `L̄ = (e₄ − e₃)/a` with `e₄` future timelike, `e₃` outward, so
//!   `⟨L, L̄⟩ = −2`.
//! * `χ_ab = ⟨D_a L, ∂_b⟩ = −⟨L, II_ab⟩`, `ζ_a = ½⟨D_a L, L̄⟩`.
//! * Under `L → aL`, `L̄ → L̄/a`: `χ → aχ`, `χ̄ → χ̄/a`, `ζ → ζ − d log a`.
//! * `H = σ^{ab}II_ab = −½⟨H,L̄⟩L − ½⟨H,L⟩L̄`.

mod ambient;
mod derived;
mod gauge;
mod immersion;
mod point;

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2, Vector2, Vector4};
use rayon::prelude::*;

pub use ambient::{dot, gamma_apply, riem4, Ambient, Gamma4};
pub use derived::{derived_fields, DerivedNode, DerivedOptions};
pub use gauge::{mean_curvature_gauge_report, Gauge, MeanCurvatureGaugeReport};
pub use immersion::{
    read_tabulated, write_tabulated, BoostedSphere, ConeSection, Ellipsoid, Immersion, Spectral,
    StarShaped, TabulatedRow,
};
pub use point::{NodeChart, PointFrame, PointGeometry};

use crate::error::{GeomError, Result};
use crate::harmonics::SphereField;
use crate::quadrature::{QuadratureRule, SphereGrid};
use crate::symfunc::SymmetricBilinear;

/// Default step of the derived-field stencils. Samples are analytic, so the step is
/// set by balancing `O(h⁴)` truncation against `O(ε/h)` rounding, not by the grid.
pub const DEFAULT_STENCIL_STEP: f64 = 5e-4;

/// Offsets of the 4th-order first-derivative stencil, in units of the step.
pub(crate) const STENCIL: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (2.0, 0.0),
    (-2.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (0.0, 2.0),
    (0.0, -2.0),
];

/// First derivatives at the centre from samples on [`STENCIL`].
pub(crate) fn stencil_gradient(samples: &[Vec<f64>], h: f64) -> [Vec<f64>; 2] {
    let d = |o: usize| -> Vec<f64> {
        (0..samples[o].len())
            .map(|k| {
                (8.0 * (samples[o][k] - samples[o + 1][k]) - (samples[o + 2][k] - samples[o + 3][k]))
                    / (12.0 * h)
            })
            .collect()
    };
    [d(0), d(4)]
}

fn relabel(e: GeomError, theta_index: usize, phi_index: usize) -> GeomError {
    match e {
        GeomError::NotSpacelike { .. } => GeomError::NotSpacelike {
            theta_index,
            phi_index,
        },
        GeomError::Gauge { reason, .. } => GeomError::Gauge {
            theta_index,
            phi_index,
            reason,
        },
        other => other,
    }
}

/// A surface sampled on a Gauss–Legendre × uniform grid of the parameter sphere.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub ambient: Ambient,
    pub immersion: Arc<dyn Immersion>,
    pub grid: SphereGrid,
    pub charts: Vec<NodeChart>,
    pub nodes: Vec<PointGeometry>,
    quadrature: QuadratureRule,
    /// Step of the derived-field stencils in the node charts.
    pub stencil_step: f64,
}

impl SurfaceMesh {
    pub fn build(
        ambient: Ambient,
        immersion: Arc<dyn Immersion>,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Self> {
        let grid = SphereGrid::new(n_theta, n_phi)?;
        let charts: Vec<NodeChart> = (0..grid.len())
            .map(|i| {
                let (j, k) = grid.unflatten(i);
                NodeChart::at(grid.theta[j], grid.phi[k])
            })
            .collect();
        let nodes: Vec<PointGeometry> = charts
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let (j, k) = grid.unflatten(i);
                PointGeometry::compute(&ambient, immersion.as_ref(), &c.unit_jets(0.0, 0.0))
                    .map_err(|e| relabel(e, j, k))
            })
            .collect::<Result<_>>()?;
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| grid.round_weight(i) * n.sqrt_det_sigma())
            .collect();
        let quadrature = QuadratureRule {
            n_theta,
            n_phi,
            weights,
            exact_degree: 2 * n_theta - 1,
        };
        Ok(Self {
            ambient,
            immersion,
            stencil_step: DEFAULT_STENCIL_STEP,
            grid,
            charts,
            nodes,
            quadrature,
        })
    }

    /// Replaces the derived-field stencil step.
    pub fn with_stencil_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 0.5) {
            return Err(GeomError::Config(format!("stencil step {h} outside (0, 0.5)")));
        }
        self.stencil_step = h;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        self.quadrature.integrate(field)
    }

    pub fn area(&self) -> f64 {
        self.quadrature.area()
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.grid.n_theta, self.grid.n_phi)
    }

    /// Geometry at chart point `(p, q)` of node `i`.
    pub fn geometry_at(&self, i: usize, p: f64, q: f64) -> Result<PointGeometry> {
        let (j, k) = self.grid.unflatten(i);
        PointGeometry::compute(&self.ambient, self.immersion.as_ref(), &self.charts[i].unit_jets(p, q))
            .map_err(|e| relabel(e, j, k))
    }

    /// Geometry at the stencil points of node `i`.
    pub(crate) fn stencil_geometry(&self, i: usize) -> Result<Vec<PointGeometry>> {
        let h = self.stencil_step;
        STENCIL
            .iter()
            .map(|(dp, dq)| self.geometry_at(i, dp * h, dq * h))
            .collect()
    }
}

/// Scalars read off a node frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFrame {
    pub frame: PointFrame,
    /// `⟨H, L⟩`, `⟨H, L̄⟩`.
    pub h_l: f64,
    pub h_lbar: f64,
    /// `Q(L, L̄)`.
    pub q_llbar: f64,
    /// `Q(∂₁, ∂₂)`.
    pub q12: f64,
    /// `Q(L, ∂_a)`, `Q(L̄, ∂_a)`.
    pub q_l: Vector2<f64>,
    pub q_lbar: Vector2<f64>,
    /// `⟨∂_t, L⟩`, `⟨∂_t, L̄⟩`.
    pub dt_l: f64,
    pub dt_lbar: f64,
}

impl NodeFrame {
    pub fn new(amb: &Ambient, pg: &PointGeometry, frame: PointFrame) -> Self {
        let q = amb.q(&pg.x);
        let qf = |u: &Vector4<f64>, v: &Vector4<f64>| (q * v).dot(u);
        let dt = Vector4::new(1.0, 0.0, 0.0, 0.0);
        Self {
            h_l: pg.dot(&pg.h, &frame.l),
            h_lbar: pg.dot(&pg.h, &frame.lbar),
            q_llbar: qf(&frame.l, &frame.lbar),
            q12: qf(&pg.tangents[0], &pg.tangents[1]),
            q_l: Vector2::new(qf(&frame.l, &pg.tangents[0]), qf(&frame.l, &pg.tangents[1])),
            q_lbar: Vector2::new(qf(&frame.lbar, &pg.tangents[0]), qf(&frame.lbar, &pg.tangents[1])),
            dt_l: pg.dot(&dt, &frame.l),
            dt_lbar: pg.dot(&dt, &frame.lbar),
            frame,
        }
    }
}

/// How the null pair is scaled relative to the slice gauge.
#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    None,
    /// `log a` given analytically on the parameter sphere.
    Field(SphereField),
    /// `log a = β` of the mean-curvature gauge; its gradient is taken on stencils.
    MeanCurvature,
}

/// Null frames at every node of a mesh.
#[derive(Debug, Clone)]
pub struct NullFrameField {
    pub mesh: Arc<SurfaceMesh>,
    pub gauge: Gauge,
    pub scaling: Scaling,
    pub nodes: Vec<NodeFrame>,
    /// `max |ζ|_σ` left over by the cone-gauge fit.
    pub cone_fit_residual: Option<f64>,
}

impl NullFrameField {
    pub fn build(mesh: Arc<SurfaceMesh>, gauge: Gauge) -> Result<Self> {
        let (scaling, cone_fit_residual) = gauge::resolve(&mesh, &gauge)?;
        let nodes = (0..mesh.len())
            .into_par_iter()
            .map(|i| {
                let (j, k) = mesh.grid.unflatten(i);
                let pg = &mesh.nodes[i];
                let (la, dla) = gauge::log_scale(&mesh, &scaling, i)?;
                let frame = PointFrame::compute(pg, la, dla).map_err(|e| relabel(e, j, k))?;
                Ok(NodeFrame::new(&mesh.ambient, pg, frame))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            mesh,
            gauge,
            scaling,
            nodes,
            cone_fit_residual,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of a per-node quantity.
    pub fn integrate(&self, f: impl Fn(usize, &PointGeometry, &NodeFrame) -> f64 + Sync) -> Result<f64> {
        let vals: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| f(i, &self.mesh.nodes[i], &self.nodes[i]))
            .collect();
        self.mesh.integrate(&vals)
    }

    /// `max_nodes |ζ|_σ`.
    pub fn max_torsion(&self) -> f64 {
        self.mesh
            .nodes
            .iter()
            .zip(&self.nodes)
            .map(|(pg, nf)| norm_sigma(pg, &nf.frame.zeta))
            .fold(0.0, f64::max)
    }

    /// Largest violations of the frame invariants: nullity and normalization,
    /// orthogonality to the tangents, and the `H` reconstruction.
    pub fn invariant_defects(&self) -> FrameDefects {
        let mut d = FrameDefects::default();
        for (pg, nf) in self.mesh.nodes.iter().zip(&self.nodes) {
            let (l, lb) = (&nf.frame.l, &nf.frame.lbar);
            let tscale = pg.sigma.norm().sqrt();
            d.null = d
                .null
                .max(pg.dot(l, l).abs())
                .max(pg.dot(lb, lb).abs())
                .max((pg.dot(l, lb) + 2.0).abs());
            for t in &pg.tangents {
                d.orthogonal = d
                    .orthogonal
                    .max(pg.dot(l, t).abs() / tscale)
                    .max(pg.dot(lb, t).abs() / tscale);
            }
            let rec = l * (-0.5 * nf.h_lbar) + lb * (-0.5 * nf.h_l) - pg.h;
            let comp = rec.amax() / pg.h.amax().max(f64::MIN_POSITIVE);
            d.reconstruction = d.reconstruction.max(comp);
            d.symmetry = d
                .symmetry
                .max((nf.frame.chi[(0, 1)] - nf.frame.chi[(1, 0)]).abs())
                .max((nf.frame.chibar[(0, 1)] - nf.frame.chibar[(1, 0)]).abs());
        }
        d
    }
}

/// See [`NullFrameField::invariant_defects`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameDefects {
    pub null: f64,
    pub orthogonal: f64,
    pub reconstruction: f64,
    pub symmetry: f64,
}

/// `|ω|_σ` of a one-form in chart components.
pub fn norm_sigma(pg: &PointGeometry, w: &Vector2<f64>) -> f64 {
    (w.transpose() * pg.sigma_inv * w)[(0, 0)].max(0.0).sqrt()
}

/// A 2×2 chart tensor as a [`SymmetricBilinear`].
pub fn bilinear(m: &Matrix2<f64>) -> SymmetricBilinear {
    SymmetricBilinear::new(DMatrix::from_fn(2, 2, |i, j| m[(i, j)]))
        .expect("2×2 forms are square")
}

pub(crate) fn matrix2(b: &SymmetricBilinear) -> Matrix2<f64> {
    Matrix2::from_fn(|i, j| b.get(i, j))
}
