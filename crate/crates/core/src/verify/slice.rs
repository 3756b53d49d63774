//! Hypersurface geometry of a surface inside a time slice, computed from the slice
//! metric `dr²/F + r² g_S²` alone (no spacetime frames). Backs the classical Minkowski
//! formulae, Brendle's inequality and the Brendle–Eichmair inequality.

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;

use super::minkowski::{integrate_fallible, p_node};
use super::{node_list, IdentityReport, Relation, Term};
use crate::error::{GeomError, Result};
use crate::surface::{Gauge, NullFrameField, SurfaceMesh};

/// Hypersurface data at one node, in node-chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceGeometry {
    pub sigma: Matrix2<f64>,
    /// Second fundamental form, positive on round spheres.
    pub h: Matrix2<f64>,
    /// `σ₁(h)`, `σ₂(h)` relative to `σ`.
    pub sigma1: f64,
    pub sigma2: f64,
    /// `√F`.
    pub lapse: f64,
    /// `⟨X, ν⟩` for `X = r√F ∂_r`.
    pub x_nu: f64,
    /// Quadrature weight of the node.
    pub weight: f64,
    /// `|h − ½σ₁σ|_σ`.
    pub umbilicity: f64,
}

impl SliceGeometry {
    /// Every node of a mesh that lies in a slice `t = const`.
    pub fn compute_all(mesh: &SurfaceMesh) -> Result<Vec<SliceGeometry>> {
        (0..mesh.len())
            .into_par_iter()
            .map(|i| Self::compute(mesh, i))
            .collect()
    }

    fn compute(mesh: &SurfaceMesh, i: usize) -> Result<Self> {
        let pos = mesh.immersion.position(&mesh.charts[i].unit_jets(0.0, 0.0));
        let dt = pos[0].g[0].abs() + pos[0].g[1].abs();
        if dt > 1e-12 * (1.0 + pos[0].v.abs()) {
            return Err(GeomError::Precondition("surface does not lie in a time slice".into()));
        }
        let x = Vector3::new(pos[1].v, pos[2].v, pos[3].v);
        let tan = [0, 1].map(|a| Vector3::new(pos[1].g[a], pos[2].g[a], pos[3].g[a]));
        let second =
            |a: usize, b: usize| Vector3::new(pos[1].hess(a, b), pos[2].hess(a, b), pos[3].hess(a, b));

        let r = x.norm();
        mesh.ambient.family.check_radius(r)?;
        let w = mesh.ambient.family.warp(r);
        let (f2, df2) = (w.f2, w.df2);
        // g_ij = δ_ij + φ x_i x_j with φ = (1/F − 1)/r².
        let phi = (1.0 / f2 - 1.0) / (r * r);
        let dphi = -df2 / (f2 * f2 * r * r) - 2.0 * (1.0 / f2 - 1.0) / (r * r * r);
        let g = Matrix3::identity() + x * x.transpose() * phi;
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| GeomError::InvalidMetric("degenerate slice metric".into()))?;
        // ∂_k g_ij.
        let dg = |k: usize, i: usize, j: usize| {
            let mut v = dphi * x[k] / r * x[i] * x[j];
            if k == i {
                v += phi * x[j];
            }
            if k == j {
                v += phi * x[i];
            }
            v
        };
        // Γ_{k,ij} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij), contracted with u, v.
        let gamma_low = |u: &Vector3<f64>, v: &Vector3<f64>| {
            Vector3::from_fn(|k, _| {
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += 0.5 * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j)) * u[i] * v[j];
                    }
                }
                acc
            })
        };

        let sigma = Matrix2::from_fn(|a, b| tan[a].dot(&(g * tan[b])));
        let det = sigma.determinant();
        if !(det > 0.0) {
            return Err(GeomError::NotSpacelike {
                theta_index: mesh.grid.unflatten(i).0,
                phi_index: mesh.grid.unflatten(i).1,
            });
        }
        let sigma_inv = sigma.try_inverse().expect("positive determinant");
        let n_low = tan[0].cross(&tan[1]);
        let nu_raw = g_inv * n_low;
        let nu = nu_raw / n_low.dot(&nu_raw).sqrt();
        let nu_low = g * nu;
        // h_ab = −g(∇_a ∂_b, ν).
        let h = Matrix2::from_fn(|a, b| -(second(a, b).dot(&nu_low) + gamma_low(&tan[a], &tan[b]).dot(&nu)));
        let sh = sigma_inv * h;
        let sigma1 = sh.trace();
        let sigma2 = h.determinant() / det;
        let lapse = f2.sqrt();
        let umb = h - sigma * (0.5 * sigma1);
        let umbilicity = (sigma_inv * umb * sigma_inv * umb).trace().max(0.0).sqrt();
        Ok(Self {
            sigma,
            h,
            sigma1,
            sigma2,
            lapse,
            x_nu: lapse * x.dot(&nu_low),
            weight: mesh.grid.round_weight(i) * det.sqrt(),
            umbilicity,
        })
    }

    fn sigma_k(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            1 => self.sigma1,
            2 => self.sigma2,
            _ => 0.0,
        }
    }
}

fn integrate(nodes: &[SliceGeometry], f: impl Fn(&SliceGeometry) -> f64) -> f64 {
    let terms: Vec<f64> = nodes.iter().map(|s| s.weight * f(s)).collect();
    crate::quadrature::pairwise_sum(&terms)
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=2).contains(&k) {
        return Err(GeomError::Precondition(format!("k must be 1 or 2 for surfaces, got {k}")));
    }
    Ok(())
}

/// `(n−k)∫√F σ_{k−1} dμ` and `k∫σ_k⟨X,ν⟩ dμ`, `n = 3`.
fn classical_terms(nodes: &[SliceGeometry], k: usize) -> (f64, f64) {
    let n = 3.0;
    let lhs = (n - k as f64) * integrate(nodes, |s| s.lapse * s.sigma_k(k - 1));
    let rhs = k as f64 * integrate(nodes, |s| s.sigma_k(k) * s.x_nu);
    (lhs, rhs)
}

/// Classical Minkowski formula `(n−k)∫√F σ_{k−1} = k∫σ_k⟨X,ν⟩` in a slice of a
/// constant-curvature spacetime.
pub fn classical_minkowski(mesh: &SurfaceMesh, k: usize) -> Result<IdentityReport> {
    check_k(k)?;
    if !mesh.ambient.family.is_constant_curvature() {
        return Err(GeomError::Precondition(
            "the classical Minkowski formulae need a space form slice".into(),
        ));
    }
    let nodes = SliceGeometry::compute_all(mesh)?;
    let (lhs, rhs) = classical_terms(&nodes, k);
    Ok(IdentityReport::from_terms(
        format!("classical-minkowski(k={k})"),
        Relation::Identity,
        mesh,
        "none",
        vec![Term::new("(n-k) int f sigma_{k-1}", lhs)],
        vec![Term::new("k int sigma_k <X,nu>", rhs)],
    ))
}

/// Compares the terms of the spacetime formula for `P_{k,0}` (slice gauge) with
/// the independently computed slice terms: `2∫P_{k−1,0}⟨L,∂_t⟩ = −2∫√Fσ_{k−1}` and
/// `c∫P_{k,0}Q(L,L̄) = 2c∫σ_k⟨X,ν⟩`. The residual is the larger termwise difference.
pub fn classical_recovery(field: &NullFrameField, k: usize) -> Result<IdentityReport> {
    check_k(k)?;
    if field.gauge != Gauge::Slice {
        return Err(GeomError::Precondition("classical recovery compares in the slice gauge".into()));
    }
    let mesh = &field.mesh;
    let nodes = SliceGeometry::compute_all(mesh)?;
    let n = 3.0;
    let c = k as f64 / (n - k as f64);
    let st_time = 2.0 * integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (k - 1, 0))? * nf.dt_l))?;
    let st_q = c * integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (k, 0))? * nf.q_llbar))?;
    let (cl_lhs, cl_rhs) = classical_terms(&nodes, k);
    let sl_time = -2.0 / (n - k as f64) * cl_lhs;
    let sl_q = 2.0 / (n - k as f64) * cl_rhs;
    let residual = (st_time - sl_time).abs().max((st_q - sl_q).abs());
    let scale = st_time.abs() + st_q.abs() + sl_time.abs() + sl_q.abs();
    let mut rep = IdentityReport::explicit(
        format!("classical-recovery(k={k})"),
        Relation::Identity,
        mesh,
        field.gauge.name(),
        residual,
        scale,
    );
    rep.lhs = vec![
        Term::new("2 int P_{k-1,0} <L,dt>", st_time),
        Term::new("c int P_{k,0} Q(L,Lbar)", st_q),
    ];
    rep.rhs = vec![
        Term::new("-2 int f sigma_{k-1}", sl_time),
        Term::new("2c int sigma_k <X,nu>", sl_q),
    ];
    rep.diagnostics.push(Term::new("classical residual", cl_lhs - cl_rhs));
    Ok(rep)
}

/// Brendle's inequality `(n−1)∫f/H ≥ ∫⟨X,ν⟩` for a mean-convex surface in a slice.
/// The equality flag is the umbilicity detector.
pub fn brendle_slice_hk(mesh: &SurfaceMesh) -> Result<IdentityReport> {
    let nodes = SliceGeometry::compute_all(mesh)?;
    let bad: Vec<usize> = (0..nodes.len()).filter(|&i| !(nodes[i].sigma1 > 0.0)).collect();
    if !bad.is_empty() {
        return Err(GeomError::Precondition(format!(
            "mean curvature not positive at nodes {}",
            node_list(mesh, &bad)
        )));
    }
    let n = 3.0;
    let lhs = (n - 1.0) * integrate(&nodes, |s| s.lapse / s.sigma1);
    let rhs = integrate(&nodes, |s| s.x_nu);
    let rep = IdentityReport::from_terms(
        "brendle-hk",
        Relation::Inequality,
        mesh,
        "none",
        vec![Term::new("(n-1) int f/H", lhs)],
        vec![Term::new("int <X,nu>", rhs)],
    );
    let hmax = nodes.iter().map(|s| s.sigma1.abs()).fold(0.0, f64::max);
    // max |h − ½σ₁σ|_σ / max |H|.
    let umb = nodes.iter().map(|s| s.umbilicity).fold(0.0, f64::max) / hmax;
    Ok(rep.with_equality_measure(umb))
}

/// Brendle–Eichmair inequality `k∫σ_k⟨X,ν⟩ − (n−k)∫fσ_{k−1} ≥ 0` for star-shaped
/// convex surfaces in a slice; not applicable when either property fails.
pub fn brendle_eichmair(mesh: &SurfaceMesh, k: usize) -> Result<IdentityReport> {
    check_k(k)?;
    let nodes = SliceGeometry::compute_all(mesh)?;
    let (lhs, rhs) = classical_terms(&nodes, k);
    let rep = IdentityReport::from_terms(
        format!("brendle-eichmair(k={k})"),
        Relation::Inequality,
        mesh,
        "none",
        vec![Term::new("k int sigma_k <X,nu>", rhs)],
        vec![Term::new("(n-k) int f sigma_{k-1}", lhs)],
    );
    let not_star = nodes.iter().filter(|s| s.x_nu < 0.0).count();
    let not_convex = nodes
        .iter()
        .filter(|s| !(s.sigma1 > 0.0 && s.sigma2 > 0.0))
        .count();
    if not_star > 0 {
        return Ok(rep.not_applicable(format!("not star-shaped at {not_star} nodes")));
    }
    if not_convex > 0 {
        return Ok(rep.not_applicable(format!("not convex at {not_convex} nodes")));
    }
    Ok(rep)
}
