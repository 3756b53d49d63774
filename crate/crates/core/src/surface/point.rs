//! Pointwise extrinsic geometry of an immersed sphere.
//!
//! All tensors on the surface are stored in the components of a local chart. At a
//! mesh node the chart is the gnomonic chart centred there, whose coordinate vectors
//! are the unit `∂_θ` and `∂_φ/sin θ` of the round sphere; it is regular at every node,
//! poles included.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use super::ambient::{dot, gamma_apply, Ambient, Gamma4};
use super::immersion::Immersion;
use crate::error::{GeomError, Result};
use crate::jet::Jet2;

/// Gnomonic chart `(p, q) ↦ (u₀ + p e₁ + q e₂)/|·|` centred at `u₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeChart {
    pub u0: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

impl NodeChart {
    /// Chart at `(θ, φ)` with `e₁ = ∂_θ`, `e₂ = ∂_φ/sin θ`; orientation matches `(θ, φ)`.
    pub fn at(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            u0: [st * cp, st * sp, ct],
            e1: [ct * cp, ct * sp, -st],
            e2: [-sp, cp, 0.0],
        }
    }

    pub fn unit_jets(&self, p: f64, q: f64) -> [Jet2; 3] {
        let pj = Jet2::variable(p, 0);
        let qj = Jet2::variable(q, 1);
        let v: [Jet2; 3] =
            std::array::from_fn(|i| pj * self.e1[i] + qj * self.e2[i] + self.u0[i]);
        let inv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().recip();
        [v[0] * inv, v[1] * inv, v[2] * inv]
    }
}

/// Geometry determined by the immersion and the ambient metric alone.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub x: Vector4<f64>,
    /// `∂_a X`.
    pub tangents: [Vector4<f64>; 2],
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub gamma: Gamma4,
    pub sigma: Matrix2<f64>,
    pub sigma_inv: Matrix2<f64>,
    /// `D_a ∂_b`.
    pub d_tangent: [[Vector4<f64>; 2]; 2],
    /// Normal part of `D_a ∂_b`.
    pub ii: [[Vector4<f64>; 2]; 2],
    /// `H = σ^{ab} II_ab`.
    pub h: Vector4<f64>,
    /// Induced Christoffels `Γ^c_{ab}`, indexed `[c][(a, b)]`.
    pub gamma_sigma: [Matrix2<f64>; 2],
}

impl PointGeometry {
    pub fn compute(amb: &Ambient, imm: &dyn Immersion, u: &[Jet2; 3]) -> Result<Self> {
        let pos = imm.position(u);
        let x = Vector4::from_fn(|m, _| pos[m].v);
        amb.check(&x)?;
        let tangents = [
            Vector4::from_fn(|m, _| pos[m].g[0]),
            Vector4::from_fn(|m, _| pos[m].g[1]),
        ];
        let g = amb.metric(&x);
        let g_inv = amb.inverse_metric(&x);
        let gamma = amb.christoffel(&x);
        let sigma = Matrix2::from_fn(|a, b| dot(&g, &tangents[a], &tangents[b]));
        let det = sigma.determinant();
        if !(sigma[(0, 0)] > 0.0 && det > 0.0) {
            return Err(GeomError::NotSpacelike {
                theta_index: 0,
                phi_index: 0,
            });
        }
        let sigma_inv = Matrix2::new(sigma[(1, 1)], -sigma[(0, 1)], -sigma[(1, 0)], sigma[(0, 0)]) / det;
        let mut d_tangent = [[Vector4::zeros(); 2]; 2];
        for a in 0..2 {
            for b in a..2 {
                let second = Vector4::from_fn(|m, _| pos[m].hess(a, b));
                d_tangent[a][b] = second + gamma_apply(&gamma, &tangents[a], &tangents[b]);
                d_tangent[b][a] = d_tangent[a][b];
            }
        }
        let mut gamma_sigma = [Matrix2::zeros(); 2];
        let mut ii = [[Vector4::zeros(); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let v = d_tangent[a][b];
                let low = Vector2::new(dot(&g, &v, &tangents[0]), dot(&g, &v, &tangents[1]));
                let up = sigma_inv * low;
                for c in 0..2 {
                    gamma_sigma[c][(a, b)] = up[c];
                }
                ii[a][b] = v - tangents[0] * up[0] - tangents[1] * up[1];
            }
        }
        let mut h = Vector4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                h += ii[a][b] * sigma_inv[(a, b)];
            }
        }
        Ok(Self {
            x,
            tangents,
            g,
            g_inv,
            gamma,
            sigma,
            sigma_inv,
            d_tangent,
            ii,
            h,
            gamma_sigma,
        })
    }

    pub fn sqrt_det_sigma(&self) -> f64 {
        self.sigma.determinant().sqrt()
    }

    pub fn dot(&self, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
        dot(&self.g, u, v)
    }

    /// Tangential projection coefficients `σ^{ab}⟨V, ∂_b⟩`.
    pub fn tangential(&self, v: &Vector4<f64>) -> Vector2<f64> {
        self.sigma_inv
            * Vector2::new(self.dot(v, &self.tangents[0]), self.dot(v, &self.tangents[1]))
    }

    pub fn normal_part(&self, v: &Vector4<f64>) -> Vector4<f64> {
        let c = self.tangential(v);
        v - self.tangents[0] * c[0] - self.tangents[1] * c[1]
    }

    /// Unit normal pair `(e₃, e₄)` of the slice gauge: `e₄ ∝ (∂_t)^⊥`, `e₃` spacelike
    /// and outward for the orientation of the chart. Returns the frame and `|(∂_t)^⊥|`.
    pub fn slice_normals(&self) -> Result<(Vector4<f64>, Vector4<f64>, f64)> {
        let n = self.normal_part(&Vector4::new(1.0, 0.0, 0.0, 0.0));
        let nn = -self.dot(&n, &n);
        if !(nn > 0.0) {
            return Err(GeomError::Gauge {
                theta_index: 0,
                phi_index: 0,
                reason: "normal projection of ∂_t is not timelike".into(),
            });
        }
        let norm = nn.sqrt();
        let e4 = n / norm;
        // e3_μ = ε(e4, ∂_μ, T1, T2), ε_{0123} = √|det g|.
        let vol = self.g.determinant().abs().sqrt();
        let low = Vector4::from_fn(|mu, _| {
            let mut basis = Vector4::zeros();
            basis[mu] = 1.0;
            let m = Matrix4::from_columns(&[e4, basis, self.tangents[0], self.tangents[1]]);
            vol * m.determinant()
        });
        let up = self.g_inv * low;
        let len = self.dot(&up, &up);
        if !(len > 0.0) {
            return Err(GeomError::Gauge {
                theta_index: 0,
                phi_index: 0,
                reason: "degenerate normal plane".into(),
            });
        }
        Ok((up / len.sqrt(), e4, norm))
    }
}

/// Null frame `L = a(e₄ + e₃)`, `L̄ = (e₄ − e₃)/a` with its second fundamental forms.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrame {
    pub e3: Vector4<f64>,
    pub e4: Vector4<f64>,
    pub l: Vector4<f64>,
    pub lbar: Vector4<f64>,
    /// `log a` relative to the slice gauge.
    pub log_a: f64,
    /// `χ_ab = ⟨D_a L, ∂_b⟩`.
    pub chi: Matrix2<f64>,
    /// `χ̄_ab = ⟨D_a L̄, ∂_b⟩`.
    pub chibar: Matrix2<f64>,
    /// `ζ_a = ½⟨D_a L, L̄⟩`.
    pub zeta: Vector2<f64>,
}

impl PointFrame {
    /// Builds the frame from the slice normals rescaled by `a = exp(log_a)`;
    /// `dlog_a` holds `∂_a log a` in the same chart.
    pub fn compute(pg: &PointGeometry, log_a: f64, dlog_a: Vector2<f64>) -> Result<Self> {
        let (e3, e4, norm) = pg.slice_normals()?;
        let a = log_a.exp();
        let l = (e4 + e3) * a;
        let lbar = (e4 - e3) / a;
        let chi = Matrix2::from_fn(|i, j| -pg.dot(&l, &pg.ii[i][j]));
        let chibar = Matrix2::from_fn(|i, j| -pg.dot(&lbar, &pg.ii[i][j]));
        // ζ_a = −⟨D_a e₄, e₃⟩ − ∂_a log a, with e₄ = N/|N| and N = ∂_t − σ^{bc}⟨∂_t, ∂_b⟩∂_c.
        let dt = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let c = pg.tangential(&dt);
        let zeta = Vector2::from_fn(|i, _| {
            let d_a_t = gamma_apply(&pg.gamma, &pg.tangents[i], &dt);
            let mut v = pg.dot(&d_a_t, &e3);
            for b in 0..2 {
                v -= c[b] * pg.dot(&pg.ii[i][b], &e3);
            }
            -v / norm - dlog_a[i]
        });
        Ok(Self {
            e3,
            e4,
            l,
            lbar,
            log_a,
            chi,
            chibar,
            zeta,
        })
    }

    /// Hyperbolic angle `β` of the mean-curvature gauge, `e₃^H = −H/|H| = cosh β e₃ + sinh β e₄`.
    pub fn mean_curvature_angle(pg: &PointGeometry, e3: &Vector4<f64>, e4: &Vector4<f64>) -> Result<(f64, f64)> {
        let hh = pg.dot(&pg.h, &pg.h);
        if !(hh > 0.0) {
            return Err(GeomError::Gauge {
                theta_index: 0,
                phi_index: 0,
                reason: format!("mean curvature vector not spacelike (⟨H,H⟩ = {hh:.3e})"),
            });
        }
        let hn = hh.sqrt();
        if !(-pg.dot(&pg.h, e3) > 0.0) {
            return Err(GeomError::Gauge {
                theta_index: 0,
                phi_index: 0,
                reason: "−H points inward".into(),
            });
        }
        Ok(((pg.dot(&pg.h, e4) / hn).asinh(), hn))
    }
}
