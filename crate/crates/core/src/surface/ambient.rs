//! Fixed-size evaluation of the static family in the Cartesian-like chart
//! `(t, x, y, z)`, the chart all surfaces live in.

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::error::{GeomError, Result};
use crate::spacetime::{
    constant_curvature_riemann, schwarzschild_riemann_from_q, Family, MetricProvider,
    StaticCartesian, StaticFamily, Tensor4,
};

/// `Γ^λ_{μν}` as four symmetric matrices indexed by `λ`.
pub type Gamma4 = [Matrix4<f64>; 4];

/// A four-dimensional member of the static family with `Q = r dr∧dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ambient {
    pub family: StaticFamily,
}

impl Ambient {
    pub fn new(family: StaticFamily) -> Result<Self> {
        if family.n() != 3 {
            return Err(GeomError::Config(format!(
                "surfaces need a 4-dimensional spacetime, got n = {}",
                family.n()
            )));
        }
        Ok(Self { family })
    }

    pub fn from_family(family: Family) -> Result<Self> {
        Self::new(StaticFamily::new(3, family)?)
    }

    pub fn minkowski() -> Self {
        Self {
            family: StaticFamily::minkowski(3),
        }
    }

    pub fn schwarzschild(m: f64) -> Result<Self> {
        Self::new(StaticFamily::schwarzschild(3, m)?)
    }

    pub fn constant_curvature(kappa: f64) -> Result<Self> {
        Self::new(StaticFamily::constant_curvature(3, kappa)?)
    }

    pub fn mass(&self) -> f64 {
        self.family.mass()
    }

    pub fn radius(x: &Vector4<f64>) -> f64 {
        (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt()
    }

    pub fn check(&self, x: &Vector4<f64>) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain("non-finite position".into()));
        }
        self.family.check_radius(Self::radius(x))
    }

    fn psi(&self, r: f64) -> (f64, f64) {
        let w = self.family.warp(r);
        (w.g / w.f2, w.g)
    }

    /// `√F` at the point.
    pub fn lapse(&self, x: &Vector4<f64>) -> f64 {
        self.family.warp(Self::radius(x)).f2.sqrt()
    }

    pub fn metric(&self, x: &Vector4<f64>) -> Matrix4<f64> {
        let r = Self::radius(x);
        let w = self.family.warp(r);
        let psi = if r > 0.0 { w.g / w.f2 } else { -self.family.kappa() };
        let mut g = Matrix4::zeros();
        g[(0, 0)] = -w.f2;
        for i in 1..4 {
            for j in 1..4 {
                g[(i, j)] = psi * x[i] * x[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        g
    }

    pub fn inverse_metric(&self, x: &Vector4<f64>) -> Matrix4<f64> {
        let r = Self::radius(x);
        let (_, gc) = if r > 0.0 { self.psi(r) } else { (0.0, -self.family.kappa()) };
        let w = self.family.warp(r);
        let mut gi = Matrix4::zeros();
        gi[(0, 0)] = -1.0 / w.f2;
        for i in 1..4 {
            for j in 1..4 {
                gi[(i, j)] = -gc * x[i] * x[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        gi
    }

    /// Christoffel symbols from the analytic metric derivatives.
    pub fn christoffel(&self, x: &Vector4<f64>) -> Gamma4 {
        let r = Self::radius(x);
        let w = self.family.warp(r);
        let fr = self.family.df2_over_r(r);
        let (psi, dpsi_r) = if r > 0.0 {
            let gr = w.dg / r;
            (w.g / w.f2, (gr * w.f2 - w.g * fr) / (w.f2 * w.f2))
        } else {
            let k = self.family.kappa();
            (-k, 2.0 * k * k)
        };
        // dg[k][(i, j)] = ∂_k g_ij.
        let mut dg = [Matrix4::zeros(); 4];
        for k in 1..4 {
            let d = &mut dg[k];
            d[(0, 0)] = -fr * x[k];
            for i in 1..4 {
                for j in 1..4 {
                    let mut v = dpsi_r * x[k] * x[i] * x[j];
                    if i == k {
                        v += psi * x[j];
                    }
                    if j == k {
                        v += psi * x[i];
                    }
                    d[(i, j)] = v;
                }
            }
        }
        let gi = self.inverse_metric(x);
        let mut lower = [Matrix4::zeros(); 4];
        for s in 0..4 {
            for m in 0..4 {
                for n in m..4 {
                    let v = 0.5 * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
                    lower[s][(m, n)] = v;
                    lower[s][(n, m)] = v;
                }
            }
        }
        let mut out = [Matrix4::zeros(); 4];
        for l in 0..4 {
            for s in 0..4 {
                let c = gi[(l, s)];
                if c != 0.0 {
                    out[l] += lower[s] * c;
                }
            }
        }
        out
    }

    /// `Q_{μν}` for `Q = x_i dx^i ∧ dt`.
    pub fn q(&self, x: &Vector4<f64>) -> Matrix4<f64> {
        let mut q = Matrix4::zeros();
        for i in 1..4 {
            q[(i, 0)] = x[i];
            q[(0, i)] = -x[i];
        }
        q
    }

    /// `R̄_{αβγδ}`: closed forms for Schwarzschild and constant curvature, numeric otherwise.
    pub fn riemann(&self, x: &Vector4<f64>) -> Result<Tensor4> {
        let g = to_dmatrix(&self.metric(x));
        if self.family.is_constant_curvature() {
            return Ok(constant_curvature_riemann(&g, self.family.kappa()));
        }
        if matches!(self.family.family(), Family::Schwarzschild { .. }) {
            let gi = to_dmatrix(&self.inverse_metric(x));
            let q = to_dmatrix(&self.q(x));
            return Ok(schwarzschild_riemann_from_q(
                &g,
                &gi,
                &q,
                3,
                self.family.mass(),
                Self::radius(x),
            ));
        }
        let chart = StaticCartesian::new(self.family);
        Ok(chart.riemann_numeric(x.as_slice())?.down)
    }
}

pub(crate) fn to_dmatrix(m: &Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

/// `g(u, v)`.
pub fn dot(g: &Matrix4<f64>, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    (g * v).dot(u)
}

/// `Γ(u, v)^λ = Γ^λ_{μν} u^μ v^ν`.
pub fn gamma_apply(gam: &Gamma4, u: &Vector4<f64>, v: &Vector4<f64>) -> Vector4<f64> {
    Vector4::from_fn(|l, _| (gam[l] * v).dot(u))
}

/// `R(a, b, c, d)` for a lowered Riemann tensor.
pub fn riem4(r: &Tensor4, a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>, d: &Vector4<f64>) -> f64 {
    r.eval(a.as_slice(), b.as_slice(), c.as_slice(), d.as_slice())
}
