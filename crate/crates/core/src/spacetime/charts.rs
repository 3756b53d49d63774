//! Coordinate charts with analytic metric derivatives.

use nalgebra::DMatrix;

use super::{family::StaticFamily, MetricProvider};
use crate::error::{GeomError, Result};

/// Static chart `(t, r, θ₁, …, θ_{n−1})` with
/// `ḡ = −F dt² + dr²/F + r²(dθ₁² + sin²θ₁ dθ₂² + …)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticSpherical {
    pub family: StaticFamily,
}

impl StaticSpherical {
    pub fn new(family: StaticFamily) -> Self {
        Self { family }
    }

    /// `Π_{j<k} sin²θ_j` for angular slot `k` (0-based).
    fn sin_prod(x: &[f64], k: usize) -> f64 {
        (0..k).map(|j| x[2 + j].sin().powi(2)).product()
    }
}

impl MetricProvider for StaticSpherical {
    /// Angles and time are not lengths, so only the radial step grows with `r`.
    fn fd_step(&self, x: &[f64], c: usize) -> f64 {
        if c == 1 {
            1e-4 * x[1].max(1.0)
        } else {
            2e-4
        }
    }

    fn dim(&self) -> usize {
        self.family.n() + 1
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::Domain(format!("expected {} coordinates", self.dim())));
        }
        self.family.check_radius(x[1])?;
        if x[1] == 0.0 {
            return Err(GeomError::Domain("the spherical chart is singular at r = 0".into()));
        }
        for j in 0..self.family.n() - 2 {
            if x[2 + j].sin().abs() < 1e-8 {
                return Err(GeomError::Domain("angular coordinate on a chart pole".into()));
            }
        }
        Ok(())
    }

    fn radius(&self, x: &[f64]) -> f64 {
        x[1]
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let r = x[1];
        let w = self.family.warp(r);
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = -w.f2;
        g[(1, 1)] = 1.0 / w.f2;
        for k in 0..n - 2 {
            g[(2 + k, 2 + k)] = r * r * Self::sin_prod(x, k);
        }
        g
    }

    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let r = x[1];
        let w = self.family.warp(r);
        let mut out = vec![DMatrix::zeros(n, n); n];
        out[1][(0, 0)] = -w.df2;
        out[1][(1, 1)] = -w.df2 / (w.f2 * w.f2);
        for k in 0..n - 2 {
            out[1][(2 + k, 2 + k)] = 2.0 * r * Self::sin_prod(x, k);
        }
        for i in 0..n - 2 {
            let cot = x[2 + i].cos() / x[2 + i].sin();
            for k in (i + 1)..n - 2 {
                out[2 + i][(2 + k, 2 + k)] = 2.0 * cot * r * r * Self::sin_prod(x, k);
            }
        }
        out
    }
}

/// Cartesian-like static chart `(t, x¹, …, xⁿ)`, `r = |x|`, with
/// `g_tt = −F`, `g_ij = δ_ij + ψ x_i x_j`, `ψ = (1 − F)/(r²F)`. Regular on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticCartesian {
    pub family: StaticFamily,
}

impl StaticCartesian {
    pub fn new(family: StaticFamily) -> Self {
        Self { family }
    }

    fn r(x: &[f64]) -> f64 {
        x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl MetricProvider for StaticCartesian {
    fn dim(&self) -> usize {
        self.family.n() + 1
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::Domain(format!("expected {} coordinates", self.dim())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain("non-finite coordinate".into()));
        }
        self.family.check_radius(Self::r(x))
    }

    fn radius(&self, x: &[f64]) -> f64 {
        Self::r(x)
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let r = Self::r(x);
        let w = self.family.warp(r);
        let psi = if r > 0.0 { w.g / w.f2 } else { -self.family.kappa() };
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = -w.f2;
        for i in 1..n {
            for j in 1..n {
                g[(i, j)] = psi * x[i] * x[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        g
    }

    fn inverse_metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let r = Self::r(x);
        let w = self.family.warp(r);
        let g_coef = if r > 0.0 { w.g } else { -self.family.kappa() };
        let mut gi = DMatrix::zeros(n, n);
        gi[(0, 0)] = -1.0 / w.f2;
        for i in 1..n {
            for j in 1..n {
                gi[(i, j)] = -g_coef * x[i] * x[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        gi
    }

    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let r = Self::r(x);
        let w = self.family.warp(r);
        let fr = self.family.df2_over_r(r);
        let (psi, dpsi_r) = if r > 0.0 {
            let gr = w.dg / r;
            (w.g / w.f2, (gr * w.f2 - w.g * fr) / (w.f2 * w.f2))
        } else {
            // Constant curvature at the origin: ψ = −κ/F, ψ′/r → 2κ².
            let k = self.family.kappa();
            (-k, 2.0 * k * k)
        };
        let mut out = vec![DMatrix::zeros(n, n); n];
        for k in 1..n {
            let d = &mut out[k];
            d[(0, 0)] = -fr * x[k];
            for i in 1..n {
                for j in 1..n {
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
        out
    }
}

/// Ingoing Eddington–Finkelstein chart `(v, r, θ, φ)`:
/// `ḡ = −F dv² + 2 dv dr + r²(dθ² + sin²θ dφ²)`, spatial dimension 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EddingtonFinkelstein {
    pub family: StaticFamily,
}

impl EddingtonFinkelstein {
    pub fn new(family: StaticFamily) -> Result<Self> {
        if family.n() != 3 {
            return Err(GeomError::Config(
                "the Eddington–Finkelstein chart is implemented for n = 3".into(),
            ));
        }
        Ok(Self { family })
    }
}

impl MetricProvider for EddingtonFinkelstein {
    /// Angles and time are not lengths, so only the radial step grows with `r`.
    fn fd_step(&self, x: &[f64], c: usize) -> f64 {
        if c == 1 {
            1e-4 * x[1].max(1.0)
        } else {
            2e-4
        }
    }

    fn dim(&self) -> usize {
        4
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != 4 {
            return Err(GeomError::Domain("expected 4 coordinates".into()));
        }
        self.family.check_radius(x[1])?;
        if x[2].sin().abs() < 1e-8 {
            return Err(GeomError::Domain("angular coordinate on a chart pole".into()));
        }
        Ok(())
    }

    fn radius(&self, x: &[f64]) -> f64 {
        x[1]
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let (r, th) = (x[1], x[2]);
        let w = self.family.warp(r);
        let mut g = DMatrix::zeros(4, 4);
        g[(0, 0)] = -w.f2;
        g[(0, 1)] = 1.0;
        g[(1, 0)] = 1.0;
        g[(2, 2)] = r * r;
        g[(3, 3)] = r * r * th.sin().powi(2);
        g
    }

    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let (r, th) = (x[1], x[2]);
        let w = self.family.warp(r);
        let mut out = vec![DMatrix::zeros(4, 4); 4];
        out[1][(0, 0)] = -w.df2;
        out[1][(2, 2)] = 2.0 * r;
        out[1][(3, 3)] = 2.0 * r * th.sin().powi(2);
        out[2][(3, 3)] = 2.0 * r * r * th.sin() * th.cos();
        out
    }
}

/// Four-dimensional warped product `R(y)²σ(x) ⊕ g(y)` with `R(y) = y¹`,
/// a non-diagonal Riemannian block `σ(x)` and a non-diagonal Lorentzian block `g(y)`.
///
/// Coordinates `(x¹, x², y¹, y²)`; the domain is `y¹ > 0.1`, `|x|, |y²| < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WarpedToy;

impl WarpedToy {
    pub fn sigma(x: &[f64]) -> [[f64; 2]; 2] {
        let s12 = 0.2 * x[0].sin();
        [[1.0 + 0.3 * x[1] * x[1], s12], [s12, 1.0 + 0.1 * x[0] * x[0]]]
    }

    fn dsigma(x: &[f64]) -> [[[f64; 2]; 2]; 2] {
        let c = 0.2 * x[0].cos();
        [
            [[0.0, c], [c, 0.2 * x[0]]],
            [[0.6 * x[1], 0.0], [0.0, 0.0]],
        ]
    }

    pub fn lorentz_block(y: &[f64]) -> [[f64; 2]; 2] {
        [[-(1.0 + 0.1 * y[1] * y[1]), 0.3], [0.3, 1.0 + 0.2 * y[0]]]
    }

    fn dlorentz(y: &[f64]) -> [[[f64; 2]; 2]; 2] {
        [
            [[0.0, 0.0], [0.0, 0.2]],
            [[-0.2 * y[1], 0.0], [0.0, 0.0]],
        ]
    }
}

impl MetricProvider for WarpedToy {
    fn dim(&self) -> usize {
        4
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != 4 || !(p[2] > 0.1) || p[0].abs() > 2.0 || p[1].abs() > 2.0 || p[3].abs() > 2.0 {
            return Err(GeomError::Domain(format!("point {p:?} outside the warped toy domain")));
        }
        Ok(())
    }

    fn radius(&self, _: &[f64]) -> f64 {
        1.0
    }

    fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        let (x, y) = (&p[0..2], &p[2..4]);
        let s = Self::sigma(x);
        let l = Self::lorentz_block(y);
        let r2 = y[0] * y[0];
        let mut g = DMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                g[(a, b)] = r2 * s[a][b];
                g[(2 + a, 2 + b)] = l[a][b];
            }
        }
        g
    }

    fn metric_derivatives(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        let (x, y) = (&p[0..2], &p[2..4]);
        let s = Self::sigma(x);
        let ds = Self::dsigma(x);
        let dl = Self::dlorentz(y);
        let r2 = y[0] * y[0];
        let mut out = vec![DMatrix::zeros(4, 4); 4];
        for a in 0..2 {
            for b in 0..2 {
                out[0][(a, b)] = r2 * ds[0][a][b];
                out[1][(a, b)] = r2 * ds[1][a][b];
                out[2][(a, b)] = 2.0 * y[0] * s[a][b];
                out[2][(2 + a, 2 + b)] = dl[0][a][b];
                out[3][(2 + a, 2 + b)] = dl[1][a][b];
            }
        }
        out
    }
}
