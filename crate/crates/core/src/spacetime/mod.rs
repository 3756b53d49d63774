//! Ambient Lorentzian geometry.
//!
//! Curvature convention, used everywhere in the crate:
//!
//! ```text
//! R^α_{βγδ} = ∂_γΓ^α_{βδ} − ∂_δΓ^α_{βγ} + Γ^α_{γμ}Γ^μ_{βδ} − Γ^α_{δμ}Γ^μ_{βγ}
//! R_{αβγδ} = g_{αμ} R^μ_{βγδ}
//! ```
//!
//! so `R(X,Y,X,Y) > 0` on a round sphere and the timelike–radial frame component of
//! Schwarzschild is `R(E_t,E_r,E_t,E_r) = −m(n−1)(n−2)/r^n`.

mod charts;
mod cky;
mod curvature;
mod family;

pub use charts::{EddingtonFinkelstein, StaticCartesian, StaticSpherical, WarpedToy};
pub use cky::{
    cky_frame_residual, cky_residual, div_q, hodge_dual_2form, killing_residual,
    null_convergence_sample, twistor_frame_residual, twistor_residual, CkyForm, CkyResidual,
    nabla_q, HodgeDual, RadialChart, RadialCky, WarpedCky, WarpedCkyDual,
};
pub use curvature::{
    constant_curvature_riemann, q_squared, schwarzschild_frame_table, schwarzschild_riemann_closed,
    schwarzschild_riemann_from_q, FrameTable,
};
pub use family::{Family, StaticFamily, Warp, HORIZON_MARGIN};

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};

/// Christoffel symbols `Γ^λ_{μν}` stored as `[λ][μ][ν]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize, n: usize) -> f64 {
        self.data[(l * self.dim + m) * self.dim + n]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: usize, n: usize, v: f64) {
        self.data[(l * self.dim + m) * self.dim + n] = v;
    }

    /// `Γ(X, Y)^λ = Γ^λ_{μν}X^μY^ν`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|l| {
                let mut acc = 0.0;
                for m in 0..d {
                    if x[m] == 0.0 {
                        continue;
                    }
                    for n in 0..d {
                        acc += self.get(l, m, n) * x[m] * y[n];
                    }
                }
                acc
            })
            .collect()
    }
}

/// A rank-4 array `T[a][b][c][d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
    }

    /// `T(X, Y, Z, W)`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    if z[c] == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        acc += self.get(a, b, c, d) * x[a] * y[b] * z[c] * w[d];
                    }
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of antisymmetry, pair symmetry and the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        worst = worst
                            .max((v + self.get(b, a, c, d)).abs())
                            .max((v + self.get(a, b, d, c)).abs())
                            .max((v - self.get(c, d, a, b)).abs())
                            .max((v + self.get(a, c, d, b) + self.get(a, d, b, c)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Riemann tensor in both index positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    /// `R^α_{βγδ}`.
    pub up: Tensor4,
    /// `R_{αβγδ}`.
    pub down: Tensor4,
}

impl Riemann {
    pub fn from_up(up: Tensor4, g: &DMatrix<f64>) -> Self {
        let n = up.dim;
        let mut down = Tensor4::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v: f64 = (0..n).map(|m| g[(a, m)] * up.get(m, b, c, d)).sum();
                        down.set(a, b, c, d, v);
                    }
                }
            }
        }
        Self { up, down }
    }

    /// `Ric_{βδ} = R^α_{βαδ}`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.up.dim;
        DMatrix::from_fn(n, n, |b, d| (0..n).map(|a| self.up.get(a, b, a, d)).sum())
    }
}

/// Source of an ambient metric and its analytic first derivatives.
pub trait MetricProvider: Send + Sync {
    /// Spacetime dimension `n + 1`.
    fn dim(&self) -> usize;

    /// Rejects points outside the chart or within the horizon margin.
    fn check_point(&self, x: &[f64]) -> Result<()>;

    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    /// `∂_μ g`, one matrix per coordinate.
    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>>;

    /// Areal radius of the point, used for step scaling.
    fn radius(&self, x: &[f64]) -> f64;

    /// Finite-difference step for coordinate `c`; lengths scale with the radius.
    fn fd_step(&self, x: &[f64], _c: usize) -> f64 {
        1e-4 * self.radius(x).max(1.0)
    }

    fn inverse_metric(&self, x: &[f64]) -> DMatrix<f64> {
        self.metric(x)
            .try_inverse()
            .expect("metric is non-degenerate inside the domain")
    }

    /// `Γ^λ_{μν} = ½ g^{λσ}(∂_μ g_{σν} + ∂_ν g_{σμ} − ∂_σ g_{μν})`.
    fn christoffel(&self, x: &[f64]) -> Christoffel {
        christoffel_from(&self.inverse_metric(x), &self.metric_derivatives(x))
    }

    /// Riemann tensor from Christoffels differentiated by 4th-order central differences
    /// in every coordinate, with steps from [`MetricProvider::fd_step`].
    fn riemann_numeric(&self, x: &[f64]) -> Result<Riemann> {
        self.check_point(x)?;
        let n = self.dim();
        let gam = self.christoffel(x);
        // dgam[c] = ∂_c Γ.
        let mut dgam = Vec::with_capacity(n);
        for c in 0..n {
            let h = self.fd_step(x, c);
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[c] += s * h;
                self.christoffel(&y)
            };
            let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
            let data = (0..gam.data.len())
                .map(|i| (8.0 * (p1.data[i] - m1.data[i]) - (p2.data[i] - m2.data[i])) / (12.0 * h))
                .collect();
            dgam.push(Christoffel { dim: n, data });
        }
        let mut up = Tensor4::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = dgam[c].get(a, b, d) - dgam[d].get(a, b, c);
                        for m in 0..n {
                            v += gam.get(a, c, m) * gam.get(m, b, d) - gam.get(a, d, m) * gam.get(m, b, c);
                        }
                        up.set(a, b, c, d, v);
                    }
                }
            }
        }
        Ok(Riemann::from_up(up, &self.metric(x)))
    }

    /// Signature check `(−, +, …, +)` at a point.
    fn check_signature(&self, x: &[f64]) -> Result<()> {
        let (ev, _) = crate::eigen::symmetric_eigen(&self.metric(x));
        let neg = ev.iter().filter(|v| **v < 0.0).count();
        let zero = ev.iter().filter(|v| **v == 0.0).count();
        if neg != 1 || zero != 0 {
            return Err(GeomError::InvalidMetric(format!(
                "signature at {x:?} has {neg} negative and {zero} zero eigenvalues"
            )));
        }
        Ok(())
    }
}

pub(crate) fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    let mut out = Christoffel::zeros(n);
    // lower[s][m][n] = ½(∂_m g_{sn} + ∂_n g_{sm} − ∂_s g_{mn}).
    let mut lower = vec![0.0; n * n * n];
    for s in 0..n {
        for m in 0..n {
            for k in m..n {
                let v = 0.5 * (dg[m][(s, k)] + dg[k][(s, m)] - dg[s][(m, k)]);
                lower[(s * n + m) * n + k] = v;
                lower[(s * n + k) * n + m] = v;
            }
        }
    }
    for l in 0..n {
        for m in 0..n {
            for k in m..n {
                let v: f64 = (0..n).map(|s| ginv[(l, s)] * lower[(s * n + m) * n + k]).sum();
                out.set(l, m, k, v);
                out.set(l, k, m, v);
            }
        }
    }
    out
}

/// A `g`-orthonormal basis at a point (columns), timelike vector first.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let (values, vectors) = crate::eigen::symmetric_eigen(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut e = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let s = 1.0 / values[i].abs().sqrt();
        for r in 0..n {
            e[(r, col)] = vectors[(r, i)] * s;
        }
    }
    e
}

/// `⟨X, Y⟩_g`.
pub fn inner(g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = g.nrows();
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            acc += g[(a, b)] * x[a] * y[b];
        }
    }
    acc
}

/// `g_{αβ}X^β`.
pub fn lower(g: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let n = g.nrows();
    (0..n).map(|a| (0..n).map(|b| g[(a, b)] * x[b]).sum()).collect()
}
