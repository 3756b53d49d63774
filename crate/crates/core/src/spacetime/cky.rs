//! Conformal Killing-Yano two-forms and their defining equations.
//!
//! For a two-form `Q` on an `(n+1)`-dimensional manifold with `ξ_β = ∇^αQ_{αβ}`:
//!
//! ```text
//! ∇_μQ_{νρ} + ∇_νQ_{μρ} = (2/n)(g_{μν}ξ_ρ − ½g_{μρ}ξ_ν − ½g_{νρ}ξ_μ)
//! ```
//!
//! The equivalent twistor form for `p = 2` in dimension `N = n + 1` reads
//! `∇_XQ − (1/3)X⌟dQ + (1/(N−1))X♭∧δQ = 0` with `δQ = −ξ`.
//! Partial derivatives of `Q` are 4th-order central differences.

use nalgebra::DMatrix;

use super::{inner, lower, orthonormal_frame, MetricProvider};
use crate::error::Result;

/// A two-form given by its coordinate components `Q_{αβ}(x)`.
pub trait CkyForm: Send + Sync {
    fn q(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Which chart a [`RadialCky`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialChart {
    /// `(t, r, angles…)`.
    Spherical,
    /// `(t, x¹, …, xⁿ)`.
    Cartesian,
    /// `(v, r, θ, φ)`, with `Q = r^w dr∧dv`.
    EddingtonFinkelstein,
}

/// `Q = r^w dr∧dt`; `w = 1` is the conformal Killing-Yano form of the static family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCky {
    pub chart: RadialChart,
    pub weight: i32,
}

impl RadialCky {
    pub fn standard(chart: RadialChart) -> Self {
        Self { chart, weight: 1 }
    }
}

impl CkyForm for RadialCky {
    fn q(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        let mut q = DMatrix::zeros(d, d);
        match self.chart {
            RadialChart::Spherical | RadialChart::EddingtonFinkelstein => {
                let v = x[1].powi(self.weight);
                q[(1, 0)] = v;
                q[(0, 1)] = -v;
            }
            RadialChart::Cartesian => {
                let r = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                let c = r.powi(self.weight - 1);
                for i in 1..d {
                    q[(i, 0)] = c * x[i];
                    q[(0, i)] = -c * x[i];
                }
            }
        }
        q
    }
}

/// `Q = R(y)³ √det σ dx¹∧dx²` on [`super::WarpedToy`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WarpedCky;

impl CkyForm for WarpedCky {
    fn q(&self, p: &[f64]) -> DMatrix<f64> {
        let s = super::WarpedToy::sigma(&p[0..2]);
        let v = p[2].powi(3) * (s[0][0] * s[1][1] - s[0][1] * s[1][0]).sqrt();
        let mut q = DMatrix::zeros(4, 4);
        q[(0, 1)] = v;
        q[(1, 0)] = -v;
        q
    }
}

/// `⋆Q = R(y) √|det g| dy¹∧dy²` on [`super::WarpedToy`], in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WarpedCkyDual;

impl CkyForm for WarpedCkyDual {
    fn q(&self, p: &[f64]) -> DMatrix<f64> {
        let l = super::WarpedToy::lorentz_block(&p[2..4]);
        let v = p[2] * (l[0][0] * l[1][1] - l[0][1] * l[1][0]).abs().sqrt();
        let mut q = DMatrix::zeros(4, 4);
        q[(2, 3)] = v;
        q[(3, 2)] = -v;
        q
    }
}

/// Hodge dual of a two-form in four dimensions, computed numerically from the metric.
pub struct HodgeDual<'a, P: MetricProvider, C: CkyForm> {
    pub provider: &'a P,
    pub form: &'a C,
}

impl<P: MetricProvider, C: CkyForm> CkyForm for HodgeDual<'_, P, C> {
    fn q(&self, x: &[f64]) -> DMatrix<f64> {
        hodge_dual_2form(&self.provider.metric(x), &self.form.q(x))
    }
}

/// `(⋆Q)_{μν} = ½ √|det g| ε_{μνρσ} Q^{ρσ}` in four dimensions, `ε_{0123} = 1`.
pub fn hodge_dual_2form(g: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(g.nrows(), 4, "Hodge dual implemented for four dimensions");
    let ginv = g.clone().try_inverse().expect("non-degenerate metric");
    let qup = &ginv * q * ginv.transpose();
    let vol = g.determinant().abs().sqrt();
    let mut out = DMatrix::zeros(4, 4);
    for m in 0..4 {
        for n in 0..4 {
            let mut acc = 0.0;
            for r in 0..4 {
                for s in 0..4 {
                    acc += levi_civita([m, n, r, s]) * qup[(r, s)];
                }
            }
            out[(m, n)] = 0.5 * vol * acc;
        }
    }
    out
}

fn levi_civita(mut p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] == p[j] {
                return 0.0;
            }
        }
    }
    for i in 0..4 {
        while p[i] != i {
            let t = p[i];
            p.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// `∇_μQ_{νρ}` as one matrix per `μ`, with `∂Q` by 4th-order central differences
/// at ten times the curvature step.
pub fn nabla_q<P: MetricProvider, C: CkyForm>(provider: &P, q: &C, x: &[f64]) -> Vec<DMatrix<f64>> {
    let d = provider.dim();
    let q0 = q.q(x);
    let gam = provider.christoffel(x);
    (0..d)
        .map(|mu| {
            let h = 10.0 * provider.fd_step(x, mu);
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[mu] += s * h;
                q.q(&y)
            };
            let dq = (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h);
            DMatrix::from_fn(d, d, |nu, rho| {
                let mut v = dq[(nu, rho)];
                for l in 0..d {
                    v -= gam.get(l, mu, nu) * q0[(l, rho)] + gam.get(l, mu, rho) * q0[(nu, l)];
                }
                v
            })
        })
        .collect()
}

fn xi_lower(ginv: &DMatrix<f64>, nq: &[DMatrix<f64>]) -> Vec<f64> {
    let d = ginv.nrows();
    (0..d)
        .map(|rho| {
            let mut acc = 0.0;
            for mu in 0..d {
                for nu in 0..d {
                    acc += ginv[(mu, nu)] * nq[mu][(nu, rho)];
                }
            }
            acc
        })
        .collect()
}

/// `ξ^α = g^{αρ}∇^μQ_{μρ}`.
pub fn div_q<P: MetricProvider, C: CkyForm>(provider: &P, q: &C, x: &[f64]) -> Result<Vec<f64>> {
    provider.check_point(x)?;
    let ginv = provider.inverse_metric(x);
    let xl = xi_lower(&ginv, &nabla_q(provider, q, x));
    let d = provider.dim();
    Ok((0..d).map(|a| (0..d).map(|r| ginv[(a, r)] * xl[r]).sum()).collect())
}

/// Defect of an equation together with the size of the terms it balances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CkyResidual {
    pub residual: f64,
    pub scale: f64,
}

impl CkyResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(f64::MIN_POSITIVE)
    }
}

struct CkyParts {
    g: DMatrix<f64>,
    nq: Vec<DMatrix<f64>>,
    xi: Vec<f64>,
}

fn parts<P: MetricProvider, C: CkyForm>(provider: &P, q: &C, x: &[f64]) -> Result<CkyParts> {
    provider.check_point(x)?;
    let ginv = provider.inverse_metric(x);
    let nq = nabla_q(provider, q, x);
    let xi = xi_lower(&ginv, &nq);
    Ok(CkyParts {
        g: provider.metric(x),
        nq,
        xi,
    })
}

fn nq_eval(nq: &[DMatrix<f64>], x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let d = x.len();
    let mut acc = 0.0;
    for mu in 0..d {
        if x[mu] == 0.0 {
            continue;
        }
        for nu in 0..d {
            for rho in 0..d {
                acc += x[mu] * y[nu] * z[rho] * nq[mu][(nu, rho)];
            }
        }
    }
    acc
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cky_eval(p: &CkyParts, n: f64, x: &[f64], y: &[f64], z: &[f64]) -> (f64, f64) {
    let l1 = nq_eval(&p.nq, x, y, z);
    let l2 = nq_eval(&p.nq, y, x, z);
    let (xy, xz, yz) = (inner(&p.g, x, y), inner(&p.g, x, z), inner(&p.g, y, z));
    let (xix, xiy, xiz) = (dot(&p.xi, x), dot(&p.xi, y), dot(&p.xi, z));
    let r1 = 2.0 / n * xy * xiz;
    let r2 = 1.0 / n * xz * xiy;
    let r3 = 1.0 / n * yz * xix;
    (
        l1 + l2 - (r1 - r2 - r3),
        l1.abs() + l2.abs() + r1.abs() + r2.abs() + r3.abs(),
    )
}

/// The conformal Killing-Yano defect on given vectors `X, Y, Z`.
pub fn cky_residual<P: MetricProvider, C: CkyForm>(
    provider: &P,
    q: &C,
    x: &[f64],
    xv: &[f64],
    yv: &[f64],
    zv: &[f64],
) -> Result<CkyResidual> {
    let p = parts(provider, q, x)?;
    let n = (provider.dim() - 1) as f64;
    let (res, scale) = cky_eval(&p, n, xv, yv, zv);
    Ok(CkyResidual {
        residual: res.abs(),
        scale,
    })
}

/// Largest defect over all triples of an orthonormal frame, against the largest
/// frame component of `∇Q` plus that of `ξ`.
pub fn cky_frame_residual<P: MetricProvider, C: CkyForm>(
    provider: &P,
    q: &C,
    x: &[f64],
) -> Result<CkyResidual> {
    let p = parts(provider, q, x)?;
    let d = provider.dim();
    let n = (d - 1) as f64;
    let e = orthonormal_frame(&p.g);
    let cols: Vec<Vec<f64>> = (0..d).map(|i| e.column(i).iter().copied().collect()).collect();
    let mut worst = 0.0_f64;
    let mut nq_max = 0.0_f64;
    let mut xi_max = 0.0_f64;
    for a in &cols {
        xi_max = xi_max.max(dot(&p.xi, a).abs());
        for b in &cols {
            for c in &cols {
                let (res, _) = cky_eval(&p, n, a, b, c);
                worst = worst.max(res.abs());
                nq_max = nq_max.max(nq_eval(&p.nq, a, b, c).abs());
            }
        }
    }
    Ok(CkyResidual {
        residual: worst,
        scale: nq_max + xi_max,
    })
}

fn twistor_eval(p: &CkyParts, xv: &[f64], y: &[f64], z: &[f64]) -> (f64, f64) {
    let d = xv.len();
    let big_n = d as f64;
    let t1 = nq_eval(&p.nq, xv, y, z);
    // dQ(X, Y, Z) = ∇_XQ(Y,Z) + ∇_YQ(Z,X) + ∇_ZQ(X,Y).
    let dq = t1 + nq_eval(&p.nq, y, z, xv) + nq_eval(&p.nq, z, xv, y);
    let t2 = dq / 3.0;
    let xl = lower(&p.g, xv);
    // δQ = −ξ.
    let t3 = (dot(&xl, y) * (-dot(&p.xi, z)) - dot(&xl, z) * (-dot(&p.xi, y))) / (big_n - 1.0);
    (t1 - t2 + t3, t1.abs() + t2.abs() + t3.abs())
}

/// Twistor-equation defect `‖∇_XQ − (1/3)X⌟dQ + (1/(N−1))X♭∧δQ‖` over frame pairs.
pub fn twistor_residual<P: MetricProvider, C: CkyForm>(
    provider: &P,
    q: &C,
    x: &[f64],
    xv: &[f64],
) -> Result<CkyResidual> {
    let p = parts(provider, q, x)?;
    let d = provider.dim();
    let e = orthonormal_frame(&p.g);
    let cols: Vec<Vec<f64>> = (0..d).map(|i| e.column(i).iter().copied().collect()).collect();
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for b in &cols {
        for c in &cols {
            let (res, s) = twistor_eval(&p, xv, b, c);
            worst = worst.max(res.abs());
            scale = scale.max(s);
        }
    }
    Ok(CkyResidual {
        residual: worst,
        scale,
    })
}

/// [`twistor_residual`] maximized over `X` in an orthonormal frame.
pub fn twistor_frame_residual<P: MetricProvider, C: CkyForm>(
    provider: &P,
    q: &C,
    x: &[f64],
) -> Result<CkyResidual> {
    let g = provider.metric(x);
    let e = orthonormal_frame(&g);
    let mut out = CkyResidual {
        residual: 0.0,
        scale: 0.0,
    };
    for i in 0..provider.dim() {
        let col: Vec<f64> = e.column(i).iter().copied().collect();
        let r = twistor_residual(provider, q, x, &col)?;
        out.residual = out.residual.max(r.residual);
        out.scale = out.scale.max(r.scale);
    }
    Ok(out)
}

/// `|L_ξ ḡ|` for `ξ = div Q`, largest coordinate component, with `∂ξ` by differences.
pub fn killing_residual<P: MetricProvider, C: CkyForm>(provider: &P, q: &C, x: &[f64]) -> Result<f64> {
    provider.check_point(x)?;
    let d = provider.dim();
    let xi = div_q(provider, q, x)?;
    let mut dxi = vec![vec![0.0; d]; d]; // dxi[mu][lambda] = ∂_μ ξ^λ
    for (mu, row) in dxi.iter_mut().enumerate() {
        let h = 100.0 * provider.fd_step(x, mu);
        let at = |s: f64| -> Result<Vec<f64>> {
            let mut y = x.to_vec();
            y[mu] += s * h;
            div_q(provider, q, &y)
        };
        let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
        for l in 0..d {
            row[l] = (8.0 * (p1[l] - m1[l]) - (p2[l] - m2[l])) / (12.0 * h);
        }
    }
    let g = provider.metric(x);
    let dg = provider.metric_derivatives(x);
    let mut worst = 0.0_f64;
    for mu in 0..d {
        for nu in 0..d {
            let mut v = 0.0;
            for l in 0..d {
                v += xi[l] * dg[l][(mu, nu)] + g[(l, nu)] * dxi[mu][l] + g[(mu, l)] * dxi[nu][l];
            }
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// `Ric(L, L)` for `L = ∂_t/f + v` with `v` a unit vector tangent to the static slice.
pub fn null_convergence_sample<P: MetricProvider>(provider: &P, x: &[f64], v: &[f64]) -> Result<f64> {
    let riem = provider.riemann_numeric(x)?;
    let g = provider.metric(x);
    let f = (-g[(0, 0)]).sqrt();
    let mut l = v.to_vec();
    l[0] += 1.0 / f;
    let ric = riem.ricci();
    Ok(inner(&ric, &l, &l))
}
