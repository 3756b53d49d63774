//! Fields that need one more derivative than the immersion jets carry: `dζ`, the
//! intrinsic curvature, covariant derivatives of `χ, χ̄` and of `T_{r,s}`.
//!
//! Each is obtained from analytic samples on a 4th-order stencil in the node chart,
//! so the error is `O(h⁴)` in the stencil step plus rounding of order `ε/h`.

use nalgebra::{Matrix2, Vector2, Vector4};
use rayon::prelude::*;

use super::{
    bilinear, matrix2, relabel, riem4, stencil_gradient, NullFrameField, PointFrame, PointGeometry,
    Scaling,
};
use crate::error::{GeomError, Result};
use crate::spacetime::Tensor4;
use crate::symfunc::mixed_t;

/// Which divergences to compute.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DerivedOptions {
    /// `(r, s)` pairs for `∇_b T^{ab}_{r,s}` and `∇_b T̄^{ab}_{r,s}`.
    pub rs: Vec<(usize, usize)>,
}

/// Derived quantities at one node, in node-chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedNode {
    /// `(dζ)_{12}` in chart components.
    pub dzeta12: f64,
    /// `(dζ)(e₁, e₂)` for an oriented σ-orthonormal `e_b`.
    pub dzeta_orthonormal: f64,
    /// Scalar curvature of `σ`.
    pub scalar_curvature: f64,
    /// Largest Codazzi residual component for `χ` and for `χ̄`, and the size of the terms.
    pub codazzi: f64,
    pub codazzi_bar: f64,
    pub codazzi_scale: f64,
    /// Ricci-equation residual on `(e₁, e₂)` and the size of its terms.
    pub ricci: f64,
    pub ricci_scale: f64,
    /// Gauss-equation residual and the size of its terms.
    pub gauss: f64,
    pub gauss_scale: f64,
    /// `∇_b T^{ab}_{r,s}` and `∇_b T̄^{ab}_{r,s}`, one per requested pair.
    pub div_t: Vec<Vector2<f64>>,
    pub div_tbar: Vec<Vector2<f64>>,
    /// Sum of the absolute values of the terms entering each divergence.
    pub div_t_scale: Vec<f64>,
    pub div_tbar_scale: Vec<f64>,
    /// `d log|H|`.
    pub dlog_h: Vector2<f64>,
    /// `R̄_{αβγδ}` at the node.
    pub riemann: Tensor4,
}

const ZETA: usize = 0;
const GSIG: usize = 2;
const CHI: usize = 10;
const CHIBAR: usize = 14;
const LOGH: usize = 18;
const TS: usize = 19;

fn frame_at(field: &NullFrameField, i: usize, p: f64, q: f64) -> Result<(PointGeometry, PointFrame)> {
    let mesh = &field.mesh;
    let pg = mesh.geometry_at(i, p, q)?;
    let (la, dla) = match &field.scaling {
        Scaling::None => (0.0, Vector2::zeros()),
        Scaling::Field(f) => {
            let v = f.eval(&mesh.charts[i].unit_jets(p, q));
            (v.v, Vector2::new(v.g[0], v.g[1]))
        }
        Scaling::MeanCurvature => {
            return Err(GeomError::Precondition(
                "derived fields need a gauge with an analytic scaling".into(),
            ))
        }
    };
    let f = PointFrame::compute(&pg, la, dla)?;
    Ok((pg, f))
}

fn sample(pg: &PointGeometry, f: &PointFrame, rs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; TS + 8 * rs.len()];
    v[ZETA] = f.zeta[0];
    v[ZETA + 1] = f.zeta[1];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                v[GSIG + c * 4 + a * 2 + b] = pg.gamma_sigma[c][(a, b)];
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            v[CHI + a * 2 + b] = f.chi[(a, b)];
            v[CHIBAR + a * 2 + b] = f.chibar[(a, b)];
        }
    }
    v[LOGH] = 0.5 * pg.dot(&pg.h, &pg.h).abs().ln();
    let (s, c, cb) = (bilinear(&pg.sigma), bilinear(&f.chi), bilinear(&f.chibar));
    for (k, &(r, ss)) in rs.iter().enumerate() {
        let (t, tb) = mixed_t(&s, &c, &cb, r, ss)?;
        for a in 0..2 {
            for b in 0..2 {
                v[TS + 8 * k + a * 2 + b] = t.get(a, b);
                v[TS + 8 * k + 4 + a * 2 + b] = tb.get(a, b);
            }
        }
    }
    Ok(v)
}

/// Computes [`DerivedNode`] at every node of a frame field.
pub fn derived_fields(field: &NullFrameField, opts: &DerivedOptions) -> Result<Vec<DerivedNode>> {
    let mesh = &field.mesh;
    let h = mesh.stencil_step;
    (0..mesh.len())
        .into_par_iter()
        .map(|i| {
            let (j, k) = mesh.grid.unflatten(i);
            let samples = super::STENCIL
                .iter()
                .map(|(dp, dq)| {
                    let (pg, f) = frame_at(field, i, dp * h, dq * h)?;
                    sample(&pg, &f, &opts.rs)
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| relabel(e, j, k))?;
            let d = stencil_gradient(&samples, h);
            let pg = &mesh.nodes[i];
            let f = &field.nodes[i].frame;
            let riemann = mesh.ambient.riemann(&pg.x)?;
            Ok(assemble(pg, f, &d, &opts.rs, riemann))
        })
        .collect()
}

fn assemble(
    pg: &PointGeometry,
    f: &PointFrame,
    d: &[Vec<f64>; 2],
    rs: &[(usize, usize)],
    riemann: Tensor4,
) -> DerivedNode {
    let gs = &pg.gamma_sigma;
    let si = &pg.sigma_inv;
    let sqrt_det = pg.sqrt_det_sigma();
    let t = &pg.tangents;
    // ∂_c of sampled component k.
    let dd = |c: usize, k: usize| d[c][k];

    let dzeta12 = dd(0, ZETA + 1) - dd(1, ZETA);

    // Intrinsic curvature from Γ and ∂Γ.
    let dgam = |c: usize, a: usize, b: usize, e: usize| dd(c, GSIG + a * 4 + b * 2 + e);
    let mut scalar = 0.0;
    for b in 0..2 {
        for dix in 0..2 {
            let mut ric = 0.0;
            for a in 0..2 {
                // R^a_{b a d} = ∂_aΓ^a_{db} − ∂_dΓ^a_{ab} + Γ^a_{ae}Γ^e_{db} − Γ^a_{de}Γ^e_{ab}.
                ric += dgam(a, a, dix, b) - dgam(dix, a, a, b);
                for e in 0..2 {
                    ric += gs[a][(a, e)] * gs[e][(dix, b)] - gs[a][(dix, e)] * gs[e][(a, b)];
                }
            }
            scalar += si[(b, dix)] * ric;
        }
    }

    // Codazzi for χ and χ̄.
    let (l, lb) = (&f.l, &f.lbar);
    let cov = |base: usize, m: &Matrix2<f64>, c: usize, b: usize, e: usize| {
        let mut v = dd(c, base + b * 2 + e);
        for x in 0..2 {
            v -= gs[x][(c, b)] * m[(x, e)] + gs[x][(c, e)] * m[(b, x)];
        }
        v
    };
    let (mut codazzi, mut codazzi_bar, mut codazzi_scale) = (0.0_f64, 0.0_f64, 0.0_f64);
    for c in 0..2 {
        for b in 0..2 {
            for e in 0..2 {
                let lhs = cov(CHI, &f.chi, c, b, e) - cov(CHI, &f.chi, b, c, e);
                let curv = riem4(&riemann, &t[e], l, &t[c], &t[b]);
                let tor = f.zeta[b] * f.chi[(c, e)] - f.zeta[c] * f.chi[(b, e)];
                codazzi = codazzi.max((lhs - curv - tor).abs());
                let lhs_b = cov(CHIBAR, &f.chibar, c, b, e) - cov(CHIBAR, &f.chibar, b, c, e);
                let curv_b = riem4(&riemann, &t[e], lb, &t[c], &t[b]);
                let tor_b = -f.zeta[b] * f.chibar[(c, e)] + f.zeta[c] * f.chibar[(b, e)];
                codazzi_bar = codazzi_bar.max((lhs_b - curv_b - tor_b).abs());
                codazzi_scale = codazzi_scale
                    .max(cov(CHI, &f.chi, c, b, e).abs() + curv.abs() + tor.abs())
                    .max(cov(CHIBAR, &f.chibar, c, b, e).abs() + curv_b.abs() + tor_b.abs());
            }
        }
    }

    // Ricci equation on (∂₁, ∂₂), reported on an orthonormal pair.
    let mixed = f.chi * si * f.chibar;
    let comm = 0.5 * (mixed[(0, 1)] - mixed[(1, 0)]);
    let curv = 0.5 * riem4(&riemann, lb, l, &t[0], &t[1]);
    let ricci = (comm + dzeta12 - curv) / sqrt_det;
    let ricci_scale = (comm.abs() + dzeta12.abs() + curv.abs()) / sqrt_det;

    // Gauss equation.
    let ric = |u: &Vector4<f64>, v: &Vector4<f64>| {
        let mut acc = 0.0;
        for a in 0..4 {
            for c in 0..4 {
                let gi = pg.g_inv[(a, c)];
                if gi == 0.0 {
                    continue;
                }
                let mut ea = Vector4::zeros();
                ea[a] = 1.0;
                let mut ec = Vector4::zeros();
                ec[c] = 1.0;
                acc += gi * riem4(&riemann, &ea, u, &ec, v);
            }
        }
        acc
    };
    let mut ambient_scalar = 0.0;
    for b in 0..4 {
        for e in 0..4 {
            let gi = pg.g_inv[(b, e)];
            if gi != 0.0 {
                let mut eb = Vector4::zeros();
                eb[b] = 1.0;
                let mut ee = Vector4::zeros();
                ee[e] = 1.0;
                ambient_scalar += gi * ric(&eb, &ee);
            }
        }
    }
    let ric_llb = ric(l, lb);
    let rllll = 0.5 * riem4(&riemann, lb, l, l, lb);
    let trc = (si * f.chi).trace();
    let trcb = (si * f.chibar).trace();
    let cc = (si * f.chi * si * f.chibar).trace();
    let gauss = ambient_scalar + ric_llb + rllll - (scalar + trc * trcb - cc);
    let gauss_scale =
        ambient_scalar.abs() + ric_llb.abs() + rllll.abs() + scalar.abs() + (trc * trcb).abs() + cc.abs();

    // Divergences of T_{r,s}.
    let div = |base: usize| -> Vector2<f64> {
        Vector2::from_fn(|a, _| {
            let mut v = 0.0;
            for b in 0..2 {
                v += dd(b, base + a * 2 + b);
            }
            v
        })
    };
    let mut div_t = Vec::with_capacity(rs.len());
    let mut div_tbar = Vec::with_capacity(rs.len());
    let mut div_t_scale = Vec::with_capacity(rs.len());
    let mut div_tbar_scale = Vec::with_capacity(rs.len());
    let (s, c, cb) = (bilinear(&pg.sigma), bilinear(&f.chi), bilinear(&f.chibar));
    let form_norm = |m: &Matrix2<f64>| (si * m * si * m.transpose()).trace().abs().sqrt();
    let curv_size = form_norm(&f.chi) + form_norm(&f.chibar);
    for (k, &(r, ss)) in rs.iter().enumerate() {
        let (tt, ttb) = mixed_t(&s, &c, &cb, r, ss).expect("validated on the stencil");
        for (base, tm, out, scale) in [
            (TS + 8 * k, matrix2(&tt), &mut div_t, &mut div_t_scale),
            (TS + 8 * k + 4, matrix2(&ttb), &mut div_tbar, &mut div_tbar_scale),
        ] {
            let mut v = div(base);
            let mut sc = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    sc += dd(b, base + a * 2 + b).abs();
                    for x in 0..2 {
                        let (p, q) = (gs[a][(b, x)] * tm[(x, b)], gs[b][(b, x)] * tm[(a, x)]);
                        v[a] += p + q;
                        sc += p.abs() + q.abs();
                    }
                }
            }
            // Floor |T|_σ·(|χ|_σ + |χ̄|_σ): the divergence is O(|T|/length) even where
            // every chart term happens to vanish.
            let tnorm = (si * tm * pg.sigma * tm.transpose() * pg.sigma).trace().abs().sqrt();
            out.push(v);
            scale.push(sc + tnorm * curv_size);
        }
    }

    DerivedNode {
        dzeta12,
        dzeta_orthonormal: dzeta12 / sqrt_det,
        scalar_curvature: scalar,
        codazzi,
        codazzi_bar,
        codazzi_scale,
        ricci,
        ricci_scale,
        gauss,
        gauss_scale,
        div_t,
        div_tbar,
        div_t_scale,
        div_tbar_scale,
        dlog_h: Vector2::new(dd(0, LOGH), dd(1, LOGH)),
        riemann,
    }
}
