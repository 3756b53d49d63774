//! Checks specific to the Schwarzschild spacetime: the integral formula with the
//! mass term, the curvature flux, the divergence structure of `T_{r,0}`, `T̄_{0,s}`
//! and the integral inequalities that follow from it.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::minkowski::{integrate_fallible, p_node};
use super::{node_list, torsion_warning, IdentityReport, Relation, Term};
use crate::error::{GeomError, Result};
use crate::spacetime::{Family, Tensor4};
use crate::surface::{derived_fields, riem4, Ambient, DerivedOptions, NullFrameField};

fn schwarzschild_mass(amb: &Ambient) -> Result<f64> {
    match amb.family.family() {
        Family::Schwarzschild { m } => Ok(m),
        Family::Minkowski => Ok(0.0),
        _ => Err(GeomError::Precondition(
            "this check needs the Schwarzschild spacetime (m ≥ 0)".into(),
        )),
    }
}

/// `2∫⟨H,L⟩⟨L̄,∂_t⟩ = −16πm + ∫(R + ¼R̄_{LL̄LL̄})Q(L,L̄) + ∫Σ_{bc}(½R̄_{bcL̄L} − 2(dζ)_{bc})Q_{bc}`,
/// the last sum over a σ-orthonormal frame.
pub fn theorem_f(field: &NullFrameField) -> Result<IdentityReport> {
    let m = schwarzschild_mass(&field.mesh.ambient)?;
    let derived = derived_fields(field, &DerivedOptions::default())?;
    let lhs = field.integrate(|_, _, nf| 2.0 * nf.h_l * nf.dt_lbar)?;
    let bulk = field.integrate(|i, _, nf| {
        let (l, lb) = (&nf.frame.l, &nf.frame.lbar);
        let d = &derived[i];
        (d.scalar_curvature + 0.25 * riem4(&d.riemann, l, lb, l, lb)) * nf.q_llbar
    })?;
    // Σ_{bc} X_{bc}Q_{bc} over an orthonormal frame is 2·X₁₂Q₁₂/det σ in chart components.
    let twist = field.integrate(|i, pg, nf| {
        let d = &derived[i];
        let t = &pg.tangents;
        let x12 = 0.5 * riem4(&d.riemann, &t[0], &t[1], &nf.frame.lbar, &nf.frame.l) - 2.0 * d.dzeta12;
        2.0 * x12 * nf.q12 / pg.sigma.determinant()
    })?;
    Ok(IdentityReport::for_field(
        "theorem-f",
        Relation::Identity,
        field,
        vec![Term::new("2 int <H,L><Lbar,dt>", lhs)],
        vec![
            Term::new("-16 pi m", -16.0 * PI * m),
            Term::new("int (R + 1/4 Rbar_LLbarLLbar) Q(L,Lbar)", bulk),
            Term::new("int sum_bc (1/2 Rbar_bcLbarL - 2 dzeta_bc) Q_bc", twist),
        ],
    ))
}

fn q_upper(amb: &Ambient, x: &Vector4<f64>) -> Matrix4<f64> {
    let gi = amb.inverse_metric(x);
    gi * amb.q(x) * gi
}

fn flux_density(r: &Tensor4, qup: &Matrix4<f64>, lbar: &Vector4<f64>, l: &Vector4<f64>) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let c = qup[(a, b)];
            if c == 0.0 {
                continue;
            }
            let mut ea = Vector4::zeros();
            ea[a] = 1.0;
            let mut eb = Vector4::zeros();
            eb[b] = 1.0;
            acc += c * riem4(r, &ea, &eb, lbar, l);
        }
    }
    acc
}

/// `∫ Q^{αβ}R̄_{αβL̄L} dμ`, `−32πm` for every surface homologous to a sphere of symmetry.
pub fn flux_invariant(field: &NullFrameField) -> Result<f64> {
    let amb = field.mesh.ambient;
    schwarzschild_mass(&amb)?;
    let vals = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let pg = &field.mesh.nodes[i];
            let nf = &field.nodes[i];
            let r = amb.riemann(&pg.x)?;
            Ok(flux_density(&r, &q_upper(&amb, &pg.x), &nf.frame.lbar, &nf.frame.l))
        })
        .collect::<Result<Vec<f64>>>()?;
    field.mesh.integrate(&vals)
}

/// [`flux_invariant`] against `−32πm`.
pub fn flux_report(field: &NullFrameField) -> Result<IdentityReport> {
    let m = schwarzschild_mass(&field.mesh.ambient)?;
    let flux = flux_invariant(field)?;
    Ok(IdentityReport::for_field(
        "flux-invariant",
        Relation::Identity,
        field,
        vec![Term::new("int Q^ab Rbar_abLbarL", flux)],
        vec![Term::new("-32 pi m", -32.0 * PI * m)],
    ))
}

/// Spread `max − min` of the flux invariant over several surfaces, against `32π|m|`.
/// The first field supplies the provenance; all must share one spacetime.
pub fn flux_spread(fields: &[&NullFrameField]) -> Result<IdentityReport> {
    let first = fields
        .first()
        .ok_or_else(|| GeomError::Precondition("flux spread needs at least one surface".into()))?;
    if fields.iter().any(|f| f.mesh.ambient != first.mesh.ambient) {
        return Err(GeomError::Precondition("flux spread compares surfaces in one spacetime".into()));
    }
    let m = schwarzschild_mass(&first.mesh.ambient)?;
    let fluxes = fields.iter().map(|f| flux_invariant(f)).collect::<Result<Vec<f64>>>()?;
    let hi = fluxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = fluxes.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rep = IdentityReport::explicit(
        "flux-spread",
        Relation::Identity,
        &first.mesh,
        first.gauge.name(),
        hi - lo,
        32.0 * PI * m,
    );
    rep.lhs = vec![Term::new("max flux", hi), Term::new("-min flux", -lo)];
    rep.provenance.surface = fields
        .iter()
        .map(|f| f.mesh.immersion.name())
        .collect::<Vec<_>>()
        .join(", ");
    for (f, v) in fields.iter().zip(&fluxes) {
        rep.diagnostics.push(Term::new(format!("flux[{}]", f.mesh.immersion.name()), *v));
    }
    Ok(rep)
}

/// `max_nodes |v|_σ` for chart vectors.
fn norm_vec(sigma: &Matrix2<f64>, v: &Vector2<f64>) -> f64 {
    (v.transpose() * sigma * v)[(0, 0)].max(0.0).sqrt()
}

/// Divergence of `T^{ab}_{r,s}` and `T̄^{ab}_{r,s}`.
///
/// Constant curvature: `max |∇_b T^{ab}|_σ`, which vanishes for torsion-free surfaces.
///
/// Schwarzschild, `(r, 0)` or `(0, s)` with `N = L` resp. `L̄`: the numeric
/// `Σ_a(∇_b T^{ab})Q_{Na}` against the closed form `3m(n−k)/ρ⁵·σ^{ab}(Q²)_{Na}Q_{Nb}`
/// (`n = 3`, `k = r + s`) and, for `k = 2`, against `∓(3/2)m/ρ⁵·Q(L,L̄)·σ^{ab}Q_{Na}Q_{Nb}`
/// (minus for `L`, plus for `L̄`). Both closed forms assume a torsion-free frame; the
/// torsion contribution `±(χ_N^{ab}ζ_b − trχ_N ζ^a)Q_{Na}` of the Codazzi equation is
/// added to them.
pub fn divergence_check(field: &NullFrameField, r: usize, s: usize) -> Result<IdentityReport> {
    let amb = field.mesh.ambient;
    let n = amb.family.n();
    if r + s < 1 || r + s >= n {
        return Err(GeomError::Precondition(format!(
            "need 1 ≤ r + s ≤ {}, got (r, s) = ({r}, {s})",
            n - 1
        )));
    }
    if amb.family.is_constant_curvature() {
        return divergence_free(field, r, s);
    }
    let m = schwarzschild_mass(&amb)?;
    if r > 0 && s > 0 {
        return Err(GeomError::Precondition(
            "the Schwarzschild divergence structure is for (r, 0) and (0, s)".into(),
        ));
    }
    let use_l = s == 0;
    let k = r + s;
    let derived = derived_fields(field, &DerivedOptions { rs: vec![(r, s)] })?;
    let per: Vec<[f64; 5]> = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let pg = &field.mesh.nodes[i];
            let nf = &field.nodes[i];
            let d = &derived[i];
            let (nvec, qn, div, div_scale, chi) = if use_l {
                (&nf.frame.l, nf.q_l, d.div_t[0], d.div_t_scale[0], nf.frame.chi)
            } else {
                (&nf.frame.lbar, nf.q_lbar, d.div_tbar[0], d.div_tbar_scale[0], nf.frame.chibar)
            };
            let numeric = div.dot(&qn);
            if k == 1 {
                return [numeric, 0.0, 0.0, 0.0, div_scale * qn.abs().sum()];
            }
            let rho = Ambient::radius(&pg.x);
            let q = amb.q(&pg.x);
            let q2 = q * pg.g_inv * q;
            let q2n = Vector2::from_fn(|a, _| (q2 * pg.tangents[a]).dot(nvec));
            let si = &pg.sigma_inv;
            let nn = n as f64;
            let closed = nn * m * (nn - k as f64) / rho.powi(n as i32 + 2) * (q2n.transpose() * si * qn)[(0, 0)];
            let sign = if use_l { -1.0 } else { 1.0 };
            let special = sign * 0.5 * nn * (nn - 2.0) * m / rho.powi(n as i32 + 2)
                * nf.q_llbar
                * (qn.transpose() * si * qn)[(0, 0)];
            let zeta_up = si * nf.frame.zeta;
            let tor_vec = si * chi * zeta_up - zeta_up * (si * chi).trace();
            let torsion = if use_l { 1.0 } else { -1.0 } * tor_vec.dot(&qn);
            let scale = div_scale * qn.abs().sum() + closed.abs() + special.abs() + torsion.abs();
            [numeric, closed, special, torsion, scale]
        })
        .collect();
    let (mut res, mut scale, mut max_num, mut max_closed, mut max_tor, mut spread) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for [num, closed, special, tor, sc] in &per {
        res = res.max((num - closed - tor).abs()).max((num - special - tor).abs());
        scale = scale.max(*sc);
        max_num = max_num.max(num.abs());
        max_closed = max_closed.max(closed.abs());
        max_tor = max_tor.max(tor.abs());
        spread = spread.max((closed - special).abs());
    }
    let nname = if use_l { "L" } else { "Lbar" };
    let mut rep = IdentityReport::explicit(
        format!("divergence-structure(r={r},s={s})"),
        Relation::Identity,
        &field.mesh,
        field.gauge.name(),
        res,
        scale,
    );
    rep.lhs = vec![Term::new(format!("max |(div T)^a Q_{nname}a|"), max_num)];
    rep.rhs = vec![
        Term::new("max |closed form|", max_closed),
        Term::new("max |torsion correction|", max_tor),
    ];
    rep.diagnostics.push(Term::new("max |general - specialized closed form|", spread));
    torsion_warning(&mut rep, field);
    Ok(rep)
}

fn divergence_free(field: &NullFrameField, r: usize, s: usize) -> Result<IdentityReport> {
    let derived = derived_fields(field, &DerivedOptions { rs: vec![(r, s)] })?;
    let (mut res, mut scale, mut res_bar) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (pg, d) in field.mesh.nodes.iter().zip(&derived) {
        res = res.max(norm_vec(&pg.sigma, &d.div_t[0]));
        res_bar = res_bar.max(norm_vec(&pg.sigma, &d.div_tbar[0]));
        let sq = pg.sigma.norm().sqrt();
        scale = scale.max(sq * (d.div_t_scale[0] + d.div_tbar_scale[0]));
    }
    let mut rep = IdentityReport::explicit(
        format!("divergence-free(r={r},s={s})"),
        Relation::Identity,
        &field.mesh,
        field.gauge.name(),
        res.max(res_bar),
        scale,
    );
    rep.lhs = vec![
        Term::new("max |div T|", res),
        Term::new("max |div Tbar|", res_bar),
    ];
    torsion_warning(&mut rep, field);
    Ok(rep)
}

/// Which of the two integral inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchwarzschildMode {
    /// `∫P_{k−1,0}⟨L,∂_t⟩ + k/(2(n−k))∫P_{k,0}Q(L,L̄) ≥ 0`.
    L,
    /// `∫P_{0,k−1}⟨L̄,∂_t⟩ − k/(2(n−k))∫P_{0,k}Q(L,L̄) ≥ 0`.
    Lbar,
}

/// Hypotheses of the divergence-structure lemma, checked at every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaHypotheses {
    /// Nodes with `Q(L, L̄) < 0`.
    pub q_llbar_negative: Vec<usize>,
    pub min_q_llbar: f64,
    /// `Q(L,L̄) ≥ 0`.
    pub case1: bool,
    /// `χ > 0` and `(Q²)(L,v)Q(L,v) ≤ 0` for tangent `v`.
    pub case2: bool,
    /// `−χ̄ > 0` and `(Q²)(L̄,v)Q(L̄,v) ≥ 0` for tangent `v`.
    pub case3: bool,
}

fn positive_definite(m: &Matrix2<f64>) -> bool {
    m[(0, 0)] > 0.0 && m.determinant() > 0.0
}

/// Sign of the symmetrized form `(u⊗v + v⊗u)/2` on the tangent plane, up to a
/// rounding allowance: `−1` if negative semidefinite, `1` if positive, `0` otherwise.
fn semidefinite_sign(u: &Vector2<f64>, v: &Vector2<f64>, sigma_inv: &Matrix2<f64>) -> i8 {
    let b = (u * v.transpose() + v * u.transpose()) * 0.5;
    // Eigenvalues of σ⁻¹B.
    let m = sigma_inv * b;
    let (tr, det) = (m.trace(), m.determinant());
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let (lo, hi) = (0.5 * tr - disc, 0.5 * tr + disc);
    let tol = 1e-12 * (u.norm() * v.norm()).max(f64::MIN_POSITIVE) * sigma_inv.norm();
    if hi <= tol {
        -1
    } else if lo >= -tol {
        1
    } else {
        0
    }
}

pub fn lemma_hypotheses(field: &NullFrameField) -> LemmaHypotheses {
    let amb = field.mesh.ambient;
    let mut out = LemmaHypotheses {
        q_llbar_negative: Vec::new(),
        min_q_llbar: f64::INFINITY,
        case1: true,
        case2: true,
        case3: true,
    };
    for (i, (pg, nf)) in field.mesh.nodes.iter().zip(&field.nodes).enumerate() {
        out.min_q_llbar = out.min_q_llbar.min(nf.q_llbar);
        if nf.q_llbar < 0.0 {
            out.q_llbar_negative.push(i);
        }
        let q = amb.q(&pg.x);
        let q2 = q * pg.g_inv * q;
        let q2_along = |nvec: &Vector4<f64>| Vector2::from_fn(|a, _| (q2 * pg.tangents[a]).dot(nvec));
        if out.case2 {
            let ok = positive_definite(&nf.frame.chi)
                && semidefinite_sign(&q2_along(&nf.frame.l), &nf.q_l, &pg.sigma_inv) == -1;
            out.case2 = ok;
        }
        if out.case3 {
            let ok = positive_definite(&(-nf.frame.chibar))
                && semidefinite_sign(&q2_along(&nf.frame.lbar), &nf.q_lbar, &pg.sigma_inv) == 1;
            out.case3 = ok;
        }
    }
    out.case1 = out.q_llbar_negative.is_empty();
    out
}

/// Integral inequality for `P_{k,0}` or `P_{0,k}` in Schwarzschild. Not applicable
/// when the lemma hypotheses fail (no hypothesis is needed for `k = 1`).
pub fn schwarzschild_inequalities(
    field: &NullFrameField,
    k: usize,
    mode: SchwarzschildMode,
) -> Result<IdentityReport> {
    schwarzschild_mass(&field.mesh.ambient)?;
    let n = field.mesh.ambient.family.n();
    if k < 1 || k >= n {
        return Err(GeomError::Precondition(format!("need 1 ≤ k ≤ {}, got {k}", n - 1)));
    }
    let c = k as f64 / (2.0 * (n - k) as f64);
    let (time, qterm, id) = match mode {
        SchwarzschildMode::L => (
            integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (k - 1, 0))? * nf.dt_l))?,
            c * integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (k, 0))? * nf.q_llbar))?,
            "schwarzschild-inequality[l]",
        ),
        SchwarzschildMode::Lbar => (
            integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (0, k - 1))? * nf.dt_lbar))?,
            -c * integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, (0, k))? * nf.q_llbar))?,
            "schwarzschild-inequality[lbar]",
        ),
    };
    let mut rep = IdentityReport::for_field(
        format!("{id}(k={k})"),
        Relation::Inequality,
        field,
        vec![
            Term::new("int P_(k-1) <N,dt>", time),
            Term::new("+- k/(2(n-k)) int P_k Q(L,Lbar)", qterm),
        ],
        vec![],
    );
    let hyp = lemma_hypotheses(field);
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    rep.diagnostics.push(Term::new("hypothesis (1)", flag(hyp.case1)));
    rep.diagnostics.push(Term::new("hypothesis (2)", flag(hyp.case2)));
    rep.diagnostics.push(Term::new("hypothesis (3)", flag(hyp.case3)));
    rep.diagnostics.push(Term::new("min Q(L,Lbar)", hyp.min_q_llbar));
    torsion_warning(&mut rep, field);
    if !hyp.case1 {
        rep.warnings.push(format!(
            "Q(L,Lbar) < 0 at {} nodes: {}",
            hyp.q_llbar_negative.len(),
            node_list(&field.mesh, &hyp.q_llbar_negative)
        ));
    }
    let applicable = k == 1
        || match mode {
            SchwarzschildMode::L => hyp.case1 || hyp.case2,
            SchwarzschildMode::Lbar => hyp.case1 || hyp.case3,
        };
    if !applicable {
        return Ok(rep.not_applicable("hypotheses of the divergence-structure lemma fail"));
    }
    Ok(rep)
}
