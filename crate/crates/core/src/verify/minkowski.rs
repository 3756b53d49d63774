//! Minkowski-type integral formulae for the conformal Killing–Yano form `Q = r dr∧dt`.

use serde::{Deserialize, Serialize};

use super::{torsion_warning, IdentityReport, Relation, Term};
use crate::error::{GeomError, Result};
use crate::surface::{bilinear, NodeFrame, NullFrameField, PointGeometry};
use crate::symfunc::mixed_p;

/// `(∂_t)` enters through `ξ = div Q = −n ∂_t`.
fn spatial_dim(field: &NullFrameField) -> f64 {
    field.mesh.ambient.family.n() as f64
}

/// First Minkowski formula for an arbitrary null normal:
/// `−(n−1)∫⟨∂_t, L̄⟩ + ∫Q(H, L̄) + ∫Q(∂_a, (D^a L̄)^⊥) = 0`, with `(D_a L̄)^⊥ = ζ_a L̄`.
pub fn minkowski_k1(field: &NullFrameField) -> Result<IdentityReport> {
    let n = spatial_dim(field);
    let amb = field.mesh.ambient;
    let time = field.integrate(|_, _, nf| -(n - 1.0) * nf.dt_lbar)?;
    let mean = field.integrate(|_, pg, nf| (amb.q(&pg.x) * nf.frame.lbar).dot(&pg.h))?;
    let torsion = field.integrate(|_, pg, nf| {
        let z = pg.sigma_inv * nf.frame.zeta;
        -(z[0] * nf.q_lbar[0] + z[1] * nf.q_lbar[1])
    })?;
    let mut rep = IdentityReport::for_field(
        "minkowski-k1",
        Relation::Identity,
        field,
        vec![
            Term::new("-(n-1) int <dt,Lbar>", time),
            Term::new("int Q(H,Lbar)", mean),
            Term::new("int Q(e_a,(D^a Lbar)^perp)", torsion),
        ],
        vec![],
    );
    rep.diagnostics.push(Term::new("max torsion", field.max_torsion()));
    Ok(rep)
}

/// Torsion-free form `−(n−1)∫⟨∂_t, L̄⟩ − ½∫⟨H, L̄⟩Q(L, L̄) = 0`.
pub fn minkowski_k1_reduced(field: &NullFrameField) -> Result<IdentityReport> {
    let n = spatial_dim(field);
    let time = field.integrate(|_, _, nf| -(n - 1.0) * nf.dt_lbar)?;
    let mean = field.integrate(|_, _, nf| -0.5 * nf.h_lbar * nf.q_llbar)?;
    let mut rep = IdentityReport::for_field(
        "minkowski-k1-reduced",
        Relation::Identity,
        field,
        vec![
            Term::new("-(n-1) int <dt,Lbar>", time),
            Term::new("-1/2 int <H,Lbar> Q(L,Lbar)", mean),
        ],
        vec![],
    );
    torsion_warning(&mut rep, field);
    Ok(rep)
}

/// Which of the four higher-order formulae to evaluate; `c = (r+s)/(n−r−s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinkowskiVariant {
    /// `2∫P_{r−1,s}⟨L,∂_t⟩ + c∫P_{r,s}Q(L,L̄) = 0`, `r ≥ 1`.
    L,
    /// `2∫P_{r,s−1}⟨L̄,∂_t⟩ − c∫P_{r,s}Q(L,L̄) = 0`, `s ≥ 1`.
    Lbar,
    /// `2∫P_{r−1,s}⟨L̄,∂_t⟩ − c∫P_{r−1,s+1}Q(L,L̄) = 0`, `r ≥ 1`.
    MixedLbar,
    /// `2∫P_{r,s−1}⟨L,∂_t⟩ + c∫P_{r+1,s−1}Q(L,L̄) = 0`, `s ≥ 1`.
    MixedL,
}

impl MinkowskiVariant {
    pub const ALL: [MinkowskiVariant; 4] = [Self::L, Self::Lbar, Self::MixedLbar, Self::MixedL];

    pub fn name(&self) -> &'static str {
        match self {
            Self::L => "l",
            Self::Lbar => "lbar",
            Self::MixedLbar => "mixed-lbar",
            Self::MixedL => "mixed-l",
        }
    }

    /// `(pair in the time term, uses L̄ in the time term, pair in the Q term, sign of the Q term)`.
    fn layout(&self, r: usize, s: usize) -> Option<((usize, usize), bool, (usize, usize), f64)> {
        match self {
            Self::L => (r >= 1).then(|| ((r - 1, s), false, (r, s), 1.0)),
            Self::Lbar => (s >= 1).then(|| ((r, s - 1), true, (r, s), -1.0)),
            Self::MixedLbar => (r >= 1).then(|| ((r - 1, s), true, (r - 1, s + 1), -1.0)),
            Self::MixedL => (s >= 1).then(|| ((r, s - 1), false, (r + 1, s - 1), 1.0)),
        }
    }
}

pub(crate) fn p_node(pg: &PointGeometry, nf: &NodeFrame, (r, s): (usize, usize)) -> Result<f64> {
    mixed_p(&bilinear(&pg.sigma), &bilinear(&nf.frame.chi), &bilinear(&nf.frame.chibar), r, s)
}

/// Integral of `f(i, pg, nf)` where `f` may fail.
pub(crate) fn integrate_fallible(
    field: &NullFrameField,
    f: impl Fn(&PointGeometry, &NodeFrame) -> Result<f64> + Sync,
) -> Result<f64> {
    let vals = (0..field.len())
        .map(|i| f(&field.mesh.nodes[i], &field.nodes[i]))
        .collect::<Result<Vec<f64>>>()?;
    field.mesh.integrate(&vals)
}

/// Higher-order formula for the mixed mean curvatures `P_{r,s}` in a spacetime of
/// constant curvature. The torsion-free hypothesis is checked and reported, not enforced.
pub fn minkowski_rs(field: &NullFrameField, r: usize, s: usize, variant: MinkowskiVariant) -> Result<IdentityReport> {
    let amb = field.mesh.ambient;
    if !amb.family.is_constant_curvature() {
        return Err(GeomError::Precondition(
            "higher-order Minkowski formulae need a spacetime of constant curvature".into(),
        ));
    }
    let n = amb.family.n();
    if r + s < 1 || r + s >= n {
        return Err(GeomError::Precondition(format!(
            "need 1 ≤ r + s ≤ {}, got (r, s) = ({r}, {s})",
            n - 1
        )));
    }
    let (time_pair, use_lbar, q_pair, sign) = variant.layout(r, s).ok_or_else(|| {
        GeomError::Precondition(format!(
            "variant {} undefined for (r, s) = ({r}, {s})",
            variant.name()
        ))
    })?;
    let c = (r + s) as f64 / (n - r - s) as f64;
    let time = 2.0
        * integrate_fallible(field, |pg, nf| {
            let dt = if use_lbar { nf.dt_lbar } else { nf.dt_l };
            Ok(p_node(pg, nf, time_pair)? * dt)
        })?;
    let qterm = sign * c * integrate_fallible(field, |pg, nf| Ok(p_node(pg, nf, q_pair)? * nf.q_llbar))?;
    let dt_name = if use_lbar { "Lbar" } else { "L" };
    let mut rep = IdentityReport::for_field(
        format!("minkowski-rs[{}](r={r},s={s})", variant.name()),
        Relation::Identity,
        field,
        vec![
            Term::new(format!("2 int P_{:?} <{dt_name},dt>", time_pair), time),
            Term::new(format!("{sign:+} c int P_{:?} Q(L,Lbar)", q_pair), qterm),
        ],
        vec![],
    );
    torsion_warning(&mut rep, field);
    Ok(rep)
}
