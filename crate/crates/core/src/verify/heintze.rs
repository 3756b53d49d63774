//! Spacetime Heintze–Karcher inequalities and the equality chains built on them.

use serde::{Deserialize, Serialize};

use super::minkowski::{integrate_fallible, p_node};
use super::{node_list, torsion_warning, IdentityReport, Relation, Term};
use crate::error::{GeomError, Result};
use crate::surface::{bilinear, NodeFrame, NullFrameField};
use crate::symfunc::newton_maclaurin_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HkDirection {
    /// `−(n−1)∫⟨∂_t,L̄⟩/⟨H,L̄⟩ − ½∫Q(L,L̄) ≥ 0`, needs `⟨H,L̄⟩ > 0`.
    FutureIncoming,
    /// `(n−1)∫⟨∂_t,L⟩/⟨H,L⟩ − ½∫Q(L,L̄) ≥ 0`, needs `⟨H,L⟩ < 0`.
    PastIncoming,
}

impl HkDirection {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FutureIncoming => "future-incoming",
            Self::PastIncoming => "past-incoming",
        }
    }
}

/// Value of the Heintze–Karcher functional; the equality flag marks surfaces in a
/// shear-free incoming null hypersurface.
pub fn heintze_karcher(field: &NullFrameField, direction: HkDirection) -> Result<IdentityReport> {
    let n = field.mesh.ambient.family.n() as f64;
    let bad: Vec<usize> = (0..field.len())
        .filter(|&i| {
            let nf = &field.nodes[i];
            match direction {
                HkDirection::FutureIncoming => !(nf.h_lbar > 0.0),
                HkDirection::PastIncoming => !(nf.h_l < 0.0),
            }
        })
        .collect();
    if !bad.is_empty() {
        let what = match direction {
            HkDirection::FutureIncoming => "<H,Lbar> > 0",
            HkDirection::PastIncoming => "<H,L> < 0",
        };
        return Err(GeomError::Precondition(format!(
            "{what} fails at nodes {}",
            node_list(&field.mesh, &bad)
        )));
    }
    let ratio = match direction {
        HkDirection::FutureIncoming => field.integrate(|_, _, nf| -(n - 1.0) * nf.dt_lbar / nf.h_lbar)?,
        HkDirection::PastIncoming => field.integrate(|_, _, nf| (n - 1.0) * nf.dt_l / nf.h_l)?,
    };
    let q = field.integrate(|_, _, nf| 0.5 * nf.q_llbar)?;
    let mut rep = IdentityReport::for_field(
        format!("heintze-karcher[{}]", direction.name()),
        Relation::Inequality,
        field,
        vec![Term::new("(n-1) int <dt,N>/<H,N>", ratio)],
        vec![Term::new("1/2 int Q(L,Lbar)", q)],
    );
    // Both expansions are recorded, so constant-expansion regimes of either sign can
    // be read off the report.
    let expansions: [(&str, fn(&NodeFrame) -> f64); 2] = [("<H,Lbar>", |nf| nf.h_lbar), ("<H,L>", |nf| nf.h_l)];
    for (name, get) in expansions {
        let (lo, hi) = field
            .nodes
            .iter()
            .map(get)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        rep.diagnostics.push(Term::new(format!("min {name}"), lo));
        rep.diagnostics.push(Term::new(format!("max {name}"), hi));
    }
    Ok(rep)
}

/// Newton–MacLaurin inequality for `P_{r,s}` at every node. The residual is the
/// smallest relative gap, so the scale is 1.
pub fn newton_maclaurin_chain(field: &NullFrameField, r: usize, s: usize) -> Result<IdentityReport> {
    let n = field.mesh.ambient.family.n();
    let mut worst = f64::INFINITY;
    let mut largest = 0.0_f64;
    for (pg, nf) in field.mesh.nodes.iter().zip(&field.nodes) {
        // The gaps are invariant under χ̄ → −χ̄; use the orientation lying in the cone.
        let chibar = if (pg.sigma_inv * nf.frame.chibar).trace() < 0.0 {
            -nf.frame.chibar
        } else {
            nf.frame.chibar
        };
        let gap = newton_maclaurin_check(
            &bilinear(&pg.sigma),
            &bilinear(&nf.frame.chi),
            &bilinear(&chibar),
            r,
            s,
            n,
        )?;
        let rel = gap.gap / gap.scale.max(f64::MIN_POSITIVE);
        worst = worst.min(rel);
        largest = largest.max(rel.abs());
    }
    let mut rep = IdentityReport::explicit(
        format!("newton-maclaurin-chain(r={r},s={s})"),
        Relation::Inequality,
        &field.mesh,
        field.gauge.name(),
        worst,
        1.0,
    );
    rep.lhs = vec![Term::new("min relative gap", worst)];
    Ok(rep.with_equality_measure(largest))
}

/// The chain `½∫Q = A ≥ B ≥ ½∫Q` behind the rigidity of constant `P_{r,s}`:
/// `A = −(n−r−s)/(r+s)·∫(P_{r−1,s}/P_{r,s})⟨L,∂_t⟩` (equal to `½∫Q` by the Minkowski
/// formula when `P_{r,s}` is constant), `B = (n−1)∫⟨L,∂_t⟩/⟨H,L⟩`. The first step is
/// the algebraic lemma, the second the past Heintze–Karcher inequality. The residual
/// is the smaller of the two gaps; equality means both are tight.
pub fn alexandrov_sandwich(field: &NullFrameField, r: usize, s: usize) -> Result<IdentityReport> {
    let n = field.mesh.ambient.family.n();
    if r == 0 || r + s >= n {
        return Err(GeomError::Precondition(format!(
            "need r ≥ 1 and r + s ≤ {}, got (r, s) = ({r}, {s})",
            n - 1
        )));
    }
    let k = (r + s) as f64;
    let nf_ = n as f64;
    let a = -(nf_ - k) / k
        * integrate_fallible(field, |pg, nf| {
            Ok(p_node(pg, nf, (r - 1, s))? / p_node(pg, nf, (r, s))? * nf.dt_l)
        })?;
    let b = field.integrate(|_, _, nf| (nf_ - 1.0) * nf.dt_l / nf.h_l)?;
    let c = field.integrate(|_, _, nf| 0.5 * nf.q_llbar)?;
    let (g1, g2) = (a - b, b - c);
    let mut rep = IdentityReport::explicit(
        format!("alexandrov-sandwich(r={r},s={s})"),
        Relation::Inequality,
        &field.mesh,
        field.gauge.name(),
        g1.min(g2),
        a.abs() + b.abs() + c.abs(),
    );
    rep.lhs = vec![
        Term::new("A = -(n-r-s)/(r+s) int P_{r-1,s}/P_{r,s} <L,dt>", a),
        Term::new("B = (n-1) int <L,dt>/<H,L>", b),
    ];
    rep.rhs = vec![Term::new("1/2 int Q(L,Lbar)", c)];
    rep.diagnostics.push(Term::new("A - B", g1));
    rep.diagnostics.push(Term::new("B - 1/2 int Q", g2));
    rep.diagnostics.push(Term::new("A - 1/2 int Q", a - c));
    let p: Vec<f64> = (0..field.len())
        .map(|i| p_node(&field.mesh.nodes[i], &field.nodes[i], (r, s)))
        .collect::<Result<_>>()?;
    let pmax = p.iter().copied().fold(f64::MIN, f64::max);
    let pmin = p.iter().copied().fold(f64::MAX, f64::min);
    rep.diagnostics.push(Term::new("P_{r,s} relative spread", (pmax - pmin) / pmax.abs().max(pmin.abs())));
    torsion_warning(&mut rep, field);
    let measure = g1.abs().max(g2.abs()) / rep.scale.max(f64::MIN_POSITIVE);
    Ok(rep.with_equality_measure(measure))
}
