//! Integral identities and inequalities evaluated on a frame field, each returning
//! an [`IdentityReport`].
//!
//! Identities report `Σ lhs − Σ rhs` as the residual. Inequalities are written as
//! `Σ lhs − Σ rhs ≥ 0` and report that signed value in the same field.

mod heintze;
mod minkowski;
mod schwarzschild;
mod slice;

use serde::{Deserialize, Serialize};

pub use heintze::{alexandrov_sandwich, heintze_karcher, newton_maclaurin_chain, HkDirection};
pub use minkowski::{minkowski_k1, minkowski_k1_reduced, minkowski_rs, MinkowskiVariant};
pub use schwarzschild::{
    divergence_check, flux_invariant, flux_report, flux_spread, lemma_hypotheses, schwarzschild_inequalities,
    theorem_f, LemmaHypotheses, SchwarzschildMode,
};
pub use slice::{
    brendle_eichmair, brendle_slice_hk, classical_minkowski, classical_recovery, SliceGeometry,
};

use crate::error::GeomError;
use crate::spacetime::Family;
use crate::surface::{Ambient, NullFrameField, SurfaceMesh};

/// Above this `max |ζ|_σ` a surface is not treated as torsion-free.
pub const TORSION_THRESHOLD: f64 = 1e-8;

/// Relative tolerance by resolution: `1e−5` below 128 latitude nodes, `1e−7` from there on.
pub fn default_tolerance(n_theta: usize) -> f64 {
    if n_theta >= 128 {
        1e-7
    } else {
        1e-5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

impl Term {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `residual = 0`.
    Identity,
    /// `residual ≥ 0`.
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub surface: String,
    pub spacetime: String,
    pub gauge: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub relation: Relation,
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
    pub residual: f64,
    /// Natural size of the compared quantities, usually `Σ |term|`.
    pub scale: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// For inequalities: whether the equality case is detected.
    pub equality: Option<bool>,
    /// Relative measure compared with the tolerance for the equality flag, when the
    /// equality case is not simply `|residual| ≤ tolerance·scale`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equality_measure: Option<f64>,
    pub resolution: [usize; 2],
    pub provenance: Provenance,
    /// Auxiliary numbers, e.g. hypothesis margins.
    pub diagnostics: Vec<Term>,
    pub warnings: Vec<String>,
    pub config_hash: Option<String>,
}

impl IdentityReport {
    fn base(id: impl Into<String>, relation: Relation, mesh: &SurfaceMesh, gauge: &str) -> Self {
        let (nt, np) = mesh.resolution();
        Self {
            id: id.into(),
            relation,
            lhs: Vec::new(),
            rhs: Vec::new(),
            residual: 0.0,
            scale: 0.0,
            rel_residual: 0.0,
            tolerance: default_tolerance(nt),
            verdict: Verdict::Pass,
            equality: None,
            equality_measure: None,
            resolution: [nt, np],
            provenance: Provenance {
                surface: mesh.immersion.name(),
                spacetime: spacetime_label(&mesh.ambient),
                gauge: gauge.to_string(),
            },
            diagnostics: Vec::new(),
            warnings: Vec::new(),
            config_hash: None,
        }
    }

    /// `Σ lhs − Σ rhs` with scale `Σ |term|`.
    pub(crate) fn from_terms(
        id: impl Into<String>,
        relation: Relation,
        mesh: &SurfaceMesh,
        gauge: &str,
        lhs: Vec<Term>,
        rhs: Vec<Term>,
    ) -> Self {
        let mut rep = Self::base(id, relation, mesh, gauge);
        rep.residual = lhs.iter().map(|t| t.value).sum::<f64>() - rhs.iter().map(|t| t.value).sum::<f64>();
        rep.scale = lhs.iter().chain(&rhs).map(|t| t.value.abs()).sum();
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.finish()
    }

    /// A report whose residual and scale are computed by the caller.
    pub(crate) fn explicit(
        id: impl Into<String>,
        relation: Relation,
        mesh: &SurfaceMesh,
        gauge: &str,
        residual: f64,
        scale: f64,
    ) -> Self {
        let mut rep = Self::base(id, relation, mesh, gauge);
        rep.residual = residual;
        rep.scale = scale;
        rep.finish()
    }

    pub(crate) fn for_field(
        id: impl Into<String>,
        relation: Relation,
        field: &NullFrameField,
        lhs: Vec<Term>,
        rhs: Vec<Term>,
    ) -> Self {
        Self::from_terms(id, relation, &field.mesh, field.gauge.name(), lhs, rhs)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.finish()
    }

    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = Some(hash.into());
        self
    }

    /// Report for an identity that could not be evaluated. A failed precondition makes it
    /// not applicable, any other error a failure; the message becomes a warning.
    pub fn from_error(id: impl Into<String>, mesh: &SurfaceMesh, gauge: &str, err: &GeomError) -> Self {
        let rep = Self::base(id, Relation::Identity, mesh, gauge);
        match err {
            GeomError::Precondition(_) => rep.not_applicable(err.to_string()),
            _ => {
                let mut rep = rep;
                rep.warnings.push(err.to_string());
                rep.verdict = Verdict::Fail;
                rep
            }
        }
    }

    /// Marks the report not applicable; the residual is still recorded.
    pub fn not_applicable(mut self, reason: impl Into<String>) -> Self {
        self.warnings.push(reason.into());
        self.verdict = Verdict::NotApplicable;
        self
    }

    /// Sets the measure behind the equality flag and refreshes the verdict.
    pub(crate) fn with_equality_measure(mut self, measure: f64) -> Self {
        self.equality_measure = Some(measure);
        self.finish()
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn finish(mut self) -> Self {
        self.rel_residual = self.residual.abs() / self.scale.max(f64::MIN_POSITIVE);
        if self.verdict == Verdict::NotApplicable {
            return self;
        }
        let tol = self.tolerance * self.scale;
        let ok = match self.relation {
            Relation::Identity => self.residual.abs() <= tol,
            Relation::Inequality => {
                self.equality = Some(match self.equality_measure {
                    Some(m) => m <= self.tolerance,
                    None => self.residual.abs() <= tol,
                });
                self.residual >= -tol
            }
        };
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        self
    }
}

/// Quadrature alone: `∫_{S²} exp(u_x) dA = 4π sinh 1` with the mesh's parameter grid.
/// The integrand is not band-limited in φ, so the residual decays spectrally.
pub fn quadrature_check(mesh: &SurfaceMesh) -> IdentityReport {
    let values: Vec<f64> = (0..mesh.grid.len()).map(|i| mesh.grid.unit(i)[0].exp()).collect();
    let numeric = mesh.grid.integrate_round(&values);
    let exact = 4.0 * std::f64::consts::PI * 1f64.sinh();
    IdentityReport::from_terms(
        "quadrature",
        Relation::Identity,
        mesh,
        "none",
        vec![Term::new("int exp(u_x) dA", numeric)],
        vec![Term::new("4 pi sinh 1", exact)],
    )
}

/// Short, stable description of the ambient spacetime.
pub fn spacetime_label(amb: &Ambient) -> String {
    match amb.family.family() {
        Family::Minkowski => "minkowski".into(),
        Family::Desitter { kappa } => format!("de-sitter(kappa={kappa})"),
        Family::Antidesitter { kappa } => format!("anti-de-sitter(kappa={kappa})"),
        Family::Schwarzschild { m } => format!("schwarzschild(m={m})"),
        Family::CustomF {
            kappa,
            m,
            amplitude,
            center,
            width,
        } => format!("custom-f(kappa={kappa},m={m},a={amplitude},c={center},w={width})"),
    }
}

fn torsion_warning(rep: &mut IdentityReport, field: &NullFrameField) {
    let tor = field.max_torsion();
    rep.diagnostics.push(Term::new("max torsion", tor));
    if tor > TORSION_THRESHOLD {
        rep.warnings.push(format!(
            "torsion-free hypothesis violated: max |zeta| = {tor:.3e} > {TORSION_THRESHOLD:.0e}"
        ));
    }
}

/// `(θ, φ)` grid indices of the listed flat node indices, truncated for messages.
fn node_list(mesh: &SurfaceMesh, nodes: &[usize]) -> String {
    let shown: Vec<String> = nodes
        .iter()
        .take(8)
        .map(|&i| {
            let (j, k) = mesh.grid.unflatten(i);
            format!("({j}, {k})")
        })
        .collect();
    let more = if nodes.len() > 8 {
        format!(" and {} more", nodes.len() - 8)
    } else {
        String::new()
    };
    format!("{}{}", shown.join(", "), more)
}
