//! Run configuration: parsing, validation and hashing. The schema is documented in
//! `docs/config.md`; every table rejects unknown keys.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nullgeom::harmonics::SphereField;
use nullgeom::quadrature::SphereGrid;
use nullgeom::spacetime::{Family, StaticFamily};
use nullgeom::surface::{
    read_tabulated, Ambient, BoostedSphere, ConeSection, Ellipsoid, Gauge, Immersion, Spectral,
    StarShaped,
};
use nullgeom::verify::{HkDirection, MinkowskiVariant, SchwarzschildMode};

use crate::CliError;

/// A spherical harmonic mode `(l, m, amplitude)`.
pub type Mode = (usize, i64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub tol_scale: f64,
    /// Not part of the hash: where results go does not change them.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub spacetime: SpacetimeConfig,
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub gauge: GaugeConfig,
    /// `[n_theta, n_phi]` pairs, coarse to fine.
    pub resolutions: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stencil_step: Option<f64>,
    /// Relative tolerance for every identity of the scenario, before `tol_scale`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(rename = "identity")]
    pub identities: Vec<IdentityConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Minkowski,
    DeSitter,
    AntiDeSitter,
    Schwarzschild,
    CustomF,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeConfig {
    pub family: FamilyKind,
    /// Spatial dimension; surfaces need `n = 3`.
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Sphere,
    SliceGraph,
    TiltedGraph,
    RandomGraph,
    Ellipsoid,
    BoostedSphere,
    ConeSection,
    OffCentreSphere,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub family: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Relative radius modes `ρ = r₀(1 + Σ ε Y_lm)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<Mode>,
    /// Time modes `t = t₀ + Σ τ Y_lm`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub time_modes: Vec<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eccentricity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centre: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_time: Option<f64>,
    /// Total relative amplitude of the random radius modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Bound on the random time modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Grid a tabulated surface is sampled on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    #[default]
    Slice,
    MeanCurvature,
    Cone,
    Rescaled,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    #[serde(default)]
    pub kind: GaugeKind,
    /// Degree of the cone-gauge fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<usize>,
    /// `log a = constant + Σ c Y_lm` for the rescaled gauge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityKind {
    Quadrature,
    MinkowskiK1,
    MinkowskiK1Reduced,
    MinkowskiRs,
    ClassicalMinkowski,
    ClassicalRecovery,
    BrendleHk,
    BrendleEichmair,
    HeintzeKarcher,
    NewtonMaclaurin,
    AlexandrovSandwich,
    TheoremF,
    Flux,
    FluxSpread,
    Divergence,
    SchwarzschildInequality,
    Flow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    pub kind: IdentityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<MinkowskiVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SchwarzschildMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<HkDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds: Option<f64>,
    /// Coarsest step of the flow's step-refinement study; the study covers the same
    /// affine length as the flow.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_ds: Option<f64>,
    /// Declared convergence order, checked by `convergence`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Further surfaces for `flux-spread`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surfaces: Vec<SurfaceConfig>,
}

fn invalid(scenario: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("scenario {scenario:?}: {msg}"))
}

/// Rejects every set field outside `allowed`.
fn only(scenario: &str, what: &str, set: &[(&str, bool)], allowed: &[&str]) -> Result<(), CliError> {
    for (name, present) in set {
        if *present && !allowed.contains(name) {
            return Err(invalid(scenario, format!("{what} does not take `{name}`")));
        }
    }
    Ok(())
}

fn require<T: Copy>(scenario: &str, what: &str, name: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(scenario, format!("{what} needs `{name}`")))
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Checks everything that can be checked without building a mesh.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(CliError::Config(format!("tol_scale must be positive, got {}", self.tol_scale)));
        }
        if self.scenarios.is_empty() {
            return Err(CliError::Config("no [[scenario]] given".into()));
        }
        let mut names = BTreeSet::new();
        for sc in &self.scenarios {
            if !names.insert(sc.name.as_str()) {
                return Err(invalid(&sc.name, "duplicate scenario name"));
            }
            sc.validate(&self.base_dir, self.seed)?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, plus the bytes of tabulated inputs.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serializes"));
        for sc in &self.scenarios {
            let surfaces = std::iter::once(&sc.surface).chain(sc.identities.iter().flat_map(|i| &i.surfaces));
            for s in surfaces {
                if let Some(p) = &s.path {
                    if let Ok(bytes) = std::fs::read(self.base_dir.join(p)) {
                        h.update(&bytes);
                    }
                }
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl ScenarioConfig {
    fn validate(&self, base_dir: &Path, seed: u64) -> Result<(), CliError> {
        let name = &self.name;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(invalid(name, "names use letters, digits, '-' and '_' only"));
        }
        let amb = self.spacetime.ambient(name)?;
        if self.resolutions.is_empty() {
            return Err(invalid(name, "no resolutions given"));
        }
        for &[nt, np] in &self.resolutions {
            if nt < 4 || np < 2 * nt {
                return Err(invalid(name, format!("resolution {nt}x{np} needs n_theta ≥ 4 and n_phi ≥ 2 n_theta")));
            }
        }
        if let Some(h) = self.stencil_step {
            if !(h > 0.0 && h < 0.5) {
                return Err(invalid(name, format!("stencil_step {h} outside (0, 0.5)")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid(name, "tolerance must be positive"));
            }
        }
        self.surface.immersion(name, &amb, 8, 16, base_dir, seed)?;
        self.gauge.gauge(name)?;
        if self.identities.is_empty() {
            return Err(invalid(name, "no [[scenario.identity]] given"));
        }
        for id in &self.identities {
            id.validate(name)?;
            for s in &id.surfaces {
                s.immersion(name, &amb, 8, 16, base_dir, seed)?;
            }
        }
        Ok(())
    }
}

impl SpacetimeConfig {
    pub fn ambient(&self, scenario: &str) -> Result<Ambient, CliError> {
        let set = [
            ("m", self.m.is_some()),
            ("kappa", self.kappa.is_some()),
            ("amplitude", self.amplitude.is_some()),
            ("center", self.center.is_some()),
            ("width", self.width.is_some()),
        ];
        let what = "spacetime";
        let family = match self.family {
            FamilyKind::Minkowski => {
                only(scenario, what, &set, &[])?;
                Family::Minkowski
            }
            FamilyKind::DeSitter => {
                only(scenario, what, &set, &["kappa"])?;
                Family::Desitter {
                    kappa: require(scenario, what, "kappa", self.kappa)?,
                }
            }
            FamilyKind::AntiDeSitter => {
                only(scenario, what, &set, &["kappa"])?;
                Family::Antidesitter {
                    kappa: require(scenario, what, "kappa", self.kappa)?,
                }
            }
            FamilyKind::Schwarzschild => {
                only(scenario, what, &set, &["m"])?;
                Family::Schwarzschild {
                    m: require(scenario, what, "m", self.m)?,
                }
            }
            FamilyKind::CustomF => Family::CustomF {
                kappa: self.kappa.unwrap_or(0.0),
                m: self.m.unwrap_or(0.0),
                amplitude: self.amplitude.unwrap_or(0.0),
                center: self.center.unwrap_or(0.0),
                width: self.width.unwrap_or(1.0),
            },
        };
        let fam = StaticFamily::new(self.n, family).map_err(|e| invalid(scenario, e))?;
        Ambient::new(fam).map_err(|e| invalid(scenario, e))
    }
}

impl SurfaceConfig {
    /// The immersion; spectral families are fitted on the `nt × np` grid.
    pub fn immersion(
        &self,
        scenario: &str,
        amb: &Ambient,
        nt: usize,
        np: usize,
        base_dir: &Path,
        seed: u64,
    ) -> Result<Arc<dyn Immersion>, CliError> {
        let set = [
            ("t0", self.t0.is_some()),
            ("r0", self.r0.is_some()),
            ("modes", !self.modes.is_empty()),
            ("time_modes", !self.time_modes.is_empty()),
            ("eccentricity", self.eccentricity.is_some()),
            ("beta", self.beta.is_some()),
            ("centre", self.centre.is_some()),
            ("vertex_time", self.vertex_time.is_some()),
            ("epsilon", self.epsilon.is_some()),
            ("time_amplitude", self.time_amplitude.is_some()),
            ("path", self.path.is_some()),
            ("grid", self.grid.is_some()),
        ];
        let what = "surface";
        let t0 = self.t0.unwrap_or(0.0);
        let r0 = || -> Result<f64, CliError> {
            let r = require(scenario, what, "r0", self.r0)?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid(scenario, format!("r0 must be positive, got {r}")));
            }
            Ok(r)
        };
        let geom = |e: nullgeom::GeomError| invalid(scenario, e);
        let imm: Arc<dyn Immersion> = match self.family {
            SurfaceKind::Sphere => {
                only(scenario, what, &set, &["t0", "r0"])?;
                Arc::new(StarShaped::sphere(t0, r0()?))
            }
            SurfaceKind::SliceGraph => {
                only(scenario, what, &set, &["t0", "r0", "modes"])?;
                Arc::new(StarShaped::slice_graph(t0, r0()?, &self.modes).map_err(geom)?)
            }
            SurfaceKind::TiltedGraph => {
                only(scenario, what, &set, &["t0", "r0", "modes", "time_modes"])?;
                Arc::new(StarShaped::tilted_graph(t0, &self.time_modes, r0()?, &self.modes).map_err(geom)?)
            }
            SurfaceKind::RandomGraph => {
                only(scenario, what, &set, &["t0", "r0", "epsilon", "time_amplitude"])?;
                let eps = require(scenario, what, "epsilon", self.epsilon)?;
                let tau = self.time_amplitude.unwrap_or(0.0);
                if !(0.0..1.0).contains(&eps) || !(tau >= 0.0) {
                    return Err(invalid(scenario, "epsilon must lie in [0, 1) and time_amplitude be ≥ 0"));
                }
                let (time, radius) = random_modes(seed, eps, tau);
                Arc::new(StarShaped::tilted_graph(t0, &time, r0()?, &radius).map_err(geom)?)
            }
            SurfaceKind::Ellipsoid => {
                only(scenario, what, &set, &["t0", "r0", "eccentricity"])?;
                let e = require(scenario, what, "eccentricity", self.eccentricity)?;
                Arc::new(Ellipsoid::with_eccentricity(t0, r0()?, e).map_err(geom)?)
            }
            SurfaceKind::BoostedSphere => {
                only(scenario, what, &set, &["t0", "r0", "beta"])?;
                let beta = require(scenario, what, "beta", self.beta)?;
                if !(beta.abs() < 1.0) {
                    return Err(invalid(scenario, format!("boost velocity {beta} must satisfy |beta| < 1")));
                }
                Arc::new(BoostedSphere {
                    t0,
                    radius: r0()?,
                    beta,
                })
            }
            SurfaceKind::ConeSection => {
                only(scenario, what, &set, &["vertex_time", "r0", "modes"])?;
                let vt = require(scenario, what, "vertex_time", self.vertex_time)?;
                Arc::new(ConeSection::new(amb.family, vt, r0()?, &self.modes).map_err(geom)?)
            }
            SurfaceKind::OffCentreSphere => {
                only(scenario, what, &set, &["t0", "r0", "centre"])?;
                let c = require(scenario, what, "centre", self.centre)?;
                let rho = r0()?;
                let grid = SphereGrid::new(nt, np).map_err(geom)?;
                let samples: Vec<[f64; 4]> = (0..grid.len())
                    .map(|i| {
                        let u = grid.unit(i);
                        [t0, c[0] + rho * u[0], c[1] + rho * u[1], c[2] + rho * u[2]]
                    })
                    .collect();
                Arc::new(Spectral::fit(&grid, &samples, "off-centre-sphere").map_err(geom)?)
            }
            SurfaceKind::Tabulated => {
                only(scenario, what, &set, &["path", "grid"])?;
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| invalid(scenario, "surface needs `path`"))?;
                let [gt, gp] = require(scenario, what, "grid", self.grid)?;
                let grid = SphereGrid::new(gt, gp).map_err(geom)?;
                Arc::new(read_tabulated(&base_dir.join(path), &grid).map_err(geom)?)
            }
        };
        Ok(imm)
    }
}

/// Radius modes of degree 2..=4 with total amplitude below `eps`, and time modes of
/// degree 1..=2 bounded by `tau`, drawn from `seed`.
fn random_modes(seed: u64, eps: f64, tau: f64) -> (Vec<Mode>, Vec<Mode>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize, degrees: std::ops::RangeInclusive<usize>, amp: f64| -> Vec<Mode> {
        (0..count)
            .map(|_| {
                let l = rng.gen_range(degrees.clone());
                let m = rng.gen_range(-(l as i64)..=l as i64);
                let a = if amp > 0.0 { rng.gen_range(-amp..amp) } else { 0.0 };
                (l, m, a)
            })
            .collect()
    };
    let radius = draw(3, 2..=4, eps / 3.0);
    let time = draw(2, 1..=2, tau);
    (time, radius)
}

impl GaugeConfig {
    pub fn gauge(&self, scenario: &str) -> Result<Gauge, CliError> {
        let set = [
            ("lmax", self.lmax.is_some()),
            ("constant", self.constant.is_some()),
            ("modes", !self.modes.is_empty()),
        ];
        let what = "gauge";
        Ok(match self.kind {
            GaugeKind::Slice => {
                only(scenario, what, &set, &[])?;
                Gauge::Slice
            }
            GaugeKind::MeanCurvature => {
                only(scenario, what, &set, &[])?;
                Gauge::MeanCurvature
            }
            GaugeKind::Cone => {
                only(scenario, what, &set, &["lmax"])?;
                Gauge::Cone {
                    lmax: require(scenario, what, "lmax", self.lmax)?,
                }
            }
            GaugeKind::Rescaled => {
                only(scenario, what, &set, &["constant", "modes"])?;
                let f = SphereField::from_modes(self.constant.unwrap_or(0.0), &self.modes)
                    .map_err(|e| invalid(scenario, e))?;
                Gauge::Rescaled(f)
            }
        })
    }
}

impl IdentityConfig {
    fn validate(&self, scenario: &str) -> Result<(), CliError> {
        let set = [
            ("r", self.r.is_some()),
            ("s", self.s.is_some()),
            ("k", self.k.is_some()),
            ("variant", self.variant.is_some()),
            ("mode", self.mode.is_some()),
            ("direction", self.direction.is_some()),
            ("steps", self.steps.is_some()),
            ("ds", self.ds.is_some()),
            ("refine_ds", self.refine_ds.is_some()),
            ("surfaces", !self.surfaces.is_empty()),
        ];
        let what = format!("identity {}", self.kind_name());
        let allowed: &[&str] = match self.kind {
            IdentityKind::Quadrature
            | IdentityKind::MinkowskiK1
            | IdentityKind::MinkowskiK1Reduced
            | IdentityKind::BrendleHk
            | IdentityKind::TheoremF
            | IdentityKind::Flux => &[],
            IdentityKind::MinkowskiRs => &["r", "s", "variant"],
            IdentityKind::ClassicalMinkowski | IdentityKind::ClassicalRecovery | IdentityKind::BrendleEichmair => {
                &["k"]
            }
            IdentityKind::HeintzeKarcher => &["direction"],
            IdentityKind::NewtonMaclaurin | IdentityKind::AlexandrovSandwich | IdentityKind::Divergence => {
                &["r", "s"]
            }
            IdentityKind::SchwarzschildInequality => &["k", "mode"],
            IdentityKind::FluxSpread => &["surfaces"],
            IdentityKind::Flow => &["steps", "ds", "refine_ds"],
        };
        only(scenario, &what, &set, allowed)?;
        for name in allowed {
            let needed = match *name {
                "r" => self.r.is_none(),
                "s" => self.s.is_none(),
                "k" => self.k.is_none(),
                "variant" => self.variant.is_none(),
                "mode" => self.mode.is_none(),
                "direction" => self.direction.is_none(),
                "surfaces" => self.surfaces.is_empty(),
                _ => false,
            };
            if needed {
                return Err(invalid(scenario, format!("{what} needs `{name}`")));
            }
        }
        for ds in [self.ds, self.refine_ds].into_iter().flatten() {
            if !(ds > 0.0 && ds.is_finite()) {
                return Err(invalid(scenario, format!("{what}: steps must be positive")));
            }
        }
        if self.kind == IdentityKind::Flow && self.steps.is_some_and(|n| n < 4) {
            return Err(invalid(scenario, format!("{what}: the rate checks need steps ≥ 4")));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid(scenario, format!("{what}: tolerance must be positive")));
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> String {
        serde_json::to_value(self.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }
}
