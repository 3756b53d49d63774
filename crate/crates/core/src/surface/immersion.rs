//! Immersions of the parameter sphere into the Cartesian-like chart.
//!
//! Every immersion is a map `u ↦ (t, x, y, z)` of the unit vector `u ∈ S²`. Written
//! on [`Jet2`]s it gives exact first and second derivatives in whatever chart the
//! caller parametrizes `u` with.

use std::fmt::Debug;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::harmonics::{analyze, max_degree, SphereField};
use crate::jet::Jet2;
use crate::quadrature::SphereGrid;
use crate::spacetime::StaticFamily;

pub trait Immersion: Send + Sync + Debug {
    /// Ambient point `(t, x, y, z)` over the unit vector `u`.
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4];

    fn name(&self) -> String;
}

/// `X(u) = (t(u), ρ(u)·u)`: spheres of symmetry, slice graphs and tilted graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarShaped {
    pub time: SphereField,
    pub radius: SphereField,
}

impl StarShaped {
    pub fn sphere(t0: f64, r0: f64) -> Self {
        Self {
            time: SphereField::constant(t0),
            radius: SphereField::constant(r0),
        }
    }

    /// `t = t₀`, `ρ = r₀(1 + Σ ε Y_lm)`.
    pub fn slice_graph(t0: f64, r0: f64, modes: &[(usize, i64, f64)]) -> Result<Self> {
        let scaled: Vec<_> = modes.iter().map(|&(l, m, e)| (l, m, r0 * e)).collect();
        Ok(Self {
            time: SphereField::constant(t0),
            radius: SphereField::from_modes(r0, &scaled)?,
        })
    }

    /// A graph whose time function varies: `t = t₀ + Σ τ Y_lm`.
    pub fn tilted_graph(
        t0: f64,
        time_modes: &[(usize, i64, f64)],
        r0: f64,
        radius_modes: &[(usize, i64, f64)],
    ) -> Result<Self> {
        let scaled: Vec<_> = radius_modes.iter().map(|&(l, m, e)| (l, m, r0 * e)).collect();
        Ok(Self {
            time: SphereField::from_modes(t0, time_modes)?,
            radius: SphereField::from_modes(r0, &scaled)?,
        })
    }
}

impl Immersion for StarShaped {
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4] {
        let v = SphereField::eval_many(&[&self.time, &self.radius], u);
        [v[0], v[1] * u[0], v[1] * u[1], v[1] * u[2]]
    }

    fn name(&self) -> String {
        "star-shaped".into()
    }
}

/// `(t₀, a u_x, b u_y, c u_z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub t0: f64,
    pub axes: [f64; 3],
}

impl Ellipsoid {
    /// Prolate spheroid with semi-axes `(b, b, a)`, `a = r₀` and eccentricity `e`.
    pub fn with_eccentricity(t0: f64, r0: f64, e: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&e) {
            return Err(GeomError::Config(format!("eccentricity {e} outside [0, 1)")));
        }
        let b = r0 * (1.0 - e * e).sqrt();
        Ok(Self {
            t0,
            axes: [b, b, r0],
        })
    }
}

impl Immersion for Ellipsoid {
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4] {
        [
            Jet2::constant(self.t0),
            u[0] * self.axes[0],
            u[1] * self.axes[1],
            u[2] * self.axes[2],
        ]
    }

    fn name(&self) -> String {
        "ellipsoid".into()
    }
}

/// A round sphere of radius `ρ` in a slice boosted along `z` with velocity `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostedSphere {
    pub t0: f64,
    pub radius: f64,
    pub beta: f64,
}

impl Immersion for BoostedSphere {
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4] {
        let gamma = 1.0 / (1.0 - self.beta * self.beta).sqrt();
        let r = self.radius;
        [
            u[2] * (gamma * self.beta * r) + self.t0,
            u[0] * r,
            u[1] * r,
            u[2] * (gamma * r),
        ]
    }

    fn name(&self) -> String {
        "boosted-sphere".into()
    }
}

/// Section `r = w(u)` of the incoming null hypersurface `t + r*(r) = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSection {
    pub family: StaticFamily,
    pub vertex_time: f64,
    pub w: SphereField,
}

impl ConeSection {
    pub fn new(family: StaticFamily, vertex_time: f64, r0: f64, modes: &[(usize, i64, f64)]) -> Result<Self> {
        let scaled: Vec<_> = modes.iter().map(|&(l, m, e)| (l, m, r0 * e)).collect();
        Ok(Self {
            family,
            vertex_time,
            w: SphereField::from_modes(r0, &scaled)?,
        })
    }
}

impl Immersion for ConeSection {
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4] {
        let w = self.w.eval(u);
        let t = Jet2::constant(self.vertex_time) - self.family.tortoise(w);
        [t, w * u[0], w * u[1], w * u[2]]
    }

    fn name(&self) -> String {
        "cone-section".into()
    }
}

/// Cartesian components given spectrally, e.g. fitted from samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectral {
    pub components: [SphereField; 4],
    pub label: String,
}

impl Spectral {
    /// Fits node samples of the four Cartesian components on `grid`.
    pub fn fit(grid: &SphereGrid, samples: &[[f64; 4]], label: &str) -> Result<Self> {
        let lmax = max_degree(grid);
        let comp = |c: usize| -> Result<SphereField> {
            let v: Vec<f64> = samples.iter().map(|s| s[c]).collect();
            analyze(grid, &v, lmax)
        };
        Ok(Self {
            components: [comp(0)?, comp(1)?, comp(2)?, comp(3)?],
            label: label.to_string(),
        })
    }
}

impl Immersion for Spectral {
    fn position(&self, u: &[Jet2; 3]) -> [Jet2; 4] {
        let c = &self.components;
        let v = SphereField::eval_many(&[&c[0], &c[1], &c[2], &c[3]], u);
        [v[0], v[1], v[2], v[3]]
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// One row of a tabulated surface: node indices and `(t, r, Θ, Φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabulatedRow {
    pub theta_index: usize,
    pub phi_index: usize,
    pub t: f64,
    pub r: f64,
    #[serde(rename = "Theta")]
    pub big_theta: f64,
    #[serde(rename = "Phi")]
    pub big_phi: f64,
}

/// Reads a tabulated immersion sampled on the Gauss–Legendre grid of `grid` and fits
/// it spectrally. Every node must appear exactly once.
pub fn read_tabulated(path: &Path, grid: &SphereGrid) -> Result<Spectral> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| GeomError::Config(format!("{}: {e}", path.display())))?;
    let mut samples = vec![None; grid.len()];
    for row in rdr.deserialize::<TabulatedRow>() {
        let row = row.map_err(|e| GeomError::Config(format!("{}: {e}", path.display())))?;
        if row.theta_index >= grid.n_theta || row.phi_index >= grid.n_phi {
            return Err(GeomError::Config(format!(
                "node ({}, {}) outside the {}×{} grid",
                row.theta_index, row.phi_index, grid.n_theta, grid.n_phi
            )));
        }
        let i = grid.index(row.theta_index, row.phi_index);
        if samples[i].is_some() {
            return Err(GeomError::Config(format!(
                "node ({}, {}) listed twice",
                row.theta_index, row.phi_index
            )));
        }
        let (st, ct) = row.big_theta.sin_cos();
        let (sp, cp) = row.big_phi.sin_cos();
        samples[i] = Some([row.t, row.r * st * cp, row.r * st * sp, row.r * ct]);
    }
    let samples: Vec<[f64; 4]> = samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                let (j, k) = grid.unflatten(i);
                GeomError::Config(format!("node ({j}, {k}) missing from {}", path.display()))
            })
        })
        .collect::<Result<_>>()?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tabulated".into());
    Spectral::fit(grid, &samples, &label)
}

/// Writes the node samples of an immersion in the tabulated layout.
pub fn write_tabulated(path: &Path, grid: &SphereGrid, imm: &dyn Immersion) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| GeomError::Config(format!("{}: {e}", path.display())))?;
    for i in 0..grid.len() {
        let (j, k) = grid.unflatten(i);
        let u = grid.unit(i).map(Jet2::constant);
        let p = imm.position(&u);
        let (x, y, z) = (p[1].v, p[2].v, p[3].v);
        let r = (x * x + y * y + z * z).sqrt();
        let row = TabulatedRow {
            theta_index: j,
            phi_index: k,
            t: p[0].v,
            r,
            big_theta: (z / r).acos(),
            big_phi: y.atan2(x),
        };
        w.serialize(row)
            .map_err(|e| GeomError::Config(format!("{}: {e}", path.display())))?;
    }
    w.flush()
        .map_err(|e| GeomError::Config(format!("{}: {e}", path.display())))
}
