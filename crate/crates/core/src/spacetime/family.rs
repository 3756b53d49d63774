//! The static warp family `ḡ = −F dt² + dr²/F + r² g_{S^{n−1}}` with `F = f²`.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::Jet2;

/// Relative margin kept from any horizon, `r ≥ r₀(1 + HORIZON_MARGIN)`.
pub const HORIZON_MARGIN: f64 = 1e-6;

/// Choice of warp function `F(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    Minkowski,
    /// `F = 1 + κr²` with `κ < 0` (cosmological horizon at `1/√(−κ)`).
    Desitter { kappa: f64 },
    /// `F = 1 + κr²` with `κ > 0`.
    Antidesitter { kappa: f64 },
    /// `F = 1 − 2m/r^{n−2}`.
    Schwarzschild { m: f64 },
    /// `F = 1 + κr² − 2m/r^{n−2} + A·exp(−(r−c)²/w²)`.
    CustomF {
        kappa: f64,
        m: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

/// `F`, its first two derivatives, and `G = (1−F)/r²` with `G′`, all in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp {
    pub f2: f64,
    pub df2: f64,
    pub ddf2: f64,
    pub g: f64,
    pub dg: f64,
}

/// A member of the static family in spatial dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticFamily {
    n: usize,
    kappa: f64,
    m: f64,
    amplitude: f64,
    center: f64,
    width: f64,
    family: Family,
}

impl StaticFamily {
    pub fn new(n: usize, family: Family) -> Result<Self> {
        if n < 3 {
            return Err(GeomError::Config(format!(
                "spatial dimension must be at least 3, got {n}"
            )));
        }
        let (kappa, m, amplitude, center, width) = match family {
            Family::Minkowski => (0.0, 0.0, 0.0, 0.0, 1.0),
            Family::Desitter { kappa } => {
                if !(kappa < 0.0) {
                    return Err(GeomError::Config(format!(
                        "de Sitter needs κ < 0 in F = 1 + κr², got {kappa}"
                    )));
                }
                (kappa, 0.0, 0.0, 0.0, 1.0)
            }
            Family::Antidesitter { kappa } => {
                if !(kappa > 0.0) {
                    return Err(GeomError::Config(format!(
                        "anti-de Sitter needs κ > 0 in F = 1 + κr², got {kappa}"
                    )));
                }
                (kappa, 0.0, 0.0, 0.0, 1.0)
            }
            Family::Schwarzschild { m } => (0.0, m, 0.0, 0.0, 1.0),
            Family::CustomF {
                kappa,
                m,
                amplitude,
                center,
                width,
            } => {
                if !(width > 0.0) {
                    return Err(GeomError::Config(format!(
                        "bump width must be positive, got {width}"
                    )));
                }
                (kappa, m, amplitude, center, width)
            }
        };
        if !(m >= 0.0) {
            return Err(GeomError::Config(format!("mass must be non-negative, got {m}")));
        }
        for v in [kappa, m, amplitude, center, width] {
            if !v.is_finite() {
                return Err(GeomError::Config("non-finite family parameter".into()));
            }
        }
        Ok(Self {
            n,
            kappa,
            m,
            amplitude,
            center,
            width,
            family,
        })
    }

    pub fn minkowski(n: usize) -> Self {
        Self::new(n, Family::Minkowski).expect("valid")
    }

    pub fn schwarzschild(n: usize, m: f64) -> Result<Self> {
        Self::new(n, Family::Schwarzschild { m })
    }

    /// `F = 1 + κr²` of either sign.
    pub fn constant_curvature(n: usize, kappa: f64) -> Result<Self> {
        if kappa == 0.0 {
            Ok(Self::minkowski(n))
        } else if kappa < 0.0 {
            Self::new(n, Family::Desitter { kappa })
        } else {
            Self::new(n, Family::Antidesitter { kappa })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// True when `F = 1 + κr²` exactly (Minkowski, de Sitter, anti-de Sitter).
    pub fn is_constant_curvature(&self) -> bool {
        self.m == 0.0 && self.amplitude == 0.0
    }

    pub fn is_vacuum_schwarzschild(&self) -> bool {
        matches!(self.family, Family::Schwarzschild { .. } | Family::Minkowski)
    }

    fn bump(&self, r: f64) -> (f64, f64, f64) {
        if self.amplitude == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let z = (r - self.center) / self.width;
        let e = self.amplitude * (-z * z).exp();
        let w2 = self.width * self.width;
        let d1 = -2.0 * z / self.width * e;
        let d2 = (4.0 * z * z - 2.0) / w2 * e;
        (e, d1, d2)
    }

    pub fn warp(&self, r: f64) -> Warp {
        let n = self.n as i32;
        let (k, m) = (self.kappa, self.m);
        let (b, db, ddb) = self.bump(r);
        let rn2 = r.powi(n - 2);
        let f2 = 1.0 + k * r * r - 2.0 * m / rn2 + b;
        let df2 = 2.0 * k * r + 2.0 * m * (n - 2) as f64 / r.powi(n - 1) + db;
        let ddf2 = 2.0 * k - 2.0 * m * ((n - 2) * (n - 1)) as f64 / r.powi(n) + ddb;
        // G = (1 − F)/r² = −κ + 2m/r^n − b/r².
        let g = -k + 2.0 * m / r.powi(n) - b / (r * r);
        let dg = -2.0 * m * n as f64 / r.powi(n + 1) - db / (r * r) + 2.0 * b / (r * r * r);
        Warp {
            f2,
            df2,
            ddf2,
            g,
            dg,
        }
    }

    /// `F′(r)/r`, finite at `r = 0` for the constant-curvature members.
    pub fn df2_over_r(&self, r: f64) -> f64 {
        if self.m == 0.0 && self.amplitude == 0.0 {
            return 2.0 * self.kappa;
        }
        self.warp(r).df2 / r
    }

    /// Inner horizon radius `r₀ = (2m)^{1/(n−2)}` for positive mass.
    pub fn horizon_radius(&self) -> Option<f64> {
        (self.m > 0.0).then(|| (2.0 * self.m).powf(1.0 / (self.n as f64 - 2.0)))
    }

    /// Cosmological horizon `1/√(−κ)` for `κ < 0` and no mass.
    pub fn cosmological_radius(&self) -> Option<f64> {
        (self.kappa < 0.0 && self.m == 0.0 && self.amplitude == 0.0)
            .then(|| 1.0 / (-self.kappa).sqrt())
    }

    /// Rejects radii inside (or within the margin of) a horizon, or where `F ≤ 0`.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if !r.is_finite() || r < 0.0 {
            return Err(GeomError::Domain(format!("invalid radius {r}")));
        }
        if let Some(r0) = self.horizon_radius() {
            if r < r0 * (1.0 + HORIZON_MARGIN) {
                return Err(GeomError::Domain(format!(
                    "r = {r} lies inside the horizon margin of r₀ = {r0}"
                )));
            }
        }
        if let Some(rc) = self.cosmological_radius() {
            if r > rc * (1.0 - HORIZON_MARGIN) {
                return Err(GeomError::Domain(format!(
                    "r = {r} lies beyond the cosmological horizon {rc}"
                )));
            }
        }
        if r == 0.0 && !self.is_constant_curvature() {
            return Err(GeomError::Domain("r = 0 is singular for this family".into()));
        }
        if r > 0.0 && !(self.warp(r).f2 > HORIZON_MARGIN) {
            return Err(GeomError::Domain(format!("F(r) ≤ 0 at r = {r}")));
        }
        Ok(())
    }

    /// Tortoise coordinate `r*` with `dr*/dr = 1/F`, as a jet through `w`.
    pub fn tortoise(&self, w: Jet2) -> Jet2 {
        let r = w.v;
        let wp = self.warp(r);
        w.chain(self.tortoise_value(r), 1.0 / wp.f2, -wp.df2 / (wp.f2 * wp.f2))
    }

    /// Value of `r*`, closed form where available and Gauss–Legendre quadrature otherwise.
    pub fn tortoise_value(&self, r: f64) -> f64 {
        let k = self.kappa;
        if self.is_constant_curvature() {
            return if k == 0.0 {
                r
            } else if k > 0.0 {
                (k.sqrt() * r).atan() / k.sqrt()
            } else {
                ((-k).sqrt() * r).atanh() / (-k).sqrt()
            };
        }
        if self.n == 3 && self.amplitude == 0.0 && k == 0.0 {
            let m = self.m;
            return r + 2.0 * m * (r / (2.0 * m) - 1.0).ln();
        }
        // ∫_{r_ref}^{r} dr/F on a composite Gauss–Legendre rule; r_ref is the
        // smallest safe radius sampled so the integrand stays bounded.
        let r_ref = self.horizon_radius().map_or(1.0, |r0| 2.0 * r0);
        let (nodes, weights) = crate::quadrature::gauss_legendre(16);
        let panels = 64;
        let h = (r - r_ref) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = r_ref + p as f64 * h;
            for (x, w) in nodes.iter().zip(&weights) {
                let rr = a + 0.5 * h * (x + 1.0);
                acc += 0.5 * h * w / self.warp(rr).f2;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warp_closed_forms_match_differences() {
        let fams = [
            StaticFamily::minkowski(3),
            StaticFamily::schwarzschild(3, 1.0).unwrap(),
            StaticFamily::schwarzschild(4, 0.7).unwrap(),
            StaticFamily::constant_curvature(3, -0.1).unwrap(),
            StaticFamily::new(
                3,
                Family::CustomF {
                    kappa: 0.02,
                    m: 0.3,
                    amplitude: 0.2,
                    center: 3.0,
                    width: 0.7,
                },
            )
            .unwrap(),
        ];
        let h = 1e-4;
        for fam in fams {
            for &r in &[2.5, 3.1, 4.0] {
                let w = fam.warp(r);
                let d = (fam.warp(r + h).f2 - fam.warp(r - h).f2) / (2.0 * h);
                let dd = (fam.warp(r + h).df2 - fam.warp(r - h).df2) / (2.0 * h);
                let dg = (fam.warp(r + h).g - fam.warp(r - h).g) / (2.0 * h);
                assert!((w.df2 - d).abs() < 1e-7);
                assert!((w.ddf2 - dd).abs() < 1e-7);
                assert!((w.dg - dg).abs() < 1e-7);
                assert!((w.g - (1.0 - w.f2) / (r * r)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn horizons_rejected() {
        let s = StaticFamily::schwarzschild(3, 1.0).unwrap();
        assert!(s.check_radius(2.0).is_err());
        assert!(s.check_radius(2.0 * (1.0 + 2e-6)).is_ok());
        let ds = StaticFamily::constant_curvature(3, -0.1).unwrap();
        assert!(ds.check_radius(3.17).is_err());
        assert!(ds.check_radius(3.0).is_ok());
        assert!(StaticFamily::schwarzschild(3, -1.0).is_err());
    }

    #[test]
    fn tortoise_derivative_is_inverse_warp() {
        let fams = [
            StaticFamily::schwarzschild(3, 1.0).unwrap(),
            StaticFamily::constant_curvature(3, -0.1).unwrap(),
            StaticFamily::constant_curvature(3, 0.1).unwrap(),
            StaticFamily::new(
                3,
                Family::CustomF {
                    kappa: 0.0,
                    m: 0.5,
                    amplitude: 0.1,
                    center: 4.0,
                    width: 1.0,
                },
            )
            .unwrap(),
        ];
        for fam in fams {
            let r = 2.9;
            let h = 1e-4;
            let d = (fam.tortoise_value(r + h) - fam.tortoise_value(r - h)) / (2.0 * h);
            let want = 1.0 / fam.warp(r).f2;
            assert!((d - want).abs() < 1e-7 * want, "{fam:?}: {d} vs {}", 1.0 / fam.warp(r).f2);
        }
    }
}
