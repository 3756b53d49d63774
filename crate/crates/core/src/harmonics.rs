//! Real spherical harmonics on the unit sphere and spectral transforms on a
//! [`SphereGrid`].
//!
//! Harmonics are evaluated as polynomials in the unit vector `u = (x, y, z)`:
//!
//! ```text
//! Y_l0 = q_l^0(z),   Y_lm = √2 q_l^m(z) Re (x+iy)^m,   Y_l,−m = √2 q_l^m(z) Im (x+iy)^m
//! ```
//!
//! with `q_l^m` the orthonormalized derivative of the Legendre polynomial. Because
//! `u` may itself be a [`Jet2`] of chart parameters, the same code yields exact first
//! and second derivatives in any chart.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::Jet2;
use crate::quadrature::{pairwise_sum, SphereGrid};

/// Flat index of `(l, m)`, `−l ≤ m ≤ l`.
pub fn index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Number of coefficients up to degree `lmax`.
pub fn count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Scalar types the recurrences run on.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl Scalar for Jet2 {
    fn from_f64(v: f64) -> Self {
        Jet2::constant(v)
    }
}

/// All real harmonics up to `lmax` at the unit vector `u`, ordered by [`index`].
pub fn ylm_all<T: Scalar>(u: &[T; 3], lmax: usize) -> Vec<T> {
    let [x, y, z] = *u;
    let mut out = vec![T::from_f64(0.0); count(lmax)];
    // (x + iy)^m as (re, im).
    let mut re = T::from_f64(1.0);
    let mut im = T::from_f64(0.0);
    let mut qmm = (4.0 * std::f64::consts::PI).sqrt().recip();
    for m in 0..=lmax {
        if m > 0 {
            let nre = re * x - im * y;
            let nim = re * y + im * x;
            re = nre;
            im = nim;
            qmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        let mf = m as f64;
        let mut q_prev2 = T::from_f64(0.0);
        let mut q_prev = T::from_f64(qmm);
        for l in m..=lmax {
            let q = if l == m {
                q_prev
            } else if l == m + 1 {
                z * q_prev * (2.0 * mf + 3.0).sqrt()
            } else {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                (z * q_prev - q_prev2 * b) * a
            };
            if l > m {
                q_prev2 = q_prev;
                q_prev = q;
            }
            if m == 0 {
                out[index(l, 0)] = q;
            } else {
                let s = std::f64::consts::SQRT_2;
                out[index(l, m as i64)] = q * re * s;
                out[index(l, -(m as i64))] = q * im * s;
            }
        }
    }
    out
}

/// A band-limited real function on the unit sphere, `Σ c_lm Y_lm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereField {
    pub lmax: usize,
    /// Dense coefficients ordered by [`index`].
    pub coeffs: Vec<f64>,
}

impl SphereField {
    pub fn zero(lmax: usize) -> Self {
        Self {
            lmax,
            coeffs: vec![0.0; count(lmax)],
        }
    }

    /// The constant function `c` (not the `Y_00` coefficient).
    pub fn constant(c: f64) -> Self {
        let mut f = Self::zero(0);
        f.coeffs[0] = c * (4.0 * std::f64::consts::PI).sqrt();
        f
    }

    /// `c + Σ a_k Y_{l_k m_k}`.
    pub fn from_modes(c: f64, modes: &[(usize, i64, f64)]) -> Result<Self> {
        let lmax = modes.iter().map(|m| m.0).max().unwrap_or(0);
        let mut f = Self::zero(lmax);
        f.coeffs[0] = c * (4.0 * std::f64::consts::PI).sqrt();
        for &(l, m, a) in modes {
            if m.unsigned_abs() as usize > l {
                return Err(GeomError::Config(format!("invalid harmonic (l, m) = ({l}, {m})")));
            }
            f.coeffs[index(l, m)] += a;
        }
        Ok(f)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            lmax: self.lmax,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// Mean value over the sphere.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / (4.0 * std::f64::consts::PI).sqrt()
    }

    pub fn eval<T: Scalar>(&self, u: &[T; 3]) -> T {
        let y = ylm_all(u, self.lmax);
        let mut acc = T::from_f64(0.0);
        for (c, yi) in self.coeffs.iter().zip(y) {
            if *c != 0.0 {
                acc = acc + yi * *c;
            }
        }
        acc
    }

    /// Evaluates several fields sharing one harmonic table.
    pub fn eval_many<T: Scalar>(fields: &[&SphereField], u: &[T; 3]) -> Vec<T> {
        let lmax = fields.iter().map(|f| f.lmax).max().unwrap_or(0);
        let y = ylm_all(u, lmax);
        fields
            .iter()
            .map(|f| {
                let mut acc = T::from_f64(0.0);
                for (c, yi) in f.coeffs.iter().zip(&y) {
                    if *c != 0.0 {
                        acc = acc + *yi * *c;
                    }
                }
                acc
            })
            .collect()
    }
}

/// `q_l^m(z_j)·sin^m θ_j` for one latitude, indexed by [`index`] with `m ≥ 0`.
fn latitude_table(z: f64, s: f64, lmax: usize) -> Vec<f64> {
    // Evaluate on the meridian φ = 0, where Re (x+iy)^m = s^m and Im = 0.
    let y = ylm_all(&[s, 0.0, z], lmax);
    let mut out = vec![0.0; count(lmax)];
    for l in 0..=lmax {
        out[index(l, 0)] = y[index(l, 0)];
        for m in 1..=l {
            out[index(l, m as i64)] = y[index(l, m as i64)];
        }
    }
    out
}

/// Largest degree the grid analyses exactly.
pub fn max_degree(grid: &SphereGrid) -> usize {
    (grid.n_theta - 1).min((grid.n_phi - 1) / 2)
}

/// Spectral analysis of node values; exact for fields of degree `≤ max_degree(grid)`.
pub fn analyze(grid: &SphereGrid, values: &[f64], lmax: usize) -> Result<SphereField> {
    if values.len() != grid.len() {
        return Err(GeomError::Domain(format!(
            "{} values for {} nodes",
            values.len(),
            grid.len()
        )));
    }
    if lmax > max_degree(grid) {
        return Err(GeomError::Config(format!(
            "degree {lmax} exceeds the {}×{} grid's exact range {}",
            grid.n_theta,
            grid.n_phi,
            max_degree(grid)
        )));
    }
    if let Some(node) = values.iter().position(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite { node });
    }
    let dphi = grid.dphi();
    let mut f = SphereField::zero(lmax);
    // Per latitude: Fourier sums, then Legendre accumulation.
    let mut acc: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.n_theta); count(lmax)];
    for j in 0..grid.n_theta {
        let row = &values[j * grid.n_phi..(j + 1) * grid.n_phi];
        let table = latitude_table(grid.cos_theta[j], grid.theta[j].sin(), lmax);
        let w = grid.gl_weights[j] * dphi;
        for m in 0..=lmax {
            let (mut c, mut s) = (0.0, 0.0);
            for (k, v) in row.iter().enumerate() {
                let a = m as f64 * grid.phi[k];
                c += v * a.cos();
                s += v * a.sin();
            }
            for l in m..=lmax {
                let q = table[index(l, m as i64)] * w;
                if m == 0 {
                    acc[index(l, 0)].push(q * c);
                } else {
                    acc[index(l, m as i64)].push(q * c);
                    acc[index(l, -(m as i64))].push(q * s);
                }
            }
        }
    }
    for (c, terms) in f.coeffs.iter_mut().zip(&acc) {
        *c = pairwise_sum(terms);
    }
    Ok(f)
}

/// Node values of a field on the grid.
pub fn synthesize(grid: &SphereGrid, field: &SphereField) -> Vec<f64> {
    let lmax = field.lmax;
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.n_theta {
        let table = latitude_table(grid.cos_theta[j], grid.theta[j].sin(), lmax);
        // a_m, b_m: cosine and sine amplitudes at this latitude.
        let mut a = vec![0.0; lmax + 1];
        let mut b = vec![0.0; lmax + 1];
        for l in 0..=lmax {
            a[0] += field.coeffs[index(l, 0)] * table[index(l, 0)];
            for m in 1..=l {
                let q = table[index(l, m as i64)];
                a[m] += field.coeffs[index(l, m as i64)] * q;
                b[m] += field.coeffs[index(l, -(m as i64))] * q;
            }
        }
        for k in 0..grid.n_phi {
            let phi = grid.phi[k];
            let mut v = a[0];
            for m in 1..=lmax {
                let t = m as f64 * phi;
                v += a[m] * t.cos() + b[m] * t.sin();
            }
            out[grid.index(j, k)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_closed_forms() {
        let u = [0.36, -0.48, 0.8];
        let y = ylm_all(&u, 2);
        let pi4 = 4.0 * std::f64::consts::PI;
        assert!((y[index(0, 0)] - 1.0 / pi4.sqrt()).abs() < 1e-15);
        assert!((y[index(1, 0)] - (3.0 / pi4).sqrt() * u[2]).abs() < 1e-15);
        assert!((y[index(1, 1)] - (3.0 / pi4).sqrt() * u[0]).abs() < 1e-15);
        assert!((y[index(1, -1)] - (3.0 / pi4).sqrt() * u[1]).abs() < 1e-15);
        let c22 = (15.0 / (4.0 * pi4)).sqrt();
        assert!((y[index(2, 2)] - c22 * (u[0] * u[0] - u[1] * u[1])).abs() < 1e-14);
        assert!((y[index(2, -2)] - c22 * 2.0 * u[0] * u[1]).abs() < 1e-14);
    }
}
