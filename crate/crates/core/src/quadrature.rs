//! Gauss–Legendre × uniform-φ quadrature on the parameter sphere.
//!
//! Nodes are `θ_j = arccos x_j` for the Gauss–Legendre abscissae `x_j` (no node
//! sits on a pole) and `φ_k = 2πk/N_φ`. A node's round-sphere weight is
//! `w_j·2π/N_φ`, which integrates polynomials in `cos θ` of degree `< 2N_θ` times
//! trigonometric polynomials in `φ` of degree `< N_φ` exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Gauss–Legendre abscissae (descending, so `θ` ascends) and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = ((i as f64 + 0.75) * PI / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Product grid on the parameter sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub cos_theta: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Gauss–Legendre weights `w_j`.
    pub gl_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 4 || n_phi < 8 {
            return Err(GeomError::Config(format!(
                "resolution {n_theta}×{n_phi} too coarse (need n_theta ≥ 4, n_phi ≥ 8)"
            )));
        }
        let (x, w) = gauss_legendre(n_theta);
        let phi = (0..n_phi)
            .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
            .collect();
        Ok(Self {
            n_theta,
            n_phi,
            theta: x.iter().map(|c| c.acos()).collect(),
            cos_theta: x,
            phi,
            gl_weights: w,
        })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of node `(j, k)`; `θ`-major.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_phi + k
    }

    pub fn unflatten(&self, i: usize) -> (usize, usize) {
        (i / self.n_phi, i % self.n_phi)
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    /// Round-sphere weight `w_j·Δφ` of node `i`.
    pub fn round_weight(&self, i: usize) -> f64 {
        self.gl_weights[i / self.n_phi] * self.dphi()
    }

    /// Unit vector of node `i`.
    pub fn unit(&self, i: usize) -> [f64; 3] {
        let (j, k) = self.unflatten(i);
        let s = self.theta[j].sin();
        [s * self.phi[k].cos(), s * self.phi[k].sin(), self.cos_theta[j]]
    }

    /// Integral over the round unit sphere of node values.
    pub fn integrate_round(&self, f: &[f64]) -> f64 {
        let terms: Vec<f64> = (0..self.len()).map(|i| self.round_weight(i) * f[i]).collect();
        pairwise_sum(&terms)
    }
}

/// Quadrature weights of a mesh, `dμ` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n_theta: usize,
    pub n_phi: usize,
    /// `w_j·Δφ·√det σ / sin θ` per node.
    pub weights: Vec<f64>,
    /// Polynomial degree in `cos θ` integrated exactly on the round sphere.
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        if field.len() != self.weights.len() {
            return Err(GeomError::Domain(format!(
                "field has {} values for {} nodes",
                field.len(),
                self.weights.len()
            )));
        }
        if let Some(node) = field.iter().position(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite { node });
        }
        let terms: Vec<f64> = self.weights.iter().zip(field).map(|(w, f)| w * f).collect();
        Ok(pairwise_sum(&terms))
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}


/// Sum with a fixed binary tree, independent of thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const LEAF: usize = 16;
    const PAR: usize = 1 << 14;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    let (a, b) = v.split_at(mid);
    if v.len() >= PAR {
        let (x, y) = rayon::join(|| pairwise_sum(a), || pairwise_sum(b));
        x + y
    } else {
        pairwise_sum(a) + pairwise_sum(b)
    }
}
