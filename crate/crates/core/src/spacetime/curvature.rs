//! Closed-form curvature of the static family.

use nalgebra::DMatrix;

use super::{family::StaticFamily, StaticSpherical, Tensor4, MetricProvider};
use crate::error::{GeomError, Result};

/// `(Q²)_{αβ} = Q_{αμ} g^{μγ} Q_{γβ}`.
pub fn q_squared(ginv: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    q * ginv * q
}

/// Schwarzschild curvature assembled from `ḡ` and `Q`:
///
/// ```text
/// R̄ = (2m/r^n)(ḡ_{αγ}ḡ_{βδ} − ḡ_{αδ}ḡ_{βγ})
///     − (n(n−1)m/r^{n+2}) (⅔Q_{αβ}Q_{γδ} − ⅓Q_{αγ}Q_{δβ} − ⅓Q_{αδ}Q_{βγ})
///     − (nm/r^{n+2}) (ḡ∘Q²)_{αβγδ}
/// ```
pub fn schwarzschild_riemann_from_q(
    g: &DMatrix<f64>,
    ginv: &DMatrix<f64>,
    q: &DMatrix<f64>,
    n: usize,
    m: f64,
    r: f64,
) -> Tensor4 {
    let d = g.nrows();
    let q2 = q_squared(ginv, q);
    let nf = n as f64;
    let c1 = 2.0 * m / r.powi(n as i32);
    let c2 = nf * (nf - 1.0) * m / r.powi(n as i32 + 2);
    let c3 = nf * m / r.powi(n as i32 + 2);
    let mut out = Tensor4::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let gg = g[(a, c)] * g[(b, e)] - g[(a, e)] * g[(b, c)];
                    let bq = 2.0 / 3.0 * q[(a, b)] * q[(c, e)]
                        - 1.0 / 3.0 * q[(a, c)] * q[(e, b)]
                        - 1.0 / 3.0 * q[(a, e)] * q[(b, c)];
                    let gq = g[(a, c)] * q2[(b, e)] - g[(a, e)] * q2[(b, c)]
                        + g[(b, e)] * q2[(a, c)]
                        - g[(b, c)] * q2[(a, e)];
                    out.set(a, b, c, e, c1 * gg - c2 * bq - c3 * gq);
                }
            }
        }
    }
    out
}

/// Closed-form Schwarzschild `R̄_{αβγδ}` in the static chart `(t, r, θ₁, …)`.
pub fn schwarzschild_riemann_closed(x: &[f64], n: usize, m: f64) -> Result<Tensor4> {
    let fam = StaticFamily::schwarzschild(n, m)?;
    let r = x[1];
    if !(r.powi(n as i32 - 2) > 2.0 * m) {
        return Err(GeomError::Domain(format!("r^{{n−2}} ≤ 2m at r = {r}")));
    }
    let chart = StaticSpherical::new(fam);
    chart.check_point(x)?;
    let g = chart.metric(x);
    let ginv = chart.inverse_metric(x);
    let mut q = DMatrix::zeros(n + 1, n + 1);
    q[(1, 0)] = r;
    q[(0, 1)] = -r;
    Ok(schwarzschild_riemann_from_q(&g, &ginv, &q, n, m, r))
}

/// `R̄_{αβγδ} = −κ(ḡ_{αγ}ḡ_{βδ} − ḡ_{αδ}ḡ_{βγ})` for `F = 1 + κr²`.
pub fn constant_curvature_riemann(g: &DMatrix<f64>, kappa: f64) -> Tensor4 {
    let d = g.nrows();
    let mut out = Tensor4::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    out.set(a, b, c, e, -kappa * (g[(a, c)] * g[(b, e)] - g[(a, e)] * g[(b, c)]));
                }
            }
        }
    }
    out
}

/// Orthonormal-frame components of the Schwarzschild closed form and of its building
/// blocks, with `E_{n+1} = ∂_t/f`, `E_n = f∂_r` and `E_1, E_2` unit angular.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTable {
    /// `R̄(E_{n+1},E_n,E_{n+1},E_n)`.
    pub r_time_radial: f64,
    /// `R̄(E_{n+1},E_1,E_{n+1},E_1)` and the off-diagonal `R̄(E_{n+1},E_1,E_{n+1},E_2)`.
    pub r_time_angular: (f64, f64),
    /// `R̄(E_n,E_1,E_n,E_1)` and `R̄(E_n,E_1,E_n,E_2)`.
    pub r_radial_angular: (f64, f64),
    /// `R̄(E_1,E_2,E_1,E_2)`.
    pub r_angular: f64,
    /// `Q(E_n, E_{n+1})`.
    pub q_radial_time: f64,
    /// `(Q²)(E_{n+1},E_{n+1})`, `(Q²)(E_n,E_n)`.
    pub q2_time: f64,
    pub q2_radial: f64,
    /// `b(Q)` and `ḡ∘Q²` on `(E_{n+1},E_n,E_{n+1},E_n)`.
    pub bq_time_radial: f64,
    pub gq2_time_radial: f64,
    /// `ḡ∘Q²` on `(E_{n+1},E_1,E_{n+1},E_1)` and `(E_n,E_1,E_n,E_1)`.
    pub gq2_time_angular: f64,
    pub gq2_radial_angular: f64,
    /// Largest frame component not covered by the rows above or their symmetries.
    pub max_other: f64,
}

/// Evaluates [`FrameTable`] at radius `r` and generic angles.
pub fn schwarzschild_frame_table(n: usize, m: f64, r: f64) -> Result<FrameTable> {
    let mut x = vec![0.0; n + 1];
    x[0] = 0.0;
    x[1] = r;
    for (k, xi) in x.iter_mut().skip(2).enumerate() {
        *xi = 0.9 + 0.17 * k as f64;
    }
    let fam = StaticFamily::schwarzschild(n, m)?;
    let chart = StaticSpherical::new(fam);
    chart.check_point(&x)?;
    let g = chart.metric(&x);
    let ginv = chart.inverse_metric(&x);
    let riem = schwarzschild_riemann_closed(&x, n, m)?;
    let d = n + 1;
    // Orthonormal frame: index 0 = E_{n+1}, 1 = E_n, 2.. = angular.
    let frame: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut v = vec![0.0; d];
            v[i] = 1.0 / g[(i, i)].abs().sqrt();
            v
        })
        .collect();
    let mut q = DMatrix::zeros(d, d);
    q[(1, 0)] = r;
    q[(0, 1)] = -r;
    let q2 = q_squared(&ginv, &q);
    let bil = |t: &DMatrix<f64>, a: usize, b: usize| -> f64 {
        let (u, v) = (&frame[a], &frame[b]);
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += t[(i, j)] * u[i] * v[j];
            }
        }
        acc
    };
    let comp = |t: &Tensor4, a: usize, b: usize, c: usize, e: usize| {
        t.eval(&frame[a], &frame[b], &frame[c], &frame[e])
    };
    // Building-block tensors on their own.
    let mut bq = Tensor4::zeros(d);
    let mut gq2 = Tensor4::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    bq.set(
                        a,
                        b,
                        c,
                        e,
                        2.0 / 3.0 * q[(a, b)] * q[(c, e)]
                            - 1.0 / 3.0 * q[(a, c)] * q[(e, b)]
                            - 1.0 / 3.0 * q[(a, e)] * q[(b, c)],
                    );
                    gq2.set(
                        a,
                        b,
                        c,
                        e,
                        g[(a, c)] * q2[(b, e)] - g[(a, e)] * q2[(b, c)] + g[(b, e)] * q2[(a, c)]
                            - g[(b, c)] * q2[(a, e)],
                    );
                }
            }
        }
    }
    let mut max_other = 0.0_f64;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let covered = {
                        let mut s1 = [a, b];
                        let mut s2 = [c, e];
                        s1.sort_unstable();
                        s2.sort_unstable();
                        // Sectional-type components (pairs equal up to order).
                        s1 == s2 && a != b
                    };
                    if !covered {
                        max_other = max_other.max(comp(&riem, a, b, c, e).abs());
                    }
                }
            }
        }
    }
    Ok(FrameTable {
        r_time_radial: comp(&riem, 0, 1, 0, 1),
        r_time_angular: (comp(&riem, 0, 2, 0, 2), comp(&riem, 0, 2, 0, 3)),
        r_radial_angular: (comp(&riem, 1, 2, 1, 2), comp(&riem, 1, 2, 1, 3)),
        r_angular: comp(&riem, 2, 3, 2, 3),
        q_radial_time: bil(&q, 1, 0),
        q2_time: bil(&q2, 0, 0),
        q2_radial: bil(&q2, 1, 1),
        bq_time_radial: comp(&bq, 0, 1, 0, 1),
        gq2_time_radial: comp(&gq2, 0, 1, 0, 1),
        gq2_time_angular: comp(&gq2, 0, 2, 0, 2),
        gq2_radial_angular: comp(&gq2, 1, 2, 1, 2),
        max_other,
    })
}
