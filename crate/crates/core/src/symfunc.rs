//! Elementary symmetric functions, their complete polarizations, and the mixed
//! curvatures `P_{r,s}` obtained from `det(σ + yχ + ȳχ̄)`.
//!
//! Normalization: with `A`, `B` the σ-whitened forms of `χ`, `χ̄`,
//!
//! ```text
//! det(I + yA + ȳB) = Σ C(r+s, r) y^r ȳ^s P_{r,s}
//! ```
//!
//! so `P_{0,0} = 1`, `P_{1,0} = tr_σ χ`, and `P_{r,s}(h, -h) = (-1)^s σ_{r+s}(h)`.
//! Indices with `r < 0` or `s < 0` are treated as zero coefficients.
//!
//! Everything here is a pure function of its inputs.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::eigen::symmetric_eigen;

use crate::error::{GeomError, Result};

/// Largest matrix size with exact minor-expansion paths.
pub const MAX_DIM: usize = 6;

/// Default relative margin for strict cone inequalities.
pub const CONE_TOL: f64 = 1e-12;

/// A real symmetric `d × d` form, symmetrized exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBilinear {
    m: DMatrix<f64>,
}

impl SymmetricBilinear {
    /// Symmetrizes `m` as `(m + mᵀ)/2`; off-diagonal pairs are bitwise equal afterwards.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::Domain(format!(
                "bilinear form must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let d = m.nrows();
        let mut s = m.clone();
        for i in 0..d {
            for j in (i + 1)..d {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Ok(Self { m: s })
    }

    pub fn from_row_slice(d: usize, data: &[f64]) -> Result<Self> {
        if data.len() != d * d {
            return Err(GeomError::Domain(format!(
                "expected {} entries for a {d}x{d} form, got {}",
                d * d,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(d, d, data))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { m: &self.m * a }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = symmetric_eigen(&self.m)
            .0
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Spectral norm `max |λ|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Mixed curvatures and their derivative tensors for every `r + s ≤ d`.
#[derive(Debug, Clone)]
pub struct MixedCurvatureTable {
    /// Ambient spatial dimension, `d + 1`.
    pub n: usize,
    pub p: BTreeMap<(usize, usize), f64>,
    /// `∂P/∂χ_{ab}`, contravariant.
    pub t: BTreeMap<(usize, usize), SymmetricBilinear>,
    /// `∂P/∂χ̄_{ab}`, contravariant.
    pub tbar: BTreeMap<(usize, usize), SymmetricBilinear>,
}

impl MixedCurvatureTable {
    pub fn build(
        sigma: &SymmetricBilinear,
        chi: &SymmetricBilinear,
        chibar: &SymmetricBilinear,
    ) -> Result<Self> {
        let w = Whitened::new(sigma, chi, chibar)?;
        let d = w.d;
        let mut p = BTreeMap::new();
        let mut t = BTreeMap::new();
        let mut tbar = BTreeMap::new();
        for k in 0..=d {
            for r in 0..=k {
                let s = k - r;
                p.insert((r, s), w.p(r, s));
                let (tt, tb) = w.t(r, s);
                t.insert((r, s), tt);
                tbar.insert((r, s), tb);
            }
        }
        Ok(Self {
            n: d + 1,
            p,
            t,
            tbar,
        })
    }

    /// `P_{r,s}`, zero for negative indices.
    pub fn p_at(&self, r: i64, s: i64) -> f64 {
        if r < 0 || s < 0 {
            return 0.0;
        }
        self.p.get(&(r as usize, s as usize)).copied().unwrap_or(0.0)
    }
}

/// `σ_k(λ)`; `σ_0 = 1`.
pub fn elem_sym(lambda: &[f64], k: usize) -> Result<f64> {
    if k > lambda.len() {
        return Err(GeomError::Domain(format!(
            "σ_{k} undefined for a vector of length {}",
            lambda.len()
        )));
    }
    Ok(elem_sym_all(lambda)[k])
}

/// All of `σ_0(λ), …, σ_m(λ)` by expanding `Π (1 + λ_i t)`.
pub fn elem_sym_all(lambda: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; lambda.len() + 1];
    e[0] = 1.0;
    for (i, &l) in lambda.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

/// `σ_k(λ | i)`: `σ_k` of `λ` with entry `i` removed.
pub fn elem_sym_excl(lambda: &[f64], k: usize, i: usize) -> Result<f64> {
    if i >= lambda.len() {
        return Err(GeomError::Domain(format!(
            "index {i} out of range for length {}",
            lambda.len()
        )));
    }
    let rest: Vec<f64> = lambda
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| *v)
        .collect();
    elem_sym(&rest, k)
}

/// `P_{r,s}(χ, χ̄)` relative to `σ`.
pub fn mixed_p(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
    r: usize,
    s: usize,
) -> Result<f64> {
    let w = Whitened::new(sigma, chi, chibar)?;
    if r + s > w.d {
        return Err(GeomError::Domain(format!(
            "r + s = {} exceeds dimension {}",
            r + s,
            w.d
        )));
    }
    Ok(w.p(r, s))
}

/// `(T_{r,s}, T̄_{r,s})`: derivatives of `P_{r,s}` in `χ_{ab}` and `χ̄_{ab}`, contravariant.
pub fn mixed_t(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
    r: usize,
    s: usize,
) -> Result<(SymmetricBilinear, SymmetricBilinear)> {
    let w = Whitened::new(sigma, chi, chibar)?;
    if r + s > w.d {
        return Err(GeomError::Domain(format!(
            "r + s = {} exceeds dimension {}",
            r + s,
            w.d
        )));
    }
    Ok(w.t(r, s))
}

/// Complete polarization `σ_(k)(W¹, …, W^k)` (forms read in an orthonormal frame).
///
/// Normalized so that `σ_(k)(W, …, W) = σ_k(W)`.
pub fn polarized_sigma(w: &[SymmetricBilinear], k: usize) -> Result<f64> {
    if w.len() != k {
        return Err(GeomError::Domain(format!(
            "polarization of σ_{k} needs {k} forms, got {}",
            w.len()
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let d = w[0].dim();
    if w.iter().any(|x| x.dim() != d) {
        return Err(GeomError::Domain("mismatched form dimensions".into()));
    }
    if k > d {
        return Ok(0.0);
    }
    check_dim(d)?;
    // Mixed discriminant: coefficient of t₁⋯t_k in Σ_S det((Σ tᵢWⁱ)_S), divided by k!.
    let perms = permutations(k);
    let mut total = 0.0;
    for subset in subsets(d, k) {
        let mut acc = 0.0;
        for perm in &perms {
            let mut buf = [0.0; MAX_DIM * MAX_DIM];
            for (col, &c) in subset.iter().enumerate() {
                let m = w[perm[col]].matrix();
                for (row, &rr) in subset.iter().enumerate() {
                    buf[row * k + col] = m[(rr, c)];
                }
            }
            acc += det_small(&mut buf[..k * k], k);
        }
        total += acc;
    }
    Ok(total / factorial(k))
}

/// True iff `σ_j(spec W) > tol·‖W‖^j` for `1 ≤ j ≤ k`.
pub fn gamma_cone_member(w: &SymmetricBilinear, k: usize, tol: f64) -> bool {
    let ev = w.eigenvalues();
    let norm = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let e = elem_sym_all(&ev);
    (1..=k.min(ev.len())).all(|j| e[j] > tol * norm.powi(j as i32)) && k <= ev.len()
}

/// Cone membership of `W` measured against `σ` (eigenvalues of `σ^{-1}W`).
pub fn gamma_cone_member_rel(
    sigma: &SymmetricBilinear,
    w: &SymmetricBilinear,
    k: usize,
    tol: f64,
) -> Result<bool> {
    let s = inv_sqrt(sigma)?;
    let a = SymmetricBilinear::new(&s * w.matrix() * &s)?;
    Ok(gamma_cone_member(&a, k, tol))
}

/// Residuals of the trace identities
/// `σ_{ab}T^{ab} = r(n−(r+s))/(r+s)·P_{r−1,s}`, `χ_{ab}T^{ab} = rP`, `χ̄_{ab}T̄^{ab} = sP`.
pub fn check_abc_identities(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
    r: usize,
    s: usize,
    n: usize,
) -> Result<[f64; 3]> {
    let d = sigma.dim();
    if n != d + 1 {
        return Err(GeomError::Domain(format!(
            "ambient dimension n = {n} must equal form dimension + 1 = {}",
            d + 1
        )));
    }
    let w = Whitened::new(sigma, chi, chibar)?;
    if r + s > d {
        return Err(GeomError::Domain(format!("r + s = {} exceeds {d}", r + s)));
    }
    let (t, tb) = w.t(r, s);
    let p = w.p(r, s);
    let k = r + s;
    let pa = if r == 0 || k == 0 {
        0.0
    } else {
        (r * (n - k)) as f64 / k as f64 * w.p(r - 1, s)
    };
    let res_a = (contract(sigma, &t) - pa).abs();
    let res_b = (contract(chi, &t) - r as f64 * p).abs();
    let res_c = (contract(chibar, &tb) - s as f64 * p).abs();
    Ok([res_a, res_b, res_c])
}

/// `c(n, r, s) = (r+s)/(r+s−1) · (n−(r+s)+1)/(n−(r+s))`.
pub fn nm_constant(n: usize, r: usize, s: usize) -> f64 {
    let k = (r + s) as f64;
    let n = n as f64;
    k / (k - 1.0) * (n - k + 1.0) / (n - k)
}

/// Outcome of a quadratic inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityGap {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub gap: f64,
    /// `|lhs| + |rhs|`, the natural size for relative gaps.
    pub scale: f64,
}

impl InequalityGap {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            gap: lhs - rhs,
            scale: lhs.abs() + rhs.abs(),
        }
    }
}

/// Newton–MacLaurin: `P²_{r−1,s} ≥ c(n,r,s)·P_{r,s}·P_{r−2,s}` for `χ, χ̄ ∈ Γ_{r+s−1}`.
pub fn newton_maclaurin_check(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
    r: usize,
    s: usize,
    n: usize,
) -> Result<InequalityGap> {
    let d = sigma.dim();
    if n != d + 1 {
        return Err(GeomError::Domain(format!(
            "ambient dimension n = {n} must equal form dimension + 1"
        )));
    }
    if r + s < 2 || r == 0 || r + s > d {
        return Err(GeomError::Precondition(format!(
            "Newton–MacLaurin needs r ≥ 1 and 2 ≤ r + s ≤ {d}, got (r, s) = ({r}, {s})"
        )));
    }
    let k = r + s - 1;
    if !gamma_cone_member_rel(sigma, chi, k, CONE_TOL)?
        || !gamma_cone_member_rel(sigma, chibar, k, CONE_TOL)?
    {
        return Err(GeomError::Precondition(format!(
            "χ and χ̄ must lie in Γ_{k}"
        )));
    }
    let w = Whitened::new(sigma, chi, chibar)?;
    let prev2 = if r >= 2 { w.p(r - 2, s) } else { 0.0 };
    let lhs = w.p(r - 1, s).powi(2);
    let rhs = nm_constant(n, r, s) * w.p(r, s) * prev2;
    Ok(InequalityGap::new(lhs, rhs))
}

/// Gårding: `σ_(k)(W¹,W²,…)² ≥ σ_(k)(W¹,W¹,…)·σ_(k)(W²,W²,…)` for `Wⁱ ∈ ±Γ_k`.
pub fn garding_check(w: &[SymmetricBilinear]) -> Result<InequalityGap> {
    let k = w.len();
    if k < 2 {
        return Err(GeomError::Precondition(
            "Gårding's inequality needs at least two forms".into(),
        ));
    }
    for (i, wi) in w.iter().enumerate() {
        let neg = wi.scaled(-1.0);
        if !gamma_cone_member(wi, k, CONE_TOL) && !gamma_cone_member(&neg, k, CONE_TOL) {
            return Err(GeomError::Precondition(format!(
                "form {i} lies in neither Γ_{k} nor −Γ_{k}"
            )));
        }
    }
    let lhs = polarized_sigma(w, k)?.powi(2);
    let mut a = w.to_vec();
    a[1] = w[0].clone();
    let mut b = w.to_vec();
    b[0] = w[1].clone();
    let rhs = polarized_sigma(&a, k)? * polarized_sigma(&b, k)?;
    Ok(InequalityGap::new(lhs, rhs))
}

/// Which cone the hypothesis of the algebraic lemma places `χ̄` in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChibarCone {
    /// `χ̄ ∈ Γ_{r+s}`.
    Positive,
    /// `−χ̄ ∈ Γ_{r+s}`.
    Negative,
}

/// Result of the algebraic lemma check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma52Report {
    /// `χ̄_{ab}T̄_{0,s}^{bc}χ_c^a / (P_{0,s}P_{1,0}) − s/(n−1)`; the hypothesis is this `≥ 0`.
    pub hypothesis_gap: f64,
    /// `P_{r−1,s}/P_{r,s} − (r+s)/(n−(r+s)) · (n−1)/tr χ`; the conclusion is this `≥ 0`.
    pub conclusion_gap: f64,
    pub hypothesis_holds: bool,
    /// False only when the hypothesis holds and the conclusion fails beyond `tol`.
    pub implication_holds: bool,
}

/// Evaluates hypothesis and conclusion of the `P_{r−1,s}/P_{r,s}` lower bound.
pub fn lemma52_check(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
    r: usize,
    s: usize,
    n: usize,
    cone: ChibarCone,
    tol: f64,
) -> Result<Lemma52Report> {
    let d = sigma.dim();
    if n != d + 1 {
        return Err(GeomError::Domain(format!(
            "ambient dimension n = {n} must equal form dimension + 1"
        )));
    }
    if r == 0 || r + s > d - 1 + 1 || r + s >= n {
        return Err(GeomError::Precondition(format!(
            "need r ≥ 1 and r + s ≤ {}, got ({r}, {s})",
            n - 1
        )));
    }
    let k = r + s;
    let cb = match cone {
        ChibarCone::Positive => chibar.clone(),
        ChibarCone::Negative => chibar.scaled(-1.0),
    };
    if !gamma_cone_member_rel(sigma, chi, k, CONE_TOL)?
        || !gamma_cone_member_rel(sigma, &cb, k, CONE_TOL)?
    {
        return Err(GeomError::Precondition(format!(
            "cone condition Γ_{k} violated"
        )));
    }
    let w = Whitened::new(sigma, chi, chibar)?;
    let (_, tb0s) = w.t(0, s);
    let p0s = w.p(0, s);
    let p10 = w.p(1, 0);
    // Whitened contraction χ̄_{ab} T̄^{bc} χ_c^a = tr(B · T̃ · A) with T̃ = S⁻¹ T̄ S⁻¹.
    let tw = &w.sqrt * tb0s.matrix() * &w.sqrt;
    let num = (&w.b * tw * &w.a).trace();
    let hypothesis_gap = num / (p0s * p10) - s as f64 / (n - 1) as f64;
    let conclusion_gap = w.p(r - 1, s) / w.p(r, s)
        - (k as f64) / ((n - k) as f64) * (n - 1) as f64 / p10;
    let hypothesis_holds = hypothesis_gap >= -tol;
    Ok(Lemma52Report {
        hypothesis_gap,
        conclusion_gap,
        hypothesis_holds,
        implication_holds: !hypothesis_holds || conclusion_gap >= -tol,
    })
}

/// `Σ_{ab} W_{ab} T^{ab}`.
pub fn contract(w: &SymmetricBilinear, t: &SymmetricBilinear) -> f64 {
    w.matrix().component_mul(t.matrix()).sum()
}

/// `σ^{-1/2}` via the symmetric eigendecomposition; rejects non-positive-definite σ.
pub fn inv_sqrt(sigma: &SymmetricBilinear) -> Result<DMatrix<f64>> {
    let d = sigma.dim();
    check_dim(d)?;
    let (values, vectors) = symmetric_eigen(sigma.matrix());
    let max = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if values
        .iter()
        .any(|&l| !(l > 1e-14 * max.max(f64::MIN_POSITIVE)))
    {
        return Err(GeomError::InvalidMetric(
            "σ is not positive definite".into(),
        ));
    }
    let mut diag = DMatrix::zeros(d, d);
    for i in 0..d {
        diag[(i, i)] = 1.0 / values[i].sqrt();
    }
    let s = &vectors * diag * vectors.transpose();
    Ok(0.5 * (&s + s.transpose()))
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(GeomError::Domain(format!(
            "form dimension {d} outside supported range 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// σ-whitened pair `A = SχS`, `B = Sχ̄S` with `S = σ^{-1/2}`.
struct Whitened {
    d: usize,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    /// `S = σ^{-1/2}`.
    s: DMatrix<f64>,
    /// `σ^{1/2}`.
    sqrt: DMatrix<f64>,
}

impl Whitened {
    fn new(
        sigma: &SymmetricBilinear,
        chi: &SymmetricBilinear,
        chibar: &SymmetricBilinear,
    ) -> Result<Self> {
        let d = sigma.dim();
        if chi.dim() != d || chibar.dim() != d {
            return Err(GeomError::Domain("mismatched form dimensions".into()));
        }
        let s = inv_sqrt(sigma)?;
        let sqrt = s
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::InvalidMetric("σ is singular".into()))?;
        let a = &s * chi.matrix() * &s;
        let b = &s * chibar.matrix() * &s;
        Ok(Self {
            d,
            a: 0.5 * (&a + a.transpose()),
            b: 0.5 * (&b + b.transpose()),
            s,
            sqrt,
        })
    }

    /// Coefficient of `y^r ȳ^s` in `det(I + yA + ȳB)` divided by `C(r+s, r)`.
    fn p(&self, r: usize, s: usize) -> f64 {
        let k = r + s;
        if k == 0 {
            return 1.0;
        }
        if k > self.d {
            return 0.0;
        }
        let mut total = 0.0;
        for subset in subsets(self.d, k) {
            for from_a in subsets(k, r) {
                let mut buf = [0.0; MAX_DIM * MAX_DIM];
                self.fill_mixed(&subset, &from_a, &mut buf);
                total += det_small(&mut buf[..k * k], k);
            }
        }
        total / binomial(k, r)
    }

    /// Column `c` of the mixed minor comes from `A` iff `c ∈ from_a`.
    fn fill_mixed(&self, subset: &[usize], from_a: &[usize], buf: &mut [f64]) {
        let k = subset.len();
        for (col, &c) in subset.iter().enumerate() {
            let src = if from_a.contains(&col) { &self.a } else { &self.b };
            for (row, &rr) in subset.iter().enumerate() {
                buf[row * k + col] = src[(rr, c)];
            }
        }
    }

    /// `(T, T̄)` from cofactors of the mixed minors, mapped back through `S`.
    fn t(&self, r: usize, s: usize) -> (SymmetricBilinear, SymmetricBilinear) {
        let d = self.d;
        let k = r + s;
        let mut ga = DMatrix::<f64>::zeros(d, d);
        let mut gb = DMatrix::<f64>::zeros(d, d);
        if k > 0 && k <= d {
            for subset in subsets(d, k) {
                for from_a in subsets(k, r) {
                    let mut buf = [0.0; MAX_DIM * MAX_DIM];
                    self.fill_mixed(&subset, &from_a, &mut buf);
                    let cof = cofactors(&buf[..k * k], k);
                    for col in 0..k {
                        let target = if from_a.contains(&col) { &mut ga } else { &mut gb };
                        for row in 0..k {
                            target[(subset[row], subset[col])] += cof[row * k + col];
                        }
                    }
                }
            }
            let norm = binomial(k, r);
            ga /= norm;
            gb /= norm;
        }
        let t = &self.s * ga.transpose() * &self.s;
        let tb = &self.s * gb.transpose() * &self.s;
        (
            SymmetricBilinear::new(t).expect("square"),
            SymmetricBilinear::new(tb).expect("square"),
        )
    }
}

/// Determinant of a row-major `k × k` block by partial-pivot elimination (destroys `a`).
pub(crate) fn det_small(a: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..k {
        let mut piv = c;
        for r in (c + 1)..k {
            if a[r * k + c].abs() > a[piv * k + c].abs() {
                piv = r;
            }
        }
        if a[piv * k + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for j in 0..k {
                a.swap(c * k + j, piv * k + j);
            }
            det = -det;
        }
        let p = a[c * k + c];
        det *= p;
        for r in (c + 1)..k {
            let f = a[r * k + c] / p;
            if f != 0.0 {
                for j in c..k {
                    a[r * k + j] -= f * a[c * k + j];
                }
            }
        }
    }
    det
}

/// Cofactor matrix `C_{ij} = ∂det/∂a_{ij}` of a row-major `k × k` block.
fn cofactors(a: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    if k == 1 {
        out[0] = 1.0;
        return out;
    }
    let m = k - 1;
    for i in 0..k {
        for j in 0..k {
            let mut buf = [0.0; MAX_DIM * MAX_DIM];
            let mut idx = 0;
            for r in 0..k {
                if r == i {
                    continue;
                }
                for c in 0..k {
                    if c == j {
                        continue;
                    }
                    buf[idx] = a[r * k + c];
                    idx += 1;
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            out[i * k + j] = sign * det_small(&mut buf[..m * m], m);
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elem_sym_small_cases() {
        assert_eq!(elem_sym(&[1.0, 1.0, 1.0], 2).unwrap(), 3.0);
        assert_eq!(elem_sym(&[2.0, 3.0, 5.0], 3).unwrap(), 30.0);
        assert_eq!(elem_sym(&[2.0, 3.0], 0).unwrap(), 1.0);
        assert!(elem_sym(&[1.0], 2).is_err());
        assert_eq!(elem_sym_excl(&[1.0, 2.0, 3.0], 1, 0).unwrap(), 5.0);
        assert!(elem_sym_excl(&[1.0, 2.0], 1, 2).is_err());
    }

    #[test]
    fn det_and_cofactors() {
        let mut a = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        assert!((det_small(&mut a.clone(), 3) - 18.0).abs() < 1e-12);
        let c = cofactors(&a, 3);
        // Row expansion reproduces the determinant.
        let row0: f64 = (0..3).map(|j| a[j] * c[j]).sum();
        assert!((row0 - det_small(&mut a, 3)).abs() < 1e-12);
    }

    #[test]
    fn cone_examples() {
        assert!(gamma_cone_member(&SymmetricBilinear::identity(3), 3, CONE_TOL));
        let w = SymmetricBilinear::diagonal(&[1.0, 1.0, -3.0]);
        assert!(!gamma_cone_member(&w, 1, CONE_TOL));
        let w = SymmetricBilinear::diagonal(&[2.0, 1.0, -0.1]);
        assert!(gamma_cone_member(&w, 1, CONE_TOL));
        assert!(!gamma_cone_member(&w, 3, CONE_TOL));
    }

    #[test]
    fn constructor_symmetrizes() {
        let w = SymmetricBilinear::from_row_slice(2, &[1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(w.get(0, 1).to_bits(), w.get(1, 0).to_bits());
        assert_eq!(w.get(0, 1), 3.0);
    }
}
