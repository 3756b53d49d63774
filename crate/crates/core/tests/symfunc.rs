use nalgebra::DMatrix;
use nullgeom::symfunc::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subset_sum_oracle(lambda: &[f64], k: usize) -> f64 {
    let n = lambda.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            total += (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| lambda[i])
                .product::<f64>();
        }
    }
    total
}

fn random_sym(rng: &mut ChaCha8Rng, d: usize) -> SymmetricBilinear {
    let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    SymmetricBilinear::new(m).unwrap()
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> SymmetricBilinear {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    SymmetricBilinear::new(&a * a.transpose() + DMatrix::identity(d, d) * 0.5).unwrap()
}

/// Random orthogonal matrix from QR of a Gaussian-ish matrix.
fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

fn with_spectrum(rng: &mut ChaCha8Rng, ev: &[f64]) -> SymmetricBilinear {
    let d = ev.len();
    let q = random_rotation(rng, d);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(ev));
    SymmetricBilinear::new(&q * diag * q.transpose()).unwrap()
}

/// Rejection-samples a form whose σ-relative spectrum lies in Γ_k.
fn random_cone(rng: &mut ChaCha8Rng, sigma: &SymmetricBilinear, k: usize) -> SymmetricBilinear {
    loop {
        let d = sigma.dim();
        let ev: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let w = with_spectrum(rng, &ev);
        // Push back through σ^{1/2} so the σ-relative spectrum is `ev`.
        let s = inv_sqrt(sigma).unwrap().try_inverse().unwrap();
        let w = SymmetricBilinear::new(&s * w.matrix() * &s).unwrap();
        if gamma_cone_member_rel(sigma, &w, k, 1e-6).unwrap() {
            return w;
        }
    }
}

/// Coefficients of det(σ + yχ + ȳχ̄) by sampling on a grid and a Vandermonde solve.
fn det_sampling_oracle(
    sigma: &SymmetricBilinear,
    chi: &SymmetricBilinear,
    chibar: &SymmetricBilinear,
) -> Vec<((usize, usize), f64)> {
    let d = sigma.dim();
    let monomials: Vec<(usize, usize)> = (0..=d)
        .flat_map(|k| (0..=k).map(move |r| (r, k - r)))
        .collect();
    let m = monomials.len();
    // Nodes on a small Chebyshev-like grid; oversampled least squares.
    let pts: Vec<f64> = (0..=d).map(|i| 0.5 * ((i as f64 + 0.5) * std::f64::consts::PI / (d as f64 + 1.0)).cos()).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &y in &pts {
        for &yb in &pts {
            let mat = sigma.matrix() + chi.matrix() * y + chibar.matrix() * yb;
            rows.push(monomials.iter().map(|&(r, s)| y.powi(r as i32) * yb.powi(s as i32)).collect::<Vec<_>>());
            rhs.push(mat.determinant());
        }
    }
    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_vec(rhs);
    let sol = (a.transpose() * &a).lu().solve(&(a.transpose() * b)).unwrap();
    let det_sigma = sigma.matrix().determinant();
    monomials
        .iter()
        .enumerate()
        .map(|(i, &(r, s))| {
            let binom = (1..=r + s).product::<usize>() as f64
                / ((1..=r).product::<usize>() * (1..=s).product::<usize>()) as f64;
            ((r, s), sol[i] / det_sigma / binom)
        })
        .collect()
}

#[test]
fn elem_sym_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let lambda: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        for k in 0..=6 {
            let got = elem_sym(&lambda, k).unwrap();
            let want = subset_sum_oracle(&lambda, k);
            assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "k={k}");
        }
    }
}

#[test]
fn elem_sym_excl_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let d = rng.gen_range(2..7);
        let lambda: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        for k in 1..=d {
            let lhs: f64 = (0..d)
                .map(|i| lambda[i] * elem_sym_excl(&lambda, k - 1, i).unwrap())
                .sum();
            let want = k as f64 * subset_sum_oracle(&lambda, k);
            assert!((lhs - want).abs() <= 1e-11 * (1.0 + want.abs()));
            if k < d {
                let lhs: f64 = (0..d).map(|i| elem_sym_excl(&lambda, k, i).unwrap()).sum();
                let want = (d - k) as f64 * subset_sum_oracle(&lambda, k);
                assert!((lhs - want).abs() <= 1e-11 * (1.0 + want.abs()));
            }
        }
    }
}

#[test]
fn mixed_p_trace_and_antidiagonal_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 2..=5 {
        let sigma = random_spd(&mut rng, d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        let sinv = sigma.matrix().clone().try_inverse().unwrap();
        let tr = (&sinv * chi.matrix()).trace();
        assert!((mixed_p(&sigma, &chi, &chibar, 1, 0).unwrap() - tr).abs() < 1e-12 * (1.0 + tr.abs()));
        assert_eq!(mixed_p(&sigma, &chi, &chibar, 0, 0).unwrap(), 1.0);

        // χ = −χ̄ = h: P_{r,s} = (−1)^s σ_{r+s}(σ⁻¹h).
        let neg = chi.scaled(-1.0);
        let ev: Vec<f64> = (&sinv * chi.matrix()).eigenvalues().unwrap().iter().copied().collect();
        for k in 0..=d {
            for r in 0..=k {
                let s = k - r;
                let p = mixed_p(&sigma, &chi, &neg, r, s).unwrap();
                let want = if s % 2 == 0 { 1.0 } else { -1.0 } * subset_sum_oracle(&ev, k);
                assert!((p - want).abs() < 1e-10 * (1.0 + want.abs()), "d={d} r={r} s={s}");
            }
        }
    }
}

#[test]
fn mixed_p_matches_determinant_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 2..=5 {
        for _ in 0..5 {
            let sigma = random_spd(&mut rng, d);
            let chi = random_sym(&mut rng, d);
            let chibar = random_sym(&mut rng, d);
            let table = MixedCurvatureTable::build(&sigma, &chi, &chibar).unwrap();
            for ((r, s), want) in det_sampling_oracle(&sigma, &chi, &chibar) {
                let got = table.p[&(r, s)];
                assert!(
                    (got - want).abs() <= 1e-8 * (1.0 + want.abs()),
                    "d={d} ({r},{s}): {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn mixed_t_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sigma = random_spd(&mut rng, 2);
    let chi = random_sym(&mut rng, 2);
    let chibar = random_sym(&mut rng, 2);
    let sinv = sigma.matrix().clone().try_inverse().unwrap();
    let (t, tb) = mixed_t(&sigma, &chi, &chibar, 1, 0).unwrap();
    assert!((t.matrix() - &sinv).abs().max() < 1e-12);
    assert!(tb.matrix().abs().max() < 1e-12);
    let (_, tb) = mixed_t(&sigma, &chi, &chibar, 0, 1).unwrap();
    assert!((tb.matrix() - &sinv).abs().max() < 1e-12);

    // 2T_{1,1} = σ^{ab} tr χ̄ − χ̄^{ab} in two dimensions.
    let (t11, _) = mixed_t(&sigma, &chi, &chibar, 1, 1).unwrap();
    let trb = (&sinv * chibar.matrix()).trace();
    let raised = &sinv * chibar.matrix() * &sinv;
    let want = (&sinv * trb - raised) * 0.5;
    assert!((t11.matrix() - want).abs().max() < 1e-12);
}

#[test]
fn mixed_t_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let eps = 1e-5;
    for d in 2..=4 {
        let sigma = random_spd(&mut rng, d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        for k in 1..=d {
            for r in 0..=k {
                let s = k - r;
                let (t, tb) = mixed_t(&sigma, &chi, &chibar, r, s).unwrap();
                for i in 0..d {
                    for j in i..d {
                        let mut e = DMatrix::zeros(d, d);
                        e[(i, j)] = 1.0;
                        e[(j, i)] = 1.0;
                        let e = SymmetricBilinear::new(e).unwrap();
                        let shift = |w: &SymmetricBilinear, a: f64| {
                            SymmetricBilinear::new(w.matrix() + e.matrix() * a).unwrap()
                        };
                        let fd = (mixed_p(&sigma, &shift(&chi, eps), &chibar, r, s).unwrap()
                            - mixed_p(&sigma, &shift(&chi, -eps), &chibar, r, s).unwrap())
                            / (2.0 * eps);
                        let exact = contract(&e, &t);
                        assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "T d={d} ({r},{s})");
                        let fd = (mixed_p(&sigma, &chi, &shift(&chibar, eps), r, s).unwrap()
                            - mixed_p(&sigma, &chi, &shift(&chibar, -eps), r, s).unwrap())
                            / (2.0 * eps);
                        let exact = contract(&e, &tb);
                        assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "Tbar d={d} ({r},{s})");
                    }
                }
            }
        }
    }
}

/// Inclusion–exclusion extracts the multilinear coefficient of t₁⋯t_k in σ_k(Σ tᵢWⁱ).
fn polarization_oracle(w: &[SymmetricBilinear]) -> f64 {
    let k = w.len();
    let d = w[0].dim();
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let mut sum = DMatrix::zeros(d, d);
        for (i, wi) in w.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += wi.matrix();
            }
        }
        let ev: Vec<f64> = sum.symmetric_eigenvalues().iter().copied().collect();
        let sign = if (k - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * subset_sum_oracle(&ev, k);
    }
    total / (1..=k).product::<usize>() as f64
}

#[test]
fn polarization_matches_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=5 {
        for k in 0..=d {
            let ident: Vec<_> = (0..k).map(|_| SymmetricBilinear::identity(d)).collect();
            let binom = subset_sum_oracle(&vec![1.0; d], k);
            assert!((polarized_sigma(&ident, k).unwrap() - binom).abs() < 1e-12 * binom);
        }
        for k in 1..=d {
            let w: Vec<_> = (0..k).map(|_| random_sym(&mut rng, d)).collect();
            let got = polarized_sigma(&w, k).unwrap();
            let want = polarization_oracle(&w);
            assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "d={d} k={k}");
        }
    }
    assert!(polarized_sigma(&[SymmetricBilinear::identity(2), SymmetricBilinear::identity(3)], 2).is_err());
}

#[test]
fn polarization_reproduces_mixed_p_and_derivative_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in 2..=5 {
        let ident = SymmetricBilinear::identity(d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        for k in 1..=d {
            for r in 0..=k {
                let mut w = vec![chi.clone(); r];
                w.extend(std::iter::repeat(chibar.clone()).take(k - r));
                let pol = polarized_sigma(&w, k).unwrap();
                let p = mixed_p(&ident, &chi, &chibar, r, k - r).unwrap();
                assert!((pol - p).abs() < 1e-10 * (1.0 + p.abs()));
            }
            // σ_(k)(χ, χ̄, …, χ̄) = (1/k) d/dt σ_k(tχ + χ̄) at t = 0.
            let h = 1e-4;
            let sk = |t: f64| {
                let m = chi.matrix() * t + chibar.matrix();
                let ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
                subset_sum_oracle(&ev, k)
            };
            let deriv = (-sk(2.0 * h) + 8.0 * sk(h) - 8.0 * sk(-h) + sk(-2.0 * h)) / (12.0 * h);
            let mut w = vec![chi.clone()];
            w.extend(std::iter::repeat(chibar.clone()).take(k - 1));
            let pol = polarized_sigma(&w, k).unwrap();
            assert!((pol - deriv / k as f64).abs() < 1e-8 * (1.0 + pol.abs()));
        }
    }
}

#[test]
fn cone_membership_examples() {
    assert!(gamma_cone_member(&SymmetricBilinear::identity(4), 4, CONE_TOL));
    assert!(!gamma_cone_member(&SymmetricBilinear::diagonal(&[1.0, 1.0, -3.0]), 1, CONE_TOL));
    let w = SymmetricBilinear::diagonal(&[2.0, 1.0, -0.1]);
    assert!(gamma_cone_member(&w, 1, CONE_TOL));
    assert!(gamma_cone_member(&w, 2, CONE_TOL));
    assert!(!gamma_cone_member(&w, 3, CONE_TOL));
}

#[test]
fn abc_identities_on_random_and_diagonal_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in 2..=5 {
        for _ in 0..10 {
            let sigma = random_spd(&mut rng, d);
            let chi = random_sym(&mut rng, d);
            let chibar = random_sym(&mut rng, d);
            let table = MixedCurvatureTable::build(&sigma, &chi, &chibar).unwrap();
            let scale = table.p.values().fold(1.0_f64, |a, v| a.max(v.abs()));
            for k in 0..=d {
                for r in 0..=k {
                    let res = check_abc_identities(&sigma, &chi, &chibar, r, k - r, d + 1).unwrap();
                    for v in res {
                        assert!(v <= 1e-10 * scale, "d={d} ({r},{}) {res:?}", k - r);
                    }
                }
            }
        }
    }
    // (1,0) is exact.
    let s = SymmetricBilinear::identity(3);
    let res = check_abc_identities(&s, &s, &s, 1, 0, 4).unwrap();
    assert!(res.iter().all(|v| *v < 1e-14));

    // χ = cI, χ̄ = c′I: P_{r,s} = c^r c′^s, T_{r,s} = (r/(r+s))·C(d−1,k−1)/C(d,k)… checked through trace.
    let (c, cp) = (1.5, -0.7);
    let d = 4;
    let sigma = SymmetricBilinear::identity(d);
    let chi = SymmetricBilinear::identity(d).scaled(c);
    let chibar = SymmetricBilinear::identity(d).scaled(cp);
    for k in 0..=d {
        for r in 0..=k {
            let s = k - r;
            let p = mixed_p(&sigma, &chi, &chibar, r, s).unwrap();
            let binom_dk = subset_sum_oracle(&vec![1.0; d], k);
            let want = binom_dk * c.powi(r as i32) * cp.powi(s as i32);
            assert!((p - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }
}

#[test]
fn newton_maclaurin_equality_and_boundary() {
    for d in 2..=5 {
        let n = d + 1;
        let ident = SymmetricBilinear::identity(d);
        for k in 2..=d {
            for r in 2..=k {
                let g = newton_maclaurin_check(&ident, &ident, &ident, r, k - r, n).unwrap();
                assert!(g.gap.abs() <= 1e-12 * g.scale.max(1.0), "d={d} r={r} k={k} {g:?}");
            }
            // r = 1 has no P_{−1,s} term, so the inequality is strict.
            let g = newton_maclaurin_check(&ident, &ident, &ident, 1, k - 1, n).unwrap();
            assert!(g.gap > 0.0 && g.rhs == 0.0);
        }
        assert!(matches!(
            newton_maclaurin_check(&ident, &ident, &ident, 1, 0, n),
            Err(nullgeom::GeomError::Precondition(_))
        ));
    }
    let bad = SymmetricBilinear::diagonal(&[1.0, 1.0, -3.0]);
    let ident = SymmetricBilinear::identity(3);
    assert!(matches!(
        newton_maclaurin_check(&ident, &bad, &ident, 1, 1, 4),
        Err(nullgeom::GeomError::Precondition(_))
    ));
}

#[test]
fn newton_maclaurin_random_cone_samples() {
    // Samples come from Γ_{r+s}, the cone in which Gårding's inequality is applied.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut strict = 0;
    for i in 0..600 {
        let d = 3 + i % 3;
        let k = rng.gen_range(2..=d);
        let r = rng.gen_range(1..=k);
        let sigma = random_spd(&mut rng, d);
        let chi = random_cone(&mut rng, &sigma, k);
        let chibar = random_cone(&mut rng, &sigma, k);
        let g = newton_maclaurin_check(&sigma, &chi, &chibar, r, k - r, d + 1).unwrap();
        assert!(g.gap >= -1e-10 * g.scale, "{g:?}");
        if g.gap > 1e-9 * g.scale {
            strict += 1;
        }
    }
    assert!(strict > 0);
}

#[test]
fn newton_maclaurin_equality_iff_chi_proportional_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let d = rng.gen_range(2..=5);
        let k = rng.gen_range(2..=d);
        let r = rng.gen_range(2..=k);
        let ident = SymmetricBilinear::identity(d);
        let chi = ident.scaled(rng.gen_range(0.1..3.0));
        let chibar = random_cone(&mut rng, &ident, k);
        let g = newton_maclaurin_check(&ident, &chi, &chibar, r, k - r, d + 1).unwrap();
        assert!(g.gap.abs() <= 1e-9 * g.scale, "{g:?}");
        let chi = random_cone(&mut rng, &ident, k);
        let g = newton_maclaurin_check(&ident, &chi, &chibar, r, k - r, d + 1).unwrap();
        assert!(g.gap > 1e-9 * g.scale, "{g:?}");
    }
}

#[test]
fn newton_maclaurin_can_fail_one_cone_below() {
    // Inputs in Γ_{r+s−1} but outside Γ_{r+s} admit violations with P_{r,s} > 0.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0_f64;
    for _ in 0..2000 {
        let d = 3;
        let (r, s) = (2, 1);
        let ident = SymmetricBilinear::identity(d);
        let chi = random_cone(&mut rng, &ident, r + s - 1);
        let chibar = random_cone(&mut rng, &ident, r + s - 1);
        let g = newton_maclaurin_check(&ident, &chi, &chibar, r, s, d + 1).unwrap();
        worst = worst.min(g.gap / g.scale);
    }
    assert!(worst < -1e-3, "no violation found, worst = {worst}");
}

#[test]
fn garding_cases() {
    let w1 = SymmetricBilinear::identity(3);
    let g = garding_check(&[w1.clone(), w1.clone()]).unwrap();
    assert_eq!(g.gap, 0.0);
    let w2 = SymmetricBilinear::diagonal(&[1.0, 2.0, 3.0]);
    let g = garding_check(&[w1, w2]).unwrap();
    // σ_(2)(I,D) = (1/2)·(d−1)·tr D = 6; σ_2(I) = 3; σ_2(D) = 11.
    assert!((g.lhs - 36.0).abs() < 1e-12);
    assert!((g.rhs - 33.0).abs() < 1e-12);
    assert!(g.gap > 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ident5 = SymmetricBilinear::identity(5);
    for _ in 0..300 {
        let d = rng.gen_range(2..=5);
        let k = rng.gen_range(2..=d);
        let sigma = SymmetricBilinear::identity(d);
        let w: Vec<_> = (0..k).map(|_| random_cone(&mut rng, &sigma, k)).collect();
        let g = garding_check(&w).unwrap();
        assert!(g.gap >= -1e-10 * g.scale, "{g:?}");
    }
    assert!(garding_check(&[ident5.clone()]).is_err());
    assert!(garding_check(&[SymmetricBilinear::diagonal(&[1.0, -2.0]), SymmetricBilinear::identity(2)]).is_err());
}

#[test]
fn lemma52_equality_and_random_pairs() {
    for d in 2..=5 {
        let n = d + 1;
        let ident = SymmetricBilinear::identity(d);
        let chi = ident.scaled(0.8);
        for k in 1..=d {
            for r in 1..=k {
                let rep = lemma52_check(&ident, &chi, &ident.scaled(1.3), r, k - r, n, ChibarCone::Positive, 1e-10).unwrap();
                assert!(rep.hypothesis_gap.abs() < 1e-12, "{rep:?}");
                assert!(rep.conclusion_gap.abs() < 1e-12, "{rep:?}");
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut accepted = 0;
    for cone in [ChibarCone::Positive, ChibarCone::Negative] {
        let mut tries = 0;
        let mut got = 0;
        while got < 200 && tries < 200_000 {
            tries += 1;
            let d = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=d);
            let r = rng.gen_range(1..=k);
            let sigma = random_spd(&mut rng, d);
            let chi = random_cone(&mut rng, &sigma, k);
            let mut chibar = random_cone(&mut rng, &sigma, k);
            if cone == ChibarCone::Negative {
                chibar = chibar.scaled(-1.0);
            }
            let rep = lemma52_check(&sigma, &chi, &chibar, r, k - r, d + 1, cone, 1e-10).unwrap();
            if rep.hypothesis_holds {
                got += 1;
                assert!(rep.implication_holds, "{cone:?} d={d} r={r} k={k} {rep:?}");
            }
        }
        accepted += got;
    }
    assert!(accepted >= 300);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bivariate_symmetry(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_spd(&mut rng, d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        for k in 0..=d {
            for r in 0..=k {
                let s = k - r;
                let a = mixed_p(&sigma, &chi, &chibar, r, s).unwrap();
                let b = mixed_p(&sigma, &chibar, &chi, s, r).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                let (t, tb) = mixed_t(&sigma, &chi, &chibar, r, s).unwrap();
                let (t2, tb2) = mixed_t(&sigma, &chibar, &chi, s, r).unwrap();
                prop_assert!((t.matrix() - tb2.matrix()).abs().max() <= 1e-10 * (1.0 + t.norm()));
                prop_assert!((tb.matrix() - t2.matrix()).abs().max() <= 1e-10 * (1.0 + tb.norm()));
            }
        }
    }

    #[test]
    fn scaling_covariance(seed in any::<u64>(), d in 2usize..=5, a in 0.2f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_spd(&mut rng, d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        let chi_a = chi.scaled(a);
        let chibar_a = chibar.scaled(1.0 / a);
        for k in 0..=d {
            for r in 0..=k {
                let s = k - r;
                let p = mixed_p(&sigma, &chi, &chibar, r, s).unwrap();
                let pa = mixed_p(&sigma, &chi_a, &chibar_a, r, s).unwrap();
                let want = p * a.powi(r as i32 - s as i32);
                prop_assert!((pa - want).abs() <= 1e-10 * (1.0 + want.abs()));
            }
        }
        for r in 0..=d / 2 {
            if 2 * r + 1 <= d {
                let (t, _) = mixed_t(&sigma, &chi, &chibar, r + 1, r).unwrap();
                let (ta, _) = mixed_t(&sigma, &chi_a, &chibar_a, r + 1, r).unwrap();
                prop_assert!((t.matrix() - ta.matrix()).abs().max() <= 1e-9 * (1.0 + t.norm()));
                let (_, tb) = mixed_t(&sigma, &chi, &chibar, r, r + 1).unwrap();
                let (_, tba) = mixed_t(&sigma, &chi_a, &chibar_a, r, r + 1).unwrap();
                prop_assert!((tb.matrix() - tba.matrix()).abs().max() <= 1e-9 * (1.0 + tb.norm()));
            }
        }
    }

    #[test]
    fn positivity_in_cone(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_spd(&mut rng, d);
        let k = rng.gen_range(1..=d);
        let chi = random_cone(&mut rng, &sigma, k);
        let chibar = random_cone(&mut rng, &sigma, k);
        for r in 0..=k {
            prop_assert!(mixed_p(&sigma, &chi, &chibar, r, k - r).unwrap() > 0.0);
        }
    }

    #[test]
    fn constructor_symmetry_is_bitwise(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1e3..1e3));
        let w = SymmetricBilinear::new(m).unwrap();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(w.get(i, j).to_bits(), w.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn table_invariants(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_spd(&mut rng, d);
        let chi = random_sym(&mut rng, d);
        let chibar = random_sym(&mut rng, d);
        let t = MixedCurvatureTable::build(&sigma, &chi, &chibar).unwrap();
        let sinv = sigma.matrix().clone().try_inverse().unwrap();
        prop_assert_eq!(t.p[&(0, 0)], 1.0);
        let tol = 1e-11 * (1.0 + sinv.abs().max()) * (1.0 + chi.norm() + chibar.norm());
        prop_assert!((t.p[&(1, 0)] - (&sinv * chi.matrix()).trace()).abs() < tol);
        prop_assert!((t.p[&(0, 1)] - (&sinv * chibar.matrix()).trace()).abs() < tol);
        prop_assert!((t.t[&(1, 0)].matrix() - &sinv).abs().max() < tol);
        prop_assert!((t.tbar[&(0, 1)].matrix() - &sinv).abs().max() < tol);
    }
}
