use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Vector2, Vector4};
use nullgeom::harmonics::{analyze, index, max_degree, synthesize, SphereField};
use nullgeom::quadrature::SphereGrid;
use nullgeom::spacetime::StaticFamily;
use nullgeom::surface::{
    derived_fields, gamma_apply, mean_curvature_gauge_report, read_tabulated, write_tabulated,
    Ambient, BoostedSphere, ConeSection, DerivedOptions, Ellipsoid, Gauge, Immersion,
    NullFrameField, PointFrame, StarShaped, SurfaceMesh,
};
use proptest::prelude::*;

fn mesh(amb: Ambient, imm: impl Immersion + 'static, nt: usize, np: usize) -> Arc<SurfaceMesh> {
    Arc::new(SurfaceMesh::build(amb, Arc::new(imm), nt, np).unwrap())
}

fn tilted() -> StarShaped {
    StarShaped::tilted_graph(0.3, &[(1, 0, 0.4), (2, 1, 0.2)], 4.0, &[(2, 0, 0.08), (3, -2, 0.04)])
        .unwrap()
}

#[test]
fn schwarzschild_sphere_frame() {
    let (m, r0) = (0.5, 3.0);
    let mesh = mesh(Ambient::schwarzschild(m).unwrap(), StarShaped::sphere(0.0, r0), 12, 24);
    let ff = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    let f = (1.0 - 2.0 * m / r0).sqrt();
    for (pg, nf) in mesh.nodes.iter().zip(&ff.nodes) {
        let c = (nf.frame.chi - pg.sigma * (f / r0)).amax();
        let cb = (nf.frame.chibar + pg.sigma * (f / r0)).amax();
        assert!(c < 1e-12 && cb < 1e-12, "{c} {cb}");
        assert!(nf.frame.zeta.amax() < 1e-12);
        assert!((nf.h_lbar - 2.0 * f / r0).abs() < 1e-12);
        assert!((nf.h_l + 2.0 * f / r0).abs() < 1e-12);
        // Q(L, L̄) = 2r on spheres of symmetry.
        assert!((nf.q_llbar - 2.0 * r0).abs() < 1e-12, "{}", nf.q_llbar);
    }
    assert!((mesh.area() - 4.0 * PI * r0 * r0).abs() < 1e-10);
    let d = ff.invariant_defects();
    assert!(d.null < 1e-13 && d.orthogonal < 1e-13 && d.reconstruction < 1e-12 && d.symmetry < 1e-12);
}

#[test]
fn frame_invariants_on_tilted_graph() {
    let mesh = mesh(Ambient::schwarzschild(0.4).unwrap(), tilted(), 10, 20);
    for gauge in [Gauge::Slice, Gauge::MeanCurvature, Gauge::Cone { lmax: 6 }] {
        let ff = NullFrameField::build(mesh.clone(), gauge).unwrap();
        let d = ff.invariant_defects();
        assert!(d.null < 1e-12, "{d:?}");
        assert!(d.orthogonal < 1e-12, "{d:?}");
        assert!(d.reconstruction < 1e-11, "{d:?}");
        assert!(d.symmetry < 1e-11, "{d:?}");
    }
}

/// `ζ_a = ½⟨∂_a L + Γ(∂_a, L), L̄⟩` with `∂_a L` taken by central differences.
#[test]
fn torsion_matches_differenced_frame() {
    let mesh = mesh(Ambient::schwarzschild(0.4).unwrap(), tilted(), 8, 16);
    let ff = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    let h = 1e-4;
    for i in (0..mesh.len()).step_by(7) {
        let pg = &mesh.nodes[i];
        let nf = &ff.nodes[i].frame;
        let l_at = |p: f64, q: f64| -> Vector4<f64> {
            let g = mesh.geometry_at(i, p, q).unwrap();
            PointFrame::compute(&g, 0.0, Vector2::zeros()).unwrap().l
        };
        for a in 0..2 {
            let (dp, dq) = if a == 0 { (h, 0.0) } else { (0.0, h) };
            let dl = (l_at(dp, dq) * 8.0 - l_at(-dp, -dq) * 8.0 - l_at(2.0 * dp, 2.0 * dq)
                + l_at(-2.0 * dp, -2.0 * dq))
                / (12.0 * h);
            let cov = dl + gamma_apply(&pg.gamma, &pg.tangents[a], &nf.l);
            let zeta = 0.5 * pg.dot(&cov, &nf.lbar);
            assert!((zeta - nf.zeta[a]).abs() < 1e-8, "{zeta} vs {}", nf.zeta[a]);
        }
    }
}

#[test]
fn rescaling_is_covariant() {
    let mesh = mesh(Ambient::schwarzschild(0.3).unwrap(), tilted(), 8, 16);
    let u = SphereField::from_modes(0.1, &[(1, 1, 0.2), (2, -1, 0.15)]).unwrap();
    let slice = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    let resc = NullFrameField::build(mesh.clone(), Gauge::Rescaled(u.clone())).unwrap();
    for i in 0..mesh.len() {
        let uj = u.eval(&mesh.charts[i].unit_jets(0.0, 0.0));
        let a = uj.v.exp();
        let (s, r) = (&slice.nodes[i].frame, &resc.nodes[i].frame);
        assert!((r.chi - s.chi * a).amax() < 1e-11);
        assert!((r.chibar - s.chibar / a).amax() < 1e-11);
        let expect = s.zeta - Vector2::new(uj.g[0], uj.g[1]);
        assert!((r.zeta - expect).amax() < 1e-12);
        // ⟨H,L⟩⟨H,L̄⟩ is gauge invariant.
        let hh = slice.nodes[i].h_l * slice.nodes[i].h_lbar;
        assert!((resc.nodes[i].h_l * resc.nodes[i].h_lbar - hh).abs() < 1e-11);
    }
}

#[test]
fn boosted_sphere_is_a_round_sphere() {
    let rho = 2.0;
    let mesh = mesh(
        Ambient::minkowski(),
        BoostedSphere { t0: 0.0, radius: rho, beta: 0.6 },
        16,
        32,
    );
    let ff = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    assert!((mesh.area() - 4.0 * PI * rho * rho).abs() < 1e-10);
    for (pg, nf) in mesh.nodes.iter().zip(&ff.nodes) {
        let hh = pg.dot(&pg.h, &pg.h);
        assert!((hh - 4.0 / (rho * rho)).abs() < 1e-12);
        assert!((-nf.h_l * nf.h_lbar - hh).abs() < 1e-12);
    }
}

/// Gauss equation in flat space gives `R = χ·χ̄ − trχ trχ̄`; its integral is `8π`.
#[test]
fn gauss_bonnet_on_ellipsoid() {
    let mesh = mesh(
        Ambient::minkowski(),
        Ellipsoid::with_eccentricity(0.0, 2.0, 0.7).unwrap(),
        48,
        96,
    );
    let ff = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    let total = ff
        .integrate(|_, pg, nf| {
            let si = pg.sigma_inv;
            let (c, cb) = (nf.frame.chi, nf.frame.chibar);
            (si * c * si * cb).trace() - (si * c).trace() * (si * cb).trace()
        })
        .unwrap();
    assert!((total - 8.0 * PI).abs() < 1e-8, "{}", total - 8.0 * PI);
}

fn structure_residuals(mesh: Arc<SurfaceMesh>) -> [f64; 4] {
    let ff = NullFrameField::build(mesh, Gauge::Slice).unwrap();
    let d = derived_fields(&ff, &DerivedOptions::default()).unwrap();
    let worst = |f: &dyn Fn(&nullgeom::surface::DerivedNode) -> f64| d.iter().map(f).fold(0.0, f64::max);
    [
        worst(&|n| n.codazzi / n.codazzi_scale),
        worst(&|n| n.codazzi_bar / n.codazzi_scale),
        worst(&|n| n.ricci.abs() / n.ricci_scale),
        worst(&|n| n.gauss.abs() / n.gauss_scale),
    ]
}

#[test]
fn structure_equations_hold() {
    let m = mesh(Ambient::schwarzschild(0.4).unwrap(), tilted(), 12, 24);
    let e = structure_residuals(m);
    assert!(e.iter().all(|&x| x < 1e-8), "{e:?}");
}

#[test]
fn structure_residuals_are_fourth_order_in_the_stencil_step() {
    let amb = Ambient::schwarzschild(0.4).unwrap();
    let at = |h: f64| {
        let m = SurfaceMesh::build(amb.clone(), Arc::new(tilted()), 6, 12).unwrap();
        structure_residuals(Arc::new(m.with_stencil_step(h).unwrap()))
    };
    let (coarse, fine) = (at(0.2), at(0.1));
    for k in 0..4 {
        assert!(fine[k] < coarse[k] / 10.0, "{coarse:?} {fine:?}");
    }
}

#[test]
fn intrinsic_curvature_integrates_to_euler_characteristic() {
    let mesh = mesh(Ambient::schwarzschild(0.3).unwrap(), tilted(), 24, 48);
    let ff = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    let d = derived_fields(&ff, &DerivedOptions::default()).unwrap();
    let r: Vec<f64> = d.iter().map(|n| n.scalar_curvature).collect();
    let total = mesh.integrate(&r).unwrap();
    assert!((total - 8.0 * PI).abs() < 1e-7, "{}", total - 8.0 * PI);
}

#[test]
fn mean_curvature_gauge_on_spheres() {
    let mesh = mesh(Ambient::schwarzschild(0.5).unwrap(), StarShaped::sphere(0.0, 3.0), 8, 16);
    let rep = mean_curvature_gauge_report(&mesh).unwrap();
    assert!(rep.alpha_max < 1e-10);
    assert!(rep.h_spread < 1e-12);
}

/// On sections of a Minkowski light cone `⟨H, L̄⟩` is constant for `L̄` along the
/// generators and `ζ` is exact, so the mean-curvature connection is `+d log|H|`.
#[test]
fn mean_curvature_gauge_on_cone_sections() {
    let cone = ConeSection::new(StaticFamily::minkowski(3), 5.0, 2.0, &[(1, 0, 0.15), (2, 2, 0.1)]).unwrap();
    let mesh = mesh(Ambient::minkowski(), cone, 12, 24);
    let rep = mean_curvature_gauge_report(&mesh).unwrap();
    assert!(rep.scale > 0.05);
    assert!(rep.residual_plus / rep.scale < 1e-8, "{}", rep.residual_plus);
    assert!(rep.residual_minus / rep.scale > 0.1);
}

#[test]
fn cone_gauge_removes_torsion_on_cone_sections() {
    let cone = ConeSection::new(StaticFamily::minkowski(3), 5.0, 2.0, &[(1, 1, 0.1), (2, 0, 0.1)]).unwrap();
    let mesh = mesh(Ambient::minkowski(), cone, 16, 32);
    let slice = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
    assert!(slice.max_torsion() > 1e-2);
    let ff = NullFrameField::build(mesh.clone(), Gauge::Cone { lmax: 15 }).unwrap();
    let resid = ff.cone_fit_residual.unwrap();
    assert!(resid < 1e-6, "{resid}");
    assert!((ff.max_torsion() - resid).abs() < 1e-15);
}

#[test]
fn tabulated_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surface.csv");
    let grid = SphereGrid::new(12, 24).unwrap();
    let imm = tilted();
    write_tabulated(&path, &grid, &imm).unwrap();
    let fitted = read_tabulated(&path, &grid).unwrap();
    let probe = SphereGrid::new(7, 13).unwrap();
    for i in 0..probe.len() {
        let u = probe.unit(i).map(nullgeom::jet::Jet2::constant);
        let (a, b) = (imm.position(&u), fitted.position(&u));
        for c in 0..4 {
            assert!((a[c].v - b[c].v).abs() < 1e-10);
        }
    }
}

#[test]
fn tabulated_rejects_missing_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.csv");
    std::fs::write(&path, "theta_index,phi_index,t,r,Theta,Phi\n0,0,0,1,0.5,0.1\n").unwrap();
    let grid = SphereGrid::new(4, 8).unwrap();
    assert!(read_tabulated(&path, &grid).is_err());
}

#[test]
fn timelike_surface_is_rejected() {
    // t = 3 u_z over a unit sphere has timelike directions near the equator.
    let imm = StarShaped::tilted_graph(0.0, &[(1, 0, 3.0)], 1.0, &[]).unwrap();
    let err = SurfaceMesh::build(Ambient::minkowski(), Arc::new(imm), 8, 16).unwrap_err();
    assert!(matches!(err, nullgeom::GeomError::NotSpacelike { .. }), "{err}");
}

#[test]
fn harmonics_are_orthonormal() {
    let grid = SphereGrid::new(12, 24).unwrap();
    let lmax = max_degree(&grid).min(8);
    for (l1, m1) in [(0, 0), (1, -1), (3, 2), (5, -4), (8, 8)] {
        let f = SphereField::from_modes(0.0, &[(l1, m1, 1.0)]).unwrap();
        let vals = synthesize(&grid, &f);
        for (l2, m2) in [(0, 0), (1, -1), (3, 2), (5, -4), (8, 8), (4, 0)] {
            let g = SphereField::from_modes(0.0, &[(l2, m2, 1.0)]).unwrap();
            let w = synthesize(&grid, &g);
            let prod: Vec<f64> = vals.iter().zip(&w).map(|(a, b)| a * b).collect();
            let ip = grid.integrate_round(&prod);
            let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((ip - expect).abs() < 1e-12, "({l1},{m1}) ({l2},{m2}) {ip}");
        }
        let back = analyze(&grid, &vals, lmax).unwrap();
        assert!((back.coeffs[index(l1, m1)] - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn analysis_inverts_synthesis(c in proptest::collection::vec(-1.0f64..1.0, 36)) {
        let grid = SphereGrid::new(8, 16).unwrap();
        let lmax = 5;
        let mut f = SphereField::zero(lmax);
        f.coeffs.copy_from_slice(&c);
        let back = analyze(&grid, &synthesize(&grid, &f), lmax).unwrap();
        for (a, b) in back.coeffs.iter().zip(&f.coeffs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_rescaling_preserves_null_expansion_product(
        s in 0.01f64..0.3, b in 0.0f64..0.3, m in 0.0f64..0.4
    ) {
        let amb = Ambient::schwarzschild(m).unwrap();
        let imm = StarShaped::tilted_graph(0.0, &[(1, 1, b)], 4.0, &[(2, 0, 0.05)]).unwrap();
        let mesh = mesh(amb, imm, 6, 12);
        let u = SphereField::from_modes(0.0, &[(1, 0, s)]).unwrap();
        let a = NullFrameField::build(mesh.clone(), Gauge::Slice).unwrap();
        let r = NullFrameField::build(mesh, Gauge::Rescaled(u)).unwrap();
        for (x, y) in a.nodes.iter().zip(&r.nodes) {
            prop_assert!((x.h_l * x.h_lbar - y.h_l * y.h_lbar).abs() < 1e-10);
            prop_assert!((x.q_llbar - y.q_llbar).abs() < 1e-10);
        }
    }
}
