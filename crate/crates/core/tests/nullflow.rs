use std::f64::consts::PI;
use std::sync::Arc;

use nullgeom::harmonics::analyze;
use nullgeom::nullflow::*;
use nullgeom::quadrature::SphereGrid;
use nullgeom::surface::{Ambient, Gauge, Immersion, NullFrameField, StarShaped, SurfaceMesh};
use nullgeom::verify::{heintze_karcher, HkDirection, Verdict};
use nullgeom::GeomError;

fn field_at(amb: Ambient, imm: impl Immersion + 'static, nt: usize, gauge: Gauge) -> NullFrameField {
    let mesh = Arc::new(SurfaceMesh::build(amb, Arc::new(imm), nt, 2 * nt).unwrap());
    NullFrameField::build(mesh, gauge).unwrap()
}

fn schwarzschild() -> Ambient {
    Ambient::schwarzschild(1.0).unwrap()
}

fn perturbed() -> StarShaped {
    StarShaped::tilted_graph(0.0, &[(1, 0, 0.2)], 4.0, &[(2, 0, 0.06), (3, 1, 0.04)]).unwrap()
}

fn flow(field: NullFrameField, ds: f64, steps: usize) -> FlowTrace {
    evolve(FlowState::initial(field).unwrap(), ds, steps).unwrap()
}

/// Band-limited fit of `log(1 + ½ sin θ)`.
fn half_sine_gauge() -> Gauge {
    let grid = SphereGrid::new(32, 64).unwrap();
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let u = grid.unit(i);
            (1.0 + 0.5 * (u[0] * u[0] + u[1] * u[1]).sqrt()).ln()
        })
        .collect();
    Gauge::Rescaled(analyze(&grid, &values, 24).unwrap())
}

#[test]
fn f_vanishes_on_spheres_of_symmetry() {
    for (amb, r0) in [(schwarzschild(), 4.0), (schwarzschild(), 9.0), (Ambient::minkowski(), 2.0)] {
        let f = f_functional(&field_at(amb, StarShaped::sphere(0.0, r0), 16, Gauge::Slice)).unwrap();
        assert!(f.abs() < 1e-7, "F = {f} at r0 = {r0}");
    }
}

#[test]
fn f_is_gauge_invariant() {
    let plain = f_functional(&field_at(schwarzschild(), perturbed(), 24, Gauge::Slice)).unwrap();
    let scaled = f_functional(&field_at(schwarzschild(), perturbed(), 24, half_sine_gauge())).unwrap();
    assert!((plain - scaled).abs() < 1e-9 * plain.abs().max(1.0), "{plain} vs {scaled}");
    assert!(plain.abs() > 1.0, "the perturbed surface should have F far from zero");
}

/// `F = (n−1)/n∫⟨ξ,L̄⟩/⟨H,L̄⟩ − ½∫Q` with `ξ = −n∂_t` is the future Heintze–Karcher value.
#[test]
fn f_equals_the_future_heintze_karcher_value() {
    let field = field_at(schwarzschild(), perturbed(), 24, Gauge::Slice);
    let f = f_functional(&field).unwrap();
    let hk = heintze_karcher(&field, HkDirection::FutureIncoming).unwrap();
    assert!((f - hk.residual).abs() < 1e-10 * hk.scale, "{f} vs {}", hk.residual);
}

#[test]
fn f_needs_positive_expansion() {
    // Untrapped spheres always have ⟨H,L̄⟩ > 0, so flip the sign at one node.
    let mut bad = field_at(Ambient::minkowski(), StarShaped::sphere(0.0, 1.0), 8, Gauge::Slice);
    bad.nodes[5].h_lbar = -1.0;
    match f_functional(&bad) {
        Err(GeomError::Precondition(msg)) => assert!(msg.contains("1 nodes"), "{msg}"),
        other => panic!("expected a precondition error, got {other:?}"),
    }
    assert!(matches!(
        FlowState::initial(bad),
        Err(GeomError::Precondition(_))
    ));
}

/// Radial null geodesics of a static metric starting from `L̄` in the slice gauge:
/// `r(s) = r₀ − f₀s` and `⟨H,L̄⟩ = 2f₀/r(s)`, with `f₀ = √(1 − 2m/r₀)`.
#[test]
fn spheres_flow_along_the_spherical_oracle() {
    for (amb, m, r0) in [(schwarzschild(), 1.0, 4.0), (Ambient::minkowski(), 0.0, 3.0)] {
        let field = field_at(amb, StarShaped::sphere(0.0, r0), 16, Gauge::Slice);
        let ds = default_step(&field);
        assert!((ds - 0.01 * r0).abs() < 1e-12);
        let trace = flow(field, ds, 20);
        assert!(trace.termination.is_none());
        assert_eq!(trace.states.len(), 21);
        let f0 = (1.0 - 2.0 * m / r0).sqrt();
        for st in &trace.states {
            let r = &st.record;
            let rs = r0 - f0 * r.s;
            assert!((r.min_h_lbar - 2.0 * f0 / rs).abs() < 1e-8, "s = {}", r.s);
            assert!((r.area - 4.0 * PI * rs * rs).abs() < 1e-6 * rs * rs, "s = {}", r.s);
            assert!(r.f_value.abs() < 1e-7, "F = {} at s = {}", r.f_value, r.s);
        }
        assert!(trace.max_null_defect() < 1e-9);
        for rep in [
            trace.monotonicity_report(),
            trace.q_rate_report().unwrap(),
            trace.ratio_rate_report().unwrap(),
            trace.raychaudhuri_report().unwrap(),
        ] {
            assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        }
    }
}

#[test]
fn perturbed_sphere_decreases_f() {
    let field = field_at(schwarzschild(), perturbed(), 24, Gauge::Slice);
    let ds = default_step(&field);
    let trace = flow(field, ds, 20);
    assert!(trace.termination.is_none());
    let f: Vec<f64> = trace.records().iter().map(|r| r.f_value).collect();
    for w in f.windows(2) {
        assert!(w[1] < w[0], "F rose from {} to {}", w[0], w[1]);
    }
    let mono = trace.monotonicity_report();
    assert_eq!(mono.verdict, Verdict::Pass);
    // Strict decrease, two orders above the tolerance.
    assert!(mono.residual > 1e-5 * mono.scale, "{mono:?}");
    for rep in [
        trace.q_rate_report().unwrap(),
        trace.ratio_rate_report().unwrap(),
        trace.raychaudhuri_report().unwrap(),
    ] {
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    }
    // The projection fixes only a tiny drift off the null cone.
    assert!(trace.max_null_defect() < 1e-9);
    for r in trace.records() {
        assert!(r.normal_defect < 1e-5 && r.fit_defect < 1e-5, "{r:?}");
    }
}

#[test]
fn raychaudhuri_residual_converges_at_fourth_order() {
    let s_end = 0.8;
    let mut prev: Option<f64> = None;
    for ds in [0.2, 0.1, 0.05] {
        let n = (s_end / ds as f64).round() as usize;
        let trace = flow(field_at(schwarzschild(), perturbed(), 32, Gauge::Slice), ds, n);
        let res = trace.raychaudhuri_residual(n / 2).unwrap();
        if let Some(p) = prev {
            let order = (p / res).log2();
            assert!(order > 3.5, "order {order} at ds = {ds}");
        }
        prev = Some(res);
    }
}

#[test]
fn rate_checks_need_five_states() {
    let trace = flow(field_at(schwarzschild(), StarShaped::sphere(0.0, 4.0), 8, Gauge::Slice), 0.04, 3);
    assert!(matches!(trace.q_rate_report(), Err(GeomError::Precondition(_))));
    assert!(matches!(trace.raychaudhuri_residual(1), Err(GeomError::Precondition(_))));
    assert_eq!(trace.monotonicity_report().verdict, Verdict::Pass);
}

#[test]
fn trace_is_written_as_csv() {
    let trace = flow(field_at(schwarzschild(), StarShaped::sphere(0.0, 4.0), 8, Gauge::Slice), 0.04, 4);
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    for col in ["step", "s", "F", "min_h_lbar", "area"] {
        assert!(header.split(',').any(|h| h == col), "missing column {col} in {header}");
    }
    let rows: Vec<FlowRecord> = csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows, trace.records());
    assert_eq!(lines.count(), 5);
}

#[test]
fn crossing_the_horizon_is_a_domain_error() {
    // r(s) = 2.2 − 0.30 s reaches r = 2 before s = 0.7.
    let field = field_at(schwarzschild(), StarShaped::sphere(0.0, 2.2), 8, Gauge::Slice);
    match evolve(FlowState::initial(field).unwrap(), 0.1, 10) {
        Err(GeomError::Domain(_)) => {}
        other => panic!("expected a domain error, got {:?}", other.map(|t| t.termination)),
    }
}

#[test]
fn minkowski_sphere_stops_at_the_caustic() {
    // r(s) = 1 − s; the area fraction drops below 1e-3 once r < 0.0316.
    let field = field_at(Ambient::minkowski(), StarShaped::sphere(0.0, 1.0), 8, Gauge::Slice);
    let trace = flow(field, 0.0245, 45);
    match &trace.termination {
        Some(Termination::Caustic { step, area }) => {
            assert_eq!(*step, 40);
            assert!(*area < CAUSTIC_AREA_FRACTION * 4.0 * PI);
        }
        other => panic!("expected a caustic, got {other:?}"),
    }
    let warn = trace.monotonicity_report().warnings;
    assert!(warn.iter().any(|w| w.contains("terminated early")), "{warn:?}");
}

#[test]
fn flow_rejects_bad_steps() {
    let state = FlowState::initial(field_at(schwarzschild(), StarShaped::sphere(0.0, 4.0), 8, Gauge::Slice)).unwrap();
    for ds in [0.0, -0.1, f64::NAN] {
        assert!(matches!(evolve(state.clone(), ds, 3), Err(GeomError::Config(_))));
    }
}

#[test]
fn flow_is_deterministic() {
    let run = || {
        let trace = flow(field_at(schwarzschild(), perturbed(), 12, Gauge::Slice), 0.05, 6);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(run(), run());
}
