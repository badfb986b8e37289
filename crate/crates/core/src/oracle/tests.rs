use super::*;
use crate::geometry::{omega_c, Density, Dim, Monomial, Region, SourceComponent, SourceSpec, SpatialDomain};
use crate::indicator::indicator;
use crate::probes::ProbeField;
use crate::quad::adaptive_gk;
use crate::solver::{solve_forward, BoundaryCondition, Grid};
use crate::Error;
use alloc::vec;
use alloc::vec::Vec;
use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn cone(angle: f64, c: f64, delta: f64, tri: [[f64; 2]; 3]) -> (ConeSpec, [f64; 2]) {
    let omega = [angle.cos(), angle.sin()];
    let dir = omega_c(Dim::Two, omega, c).unwrap();
    let cone = ConeSpec::from_plane_coords(dir, vec![0.3, -0.2, 0.7], delta, &tri).unwrap();
    (cone, [-omega[1], omega[0]])
}

#[test]
fn cone_moment_values() {
    assert_eq!(cone_moment(2, 0.0).unwrap(), Complex64::new(2.0, 0.0));
    assert_eq!(cone_moment(20, 0.0).unwrap().re, 2432902008176640000.0);
    let v = cone_moment(0, 1.0).unwrap();
    assert_relative_eq!(v.re, 0.5, epsilon = 1e-15);
    assert_relative_eq!(v.im, 0.5, epsilon = 1e-15);
    let q = adaptive_gk(|x| Complex64::new(0.0, 2.0 * x).exp() * x.powi(3) * (-x).exp(), 0.0, 60.0, 1e-14, 1e-13, 400);
    assert!(rel(cone_moment(3, 2.0).unwrap(), q.value) < 1e-8);
    assert!(cone_moment(21, 0.0).is_err());
}

#[test]
fn thin_base_reduces_to_constant_integrand() {
    // a base collapsing onto the line (y − p)·(ω⊥, 0) = 0
    let w = 1e-7;
    let (cn, perp) = cone(0.4, 1.3, 0.5, [[-w, -0.5], [w, -0.5], [0.0, 0.6]]);
    let kd = kd_quadrature(&cn, perp).unwrap();
    let a = 1.3f64.hypot(1.0);
    let expect = 2.0 * 0.5 * cn.base_measure() * (1.3 / (0.5 * a)).powi(3);
    assert!(rel(kd.value, Complex64::new(expect, 0.0)) < 1e-6);
}

#[test]
fn regular_tetrahedron_closed_form() {
    let r = 0.8;
    let tri: [[f64; 2]; 3] = core::array::from_fn(|k| {
        let th = 2.0 * core::f64::consts::PI * k as f64 / 3.0;
        [r * th.cos(), r * th.sin()]
    });
    let (cn, perp) = cone(0.0, 1.0, r * 2f64.sqrt(), tri);
    let q = kd_quadrature(&cn, perp).unwrap();
    let f = kd_closed_form(&cn, perp).unwrap();
    assert!(rel(f.value, q.value) < 1e-6, "{:?} vs {:?}", f.value, q.value);
    assert!(f.residual < 1e-8);
}

#[test]
fn flat_cone_is_rejected() {
    let dir = omega_c(Dim::Two, [1.0, 0.0], 1.0).unwrap();
    let r = ConeSpec::from_plane_coords(dir.clone(), vec![0.0, 0.0, 0.0], 0.0, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    assert!(matches!(r, Err(Error::Degenerate(_))));
    let r = ConeSpec::from_plane_coords(dir, vec![0.0, 0.0, 0.0], 0.5, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
    assert!(matches!(r, Err(Error::Degenerate(_))));
}

#[test]
fn kd_rejects_bad_perp() {
    let (cn, _) = cone(0.0, 1.0, 0.5, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    assert!(matches!(kd_quadrature(&cn, [1.0, 0.0]), Err(Error::NotOrthogonal { .. })));
    assert!(matches!(kd_closed_form(&cn, [0.0, 2.0]), Err(Error::NonUnitDirection { .. })));
}

#[test]
fn limit_sample_approaches_kd() {
    let (cn, perp) = cone(0.7, 1.0, 0.6, [[-0.4, -0.3], [0.5, -0.2], [0.1, 0.6]]);
    let kd = kd_closed_form(&cn, perp).unwrap().value;
    let errs: Vec<f64> = [50.0, 100.0, 200.0, 400.0].iter().map(|&t| rel(kd_limit_sample(&cn, perp, t).unwrap(), kd)).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 0.02);
    // O(1/τ): halving per doubling
    assert!((errs[2] / errs[3] - 2.0).abs() < 0.3, "{errs:?}");
}

fn segment_quadrature(y0: [f64; 2], y1: [f64; 2], p: [f64; 2], sp: &SegmentParams, g: [f64; 2]) -> (Complex64, Complex64) {
    let a = (sp.c * sp.c + 1.0).sqrt();
    let len = (y1[0] - y0[0]).hypot(y1[1] - y0[1]);
    let at = |e: f64| [y0[0] + e * (y1[0] - y0[0]), y0[1] + e * (y1[1] - y0[1])];
    let w = |e: f64| Complex64::new(a, -segment_b(at(e), p, sp).unwrap());
    let j1 = adaptive_gk(|e| w(e).powi(-2) * len, 0.0, 1.0, 1e-16, 1e-13, 2000).value;
    let j2 = adaptive_gk(
        |e| {
            let y = at(e);
            w(e).powi(-3) * (2.0 * len * (g[0] * (y[0] - p[0]) + g[1] * (y[1] - p[1])))
        },
        0.0,
        1.0,
        1e-16,
        1e-13,
        2000,
    )
    .value;
    (j1, j2)
}

#[test]
fn segment_with_zero_b() {
    let sp = SegmentParams { c: 1.5, delta: 0.4, tau: 30.0 };
    let p = [0.2, 0.3];
    // (y − p)·(1, −2cτ) = 0 along (2cτ, 1)
    let d = [2.0 * 1.5 * 30.0, 1.0];
    let y0 = [p[0] + 0.01 * d[0], p[1] + 0.01 * d[1]];
    let y1 = [p[0] - 0.02 * d[0], p[1] - 0.02 * d[1]];
    let (j1, _) = segment_integrals(y0, y1, p, &sp, [1.0, 0.0]).unwrap();
    let len = 0.03 * d[0].hypot(d[1]);
    assert!(rel(j1, Complex64::new(len / (1.5f64 * 1.5 + 1.0), 0.0)) < 1e-14);
}

#[test]
fn near_equal_b_uses_the_series() {
    let sp = SegmentParams { c: 1.0, delta: 0.5, tau: 50.0 };
    let p = [0.5, 0.5];
    let y0 = [0.3, 0.45];
    // nearly parallel to the level lines of B
    let y1 = [0.3 + 2.0 * 50.0 * 1e-3, 0.45 + 1e-3 + 1e-9];
    let g = [0.7, -1.1];
    let (j1, j2) = segment_integrals(y0, y1, p, &sp, g).unwrap();
    let (q1, q2) = segment_quadrature(y0, y1, p, &sp, g);
    assert!(rel(j1, q1) < 1e-9);
    assert!(rel(j2, q2) < 1e-9);
}

#[test]
fn volume_oracle_matches_boundary_indicator() {
    let dom = SpatialDomain::interval(0.0, 1.0).unwrap();
    let spec = SourceSpec::new(
        Dim::One,
        vec![SourceComponent::new(Region::interval(0.4, 0.6), 0.25, Density::constant(1.0)).unwrap()],
        1.0,
        0.0,
    )
    .unwrap();
    let grid = Grid::new(&dom, [200, 0], 2000, 1.0).unwrap();
    let (data, snap) = solve_forward(&dom, &spec, &grid, BoundaryCondition::Neumann0).unwrap();
    for omega in [1.0, -1.0] {
        let probe = ProbeField::real(Dim::One, [omega, 0.0], 40.0).unwrap();
        let b = indicator(&data, &probe, 0.0).unwrap();
        let v = volume_indicator(&spec, &snap, &probe, 0.0).unwrap();
        assert!(((b.log_abs - v.log_abs).exp() - 1.0).abs() < 0.05);
        let ft = final_time_bound(&snap, &probe, 0.25).unwrap();
        assert!(ft.holds());
    }
    // zero source
    let empty = SourceSpec::new(Dim::One, vec![], 1.0, 0.0).unwrap();
    let (_, snap0) = solve_forward(&dom, &empty, &grid, BoundaryCondition::Neumann0).unwrap();
    let probe = ProbeField::real(Dim::One, [1.0, 0.0], 40.0).unwrap();
    assert!(volume_indicator(&empty, &snap0, &probe, 0.0).unwrap().floor_hit);
}

#[test]
fn polygon_source_term_matches_prism_moments() {
    // constant ρ on a triangle with a real probe: ∫ e^{√τ x·ω} over the triangle
    // against an adaptive 1D integral over x of the vertical chord length
    let tri = Region::polygon(vec![[0.2, 0.2], [0.7, 0.3], [0.4, 0.8]]);
    let spec = SourceSpec::new(
        Dim::Two,
        vec![SourceComponent::new(tri, 0.3, Density::new(vec![Monomial::new(2.0, [0, 0, 0])])).unwrap()],
        1.0,
        0.0,
    )
    .unwrap();
    let tau = 60.0;
    let probe = ProbeField::real(Dim::Two, [1.0, 0.0], tau).unwrap();
    let got = source_term(&spec, &probe, None).unwrap().value().to_complex();
    let chord = |x: f64| {
        let lo = if x < 0.7 { 0.2 + 0.2 * (x - 0.2) } else { 0.0 };
        let hi = if x < 0.4 { 0.2 + 3.0 * (x - 0.2) } else { 0.8 - (x - 0.4) * 5.0 / 3.0 };
        hi - lo
    };
    let space = adaptive_gk(|x| Complex64::new(chord(x) * (tau.sqrt() * x).exp(), 0.0), 0.2, 0.7, 1e-14, 1e-13, 500).value.re;
    let time = ((-tau * 0.3f64).exp() - (-tau * 1.0f64).exp()) / tau;
    assert_relative_eq!(got.re, 2.0 * space * time, max_relative = 1e-9);
    assert!(got.im.abs() < 1e-12 * got.re.abs());
}

#[test]
fn band_holds_and_is_sign_symmetric() {
    let dom = SpatialDomain::interval(0.0, 1.0).unwrap();
    let make = |rho: f64| {
        SourceSpec::new(
            Dim::One,
            vec![SourceComponent::new(Region::interval(0.4, 0.6), 0.25, Density::constant(rho)).unwrap()],
            1.0,
            0.0,
        )
        .unwrap()
    };
    let taus: Vec<f64> = (0..12).map(|k| 20.0 * 6f64.powf(k as f64 / 11.0)).collect();
    let a = onset_band(&dom, &make(1.0), [1.0, 0.0], &taus, 0.25).unwrap();
    let b = onset_band(&dom, &make(-1.0), [1.0, 0.0], &taus, 0.25).unwrap();
    assert!(a.holds);
    assert_eq!(a.k[1], 0.0);
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_relative_eq!(x.log_value, y.log_value, epsilon = 1e-12);
    }
    let mixed = SourceSpec::new(
        Dim::One,
        vec![SourceComponent::new(Region::interval(0.4, 0.6), 0.25, Density::new(vec![Monomial::new(1.0, [0, 0, 0]), Monomial::new(-2.0, [1, 0, 0])]))
            .unwrap()],
        1.0,
        0.0,
    );
    // 1 − 2x changes sign at x = 0.5 inside the interval
    let mixed = mixed.unwrap();
    assert!(matches!(onset_band(&dom, &mixed, [1.0, 0.0], &taus, 0.25), Err(Error::MixedSignDensity)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_agrees_with_quadrature(
        angle in 0.0..6.28f64,
        ci in 0usize..4,
        delta in 0.2..1.0f64,
        pts in proptest::array::uniform6(-1.0..1.0f64),
    ) {
        let tri = [[pts[0], pts[1]], [pts[2], pts[3]], [pts[4], pts[5]]];
        let area = 0.5 * ((tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1])).abs();
        prop_assume!(area > 0.05);
        let c = [0.5, 1.0, 2.0, 4.0][ci];
        let (cn, perp) = cone(angle, c, delta, tri);
        let q = kd_quadrature(&cn, perp).unwrap();
        let f = kd_closed_form(&cn, perp).unwrap();
        prop_assert!(rel(f.value, q.value) < 1e-6);
        prop_assert!(f.value.norm() > 0.0);
    }

    #[test]
    fn kd_is_scale_invariant(angle in 0.0..6.28f64, delta in 0.2..1.0f64, s in 0.3..3.0f64) {
        let tri = [[-0.4, -0.3], [0.5, -0.2], [0.1, 0.6]];
        let (a, perp) = cone(angle, 1.0, delta, tri);
        let scaled: Vec<[f64; 2]> = tri.iter().map(|p| [s * p[0], s * p[1]]).collect();
        let dir = a.direction().clone();
        let b = ConeSpec::from_plane_coords(dir, a.vertex().to_vec(), s * delta, &scaled).unwrap();
        let ka = kd_quadrature(&a, perp).unwrap().value;
        let kb = kd_quadrature(&b, perp).unwrap().value;
        prop_assert!(rel(kb, ka) < 1e-9);
    }

    #[test]
    fn segment_closed_forms_agree_with_quadrature(
        c in prop_oneof![-2.0..-0.5f64, 0.5..2.0f64],
        delta in 0.1..0.8f64,
        tau in 10.0..80.0f64,
        px in 0.0..1.0f64,
        pt in 0.3..1.0f64,
        s0 in -0.5..0.5f64,
        s1 in -0.5..0.5f64,
        g in proptest::array::uniform2(-2.0..2.0f64),
    ) {
        prop_assume!((s1 - s0).abs() > 1e-3);
        let a = (c * c + 1.0).sqrt();
        let dir = omega_c(Dim::One, [1.0, 0.0], c).unwrap();
        let w = dir.vector();
        let p = [px, pt];
        let foot = [p[0] - delta * w[0], p[1] - delta * w[1]];
        let e = [1.0 / a, c / a];
        let y0 = [foot[0] + s0 * e[0], foot[1] + s0 * e[1]];
        let y1 = [foot[0] + s1 * e[0], foot[1] + s1 * e[1]];
        let sp = SegmentParams { c, delta, tau };
        let (j1, j2) = segment_integrals(y0, y1, p, &sp, g).unwrap();
        let (q1, q2) = segment_quadrature(y0, y1, p, &sp, g);
        prop_assert!(rel(j1, q1) < 1e-9);
        prop_assert!((j2 - q2).norm() < 1e-9 * q2.norm().max(j1.norm()));
    }
}
