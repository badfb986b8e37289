//! Space-time geometry: domains, source supports, directions `ω(c)`, support
//! functions and half-space intersections.
//!
//! Spatial points are `[f64; 2]`; in one dimension the second entry is unused
//! and kept at zero. Space-time points and directions are slices of length
//! `n + 1` with time last.

mod direction;
mod domain;
mod polygon;
mod polytope;
mod source;

pub use direction::{omega_c, SpaceTimeDirection};
pub use domain::{BoundaryNode, Dim, SpatialDomain};
pub use polygon::{clip_to_box, point_in_polygon, polygon_area, segments_touch, triangulate};
pub use polytope::{intersect_halfspaces, ClipBox, HalfSpace, SpaceTimePolytope};
pub use source::{Density, Monomial, Region, SourceComponent, SourceSpec};

use alloc::vec::Vec;

use crate::{Error, Result};

pub type Point = [f64; 2];

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `h_D(ω(c)) = sup_{(x,t) ∈ D} (x,t)·ω(c)` over `D = ∪ P_j × [T_j, T]`.
///
/// Exact: a linear objective over a prism attains its maximum at a vertex.
pub fn support_function(spec: &SourceSpec, dir: &SpaceTimeDirection) -> Result<f64> {
    support_maximizer(spec, dir).map(|(h, _)| h)
}

/// Support value together with a maximizing space-time vertex.
pub fn support_maximizer(spec: &SourceSpec, dir: &SpaceTimeDirection) -> Result<(f64, Vec<f64>)> {
    if spec.components().is_empty() {
        return Err(Error::EmptySource);
    }
    check_dim(spec.dim(), dir.dim())?;
    let v = dir.vector();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for comp in spec.components() {
        for p in comp.region().vertices() {
            for t in [comp.onset(), spec.final_time()] {
                let pt = space_time_point(spec.dim(), p, t);
                let val = dot(&pt, v);
                if val > best.0 {
                    best = (val, pt);
                }
            }
        }
    }
    Ok(best)
}

/// `h_D(ω(c)) − sup_{x ∈ Ω} (x, T)·ω(c)`; positive when Ω×{T} lies strictly
/// below the supporting hyperplane of `D`.
pub fn condition_margin(
    domain: &SpatialDomain,
    final_time: f64,
    spec: &SourceSpec,
    dir: &SpaceTimeDirection,
) -> Result<f64> {
    check_dim(domain.dim(), dir.dim())?;
    let h = support_function(spec, dir)?;
    let v = dir.vector();
    let top = domain
        .corners()
        .iter()
        .map(|&p| dot(&space_time_point(domain.dim(), p, final_time), v))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(h - top)
}

pub(crate) fn space_time_point(dim: Dim, x: Point, t: f64) -> Vec<f64> {
    match dim {
        Dim::One => alloc::vec![x[0], t],
        Dim::Two => alloc::vec![x[0], x[1], t],
    }
}

pub(crate) fn check_dim(expected: Dim, got: Dim) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected: expected.n(), got: got.n() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn box_spec() -> SourceSpec {
        SourceSpec::new(
            Dim::One,
            vec![SourceComponent::new(Region::interval(0.4, 0.6), 0.1, Density::constant(1.0)).unwrap()],
            1.0,
            0.0,
        )
        .unwrap()
    }

    fn triangle_spec() -> SourceSpec {
        SourceSpec::new(
            Dim::Two,
            vec![SourceComponent::new(
                Region::polygon(vec![[0.2, 0.2], [0.8, 0.2], [0.2, 0.8]]),
                0.3,
                Density::constant(1.0),
            )
            .unwrap()],
            1.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn support_of_box_prism() {
        let dir = omega_c(Dim::One, [1.0, 0.0], 1.0).unwrap();
        let h = support_function(&box_spec(), &dir).unwrap();
        assert_relative_eq!(h, 0.5 / 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(h, 0.353553, epsilon = 1e-6);
    }

    #[test]
    fn support_of_triangle_prism() {
        let dir = omega_c(Dim::Two, [1.0, 0.0], 1.0).unwrap();
        let h = support_function(&triangle_spec(), &dir).unwrap();
        assert_relative_eq!(h, 0.5 / 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn maximizer_sits_on_the_bottom_face() {
        let spec = triangle_spec();
        for &(ox, oy) in &[(1.0, 0.0), (0.0, 1.0), (-0.6, 0.8), (0.6, -0.8)] {
            for &c in &[1e-3, 0.5, 2.0, 10.0] {
                let dir = omega_c(Dim::Two, [ox, oy], c).unwrap();
                let (_, p) = support_maximizer(&spec, &dir).unwrap();
                assert_relative_eq!(p[2], 0.3);
            }
        }
    }

    #[test]
    fn small_speed_maximizer_is_onset_by_rasterization() {
        // brute force over a 200³ rasterization of D
        let spec = triangle_spec();
        let dir = omega_c(Dim::Two, [0.6, 0.8], 1e-3).unwrap();
        let v = dir.vector();
        let n = 200;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..n {
            for j in 0..n {
                let x = [0.2 + 0.6 * i as f64 / (n - 1) as f64, 0.2 + 0.6 * j as f64 / (n - 1) as f64];
                if x[0] + x[1] > 1.0 + 1e-12 {
                    continue;
                }
                for k in 0..n {
                    let t = 0.3 + 0.7 * k as f64 / (n - 1) as f64;
                    let val = x[0] * v[0] + x[1] * v[1] + t * v[2];
                    if val > best.0 {
                        best = (val, t);
                    }
                }
            }
        }
        let h = support_function(&spec, &dir).unwrap();
        assert!((best.0 - h).abs() < 1e-3);
        assert_relative_eq!(best.1, 0.3);
    }

    #[test]
    fn condition_margin_corner_cases() {
        let dom = SpatialDomain::interval(0.0, 1.0).unwrap();
        let dir = omega_c(Dim::One, [1.0, 0.0], 1.0).unwrap();
        let m = condition_margin(&dom, 1.0, &box_spec(), &dir).unwrap();
        assert_relative_eq!(m, 0.5 / 2f64.sqrt(), epsilon = 1e-12);

        let short = SourceSpec::new(
            Dim::One,
            vec![SourceComponent::new(Region::interval(0.4, 0.6), 0.1, Density::constant(1.0)).unwrap()],
            0.3,
            0.0,
        )
        .unwrap();
        let m = condition_margin(&dom, 0.3, &short, &dir).unwrap();
        assert_relative_eq!(m, -0.2 / 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn condition_margin_triangle_by_corner_enumeration() {
        let dom = SpatialDomain::rectangle([0.0, 1.0], [0.0, 1.0]).unwrap();
        let spec = SourceSpec::new(Dim::Two, triangle_spec().components().to_vec(), 2.0, 0.0).unwrap();
        let dir = omega_c(Dim::Two, [1.0, 0.0], 0.5).unwrap();
        let m = condition_margin(&dom, 2.0, &spec, &dir).unwrap();
        // oracle: h = (0.5·0.8 − 0.3)/√1.25, top = max over corners of (0.5·x − 2)/√1.25
        let s = 1.25f64.sqrt();
        let h = (0.5 * 0.8 - 0.3) / s;
        let top = [0.0f64, 1.0].iter().map(|x| (0.5 * x - 2.0) / s).fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(m, h - top, epsilon = 1e-12);
        assert!(m > 0.0);
    }

    #[test]
    fn empty_spec_has_no_support() {
        let spec = SourceSpec::new(Dim::One, vec![], 1.0, 0.0).unwrap();
        let dir = omega_c(Dim::One, [1.0, 0.0], 1.0).unwrap();
        assert_eq!(support_function(&spec, &dir), Err(Error::EmptySource));
    }
}
