//! Intersections of space-time half-spaces `(x, t)·ω(c) ≤ h` with a clip box.

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{dot, SpaceTimeDirection, SpatialDomain};
use crate::{Error, Result};

const FEAS_TOL: f64 = 1e-9;

/// `{ y : normal · y ≤ offset }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn from_direction(dir: &SpaceTimeDirection, h: f64) -> Self {
        Self { normal: dir.vector().to_vec(), offset: h }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        dot(&self.normal, y) <= self.offset + tol
    }
}

/// Axis-aligned space-time box, normally `Ω × [0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ClipBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || !(2..=3).contains(&lo.len()) {
            return Err(Error::InvalidInput("clip box must have 2 or 3 matching bounds".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput(alloc::format!("degenerate clip box {lo:?} .. {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// `Ω × [0, T]`.
    pub fn space_time(domain: &SpatialDomain, final_time: f64) -> Result<Self> {
        let n = domain.dim().n();
        let mut lo: Vec<f64> = domain.lo()[..n].to_vec();
        let mut hi: Vec<f64> = domain.hi()[..n].to_vec();
        lo.push(0.0);
        hi.push(final_time);
        Self::new(lo, hi)
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    fn faces(&self) -> Vec<HalfSpace> {
        let d = self.len();
        let mut out = Vec::with_capacity(2 * d);
        for k in 0..d {
            let mut n = alloc::vec![0.0; d];
            n[k] = -1.0;
            out.push(HalfSpace { normal: n.clone(), offset: -self.lo[k] });
            n[k] = 1.0;
            out.push(HalfSpace { normal: n, offset: self.hi[k] });
        }
        out
    }
}

/// Clip box cut by a list of half-spaces; vertices sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePolytope {
    pub halfspaces: Vec<HalfSpace>,
    pub vertices: Vec<Vec<f64>>,
    pub clip: ClipBox,
    pub empty: bool,
}

/// Intersects `clip` with `(x, t)·ω(c) ≤ h` for every sample.
pub fn intersect_halfspaces(samples: &[(SpaceTimeDirection, f64)], clip: &ClipBox) -> Result<SpaceTimePolytope> {
    let hs: Vec<HalfSpace> = samples.iter().map(|(d, h)| HalfSpace::from_direction(d, *h)).collect();
    SpaceTimePolytope::new(hs, clip.clone())
}

impl SpaceTimePolytope {
    pub fn new(halfspaces: Vec<HalfSpace>, clip: ClipBox) -> Result<Self> {
        let d = clip.len();
        if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: h.normal.len() });
        }
        let raw = if d == 2 { clip_planar(&halfspaces, &clip) } else { enumerate_3d(&halfspaces, &clip) };
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
        for v in raw {
            if !vertices.iter().any(|w| w.iter().zip(&v).all(|(x, y)| (x - y).abs() <= FEAS_TOL)) {
                vertices.push(v);
            }
        }
        vertices.sort_by(|a, b| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
        });
        let empty = vertices.is_empty();
        Ok(Self { halfspaces, vertices, clip, empty })
    }

    pub fn dim(&self) -> usize {
        self.clip.len()
    }

    /// Membership with tolerance `1e-9` against the box and every half-space.
    pub fn contains(&self, y: &[f64]) -> bool {
        !self.empty
            && y.iter().zip(&self.clip.lo).all(|(a, b)| *a >= b - FEAS_TOL)
            && y.iter().zip(&self.clip.hi).all(|(a, b)| *a <= b + FEAS_TOL)
            && self.halfspaces.iter().all(|h| h.contains(y, FEAS_TOL))
    }

    /// Counterclockwise boundary ring (planar case only).
    pub fn ring(&self) -> Option<Vec<[f64; 2]>> {
        if self.dim() != 2 || self.empty {
            return None;
        }
        let pts: Vec<[f64; 2]> = self.vertices.iter().map(|v| [v[0], v[1]]).collect();
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let mut ring = pts;
        ring.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
        Some(ring)
    }

    /// Area of a planar polytope.
    pub fn area(&self) -> Option<f64> {
        self.ring().map(|r| super::polygon_area(&r))
    }

    /// Hausdorff distance between two planar polytopes.
    ///
    /// For convex sets the distance to the other set is a convex function, so
    /// its maximum over a polygon is attained at a vertex.
    pub fn hausdorff(&self, other: &Self) -> Option<f64> {
        let a = self.ring()?;
        let b = other.ring()?;
        let one = |from: &[[f64; 2]], to: &[[f64; 2]]| {
            from.iter().map(|&p| distance_to_convex(to, p)).fold(0.0, f64::max)
        };
        Some(one(&a, &b).max(one(&b, &a)))
    }
}

fn distance_to_convex(ring: &[[f64; 2]], p: [f64; 2]) -> f64 {
    if ring.len() == 1 {
        return (p[0] - ring[0][0]).hypot(p[1] - ring[0][1]);
    }
    if ring.len() >= 3 && super::point_in_polygon(ring, p) {
        return 0.0;
    }
    let n = ring.len();
    (0..n)
        .map(|i| {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            let e = [b[0] - a[0], b[1] - a[1]];
            let len2 = e[0] * e[0] + e[1] * e[1];
            let s = if len2 > 0.0 { (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
            (p[0] - a[0] - s * e[0]).hypot(p[1] - a[1] - s * e[1])
        })
        .fold(f64::INFINITY, f64::min)
}

fn clip_planar(hs: &[HalfSpace], clip: &ClipBox) -> Vec<Vec<f64>> {
    let (lo, hi) = (&clip.lo, &clip.hi);
    let mut ring: Vec<[f64; 2]> = alloc::vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
    for h in hs {
        if ring.is_empty() {
            break;
        }
        let val = |p: &[f64; 2]| h.normal[0] * p[0] + h.normal[1] * p[1] - h.offset;
        let mut next = Vec::with_capacity(ring.len() + 1);
        for i in 0..ring.len() {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            let (va, vb) = (val(&a), val(&b));
            if va <= FEAS_TOL {
                next.push(a);
            }
            if (va > FEAS_TOL && vb < -FEAS_TOL) || (va < -FEAS_TOL && vb > FEAS_TOL) {
                let s = va / (va - vb);
                next.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        ring = next;
    }
    ring.into_iter().map(|p| p.to_vec()).collect()
}

fn enumerate_3d(hs: &[HalfSpace], clip: &ClipBox) -> Vec<Vec<f64>> {
    let mut all = clip.faces();
    all.extend(hs.iter().cloned());
    let m = all.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (a, b, c) = (&all[i].normal, &all[j].normal, &all[k].normal);
                let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]);
                if det.abs() < 1e-12 {
                    continue;
                }
                let r = [all[i].offset, all[j].offset, all[k].offset];
                let solve = |col: usize| {
                    let mut mm = [[a[0], a[1], a[2]], [b[0], b[1], b[2]], [c[0], c[1], c[2]]];
                    for row in 0..3 {
                        mm[row][col] = r[row];
                    }
                    (mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
                        - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
                        + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]))
                        / det
                };
                let y = alloc::vec![solve(0), solve(1), solve(2)];
                if all.iter().all(|h| h.contains(&y, FEAS_TOL)) {
                    out.push(y);
                }
            }
        }
    }
    out
}
