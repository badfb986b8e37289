//! Simple-polygon utilities in the plane.

use alloc::vec::Vec;

use num_traits::Float;

use super::Point;

/// Signed area (positive for counterclockwise vertex order).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point, tol: f64) -> bool {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    if orient(a, b, p).abs() > tol * len.max(1.0) {
        return false;
    }
    p[0] >= a[0].min(b[0]) - tol
        && p[0] <= a[0].max(b[0]) + tol
        && p[1] >= a[1].min(b[1]) - tol
        && p[1] <= a[1].max(b[1]) + tol
}

/// Membership in the closed polygon (boundary counts as inside).
pub fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if on_segment(a, b, p, 1e-12) {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Whether the closed segments `ab` and `cd` share a point.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(c, d, a, 1e-12) || on_segment(c, d, b, 1e-12) || on_segment(a, b, c, 1e-12) || on_segment(a, b, d, 1e-12)
}

/// Ear-clipping triangulation of a simple polygon (either orientation).
///
/// Returned triangles are counterclockwise.
pub fn triangulate(poly: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    if polygon_area(poly) < 0.0 {
        idx.reverse();
    }
    let mut out = Vec::with_capacity(poly.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 && guard < 4 * poly.len() * poly.len() {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if orient(a, b, c) <= 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != ia && j != ib && j != ic && {
                    let p = poly[j];
                    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
                }
            });
            if !blocked {
                out.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([poly[idx[0]], poly[idx[1]], poly[idx[2]]]);
    }
    out
}

/// Sutherland–Hodgman clip of a polygon against the axis-aligned box
/// `[lo, hi]`. The result may be empty or degenerate (zero area).
pub fn clip_to_box(poly: &[Point], lo: Point, hi: Point) -> Vec<Point> {
    let mut cur: Vec<Point> = poly.to_vec();
    for axis in 0..2 {
        for (bound, keep_below) in [(lo[axis], false), (hi[axis], true)] {
            if cur.is_empty() {
                return cur;
            }
            let inside = |p: &Point| if keep_below { p[axis] <= bound } else { p[axis] >= bound };
            let mut next = Vec::with_capacity(cur.len() + 2);
            for i in 0..cur.len() {
                let a = cur[i];
                let b = cur[(i + 1) % cur.len()];
                let (ina, inb) = (inside(&a), inside(&b));
                if ina {
                    next.push(a);
                }
                if ina != inb {
                    let s = (bound - a[axis]) / (b[axis] - a[axis]);
                    let mut q = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    q[axis] = bound;
                    next.push(q);
                }
            }
            cur = next;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn area_and_orientation() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_relative_eq!(polygon_area(&sq), 1.0);
        let mut rev = sq;
        rev.reverse();
        assert_relative_eq!(polygon_area(&rev), -1.0);
    }

    #[test]
    fn triangulation_preserves_area_of_nonconvex_polygon() {
        // an L shape, clockwise
        let l = vec![[0.0, 0.0], [0.0, 2.0], [1.0, 2.0], [1.0, 1.0], [2.0, 1.0], [2.0, 0.0]];
        let tris = triangulate(&l);
        assert_eq!(tris.len(), 4);
        let total: f64 = tris.iter().map(|t| polygon_area(t)).sum();
        assert_relative_eq!(total, 3.0, epsilon = 1e-14);
        assert!(tris.iter().all(|t| polygon_area(t) > 0.0));
    }

    #[test]
    fn membership_includes_boundary() {
        let tri = [[0.2, 0.2], [0.8, 0.2], [0.2, 0.8]];
        assert!(point_in_polygon(&tri, [0.3, 0.3]));
        assert!(point_in_polygon(&tri, [0.5, 0.5]));
        assert!(point_in_polygon(&tri, [0.2, 0.2]));
        assert!(!point_in_polygon(&tri, [0.6, 0.6]));
    }

    #[test]
    fn clip_area_matches_rasterization() {
        let tri = [[0.2, 0.2], [0.8, 0.2], [0.2, 0.8]];
        let clipped = clip_to_box(&tri, [0.3, 0.1], [0.6, 0.45]);
        let exact = polygon_area(&clipped);
        let n = 1000;
        let mut hits = 0usize;
        for i in 0..n {
            for j in 0..n {
                let p = [0.3 + 0.3 * (i as f64 + 0.5) / n as f64, 0.1 + 0.35 * (j as f64 + 0.5) / n as f64];
                if point_in_polygon(&tri, p) {
                    hits += 1;
                }
            }
        }
        let raster = hits as f64 / (n * n) as f64 * 0.3 * 0.35;
        assert!((exact - raster).abs() < 1e-3 * 0.105);
        assert!(clip_to_box(&tri, [0.9, 0.9], [1.0, 1.0]).len() < 3 || polygon_area(&clip_to_box(&tri, [0.9, 0.9], [1.0, 1.0])) == 0.0);
    }

    #[test]
    fn touching_segments() {
        assert!(segments_touch([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]));
        assert!(segments_touch([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 0.0]));
        assert!(!segments_touch([0.0, 0.0], [1.0, 0.0], [0.0, 0.1], [1.0, 0.1]));
    }
}
