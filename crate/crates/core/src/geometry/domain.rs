use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::Point;
use crate::{Error, Result};

/// Spatial dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::InvalidInput(alloc::format!("dimension must be 1 or 2, got {n}"))),
        }
    }
}

/// A boundary quadrature point with outward unit normal and arc-length weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryNode {
    pub x: Point,
    pub normal: Point,
    pub weight: f64,
}

/// An interval `[x_lo, x_hi]` or an axis-aligned rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDomain {
    dim: Dim,
    lo: Point,
    hi: Point,
}

impl SpatialDomain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { dim: Dim::One, lo: [lo, 0.0], hi: [hi, 0.0] })
    }

    pub fn rectangle(x: [f64; 2], y: [f64; 2]) -> Result<Self> {
        if !(x[0] < x[1]) || !(y[0] < y[1]) {
            return Err(Error::InvalidInput(alloc::format!("empty rectangle {x:?} × {y:?}")));
        }
        Ok(Self { dim: Dim::Two, lo: [x[0], y[0]], hi: [x[1], y[1]] })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn lo(&self) -> Point {
        self.lo
    }

    pub fn hi(&self) -> Point {
        self.hi
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn measure(&self) -> f64 {
        match self.dim {
            Dim::One => self.extent(0),
            Dim::Two => self.extent(0) * self.extent(1),
        }
    }

    pub fn corners(&self) -> Vec<Point> {
        match self.dim {
            Dim::One => alloc::vec![[self.lo[0], 0.0], [self.hi[0], 0.0]],
            Dim::Two => alloc::vec![
                [self.lo[0], self.lo[1]],
                [self.hi[0], self.lo[1]],
                [self.hi[0], self.hi[1]],
                [self.lo[0], self.hi[1]],
            ],
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        (0..self.dim.n()).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    /// Euclidean distance from `x` to the closed domain (zero inside).
    pub fn distance(&self, x: Point) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim.n() {
            let d = (self.lo[k] - x[k]).max(x[k] - self.hi[k]).max(0.0);
            s += d * d;
        }
        s.sqrt()
    }

    /// Boundary quadrature nodes matching a grid with `cells[k]` cells per axis.
    ///
    /// In 1D: the two endpoints with weight 1. In 2D: each side sampled at the
    /// grid nodes with trapezoid weights, sides ordered bottom, right, top,
    /// left; corner nodes appear once per adjoining side.
    pub fn boundary_nodes(&self, cells: [usize; 2]) -> Vec<BoundaryNode> {
        match self.dim {
            Dim::One => alloc::vec![
                BoundaryNode { x: [self.lo[0], 0.0], normal: [-1.0, 0.0], weight: 1.0 },
                BoundaryNode { x: [self.hi[0], 0.0], normal: [1.0, 0.0], weight: 1.0 },
            ],
            Dim::Two => {
                let (nx, ny) = (cells[0], cells[1]);
                let hx = self.extent(0) / nx as f64;
                let hy = self.extent(1) / ny as f64;
                let mut out = Vec::with_capacity(2 * (nx + ny + 2));
                let side = |count: usize, h: f64, k: usize| if k == 0 || k == count { 0.5 * h } else { h };
                for i in 0..=nx {
                    out.push(BoundaryNode {
                        x: [self.lo[0] + i as f64 * hx, self.lo[1]],
                        normal: [0.0, -1.0],
                        weight: side(nx, hx, i),
                    });
                }
                for j in 0..=ny {
                    out.push(BoundaryNode {
                        x: [self.hi[0], self.lo[1] + j as f64 * hy],
                        normal: [1.0, 0.0],
                        weight: side(ny, hy, j),
                    });
                }
                for i in 0..=nx {
                    out.push(BoundaryNode {
                        x: [self.lo[0] + i as f64 * hx, self.hi[1]],
                        normal: [0.0, 1.0],
                        weight: side(nx, hx, i),
                    });
                }
                for j in 0..=ny {
                    out.push(BoundaryNode {
                        x: [self.lo[0], self.lo[1] + j as f64 * hy],
                        normal: [-1.0, 0.0],
                        weight: side(ny, hy, j),
                    });
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_empty_domains() {
        assert!(SpatialDomain::interval(1.0, 1.0).is_err());
        assert!(SpatialDomain::rectangle([0.0, 1.0], [2.0, 1.0]).is_err());
    }

    #[test]
    fn boundary_weights_sum_to_perimeter() {
        let d = SpatialDomain::rectangle([0.0, 2.0], [-1.0, 0.5]).unwrap();
        let nodes = d.boundary_nodes([40, 17]);
        let total: f64 = nodes.iter().map(|n| n.weight).sum();
        assert_relative_eq!(total, 2.0 * (2.0 + 1.5), epsilon = 1e-12);
        for n in &nodes {
            assert_relative_eq!(n.normal[0].hypot(n.normal[1]), 1.0);
        }
        let d1 = SpatialDomain::interval(0.0, 1.0).unwrap();
        let total: f64 = d1.boundary_nodes([10, 0]).iter().map(|n| n.weight).sum();
        assert_relative_eq!(total, 2.0);
    }

    #[test]
    fn distance_outside() {
        let d = SpatialDomain::rectangle([0.0, 1.0], [0.0, 1.0]).unwrap();
        assert_relative_eq!(d.distance([-0.5, 0.5]), 0.5);
        assert_relative_eq!(d.distance([2.0, 2.0]), 2f64.sqrt());
        assert_eq!(d.distance([0.3, 0.3]), 0.0);
    }
}
