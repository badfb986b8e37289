//! Source specifications `f = Σ_j χ_{P_j × [T_j, T]} ρ_j` with polynomial densities.

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::polygon::{clip_to_box, point_in_polygon, polygon_area, segments_touch};
use super::{Dim, Point};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// `coef · x^a · y^b · t^k` with `powers = [a, b, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn new(coef: f64, powers: [u32; 3]) -> Self {
        Self { coef, powers }
    }

    pub fn eval(&self, x: Point, t: f64) -> f64 {
        self.coef * x[0].powi(self.powers[0] as i32) * x[1].powi(self.powers[1] as i32) * t.powi(self.powers[2] as i32)
    }
}

/// Space-time polynomial density `ρ(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub terms: Vec<Monomial>,
}

impl Density {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    pub fn constant(v: f64) -> Self {
        Self { terms: alloc::vec![Monomial::new(v, [0, 0, 0])] }
    }

    pub fn eval(&self, x: Point, t: f64) -> f64 {
        self.terms.iter().map(|m| m.eval(x, t)).sum()
    }

    /// Spatial gradient `∇ₓρ(x, t)`.
    pub fn gradient(&self, x: Point, t: f64) -> Point {
        let mut g = [0.0, 0.0];
        for m in &self.terms {
            let [a, b, k] = m.powers;
            let tk = t.powi(k as i32);
            if a > 0 {
                g[0] += m.coef * a as f64 * x[0].powi(a as i32 - 1) * x[1].powi(b as i32) * tk;
            }
            if b > 0 {
                g[1] += m.coef * b as f64 * x[0].powi(a as i32) * x[1].powi(b as i32 - 1) * tk;
            }
        }
        g
    }

    /// Largest total spatial degree.
    pub fn spatial_degree(&self) -> u32 {
        self.terms.iter().map(|m| m.powers[0] + m.powers[1]).max().unwrap_or(0)
    }
}

/// Spatial support `P_j`: an interval in 1D or a simple polygon in 2D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Polygon { vertices: Vec<Point> },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi }
    }

    /// Stored counterclockwise regardless of the input orientation.
    pub fn polygon(mut vertices: Vec<Point>) -> Self {
        if polygon_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Region::Polygon { vertices }
    }

    pub fn dim(&self) -> Dim {
        match self {
            Region::Interval { .. } => Dim::One,
            Region::Polygon { .. } => Dim::Two,
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Region::Interval { lo, hi } => alloc::vec![[*lo, 0.0], [*hi, 0.0]],
            Region::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Length (1D) or area (2D).
    pub fn measure(&self) -> f64 {
        match self {
            Region::Interval { lo, hi } => hi - lo,
            Region::Polygon { vertices } => polygon_area(vertices),
        }
    }

    /// Bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Point, Point) {
        let v = self.vertices();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &v {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Smallest bounding-box side; the solver's resolution gate compares the
    /// grid spacing against this.
    pub fn min_extent(&self) -> f64 {
        let (lo, hi) = self.bounds();
        match self {
            Region::Interval { .. } => hi[0] - lo[0],
            Region::Polygon { .. } => (hi[0] - lo[0]).min(hi[1] - lo[1]),
        }
    }

    /// Membership in the closed region.
    pub fn contains(&self, x: Point) -> bool {
        match self {
            Region::Interval { lo, hi } => x[0] >= *lo && x[0] <= *hi,
            Region::Polygon { vertices } => point_in_polygon(vertices, x),
        }
    }

    fn closures_touch(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Interval { lo: a0, hi: a1 }, Region::Interval { lo: b0, hi: b1 }) => a0 <= b1 && b0 <= a1,
            (Region::Polygon { vertices: a }, Region::Polygon { vertices: b }) => {
                let (na, nb) = (a.len(), b.len());
                for i in 0..na {
                    for j in 0..nb {
                        if segments_touch(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                            return true;
                        }
                    }
                }
                point_in_polygon(a, b[0]) || point_in_polygon(b, a[0])
            }
            _ => true,
        }
    }

    /// `∫_{P ∩ box} x^a y^b dx` exactly (polynomial quadrature on the clipped
    /// piece). In 1D only `lo[0], hi[0]` matter and `b` must be zero.
    pub fn moment_in_box(&self, a: u32, b: u32, lo: Point, hi: Point) -> f64 {
        match self {
            Region::Interval { lo: r0, hi: r1 } => {
                let x0 = r0.max(lo[0]);
                let x1 = r1.min(hi[0]);
                if x1 <= x0 {
                    return 0.0;
                }
                let e = a as i32 + 1;
                (x1.powi(e) - x0.powi(e)) / e as f64
            }
            Region::Polygon { vertices } => {
                let piece = clip_to_box(vertices, lo, hi);
                if piece.len() < 3 {
                    return 0.0;
                }
                polygon_moment(&piece, a, b)
            }
        }
    }

    /// `∫_P x^a y^b dx` over the whole region.
    pub fn moment(&self, a: u32, b: u32) -> f64 {
        let (lo, hi) = self.bounds();
        self.moment_in_box(a, b, lo, hi)
    }
}

/// `∫_P x^a y^b` over a simple polygon via signed fan triangles from the
/// first vertex (exact for non-convex and degenerate rings alike) and a
/// collapsed Gauss rule that is exact for the monomial's degree.
pub(crate) fn polygon_moment(poly: &[Point], a: u32, b: u32) -> f64 {
    let n = ((a + b) as usize + 1) / 2 + 2;
    let gl = GaussLegendre::new(n);
    let mut total = 0.0;
    let p = poly[0];
    for w in poly[1..].windows(2) {
        let (q, r) = (w[0], w[1]);
        let e1 = [q[0] - p[0], q[1] - p[1]];
        let e2 = [r[0] - p[0], r[1] - p[1]];
        let jac = e1[0] * e2[1] - e1[1] * e2[0];
        let mut acc = 0.0;
        for (u, wu) in gl.on(0.0, 1.0) {
            for (s, ws) in gl.on(0.0, 1.0) {
                let (l1, l2) = (u * (1.0 - s), u * s);
                let x = p[0] + l1 * e1[0] + l2 * e2[0];
                let y = p[1] + l1 * e1[1] + l2 * e2[1];
                acc += wu * ws * u * x.powi(a as i32) * y.powi(b as i32);
            }
        }
        total += acc * jac;
    }
    total
}

/// One prism `P_j × [T_j, T]` with density `ρ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceComponent {
    region: Region,
    onset: f64,
    density: Density,
    holder_exponent: f64,
}

impl SourceComponent {
    pub fn new(region: Region, onset: f64, density: Density) -> Result<Self> {
        if !(region.measure() > 0.0) {
            return Err(Error::InvalidInput(alloc::format!(
                "source region must have positive measure, got {}",
                region.measure()
            )));
        }
        if let Region::Polygon { vertices } = &region {
            if vertices.len() < 3 {
                return Err(Error::InvalidInput("polygon needs at least three vertices".into()));
            }
        }
        if !(onset >= 0.0) || !onset.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("onset must be a finite time >= 0, got {onset}")));
        }
        for p in region.vertices() {
            if density.eval(p, onset) == 0.0 {
                return Err(Error::InvalidInput(alloc::format!(
                    "density vanishes at region vertex {p:?} at the onset t = {onset}"
                )));
            }
        }
        Ok(Self { region, onset, density, holder_exponent: 1.0 })
    }

    pub fn with_holder_exponent(mut self, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidInput(alloc::format!("Hölder exponent must lie in (0, 1], got {theta}")));
        }
        self.holder_exponent = theta;
        Ok(self)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn onset(&self) -> f64 {
        self.onset
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    /// `χ_{P × [T_j, ∞)}(x, t) ρ(x, t)`.
    pub fn eval(&self, x: Point, t: f64) -> f64 {
        if t >= self.onset && self.region.contains(x) {
            self.density.eval(x, t)
        } else {
            0.0
        }
    }
}

/// `D = ∪_j P_j × [T_j, T]` with its densities and the measure exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    dim: Dim,
    components: Vec<SourceComponent>,
    final_time: f64,
    measure_exponent: f64,
}

impl SourceSpec {
    pub fn new(dim: Dim, components: Vec<SourceComponent>, final_time: f64, measure_exponent: f64) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("final time must be positive, got {final_time}")));
        }
        if !(measure_exponent >= 0.0) || !measure_exponent.is_finite() {
            return Err(Error::InvalidInput(alloc::format!(
                "measure exponent must be finite and >= 0, got {measure_exponent}"
            )));
        }
        for (j, c) in components.iter().enumerate() {
            if c.region.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim.n(), got: c.region.dim().n() });
            }
            if c.onset >= final_time {
                return Err(Error::InvalidInput(alloc::format!(
                    "component {j}: onset {} is not before the final time {final_time}",
                    c.onset
                )));
            }
            for (k, other) in components.iter().enumerate().take(j) {
                if c.region.closures_touch(&other.region) {
                    return Err(Error::InvalidInput(alloc::format!("components {k} and {j} have touching closures")));
                }
            }
        }
        Ok(Self { dim, components, final_time, measure_exponent })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn components(&self) -> &[SourceComponent] {
        &self.components
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn measure_exponent(&self) -> f64 {
        self.measure_exponent
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `T₀ = min_j T_j`; `None` without components.
    pub fn onset_min(&self) -> Option<f64> {
        self.components.iter().map(|c| c.onset).reduce(f64::min)
    }

    /// `f(x, t)`.
    pub fn eval(&self, x: Point, t: f64) -> f64 {
        if t > self.final_time {
            return 0.0;
        }
        self.components.iter().map(|c| c.eval(x, t)).sum()
    }

    /// Whether `(x, t)` lies in the closed support `D`.
    pub fn contains(&self, x: Point, t: f64) -> bool {
        t <= self.final_time && self.components.iter().any(|c| t >= c.onset && c.region.contains(x))
    }

    /// Same components with a different final time (onsets must stay below it).
    pub fn with_final_time(&self, final_time: f64) -> Result<Self> {
        Self::new(self.dim, self.components.clone(), final_time, self.measure_exponent)
    }

    /// Adds a component, re-running validation.
    pub fn with_component(&self, comp: SourceComponent) -> Result<Self> {
        let mut comps = self.components.clone();
        comps.push(comp);
        Self::new(self.dim, comps, self.final_time, self.measure_exponent)
    }
}
