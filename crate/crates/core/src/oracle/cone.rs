use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{Dim, Point, SpaceTimeDirection};
use crate::quad::{cross3, norm3, GaussLegendre, TriangleRule, P3};
use crate::{Error, Result};

/// `∫₀^∞ ξⁿ e^{−ξ} e^{iaξ} dξ = n!/(1 − ia)^{n+1}` for `n ≤ 20`.
pub fn cone_moment(n: u32, a: f64) -> Result<Complex64> {
    if n > 20 {
        return Err(Error::InvalidInput(alloc::format!("moment order {n} exceeds 20")));
    }
    // 20! < 2^63, and every n! up to 20 converts to f64 exactly
    let fact = (1..=n as u64).product::<u64>() as f64;
    if a == 0.0 {
        return Ok(Complex64::new(fact, 0.0));
    }
    Ok(Complex64::new(fact, 0.0) / Complex64::new(1.0, -a).powu(n + 1))
}

/// Finite cone with vertex `p` over a base `Q` (segment or triangle) on the
/// plane `(x,t)·ω(c) = p·ω(c) − δ`. Points are space-time, time last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    vertex: Vec<f64>,
    base: Vec<Vec<f64>>,
    delta: f64,
    direction: SpaceTimeDirection,
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn p3(v: &[f64]) -> P3 {
    [v[0], v[1], v[2]]
}

impl ConeSpec {
    pub fn new(direction: SpaceTimeDirection, vertex: Vec<f64>, base: Vec<Vec<f64>>) -> Result<Self> {
        let n = direction.dim().n();
        if vertex.len() != n + 1 || base.len() != n + 1 || base.iter().any(|y| y.len() != n + 1) {
            return Err(Error::DimensionMismatch { expected: n + 1, got: vertex.len() });
        }
        let w = direction.vector();
        let delta = dotv(&vertex, w) - dotv(&base[0], w);
        if !(delta > 1e-12) {
            return Err(Error::Degenerate("cone vertex lies on the base plane"));
        }
        let scale = vertex.iter().chain(base.iter().flatten()).fold(1.0f64, |m, v| m.max(v.abs()));
        for y in &base {
            if (dotv(&vertex, w) - dotv(y, w) - delta).abs() > 1e-10 * scale {
                return Err(Error::InvalidInput("cone base vertices are not on one plane normal to ω(c)".into()));
            }
        }
        let cone = Self { vertex, base, delta, direction };
        if !(cone.base_measure() > 1e-14 * scale.powi(n as i32)) {
            return Err(Error::Degenerate("cone base has zero measure"));
        }
        Ok(cone)
    }

    /// Base vertices `p − δω(c) + Σ_k coords_k e_k` for an orthonormal basis
    /// `e_k` of the base plane: `e₁ = (ω⊥, 0)`, `e₂ = ω(c) × e₁` when `n = 2`;
    /// `e = (1, cω)/√(c²+1)` when `n = 1` (only `coords[i][0]` is used).
    pub fn from_plane_coords(direction: SpaceTimeDirection, vertex: Vec<f64>, delta: f64, coords: &[Point]) -> Result<Self> {
        let basis = plane_basis(&direction);
        let w = direction.vector();
        let base = coords
            .iter()
            .map(|q| {
                (0..vertex.len())
                    .map(|i| {
                        let mut v = vertex[i] - delta * w[i];
                        for (k, e) in basis.iter().enumerate() {
                            v += q[k] * e[i];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Self::new(direction, vertex, base)
    }

    pub fn dim(&self) -> Dim {
        self.direction.dim()
    }

    pub fn vertex(&self) -> &[f64] {
        &self.vertex
    }

    pub fn base(&self) -> &[Vec<f64>] {
        &self.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn direction(&self) -> &SpaceTimeDirection {
        &self.direction
    }

    /// Length (`n = 1`) or area (`n = 2`) of the base.
    pub fn base_measure(&self) -> f64 {
        let e1 = sub(&self.base[1], &self.base[0]);
        match self.dim() {
            Dim::One => dotv(&e1, &e1).sqrt(),
            Dim::Two => 0.5 * norm3(cross3(p3(&e1), p3(&sub(&self.base[2], &self.base[0])))),
        }
    }
}

fn plane_basis(dir: &SpaceTimeDirection) -> Vec<Vec<f64>> {
    let w = dir.vector();
    match dir.dim() {
        Dim::One => {
            let a = dir.normalizer();
            alloc::vec![alloc::vec![1.0 / a, dir.signed_speed() / a]]
        }
        Dim::Two => {
            let o = dir.omega();
            let e1 = [-o[1], o[0], 0.0];
            let e2 = cross3(p3(w), e1);
            let m = norm3(e2);
            alloc::vec![e1.to_vec(), alloc::vec![e2[0] / m, e2[1] / m, e2[2] / m]]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KdMethod {
    Quadrature,
    ClosedForm,
}

/// The cone constant `K_D`. `residual` is the relative projection residual
/// of the closed form (zero for quadrature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdValue {
    pub value: Complex64,
    pub method: KdMethod,
    pub residual: f64,
}

fn check_perp(cone: &ConeSpec, omega_perp: Point) -> Result<()> {
    if cone.dim() != Dim::Two {
        return Err(Error::InvalidInput("K_D is defined for triangle-based cones (n = 2)".into()));
    }
    let norm = omega_perp[0].hypot(omega_perp[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection { norm });
    }
    let o = cone.direction.omega();
    let dot = o[0] * omega_perp[0] + o[1] * omega_perp[1];
    if dot.abs() > 1e-12 {
        return Err(Error::NotOrthogonal { dot });
    }
    Ok(())
}

/// `K_D = 2δ ∫_Q dS(y) / (δ√(c²+1)/c − i(y−p)·(ω⊥,0))³` by adaptive
/// collapsed Gauss quadrature on the base triangle.
pub fn kd_quadrature(cone: &ConeSpec, omega_perp: Point) -> Result<KdValue> {
    check_perp(cone, omega_perp)?;
    let c = cone.direction.c();
    let re = cone.delta * cone.direction.normalizer() / c;
    let p = p3(&cone.vertex);
    let mut f = |y: P3| {
        let g = (y[0] - p[0]) * omega_perp[0] + (y[1] - p[1]) * omega_perp[1];
        Complex64::new(re, -g).powu(3).inv()
    };
    let rule = TriangleRule::new(12);
    let q = &cone.base;
    let integral = rule.integrate_adaptive(p3(&q[0]), p3(&q[1]), p3(&q[2]), &mut f, 1e-14, 8);
    Ok(KdValue { value: integral * (2.0 * cone.delta), method: KdMethod::Quadrature, residual: 0.0 })
}

type C3 = [Complex64; 3];

fn cdot(a: P3, b: &C3) -> Complex64 {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

/// Tetrahedral closed form: `K_D ϑ = c³ Σ_j |e_j × e_{j+1}| ν_j / ((e_j·ϑ)(e_{j+1}·ϑ))`
/// with `e_j = ν_j × ν_{j−1}` and `ϑ = (c(ω + iω⊥), −1)`. The base vertices
/// are reordered until the three edge directions satisfy `e_j·ω(c) < 0`,
/// and `K_D` is the Hermitian projection of the right side onto `ϑ`.
pub fn kd_closed_form(cone: &ConeSpec, omega_perp: Point) -> Result<KdValue> {
    check_perp(cone, omega_perp)?;
    let c = cone.direction.c();
    let o = cone.direction.omega();
    let w = p3(cone.direction.vector());
    let theta: C3 = [
        Complex64::new(c * o[0], c * omega_perp[0]),
        Complex64::new(c * o[1], c * omega_perp[1]),
        Complex64::new(-1.0, 0.0),
    ];
    let p = p3(&cone.vertex);
    let ys: Vec<P3> = cone.base.iter().map(|y| p3(y)).collect();
    let centroid: P3 = core::array::from_fn(|k| 0.25 * (p[k] + ys[0][k] + ys[1][k] + ys[2][k]));

    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    for ord in ORDERS {
        let y = [ys[ord[0]], ys[ord[1]], ys[ord[2]]];
        // outward unit normal of the lateral face (p, y_j, y_{j+1})
        let nu: Vec<P3> = (0..3)
            .map(|j| {
                let a = y[j];
                let b = y[(j + 1) % 3];
                let mut nrm = cross3(core::array::from_fn(|k| a[k] - p[k]), core::array::from_fn(|k| b[k] - p[k]));
                let mid: P3 = core::array::from_fn(|k| (p[k] + a[k] + b[k]) / 3.0 - centroid[k]);
                let s = if nrm[0] * mid[0] + nrm[1] * mid[1] + nrm[2] * mid[2] < 0.0 { -1.0 } else { 1.0 };
                let m = norm3(nrm);
                for v in &mut nrm {
                    *v *= s / m;
                }
                nrm
            })
            .collect();
        if nu.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::Degenerate("lateral face with zero area"));
        }
        // e_j = ν_j × ν_{j−1}
        let e: Vec<P3> = (0..3).map(|j| cross3(nu[j], nu[(j + 2) % 3])).collect();
        let scale = e.iter().map(|v| norm3(*v)).fold(f64::INFINITY, f64::min);
        if !(scale > 1e-12) {
            return Err(Error::Degenerate("lateral normals are linearly dependent"));
        }
        if !e.iter().all(|v| v[0] * w[0] + v[1] * w[1] + v[2] * w[2] < 0.0) {
            continue;
        }
        let mut rhs = [Complex64::new(0.0, 0.0); 3];
        for j in 0..3 {
            let ea = e[j];
            let eb = e[(j + 1) % 3];
            let coef = norm3(cross3(ea, eb)) / (cdot(ea, &theta) * cdot(eb, &theta)) * c.powi(3);
            for k in 0..3 {
                rhs[k] += coef * nu[j][k];
            }
        }
        let num: Complex64 = (0..3).map(|k| theta[k].conj() * rhs[k]).sum();
        let den: f64 = theta.iter().map(|z| z.norm_sqr()).sum();
        let kd = num / den;
        let res2: f64 = (0..3).map(|k| (rhs[k] - kd * theta[k]).norm_sqr()).sum();
        let rhs2: f64 = rhs.iter().map(|z| z.norm_sqr()).sum();
        let residual = (res2 / rhs2).sqrt();
        if residual > 1e-8 {
            return Err(Error::ProjectionResidual { residual, limit: 1e-8 });
        }
        return Ok(KdValue { value: kd, method: KdMethod::ClosedForm, residual });
    }
    Err(Error::Degenerate("no vertex order satisfies the edge sign conditions"))
}

/// `(2/n!)(cτ)^{n+1} e^{−√(c²+1)τ p·ω(c)} e^{−icτβ p·(ω⊥,0)} ∫_D v` with
/// `β = √(1 − 1/(c²τ))`, by Gauss quadrature over the base triangle and
/// panel Gauss quadrature along the cone rays. It tends to `K_D` as `τ → ∞`.
pub fn kd_limit_sample(cone: &ConeSpec, omega_perp: Point, tau: f64) -> Result<Complex64> {
    check_perp(cone, omega_perp)?;
    let c = cone.direction.c();
    if !(c * c * tau > 1.0) {
        return Err(Error::TauTooSmall { tau, min: 1.0 / (c * c) });
    }
    let a = cone.direction.normalizer();
    let beta = (1.0 - 1.0 / (c * c * tau)).sqrt();
    let delta = cone.delta;
    let p = p3(&cone.vertex);
    let gl = GaussLegendre::new(10);
    let s_max = delta.min(80.0 / (a * tau));
    let mut f = |y: P3| {
        let g = (y[0] - p[0]) * omega_perp[0] + (y[1] - p[1]) * omega_perp[1];
        // the integrand along the ray is (s/δ)² e^{−κs}
        let kappa = Complex64::new(a * tau, -c * tau * beta * g / delta);
        let m = ((s_max * kappa.norm() / 0.25).ceil() as usize).max(1);
        let h = s_max / m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let lo = k as f64 * h;
            for (s, wt) in gl.on(lo, lo + h) {
                acc += (-kappa * s).exp() * (wt * (s / delta).powi(2));
            }
        }
        acc
    };
    let q = &cone.base;
    let integral = TriangleRule::new(16).integrate(p3(&q[0]), p3(&q[1]), p3(&q[2]), &mut f);
    Ok(integral * (c * tau).powi(3))
}
