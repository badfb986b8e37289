//! Quadrature rules: Gauss–Legendre nodes, adaptive Gauss–Kronrod for
//! complex-valued integrands on intervals, and adaptive collapsed-Gauss rules
//! on triangles embedded in R³.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// `(node, weight)` pairs mapped onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Result of [`adaptive_gk`].
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol·|I|)` or `max_intervals` is hit.
pub fn adaptive_gk<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let mut pieces: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    pieces.push((a, b, v, e));
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) || pieces.len() >= max_intervals {
            return QuadResult { value: total, error: err, intervals: pieces.len() };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

pub type P3 = [f64; 3];

fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross3(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: P3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Area of the triangle `(a, b, c)` in R³.
pub fn triangle_area(a: P3, b: P3, c: P3) -> f64 {
    0.5 * norm3(cross3(sub3(b, a), sub3(c, a)))
}

/// Collapsed (Duffy) Gauss–Legendre rule on a triangle: `n²` points.
pub struct TriangleRule {
    // (barycentric λ₁, λ₂, weight on the reference triangle of area 1/2)
    points: Vec<(f64, f64, f64)>,
}

impl TriangleRule {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(n);
        let mut points = Vec::with_capacity(n * n);
        for (u, wu) in gl.on(0.0, 1.0) {
            for (s, ws) in gl.on(0.0, 1.0) {
                points.push((u * (1.0 - s), u * s, wu * ws * u));
            }
        }
        Self { points }
    }

    /// `∫_T f dS` over the triangle with vertices `a, b, c`.
    pub fn integrate<F: FnMut(P3) -> Complex64>(&self, a: P3, b: P3, c: P3, f: &mut F) -> Complex64 {
        let e1 = sub3(b, a);
        let e2 = sub3(c, a);
        let jac = norm3(cross3(e1, e2));
        let mut acc = Complex64::new(0.0, 0.0);
        for &(l1, l2, w) in &self.points {
            let y = [
                a[0] + l1 * e1[0] + l2 * e2[0],
                a[1] + l1 * e1[1] + l2 * e2[1],
                a[2] + l1 * e1[2] + l2 * e2[2],
            ];
            acc += f(y) * w;
        }
        acc * jac
    }

    /// Recursive 4-way subdivision until parent and children agree to `tol` (relative).
    pub fn integrate_adaptive<F: FnMut(P3) -> Complex64>(
        &self,
        a: P3,
        b: P3,
        c: P3,
        f: &mut F,
        tol: f64,
        max_depth: u32,
    ) -> Complex64 {
        let whole = self.integrate(a, b, c, f);
        self.refine(a, b, c, whole, f, tol, max_depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: FnMut(P3) -> Complex64>(
        &self,
        a: P3,
        b: P3,
        c: P3,
        whole: Complex64,
        f: &mut F,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let mid = |p: P3, q: P3| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])];
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        let kids = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)];
        let vals: Vec<Complex64> = kids.iter().map(|&(p, q, r)| self.integrate(p, q, r, f)).collect();
        let sum: Complex64 = vals.iter().sum();
        if depth == 0 || (sum - whole).norm() <= tol * sum.norm().max(f64::MIN_POSITIVE) {
            return sum;
        }
        kids.iter()
            .zip(vals)
            .map(|(&(p, q, r), v)| self.refine(p, q, r, v, f, tol, depth - 1))
            .sum()
    }
}
