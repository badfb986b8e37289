//! Closed-form backward-heat probe fields `v` with `v_t + Δv = 0`, evaluated
//! as `log v` (complex) so that `exp(±τ)` factors never materialise.

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{omega_c, Dim, Point, SpaceTimeDirection, SpatialDomain};
use crate::logc::LogComplex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Real,
    Complex2d,
    Complex1d,
    Radial,
}

/// One probe `v(x, t)` at fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeField {
    kind: ProbeKind,
    dim: Dim,
    tau: f64,
    omega: Point,
    omega_perp: Point,
    c: f64,
    pole: Point,
    sign: f64,
    // wave vector z (complex kinds) or √τ·ω (real kind)
    z: [Complex64; 2],
    // z·z
    zz: Complex64,
}

const ORTHO_TOL: f64 = 1e-12;

impl ProbeField {
    /// `v = e^{√τ x·ω − τt}`.
    pub fn real(dim: Dim, omega: Point, tau: f64) -> Result<Self> {
        check_tau_positive(tau)?;
        omega_c(dim, omega, 1.0)?;
        let s = tau.sqrt();
        Ok(Self {
            kind: ProbeKind::Real,
            dim,
            tau,
            omega,
            omega_perp: [0.0; 2],
            c: 0.0,
            pole: [0.0; 2],
            sign: 1.0,
            z: [Complex64::new(s * omega[0], 0.0), Complex64::new(s * omega[1], 0.0)],
            zz: Complex64::new(tau, 0.0),
        })
    }

    /// `v = e^{−(z·z)t} e^{x·z}` with `z = cτ(ω + i√(1 − 1/(c²τ)) ω⊥)`, so
    /// `z·z = τ`. `omega_perp` defaults to the counterclockwise rotation of `ω`.
    pub fn complex2d(omega: Point, omega_perp: Option<Point>, c: f64, tau: f64) -> Result<Self> {
        omega_c(Dim::Two, omega, c)?;
        let perp = omega_perp.unwrap_or([-omega[1], omega[0]]);
        omega_c(Dim::Two, perp, 1.0)?;
        let d = omega[0] * perp[0] + omega[1] * perp[1];
        if d.abs() > ORTHO_TOL {
            return Err(Error::NotOrthogonal { dot: d });
        }
        let beta = beta(c, tau)?;
        let ct = c * tau;
        let z = [Complex64::new(ct * omega[0], ct * beta * perp[0]), Complex64::new(ct * omega[1], ct * beta * perp[1])];
        Ok(Self {
            kind: ProbeKind::Complex2d,
            dim: Dim::Two,
            tau,
            omega,
            omega_perp: perp,
            c,
            pole: [0.0; 2],
            sign: 1.0,
            z,
            zz: Complex64::new(tau, 0.0),
        })
    }

    /// `v = e^{−z²t} e^{xz}` with `z = cτ(1 + i√(1 − 1/(c²τ)))`, so
    /// `z² = τ + 2ic²τ²√(1 − 1/(c²τ))`. Negative `c` probes the left face.
    pub fn complex1d(c: f64, tau: f64) -> Result<Self> {
        omega_c(Dim::One, [1.0, 0.0], c)?;
        let beta = beta(c, tau)?;
        let z = Complex64::new(c * tau, c * tau * beta);
        Ok(Self {
            kind: ProbeKind::Complex1d,
            dim: Dim::One,
            tau,
            omega: [1.0, 0.0],
            omega_perp: [0.0; 2],
            c,
            pole: [0.0; 2],
            sign: 1.0,
            z: [z, Complex64::new(0.0, 0.0)],
            zz: z * z,
        })
    }

    /// Leading-order radial probe `e^{−τt ± √τ|x−p|} |x−p|^{−(n−1)/2}` with the
    /// pole `p` outside `Ω̄`. Exact in 1D; in 2D it leaves the residual
    /// `v/(4|x−p|²)` and is flagged [`asymptotic`](Self::is_asymptotic).
    pub fn radial(domain: &SpatialDomain, pole: Point, plus: bool, tau: f64) -> Result<Self> {
        check_tau_positive(tau)?;
        let distance = domain.distance(pole);
        if !(distance > 0.0) {
            return Err(Error::PoleInsideDomain { distance });
        }
        Ok(Self {
            kind: ProbeKind::Radial,
            dim: domain.dim(),
            tau,
            omega: [0.0; 2],
            omega_perp: [0.0; 2],
            c: 0.0,
            pole,
            sign: if plus { 1.0 } else { -1.0 },
            z: [Complex64::new(0.0, 0.0); 2],
            zz: Complex64::new(tau, 0.0),
        })
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn omega(&self) -> Point {
        self.omega
    }

    pub fn omega_perp(&self) -> Point {
        self.omega_perp
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn pole(&self) -> Point {
        self.pole
    }

    /// Wave vector `z` (complex kinds) or `√τ ω` (real kind).
    pub fn z(&self) -> [Complex64; 2] {
        self.z
    }

    /// `z·z`; the time decay rate is its real part.
    pub fn zz(&self) -> Complex64 {
        self.zz
    }

    pub fn is_asymptotic(&self) -> bool {
        self.kind == ProbeKind::Radial && self.dim == Dim::Two
    }

    /// `ω(c)` for complex kinds.
    pub fn direction(&self) -> Option<SpaceTimeDirection> {
        match self.kind {
            ProbeKind::Complex2d | ProbeKind::Complex1d => omega_c(self.dim, self.omega, self.c).ok(),
            _ => None,
        }
    }

    /// `log v(x, t)` as a complex number.
    pub fn log_v(&self, x: Point, t: f64) -> Complex64 {
        match self.kind {
            ProbeKind::Radial => {
                let r = (x[0] - self.pole[0]).hypot(if self.dim == Dim::Two { x[1] - self.pole[1] } else { 0.0 });
                let a0 = if self.dim == Dim::Two { -0.5 * r.ln() } else { 0.0 };
                Complex64::new(-self.tau * t + self.sign * self.tau.sqrt() * r + a0, 0.0)
            }
            _ => {
                let xz = self.z[0] * x[0] + if self.dim == Dim::Two { self.z[1] * x[1] } else { Complex64::new(0.0, 0.0) };
                xz - self.zz * t
            }
        }
    }

    pub fn value(&self, x: Point, t: f64) -> LogComplex {
        LogComplex::exp(self.log_v(x, t))
    }

    pub fn log_magnitude(&self, x: Point, t: f64) -> f64 {
        self.log_v(x, t).re
    }

    pub fn phase(&self, x: Point, t: f64) -> f64 {
        crate::logc::wrap_phase(self.log_v(x, t).im)
    }

    /// `∇ log v`; the spatial gradients of `log|v|` and `arg v` are its real
    /// and imaginary parts.
    pub fn grad_log(&self, x: Point) -> [Complex64; 2] {
        match self.kind {
            ProbeKind::Radial => {
                let d = [x[0] - self.pole[0], if self.dim == Dim::Two { x[1] - self.pole[1] } else { 0.0 }];
                let r = d[0].hypot(d[1]);
                let a0 = if self.dim == Dim::Two { 0.5 / r } else { 0.0 };
                let g = self.sign * self.tau.sqrt() - a0;
                [Complex64::new(g * d[0] / r, 0.0), Complex64::new(g * d[1] / r, 0.0)]
            }
            _ => self.z,
        }
    }

    /// `∂v/∂ν` at a boundary point with outward normal `normal`.
    pub fn normal_derivative(&self, x: Point, t: f64, normal: Point) -> LogComplex {
        let g = self.grad_log(x);
        let dn = g[0] * normal[0] + g[1] * normal[1];
        self.value(x, t) * dn
    }

    /// Relative residual of `v_t + Δv` by 5-point central differences with
    /// steps scaled to the probe's spatial and temporal length scales.
    pub fn pde_residual(&self, x: Point, t: f64) -> f64 {
        const ETA: f64 = 1e-2;
        let (rate_x, rate_t) = self.rates(x);
        self.pde_residual_with_steps(x, t, ETA / rate_x, ETA / rate_t)
    }

    /// As [`pde_residual`](Self::pde_residual) with explicit steps.
    ///
    /// Exact kinds are normalised by `|v_t| + |Δv|`. The radial 2D probe is
    /// normalised by `|∇v|`, the scale of the transport terms its amplitude
    /// balances, so that its leftover `Δa₀` term reads as an `O(τ^{−1/2})`
    /// remainder.
    pub fn pde_residual_with_steps(&self, x: Point, t: f64, hx: f64, ht: f64) -> f64 {
        let l0 = self.log_v(x, t);
        // v(x + δ)/v(x) without forming v
        let ratio = |dx: Point, dt: f64| (self.log_v([x[0] + dx[0], x[1] + dx[1]], t + dt) - l0).exp();
        let d1 = |f: &dyn Fn(f64) -> Complex64, h: f64| (f(-2.0 * h) - f(2.0 * h) + (f(h) - f(-h)) * 8.0) / (12.0 * h);
        let d2 = |f: &dyn Fn(f64) -> Complex64, h: f64| {
            (-f(-2.0 * h) - f(2.0 * h) + (f(h) + f(-h)) * 16.0 - 30.0) / (12.0 * h * h)
        };
        let vt = d1(&|s| ratio([0.0, 0.0], s), ht);
        let mut lap = d2(&|s| ratio([s, 0.0], 0.0), hx);
        if self.dim == Dim::Two {
            lap += d2(&|s| ratio([0.0, s], 0.0), hx);
        }
        let res = (vt + lap).norm();
        if self.is_asymptotic() {
            let g = self.grad_log(x);
            res / (g[0].norm_sqr() + g[1].norm_sqr()).sqrt()
        } else {
            res / (vt.norm() + lap.norm())
        }
    }

    /// Inverse length scales `(space, time)` of `log v` near `x`.
    fn rates(&self, x: Point) -> (f64, f64) {
        match self.kind {
            ProbeKind::Real => (self.tau.sqrt(), self.tau),
            ProbeKind::Complex2d | ProbeKind::Complex1d => (self.z[0].norm().hypot(self.z[1].norm()), self.zz.norm()),
            ProbeKind::Radial => {
                let r = (x[0] - self.pole[0]).hypot(if self.dim == Dim::Two { x[1] - self.pole[1] } else { 0.0 });
                (self.tau.sqrt().max(1.0 / r), self.tau)
            }
        }
    }
}

fn check_tau_positive(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::TauTooSmall { tau, min: 0.0 });
    }
    Ok(())
}

/// `√(1 − 1/(c²τ))`, requiring `τ > c⁻²`.
fn beta(c: f64, tau: f64) -> Result<f64> {
    let min = 1.0 / (c * c);
    if !(tau > min) || !tau.is_finite() {
        return Err(Error::TauTooSmall { tau, min });
    }
    Ok((1.0 - min / tau).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rect() -> SpatialDomain {
        SpatialDomain::rectangle([0.0, 1.0], [0.0, 1.0]).unwrap()
    }

    #[test]
    fn real_probe_values() {
        let p = ProbeField::real(Dim::One, [1.0, 0.0], 4.0).unwrap();
        assert_relative_eq!(p.log_magnitude([0.5, 0.0], 0.25), 0.0);
        assert_eq!(p.phase([0.5, 0.0], 0.25), 0.0);
        let p = ProbeField::real(Dim::Two, [1.0, 0.0], 9.0).unwrap();
        assert_relative_eq!(p.log_magnitude([1.0, 1.0], 0.0), 3.0);
        assert!(ProbeField::real(Dim::One, [1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn complex2d_values() {
        let p = ProbeField::complex2d([1.0, 0.0], Some([0.0, 1.0]), 1.0, 4.0).unwrap();
        assert_relative_eq!(p.log_magnitude([0.5, 0.2], 0.3), 0.8, epsilon = 1e-14);
        // cτβ x·ω⊥ = 4 · √(3/4) · 0.2
        assert_relative_eq!(p.phase([0.5, 0.2], 0.3), 0.4 * 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(p.zz(), Complex64::new(4.0, 0.0));
        assert!(matches!(ProbeField::complex2d([1.0, 0.0], Some([0.6, 0.8]), 1.0, 4.0), Err(Error::NotOrthogonal { .. })));
        assert!(matches!(ProbeField::complex2d([1.0, 0.0], None, 1.0, 1.0), Err(Error::TauTooSmall { .. })));
        // default ω⊥ is the counterclockwise rotation
        let q = ProbeField::complex2d([0.6, 0.8], None, 2.0, 10.0).unwrap();
        assert_eq!(q.omega_perp(), [-0.8, 0.6]);
    }

    #[test]
    fn complex2d_degenerates_to_real_drift_at_threshold() {
        let p = ProbeField::complex2d([1.0, 0.0], None, 1.0, 1.0 + 1e-12).unwrap();
        assert!(p.z()[1].im.abs() < 1e-5 && p.z()[0].im.abs() < 1e-5);
        assert_relative_eq!(p.z()[0].re, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn complex1d_values() {
        let p = ProbeField::complex1d(1.0, 4.0).unwrap();
        assert_relative_eq!(p.zz().re, 4.0, epsilon = 1e-12);
        assert_relative_eq!(p.zz().im, 16.0 * 3f64.sqrt(), epsilon = 1e-12);
        let p = ProbeField::complex1d(1.0, 10.0).unwrap();
        assert_relative_eq!(p.log_magnitude([0.5, 0.0], 0.5), 0.0, epsilon = 1e-12);
        // phase cτβ(x − 2cτt) with the τ² growth in t
        let p = ProbeField::complex1d(-2.0, 3.0).unwrap();
        let b = (1.0 - 1.0 / 12.0f64).sqrt();
        let raw = p.log_v([0.3, 0.0], 0.1).im;
        assert_relative_eq!(raw, -6.0 * b * (0.3 + 12.0 * 0.1), epsilon = 1e-12);
    }

    #[test]
    fn radial_probe_checks() {
        assert!(matches!(ProbeField::radial(&rect(), [0.5, 0.5], true, 10.0), Err(Error::PoleInsideDomain { .. })));
        assert!(matches!(ProbeField::radial(&rect(), [1.0, 0.5], true, 10.0), Err(Error::PoleInsideDomain { .. })));
        let p = ProbeField::radial(&rect(), [-0.5, 0.5], true, 100.0).unwrap();
        assert!(p.is_asymptotic());
        // a₀ = 1 on |x − p| = 1
        assert_relative_eq!(p.log_magnitude([0.5, 0.5], 0.0), 10.0, epsilon = 1e-14);
        let line = SpatialDomain::interval(0.0, 1.0).unwrap();
        let q = ProbeField::radial(&line, [-0.5, 0.0], false, 50.0).unwrap();
        assert!(!q.is_asymptotic());
        for &(x, t) in &[(0.1, 0.2), (0.5, 0.9), (0.95, 0.01)] {
            assert!(q.pde_residual([x, 0.0], t) < 1e-8);
        }
    }

    #[test]
    fn radial_2d_residual_halves_per_quadrupled_tau() {
        let res = |tau: f64| {
            let p = ProbeField::radial(&rect(), [-0.5, 0.5], true, tau).unwrap();
            p.pde_residual([0.4, 0.3], 0.5)
        };
        let r1 = res(100.0) / res(400.0);
        let r2 = res(400.0) / res(1600.0);
        assert!((0.4..0.6).contains(&(1.0 / r1)));
        assert!((1.0 / r1 - 1.0 / r2).abs() < 0.02);
    }

    #[test]
    fn fixed_step_residuals() {
        let p = ProbeField::real(Dim::Two, [0.6, 0.8], 50.0).unwrap();
        assert!(p.pde_residual_with_steps([0.3, 0.7], 0.4, 1e-4, 1e-4) < 1e-5);
        let q = ProbeField::complex1d(1.0, 25.0).unwrap();
        assert!(q.pde_residual_with_steps([0.3, 0.0], 0.4, 1e-4, 1e-7) < 1e-4);
        let r = ProbeField::complex2d([0.6, 0.8], None, 2.0, 30.0).unwrap();
        assert!(r.pde_residual([0.3, 0.7], 0.4) < 1e-5);
    }

    #[test]
    fn normal_derivative_matches_gradient() {
        let p = ProbeField::complex2d([1.0, 0.0], None, 1.5, 20.0).unwrap();
        let x = [1.0, 0.3];
        let h = 1e-6;
        let num = (p.value([x[0] + h, x[1]], 0.2).to_complex() - p.value([x[0] - h, x[1]], 0.2).to_complex()) / (2.0 * h);
        let an = p.normal_derivative(x, 0.2, [1.0, 0.0]).to_complex();
        assert!((num - an).norm() < 1e-6 * an.norm());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn level_set_geometry(theta in 0.0..core::f64::consts::TAU, c in 0.2f64..5.0, k in 1.01f64..50.0,
                              x in 0.0f64..1.0, y in 0.0f64..1.0, t in 0.0f64..1.0) {
            let tau = k / (c * c);
            let om = [theta.cos(), theta.sin()];
            let p = ProbeField::complex2d(om, None, c, tau).unwrap();
            let d = p.direction().unwrap();
            let expect = d.normalizer() * tau * dot(&[x, y, t], d.vector());
            prop_assert!((p.log_magnitude([x, y], t) - expect).abs() < 1e-9 * expect.abs().max(1.0));
            prop_assert!((p.zz().re - tau).abs() < 1e-9 * tau);

            for sgn in [1.0, -1.0] {
                let q = ProbeField::complex1d(sgn * c, tau).unwrap();
                let d = q.direction().unwrap();
                let expect = d.normalizer() * tau * dot(&[x, t], d.vector());
                prop_assert!((q.log_magnitude([x, 0.0], t) - expect).abs() < 1e-9 * expect.abs().max(1.0));
                prop_assert!((q.zz().re - tau).abs() < 1e-9 * tau);
            }
        }

        #[test]
        fn dichotomy_slope(c in 0.2f64..5.0, x in 0.0f64..1.0, t in 0.0f64..1.0, s in -1.0f64..2.0) {
            // d/dτ log|e^{τs} v| = s − t + c x
            let slope = |tau: f64| {
                let v = ProbeField::complex1d(c, tau).unwrap();
                tau * s + v.log_magnitude([x, 0.0], t)
            };
            let t1 = 2.0 / (c * c);
            let numeric = slope(t1 + 1.0) - slope(t1);
            prop_assert!((numeric - (s - t + c * x)).abs() < 1e-9);
        }

        #[test]
        fn exact_probe_residuals(kind in 0usize..3, tau_exp in 1i32..4, theta in 0.0..core::f64::consts::TAU,
                                 x in 0.0f64..1.0, y in 0.0f64..1.0, t in 0.0f64..1.0) {
            let tau = 10f64.powi(tau_exp);
            let om = [theta.cos(), theta.sin()];
            let p = match kind {
                0 => ProbeField::real(Dim::Two, om, tau).unwrap(),
                1 => ProbeField::complex2d(om, None, 1.0, tau).unwrap(),
                _ => ProbeField::complex1d(if theta < 3.0 { 1.0 } else { -0.7 }, tau).unwrap(),
            };
            prop_assert!(p.pde_residual([x, y], t) < 1e-4);
        }
    }
}
