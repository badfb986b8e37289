use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::{Error, Result};

/// Probe parameters of a 1D segment integral: signed speed `c`, cone height
/// `δ` and `τ` (with `c²τ > 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    pub c: f64,
    pub delta: f64,
    pub tau: f64,
}

impl SegmentParams {
    fn beta(&self) -> Result<f64> {
        if !(self.delta > 0.0) || self.c == 0.0 {
            return Err(Error::InvalidInput("segment integrals need δ > 0 and c ≠ 0".into()));
        }
        let min = 1.0 / (self.c * self.c);
        if !(self.tau > min) {
            return Err(Error::TauTooSmall { tau: self.tau, min });
        }
        Ok((1.0 - min / self.tau).sqrt())
    }
}

/// `B(y, τ) = (c/δ)(y − p)·(1, −2cτ)√(1 − 1/(c²τ))` for space-time `y = (x, t)`.
pub fn segment_b(y: Point, p: Point, params: &SegmentParams) -> Result<f64> {
    let beta = params.beta()?;
    let SegmentParams { c, delta, tau } = *params;
    Ok(c / delta * ((y[0] - p[0]) - 2.0 * c * tau * (y[1] - p[1])) * beta)
}

// below this |ΔB/W₀| the three-term form loses digits to cancellation
const SERIES_SWITCH: f64 = 0.05;
const SERIES_TERMS: usize = 20;

/// `(J₁, J₂)` over the segment `Q = [y₀, y₁]` with `W(y) = √(c²+1) − iB(y, τ)`:
///
/// * `J₁ = ∫_Q dS/W² = |y₁−y₀| / (W(y₁) W(y₀))`
/// * `J₂ = ∫_Q 2∇ρ(p)·(y−p) dS/W³`, by the integrated-by-parts three-term
///   form, or by its power series in `ΔB/W(y₀)` when `B(y₁) ≈ B(y₀)`.
pub fn segment_integrals(y0: Point, y1: Point, p: Point, params: &SegmentParams, grad_rho: Point) -> Result<(Complex64, Complex64)> {
    let a = (params.c * params.c + 1.0).sqrt();
    let b0 = segment_b(y0, p, params)?;
    let b1 = segment_b(y1, p, params)?;
    let len = (y1[0] - y0[0]).hypot(y1[1] - y0[1]);
    let w0 = Complex64::new(a, -b0);
    let w1 = Complex64::new(a, -b1);
    let j1 = len / (w0 * w1);

    let l0 = grad_rho[0] * (y0[0] - p[0]) + grad_rho[1] * (y0[1] - p[1]);
    let l1 = grad_rho[0] * (y1[0] - p[0]) + grad_rho[1] * (y1[1] - p[1]);
    let dl = l1 - l0;
    let db = b1 - b0;
    let eps = Complex64::new(0.0, db) / w0;
    let j2 = if eps.norm() >= SERIES_SWITCH {
        Complex64::new(0.0, -len / db) * (l1 / (w1 * w1) - l0 / (w0 * w0) - dl / (w0 * w1))
    } else {
        // W(η) = W₀(1 − εη) and (1 − x)^{-3} = Σ C(k+2, 2) x^k
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..SERIES_TERMS {
            let kf = k as f64;
            let binom = 0.5 * (kf + 1.0) * (kf + 2.0);
            sum += pow * (binom * (l0 / (kf + 1.0) + dl / (kf + 2.0)));
            pow *= eps;
        }
        sum * (2.0 * len) / (w0 * w0 * w0)
    };
    Ok((j1, j2))
}
