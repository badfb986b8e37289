use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_dim, Point, SourceSpec, SpatialDomain};
use crate::linalg::least_squares;
use crate::probes::ProbeField;
use crate::quad::adaptive_gk;
use crate::{Error, Result};

use super::volume::source_term;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSample {
    pub tau: f64,
    /// `log(e^{τT₀} |∫_{D ∩ slab} ρ e^{√τ x·ω − τt}|)`.
    pub log_value: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    pub holds: bool,
}

/// Onset-slab band `K₁e^{√τK₂}τ^{−(p+1)} ≤ · ≤ K₃e^{√τK₄}` checked over a
/// `τ` grid. The constants come from the lower/upper estimates: `K₂`, `K₄`
/// are the extreme values of `x·ω` over Ω, `K₁ = C₁C₂γ(p+1, τ_min δ)` with
/// `|D(s)| ≥ C₁sᵖ` and `|ρ| ≥ C₂` sampled on the slab, and
/// `K₃ = max|ρ|·|Ω|/τ_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub t0: f64,
    pub delta: f64,
    pub measure_exponent: f64,
    pub k: [f64; 4],
    pub samples: Vec<BandSample>,
    pub holds: bool,
    /// Least-squares `(k₀, k₁, k₂)` of `log value ≈ k₀ + k₁√τ + k₂ log τ`.
    pub fitted: Option<[f64; 3]>,
}

fn density_samples(spec: &SourceSpec, t0: f64, t1: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for comp in spec.components() {
        let lo_t = comp.onset().max(t0);
        if !(t1 > lo_t) {
            continue;
        }
        let region = comp.region();
        let (lo, hi) = region.bounds();
        let mut pts: Vec<Point> = region.vertices();
        for i in 0..=6 {
            for j in 0..=6 {
                let x = [lo[0] + (hi[0] - lo[0]) * i as f64 / 6.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 6.0];
                if region.contains(x) {
                    pts.push(x);
                }
            }
        }
        for k in 0..=4 {
            let t = lo_t + (t1 - lo_t) * k as f64 / 4.0;
            out.extend(pts.iter().map(|&x| comp.density().eval(x, t)));
        }
    }
    out
}

pub fn onset_band(domain: &SpatialDomain, spec: &SourceSpec, omega: Point, tau_grid: &[f64], delta: f64) -> Result<BandReport> {
    check_dim(domain.dim(), spec.dim())?;
    let t0 = spec.onset_min().ok_or(Error::EmptySource)?;
    if !(delta > 0.0) || t0 + delta > spec.final_time() {
        return Err(Error::InvalidInput(alloc::format!("slab width δ = {delta} must lie in (0, T − T₀]")));
    }
    if tau_grid.is_empty() || tau_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput("band check needs a positive τ grid".into()));
    }
    let rho = density_samples(spec, t0, t0 + delta);
    let pos = rho.iter().any(|&r| r > 0.0);
    let neg = rho.iter().any(|&r| r < 0.0);
    if pos && neg {
        return Err(Error::MixedSignDensity);
    }
    let rho_min = rho.iter().fold(f64::INFINITY, |m, r| m.min(r.abs()));
    let rho_max = rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let p = spec.measure_exponent();
    let c1 = (1..=32)
        .map(|k| {
            let s = delta * k as f64 / 32.0;
            let m: f64 = spec.components().iter().filter(|c| c.onset() <= t0 + s).map(|c| c.region().measure()).sum();
            m / s.powf(p)
        })
        .fold(f64::INFINITY, f64::min);

    let tau_min = tau_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let gamma = adaptive_gk(|x| Complex64::new(x.powf(p) * (-x).exp(), 0.0), 0.0, tau_min * delta, 1e-14, 1e-12, 200).value.re;
    let xw: Vec<f64> = domain.corners().iter().map(|x| x[0] * omega[0] + x[1] * omega[1]).collect();
    let k2 = xw.iter().cloned().fold(f64::INFINITY, f64::min);
    let k4 = xw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let k1 = c1 * rho_min * gamma;
    let k3 = rho_max * domain.measure() / tau_min;

    let mut samples = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let probe = ProbeField::real(spec.dim(), omega, tau)?;
        let acc = source_term(spec, &probe, Some((t0, t0 + delta)))?;
        let log_value = acc.value().log_abs + tau * t0;
        let log_lower = k1.ln() + tau.sqrt() * k2 - (p + 1.0) * tau.ln();
        let log_upper = k3.ln() + tau.sqrt() * k4;
        let holds = log_lower <= log_value && log_value <= log_upper;
        samples.push(BandSample { tau, log_value, log_lower, log_upper, holds });
    }
    let fitted = if samples.len() >= 3 {
        let rows: Vec<Vec<f64>> = samples.iter().map(|s| alloc::vec![1.0, s.tau.sqrt(), s.tau.ln()]).collect();
        let rhs: Vec<f64> = samples.iter().map(|s| s.log_value).collect();
        least_squares(&rows, &rhs).ok().map(|ls| [ls.coefficients[0], ls.coefficients[1], ls.coefficients[2]])
    } else {
        None
    };
    let holds = samples.iter().all(|s| s.holds);
    Ok(BandReport { t0, delta, measure_exponent: p, k: [k1, k2, k3, k4], samples, holds, fitted })
}
