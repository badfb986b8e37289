//! Boundary-integral indicator
//! `I(τ; s) = e^{τs} ∫₀^T ∫_∂Ω (∂v/∂ν · u − ∂u/∂ν · v) dS dt`
//! and the extraction laws built on its growth rate in `τ`.

mod estimate;
mod fit;

pub use estimate::{
    build_enclosure, classify_trend, complex_tau_grid, dichotomy_report, dichotomy_scan, enclosure_from_support,
    estimate_support, estimate_t0, estimate_t0_with, support_from_samples, support_record, t0_from_samples,
    DichotomyEntry, DichotomyReport, EnclosureOptions, EnclosureResult, SupportOptions, SupportRecord, Trend,
};
pub use fit::{fit_slope, FitModel, SlopeFit};

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::check_dim;
use crate::logc::{LogComplex, LogSum};
use crate::probes::{ProbeField, ProbeKind};
use crate::solver::BoundaryData;
use crate::{Error, Result};

/// Floor of the max-shifted accumulator.
pub const FLOOR: f64 = 1e-300;

/// One evaluation `(τ, s) ↦ I(τ; s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSample {
    pub tau: f64,
    pub s: f64,
    /// `log|I(τ; s)|`; `-∞` on a floor hit.
    pub log_abs: f64,
    pub phase: f64,
    pub floor_hit: bool,
    /// `ln(Σ|terms| / |Σ terms|)`: digits lost to cancellation, in nats.
    pub log_cancellation: f64,
}

impl IndicatorSample {
    pub(crate) fn from_sum(tau: f64, s: f64, acc: &LogSum) -> Self {
        let value = acc.value();
        let floor_hit = acc.underflows(FLOOR);
        Self {
            tau,
            s,
            log_abs: if floor_hit { f64::NEG_INFINITY } else { value.log_abs + tau * s },
            phase: if floor_hit { 0.0 } else { value.arg() },
            floor_hit,
            log_cancellation: if floor_hit { 0.0 } else { acc.log_cancellation() },
        }
    }

    /// The same evaluation at another `s` (the `e^{τs}` prefactor is exact).
    pub fn shifted(&self, s: f64) -> Self {
        let log_abs = if self.floor_hit { self.log_abs } else { self.log_abs + self.tau * (s - self.s) };
        Self { s, log_abs, ..*self }
    }

    pub fn value(&self) -> LogComplex {
        LogComplex::new(self.log_abs, self.phase)
    }
}

/// Smallest `N_t` the oscillation gate accepts for a 1D complex probe:
/// eight samples per period of the `2c²τ²t` phase over `[0, T]`.
pub fn oscillation_gate_steps(c: f64, tau: f64, final_time: f64) -> usize {
    (8.0 * c * c * tau * tau * final_time / core::f64::consts::PI).ceil() as usize
}

/// Largest `τ` the oscillation gate accepts for `N_t` steps.
pub fn oscillation_gate_tau(c: f64, n_t: usize, final_time: f64) -> f64 {
    (n_t as f64 * core::f64::consts::PI / (8.0 * c * c * final_time)).sqrt()
}

pub(crate) fn check_gate(data: &BoundaryData, probe: &ProbeField) -> Result<()> {
    if probe.kind() == ProbeKind::Complex1d {
        let required = oscillation_gate_steps(probe.c(), probe.tau(), data.final_time());
        if data.n_t() < required {
            return Err(Error::OscillationGate { tau: probe.tau(), c: probe.c(), required, have: data.n_t() });
        }
    }
    Ok(())
}

/// Trapezoid in time, boundary-node weights in space, accumulated in
/// log-polar form.
pub fn indicator(data: &BoundaryData, probe: &ProbeField, s: f64) -> Result<IndicatorSample> {
    check_dim(data.dim(), probe.dim())?;
    check_gate(data, probe)?;
    let times = data.times();
    let nt = times.len();
    let mut acc = LogSum::new();
    for (b, node) in data.nodes().iter().enumerate() {
        let u = data.dirichlet(b);
        let q = data.neumann(b);
        let g = probe.grad_log(node.x);
        let dn = g[0] * node.normal[0] + g[1] * node.normal[1];
        let l0 = probe.log_v(node.x, 0.0);
        let zz = probe.zz();
        for k in 0..nt {
            if u[k] == 0.0 && q[k] == 0.0 {
                continue;
            }
            let dt_w = if k == 0 {
                0.5 * (times[1] - times[0])
            } else if k == nt - 1 {
                0.5 * (times[k] - times[k - 1])
            } else {
                0.5 * (times[k + 1] - times[k - 1])
            };
            // v·(∂ν log v · u − ∂u/∂ν)
            let bracket = dn * u[k] - Complex64::new(q[k], 0.0);
            let term = LogComplex::exp(l0 - zz * times[k]) * bracket;
            acc.add(term, node.weight * dt_w);
        }
    }
    Ok(IndicatorSample::from_sum(probe.tau(), s, &acc))
}
