use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::fit::{fit_slope, FitModel, SlopeFit, MIN_SAMPLES};
use super::{indicator, oscillation_gate_tau, IndicatorSample};
use crate::geometry::{
    condition_margin, intersect_halfspaces, omega_c, ClipBox, Dim, Point, SourceSpec, SpaceTimeDirection,
    SpaceTimePolytope, SpatialDomain,
};
use crate::probes::ProbeField;
use crate::solver::BoundaryData;
use crate::{Error, Result};

const MIN_T0_TAU: f64 = 10.0;
const DEAD_BAND: f64 = 0.01;

fn check_grid(tau_grid: &[f64], min_tau: f64) -> Result<()> {
    if tau_grid.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { survivors: tau_grid.len(), needed: MIN_SAMPLES });
    }
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("tau grid must be strictly increasing".into()));
    }
    if tau_grid[0] < min_tau {
        return Err(Error::TauTooSmall { tau: tau_grid[0], min: min_tau });
    }
    Ok(())
}

fn fit_samples(model: FitModel, samples: &[IndicatorSample]) -> Result<SlopeFit> {
    let taus: Vec<f64> = samples.iter().map(|s| s.tau).collect();
    let logs: Vec<f64> = samples.iter().map(|s| s.log_abs).collect();
    fit_slope(model, &taus, &logs)
}

/// `T₀ ≈ −α` from real probes `e^{√τ x·ω − τt}` at `s = 0`.
pub fn estimate_t0(data: &BoundaryData, omega: Point, tau_grid: &[f64]) -> Result<(f64, SlopeFit)> {
    let dim = data.dim();
    estimate_t0_with(data, |tau| ProbeField::real(dim, omega, tau), tau_grid, FitModel::Real)
}

/// [`estimate_t0`] over any probe family, e.g. radial probes.
pub fn estimate_t0_with<F>(data: &BoundaryData, family: F, tau_grid: &[f64], model: FitModel) -> Result<(f64, SlopeFit)>
where
    F: Fn(f64) -> Result<ProbeField>,
{
    check_grid(tau_grid, MIN_T0_TAU)?;
    let samples: Vec<IndicatorSample> = tau_grid.iter().map(|&tau| indicator(data, &family(tau)?, 0.0)).collect::<Result<_>>()?;
    t0_from_samples(&samples, model)
}

/// `T₀ ≈ −α` from precomputed `s = 0` samples (sorted by `τ`, all `τ ≥ 10`).
pub fn t0_from_samples(samples: &[IndicatorSample], model: FitModel) -> Result<(f64, SlopeFit)> {
    let taus: Vec<f64> = samples.iter().map(|s| s.tau).collect();
    check_grid(&taus, MIN_T0_TAU)?;
    let kept: Vec<IndicatorSample> = samples.iter().filter(|s| !s.floor_hit).copied().collect();
    if kept.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { survivors: kept.len(), needed: MIN_SAMPLES });
    }
    let fit = fit_samples(model, &kept)?;
    Ok((-fit.slope(), fit))
}

/// Sign of `d log|I(τ; s)| / dτ` at large `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decaying,
    Growing,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyEntry {
    pub s: f64,
    pub trend: Trend,
    /// Regression slope over the upper half of the `τ` grid; NaN on floor hits.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub entries: Vec<DichotomyEntry>,
    /// `[s_decaying, s_growing]` around the crossover, when both regimes occur.
    pub bracket: Option<[f64; 2]>,
}

/// Classifies each `s` by the slope of `log|I(τ; s)|` over the upper half of
/// the `τ` grid, with a dead band of `±0.01`.
pub fn dichotomy_scan<F>(data: &BoundaryData, family: F, s_grid: &[f64], tau_grid: &[f64]) -> Result<DichotomyReport>
where
    F: Fn(f64) -> Result<ProbeField>,
{
    if s_grid.is_empty() || tau_grid.is_empty() {
        return Err(Error::InvalidInput("dichotomy scan needs nonempty s and tau grids".into()));
    }
    let mut taus = tau_grid.to_vec();
    taus.sort_by(f64::total_cmp);
    let probes: Vec<ProbeField> = taus.iter().map(|&t| family(t)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let samples: Vec<IndicatorSample> = probes.iter().map(|p| indicator(data, p, s)).collect::<Result<_>>()?;
        entries.push(classify_trend(s, &samples));
    }
    Ok(dichotomy_report(entries))
}

/// Trend of one `s` from samples sorted by `τ`; only the upper half is used.
pub fn classify_trend(s: f64, samples: &[IndicatorSample]) -> DichotomyEntry {
    let upper = &samples[samples.len() / 2..];
    if upper.len() < 2 || upper.iter().any(|x| x.floor_hit) {
        return DichotomyEntry { s, trend: Trend::Indeterminate, slope: f64::NAN };
    }
    let slope = regression_slope(upper);
    let trend = if slope < -DEAD_BAND {
        Trend::Decaying
    } else if slope > DEAD_BAND {
        Trend::Growing
    } else {
        Trend::Indeterminate
    };
    DichotomyEntry { s, trend, slope }
}

/// Collects entries and brackets the crossover.
pub fn dichotomy_report(entries: Vec<DichotomyEntry>) -> DichotomyReport {
    let mut sorted: Vec<&DichotomyEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    let last_decay = sorted.iter().filter(|e| e.trend == Trend::Decaying).map(|e| e.s).last();
    let bracket = last_decay.and_then(|lo| {
        sorted.iter().find(|e| e.trend == Trend::Growing && e.s > lo).map(|e| [lo, e.s])
    });
    DichotomyReport { entries, bracket }
}

fn regression_slope(samples: &[IndicatorSample]) -> f64 {
    let n = samples.len() as f64;
    let mt = samples.iter().map(|s| s.tau).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.log_abs).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.tau - mt) * (s.log_abs - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.tau - mt).powi(2)).sum();
    sxy / sxx
}

/// Knobs for [`estimate_support`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportOptions {
    pub model: FitModel,
    /// Samples whose cancellation `ln(Σ|terms|/|Σ|)` exceeds this are treated
    /// as precision-limited and dropped before fitting.
    pub max_log_cancellation: f64,
    /// RMS fit residual above which [`build_enclosure`] rejects a direction.
    pub residual_gate: f64,
}

impl Default for SupportOptions {
    fn default() -> Self {
        Self { model: FitModel::Complex, max_log_cancellation: 1e12f64.ln(), residual_gate: 0.15 }
    }
}

fn complex_probe(dim: Dim, omega: Point, omega_perp: Option<Point>, c: f64, tau: f64) -> Result<ProbeField> {
    match dim {
        Dim::One => ProbeField::complex1d(c * omega[0], tau),
        Dim::Two => ProbeField::complex2d(omega, omega_perp, c, tau),
    }
}

/// `h_D(ω(c)) ≈ α/√(c²+1)` from complex probes at `s = 0`.
pub fn estimate_support(
    data: &BoundaryData,
    omega: Point,
    omega_perp: Option<Point>,
    c: f64,
    tau_grid: &[f64],
    opts: &SupportOptions,
) -> Result<(f64, SlopeFit)> {
    let dir = omega_c(data.dim(), omega, c)?;
    check_grid(tau_grid, 0.0)?;
    check_speed_floor(c, tau_grid)?;
    let samples: Vec<IndicatorSample> = tau_grid
        .iter()
        .map(|&tau| indicator(data, &complex_probe(data.dim(), omega, omega_perp, c, tau)?, 0.0))
        .collect::<Result<_>>()?;
    support_from_samples(&samples, &dir, opts)
}

fn check_speed_floor(c: f64, taus: &[f64]) -> Result<()> {
    let min = 1.0 / (c * c);
    match taus.iter().find(|&&t| !(t > min)) {
        Some(&t) => Err(Error::TauTooSmall { tau: t, min }),
        None => Ok(()),
    }
}

/// `h ≈ α/√(c²+1)` from precomputed complex-probe samples at `s = 0`,
/// after dropping floor hits and samples past the cancellation gate.
pub fn support_from_samples(samples: &[IndicatorSample], dir: &SpaceTimeDirection, opts: &SupportOptions) -> Result<(f64, SlopeFit)> {
    let taus: Vec<f64> = samples.iter().map(|s| s.tau).collect();
    check_grid(&taus, 0.0)?;
    check_speed_floor(dir.c(), &taus)?;
    let kept: Vec<IndicatorSample> = samples
        .iter()
        .filter(|s| !s.floor_hit && s.log_cancellation <= opts.max_log_cancellation)
        .copied()
        .collect();
    if kept.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { survivors: kept.len(), needed: MIN_SAMPLES });
    }
    let fit = fit_samples(opts.model, &kept)?;
    Ok((fit.slope() / dir.normalizer(), fit))
}

/// `count` log-spaced `τ` for a complex probe of speed `|c|`: the top is
/// `min(ceiling, oscillation-gate limit)` (the gate applies to 1D probes
/// only), the bottom `min(lo, top/2)`, and every point stays above `c⁻²`.
pub fn complex_tau_grid(dim: Dim, c: f64, n_t: usize, final_time: f64, count: usize, lo: f64, ceiling: f64) -> Result<Vec<f64>> {
    let c = c.abs();
    let mut hi = ceiling;
    if dim == Dim::One {
        hi = hi.min(oscillation_gate_tau(c, n_t, final_time) * (1.0 - 1e-12));
    }
    let floor = 1.0 / (c * c) * (1.0 + 1e-6);
    let lo = lo.min(0.5 * hi).max(floor);
    if !(hi > lo) || count < 2 {
        return Err(Error::TauTooSmall { tau: hi, min: lo });
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|k| lo * (ratio * k as f64).exp()).collect())
}

/// One direction's support estimate and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportRecord {
    pub omega: Point,
    pub c: f64,
    pub h_estimate: Option<f64>,
    pub fit: Option<SlopeFit>,
    /// Final-time separation margin (see `condition_margin`) when the true source is known.
    pub condition_margin: Option<f64>,
    pub rejected: bool,
    pub reason: Option<String>,
}

impl SupportRecord {
    pub fn direction(&self, dim: Dim) -> Result<SpaceTimeDirection> {
        omega_c(dim, self.omega, self.c)
    }
}

/// Support samples, the clipped half-space intersection and the optional `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosureResult {
    pub records: Vec<SupportRecord>,
    pub polytope: SpaceTimePolytope,
    pub t0_estimate: Option<f64>,
    pub t0_fit: Option<SlopeFit>,
}

/// Options for [`build_enclosure`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureOptions {
    pub support: SupportOptions,
    /// Explicit `τ` grid for every direction; otherwise [`complex_tau_grid`].
    pub tau_grid: Option<Vec<f64>>,
    pub tau_count: usize,
    pub tau_lo: f64,
    pub tau_ceiling: f64,
    pub omega_perp: Option<Point>,
    /// Real-probe pass `(ω, τ grid)` for `t0`.
    pub t0_pass: Option<(Point, Vec<f64>)>,
}

impl Default for EnclosureOptions {
    fn default() -> Self {
        Self {
            support: SupportOptions::default(),
            tau_grid: None,
            tau_count: 12,
            tau_lo: 20.0,
            tau_ceiling: 50.0,
            omega_perp: None,
            t0_pass: None,
        }
    }
}

/// Runs [`estimate_support`] per direction `(ω, c)`, rejects fits above the
/// residual gate and intersects the surviving half-spaces with `clip`.
pub fn build_enclosure(
    data: &BoundaryData,
    directions: &[(Point, f64)],
    clip: &ClipBox,
    opts: &EnclosureOptions,
    truth: Option<(&SpatialDomain, &SourceSpec)>,
) -> Result<EnclosureResult> {
    if directions.is_empty() {
        return Err(Error::InvalidInput("build_enclosure needs at least one direction".into()));
    }
    let mut records = Vec::with_capacity(directions.len());
    for &(omega, c) in directions {
        let dir = omega_c(data.dim(), omega, c)?;
        let margin = match truth {
            Some((domain, spec)) => Some(condition_margin(domain, data.final_time(), spec, &dir)?),
            None => None,
        };
        let grid = match &opts.tau_grid {
            Some(g) => Ok(g.clone()),
            None => complex_tau_grid(data.dim(), c, data.n_t(), data.final_time(), opts.tau_count, opts.tau_lo, opts.tau_ceiling),
        };
        let outcome = grid.and_then(|g| estimate_support(data, omega, opts.omega_perp, c, &g, &opts.support));
        let record = support_record(omega, c, outcome, opts.support.residual_gate, margin);
        records.push(record);
    }
    if records.iter().all(|r| r.rejected) {
        return Err(Error::AllRejected { gate: opts.support.residual_gate });
    }
    let (t0_estimate, t0_fit) = match &opts.t0_pass {
        Some((omega, grid)) => {
            let (t0, fit) = estimate_t0(data, *omega, grid)?;
            (Some(t0), Some(fit))
        }
        None => (None, None),
    };
    let mut result = enclosure_from_support(data.dim(), records, clip)?;
    result.t0_estimate = t0_estimate;
    result.t0_fit = t0_fit;
    Ok(result)
}

/// Wraps a support estimate (or its failure) as a record, rejecting fits
/// whose RMS residual exceeds `gate`.
pub fn support_record(omega: Point, c: f64, outcome: Result<(f64, SlopeFit)>, gate: f64, margin: Option<f64>) -> SupportRecord {
    match outcome {
        Ok((h, fit)) => {
            let rejected = !(fit.residual_norm <= gate);
            let reason = rejected.then(|| alloc::format!("fit residual {:.3e} above gate {:.3e}", fit.residual_norm, gate));
            SupportRecord { omega, c, h_estimate: Some(h), fit: Some(fit), condition_margin: margin, rejected, reason }
        }
        Err(e) => SupportRecord {
            omega,
            c,
            h_estimate: None,
            fit: None,
            condition_margin: margin,
            rejected: true,
            reason: Some(e.to_string()),
        },
    }
}

/// Intersects the half-spaces of every non-rejected record with `clip`.
pub fn enclosure_from_support(dim: Dim, records: Vec<SupportRecord>, clip: &ClipBox) -> Result<EnclosureResult> {
    let mut samples = Vec::new();
    for r in records.iter().filter(|r| !r.rejected) {
        if let Some(h) = r.h_estimate {
            samples.push((r.direction(dim)?, h));
        }
    }
    let polytope = intersect_halfspaces(&samples, clip)?;
    Ok(EnclosureResult { records, polytope, t0_estimate: None, t0_fit: None })
}
