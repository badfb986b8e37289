use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_dim, clip_to_box, Dim, Point, Region, SourceSpec};
use crate::indicator::IndicatorSample;
use crate::logc::{LogComplex, LogSum};
use crate::probes::{ProbeField, ProbeKind};
use crate::quad::GaussLegendre;
use crate::solver::FieldSnapshot;
use crate::{Error, Result};

const GL_ORDER: usize = 8;
// largest |∇ log X| · cell width (space) or |λ| · panel width (time)
const PHASE_STEP: f64 = 0.25;
// terms below e^{-TAIL} of the leading one are dropped
const TAIL: f64 = 80.0;

/// `e^{τs}(∫₀^T∫_Ω f v − ∫_Ω u(·,T) v(·,T))`: the source term by per-cell
/// Gauss quadrature in space and panel Gauss quadrature in time, the
/// final-time term with the solver's grid weights.
///
/// Asymptotic (2D radial) probes are accepted; the caller can check
/// [`ProbeField::is_asymptotic`].
pub fn volume_indicator(spec: &SourceSpec, snapshot: &FieldSnapshot, probe: &ProbeField, s: f64) -> Result<IndicatorSample> {
    check_dim(spec.dim(), probe.dim())?;
    if snapshot.final_values.is_empty() {
        return Err(Error::MissingSnapshot);
    }
    let mut acc = source_term(spec, probe, None)?;
    let t = snapshot.grid.final_time();
    for (x, w, u) in snapshot.nodes() {
        if u != 0.0 {
            acc.add(probe.value(x, t), -w * u);
        }
    }
    Ok(IndicatorSample::from_sum(probe.tau(), s, &acc))
}

/// `∫∫_D ρ v` restricted to the time window `[t_lo, t_hi]` (all of `[0, T]`
/// when `None`).
pub fn source_term(spec: &SourceSpec, probe: &ProbeField, window: Option<(f64, f64)>) -> Result<LogSum> {
    check_dim(spec.dim(), probe.dim())?;
    let (w_lo, w_hi) = window.unwrap_or((0.0, spec.final_time()));
    let gl = GaussLegendre::new(GL_ORDER);
    let mut acc = LogSum::new();
    for comp in spec.components() {
        let t0 = comp.onset().max(w_lo);
        let t1 = spec.final_time().min(w_hi);
        if !(t1 > t0) {
            continue;
        }
        for m in &comp.density().terms {
            let space = spatial_moment(&gl, comp.region(), m.powers[0], m.powers[1], probe);
            let time = time_moment(&gl, m.powers[2], probe.zz(), t0, t1);
            acc.add(space.value() * time.value(), m.coef);
        }
    }
    Ok(acc)
}

/// Upper bound on the rate `|∇ log X|` over the box `[lo, hi]`.
fn log_gradient_bound(probe: &ProbeField, lo: Point, hi: Point) -> f64 {
    match probe.kind() {
        ProbeKind::Radial => {
            let p = probe.pole();
            let dx = (lo[0] - p[0]).max(p[0] - hi[0]).max(0.0);
            let dy = if probe.dim() == Dim::Two { (lo[1] - p[1]).max(p[1] - hi[1]).max(0.0) } else { 0.0 };
            let r = dx.hypot(dy).max(1e-12);
            probe.tau().sqrt() + 0.5 / r
        }
        _ => {
            let z = probe.z();
            z[0].norm().hypot(if probe.dim() == Dim::Two { z[1].norm() } else { 0.0 })
        }
    }
}

/// `∫_P x^a y^b X(x) dx` with `X = v(·, 0)`.
fn spatial_moment(gl: &GaussLegendre, region: &Region, a: u32, b: u32, probe: &ProbeField) -> LogSum {
    let (lo, hi) = region.bounds();
    let rate = log_gradient_bound(probe, lo, hi);
    let mut acc = LogSum::new();
    let mut add = |x: Point, w: f64| {
        let f = x[0].powi(a as i32) * x[1].powi(b as i32) * w;
        acc.add(LogComplex::exp(probe.log_v(x, 0.0)), f);
    };
    match region {
        Region::Interval { lo, hi } => {
            let m = (((hi - lo) * rate / PHASE_STEP).ceil() as usize).max(1);
            let h = (hi - lo) / m as f64;
            for k in 0..m {
                let a0 = lo + k as f64 * h;
                for (x, w) in gl.on(a0, a0 + h) {
                    add([x, 0.0], w);
                }
            }
        }
        Region::Polygon { vertices } => {
            let mx = (((hi[0] - lo[0]) * rate / PHASE_STEP).ceil() as usize).max(1);
            let my = (((hi[1] - lo[1]) * rate / PHASE_STEP).ceil() as usize).max(1);
            let hx = (hi[0] - lo[0]) / mx as f64;
            let hy = (hi[1] - lo[1]) / my as f64;
            let nodes: Vec<(f64, f64)> = gl.on(0.0, 1.0).collect();
            for j in 0..my {
                for i in 0..mx {
                    let c_lo = [lo[0] + i as f64 * hx, lo[1] + j as f64 * hy];
                    let c_hi = [c_lo[0] + hx, c_lo[1] + hy];
                    let ring = clip_to_box(vertices, c_lo, c_hi);
                    if ring.len() < 3 {
                        continue;
                    }
                    // signed fan from the first vertex; collapsed Gauss rule per triangle
                    let p0 = ring[0];
                    for k in 1..ring.len() - 1 {
                        let (p1, p2) = (ring[k], ring[k + 1]);
                        let e1 = [p1[0] - p0[0], p1[1] - p0[1]];
                        let e2 = [p2[0] - p0[0], p2[1] - p0[1]];
                        let jac = e1[0] * e2[1] - e1[1] * e2[0];
                        if jac == 0.0 {
                            continue;
                        }
                        for &(u, wu) in &nodes {
                            for &(v, wv) in &nodes {
                                let (l1, l2) = (u * (1.0 - v), u * v);
                                let x = [p0[0] + l1 * e1[0] + l2 * e2[0], p0[1] + l1 * e1[1] + l2 * e2[1]];
                                add(x, wu * wv * u * jac);
                            }
                        }
                    }
                }
            }
        }
    }
    acc
}

/// `∫_{t0}^{t1} t^k e^{−λt} dt` on panels of width at most `0.25/|λ|`,
/// truncated once `e^{−Re λ t}` has fallen by `e^{-80}` past the peak.
fn time_moment(gl: &GaussLegendre, k: u32, lambda: Complex64, t0: f64, t1: f64) -> LogSum {
    let mut end = t1;
    if lambda.re > 0.0 {
        let peak = t0.max(k as f64 / lambda.re);
        end = end.min(peak + TAIL / lambda.re);
    }
    let m = (((end - t0) * lambda.norm() / PHASE_STEP).ceil() as usize).max(1);
    let h = (end - t0) / m as f64;
    let mut acc = LogSum::new();
    for p in 0..m {
        let a = t0 + p as f64 * h;
        for (t, w) in gl.on(a, a + h) {
            acc.add(LogComplex::exp(-lambda * t), w * t.powi(k as i32));
        }
    }
    acc
}

/// Final-time term against its crude bound `‖u(·,T)‖₁ · max_x |v(x,T)|`,
/// both scaled by `e^{τs}` and in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalTimeBound {
    pub log_term: f64,
    pub log_bound: f64,
}

impl FinalTimeBound {
    pub fn holds(&self) -> bool {
        self.log_term <= self.log_bound + 1e-12 * self.log_bound.abs().max(1.0)
    }
}

pub fn final_time_bound(snapshot: &FieldSnapshot, probe: &ProbeField, s: f64) -> Result<FinalTimeBound> {
    if snapshot.final_values.is_empty() {
        return Err(Error::MissingSnapshot);
    }
    let t = snapshot.grid.final_time();
    let mut acc = LogSum::new();
    let mut l1 = 0.0;
    let mut vmax = f64::NEG_INFINITY;
    for (x, w, u) in snapshot.nodes() {
        let lv = probe.log_v(x, t);
        vmax = vmax.max(lv.re);
        l1 += w * u.abs();
        if u != 0.0 {
            acc.add(LogComplex::exp(lv), w * u);
        }
    }
    let shift = probe.tau() * s;
    Ok(FinalTimeBound { log_term: acc.value().log_abs + shift, log_bound: l1.ln() + vmax + shift })
}
