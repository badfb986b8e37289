//! Exact cell × time-step integrals of the source.
//!
//! Each control volume is the node's half-cell box clipped to Ω; the spatial
//! part of every monomial is integrated exactly over `CV ∩ P_j` once, and the
//! time part `∫ t^k` over `[t_n, t_{n+1}] ∩ [T_j, T]` analytically per step.

use alloc::vec::Vec;

use num_traits::Float;

use super::Grid;
use crate::geometry::{Point, SourceSpec};

struct Piece {
    onset: f64,
    // (coef, time power) per monomial
    terms: Vec<(f64, u32)>,
    // (node index, spatial moment per term)
    cells: Vec<(usize, Vec<f64>)>,
}

/// Precomputed space-time integrals `F_i^n = ∫_{t_n}^{t_{n+1}} ∫_{CV_i} f`.
pub(crate) struct SourceIntegrals {
    pieces: Vec<Piece>,
    final_time: f64,
}

impl SourceIntegrals {
    pub(crate) fn new(spec: &SourceSpec, grid: &Grid) -> Self {
        let mut pieces = Vec::new();
        for comp in spec.components() {
            let region = comp.region();
            let terms: Vec<(f64, u32)> = comp.density().terms.iter().map(|m| (m.coef, m.powers[2])).collect();
            let (rlo, rhi) = region.bounds();
            let mut cells = Vec::new();
            let dims = grid.dim().n();
            let range = |axis: usize| {
                let h = grid.spacing()[axis];
                let lo = grid.origin()[axis];
                let first = (((rlo[axis] - lo) / h - 0.5).floor().max(0.0)) as usize;
                let last = ((((rhi[axis] - lo) / h) + 0.5).ceil() as usize).min(grid.cells()[axis]);
                (first, last)
            };
            let (i0, i1) = range(0);
            let (j0, j1) = if dims == 2 { range(1) } else { (0, 0) };
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let (lo, hi) = grid.control_volume(i, j);
                    let moments: Vec<f64> = comp
                        .density()
                        .terms
                        .iter()
                        .map(|m| region.moment_in_box(m.powers[0], m.powers[1], lo, hi))
                        .collect();
                    if moments.iter().any(|&v| v != 0.0) {
                        cells.push((grid.node_index(i, j), moments));
                    }
                }
            }
            pieces.push(Piece { onset: comp.onset(), terms, cells });
        }
        Self { pieces, final_time: spec.final_time() }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pieces.iter().all(|p| p.cells.is_empty())
    }

    /// Adds `F^n` for the step `[t0, t1]` into `out` (indexed by node).
    pub(crate) fn accumulate(&self, t0: f64, t1: f64, out: &mut [f64]) {
        let mut tk = Vec::new();
        for p in &self.pieces {
            let a = t0.max(p.onset);
            let b = t1.min(self.final_time);
            if b <= a {
                continue;
            }
            tk.clear();
            tk.extend(p.terms.iter().map(|&(coef, k)| {
                let e = k as i32 + 1;
                coef * (b.powi(e) - a.powi(e)) / e as f64
            }));
            for (idx, moments) in &p.cells {
                out[*idx] += moments.iter().zip(&tk).map(|(m, t)| m * t).sum::<f64>();
            }
        }
    }
}

/// Cell × step integrals of a general smooth `f(x, t)` by tensor Gauss rules
/// (used for manufactured solutions).
pub(crate) fn smooth_integrals<F: Fn(Point, f64) -> f64>(grid: &Grid, f: &F, t0: f64, t1: f64, out: &mut [f64]) {
    let gl = crate::quad::GaussLegendre::new(4);
    let ny = if grid.dim().n() == 2 { grid.cells()[1] } else { 0 };
    for j in 0..=ny {
        for i in 0..=grid.cells()[0] {
            let (lo, hi) = grid.control_volume(i, j);
            let mut acc = 0.0;
            for (t, wt) in gl.on(t0, t1) {
                for (x, wx) in gl.on(lo[0], hi[0]) {
                    if grid.dim().n() == 2 {
                        for (y, wy) in gl.on(lo[1], hi[1]) {
                            acc += wt * wx * wy * f([x, y], t);
                        }
                    } else {
                        acc += wt * wx * f([x, 0.0], t);
                    }
                }
            }
            out[grid.node_index(i, j)] += acc;
        }
    }
}
