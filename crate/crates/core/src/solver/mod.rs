//! Forward heat solve `u_t = Δu + f`, `u(·, 0) = 0`, producing lateral
//! Cauchy data.
//!
//! Node-centred finite volumes: node `i` owns the box `[x_i − h/2, x_i + h/2]`
//! clipped to Ω, so end nodes carry half weights. The source enters through
//! exact control-volume × time-step integrals, which keeps the scheme exactly
//! conservative under `neumann0` and exactly causal before the onset.
//! Time stepping is Crank–Nicolson in 1D and Peaceman–Rachford ADI in 2D.

mod forcing;
mod stepper;

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryNode, Dim, Point, SourceSpec, SpatialDomain};
use crate::{Error, Result};

use forcing::SourceIntegrals;

/// Space-time grid on a [`SpatialDomain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: Dim,
    origin: Point,
    cells: [usize; 2],
    spacing: [f64; 2],
    n_t: usize,
    dt: f64,
    final_time: f64,
}

impl Grid {
    /// `cells[k]` cells (so `cells[k] + 1` nodes) per axis; `cells[1]` is
    /// ignored in 1D.
    pub fn new(domain: &SpatialDomain, cells: [usize; 2], n_t: usize, final_time: f64) -> Result<Self> {
        let n = domain.dim().n();
        for (k, &c) in cells.iter().enumerate().take(n) {
            if c + 1 < 16 {
                return Err(Error::InvalidGrid(alloc::format!("axis {k} has {} nodes, need at least 16", c + 1)));
            }
        }
        if n_t == 0 || !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::InvalidGrid(alloc::format!("need N_t >= 1 and T > 0 (N_t = {n_t}, T = {final_time})")));
        }
        let cells = if n == 1 { [cells[0], 0] } else { cells };
        let mut spacing = [0.0; 2];
        for k in 0..n {
            spacing[k] = domain.extent(k) / cells[k] as f64;
        }
        Ok(Self {
            dim: domain.dim(),
            origin: domain.lo(),
            cells,
            spacing,
            n_t,
            dt: final_time / n_t as f64,
            final_time,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn node_count(&self) -> usize {
        (self.cells[0] + 1) * (self.cells[1] + 1)
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i + (self.cells[0] + 1) * j
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        [self.origin[0] + i as f64 * self.spacing[0], self.origin[1] + j as f64 * self.spacing[1]]
    }

    /// Length of the control volume along one axis.
    pub(crate) fn axis_weight(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacing[axis];
        if i == 0 || i == self.cells[axis] {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoid weight of node `(i, j)` (the control-volume measure).
    pub fn node_weight(&self, i: usize, j: usize) -> f64 {
        match self.dim {
            Dim::One => self.axis_weight(0, i),
            Dim::Two => self.axis_weight(0, i) * self.axis_weight(1, j),
        }
    }

    /// Control volume of node `(i, j)` as a box `(lo, hi)`.
    pub fn control_volume(&self, i: usize, j: usize) -> (Point, Point) {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for (axis, idx) in [(0, i), (1, j)].into_iter().take(self.dim.n()) {
            let x = self.origin[axis] + idx as f64 * self.spacing[axis];
            let half = 0.5 * self.spacing[axis];
            lo[axis] = if idx == 0 { x } else { x - half };
            hi[axis] = if idx == self.cells[axis] { x } else { x + half };
        }
        (lo, hi)
    }

    /// Resolution gate: every source region spans at least eight cells and
    /// lies inside the domain.
    pub fn check_resolves(&self, domain: &SpatialDomain, spec: &SourceSpec) -> Result<()> {
        let spacing = self.spacing[..self.dim.n()].iter().copied().fold(0.0, f64::max);
        for comp in spec.components() {
            for v in comp.region().vertices() {
                if domain.distance(v) > 1e-12 {
                    return Err(Error::InvalidInput(alloc::format!("source vertex {v:?} lies outside the domain")));
                }
            }
            let limit = comp.region().min_extent() / 8.0;
            if spacing > limit {
                return Err(Error::UnderResolved { spacing, limit });
            }
        }
        Ok(())
    }
}

/// Boundary condition used to generate data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet0,
    #[default]
    Neumann0,
}

/// Dirichlet and Neumann traces on boundary nodes at `t_k = k·Δt`.
///
/// Traces are stored node-major: `dirichlet[node · (N_t + 1) + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    dim: Dim,
    nodes: Vec<BoundaryNode>,
    times: Vec<f64>,
    dirichlet: Vec<f64>,
    neumann: Vec<f64>,
    bc: BoundaryCondition,
}

impl BoundaryData {
    pub fn new(
        dim: Dim,
        nodes: Vec<BoundaryNode>,
        times: Vec<f64>,
        dirichlet: Vec<f64>,
        neumann: Vec<f64>,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        let nt = times.len();
        if nt < 2 || nodes.is_empty() {
            return Err(Error::InvalidInput("boundary data needs at least one node and two time levels".into()));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("time levels must start at 0 and increase".into()));
        }
        if dirichlet.len() != nodes.len() * nt || neumann.len() != nodes.len() * nt {
            return Err(Error::InvalidInput(alloc::format!(
                "trace arrays must have {} × {} entries",
                nodes.len(),
                nt
            )));
        }
        for b in 0..nodes.len() {
            if dirichlet[b * nt] != 0.0 || neumann[b * nt] != 0.0 {
                return Err(Error::InvalidInput(alloc::format!("traces at node {b} do not vanish at t = 0")));
            }
        }
        Ok(Self { dim, nodes, times, dirichlet, neumann, bc })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_t(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dirichlet(&self, node: usize) -> &[f64] {
        let nt = self.times.len();
        &self.dirichlet[node * nt..(node + 1) * nt]
    }

    pub fn neumann(&self, node: usize) -> &[f64] {
        let nt = self.times.len();
        &self.neumann[node * nt..(node + 1) * nt]
    }

    /// Mutable `(dirichlet, neumann)` trace arrays, node-major.
    pub fn traces_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.dirichlet, &mut self.neumann)
    }

    pub fn max_abs_dirichlet(&self) -> f64 {
        self.dirichlet.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.dirichlet.iter().chain(&self.neumann).all(|&v| v == 0.0)
    }
}

/// Interior values at `t = T`, plus optional intermediate snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub grid: Grid,
    pub final_values: Vec<f64>,
    /// `(t_k, values)` for every retained step.
    pub history: Vec<(f64, Vec<f64>)>,
}

impl FieldSnapshot {
    /// `∫_Ω u(x, T) g(x) dx` by the grid's trapezoid rule.
    pub fn integrate<G: FnMut(Point) -> f64>(&self, mut g: G) -> f64 {
        let [nx, ny] = self.grid.cells;
        let mut s = 0.0;
        for j in 0..=ny {
            for i in 0..=nx {
                s += self.grid.node_weight(i, j) * self.final_values[self.grid.node_index(i, j)] * g(self.grid.node(i, j));
            }
        }
        s
    }

    /// `(node, weight, u(node, T))` for every grid node.
    pub fn nodes(&self) -> impl Iterator<Item = (Point, f64, f64)> + '_ {
        let [nx, ny] = self.grid.cells;
        (0..=ny).flat_map(move |j| {
            (0..=nx).map(move |i| {
                (self.grid.node(i, j), self.grid.node_weight(i, j), self.final_values[self.grid.node_index(i, j)])
            })
        })
    }
}

/// Options for [`solve_forward_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub bc: BoundaryCondition,
    /// Keep every `history_stride`-th step in [`FieldSnapshot::history`]; 0 keeps none.
    pub history_stride: usize,
}

/// Crank–Nicolson (1D) / ADI (2D) solve returning lateral Cauchy data.
pub fn solve_forward(
    domain: &SpatialDomain,
    spec: &SourceSpec,
    grid: &Grid,
    bc: BoundaryCondition,
) -> Result<(BoundaryData, FieldSnapshot)> {
    solve_forward_with(domain, spec, grid, SolveOptions { bc, history_stride: 0 })
}

pub fn solve_forward_with(
    domain: &SpatialDomain,
    spec: &SourceSpec,
    grid: &Grid,
    opts: SolveOptions,
) -> Result<(BoundaryData, FieldSnapshot)> {
    crate::geometry::check_dim(domain.dim(), spec.dim())?;
    crate::geometry::check_dim(domain.dim(), grid.dim())?;
    if (grid.final_time() - spec.final_time()).abs() > 1e-12 {
        return Err(Error::InvalidGrid(alloc::format!(
            "grid final time {} differs from the source final time {}",
            grid.final_time(),
            spec.final_time()
        )));
    }
    grid.check_resolves(domain, spec)?;
    let integrals = SourceIntegrals::new(spec, grid);
    let zero = integrals.is_empty();
    run(domain, grid, opts, |t0, t1, out| {
        if !zero {
            integrals.accumulate(t0, t1, out)
        }
    })
}

fn run<F: FnMut(f64, f64, &mut [f64])>(
    domain: &SpatialDomain,
    grid: &Grid,
    opts: SolveOptions,
    mut forcing: F,
) -> Result<(BoundaryData, FieldSnapshot)> {
    let nodes = domain.boundary_nodes(grid.cells);
    let node_ids = boundary_grid_indices(grid);
    let nt1 = grid.n_t + 1;
    let mut dirichlet = alloc::vec![0.0; nodes.len() * nt1];
    let mut neumann = alloc::vec![0.0; nodes.len() * nt1];
    let mut stepper = stepper::Stepper::new(grid, opts.bc);
    let mut load = alloc::vec![0.0; grid.node_count()];
    let mut history = Vec::new();
    let times: Vec<f64> = (0..nt1).map(|k| k as f64 * grid.dt).collect();
    for k in 1..nt1 {
        load.iter_mut().for_each(|v| *v = 0.0);
        forcing(times[k - 1], times[k], &mut load);
        stepper.step(&load)?;
        let u = stepper.values();
        for (b, &(idx, inward, h)) in node_ids.iter().enumerate() {
            dirichlet[b * nt1 + k] = u[idx];
            neumann[b * nt1 + k] = match opts.bc {
                BoundaryCondition::Neumann0 => 0.0,
                BoundaryCondition::Dirichlet0 => {
                    (3.0 * u[idx] - 4.0 * u[(idx as isize + inward) as usize] + u[(idx as isize + 2 * inward) as usize])
                        / (2.0 * h)
                }
            };
        }
        if opts.history_stride > 0 && k % opts.history_stride == 0 {
            history.push((times[k], u.to_vec()));
        }
    }
    let final_values = stepper.values().to_vec();
    let data = BoundaryData::new(domain.dim(), nodes, times, dirichlet, neumann, opts.bc)?;
    Ok((data, FieldSnapshot { grid: grid.clone(), final_values, history }))
}

/// For each boundary node (in [`SpatialDomain::boundary_nodes`] order): grid
/// index, index step towards the interior along the normal, and the spacing.
fn boundary_grid_indices(grid: &Grid) -> Vec<(usize, isize, f64)> {
    let [nx, ny] = grid.cells;
    let [hx, hy] = grid.spacing;
    let row = (nx + 1) as isize;
    match grid.dim {
        Dim::One => alloc::vec![(0, 1, hx), (nx, -1, hx)],
        Dim::Two => {
            let mut out = Vec::with_capacity(2 * (nx + ny + 2));
            out.extend((0..=nx).map(|i| (grid.node_index(i, 0), row, hy)));
            out.extend((0..=ny).map(|j| (grid.node_index(nx, j), -1, hx)));
            out.extend((0..=nx).map(|i| (grid.node_index(i, ny), -row, hy)));
            out.extend((0..=ny).map(|j| (grid.node_index(0, j), 1, hx)));
            out
        }
    }
}

/// L∞ error against a manufactured solution `exact` with forcing `f`.
pub fn manufactured_error<U, F>(domain: &SpatialDomain, grid: &Grid, bc: BoundaryCondition, exact: U, f: F) -> Result<f64>
where
    U: Fn(Point, f64) -> f64,
    F: Fn(Point, f64) -> f64,
{
    let opts = SolveOptions { bc, history_stride: 0 };
    let (_, snap) = run(domain, grid, opts, |t0, t1, out| forcing::smooth_integrals(grid, &f, t0, t1, out))?;
    let t = grid.final_time;
    Ok(snap.nodes().map(|(x, _, u)| (u - exact(x, t)).abs()).fold(0.0, f64::max))
}

/// Manufactured check on `Ω = [0, 1]`, `T = 1`, `dirichlet0`, with
/// `u* = sin(πx)(1 − e^{−t})`. Returns the L∞ error at `t = T`.
pub fn manufactured_solution_check(cells: usize, n_t: usize) -> Result<f64> {
    use core::f64::consts::PI;
    let domain = SpatialDomain::interval(0.0, 1.0)?;
    let grid = Grid::new(&domain, [cells, 0], n_t, 1.0)?;
    manufactured_error(
        &domain,
        &grid,
        BoundaryCondition::Dirichlet0,
        |x, t| (PI * x[0]).sin() * (1.0 - (-t).exp()),
        |x, t| (PI * x[0]).sin() * ((-t).exp() + PI * PI * (1.0 - (-t).exp())),
    )
}
