use alloc::vec::Vec;

use super::{BoundaryCondition, Grid};
use crate::geometry::Dim;
use crate::linalg::solve_tridiagonal;
use crate::Result;

/// Tridiagonal pieces of the 1D finite-volume Laplacian `K` along one axis
/// (no-flux form), with control-volume weights `w`.
struct Axis {
    n: usize,
    w: Vec<f64>,
    inv_h: f64,
}

impl Axis {
    fn new(grid: &Grid, axis: usize) -> Self {
        let n = grid.cells()[axis] + 1;
        Self { n, w: (0..n).map(|i| grid.axis_weight(axis, i)).collect(), inv_h: 1.0 / grid.spacing()[axis] }
    }

    /// `(K u)_i` for a strided line.
    fn apply(&self, u: &[f64], base: usize, stride: usize, i: usize) -> f64 {
        let c = u[base + i * stride];
        let mut s = 0.0;
        if i > 0 {
            s += u[base + (i - 1) * stride] - c;
        }
        if i + 1 < self.n {
            s += u[base + (i + 1) * stride] - c;
        }
        s * self.inv_h
    }

    /// Matrix `W − θΔt K` (1D) or `I − θΔt W⁻¹K` (ADI half step).
    fn implicit(&self, theta_dt: f64, weighted: bool, dirichlet: bool) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut lo = alloc::vec![0.0; n];
        let mut di = alloc::vec![0.0; n];
        let mut up = alloc::vec![0.0; n];
        for i in 0..n {
            let scale = if weighted { 1.0 } else { 1.0 / self.w[i] };
            let base = if weighted { self.w[i] } else { 1.0 };
            let mut nb = 0.0;
            if i > 0 {
                lo[i] = -theta_dt * self.inv_h * scale;
                nb += 1.0;
            }
            if i + 1 < n {
                up[i] = -theta_dt * self.inv_h * scale;
                nb += 1.0;
            }
            di[i] = base + theta_dt * nb * self.inv_h * scale;
        }
        if dirichlet {
            for i in [0, n - 1] {
                lo[i] = 0.0;
                up[i] = 0.0;
                di[i] = 1.0;
            }
        }
        (lo, di, up)
    }
}

pub(crate) struct Stepper {
    dim: Dim,
    dt: f64,
    dirichlet: bool,
    x: Axis,
    y: Option<Axis>,
    mx: (Vec<f64>, Vec<f64>, Vec<f64>),
    my: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    u: Vec<f64>,
    half: Vec<f64>,
    line: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub(crate) fn new(grid: &Grid, bc: BoundaryCondition) -> Self {
        let dirichlet = bc == BoundaryCondition::Dirichlet0;
        let dt = grid.dt();
        let x = Axis::new(grid, 0);
        let (y, mx, my) = match grid.dim() {
            Dim::One => {
                let mx = x.implicit(0.5 * dt, true, dirichlet);
                (None, mx, None)
            }
            Dim::Two => {
                let y = Axis::new(grid, 1);
                let mx = x.implicit(0.5 * dt, false, dirichlet);
                let my = y.implicit(0.5 * dt, false, dirichlet);
                (Some(y), mx, Some(my))
            }
        };
        let nodes = grid.node_count();
        let longest = grid.cells()[0].max(grid.cells()[1]) + 1;
        Self {
            dim: grid.dim(),
            dt,
            dirichlet,
            x,
            y,
            mx,
            my,
            u: alloc::vec![0.0; nodes],
            half: alloc::vec![0.0; nodes],
            line: alloc::vec![0.0; longest],
            scratch: alloc::vec![0.0; longest],
        }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.u
    }

    /// Advances one step; `load[i] = ∫_{t_n}^{t_{n+1}} ∫_{CV_i} f`.
    pub(crate) fn step(&mut self, load: &[f64]) -> Result<()> {
        match self.dim {
            Dim::One => self.step_1d(load),
            Dim::Two => self.step_2d(load),
        }
    }

    // (W − ½ΔtK) u⁺ = (W + ½ΔtK) u + F
    fn step_1d(&mut self, load: &[f64]) -> Result<()> {
        let n = self.x.n;
        for i in 0..n {
            self.line[i] = self.x.w[i] * self.u[i] + 0.5 * self.dt * self.x.apply(&self.u, 0, 1, i) + load[i];
        }
        if self.dirichlet {
            self.line[0] = 0.0;
            self.line[n - 1] = 0.0;
        }
        let (lo, di, up) = &self.mx;
        solve_tridiagonal(lo, di, up, &mut self.line[..n], &mut self.scratch[..n])?;
        self.u[..n].copy_from_slice(&self.line[..n]);
        Ok(())
    }

    // Peaceman–Rachford with A = W⁻¹K split by axis and the load split evenly:
    // (I − ½ΔtA_x) u* = (I + ½ΔtA_y) u + ½W⁻¹F
    // (I − ½ΔtA_y) u⁺ = (I + ½ΔtA_x) u* + ½W⁻¹F
    fn step_2d(&mut self, load: &[f64]) -> Result<()> {
        let y = self.y.as_ref().expect("2D stepper has a y axis");
        let (nx, ny) = (self.x.n, y.n);
        let hdt = 0.5 * self.dt;
        for j in 0..ny {
            let base = j * nx;
            for i in 0..nx {
                let k = base + i;
                let w = self.x.w[i] * y.w[j];
                self.line[i] = self.u[k] + hdt * y.apply(&self.u, i, nx, j) / y.w[j] + 0.5 * load[k] / w;
            }
            if self.dirichlet {
                if j == 0 || j == ny - 1 {
                    self.line[..nx].iter_mut().for_each(|v| *v = 0.0);
                }
                self.line[0] = 0.0;
                self.line[nx - 1] = 0.0;
            }
            let (lo, di, up) = &self.mx;
            solve_tridiagonal(lo, di, up, &mut self.line[..nx], &mut self.scratch[..nx])?;
            self.half[base..base + nx].copy_from_slice(&self.line[..nx]);
        }
        for i in 0..nx {
            for j in 0..ny {
                let k = j * nx + i;
                let w = self.x.w[i] * y.w[j];
                self.line[j] = self.half[k] + hdt * self.x.apply(&self.half, j * nx, 1, i) / self.x.w[i] + 0.5 * load[k] / w;
            }
            if self.dirichlet {
                if i == 0 || i == nx - 1 {
                    self.line[..ny].iter_mut().for_each(|v| *v = 0.0);
                }
                self.line[0] = 0.0;
                self.line[ny - 1] = 0.0;
            }
            let (lo, di, up) = self.my.as_ref().expect("2D stepper has a y matrix");
            solve_tridiagonal(lo, di, up, &mut self.line[..ny], &mut self.scratch[..ny])?;
            for j in 0..ny {
                self.u[j * nx + i] = self.line[j];
            }
        }
        Ok(())
    }
}
