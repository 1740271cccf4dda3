//! Uniform staggered grid and state storage.
//!
//! Primal cell `i` (0-based) is `[x_a + i dx, x_a + (i+1) dx]` and carries the
//! averages of `eta`, `zb` and `b`. Dual slot `k` (`0..=n`) is centred on the
//! interface `x_a + k dx` and carries the average of `q` over
//! `[x_a + (k - 1/2) dx, x_a + (k + 1/2) dx]`. Slots `0` and `n` are the
//! boundary dual cells.

use crate::error::{Result, SolverError};

/// Dry-cell threshold in metres. Every cell must keep `h > H_MIN`.
pub const H_MIN: f64 = 1e-8;

/// Smallest grid accepted: the widest stencil (two ghost layers on each side
/// of a four-point free-surface polynomial) needs at least this many cells.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_a: f64,
    pub x_b: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl GridSpec {
    /// Centre of primal cell `i`; accepts ghost indices.
    #[inline]
    pub fn center(&self, i: isize) -> f64 {
        self.x_a + (i as f64 + 0.5) * self.dx
    }

    /// Position of interface `k`, i.e. the centre of dual slot `k`.
    #[inline]
    pub fn interface(&self, k: isize) -> f64 {
        self.x_a + k as f64 * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells as isize).map(|i| self.center(i)).collect()
    }

    pub fn interfaces(&self) -> Vec<f64> {
        (0..=self.n_cells as isize).map(|k| self.interface(k)).collect()
    }

    pub fn length(&self) -> f64 {
        self.x_b - self.x_a
    }
}

/// Builds a uniform grid of `n_cells` primal cells on `[x_a, x_b]`.
pub fn build_grid(x_a: f64, x_b: f64, n_cells: usize) -> Result<GridSpec> {
    if !(x_a.is_finite() && x_b.is_finite()) || x_a >= x_b {
        return Err(SolverError::InvalidDomain(format!(
            "need finite x_a < x_b, got [{x_a}, {x_b}]"
        )));
    }
    if n_cells < MIN_CELLS {
        return Err(SolverError::InvalidDomain(format!(
            "need at least {MIN_CELLS} cells, got {n_cells}"
        )));
    }
    Ok(GridSpec {
        x_a,
        x_b,
        n_cells,
        dx: (x_b - x_a) / n_cells as f64,
    })
}

/// Primal averages (`eta`, `zb`, `b`) and dual averages (`q`) at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredState {
    pub eta: Vec<f64>,
    pub q: Vec<f64>,
    pub zb: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl StaggeredState {
    pub fn n_cells(&self) -> usize {
        self.eta.len()
    }

    /// Water thickness `h = eta - b - zb` in every primal cell.
    pub fn h(&self) -> Vec<f64> {
        self.eta
            .iter()
            .zip(&self.b)
            .zip(&self.zb)
            .map(|((e, b), z)| e - b - z)
            .collect()
    }

    /// Discharge interpolated to primal cells (average of the two adjacent
    /// dual slots).
    pub fn q_centers(&self) -> Vec<f64> {
        self.q.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn check_consistent(&self, grid: &GridSpec) -> Result<()> {
        let n = grid.n_cells;
        if self.eta.len() != n || self.zb.len() != n || self.b.len() != n || self.q.len() != n + 1
        {
            return Err(SolverError::InvalidDomain(format!(
                "state arrays ({}, {}, {}, {}) do not match a grid of {} cells",
                self.eta.len(),
                self.q.len(),
                self.zb.len(),
                self.b.len(),
                n
            )));
        }
        Ok(())
    }

    /// Fails on the first cell with `h <= H_MIN` or any non-finite value.
    pub fn check_wet(&self) -> Result<()> {
        for (i, h) in self.h().into_iter().enumerate() {
            if !h.is_finite() {
                return Err(SolverError::NonFinite { field: "h", index: i });
            }
            if h <= H_MIN {
                return Err(SolverError::DryCell {
                    index: i,
                    h,
                    threshold: H_MIN,
                });
            }
        }
        if let Some(k) = self.q.iter().position(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite { field: "q", index: k });
        }
        Ok(())
    }
}

const GAUSS3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Average of `f` over `[lo, hi]` by 3-point Gauss-Legendre (exact for
/// degree <= 5).
pub fn gauss3_average(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    0.5 * GAUSS3_NODES
        .iter()
        .zip(GAUSS3_WEIGHTS)
        .map(|(s, w)| w * f(mid + half * s))
        .sum::<f64>()
}

/// Average of `f` over `[lo, hi]`, splitting the interval at every
/// breakpoint that falls strictly inside it. Used for piecewise data.
pub fn piecewise_average(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    if cuts.is_empty() {
        return gauss3_average(f, lo, hi);
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut a = lo;
    for c in cuts.into_iter().chain(std::iter::once(hi)) {
        total += (c - a) * gauss3_average(f, a, c);
        a = c;
    }
    total / (hi - lo)
}

/// Initial data as point functions of `x`. `breaks` lists discontinuity
/// locations so that cell averages of piecewise data stay exact.
pub struct InitialData<'a> {
    pub eta: &'a dyn Fn(f64) -> f64,
    pub q: &'a dyn Fn(f64) -> f64,
    pub zb: &'a dyn Fn(f64) -> f64,
    pub b: &'a dyn Fn(f64) -> f64,
    pub breaks: &'a [f64],
}

/// Projects point data onto cell averages.
///
/// Boundary dual slots integrate `q` over the whole dual cell, which reaches
/// half a cell outside the domain; initial data are defined on the real line.
pub fn project_initial(grid: &GridSpec, data: &InitialData<'_>) -> Result<StaggeredState> {
    let dx = grid.dx;
    let avg = |f: &dyn Fn(f64) -> f64, lo: f64| piecewise_average(f, lo, lo + dx, data.breaks);

    let mut eta = Vec::with_capacity(grid.n_cells);
    let mut zb = Vec::with_capacity(grid.n_cells);
    let mut b = Vec::with_capacity(grid.n_cells);
    for i in 0..grid.n_cells as isize {
        let lo = grid.interface(i);
        eta.push(avg(data.eta, lo));
        zb.push(avg(data.zb, lo));
        b.push(avg(data.b, lo));
    }
    let q = (0..=grid.n_cells as isize)
        .map(|k| avg(data.q, grid.interface(k) - 0.5 * dx))
        .collect();

    let state = StaggeredState {
        eta,
        q,
        zb,
        b,
        t: 0.0,
    };
    state.check_wet()?;
    Ok(state)
}
