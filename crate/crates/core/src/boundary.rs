//! Ghost-cell policies and the absorbing sponge layer.
//!
//! Every kernel works on ghost-extended copies of the state with [`NG`]
//! primal ghost cells and [`NG`] dual ghost slots on each side. Extended
//! primal index `i + NG` holds cell `i`; extended dual index `k + NG` holds
//! slot `k`.

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::fluxes::GrassParams;
use crate::grid::{GridSpec, StaggeredState, gauss3_average};
use crate::pressure::{EllipticBoundary, EtaGhost, SlotClosure};
use crate::reference::OdeTrajectory;
use serde::{Deserialize, Serialize};

/// Ghost layers per side.
pub const NG: usize = 4;

/// Oscillating inflow: `u = u0 + A sin(x_a - omega t)` and
/// `h = Q/u - xi A_g u^(m-1)` with `Q` the total discharge at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflowWave {
    pub amplitude: f64,
    pub omega: f64,
    pub u0: f64,
    pub q_total: f64,
    pub grass: GrassParams,
}

impl InflowWave {
    /// `(h, u)` imposed at position `x_a` and time `t`.
    pub fn state(&self, x_a: f64, t: f64) -> Result<(f64, f64)> {
        let u = self.u0 + self.amplitude * (x_a - self.omega * t).sin();
        if !(u > 0.0) {
            return Err(SolverError::InflowZeroVelocity { t });
        }
        let h = self.q_total / u - self.grass.strength() * u.powf(self.grass.m_g - 1.0);
        Ok((h, u))
    }
}

#[derive(Debug, Clone)]
pub enum SideBc {
    /// Zeroth-order extrapolation of every field.
    FreeOutflow,
    Periodic,
    /// Strongly imposed inflow (left side only).
    InflowWave(InflowWave),
    /// Ghost and boundary-slot values from the separable exact solution.
    OdeExact(Arc<OdeTrajectory>),
}

impl SideBc {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, SideBc::InflowWave(_) | SideBc::OdeExact(_))
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryPolicy {
    pub left: SideBc,
    pub right: SideBc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl BoundaryPolicy {
    pub fn outflow() -> Self {
        Self {
            left: SideBc::FreeOutflow,
            right: SideBc::FreeOutflow,
        }
    }

    pub fn periodic() -> Self {
        Self {
            left: SideBc::Periodic,
            right: SideBc::Periodic,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.left, SideBc::Periodic)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let l = matches!(self.left, SideBc::Periodic);
        let r = matches!(self.right, SideBc::Periodic);
        if l != r {
            return Err("periodic boundaries must be set on both sides".into());
        }
        if matches!(self.right, SideBc::InflowWave(_)) {
            return Err("inflow waves are only supported on the left boundary".into());
        }
        Ok(())
    }

    fn side(&self, s: Side) -> &SideBc {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Known boundary data of a Dirichlet side, innermost ghost first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletData {
    pub eta: [f64; NG],
    pub zb: [f64; NG],
    pub b: [f64; NG],
    pub q_ghost: [f64; NG],
    pub q_slot: f64,
}

/// Boundary data of side `s` at time `t`, or `None` for non-Dirichlet sides.
pub fn dirichlet_data(
    policy: &BoundaryPolicy,
    s: Side,
    grid: &GridSpec,
    state: &StaggeredState,
    t: f64,
) -> Result<Option<DirichletData>> {
    let n = grid.n_cells;
    let edge = match s {
        Side::Left => 0,
        Side::Right => n - 1,
    };
    let ghost_center = |j: usize| match s {
        Side::Left => grid.center(-(j as isize) - 1),
        Side::Right => grid.center((n + j) as isize),
    };
    let slot_x = |j: usize| match s {
        Side::Left => grid.interface(-(j as isize)),
        Side::Right => grid.interface((n + j) as isize),
    };
    match policy.side(s) {
        SideBc::InflowWave(w) => {
            let (h, u) = w.state(grid.x_a, t)?;
            if !(h > crate::grid::H_MIN) {
                return Err(SolverError::DryCell {
                    index: 0,
                    h,
                    threshold: crate::grid::H_MIN,
                });
            }
            let (zb, b) = (state.zb[edge], state.b[edge]);
            Ok(Some(DirichletData {
                eta: [h + b + zb; NG],
                zb: [zb; NG],
                b: [b; NG],
                q_ghost: [h * u; NG],
                q_slot: h * u,
            }))
        }
        SideBc::OdeExact(tr) => {
            let w = tr.at(t)?;
            let p = &tr.params;
            let b = state.b[edge];
            let dx = grid.dx;
            let mut d = DirichletData {
                eta: [0.0; NG],
                zb: [0.0; NG],
                b: [b; NG],
                q_ghost: [0.0; NG],
                q_slot: p.field(slot_x(0), w).1,
            };
            for j in 0..NG {
                let xc = ghost_center(j);
                let zb = gauss3_average(&|x| p.field(x, w).2, xc - 0.5 * dx, xc + 0.5 * dx);
                d.zb[j] = zb;
                d.eta[j] = w[0] + b + zb;
                // q is linear in x, so the dual-cell average is the centre value
                d.q_ghost[j] = p.field(slot_x(j + 1), w).1;
            }
            Ok(Some(d))
        }
        _ => Ok(None),
    }
}

/// Ghost-extended copy of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Extended {
    pub eta: Vec<f64>,
    pub zb: Vec<f64>,
    pub b: Vec<f64>,
    pub h: Vec<f64>,
    pub q: Vec<f64>,
}

impl Extended {
    pub fn n_cells(&self) -> usize {
        self.eta.len() - 2 * NG
    }
}

/// Extends `state` by [`NG`] ghost layers on each side at time `t`.
pub fn fill_ghosts(
    state: &StaggeredState,
    grid: &GridSpec,
    policy: &BoundaryPolicy,
    t: f64,
) -> Result<Extended> {
    let n = state.n_cells();
    let mut ext = Extended {
        eta: vec![0.0; n + 2 * NG],
        zb: vec![0.0; n + 2 * NG],
        b: vec![0.0; n + 2 * NG],
        h: vec![0.0; n + 2 * NG],
        q: vec![0.0; n + 1 + 2 * NG],
    };
    ext.eta[NG..NG + n].copy_from_slice(&state.eta);
    ext.zb[NG..NG + n].copy_from_slice(&state.zb);
    ext.b[NG..NG + n].copy_from_slice(&state.b);
    ext.q[NG..NG + n + 1].copy_from_slice(&state.q);

    for s in [Side::Left, Side::Right] {
        // primal ghost j (innermost 0) and dual ghost j
        let cell = |j: usize| match s {
            Side::Left => NG - 1 - j,
            Side::Right => NG + n + j,
        };
        let slot = |j: usize| match s {
            Side::Left => NG - 1 - j,
            Side::Right => NG + n + 1 + j,
        };
        match policy.side(s) {
            SideBc::Periodic => {
                for j in 0..NG {
                    let src = match s {
                        Side::Left => n - 1 - j,
                        Side::Right => j,
                    };
                    ext.eta[cell(j)] = state.eta[src];
                    ext.zb[cell(j)] = state.zb[src];
                    ext.b[cell(j)] = state.b[src];
                    let qsrc = match s {
                        Side::Left => n - 1 - j,
                        Side::Right => j + 1,
                    };
                    ext.q[slot(j)] = state.q[qsrc];
                }
            }
            SideBc::FreeOutflow => {
                let (src, qsrc) = match s {
                    Side::Left => (0, 0),
                    Side::Right => (n - 1, n),
                };
                for j in 0..NG {
                    ext.eta[cell(j)] = state.eta[src];
                    ext.zb[cell(j)] = state.zb[src];
                    ext.b[cell(j)] = state.b[src];
                    ext.q[slot(j)] = state.q[qsrc];
                }
            }
            SideBc::InflowWave(_) | SideBc::OdeExact(_) => {
                let d = dirichlet_data(policy, s, grid, state, t)?.expect("dirichlet side");
                for j in 0..NG {
                    ext.eta[cell(j)] = d.eta[j];
                    ext.zb[cell(j)] = d.zb[j];
                    ext.b[cell(j)] = d.b[j];
                    ext.q[slot(j)] = d.q_ghost[j];
                }
            }
        }
    }
    for i in 0..ext.h.len() {
        ext.h[i] = ext.eta[i] - ext.b[i] - ext.zb[i];
    }
    Ok(ext)
}

/// Closure of the implicit free-surface system at time `t`.
pub fn elliptic_closure(
    policy: &BoundaryPolicy,
    grid: &GridSpec,
    state: &StaggeredState,
    t: f64,
) -> Result<EllipticBoundary> {
    if policy.is_periodic() {
        return Ok(EllipticBoundary::periodic());
    }
    let mut bc = EllipticBoundary::outflow();
    for s in [Side::Left, Side::Right] {
        if let Some(d) = dirichlet_data(policy, s, grid, state, t)? {
            let eta = EtaGhost::Prescribed([d.eta[0], d.eta[1]]);
            let slot = SlotClosure::Fixed(d.q_slot);
            match s {
                Side::Left => {
                    bc.left_eta = eta;
                    bc.left_slot = slot;
                }
                Side::Right => {
                    bc.right_eta = eta;
                    bc.right_slot = slot;
                }
            }
        }
    }
    Ok(bc)
}

/// Overwrites Dirichlet boundary slots with their values at time `t` and
/// keeps the periodic duplicate slot in sync.
pub fn impose_slots(
    state: &mut StaggeredState,
    grid: &GridSpec,
    policy: &BoundaryPolicy,
    t: f64,
) -> Result<()> {
    let n = state.n_cells();
    if policy.is_periodic() {
        state.q[n] = state.q[0];
        return Ok(());
    }
    if let Some(d) = dirichlet_data(policy, Side::Left, grid, state, t)? {
        state.q[0] = d.q_slot;
    }
    if let Some(d) = dirichlet_data(policy, Side::Right, grid, state, t)? {
        state.q[n] = d.q_slot;
    }
    Ok(())
}

/// Target state of a sponge layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqState {
    pub eta: f64,
    pub q: f64,
    #[serde(default)]
    pub zb: f64,
}

/// Relaxation zone from `x_start` (weight 1) to `x_end` (weight 0). Either
/// orientation is accepted, so the layer may sit at either end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpongeSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub eq: EqState,
}

impl SpongeSpec {
    pub fn validate(&self, grid: &GridSpec) -> std::result::Result<(), String> {
        if self.x_start == self.x_end || !self.x_start.is_finite() || !self.x_end.is_finite() {
            return Err(format!("degenerate sponge [{}, {}]", self.x_start, self.x_end));
        }
        let (lo, hi) = (self.x_start.min(self.x_end), self.x_start.max(self.x_end));
        if lo < grid.x_a - 1e-9 || hi > grid.x_b + 1e-9 {
            return Err(format!(
                "sponge [{lo}, {hi}] leaves the domain [{}, {}]",
                grid.x_a, grid.x_b
            ));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        (self.x_end - self.x_start).abs()
    }
}

/// `Gamma = -2 (1 - phi)^3 + 3 (1 - phi)^2` with `phi` the clamped ramp from
/// `x_start` to `x_end`.
pub fn sponge_weight(x: f64, spec: &SpongeSpec) -> f64 {
    let phi = ((x - spec.x_start) / (spec.x_end - spec.x_start)).clamp(0.0, 1.0);
    let r = 1.0 - phi;
    -2.0 * r * r * r + 3.0 * r * r
}

/// Blends the state toward the sponge target: `U Gamma + U_eq (1 - Gamma)`.
pub fn apply_sponge(state: &mut StaggeredState, grid: &GridSpec, spec: &SpongeSpec) {
    let eq = spec.eq;
    for i in 0..state.n_cells() {
        let w = sponge_weight(grid.center(i as isize), spec);
        if w < 1.0 {
            state.eta[i] = state.eta[i] * w + eq.eta * (1.0 - w);
            state.zb[i] = state.zb[i] * w + eq.zb * (1.0 - w);
        }
    }
    for k in 0..state.q.len() {
        let w = sponge_weight(grid.interface(k as isize), spec);
        if w < 1.0 {
            state.q[k] = state.q[k] * w + eq.q * (1.0 - w);
        }
    }
}
