//! One-step advancement of the staggered state.
//!
//! The semi-discrete right-hand side is split as `H(U_E, U_I)`: advection,
//! bedload fluxes and the `h` inside the pressure term are taken from the
//! explicit argument, the discharge divergence and the free-surface
//! gradient from the implicit one. Each implicit stage reduces to one
//! pentadiagonal solve for the free surface.

mod baseline;
mod operators;

pub use baseline::{CollocatedState, explicit1_max_speed, explicit1_step};
pub use operators::{StageOps, explicit_qstar, momentum_divergence};

use crate::GRAVITY;
use crate::boundary::{BoundaryPolicy, NG, elliptic_closure, fill_ghosts, impose_slots};
use crate::error::{Result, SolverError};
use crate::fluxes::{EigenMethod, GrassParams};
use crate::grid::{GridSpec, StaggeredState};
use crate::pressure::{assemble_elliptic, pressure_term, recover_q, solve_penta};
use crate::reconstruct::CwenoParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Swe,
    Sve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SchemeVariant {
    #[default]
    Simplified,
    /// Adds the third difference of `q` to the mass update.
    FullyThirdOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    /// First-order semi-implicit Euler.
    Euler1,
    #[default]
    ImexSsp3,
    /// Same spatial operators, fully explicit SSP-RK3.
    Explicit3,
    /// First-order collocated Rusanov scheme with forward Euler.
    Explicit1,
}

impl TimeScheme {
    pub fn is_explicit(&self) -> bool {
        matches!(self, TimeScheme::Explicit3 | TimeScheme::Explicit1)
    }
}

/// Double Butcher tableau of a partitioned IMEX Runge–Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ImexTableau {
    pub a_e: Vec<Vec<f64>>,
    pub a_i: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c_e: Vec<f64>,
    pub c_i: Vec<f64>,
}

pub const SSP3_A: f64 = 0.24169426078821;
pub const SSP3_B: f64 = 0.06042356519705;
pub const SSP3_C: f64 = 0.12915286960590;

/// IMEX SSP3(4,3,3).
pub fn tableau_ssp3() -> ImexTableau {
    let (a, b, c) = (SSP3_A, SSP3_B, SSP3_C);
    let d = 0.5 - a - b - c;
    ImexTableau {
        a_e: vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.25, 0.25, 0.0],
        ],
        a_i: vec![
            vec![a, 0.0, 0.0, 0.0],
            vec![-a, a, 0.0, 0.0],
            vec![0.0, 1.0 - a, a, 0.0],
            vec![b, c, d, a],
        ],
        b: vec![0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        c_e: vec![0.0, 0.0, 1.0, 0.5],
        c_i: vec![a, 0.0, 1.0, 0.5],
    }
}

/// Semi-implicit Euler as a one-stage tableau.
pub fn tableau_euler() -> ImexTableau {
    ImexTableau {
        a_e: vec![vec![0.0]],
        a_i: vec![vec![1.0]],
        b: vec![1.0],
        c_e: vec![0.0],
        c_i: vec![1.0],
    }
}

impl ImexTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let s = self.stages();
        let square = |m: &Vec<Vec<f64>>| m.len() == s && m.iter().all(|r| r.len() == s);
        if !square(&self.a_e) || !square(&self.a_i) || self.c_e.len() != s || self.c_i.len() != s {
            return Err("tableau dimensions do not match".into());
        }
        let tol = 1e-13;
        if (self.b.iter().sum::<f64>() - 1.0).abs() > tol {
            return Err("weights do not sum to one".into());
        }
        for l in 0..s {
            if (l..s).any(|k| self.a_e[l][k] != 0.0) {
                return Err(format!("explicit row {l} is not strictly lower triangular"));
            }
            if (l + 1..s).any(|k| self.a_i[l][k] != 0.0) {
                return Err(format!("implicit row {l} is not lower triangular"));
            }
            if (self.a_e[l].iter().sum::<f64>() - self.c_e[l]).abs() > tol {
                return Err(format!("explicit row {l} does not sum to c_E"));
            }
            if (self.a_i[l].iter().sum::<f64>() - self.c_i[l]).abs() > tol {
                return Err(format!("implicit row {l} does not sum to c_I"));
            }
        }
        Ok(())
    }
}

/// Everything a step needs besides the state and `dt`.
#[derive(Debug, Clone)]
pub struct StepConfig<'a> {
    pub grid: &'a GridSpec,
    pub bc: &'a BoundaryPolicy,
    pub model: Model,
    pub grass: GrassParams,
    pub variant: SchemeVariant,
    pub cweno: CwenoParams,
    /// Eigenvalue estimate used by the collocated baseline.
    pub eigen: EigenMethod,
}

impl<'a> StepConfig<'a> {
    pub fn new(grid: &'a GridSpec, bc: &'a BoundaryPolicy, model: Model) -> Self {
        Self {
            grid,
            bc,
            model,
            grass: GrassParams::disabled(),
            variant: SchemeVariant::default(),
            cweno: CwenoParams::default(),
            eigen: EigenMethod::default(),
        }
    }

    fn sediment(&self) -> bool {
        self.model == Model::Sve && self.grass.is_active()
    }
}

/// Stage derivative of `(eta, q, zb)`.
#[derive(Debug, Clone)]
struct Deriv {
    eta: Vec<f64>,
    q: Vec<f64>,
    zb: Vec<f64>,
}

fn combine(base: &StaggeredState, dt: f64, coefs: &[f64], ders: &[Deriv]) -> StaggeredState {
    let mut s = base.clone();
    for (c, d) in coefs.iter().zip(ders) {
        if *c == 0.0 {
            continue;
        }
        let f = dt * c;
        s.eta.iter_mut().zip(&d.eta).for_each(|(a, v)| *a += f * v);
        s.q.iter_mut().zip(&d.q).for_each(|(a, v)| *a += f * v);
        s.zb.iter_mut().zip(&d.zb).for_each(|(a, v)| *a += f * v);
    }
    s
}

fn check_finite(s: &StaggeredState) -> Result<()> {
    for (field, v) in [("eta", &s.eta), ("q", &s.q), ("zb", &s.zb)] {
        if let Some(index) = v.iter().position(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite { field, index });
        }
    }
    Ok(())
}

/// Implicit stage: solves `U_I = base + theta H(U_E, U_I)` and returns `H`.
fn implicit_stage(
    base: &StaggeredState,
    ops: &StageOps,
    theta: f64,
    t_stage: f64,
    cfg: &StepConfig<'_>,
) -> Result<Deriv> {
    let n = base.n_cells();
    let dx = cfg.grid.dx;
    let bc = elliptic_closure(cfg.bc, cfg.grid, base, t_stage)?;
    let q_star = explicit_qstar(&base.q, &ops.dq, theta);
    let e: Vec<f64> = (0..n).map(|i| base.eta[i] + theta * ops.ex_eta[i]).collect();
    let system = assemble_elliptic(&ops.stencils, &e, &q_star, theta, dx, GRAVITY, &bc)?;
    let eta = solve_penta(&system)?;
    let mut q = recover_q(&ops.stencils, &eta, &q_star, theta, GRAVITY, &bc);
    if bc.periodic {
        q[n] = q[0];
    }
    Ok(Deriv {
        eta: (0..n).map(|i| (eta[i] - base.eta[i]) / theta).collect(),
        q: (0..=n).map(|k| (q[k] - base.q[k]) / theta).collect(),
        zb: ops.ex_zb.clone(),
    })
}

/// Fully explicit `H(U_E, U_I)` with the implicit argument already known.
fn explicit_deriv(ops: &StageOps, implicit: &StaggeredState, t: f64, cfg: &StepConfig<'_>) -> Result<Deriv> {
    let n = implicit.n_cells();
    let dx = cfg.grid.dx;
    let ext = fill_ghosts(implicit, cfg.grid, cfg.bc, t)?;
    let q = &implicit.q;
    let eta = (0..n).map(|i| -(q[i + 1] - q[i]) / dx + ops.ex_eta[i]).collect();
    let dq = (0..=n)
        .map(|k| -ops.dq[k] - GRAVITY * pressure_term(&ops.stencils[k], &ext.eta[k + NG - 2..k + NG + 2]))
        .collect();
    Ok(Deriv {
        eta,
        q: dq,
        zb: ops.ex_zb.clone(),
    })
}

fn finish(mut s: StaggeredState, t_new: f64, cfg: &StepConfig<'_>) -> Result<StaggeredState> {
    s.t = t_new;
    if cfg.bc.is_periodic() {
        let n = s.n_cells();
        s.q[n] = s.q[0];
    }
    impose_slots(&mut s, cfg.grid, cfg.bc, t_new)?;
    check_finite(&s)?;
    s.check_wet()?;
    Ok(s)
}

/// One step of a partitioned IMEX Runge–Kutta method.
pub fn imex_step(
    state: &StaggeredState,
    dt: f64,
    tableau: &ImexTableau,
    cfg: &StepConfig<'_>,
) -> Result<StaggeredState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::DegenerateStep(format!("invalid dt = {dt}")));
    }
    let t = state.t;
    let s = tableau.stages();
    let mut ders: Vec<Deriv> = Vec::with_capacity(s);
    for l in 0..s {
        let u_e = combine(state, dt, &tableau.a_e[l][..l], &ders);
        let base = combine(state, dt, &tableau.a_i[l][..l], &ders);
        let t_e = t + tableau.c_e[l] * dt;
        let t_i = t + tableau.c_i[l] * dt;
        u_e.check_wet()?;
        let ops = StageOps::new(&u_e, t_e, cfg)?;
        let theta = tableau.a_i[l][l] * dt;
        let d = if theta > 0.0 {
            implicit_stage(&base, &ops, theta, t_i, cfg)?
        } else {
            explicit_deriv(&ops, &base, t_i, cfg)?
        };
        ders.push(d);
    }
    let new = combine(state, dt, &tableau.b, &ders);
    finish(new, t + dt, cfg)
}

/// First-order semi-implicit step for the shallow-water model.
pub fn euler_step_swe(state: &StaggeredState, dt: f64, cfg: &StepConfig<'_>) -> Result<StaggeredState> {
    let cfg = StepConfig {
        model: Model::Swe,
        ..cfg.clone()
    };
    imex_step(state, dt, &tableau_euler(), &cfg)
}

/// First-order semi-implicit step for the coupled model with bedload `p`.
pub fn euler_step_sve(
    state: &StaggeredState,
    dt: f64,
    p: &GrassParams,
    cfg: &StepConfig<'_>,
) -> Result<StaggeredState> {
    let cfg = StepConfig {
        model: Model::Sve,
        grass: *p,
        ..cfg.clone()
    };
    imex_step(state, dt, &tableau_euler(), &cfg)
}

/// Three-stage SSP Runge–Kutta step of the fully explicit operator.
pub fn explicit3_step(state: &StaggeredState, dt: f64, cfg: &StepConfig<'_>) -> Result<StaggeredState> {
    let t = state.t;
    let rhs = |u: &StaggeredState, tu: f64| -> Result<Deriv> {
        u.check_wet()?;
        let ops = StageOps::new(u, tu, cfg)?;
        explicit_deriv(&ops, u, tu, cfg)
    };
    let d1 = rhs(state, t)?;
    let mut u1 = combine(state, dt, &[1.0], std::slice::from_ref(&d1));
    impose_slots(&mut u1, cfg.grid, cfg.bc, t + dt)?;
    let d2 = rhs(&u1, t + dt)?;
    let mut u2 = combine(state, dt, &[0.25, 0.25], &[d1.clone(), d2.clone()]);
    impose_slots(&mut u2, cfg.grid, cfg.bc, t + 0.5 * dt)?;
    let d3 = rhs(&u2, t + 0.5 * dt)?;
    let new = combine(state, dt, &[1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], &[d1, d2, d3]);
    finish(new, t + dt, cfg)
}

/// Advances the staggered state by `dt` with the chosen scheme.
pub fn step(
    state: &StaggeredState,
    dt: f64,
    scheme: TimeScheme,
    cfg: &StepConfig<'_>,
) -> Result<StaggeredState> {
    match scheme {
        TimeScheme::Euler1 => imex_step(state, dt, &tableau_euler(), cfg),
        TimeScheme::ImexSsp3 => imex_step(state, dt, &tableau_ssp3(), cfg),
        TimeScheme::Explicit3 => explicit3_step(state, dt, cfg),
        // the collocated baseline keeps its own state between steps
        TimeScheme::Explicit1 => Err(SolverError::Assembly(
            "the collocated baseline is advanced with explicit1_step".into(),
        )),
    }
}
