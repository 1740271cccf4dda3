//! Time-step selection.
//!
//! The semi-implicit scheme is limited by the material velocity and by a
//! (large) multiple of the celerity-based CFL; explicit schemes by the usual
//! CFL.

use crate::GRAVITY;
use crate::error::{Result, SolverError};
use crate::fluxes::{EigenMethod, GrassParams, eigenvalues};
use crate::grid::{GridSpec, StaggeredState};
use crate::timeint::Model;
use serde::{Deserialize, Serialize};

/// Empirical stability bound on the material CFL.
pub const MCFL_HARD_CAP: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CflMode {
    Explicit,
    #[default]
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CflPolicy {
    pub mcfl: f64,
    pub cfl_imex: f64,
    pub cfl_imex_cap: f64,
    pub cfl_explicit: f64,
    pub mode: CflMode,
    pub eigen: EigenMethod,
}

impl Default for CflPolicy {
    fn default() -> Self {
        Self {
            mcfl: 0.4,
            cfl_imex: 4.0,
            cfl_imex_cap: 40.0,
            cfl_explicit: 0.45,
            mode: CflMode::SemiImplicit,
            eigen: EigenMethod::DeVries,
        }
    }
}

impl CflPolicy {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.mcfl > 0.0 && self.mcfl <= MCFL_HARD_CAP) {
            return Err(format!("mcfl must lie in (0, {MCFL_HARD_CAP}], got {}", self.mcfl));
        }
        if !(self.cfl_imex > 0.0) || !(self.cfl_explicit > 0.0) {
            return Err("CFL numbers must be positive".into());
        }
        if self.cfl_imex > self.cfl_imex_cap {
            return Err(format!(
                "cfl_imex {} exceeds the cap {}",
                self.cfl_imex, self.cfl_imex_cap
            ));
        }
        Ok(())
    }
}

/// Chosen step and the speeds behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub u_max: f64,
    pub lambda_max: f64,
}

impl StepInfo {
    /// Celerity CFL `lambda_max dt / dx` for a (possibly clamped) step.
    pub fn cfl(&self, dt: f64, dx: f64) -> f64 {
        self.lambda_max * dt / dx
    }

    /// Material CFL `u_max dt / dx`.
    pub fn mcfl(&self, dt: f64, dx: f64) -> f64 {
        self.u_max * dt / dx
    }
}

/// Largest `|q/h|` over dual slots, with `h` averaged from the adjacent
/// primal cells.
pub fn max_dual_velocity(state: &StaggeredState) -> f64 {
    let h = state.h();
    let n = h.len();
    (0..=n)
        .map(|k| {
            let hk = match k {
                0 => h[0],
                k if k == n => h[n - 1],
                _ => 0.5 * (h[k - 1] + h[k]),
            };
            (state.q[k] / hk).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest spectral radius over primal cells.
pub fn max_wave_speed(
    state: &StaggeredState,
    model: Model,
    grass: &GrassParams,
    method: EigenMethod,
) -> Result<f64> {
    let h = state.h();
    let qc = state.q_centers();
    let mut lam = 0.0f64;
    for i in 0..h.len() {
        let u = qc[i] / h[i];
        let r = match model {
            Model::Swe => u.abs() + (GRAVITY * h[i]).sqrt(),
            Model::Sve => eigenvalues(h[i], u, grass, method)?.spectral_radius(),
        };
        lam = lam.max(r);
    }
    Ok(lam)
}

pub fn compute_dt(
    state: &StaggeredState,
    grid: &GridSpec,
    policy: &CflPolicy,
    model: Model,
    grass: &GrassParams,
) -> Result<StepInfo> {
    let u_max = max_dual_velocity(state);
    let lambda_max = max_wave_speed(state, model, grass, policy.eigen)?;
    if !(u_max.is_finite() && lambda_max.is_finite()) {
        return Err(SolverError::DegenerateStep("non-finite wave speed".into()));
    }
    if u_max == 0.0 && lambda_max == 0.0 {
        return Err(SolverError::DegenerateStep("all wave speeds vanish".into()));
    }
    let dt = dt_from_speeds(u_max, lambda_max, grid.dx, policy);
    Ok(StepInfo {
        dt,
        u_max,
        lambda_max,
    })
}

/// Step size for given maximal material velocity and spectral radius.
pub fn dt_from_speeds(u_max: f64, lambda_max: f64, dx: f64, policy: &CflPolicy) -> f64 {
    match policy.mode {
        CflMode::Explicit => policy.cfl_explicit * dx / lambda_max,
        CflMode::SemiImplicit => {
            let cfl = policy.cfl_imex.min(policy.cfl_imex_cap);
            let celerity = if lambda_max > 0.0 { cfl * dx / lambda_max } else { f64::INFINITY };
            let material = if u_max > 0.0 { policy.mcfl * dx / u_max } else { f64::INFINITY };
            celerity.min(material)
        }
    }
}

/// Shortens `dt` so that the run ends exactly at `t_end`.
pub fn clamp_to_end(dt: f64, t: f64, t_end: f64) -> f64 {
    let rest = t_end - t;
    // avoid a sliver step caused by round-off
    if dt >= rest || rest - dt <= 1e-12 * t_end.abs().max(1.0) {
        rest
    } else {
        dt
    }
}

/// One line of the step log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub cfl: f64,
    pub mcfl: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn state(n: usize, eta: f64, q: f64) -> StaggeredState {
        StaggeredState {
            eta: vec![eta; n],
            q: vec![q; n + 1],
            zb: vec![0.0; n],
            b: vec![0.0; n],
            t: 0.0,
        }
    }

    #[test]
    fn lake_at_rest_uses_celerity() {
        let g = build_grid(-4.0, 6.0, 200).unwrap();
        let p = CflPolicy { cfl_imex: 40.0, ..CflPolicy::default() };
        let s = state(200, 0.7, 0.0);
        let info = compute_dt(&s, &g, &p, Model::Swe, &GrassParams::disabled()).unwrap();
        let expect = 40.0 * g.dx / (GRAVITY * 0.7f64).sqrt();
        assert!((info.dt - expect).abs() < 1e-15);
    }

    #[test]
    fn material_limit() {
        // h = 1, u = 1: lambda = 1 + sqrt(g)
        let g = build_grid(0.0, 1.0, 10).unwrap();
        let s = state(10, 1.0, 1.0);
        let lam = 1.0 + GRAVITY.sqrt();
        let p = CflPolicy { cfl_imex: 4.0, mcfl: 0.4, ..CflPolicy::default() };
        let info = compute_dt(&s, &g, &p, Model::Swe, &GrassParams::disabled()).unwrap();
        let expect = (0.4 * 0.1f64).min(4.0 * 0.1 / lam);
        assert!((info.dt - expect).abs() < 1e-15);
        assert!((info.u_max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn combined_rule() {
        let p = CflPolicy { cfl_imex: 4.0, mcfl: 0.4, ..CflPolicy::default() };
        assert!((dt_from_speeds(1.0, 10.0, 0.1, &p) - 0.04).abs() < 1e-15);
        assert!((dt_from_speeds(0.0, 10.0, 0.1, &p) - 0.04).abs() < 1e-15);
        assert!(dt_from_speeds(2.0, 10.0, 0.1, &p) <= dt_from_speeds(1.0, 10.0, 0.1, &p));
    }

    #[test]
    fn clamp() {
        assert_eq!(clamp_to_end(0.3, 0.9, 1.0), 0.09999999999999998);
        assert_eq!(clamp_to_end(0.05, 0.5, 1.0), 0.05);
    }
}
