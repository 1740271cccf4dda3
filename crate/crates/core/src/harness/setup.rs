//! Turns a configuration into a grid, an initial state and boundary policies.

use std::sync::Arc;

use super::HarnessError;
use super::config::{IcSpec, Profile, RunConfig, SideSpec};
use crate::GRAVITY;
use crate::boundary::{BoundaryPolicy, InflowWave, SideBc};
use crate::fluxes::GrassParams;
use crate::grid::{GridSpec, InitialData, StaggeredState, build_grid, gauss3_average, project_initial};
use crate::reference::{OdeTrajectory, QuasiStatParams, riemann_left_state, type2_build};

/// Pointwise initial fields.
pub struct PointData {
    pub eta: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub q: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub zb: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub b: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breaks: Vec<f64>,
}

impl PointData {
    pub fn h(&self, x: f64) -> f64 {
        (self.eta)(x) - (self.b)(x) - (self.zb)(x)
    }
}

/// Everything derived from a configuration before time stepping.
pub struct Case {
    pub grid: GridSpec,
    pub state0: StaggeredState,
    pub policy: BoundaryPolicy,
    pub points: PointData,
    pub quasi: Option<QuasiStatParams>,
    pub trajectory: Option<Arc<OdeTrajectory>>,
}

fn profile_fn(p: Profile) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
    Box::new(move |x| p.eval(x))
}

fn quasi_params(
    grid: &GridSpec,
    grass: &GrassParams,
    h_left: f64,
    zb_left: f64,
    u: Profile,
    b: f64,
) -> Result<QuasiStatParams, HarnessError> {
    let u_a = u.eval(grid.x_a);
    let q_total = h_left * u_a + grass.qb_of_u(u_a);
    // sample densely to bracket the velocity range
    let m = 20 * grid.n_cells;
    let (lo, hi) = (0..=m)
        .map(|k| u.eval(grid.x_a + grid.length() * k as f64 / m as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = 0.25 * (hi - lo).max(1e-3 * hi.abs());
    let qs = type2_build((lo - pad, hi + pad), grass, q_total, 0.0, b)?;
    Ok(qs.anchor(u_a, zb_left)?)
}

fn point_data(cfg: &RunConfig, grid: &GridSpec) -> Result<(PointData, Option<QuasiStatParams>), HarnessError> {
    Ok(match cfg.ic {
        IcSpec::Fields { eta, h, q, u, zb, b } => {
            let eta_fn: Box<dyn Fn(f64) -> f64 + Send + Sync> = match (eta, h) {
                (Some(e), _) => profile_fn(e),
                (None, Some(h)) => Box::new(move |x| h.eval(x) + b.eval(x) + zb.eval(x)),
                (None, None) => unreachable!("validated"),
            };
            let h_of = move |x: f64| match (eta, h) {
                (Some(e), _) => e.eval(x) - b.eval(x) - zb.eval(x),
                (None, Some(h)) => h.eval(x),
                (None, None) => f64::NAN,
            };
            let q_fn: Box<dyn Fn(f64) -> f64 + Send + Sync> = match (q, u) {
                (Some(q), _) => profile_fn(q),
                (None, Some(u)) => Box::new(move |x| h_of(x) * u.eval(x)),
                (None, None) => profile_fn(Profile::zero()),
            };
            (
                PointData {
                    eta: eta_fn,
                    q: q_fn,
                    zb: profile_fn(zb),
                    b: profile_fn(b),
                    breaks: vec![],
                },
                None,
            )
        }
        IcSpec::Riemann {
            h_right,
            q_right,
            speed_offset,
            x0,
        } => {
            let v = q_right / h_right + (GRAVITY * h_right).sqrt() + speed_offset;
            let (h_l, q_l) = riemann_left_state(h_right, q_right, v, GRAVITY)?;
            (
                PointData {
                    eta: Box::new(move |x| if x < x0 { h_l } else { h_right }),
                    q: Box::new(move |x| if x < x0 { q_l } else { q_right }),
                    zb: profile_fn(Profile::zero()),
                    b: profile_fn(Profile::zero()),
                    breaks: vec![x0],
                },
                None,
            )
        }
        IcSpec::QuasiStationary {
            h_left,
            zb_left,
            u,
            b,
        } => {
            let qs = quasi_params(grid, &cfg.grass, h_left, zb_left, u, b)?;
            let (a, c, d) = (qs.clone(), qs.clone(), qs.clone());
            (
                PointData {
                    eta: Box::new(move |x| {
                        let v = u.eval(x);
                        a.h_of_u(v) + b + a.zb_of_u(v).unwrap_or(f64::NAN)
                    }),
                    q: Box::new(move |x| {
                        let v = u.eval(x);
                        c.h_of_u(v) * v
                    }),
                    zb: Box::new(move |x| d.zb_of_u(u.eval(x)).unwrap_or(f64::NAN)),
                    b: profile_fn(Profile::Constant { value: b }),
                    breaks: vec![],
                },
                Some(qs),
            )
        }
        IcSpec::OdeType { params, b } => {
            let w = [params.h0, 1.0, 1.0];
            (
                PointData {
                    eta: Box::new(move |x| {
                        let (h, _, zb) = params.field(x, w);
                        h + b + zb
                    }),
                    q: Box::new(move |x| params.field(x, w).1),
                    zb: Box::new(move |x| params.field(x, w).2),
                    b: profile_fn(Profile::Constant { value: b }),
                    breaks: vec![],
                },
                None,
            )
        }
    })
}

fn side_bc(
    spec: SideSpec,
    points: &PointData,
    grid: &GridSpec,
    grass: &GrassParams,
    trajectory: &Option<Arc<OdeTrajectory>>,
) -> Result<SideBc, HarnessError> {
    Ok(match spec {
        SideSpec::FreeOutflow => SideBc::FreeOutflow,
        SideSpec::Periodic => SideBc::Periodic,
        SideSpec::InflowWave { amplitude, omega } => {
            let x = grid.x_a;
            let h = points.h(x);
            let q = (points.q)(x);
            let u0 = q / h;
            SideBc::InflowWave(InflowWave {
                amplitude,
                omega,
                u0,
                q_total: q + grass.qb_of_u(u0),
                grass: *grass,
            })
        }
        SideSpec::OdeExact => SideBc::OdeExact(
            trajectory
                .clone()
                .ok_or_else(|| HarnessError::Config("ode_exact boundary without ode_type data".into()))?,
        ),
    })
}

/// Builds grid, projected initial state and boundary policy.
pub fn build_case(cfg: &RunConfig) -> Result<Case, HarnessError> {
    let grid = build_grid(cfg.domain[0], cfg.domain[1], cfg.n_cells)?;
    let (points, quasi) = point_data(cfg, &grid)?;
    let data = InitialData {
        eta: &*points.eta,
        q: &*points.q,
        zb: &*points.zb,
        b: &*points.b,
        breaks: &points.breaks,
    };
    let state0 = project_initial(&grid, &data)?;
    let trajectory = match cfg.ic {
        IcSpec::OdeType { params, .. } => Some(Arc::new(OdeTrajectory::new(params, cfg.t_end.max(1.0) * 1.01)?)),
        _ => None,
    };
    let policy = BoundaryPolicy {
        left: side_bc(cfg.boundary.left, &points, &grid, &cfg.grass, &trajectory)?,
        right: side_bc(cfg.boundary.right, &points, &grid, &cfg.grass, &trajectory)?,
    };
    policy.validate().map_err(HarnessError::Config)?;
    for s in &cfg.sponge {
        s.validate(&grid).map_err(HarnessError::Config)?;
    }
    Ok(Case {
        grid,
        state0,
        policy,
        points,
        quasi,
        trajectory,
    })
}

/// Cell averages of a pointwise function.
pub fn cell_averages(grid: &GridSpec, f: &dyn Fn(f64) -> f64) -> Vec<f64> {
    (0..grid.n_cells)
        .map(|i| {
            let x = grid.center(i as isize);
            gauss3_average(f, x - 0.5 * grid.dx, x + 0.5 * grid.dx)
        })
        .collect()
}
