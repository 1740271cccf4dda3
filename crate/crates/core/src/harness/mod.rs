//! Config-driven runs, error norms and convergence studies.

pub mod catalog;
pub mod config;
pub mod norms;
pub mod output;
pub mod setup;
pub mod study;

use std::path::Path;
use std::time::Instant;

pub use config::{BoundarySpec, IcSpec, OutputSpec, Profile, ReferenceSpec, RunConfig, SideSpec};
pub use norms::{error_norm, observed_orders, restrict_dual, restrict_primal};
pub use setup::{Case, build_case};
pub use study::{StudyReport, convergence_study};

use crate::boundary::{SpongeSpec, apply_sponge, sponge_weight};
use crate::error::SolverError;
use crate::fluxes::GrassParams;
use crate::grid::{GridSpec, StaggeredState};
use crate::reconstruct::CwenoParams;
use crate::reference::scalar::ScalarBc;
use crate::reference::{type1_evolve, type2_evolve};
use crate::stepcontrol::{CflMode, StepInfo, StepRecord, clamp_to_end, compute_dt, dt_from_speeds};
use crate::timeint::{
    CollocatedState, Model, StepConfig, TimeScheme, explicit1_max_speed, explicit1_step, step,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("setup failed: {0}")]
    Setup(#[from] SolverError),
    #[error("step {step} at t = {t}: {source}")]
    Solver {
        t: f64,
        step: usize,
        #[source]
        source: SolverError,
    },
    #[error("study error: {0}")]
    Study(String),
}

impl HarnessError {
    /// Process exit code: 2 for numerical failures, 3 for configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Solver { .. } | HarnessError::Setup(_) => 2,
            HarnessError::Config(_) | HarnessError::Study(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

/// Errors and run statistics of one case.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub n_cells: usize,
    /// `(variable, relative L1 error)`.
    pub errors: Vec<(String, f64)>,
    pub runtime_s: f64,
    pub steps: usize,
    pub cfl_min: f64,
    pub cfl_max: f64,
    pub cfl_mean: f64,
    pub mcfl_max: f64,
}

impl ErrorReport {
    pub fn error(&self, var: &str) -> Option<f64> {
        self.errors.iter().find(|(v, _)| v == var).map(|(_, e)| *e)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub grid: GridSpec,
    pub initial: StaggeredState,
    pub state: StaggeredState,
    pub records: Vec<StepRecord>,
    pub report: ErrorReport,
}

/// Reference fields on the run's own grid.
#[derive(Debug, Clone, Default)]
pub struct RefFields {
    pub eta: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub zb: Option<Vec<f64>>,
}

pub(crate) fn step_config<'a>(cfg: &RunConfig, case: &'a Case) -> StepConfig<'a> {
    let mut sc = StepConfig::new(&case.grid, &case.policy, cfg.model);
    sc.grass = if cfg.model == Model::Sve { cfg.grass } else { GrassParams::disabled() };
    sc.variant = cfg.variant;
    sc.eigen = cfg.cfl.eigen;
    if let Some(tau) = cfg.cweno_tau {
        sc.cweno = CwenoParams::with_tau(tau);
    }
    sc
}

fn sponge_collocated(c: &mut CollocatedState, grid: &GridSpec, spec: &SpongeSpec) {
    for i in 0..c.eta.len() {
        let w = sponge_weight(grid.center(i as isize), spec);
        if w < 1.0 {
            c.eta[i] = c.eta[i] * w + spec.eq.eta * (1.0 - w);
            c.q[i] = c.q[i] * w + spec.eq.q * (1.0 - w);
            c.zb[i] = c.zb[i] * w + spec.eq.zb * (1.0 - w);
        }
    }
}

fn summarize(records: &[StepRecord], report: &mut ErrorReport) {
    report.steps = records.len();
    if records.is_empty() {
        return;
    }
    report.cfl_min = records.iter().map(|r| r.cfl).fold(f64::INFINITY, f64::min);
    report.cfl_max = records.iter().map(|r| r.cfl).fold(0.0, f64::max);
    report.cfl_mean = records.iter().map(|r| r.cfl).sum::<f64>() / records.len() as f64;
    report.mcfl_max = records.iter().map(|r| r.mcfl).fold(0.0, f64::max);
}

/// Time loop for the staggered schemes.
fn advance_staggered(
    cfg: &RunConfig,
    case: &Case,
    out_dir: Option<&Path>,
) -> Result<(StaggeredState, Vec<StepRecord>), HarnessError> {
    let sc = step_config(cfg, case);
    let grid = &case.grid;
    let mut policy = cfg.cfl;
    if cfg.time_scheme.is_explicit() {
        policy.mode = CflMode::Explicit;
    }
    let mut s = case.state0.clone();
    let mut records = Vec::new();
    let mut k = 0;
    while s.t < cfg.t_end {
        if k >= cfg.max_steps {
            return Err(HarnessError::Solver {
                t: s.t,
                step: k,
                source: SolverError::DegenerateStep(format!("step limit {} reached", cfg.max_steps)),
            });
        }
        let fail = |source: SolverError| HarnessError::Solver { t: s.t, step: k, source };
        let info = match cfg.fixed_dt {
            Some(dt) => {
                let mut i = compute_dt(&s, grid, &policy, cfg.model, &sc.grass).unwrap_or(StepInfo {
                    dt,
                    u_max: 0.0,
                    lambda_max: 0.0,
                });
                i.dt = dt;
                i
            }
            None => compute_dt(&s, grid, &policy, cfg.model, &sc.grass).map_err(fail)?,
        };
        let dt = clamp_to_end(info.dt, s.t, cfg.t_end);
        let last = dt == cfg.t_end - s.t;
        let mut next = step(&s, dt, cfg.time_scheme, &sc).map_err(fail)?;
        if last {
            next.t = cfg.t_end;
        }
        for sp in &cfg.sponge {
            apply_sponge(&mut next, grid, sp);
        }
        s = next;
        k += 1;
        records.push(StepRecord {
            step: k,
            t: s.t,
            dt,
            cfl: info.cfl(dt, grid.dx),
            mcfl: info.mcfl(dt, grid.dx),
        });
        if let (Some(dir), Some(every)) = (out_dir, cfg.output.every) {
            if every > 0 && k % every == 0 {
                output::write_state(dir, &format!("snap_{k:07}_"), grid, &s)?;
            }
        }
    }
    Ok((s, records))
}

/// Time loop for the collocated first-order baseline.
fn advance_collocated(cfg: &RunConfig, case: &Case) -> Result<(StaggeredState, Vec<StepRecord>), HarnessError> {
    let sc = step_config(cfg, case);
    let grid = &case.grid;
    let mut c = CollocatedState::from_staggered(&case.state0);
    let mut records = Vec::new();
    let mut k = 0;
    while c.t < cfg.t_end {
        let t0 = c.t;
        let fail = |source: SolverError| HarnessError::Solver { t: t0, step: k, source };
        if k >= cfg.max_steps {
            return Err(fail(SolverError::DegenerateStep("step limit reached".into())));
        }
        let lam = explicit1_max_speed(&c, &sc).map_err(fail)?;
        let h = c.h();
        let u_max = c.q.iter().zip(&h).map(|(q, h)| (q / h).abs()).fold(0.0, f64::max);
        let mut policy = cfg.cfl;
        policy.mode = CflMode::Explicit;
        let raw = cfg.fixed_dt.unwrap_or_else(|| dt_from_speeds(u_max, lam, grid.dx, &policy));
        let dt = clamp_to_end(raw, c.t, cfg.t_end);
        let last = dt == cfg.t_end - c.t;
        explicit1_step(&mut c, dt, &sc).map_err(fail)?;
        if last {
            c.t = cfg.t_end;
        }
        for sp in &cfg.sponge {
            sponge_collocated(&mut c, grid, sp);
        }
        k += 1;
        records.push(StepRecord {
            step: k,
            t: c.t,
            dt,
            cfl: lam * dt / grid.dx,
            mcfl: u_max * dt / grid.dx,
        });
    }
    Ok((c.to_staggered(), records))
}

/// Reference fields requested by the configuration, if they can be built
/// without other runs.
pub fn reference_fields(cfg: &RunConfig, case: &Case) -> Result<Option<RefFields>, HarnessError> {
    let grid = &case.grid;
    let t = cfg.t_end;
    Ok(match cfg.reference {
        ReferenceSpec::None | ReferenceSpec::Richardson => None,
        ReferenceSpec::FineGrid { n_cells } => {
            let mut fine = cfg.clone();
            fine.n_cells = n_cells;
            fine.reference = ReferenceSpec::None;
            fine.output = OutputSpec::default();
            let r = run_case(&fine, None)?;
            Some(RefFields {
                eta: Some(restrict_primal(&r.state.eta, cfg.n_cells)?),
                q: Some(restrict_dual(&r.state.q, cfg.n_cells)?),
                zb: Some(restrict_primal(&r.state.zb, cfg.n_cells)?),
            })
        }
        ReferenceSpec::OdeExact => {
            let tr = case.trajectory.as_ref().expect("validated");
            let w = tr.at(t)?;
            let p = tr.params;
            let b = case.state0.b.clone();
            let zb = setup::cell_averages(grid, &|x| p.field(x, w).2);
            let eta = zb.iter().zip(&b).map(|(z, b)| w[0] + b + z).collect();
            // q is linear in x, so dual averages are point values
            let q = grid.interfaces().iter().map(|&x| p.field(x, w).1).collect();
            Some(RefFields {
                eta: Some(eta),
                q: Some(q),
                zb: Some(zb),
            })
        }
        ReferenceSpec::Type1 => {
            let (eta0, q0) = ((case.points.eta)(grid.x_a), (case.points.q)(grid.x_a));
            let z = type1_evolve(&case.state0.zb, grid.dx, eta0, q0, &cfg.grass, t, ScalarBc::Outflow)?;
            Some(RefFields {
                zb: Some(z),
                ..RefFields::default()
            })
        }
        ReferenceSpec::Type2 => {
            let qs = case.quasi.as_ref().expect("validated");
            let u = match cfg.ic {
                IcSpec::QuasiStationary { u, .. } => u,
                _ => unreachable!("validated"),
            };
            let u0 = setup::cell_averages(grid, &|x| u.eval(x));
            let r = type2_evolve(&u0, grid.dx, qs, t, ScalarBc::Outflow)?;
            Some(RefFields {
                zb: Some(r.zb),
                ..RefFields::default()
            })
        }
    })
}

/// Relative errors of `num` against `reference` inside the error window.
pub fn compare(
    cfg: &RunConfig,
    grid: &GridSpec,
    num: &StaggeredState,
    reference: &RefFields,
) -> Result<Vec<(String, f64)>, HarnessError> {
    let n = grid.n_cells;
    let (lo, hi) = match cfg.error_window {
        Some([a, b]) => (a, b),
        None => (grid.x_a, grid.x_b),
    };
    let cells: Vec<usize> = (0..n)
        .filter(|&i| (lo..=hi).contains(&grid.center(i as isize)))
        .collect();
    let slots: Vec<usize> = (1..n)
        .filter(|&k| (lo..=hi).contains(&grid.interface(k as isize)))
        .collect();
    let eq = cfg.equilibrium;
    let mut out = Vec::new();
    let mut one = |name: &str, num: &[f64], r: &[f64], idx: &[usize], e: Option<f64>| -> Result<(), HarnessError> {
        let a: Vec<f64> = idx.iter().map(|&i| num[i]).collect();
        let b: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
        let eqv = e.map(|v| vec![v; idx.len()]);
        out.push((name.to_string(), error_norm(&a, &b, eqv.as_deref(), grid.dx)?));
        Ok(())
    };
    if let Some(r) = &reference.eta {
        one("eta", &num.eta, r, &cells, eq.map(|e| e.eta))?;
    }
    if let Some(r) = &reference.q {
        one("q", &num.q, r, &slots, eq.map(|e| e.q))?;
    }
    if let Some(r) = &reference.zb {
        if cfg.model == Model::Sve {
            one("zb", &num.zb, r, &cells, eq.map(|e| e.zb))?;
        }
    }
    Ok(out)
}

/// Runs one case to `t_end`, writing artifacts to `out_dir` (or the
/// configured directory) when given.
pub fn run_case(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let case = build_case(cfg)?;
    let dir = out_dir.or(cfg.output.dir.as_deref());
    let (state, records) = match cfg.time_scheme {
        TimeScheme::Explicit1 => advance_collocated(cfg, &case)?,
        _ => advance_staggered(cfg, &case, dir)?,
    };
    let mut report = ErrorReport {
        n_cells: cfg.n_cells,
        ..ErrorReport::default()
    };
    summarize(&records, &mut report);
    report.runtime_s = start.elapsed().as_secs_f64();
    if let Some(r) = reference_fields(cfg, &case)? {
        report.errors = compare(cfg, &case.grid, &state, &r)?;
    }
    if let Some(dir) = dir {
        output::write_run(dir, &case.grid, &state, &records, &report)?;
    }
    Ok(RunOutcome {
        grid: case.grid,
        initial: case.state0,
        state,
        records,
        report,
    })
}
