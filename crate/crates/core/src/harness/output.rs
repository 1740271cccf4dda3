//! CSV artifacts.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::study::StudyReport;
use super::ErrorReport;
use crate::grid::{GridSpec, StaggeredState};
use crate::stepcontrol::StepRecord;

fn put(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)
}

/// One row per primal cell: `x, eta, h, q_center, zb, b`.
pub fn state_csv(grid: &GridSpec, s: &StaggeredState) -> String {
    let h = s.h();
    let qc = s.q_centers();
    let mut out = String::from("x,eta,h,q_center,zb,b\n");
    for i in 0..s.n_cells() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            grid.center(i as isize),
            s.eta[i],
            h[i],
            qc[i],
            s.zb[i],
            s.b[i]
        );
    }
    out
}

/// One row per dual slot: `x, q`.
pub fn dual_csv(grid: &GridSpec, s: &StaggeredState) -> String {
    let mut out = String::from("x,q\n");
    for (k, q) in s.q.iter().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e}", grid.interface(k as isize), q);
    }
    out
}

pub fn step_log_csv(records: &[StepRecord]) -> String {
    let mut out = String::from("step,t,dt,cfl,mcfl\n");
    for r in records {
        let _ = writeln!(out, "{},{:.16e},{:.16e},{:.16e},{:.16e}", r.step, r.t, r.dt, r.cfl, r.mcfl);
    }
    out
}

pub fn report_csv(r: &ErrorReport) -> String {
    let mut out = String::from("quantity,value\n");
    let _ = writeln!(out, "n_cells,{}", r.n_cells);
    let _ = writeln!(out, "steps,{}", r.steps);
    let _ = writeln!(out, "runtime_s,{:.6}", r.runtime_s);
    let _ = writeln!(out, "cfl_min,{:.6e}", r.cfl_min);
    let _ = writeln!(out, "cfl_max,{:.6e}", r.cfl_max);
    let _ = writeln!(out, "cfl_mean,{:.6e}", r.cfl_mean);
    let _ = writeln!(out, "mcfl_max,{:.6e}", r.mcfl_max);
    for (v, e) in &r.errors {
        let _ = writeln!(out, "error_{v},{e:.6e}");
    }
    out
}

/// `n, variable, error, order` with empty fields where undefined.
pub fn study_csv(r: &StudyReport) -> String {
    let fmt = |v: Option<f64>, p: usize| v.map(|x| format!("{x:.prec$e}", prec = p)).unwrap_or_default();
    let mut out = String::from("n_cells,variable,error,order\n");
    for (k, n) in r.levels.iter().enumerate() {
        for (v, name) in r.variables.iter().enumerate() {
            let _ = writeln!(out, "{n},{name},{},{}", fmt(r.errors[v][k], 6), fmt(r.orders[v][k], 3));
        }
    }
    out
}

pub fn write_state(dir: &Path, tag: &str, grid: &GridSpec, s: &StaggeredState) -> io::Result<()> {
    put(&dir.join(format!("{tag}state.csv")), &state_csv(grid, s))?;
    put(&dir.join(format!("{tag}dual.csv")), &dual_csv(grid, s))
}

pub fn write_run(
    dir: &Path,
    grid: &GridSpec,
    s: &StaggeredState,
    records: &[StepRecord],
    report: &ErrorReport,
) -> io::Result<()> {
    write_state(dir, "", grid, s)?;
    put(&dir.join("steps.csv"), &step_log_csv(records))?;
    put(&dir.join("report.csv"), &report_csv(report))
}

pub fn write_study(dir: &Path, r: &StudyReport) -> io::Result<()> {
    put(&dir.join("study.csv"), &study_csv(r))
}
