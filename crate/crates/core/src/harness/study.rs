//! Grid-convergence studies on nested grids.

use std::path::Path;

use super::config::{OutputSpec, ReferenceSpec, RunConfig};
use super::norms::{observed_orders, restrict_dual, restrict_primal};
use super::{ErrorReport, HarnessError, RefFields, RunOutcome, compare, output, run_case};
use crate::timeint::Model;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub levels: Vec<usize>,
    pub variables: Vec<String>,
    /// `errors[v][k]` for variable `v` on level `k`.
    pub errors: Vec<Vec<Option<f64>>>,
    pub orders: Vec<Vec<Option<f64>>>,
    pub runs: Vec<ErrorReport>,
}

impl StudyReport {
    fn var(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn error(&self, var: &str, n: usize) -> Option<f64> {
        let k = self.levels.iter().position(|&l| l == n)?;
        self.errors[self.var(var)?][k]
    }

    pub fn order(&self, var: &str, n: usize) -> Option<f64> {
        let k = self.levels.iter().position(|&l| l == n)?;
        self.orders[self.var(var)?][k]
    }
}

fn restricted(o: &RunOutcome, n: usize) -> Result<RefFields, HarnessError> {
    Ok(RefFields {
        eta: Some(restrict_primal(&o.state.eta, n)?),
        q: Some(restrict_dual(&o.state.q, n)?),
        zb: Some(restrict_primal(&o.state.zb, n)?),
    })
}

fn run_all(base: &RunConfig, sizes: &[usize]) -> Result<Vec<RunOutcome>, HarnessError> {
    let configs: Vec<RunConfig> = sizes
        .iter()
        .map(|&n| {
            let mut c = base.clone();
            c.n_cells = n;
            c.output = OutputSpec::default();
            c
        })
        .collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_case(c, None))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study worker panicked"))
            .collect()
    })
}

/// Runs `base` on each of `levels` (increasing, each dividing the next) and
/// measures errors against `reference`.
///
/// With `FineGrid` every level is compared with the restricted fine run,
/// which must have at least four times the finest level's cells. With
/// `Richardson` level `k` is compared with level `k - 1` on the coarser grid
/// and the error is reported at level `k`. Other references are evaluated per
/// run.
pub fn convergence_study(
    base: &RunConfig,
    levels: &[usize],
    reference: ReferenceSpec,
    out_dir: Option<&Path>,
) -> Result<StudyReport, HarnessError> {
    if levels.is_empty() {
        return Err(HarnessError::Study("no levels given".into()));
    }
    for w in levels.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(HarnessError::Study(format!("levels {} and {} are not nested", w[0], w[1])));
        }
    }
    let finest = *levels.last().unwrap();
    let mut cfg = base.clone();
    cfg.reference = match reference {
        ReferenceSpec::FineGrid { .. } | ReferenceSpec::Richardson => ReferenceSpec::None,
        r => r,
    };
    cfg.validate()?;
    let mut sizes = levels.to_vec();
    if let ReferenceSpec::FineGrid { n_cells } = reference {
        if n_cells < 4 * finest || n_cells % finest != 0 {
            return Err(HarnessError::Study(format!(
                "reference grid {n_cells} must be a multiple of at least 4x the finest level {finest}"
            )));
        }
        sizes.push(n_cells);
    }
    let runs = run_all(&cfg, &sizes)?;
    let mut variables = vec!["eta".to_string(), "q".to_string()];
    if base.model == Model::Sve {
        variables.push("zb".into());
    }
    let mut per_level: Vec<Vec<(String, f64)>> = Vec::with_capacity(levels.len());
    for (k, &n) in levels.iter().enumerate() {
        let errs = match reference {
            ReferenceSpec::FineGrid { .. } => {
                let r = restricted(runs.last().unwrap(), n)?;
                compare(&cfg, &runs[k].grid, &runs[k].state, &r)?
            }
            ReferenceSpec::Richardson if k > 0 => {
                let coarse = levels[k - 1];
                let r = restricted(&runs[k], coarse)?;
                compare(&cfg, &runs[k - 1].grid, &runs[k - 1].state, &r)?
            }
            ReferenceSpec::Richardson => vec![],
            _ => runs[k].report.errors.clone(),
        };
        per_level.push(errs);
    }
    if !matches!(reference, ReferenceSpec::FineGrid { .. } | ReferenceSpec::Richardson) {
        variables.retain(|v| per_level.iter().any(|e| e.iter().any(|(n, _)| n == v)));
    }
    let errors: Vec<Vec<Option<f64>>> = variables
        .iter()
        .map(|v| {
            per_level
                .iter()
                .map(|e| e.iter().find(|(n, _)| n == v).map(|(_, x)| *x))
                .collect()
        })
        .collect();
    let orders = errors.iter().map(|e| observed_orders(levels, e)).collect();
    let mut reports: Vec<ErrorReport> = runs.iter().take(levels.len()).map(|r| r.report.clone()).collect();
    for (rep, errs) in reports.iter_mut().zip(&per_level) {
        rep.errors = errs.clone();
    }
    let report = StudyReport {
        levels: levels.to_vec(),
        variables,
        errors,
        orders,
        runs: reports,
    };
    if let Some(dir) = out_dir {
        output::write_study(dir, &report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig::from_toml(
            r#"
model = "swe"
domain = [0.0, 1.0]
n_cells = 16
t_end = 0.02
[ic]
kind = "fields"
eta = { kind = "gaussian", base = 1.0, amp = 0.05, center = 0.5, rate = 20.0 }
[boundary]
left = { kind = "periodic" }
right = { kind = "periodic" }
[cfl]
cfl_imex = 2.0
"#,
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_nested_levels() {
        assert!(convergence_study(&base(), &[16, 24], ReferenceSpec::Richardson, None).is_err());
        assert!(convergence_study(&base(), &[16, 32], ReferenceSpec::FineGrid { n_cells: 64 }, None).is_err());
    }

    #[test]
    fn richardson_errors_shrink() {
        let r = convergence_study(&base(), &[16, 32, 64], ReferenceSpec::Richardson, None).unwrap();
        assert!(r.error("eta", 16).is_none());
        let (a, b) = (r.error("eta", 32).unwrap(), r.error("eta", 64).unwrap());
        assert!(b < a, "{a} {b}");
        assert!(r.order("eta", 64).is_some());
    }
}
