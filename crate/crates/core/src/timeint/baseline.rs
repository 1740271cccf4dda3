//! First-order explicit baseline on a collocated grid.
//!
//! All of `eta`, `q` and `zb` live at primal centres. Interface fluxes are
//! Rusanov fluxes with the local spectral radius as dissipation; the
//! pressure term is the centred `g h (eta_{i+1} - eta_{i-1}) / (2 dx)`.

use super::{Model, StepConfig};
use crate::GRAVITY;
use crate::boundary::{BoundaryPolicy, Side, SideBc};
use crate::error::{Result, SolverError};
use crate::fluxes::{eigenvalues, grass_qb};
use crate::grid::{GridSpec, H_MIN, StaggeredState};

#[derive(Debug, Clone, PartialEq)]
pub struct CollocatedState {
    pub eta: Vec<f64>,
    pub q: Vec<f64>,
    pub zb: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl CollocatedState {
    pub fn from_staggered(s: &StaggeredState) -> Self {
        Self {
            eta: s.eta.clone(),
            q: s.q_centers(),
            zb: s.zb.clone(),
            b: s.b.clone(),
            t: s.t,
        }
    }

    /// Staggered copy with `q` interpolated to the interfaces.
    pub fn to_staggered(&self) -> StaggeredState {
        let n = self.eta.len();
        let q = (0..=n)
            .map(|k| match k {
                0 => 1.5 * self.q[0] - 0.5 * self.q[1],
                k if k == n => 1.5 * self.q[n - 1] - 0.5 * self.q[n - 2],
                _ => 0.5 * (self.q[k - 1] + self.q[k]),
            })
            .collect();
        StaggeredState {
            eta: self.eta.clone(),
            q,
            zb: self.zb.clone(),
            b: self.b.clone(),
            t: self.t,
        }
    }

    pub fn h(&self) -> Vec<f64> {
        (0..self.eta.len())
            .map(|i| self.eta[i] - self.b[i] - self.zb[i])
            .collect()
    }

    fn check_wet(&self) -> Result<()> {
        for (index, h) in self.h().into_iter().enumerate() {
            if !(h > H_MIN) {
                return Err(SolverError::DryCell {
                    index,
                    h,
                    threshold: H_MIN,
                });
            }
        }
        Ok(())
    }
}

/// One ghost cell per side; `(eta, q, zb, b)`.
fn ghost(
    c: &CollocatedState,
    grid: &GridSpec,
    bc: &BoundaryPolicy,
    side: Side,
) -> Result<[f64; 4]> {
    let n = c.eta.len();
    let (edge, wrap, x) = match side {
        Side::Left => (0, n - 1, grid.center(-1)),
        Side::Right => (n - 1, 0, grid.center(n as isize)),
    };
    let kind = match side {
        Side::Left => &bc.left,
        Side::Right => &bc.right,
    };
    let (zb, b) = (c.zb[edge], c.b[edge]);
    Ok(match kind {
        SideBc::Periodic => [c.eta[wrap], c.q[wrap], c.zb[wrap], c.b[wrap]],
        SideBc::FreeOutflow => [c.eta[edge], c.q[edge], zb, b],
        SideBc::InflowWave(w) => {
            let (h, u) = w.state(grid.x_a, c.t)?;
            [h + b + zb, h * u, zb, b]
        }
        SideBc::OdeExact(tr) => {
            let (h, q, zb) = tr.params.field(x, tr.at(c.t)?);
            [h + b + zb, q, zb, b]
        }
    })
}

fn spectral_radius(h: f64, q: f64, cfg: &StepConfig<'_>) -> Result<f64> {
    let u = q / h;
    match cfg.model {
        Model::Swe => Ok(u.abs() + (GRAVITY * h).sqrt()),
        Model::Sve => Ok(eigenvalues(h, u, &cfg.grass, cfg.eigen)?.spectral_radius()),
    }
}

/// Largest spectral radius over the cells.
pub fn explicit1_max_speed(c: &CollocatedState, cfg: &StepConfig<'_>) -> Result<f64> {
    let h = c.h();
    let mut m = 0.0f64;
    for i in 0..h.len() {
        m = m.max(spectral_radius(h[i], c.q[i], cfg)?);
    }
    Ok(m)
}

/// Forward-Euler step of the collocated Rusanov scheme.
pub fn explicit1_step(c: &mut CollocatedState, dt: f64, cfg: &StepConfig<'_>) -> Result<()> {
    let n = c.eta.len();
    let dx = cfg.grid.dx;
    c.check_wet()?;
    let gl = ghost(c, cfg.grid, cfg.bc, Side::Left)?;
    let gr = ghost(c, cfg.grid, cfg.bc, Side::Right)?;
    let ext = |v: &[f64], j: usize| -> Vec<f64> {
        let mut e = Vec::with_capacity(n + 2);
        e.push(gl[j]);
        e.extend_from_slice(v);
        e.push(gr[j]);
        e
    };
    let eta = ext(&c.eta, 0);
    let q = ext(&c.q, 1);
    let zb = ext(&c.zb, 2);
    let b = ext(&c.b, 3);
    let h: Vec<f64> = (0..n + 2).map(|i| eta[i] - b[i] - zb[i]).collect();
    let sediment = cfg.sediment();
    let qb = (0..n + 2)
        .map(|i| if sediment { grass_qb(h[i], q[i], &cfg.grass) } else { Ok(0.0) })
        .collect::<Result<Vec<f64>>>()?;
    let lam = (0..n + 2)
        .map(|i| spectral_radius(h[i], q[i], cfg))
        .collect::<Result<Vec<f64>>>()?;
    let mut fe = Vec::with_capacity(n + 1);
    let mut fq = Vec::with_capacity(n + 1);
    let mut fz = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (l, r) = (j, j + 1);
        let a = lam[l].max(lam[r]);
        fe.push(0.5 * (q[l] + qb[l] + q[r] + qb[r] - a * (eta[r] - eta[l])));
        fq.push(0.5 * (q[l] * q[l] / h[l] + q[r] * q[r] / h[r] - a * (q[r] - q[l])));
        fz.push(0.5 * (qb[l] + qb[r] - a * (zb[r] - zb[l])));
    }
    let s = dt / dx;
    for i in 0..n {
        let e = i + 1;
        c.eta[i] -= s * (fe[i + 1] - fe[i]);
        c.q[i] -= s * (fq[i + 1] - fq[i]) + dt * GRAVITY * h[e] * (eta[e + 1] - eta[e - 1]) / (2.0 * dx);
        if sediment {
            c.zb[i] -= s * (fz[i + 1] - fz[i]);
        }
    }
    c.t += dt;
    if let Some(i) = c.eta.iter().chain(&c.q).chain(&c.zb).position(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite {
            field: "collocated state",
            index: i % n,
        });
    }
    c.check_wet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryPolicy;
    use crate::fluxes::GrassParams;
    use crate::grid::build_grid;

    #[test]
    fn lake_at_rest() {
        let g = build_grid(0.0, 1.0, 20).unwrap();
        let b: Vec<f64> = g.centers().iter().map(|x| 0.1 * (x * 6.0).sin()).collect();
        let mut c = CollocatedState {
            eta: vec![1.0; 20],
            q: vec![0.0; 20],
            zb: vec![0.0; 20],
            b,
            t: 0.0,
        };
        let bc = BoundaryPolicy::outflow();
        let cfg = StepConfig::new(&g, &bc, Model::Swe);
        for _ in 0..10 {
            explicit1_step(&mut c, 0.01, &cfg).unwrap();
        }
        assert!(c.eta.iter().all(|e| (e - 1.0).abs() < 1e-15));
        assert!(c.q.iter().all(|q| q.abs() < 1e-15));
    }

    #[test]
    fn periodic_mass_conserved() {
        let g = build_grid(0.0, 1.0, 32).unwrap();
        let mut c = CollocatedState {
            eta: g.centers().iter().map(|x| 1.0 + 0.1 * (6.283 * x).sin()).collect(),
            q: vec![0.2; 32],
            zb: g.centers().iter().map(|x| 0.05 * (6.283 * x).cos()).collect(),
            b: vec![0.0; 32],
            t: 0.0,
        };
        let bc = BoundaryPolicy::periodic();
        let mut cfg = StepConfig::new(&g, &bc, Model::Sve);
        cfg.grass = GrassParams::new(0.1, 3.0, 0.2);
        let (m0, z0): (f64, f64) = (c.eta.iter().sum(), c.zb.iter().sum());
        for _ in 0..20 {
            let dt = 0.45 * g.dx / explicit1_max_speed(&c, &cfg).unwrap();
            explicit1_step(&mut c, dt, &cfg).unwrap();
        }
        assert!((c.eta.iter().sum::<f64>() - m0).abs() < 1e-12);
        assert!((c.zb.iter().sum::<f64>() - z0).abs() < 1e-12);
    }

    #[test]
    fn staggered_round_trip_of_linear_q() {
        let s = StaggeredState {
            eta: vec![1.0; 6],
            q: (0..7).map(|k| 0.1 * k as f64).collect(),
            zb: vec![0.0; 6],
            b: vec![0.0; 6],
            t: 0.0,
        };
        let back = CollocatedState::from_staggered(&s).to_staggered();
        for (a, b) in back.q.iter().zip(&s.q) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
