//! Explicit spatial operators shared by all staggered schemes.

use super::{SchemeVariant, StepConfig};
use crate::boundary::{Extended, NG, fill_ghosts};
use crate::error::Result;
use crate::fluxes::{ExnerSide, GrassParams, rusanov_exner, rusanov_momentum, sediment_speed};
use crate::grid::StaggeredState;
use crate::pressure::{PressureStencil, stencils_from_h};
use crate::reconstruct::{
    CwenoParams, cweno_edge_values, delta3, shifted_average, upwind_interface_h,
};

/// Explicit ingredients of one stage, built from the explicit stage state.
#[derive(Debug, Clone)]
pub struct StageOps {
    /// Pressure stencils on slots `0 ..= n` from the explicit `h`.
    pub stencils: Vec<PressureStencil>,
    /// `(F_right - F_left) / dx` on slots `0 ..= n`.
    pub dq: Vec<f64>,
    /// Explicit part of `d eta/dt` on cells.
    pub ex_eta: Vec<f64>,
    /// `d zb/dt` on cells.
    pub ex_zb: Vec<f64>,
}

impl StageOps {
    pub fn new(u_e: &StaggeredState, t: f64, cfg: &StepConfig<'_>) -> Result<Self> {
        let n = u_e.n_cells();
        let dx = cfg.grid.dx;
        let ext = fill_ghosts(u_e, cfg.grid, cfg.bc, t)?;
        let stencils = stencils_from_h(&ext.h, NG, n + 1, dx, &cfg.cweno);
        let dq = momentum_divergence(&ext, dx, &cfg.cweno)?;
        let mut ex_eta = vec![0.0; n];
        let mut ex_zb = vec![0.0; n];
        if cfg.sediment() {
            let (ge, gz) = exner_fluxes(&ext, dx, &cfg.grass, &cfg.cweno)?;
            for i in 0..n {
                ex_eta[i] = -(ge[i + 1] - ge[i]) / dx;
                ex_zb[i] = -(gz[i + 1] - gz[i]) / dx;
            }
        }
        if cfg.variant == SchemeVariant::FullyThirdOrder {
            for (i, v) in ex_eta.iter_mut().enumerate() {
                let k = i + NG;
                *v += delta3(ext.q[k - 1], ext.q[k], ext.q[k + 1], ext.q[k + 2]) / (24.0 * dx);
            }
        }
        Ok(Self {
            stencils,
            dq,
            ex_eta,
            ex_zb,
        })
    }
}

/// Divergence of the Rusanov momentum flux on slots `0 ..= n`.
///
/// The flux at a primal centre uses CWENO edge values of `q` and of the
/// upwind interface depth, both reconstructed on the dual grid.
pub fn momentum_divergence(ext: &Extended, dx: f64, p: &CwenoParams) -> Result<Vec<f64>> {
    let n = ext.n_cells();
    // dual slots -2 ..= n+2
    let slots = || (NG - 2)..=(NG + n + 2);
    let qd: Vec<f64> = slots().map(|e| ext.q[e]).collect();
    let hd: Vec<f64> = slots()
        .map(|e| {
            // slot e sits between extended cells e-1 and e
            upwind_interface_h(ext.h[e - 2], ext.h[e - 1], ext.h[e], ext.h[e + 1], ext.q[e] >= 0.0)
        })
        .collect();
    let (qm, qp) = cweno_edge_values(&qd, dx, p);
    let (hm, hp) = cweno_edge_values(&hd, dx, p);
    // flux j sits at primal centre j - 1
    let flux = (0..qm.len())
        .map(|j| rusanov_momentum(hm[j], qm[j], hp[j], qp[j]))
        .collect::<Result<Vec<f64>>>()?;
    Ok((0..=n).map(|k| (flux[k + 1] - flux[k]) / dx).collect())
}

/// `q* = q - theta dq`.
pub fn explicit_qstar(q: &[f64], dq: &[f64], theta: f64) -> Vec<f64> {
    q.iter().zip(dq).map(|(q, d)| q - theta * d).collect()
}

/// Bedload fluxes `(G_eta, G_zb)` on interfaces `0 ..= n`.
pub fn exner_fluxes(
    ext: &Extended,
    dx: f64,
    grass: &GrassParams,
    p: &CwenoParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = ext.n_cells();
    // primal cells -2 ..= n+1
    let cells = || (NG - 2)..(NG + n + 2);
    // cell c is bounded by extended slots c and c+1
    let qc: Vec<f64> = cells()
        .map(|c| shifted_average(ext.q[c - 1], ext.q[c], ext.q[c + 1], ext.q[c + 2]))
        .collect();
    let pick = |v: &[f64]| cells().map(|c| v[c]).collect::<Vec<f64>>();
    let (hm, hp) = cweno_edge_values(&pick(&ext.h), dx, p);
    let (qm, qp) = cweno_edge_values(&qc, dx, p);
    let (zm, zp) = cweno_edge_values(&pick(&ext.zb), dx, p);
    let (em, ep) = cweno_edge_values(&pick(&ext.eta), dx, p);
    let mut ge = Vec::with_capacity(n + 1);
    let mut gz = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let l = ExnerSide {
            h: hm[k],
            q: qm[k],
            zb: zm[k],
            eta: em[k],
        };
        let r = ExnerSide {
            h: hp[k],
            q: qp[k],
            zb: zp[k],
            eta: ep[k],
        };
        let alpha = sediment_speed(l.h, l.q / l.h, grass).max(sediment_speed(r.h, r.q / r.h, grass));
        let (a, b) = rusanov_exner(&l, &r, grass, alpha)?;
        ge.push(a);
        gz.push(b);
    }
    Ok((ge, gz))
}
