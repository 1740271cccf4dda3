//! Quasi-stationary reduction: the flow is slaved to the sediment through
//! the velocity `u`, which obeys `u_t + lambda(u) u_x = 0`.
//!
//! * `q + q_b = Q` gives `h(u) = Q/u - xi A_g u^(m-1)`.
//! * `G + g (h + zb + b) = C` gives `zb(u)`, with `G' = u (Q - (m+1) xi A_g u^m) / (Q - xi A_g u^m)`.
//!
//! The equation is solved in conservative form `u_t + Lambda(u)_x = 0` with
//! `Lambda' = lambda` tabulated alongside `G`.

use super::scalar::{ScalarBc, ScalarFlux, ScalarLaw, evolve_scalar};
use crate::GRAVITY;
use crate::error::{Result, SolverError};
use crate::fluxes::GrassParams;

const TABLE_INTERVALS: usize = 4000;

#[derive(Debug, Clone)]
pub struct QuasiStatParams {
    pub q_total: f64,
    pub c_bern: f64,
    pub b: f64,
    pub grass: GrassParams,
    u_lo: f64,
    du: f64,
    g_tab: Vec<f64>,
    lam_int_tab: Vec<f64>,
}

impl QuasiStatParams {
    fn xa(&self) -> f64 {
        self.grass.strength()
    }

    pub fn g_prime(&self, u: f64) -> f64 {
        g_prime(u, self.q_total, &self.grass)
    }

    pub fn h_of_u(&self, u: f64) -> f64 {
        self.q_total / u - self.xa() * u.powf(self.grass.m_g - 1.0)
    }

    pub fn lambda(&self, u: f64) -> f64 {
        lambda(u, self.q_total, &self.grass)
    }

    pub fn u_range(&self) -> (f64, f64) {
        (self.u_lo, self.u_lo + self.du * (self.g_tab.len() - 1) as f64)
    }

    fn locate(&self, u: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.u_range();
        if !(u >= lo - 1e-12 * lo.abs() && u <= hi + 1e-12 * hi.abs()) {
            return Err(SolverError::Reference(format!(
                "u = {u} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let s = ((u - lo) / self.du).floor().max(0.0) as usize;
        let s = s.min(self.g_tab.len() - 2);
        Ok((s, (u - lo) / self.du - s as f64))
    }

    fn hermite(&self, tab: &[f64], d: &dyn Fn(f64) -> f64, u: f64) -> Result<f64> {
        let (s, th) = self.locate(u)?;
        let u0 = self.u_lo + s as f64 * self.du;
        let (f0, f1) = (tab[s], tab[s + 1]);
        let (d0, d1) = (d(u0), d(u0 + self.du));
        let h00 = (1.0 + 2.0 * th) * (1.0 - th).powi(2);
        let h10 = th * (1.0 - th).powi(2);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        Ok(h00 * f0 + h10 * self.du * d0 + h01 * f1 + h11 * self.du * d1)
    }

    /// `G(u)`, normalised so that `G` vanishes at the lower end of the table.
    pub fn g_of_u(&self, u: f64) -> Result<f64> {
        self.hermite(&self.g_tab, &|v| self.g_prime(v), u)
    }

    /// Antiderivative of `lambda`, the conservative flux.
    pub fn lambda_int(&self, u: f64) -> Result<f64> {
        self.hermite(&self.lam_int_tab, &|v| self.lambda(v), u)
    }

    pub fn zb_of_u(&self, u: f64) -> Result<f64> {
        Ok((self.c_bern - self.g_of_u(u)?) / GRAVITY - self.h_of_u(u) - self.b)
    }

    /// Sets `C` so that `zb(u_a) = zb_a`.
    pub fn anchor(mut self, u_a: f64, zb_a: f64) -> Result<Self> {
        self.c_bern = self.g_of_u(u_a)? + GRAVITY * (self.h_of_u(u_a) + zb_a + self.b);
        Ok(self)
    }
}

pub fn g_prime(u: f64, q_total: f64, p: &GrassParams) -> f64 {
    let s = p.strength() * u.powf(p.m_g);
    u * (q_total - (p.m_g + 1.0) * s) / (q_total - s)
}

pub fn lambda(u: f64, q_total: f64, p: &GrassParams) -> f64 {
    let xa = p.strength();
    if xa == 0.0 {
        return 0.0;
    }
    let num = p.m_g * xa * u.powf(p.m_g - 1.0);
    let den = (q_total + (p.m_g - 1.0) * xa * u.powf(p.m_g)) / (u * u) - g_prime(u, q_total, p) / GRAVITY;
    num / den
}

/// Tabulates `G` and `Lambda` on `u_range` by composite Simpson accumulation.
pub fn type2_build(
    u_range: (f64, f64),
    p: &GrassParams,
    q_total: f64,
    c_bern: f64,
    b: f64,
) -> Result<QuasiStatParams> {
    let (lo, hi) = u_range;
    if !(q_total > 0.0) {
        return Err(SolverError::Reference(format!("Q must be positive, got {q_total}")));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(SolverError::Reference(format!("invalid u range [{lo}, {hi}]")));
    }
    let n = TABLE_INTERVALS;
    let du = (hi - lo) / n as f64;
    let xa = p.strength();
    for k in 0..=2 * n {
        let u = lo + 0.5 * du * k as f64;
        if q_total - xa * u.powf(p.m_g) <= 0.0 {
            return Err(SolverError::Reference(format!(
                "Q - xi A_g u^m vanishes at u = {u}"
            )));
        }
        let den = (q_total + (p.m_g - 1.0) * xa * u.powf(p.m_g)) / (u * u)
            - g_prime(u, q_total, p) / GRAVITY;
        if den.abs() < 1e-12 {
            return Err(SolverError::Reference(format!("lambda is singular at u = {u}")));
        }
        if q_total / u - xa * u.powf(p.m_g - 1.0) <= 0.0 {
            return Err(SolverError::Reference(format!("h(u) is not positive at u = {u}")));
        }
    }
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64| du / 6.0 * (f(a) + 4.0 * f(a + 0.5 * du) + f(a + du));
    let gp = |u: f64| g_prime(u, q_total, p);
    let lam = |u: f64| lambda(u, q_total, p);
    let mut g_tab = Vec::with_capacity(n + 1);
    let mut l_tab = Vec::with_capacity(n + 1);
    let (mut gacc, mut lacc) = (0.0, 0.0);
    g_tab.push(0.0);
    l_tab.push(0.0);
    for k in 0..n {
        let a = lo + k as f64 * du;
        gacc += simpson(&gp, a);
        lacc += simpson(&lam, a);
        g_tab.push(gacc);
        l_tab.push(lacc);
    }
    Ok(QuasiStatParams {
        q_total,
        c_bern,
        b,
        grass: *p,
        u_lo: lo,
        du,
        g_tab,
        lam_int_tab: l_tab,
    })
}

#[derive(Debug, Clone)]
pub struct Type2Result {
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    pub zb: Vec<f64>,
    /// Set when the velocity gradient steepened tenfold (a shock is forming).
    pub shock_warning: bool,
    pub steps: usize,
}

fn max_gradient(u: &[f64], dx: f64) -> f64 {
    u.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs() / dx))
}

/// Evolves `u0` (cell averages) to `t_end` at CFL 0.45 and maps the result
/// back to `h` and `zb`.
pub fn type2_evolve(
    u0: &[f64],
    dx: f64,
    params: &QuasiStatParams,
    t_end: f64,
    bc: ScalarBc,
) -> Result<Type2Result> {
    let f = |u: f64| params.lambda_int(u).unwrap_or(f64::NAN);
    let df = |u: f64| params.lambda(u);
    let check = |u: &[f64]| -> Result<()> {
        for (i, &v) in u.iter().enumerate() {
            params
                .locate(v)
                .map_err(|e| SolverError::Reference(format!("cell {i}: {e}")))?;
        }
        Ok(())
    };
    let law = ScalarLaw {
        f: &f,
        df: &df,
        check: &check,
    };
    let upwind = u0.iter().all(|&u| params.lambda(u) >= 0.0);
    let kind = if upwind { ScalarFlux::Upwind } else { ScalarFlux::Rusanov };
    let (u, steps) = evolve_scalar(u0, dx, t_end, 0.45, bc, kind, &law)?;
    let g0 = max_gradient(u0, dx);
    let shock_warning = g0 > 0.0 && max_gradient(&u, dx) > 10.0 * g0;
    let h = u.iter().map(|&v| params.h_of_u(v)).collect();
    let zb = u.iter().map(|&v| params.zb_of_u(v)).collect::<Result<_>>()?;
    Ok(Type2Result {
        u,
        h,
        zb,
        shock_warning,
        steps,
    })
}
