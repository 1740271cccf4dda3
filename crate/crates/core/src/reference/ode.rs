//! Separable time-dependent solution of the coupled system with `m_g = 3`.
//!
//! With `u_ini(x) = a x + b` and `zb_ini(x) = (3 xi A_g a / c) u_ini(x)^2`,
//! the field `(h(t), h(t) u_ini(x) u(t), zb_ini(x) z(t))` solves the PDE
//! whenever `(h, u, z)` solves a small ODE system starting from `(h0, 1, 1)`.

use crate::GRAVITY;
use crate::error::{Result, SolverError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeRefParams {
    pub h0: f64,
    pub a_lin: f64,
    pub b_lin: f64,
    pub c_coef: f64,
    pub a_g: f64,
    #[serde(default = "one")]
    pub xi_por: f64,
}

fn one() -> f64 {
    1.0
}

const BLOW_UP: f64 = 1e6;

impl OdeRefParams {
    pub fn u_ini(&self, x: f64) -> f64 {
        self.a_lin * x + self.b_lin
    }

    pub fn zb_ini(&self, x: f64) -> f64 {
        if self.c_coef == 0.0 {
            return 0.0;
        }
        let u = self.u_ini(x);
        3.0 * self.xi_por * self.a_g * self.a_lin / self.c_coef * u * u
    }

    fn coupling(&self) -> f64 {
        if self.c_coef == 0.0 {
            0.0
        } else {
            6.0 * GRAVITY * self.xi_por * self.a_g * self.a_lin * self.a_lin / self.c_coef
        }
    }

    /// Right-hand side of the ODE for `w = (h, u, z)`.
    pub fn rhs(&self, w: [f64; 3]) -> [f64; 3] {
        let [h, u, z] = w;
        [
            -self.a_lin * u * h,
            -self.a_lin * u * u - self.coupling() * z,
            -self.c_coef * u * u * u,
        ]
    }

    /// Default integration step: a thousandth of the fastest rate scale.
    pub fn default_step(&self) -> f64 {
        let rate = self
            .a_lin
            .abs()
            .max(self.c_coef.abs())
            .max(self.coupling().abs().sqrt())
            .max(1e-6);
        1e-3 / rate
    }

    /// Point values `(h, q, zb)` of the field at `x` given ODE state `w`.
    pub fn field(&self, x: f64, w: [f64; 3]) -> (f64, f64, f64) {
        let [h, u, z] = w;
        (h, h * self.u_ini(x) * u, self.zb_ini(x) * z)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.h0 > 0.0) {
            return Err(format!("h0 must be positive, got {}", self.h0));
        }
        if self.a_g != 0.0 && self.c_coef == 0.0 {
            return Err("c_coef must be nonzero when A_g > 0".into());
        }
        Ok(())
    }
}

fn rk4_step(p: &OdeRefParams, w: [f64; 3], dt: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], s: f64| std::array::from_fn(|i| a[i] + s * b[i]);
    let k1 = p.rhs(w);
    let k2 = p.rhs(add(w, k1, 0.5 * dt));
    let k3 = p.rhs(add(w, k2, 0.5 * dt));
    let k4 = p.rhs(add(w, k3, dt));
    std::array::from_fn(|i| w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn guard(w: [f64; 3], t: f64) -> Result<()> {
    if w.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
        return Err(SolverError::Reference(format!(
            "ODE solution blew up at t = {t}: {w:?}"
        )));
    }
    Ok(())
}

/// Integrates from `(h0, 1, 1)` to time `t` with fixed steps of at most
/// `max_step`.
pub fn rk4_integrate(p: &OdeRefParams, t: f64, max_step: f64) -> Result<[f64; 3]> {
    if t < 0.0 {
        return Err(SolverError::Reference(format!("negative time {t}")));
    }
    let mut w = [p.h0, 1.0, 1.0];
    if t == 0.0 {
        return Ok(w);
    }
    let n = (t / max_step).ceil().max(1.0) as usize;
    let dt = t / n as f64;
    for s in 0..n {
        w = rk4_step(p, w, dt);
        guard(w, s as f64 * dt)?;
    }
    Ok(w)
}

/// ODE state `(h, u, z)` at time `t` using the default step.
pub fn ode_ref_solution(t: f64, p: &OdeRefParams) -> Result<[f64; 3]> {
    rk4_integrate(p, t, p.default_step())
}

/// Precomputed trajectory on `[0, t_max]` with cubic Hermite interpolation
/// between stored samples.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub params: OdeRefParams,
    sample_dt: f64,
    samples: Vec<[f64; 3]>,
}

impl OdeTrajectory {
    pub fn new(params: OdeRefParams, t_max: f64) -> Result<Self> {
        let step = params.default_step();
        let sub = 100usize;
        let sample_dt = step * sub as f64;
        let n = (t_max / sample_dt).ceil().max(1.0) as usize + 1;
        let mut samples = Vec::with_capacity(n + 1);
        let mut w = [params.h0, 1.0, 1.0];
        samples.push(w);
        let h = sample_dt / sub as f64;
        for s in 0..n {
            for _ in 0..sub {
                w = rk4_step(&params, w, h);
            }
            guard(w, (s + 1) as f64 * sample_dt)?;
            samples.push(w);
        }
        Ok(Self {
            params,
            sample_dt,
            samples,
        })
    }

    pub fn t_max(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.sample_dt
    }

    pub fn at(&self, t: f64) -> Result<[f64; 3]> {
        if !(0.0..=self.t_max()).contains(&t) {
            return Err(SolverError::Reference(format!(
                "time {t} outside the tabulated range [0, {}]",
                self.t_max()
            )));
        }
        let s = (t / self.sample_dt).floor() as usize;
        let s = s.min(self.samples.len() - 2);
        let theta = t / self.sample_dt - s as f64;
        let (w0, w1) = (self.samples[s], self.samples[s + 1]);
        let (d0, d1) = (self.params.rhs(w0), self.params.rhs(w1));
        let hd = self.sample_dt;
        let h00 = (1.0 + 2.0 * theta) * (1.0 - theta).powi(2);
        let h10 = theta * (1.0 - theta).powi(2);
        let h01 = theta * theta * (3.0 - 2.0 * theta);
        let h11 = theta * theta * (theta - 1.0);
        Ok(std::array::from_fn(|i| {
            h00 * w0[i] + h10 * hd * d0[i] + h01 * w1[i] + h11 * hd * d1[i]
        }))
    }

    /// Point values `(h, q, zb)` at `(x, t)`.
    pub fn field(&self, x: f64, t: f64) -> Result<(f64, f64, f64)> {
        Ok(self.params.field(x, self.at(t)?))
    }
}
