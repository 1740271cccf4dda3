//! Explicit numerical fluxes, the Grass bedload closure and wave-speed
//! estimates for the coupled system.

use crate::GRAVITY;
use crate::error::{Result, SolverError};
use crate::grid::H_MIN;
use serde::{Deserialize, Serialize};

/// Grass bedload closure `q_b = xi A_g u |u|^(m_g - 1)` with `xi = 1/(1 - rho0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrassParams {
    pub a_g: f64,
    #[serde(default = "default_m_g")]
    pub m_g: f64,
    #[serde(default)]
    pub rho0: f64,
}

fn default_m_g() -> f64 {
    3.0
}

impl Default for GrassParams {
    fn default() -> Self {
        Self::disabled()
    }
}

impl GrassParams {
    pub fn new(a_g: f64, m_g: f64, rho0: f64) -> Self {
        Self { a_g, m_g, rho0 }
    }

    /// No sediment coupling.
    pub fn disabled() -> Self {
        Self::new(0.0, 3.0, 0.0)
    }

    pub fn xi_por(&self) -> f64 {
        1.0 / (1.0 - self.rho0)
    }

    /// `xi A_g`, the prefactor of the transport law.
    pub fn strength(&self) -> f64 {
        self.xi_por() * self.a_g
    }

    pub fn is_active(&self) -> bool {
        self.a_g != 0.0
    }

    /// `q_b` as a function of velocity.
    #[inline]
    pub fn qb_of_u(&self, u: f64) -> f64 {
        if u == 0.0 || self.a_g == 0.0 {
            return 0.0;
        }
        self.strength() * u * u.abs().powf(self.m_g - 1.0)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.a_g >= 0.0 && self.a_g < 1.0) {
            return Err(format!("A_g must lie in [0, 1), got {}", self.a_g));
        }
        if !(1.0..=4.0).contains(&self.m_g) {
            return Err(format!("m_g must lie in [1, 4], got {}", self.m_g));
        }
        if !(0.0..1.0).contains(&self.rho0) {
            return Err(format!("porosity must lie in [0, 1), got {}", self.rho0));
        }
        Ok(())
    }
}

#[inline]
fn wet(h: f64) -> Result<()> {
    if h > H_MIN {
        Ok(())
    } else {
        Err(SolverError::DryCell {
            index: 0,
            h,
            threshold: H_MIN,
        })
    }
}

/// Solid discharge for thickness `h` and discharge `q`.
pub fn grass_qb(h: f64, q: f64, p: &GrassParams) -> Result<f64> {
    wet(h)?;
    Ok(p.qb_of_u(q / h))
}

/// Rusanov flux of `q^2/h` with dissipation `max |u|` acting on `q`.
pub fn rusanov_momentum(h_minus: f64, q_minus: f64, h_plus: f64, q_plus: f64) -> Result<f64> {
    wet(h_minus)?;
    wet(h_plus)?;
    let (um, up) = (q_minus / h_minus, q_plus / h_plus);
    let alpha = um.abs().max(up.abs());
    Ok(0.5 * (q_plus * up + q_minus * um - alpha * (q_plus - q_minus)))
}

/// Reconstructed values on one side of an interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExnerSide {
    pub h: f64,
    pub q: f64,
    pub zb: f64,
    pub eta: f64,
}

/// Rusanov fluxes `(G_eta, G_zb)` of the bedload discharge, dissipating on
/// `eta` and `zb` respectively.
pub fn rusanov_exner(
    left: &ExnerSide,
    right: &ExnerSide,
    p: &GrassParams,
    alpha: f64,
) -> Result<(f64, f64)> {
    let qm = grass_qb(left.h, left.q, p)?;
    let qp = grass_qb(right.h, right.q, p)?;
    let avg = qp + qm;
    Ok((
        0.5 * (avg - alpha * (right.eta - left.eta)),
        0.5 * (avg - alpha * (right.zb - left.zb)),
    ))
}

/// `d q_b / d q` at fixed `h`.
pub fn grass_beta(h: f64, u: f64, p: &GrassParams) -> f64 {
    if p.a_g == 0.0 {
        return 0.0;
    }
    p.m_g * p.strength() * u.abs().powf(p.m_g - 1.0) / h
}

/// Floor on the bedload dissipation coefficient.
pub const ALPHA_FLOOR: f64 = 1e-12;

/// Dissipation speed for the bedload fluxes: `|beta u / (1 - Fr^2)|` floored
/// at [`ALPHA_FLOOR`]. Near-critical states fall back to the floor-free
/// celerity bound.
pub fn sediment_speed(h: f64, u: f64, p: &GrassParams) -> f64 {
    let c2 = GRAVITY * h;
    let gap = 1.0 - u * u / c2;
    let beta = grass_beta(h, u, p);
    if gap.abs() < 1e-6 {
        return (u.abs() + c2.sqrt()).max(ALPHA_FLOOR);
    }
    (beta * u / gap).abs().max(ALPHA_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    #[default]
    DeVries,
    Macca,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub method: EigenMethod,
}

impl EigenTriple {
    pub fn spectral_radius(&self) -> f64 {
        self.lambda1.abs().max(self.lambda2.abs()).max(self.lambda3.abs())
    }

    pub fn sorted(&self) -> [f64; 3] {
        let mut v = [self.lambda1, self.lambda2, self.lambda3];
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Characteristic polynomial of the coupled system.
pub fn char_poly(lambda: f64, h: f64, u: f64, p: &GrassParams) -> f64 {
    let gh = GRAVITY * h;
    let beta = grass_beta(h, u, p);
    -lambda * ((u - lambda).powi(2) - gh) + gh * beta * (lambda - u)
}

/// Wave speeds of the coupled system at state `(h, u)`.
pub fn eigenvalues(h: f64, u: f64, p: &GrassParams, method: EigenMethod) -> Result<EigenTriple> {
    wet(h)?;
    let gh = GRAVITY * h;
    let c = gh.sqrt();
    let beta = grass_beta(h, u, p);
    let fr = u.abs() / c;
    if p.a_g == 0.0 {
        return Ok(EigenTriple {
            lambda1: u - c,
            lambda2: 0.0,
            lambda3: u + c,
            method,
        });
    }
    match method {
        EigenMethod::DeVries | EigenMethod::Macca => {
            let gap = 1.0 - fr * fr;
            if gap.abs() < 1e-6 {
                return Err(SolverError::NearCritical { gap: gap.abs() });
            }
            let l2 = beta * u / gap;
            if method == EigenMethod::DeVries {
                Ok(EigenTriple {
                    lambda1: u - c,
                    lambda2: l2,
                    lambda3: u + c,
                    method,
                })
            } else {
                let corr = beta * c / (2.0 * (1.0 - fr));
                Ok(EigenTriple {
                    lambda1: u - c - corr,
                    lambda2: l2,
                    lambda3: u + c + corr,
                    method,
                })
            }
        }
        EigenMethod::Exact => {
            // lambda^3 - 2u lambda^2 + (u^2 - gh - gh beta) lambda + gh beta u = 0
            let r = cubic_real_roots(-2.0 * u, u * u - gh - gh * beta, gh * beta * u)?;
            Ok(EigenTriple {
                lambda1: r[0],
                lambda2: r[1],
                lambda3: r[2],
                method,
            })
        }
    }
}

/// Three real roots of the monic cubic `x^3 + a x^2 + b x + c`, ascending.
pub fn cubic_real_roots(a: f64, b: f64, c: f64) -> Result<[f64; 3]> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let scale = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    if p >= 0.0 {
        if p.abs() <= 1e-14 * scale * scale && q.abs() <= 1e-14 * scale.powi(3) {
            return Ok([-shift; 3]);
        }
        return Err(SolverError::RootIsolation(format!(
            "cubic has complex roots (p = {p:e}, q = {q:e})"
        )));
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut r: [f64; 3] = std::array::from_fn(|k| {
        m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift
    });
    for x in r.iter_mut() {
        let f = ((*x + a) * *x + b) * *x + c;
        let df = (3.0 * *x + 2.0 * a) * *x + b;
        if df != 0.0 {
            let step = f / df;
            if step.is_finite() && step.abs() < 0.1 * scale {
                *x -= step;
            }
        }
    }
    r.sort_by(f64::total_cmp);
    Ok(r)
}
