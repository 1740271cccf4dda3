//! Second-order MUSCL finite volumes for scalar conservation laws
//! `u_t + f(u)_x = 0`, advanced with the two-stage SSP Runge–Kutta method.

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarBc {
    Periodic,
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFlux {
    /// Local Lax–Friedrichs.
    Rusanov,
    /// Upwinding for a non-decreasing flux.
    Upwind,
}

pub struct ScalarLaw<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub df: &'a dyn Fn(f64) -> f64,
    /// Rejects unphysical states; called after every stage.
    pub check: &'a dyn Fn(&[f64]) -> Result<()>,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

fn rhs(u: &[f64], dx: f64, bc: ScalarBc, kind: ScalarFlux, law: &ScalarLaw<'_>) -> Vec<f64> {
    let n = u.len();
    let ng = 2;
    let ext: Vec<f64> = (-(ng as isize)..(n + ng) as isize)
        .map(|i| match bc {
            ScalarBc::Periodic => u[i.rem_euclid(n as isize) as usize],
            ScalarBc::Outflow => u[i.clamp(0, n as isize - 1) as usize],
        })
        .collect();
    let slope: Vec<f64> = (1..ext.len() - 1)
        .map(|j| minmod(ext[j] - ext[j - 1], ext[j + 1] - ext[j]))
        .collect();
    // interface k (0..=n) sits between ext cells k+1 and k+2
    let flux: Vec<f64> = (0..=n)
        .map(|k| {
            let (l, r) = (k + 1, k + 2);
            let um = ext[l] + 0.5 * slope[l - 1];
            let up = ext[r] - 0.5 * slope[r - 1];
            match kind {
                ScalarFlux::Upwind => (law.f)(um),
                ScalarFlux::Rusanov => {
                    let a = (law.df)(um).abs().max((law.df)(up).abs());
                    0.5 * ((law.f)(um) + (law.f)(up) - a * (up - um))
                }
            }
        })
        .collect();
    (0..n).map(|i| -(flux[i + 1] - flux[i]) / dx).collect()
}

/// Evolves `u0` to `t_end` with time steps `cfl dx / max |f'(u)|`.
/// Returns the final field and the number of steps taken.
pub fn evolve_scalar(
    u0: &[f64],
    dx: f64,
    t_end: f64,
    cfl: f64,
    bc: ScalarBc,
    kind: ScalarFlux,
    law: &ScalarLaw<'_>,
) -> Result<(Vec<f64>, usize)> {
    (law.check)(u0)?;
    let mut u = u0.to_vec();
    let mut t = 0.0;
    let mut steps = 0;
    while t < t_end {
        let speed = u.iter().fold(0.0f64, |m, &v| m.max((law.df)(v).abs()));
        if speed == 0.0 {
            break;
        }
        if !speed.is_finite() {
            return Err(SolverError::Reference(format!("non-finite wave speed at t = {t}")));
        }
        let dt = (cfl * dx / speed).min(t_end - t);
        let k1 = rhs(&u, dx, bc, kind, law);
        let u1: Vec<f64> = u.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
        (law.check)(&u1)?;
        let k2 = rhs(&u1, dx, bc, kind, law);
        for i in 0..u.len() {
            u[i] = 0.5 * (u[i] + u1[i] + dt * k2[i]);
        }
        (law.check)(&u)?;
        t += dt;
        steps += 1;
    }
    Ok((u, steps))
}
