//! Weak-coupling reduction: with frozen free surface `eta0` and discharge
//! `q0`, the sediment obeys
//! `zb_t + xi A_g (q0^m / (eta0 - zb)^m)_x = 0`.

use super::scalar::{ScalarBc, ScalarFlux, ScalarLaw, evolve_scalar};
use crate::error::{Result, SolverError};
use crate::fluxes::GrassParams;
use crate::grid::H_MIN;

/// Sediment flux of the reduced equation.
pub fn type1_flux(z: f64, eta0: f64, q0: f64, p: &GrassParams) -> f64 {
    p.strength() * (q0 / (eta0 - z)).powf(p.m_g)
}

/// Characteristic speed of the reduced equation.
pub fn type1_speed(z: f64, eta0: f64, q0: f64, p: &GrassParams) -> f64 {
    p.m_g * p.strength() * q0.powf(p.m_g) / (eta0 - z).powf(p.m_g + 1.0)
}

/// Evolves `z0` (cell averages, spacing `dx`) to `t_end` at CFL 0.9.
pub fn type1_evolve(
    z0: &[f64],
    dx: f64,
    eta0: f64,
    q0: f64,
    p: &GrassParams,
    t_end: f64,
    bc: ScalarBc,
) -> Result<Vec<f64>> {
    let f = |z: f64| type1_flux(z, eta0, q0, p);
    let df = |z: f64| type1_speed(z, eta0, q0, p);
    let check = |z: &[f64]| -> Result<()> {
        match z.iter().position(|&v| !(eta0 - v > H_MIN)) {
            Some(i) => Err(SolverError::DryCell {
                index: i,
                h: eta0 - z[i],
                threshold: H_MIN,
            }),
            None => Ok(()),
        }
    };
    let law = ScalarLaw {
        f: &f,
        df: &df,
        check: &check,
    };
    if !p.is_active() {
        check(z0)?;
        return Ok(z0.to_vec());
    }
    Ok(evolve_scalar(z0, dx, t_end, 0.9, bc, ScalarFlux::Rusanov, &law)?.0)
}
