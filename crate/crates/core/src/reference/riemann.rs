//! Shock states satisfying the jump conditions of the shallow-water system.

use crate::error::{Result, SolverError};

/// Left state `(h_L, q_L)` joined to `(h_r, q_r)` by a discontinuity moving
/// at speed `v`.
///
/// With the relative mass flux `m = q_r - v h_r` the momentum condition
/// factors as `(h_L - h_r) chi(h_L) = 0` where
/// `chi(h) = g (h + h_r) / 2 - m^2 / (h h_r)` is increasing in `h`. The
/// non-trivial root of `chi` is found by safeguarded Newton iteration.
pub fn riemann_left_state(h_r: f64, q_r: f64, v: f64, g: f64) -> Result<(f64, f64)> {
    if !(h_r > 0.0) {
        return Err(SolverError::Reference(format!("h_R must be positive, got {h_r}")));
    }
    let m = q_r - v * h_r;
    let chi = |h: f64| 0.5 * g * (h + h_r) - m * m / (h * h_r);
    let dchi = |h: f64| 0.5 * g + m * m / (h * h * h_r);

    // Bracket a sign change of chi on (0, inf).
    let mut lo = h_r * 1e-6;
    let mut hi = h_r;
    let mut grow = 0;
    while chi(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(SolverError::Reference("no sign change in bracket".into()));
        }
    }
    if chi(lo) > 0.0 {
        return Err(SolverError::Reference(format!(
            "no admissible left state: chi > 0 on the whole bracket (m = {m})"
        )));
    }

    let mut h = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = chi(h);
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let newton = h - f / dchi(h);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - h).abs() <= 1e-15 * h.abs() {
            h = next;
            break;
        }
        h = next;
    }
    Ok((h, q_r + v * (h - h_r)))
}

/// Residuals `(-v[h] + [q], -v[q] + [q^2/h + g h^2/2])` of the jump
/// conditions between two states.
pub fn rh_residuals(left: (f64, f64), right: (f64, f64), v: f64, g: f64) -> (f64, f64) {
    let flux = |(h, q): (f64, f64)| q * q / h + 0.5 * g * h * h;
    (
        -v * (left.0 - right.0) + (left.1 - right.1),
        -v * (left.1 - right.1) + flux(left) - flux(right),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GRAVITY;

    #[test]
    fn shock_from_test_case() {
        let (h_r, q_r) = (0.6, 0.2);
        let v = q_r / h_r + (GRAVITY * h_r).sqrt() + 0.1;
        let (h_l, q_l) = riemann_left_state(h_r, q_r, v, GRAVITY).unwrap();
        let (r1, r2) = rh_residuals((h_l, q_l), (h_r, q_r), v, GRAVITY);
        assert!(r1.abs() <= 1e-12 && r2.abs() <= 1e-12, "{r1} {r2}");
        assert!(h_l > h_r);
    }

    #[test]
    fn zero_mass_flux_has_no_root() {
        // v = u_R gives m = 0: only the trivial state solves the relations
        assert!(riemann_left_state(1.0, 1.0, 1.0, GRAVITY).is_err());
    }
}
