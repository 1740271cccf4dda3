//! Polynomial reconstructions on uniform cells.
//!
//! * CWENO(2,3): one central quadratic blended with two linear candidates.
//! * The cubic free-surface polynomial centred on an interface, matching four
//!   neighbouring cell averages.
//! * Third-order upwind interpolation of `h` to an interface.
//! * The third difference of dual-cell discharges.
//!
//! All routines work on plain average arrays and do not care whether the
//! cells are primal or dual.

/// Linear weights and regulariser of CWENO(2,3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwenoParams {
    pub d_l: f64,
    pub d_c: f64,
    pub d_r: f64,
    /// Added to the smoothness indicators before squaring.
    pub tau_eps: f64,
}

impl Default for CwenoParams {
    fn default() -> Self {
        Self {
            d_l: 0.25,
            d_c: 0.5,
            d_r: 0.25,
            tau_eps: 2.2204e-16,
        }
    }
}

impl CwenoParams {
    pub fn with_tau(tau_eps: f64) -> Self {
        Self {
            tau_eps,
            ..Self::default()
        }
    }
}

/// `a0 + a1 s + a2 s^2` with `s = x - x_i`, plus the nonlinear weights that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwenoPoly {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub omega_l: f64,
    pub omega_c: f64,
    pub omega_r: f64,
}

impl CwenoPoly {
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        self.a0 + s * (self.a1 + s * self.a2)
    }
}

/// CWENO(2,3) polynomial of the middle cell from three consecutive averages.
pub fn cweno_poly(w_left: f64, w_center: f64, w_right: f64, dx: f64, p: &CwenoParams) -> CwenoPoly {
    let (wl, wc, wr) = (w_left, w_center, w_right);
    let d_l_slope = wc - wl;
    let d_r_slope = wr - wc;
    let curv = wl - 2.0 * wc + wr;

    // Smoothness indicators. The linear candidates only contribute through
    // their first derivative.
    let is_l = d_l_slope * d_l_slope;
    let is_r = d_r_slope * d_r_slope;
    let slope_c = (0.5 * (wr - wl) - p.d_l * d_l_slope - p.d_r * d_r_slope) / p.d_c;
    let curv_c = curv / p.d_c;
    // P^C' = b + 2 c s with b dx = slope_c and c dx^2 = curv_c / 2.
    let is_c = slope_c * slope_c + (13.0 / 12.0) * curv_c * curv_c;

    let alpha_l = p.d_l / (is_l + p.tau_eps).powi(2);
    let alpha_c = p.d_c / (is_c + p.tau_eps).powi(2);
    let alpha_r = p.d_r / (is_r + p.tau_eps).powi(2);
    let sum = alpha_l + alpha_c + alpha_r;
    let (om_l, om_c, om_r) = if sum.is_finite() && sum > 0.0 {
        (alpha_l / sum, alpha_c / sum, alpha_r / sum)
    } else {
        // Overflow only happens when every indicator vanishes.
        (p.d_l, p.d_c, p.d_r)
    };

    let a2 = om_c / (2.0 * p.d_c * dx * dx) * curv;
    let a1 = om_l / dx * (wc - wl) - om_r / dx * (wc - wr)
        - om_c / (dx * p.d_c)
            * (0.5 * (wl - wr) + p.d_l * (wc - wl) - p.d_r * (wc - wr));
    let a0 = wc * om_l + wc * om_r
        - om_c / p.d_c * ((wl - 26.0 * wc + wr) / 24.0 + p.d_l * wc + p.d_r * wc);

    CwenoPoly {
        a0,
        a1,
        a2,
        omega_l: om_l,
        omega_c: om_c,
        omega_r: om_r,
    }
}

/// CWENO polynomials for every cell that has both neighbours; entry `j`
/// belongs to input cell `j + 1`.
pub fn cweno_polys(averages: &[f64], dx: f64, p: &CwenoParams) -> Vec<CwenoPoly> {
    averages
        .windows(3)
        .map(|w| cweno_poly(w[0], w[1], w[2], dx, p))
        .collect()
}

/// Edge values at the interfaces between reconstructable cells.
///
/// For an array with two ghost cells on each side and `m` interior cells
/// this returns `m + 1` pairs, one per interior-cell interface. `minus[j]` is
/// the left cell's polynomial at its right edge and `plus[j]` the right
/// cell's polynomial at its left edge.
pub fn cweno_edge_values(averages: &[f64], dx: f64, p: &CwenoParams) -> (Vec<f64>, Vec<f64>) {
    let polys = cweno_polys(averages, dx, p);
    let half = 0.5 * dx;
    polys
        .windows(2)
        .map(|w| (w[0].eval(half), w[1].eval(-half)))
        .unzip()
}

/// Coefficients `(b0, b1, b2, b3)` of the cubic
/// `b0 + b1 s + b2 (s^2 - dx^2/12) + b3 s^3` about the interface between
/// `eta_0` and `eta_p1`, matching the four cell averages.
#[inline]
pub fn eta_poly_coeffs(eta_m1: f64, eta_0: f64, eta_p1: f64, eta_p2: f64, dx: f64) -> [f64; 4] {
    [
        (-eta_m1 + 9.0 * eta_0 + 9.0 * eta_p1 - eta_p2) / 16.0,
        (eta_m1 - 15.0 * eta_0 + 15.0 * eta_p1 - eta_p2) / (12.0 * dx),
        (eta_m1 - eta_0 - eta_p1 + eta_p2) / (4.0 * dx * dx),
        (-eta_m1 + 3.0 * eta_0 - 3.0 * eta_p1 + eta_p2) / (6.0 * dx * dx * dx),
    ]
}

/// Evaluates the free-surface cubic at offset `s` from its interface.
#[inline]
pub fn eta_poly_eval(c: &[f64; 4], s: f64, dx: f64) -> f64 {
    c[0] + c[1] * s + c[2] * (s * s - dx * dx / 12.0) + c[3] * s * s * s
}

/// Derivative of the free-surface cubic at offset `s`.
#[inline]
pub fn eta_poly_slope(c: &[f64; 4], s: f64) -> f64 {
    c[1] + 2.0 * c[2] * s + 3.0 * c[3] * s * s
}

/// Upwind interface value of `h` between `h_0` and `h_p1`.
///
/// `q_nonnegative` selects the left-biased stencil `(h_m1, h_0, h_p1)`,
/// otherwise the right-biased `(h_0, h_p1, h_p2)`.
#[inline]
pub fn upwind_interface_h(h_m1: f64, h_0: f64, h_p1: f64, h_p2: f64, q_nonnegative: bool) -> f64 {
    if q_nonnegative {
        h_m1 + 1.5 * (h_0 - h_m1) + 0.375 * (h_p1 - 2.0 * h_0 + h_m1)
    } else {
        h_0 + 0.5 * (h_p1 - h_0) - 0.125 * (h_p2 - 2.0 * h_p1 + h_0)
    }
}

/// Third difference `q[i+3/2] - 3 q[i+1/2] + 3 q[i-1/2] - q[i-3/2]` from the
/// four dual values around a primal cell.
#[inline]
pub fn delta3(q_m32: f64, q_m12: f64, q_p12: f64, q_p32: f64) -> f64 {
    q_p32 - 3.0 * q_p12 + 3.0 * q_m12 - q_m32
}

/// Fourth-order average of a quantity over a cell shifted by half a cell,
/// from the four nearest averages on the other grid. This is `b0` of the
/// free-surface cubic and serves both primal-to-dual and dual-to-primal
/// transfers.
#[inline]
pub fn shifted_average(w_m1: f64, w_0: f64, w_p1: f64, w_p2: f64) -> f64 {
    (-w_m1 + 9.0 * w_0 + 9.0 * w_p1 - w_p2) / 16.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constant_data() {
        let p = cweno_poly(2.0, 2.0, 2.0, 0.3, &CwenoParams::default());
        assert!(close(p.a0, 2.0, 1e-15));
        assert_eq!(p.a1, 0.0);
        assert_eq!(p.a2, 0.0);
        assert!(close(p.omega_l + p.omega_c + p.omega_r, 1.0, 1e-14));
    }

    #[test]
    fn linear_data() {
        let p = cweno_poly(0.0, 1.0, 2.0, 1.0, &CwenoParams::default());
        assert!(close(p.a0, 1.0, 1e-15));
        assert!(close(p.a1, 1.0, 1e-15));
        assert!(close(p.a2, 0.0, 1e-15));
        // all candidates coincide, weights stay linear
        assert!(close(p.omega_c, 0.5, 1e-14));
    }

    #[test]
    fn edge_values_constant_and_linear() {
        let p = CwenoParams::default();
        let (m, pl) = cweno_edge_values(&[3.0; 8], 0.5, &p);
        assert_eq!(m.len(), 5);
        assert!(m.iter().chain(&pl).all(|&v| close(v, 3.0, 1e-14)));

        let lin: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let (m, pl) = cweno_edge_values(&lin, 1.0, &p);
        for (j, (a, b)) in m.iter().zip(&pl).enumerate() {
            let x = j as f64 + 1.5;
            assert!(close(*a, x, 1e-13), "{a} vs {x}");
            assert!(close(*b, x, 1e-13));
        }
    }

    #[test]
    fn eta_poly_examples() {
        assert_eq!(eta_poly_coeffs(1.0, 1.0, 1.0, 1.0, 0.7), [1.0, 0.0, 0.0, 0.0]);
        let c = eta_poly_coeffs(0.0, 1.0, 2.0, 3.0, 1.0);
        assert!(close(c[0], 1.5, 1e-15) && close(c[1], 1.0, 1e-15));
        assert!(close(c[2], 0.0, 1e-15) && close(c[3], 0.0, 1e-15));
        let c = eta_poly_coeffs(0.0, 0.0, 1.0, 1.0, 1.0);
        assert!(close(c[0], 0.5, 1e-15));
        assert!(close(c[1], 7.0 / 6.0, 1e-15));
        assert!(close(c[2], 0.0, 1e-15));
        assert!(close(c[3], -1.0 / 3.0, 1e-15));
    }

    #[test]
    fn upwind_examples() {
        assert_eq!(upwind_interface_h(1.0, 1.0, 1.0, 1.0, true), 1.0);
        assert_eq!(upwind_interface_h(1.0, 1.0, 1.0, 1.0, false), 1.0);
        assert!(close(upwind_interface_h(0.0, 1.0, 2.0, 3.0, true), 1.5, 1e-15));
        assert!(close(upwind_interface_h(0.0, 1.0, 2.0, 3.0, false), 1.5, 1e-15));
        assert!(close(upwind_interface_h(1.0, 2.0, 4.0, 8.0, false), 2.75, 1e-15));
    }

    #[test]
    fn delta3_examples() {
        assert_eq!(delta3(2.0, 2.0, 2.0, 2.0), 0.0);
        assert_eq!(delta3(0.0, 1.0, 2.0, 3.0), 0.0);
        assert_eq!(delta3(0.0, 1.0, 8.0, 27.0), 6.0);
    }

    #[test]
    fn step_suppresses_central_weight() {
        let p = CwenoParams::default();
        let data = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let polys = cweno_polys(&data, 1.0, &p);
        // cell 2 (index 1 in polys) sits left of the jump
        let left = polys[1];
        assert!(left.omega_c < 1e-10);
        assert!(left.omega_l > 0.99);
        let (m, pl) = cweno_edge_values(&data, 1.0, &p);
        let jump = (pl[1] - m[1]).abs();
        assert!(jump <= 1.0 + 1e-12);
    }
}
