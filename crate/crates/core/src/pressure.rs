//! Implicit pressure coupling on the staggered grid.
//!
//! The momentum update on dual slot `k` couples `q^{n+1}_k` to the four free
//! surface values of cells `k-2 ..= k+1` through the stencil weights
//! `xi_l + xi_r`. Substituting into the mass update gives one pentadiagonal
//! system per implicit solve.

use crate::error::{Result, SolverError};
use crate::reconstruct::{CwenoParams, CwenoPoly, cweno_poly};

/// Two-point Gauss offsets on each half of a dual cell, measured from the
/// left end of that half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConstants {
    pub zeta_quad: f64,
    pub tau_quad: f64,
}

impl QuadConstants {
    pub fn new(dx: f64) -> Self {
        let r = 3f64.sqrt() / 12.0;
        Self {
            zeta_quad: dx * (0.25 - r),
            tau_quad: dx * (0.25 + r),
        }
    }
}

/// Weights of the four free-surface values `eta_{k-2} ..= eta_{k+1}` in the
/// pressure integral of one dual cell, split by the half-cell they come from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PressureStencil {
    pub xi_l: [f64; 4],
    pub xi_r: [f64; 4],
}

impl PressureStencil {
    #[inline]
    pub fn combined(&self) -> [f64; 4] {
        std::array::from_fn(|j| self.xi_l[j] + self.xi_r[j])
    }

    pub fn row_sum(&self) -> f64 {
        self.combined().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.xi_l
            .iter()
            .chain(&self.xi_r)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Stencil of the dual cell between the primal cells whose `h`
/// reconstructions are `poly_left` and `poly_right`.
pub fn xi_coeffs(poly_left: &CwenoPoly, poly_right: &CwenoPoly, dx: f64) -> PressureStencil {
    let QuadConstants {
        zeta_quad: zeta,
        tau_quad: tau,
    } = QuadConstants::new(dx);
    let dx2 = dx * dx;
    let dx3 = dx2 * dx;
    let beta_p = |d: f64| d / (2.0 * dx2) + d * d / (2.0 * dx3);
    let beta_m = |d: f64| d / (2.0 * dx2) - d * d / (2.0 * dx3);
    let gamma_p = |d: f64| d / (2.0 * dx2) + 3.0 * d * d / (2.0 * dx3);
    let gamma_m = |d: f64| d / (2.0 * dx2) - 3.0 * d * d / (2.0 * dx3);
    let al = |d: f64| 0.25 * (poly_left.a0 + poly_left.a1 * d + poly_left.a2 * d * d);
    let ar = |d: f64| 0.25 * (poly_right.a0 - poly_right.a1 * d + poly_right.a2 * d * d);

    let (azl, atl, azr, atr) = (al(zeta), al(tau), ar(zeta), ar(tau));
    let c1 = 1.0 / (12.0 * dx);
    let c5 = 5.0 / (4.0 * dx);

    let xi_l = [
        azl * (c1 - beta_p(tau)) + atl * (c1 - beta_p(zeta)),
        azl * (-c5 + gamma_p(tau)) + atl * (-c5 + gamma_p(zeta)),
        azl * (c5 + gamma_m(tau)) + atl * (c5 + gamma_m(zeta)),
        azl * (-c1 - beta_m(tau)) + atl * (-c1 - beta_m(zeta)),
    ];
    let xi_r = [
        azr * (c1 + beta_m(tau)) + atr * (c1 + beta_m(zeta)),
        azr * (-c5 - gamma_m(tau)) + atr * (-c5 - gamma_m(zeta)),
        azr * (c5 - gamma_p(tau)) + atr * (c5 - gamma_p(zeta)),
        azr * (-c1 + beta_p(tau)) + atr * (-c1 + beta_p(zeta)),
    ];
    PressureStencil { xi_l, xi_r }
}

/// `sum_j (xi_l_j + xi_r_j) eta_j`, the discrete `(1/dx) ∫ h ∂x eta`.
///
/// Evaluated on differences to `eta4[1]`, which the zero row sum permits, so
/// a flat surface gives exactly zero.
#[inline]
pub fn pressure_term(stencil: &PressureStencil, eta4: &[f64]) -> f64 {
    let r = eta4[1];
    stencil
        .combined()
        .iter()
        .zip(eta4)
        .map(|(c, e)| c * (e - r))
        .sum()
}

/// Stencils for `n_slots` consecutive dual slots from ghost-extended `h`.
///
/// Slot `k` lies between extended cells `first + k - 1` and `first + k`.
pub fn stencils_from_h(
    h_ext: &[f64],
    first: usize,
    n_slots: usize,
    dx: f64,
    params: &CwenoParams,
) -> Vec<PressureStencil> {
    debug_assert!(first >= 2 && first + n_slots < h_ext.len());
    let poly = |c: usize| cweno_poly(h_ext[c - 1], h_ext[c], h_ext[c + 1], dx, params);
    let mut left = poly(first - 1);
    (0..n_slots)
        .map(|k| {
            let right = poly(first + k);
            let s = xi_coeffs(&left, &right, dx);
            left = right;
            s
        })
        .collect()
}

/// Pentadiagonal matrix plus right-hand side.
///
/// `bands[i][j]` multiplies unknown `i + j - 2`. When `cyclic` is set,
/// out-of-range columns wrap around; otherwise they must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PentaSystem {
    pub bands: Vec<[f64; 5]>,
    pub rhs: Vec<f64>,
    pub cyclic: bool,
}

impl PentaSystem {
    pub fn identity(rhs: Vec<f64>) -> Self {
        Self {
            bands: vec![[0.0, 0.0, 1.0, 0.0, 0.0]; rhs.len()],
            rhs,
            cyclic: false,
        }
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Column index of band `j` in row `i`, if it exists.
    fn column(&self, i: usize, j: usize) -> Option<usize> {
        let n = self.len() as isize;
        let c = i as isize + j as isize - 2;
        if (0..n).contains(&c) {
            Some(c as usize)
        } else if self.cyclic {
            Some(c.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                (0..5)
                    .filter_map(|j| self.column(i, j).map(|c| self.bands[i][j] * x[c]))
                    .sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..5 {
                if let Some(c) = self.column(i, j) {
                    a[i][c] += self.bands[i][j];
                }
            }
        }
        a
    }
}

/// Free-surface closure beyond one end of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaGhost {
    /// Ghost values equal the nearest interior unknown.
    Extrapolate,
    /// Known ghost values, innermost first.
    Prescribed([f64; 2]),
}

/// Closure of a boundary dual slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlotClosure {
    /// The slot obeys the implicit momentum update like interior slots.
    Free,
    /// The slot discharge is known at the new time level.
    Fixed(f64),
}

/// How the elliptic system is closed at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticBoundary {
    pub periodic: bool,
    pub left_eta: EtaGhost,
    pub right_eta: EtaGhost,
    pub left_slot: SlotClosure,
    pub right_slot: SlotClosure,
}

impl EllipticBoundary {
    pub fn periodic() -> Self {
        Self {
            periodic: true,
            left_eta: EtaGhost::Extrapolate,
            right_eta: EtaGhost::Extrapolate,
            left_slot: SlotClosure::Free,
            right_slot: SlotClosure::Free,
        }
    }

    pub fn outflow() -> Self {
        Self {
            periodic: false,
            ..Self::periodic()
        }
    }

    fn slot(&self, k: usize, n: usize) -> SlotClosure {
        if self.periodic {
            SlotClosure::Free
        } else if k == 0 {
            self.left_slot
        } else if k == n {
            self.right_slot
        } else {
            SlotClosure::Free
        }
    }
}

/// Where a (possibly ghost) free-surface index lands after closure.
enum EtaRef {
    Unknown(usize),
    Known(f64),
}

fn resolve_eta(c: isize, n: usize, bc: &EllipticBoundary) -> EtaRef {
    let ni = n as isize;
    if (0..ni).contains(&c) {
        return EtaRef::Unknown(c as usize);
    }
    if bc.periodic {
        return EtaRef::Unknown(c.rem_euclid(ni) as usize);
    }
    if c < 0 {
        match bc.left_eta {
            EtaGhost::Extrapolate => EtaRef::Unknown(0),
            EtaGhost::Prescribed(v) => EtaRef::Known(v[(-c - 1) as usize]),
        }
    } else {
        match bc.right_eta {
            EtaGhost::Extrapolate => EtaRef::Unknown(n - 1),
            EtaGhost::Prescribed(v) => EtaRef::Known(v[(c - ni) as usize]),
        }
    }
}

/// Builds the system for the new free surface.
///
/// Row `i` reads
/// `eta_i - c (P_{i+1}(eta) - P_i(eta)) = e_i - (theta/dx)(qs_{i+1} - qs_i)`
/// with `c = theta^2 g / dx` and `P_k` the pressure term of slot `k`.
/// `stencils` and `q_star` cover slots `0 ..= n`, `e` covers the cells.
/// Fixed slots drop their pressure term and contribute their value instead.
pub fn assemble_elliptic(
    stencils: &[PressureStencil],
    e: &[f64],
    q_star: &[f64],
    theta: f64,
    dx: f64,
    g: f64,
    bc: &EllipticBoundary,
) -> Result<PentaSystem> {
    let n = e.len();
    if stencils.len() != n + 1 || q_star.len() != n + 1 {
        return Err(SolverError::Assembly(format!(
            "expected {} slots, got {} stencils and {} discharges",
            n + 1,
            stencils.len(),
            q_star.len()
        )));
    }
    if bc.periodic && n < 5 {
        return Err(SolverError::Assembly("periodic system too small".into()));
    }
    let coef = theta * theta * g / dx;
    let mut bands = vec![[0.0; 5]; n];
    let mut rhs = e.to_vec();
    let mut wrapped = false;

    for i in 0..n {
        bands[i][2] += 1.0;
        // slot i+1 enters with -coef, slot i with +coef
        for (k, sign) in [(i + 1, -1.0), (i, 1.0)] {
            match bc.slot(k, n) {
                SlotClosure::Fixed(v) => rhs[i] += sign * theta / dx * v,
                SlotClosure::Free => {
                    rhs[i] += sign * theta / dx * q_star[k];
                    let w = stencils[k].combined();
                    for (j, wj) in w.iter().enumerate() {
                        let c = k as isize - 2 + j as isize;
                        let a = sign * coef * wj;
                        match resolve_eta(c, n, bc) {
                            EtaRef::Known(v) => rhs[i] -= a * v,
                            EtaRef::Unknown(col) => {
                                let off = col as isize - i as isize;
                                let off = if (-2..=2).contains(&off) {
                                    off
                                } else {
                                    wrapped = true;
                                    // wrapped neighbour in a periodic system
                                    let ni = n as isize;
                                    if off > 0 { off - ni } else { off + ni }
                                };
                                if !(-2..=2).contains(&off) {
                                    return Err(SolverError::Assembly(format!(
                                        "row {i} couples to column {col} outside the band"
                                    )));
                                }
                                bands[i][(off + 2) as usize] += a;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PentaSystem {
        bands,
        rhs,
        cyclic: wrapped || bc.periodic,
    })
}

/// Free surface on cells `-2 ..= n+1` under the given closure.
pub fn extend_eta(eta: &[f64], bc: &EllipticBoundary) -> Vec<f64> {
    let n = eta.len();
    (-2..n as isize + 2)
        .map(|c| match resolve_eta(c, n, bc) {
            EtaRef::Unknown(j) => eta[j],
            EtaRef::Known(v) => v,
        })
        .collect()
}

/// New discharges `q_k = qs_k - theta g P_k(eta)` on slots `0 ..= n`.
pub fn recover_q(
    stencils: &[PressureStencil],
    eta_new: &[f64],
    q_star: &[f64],
    theta: f64,
    g: f64,
    bc: &EllipticBoundary,
) -> Vec<f64> {
    let n = eta_new.len();
    let ext = extend_eta(eta_new, bc);
    (0..=n)
        .map(|k| match bc.slot(k, n) {
            SlotClosure::Fixed(v) => v,
            SlotClosure::Free => q_star[k] - theta * g * pressure_term(&stencils[k], &ext[k..k + 4]),
        })
        .collect()
}

/// Pressure terms `P_k(eta)` on slots `0 ..= n` under the given closure.
pub fn pressure_terms(stencils: &[PressureStencil], eta: &[f64], bc: &EllipticBoundary) -> Vec<f64> {
    let ext = extend_eta(eta, bc);
    (0..=eta.len())
        .map(|k| pressure_term(&stencils[k], &ext[k..k + 4]))
        .collect()
}

const PIVOT_TOL: f64 = 1e-14;

/// Banded Gaussian elimination without pivoting on a non-cyclic system.
fn solve_banded(bands: &[[f64; 5]], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    // Row i holds columns i-2..=i+2; after elimination only i..=i+2 remain.
    let mut u: Vec<[f64; 5]> = bands.to_vec();
    let mut y = rhs.to_vec();
    let scale = bands
        .iter()
        .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect::<Vec<_>>();

    for i in 0..n {
        let piv = u[i][2];
        if !(piv.abs() >= PIVOT_TOL * scale[i]) || piv == 0.0 {
            return Err(SolverError::SingularSystem {
                row: i,
                pivot: piv,
                scale: scale[i],
            });
        }
        for d in 1..=2 {
            let r = i + d;
            if r >= n {
                break;
            }
            // entry of row r in column i sits at band 2 - d
            let f = u[r][2 - d] / piv;
            if f == 0.0 {
                continue;
            }
            u[r][2 - d] = 0.0;
            for j in 3..5 {
                // column i + (j - 2) in row r is band j - d
                u[r][j - d] -= f * u[i][j];
            }
            y[r] -= f * y[i];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in 3..5 {
            let c = i + j - 2;
            if c < n {
                s -= u[i][j] * x[c];
            }
        }
        x[i] = s / u[i][2];
    }
    Ok(x)
}

/// Small dense solve with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap_or(col);
        let scale = a[col].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if a[p][col].abs() < PIVOT_TOL * scale {
            return Err(SolverError::SingularSystem {
                row: col,
                pivot: a[p][col],
                scale,
            });
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| a[i][c] * x[c]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

/// Direct O(n) solve of a pentadiagonal system.
///
/// Cyclic systems are split into the banded part plus a rank-4 corner
/// correction and solved with the Woodbury identity.
pub fn solve_penta(system: &PentaSystem) -> Result<Vec<f64>> {
    let n = system.len();
    if system.bands.len() != n {
        return Err(SolverError::Assembly("band/rhs length mismatch".into()));
    }
    if !system.cyclic {
        return solve_banded(&system.bands, &system.rhs);
    }
    if n < 5 {
        return solve_dense(system.to_dense(), system.rhs.clone());
    }

    // B = banded part; corner entries live in rows/cols {0, 1, n-2, n-1}.
    let corner = [0, 1, n - 2, n - 1];
    let mut bands = system.bands.clone();
    let mut c_rows = [[0.0; 4]; 4]; // c_rows[a][b]: row corner[a], col corner[b]
    for (a, &i) in corner.iter().enumerate() {
        for j in 0..5 {
            let c = i as isize + j as isize - 2;
            if c < 0 || c >= n as isize {
                let col = c.rem_euclid(n as isize) as usize;
                let b = corner.iter().position(|&x| x == col).expect("corner column");
                c_rows[a][b] += bands[i][j];
                bands[i][j] = 0.0;
            }
        }
    }
    let y = solve_banded(&bands, &system.rhs)?;
    let z: Vec<Vec<f64>> = corner
        .iter()
        .map(|&i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            solve_banded(&bands, &e)
        })
        .collect::<Result<_>>()?;
    // A = B + U C with U = [e_corner] and C = c_rows applied to corner columns.
    // A^{-1} r = y - Z (I + C Z)^{-1} C y, where Z = B^{-1} U.
    let cz: Vec<Vec<f64>> = (0..4)
        .map(|a| {
            (0..4)
                .map(|b| {
                    let s: f64 = (0..4).map(|m| c_rows[a][m] * z[b][corner[m]]).sum();
                    s + if a == b { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let cy: Vec<f64> = (0..4)
        .map(|a| (0..4).map(|m| c_rows[a][m] * y[corner[m]]).sum())
        .collect();
    let w = solve_dense(cz, cy)?;
    Ok((0..n)
        .map(|i| y[i] - (0..4).map(|b| z[b][i] * w[b]).sum::<f64>())
        .collect())
}
