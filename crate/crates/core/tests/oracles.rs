//! Independent oracles for the worked examples.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sve_core::fluxes::GrassParams;
use sve_core::harness::{RunConfig, build_case, error_norm, reference_fields, restrict_primal};
use sve_core::pressure::{PentaSystem, pressure_term, solve_penta, xi_coeffs};
use sve_core::reconstruct::{CwenoParams, CwenoPoly, cweno_poly};
use sve_core::reference::scalar::ScalarBc;
use sve_core::reference::type1_evolve;
use sve_core::timeint::{Model, StepConfig, TimeScheme, step};

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

/// Gaussian elimination with partial pivoting on a dense copy.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn dense_of(bands: &[[f64; 5]], cyclic: bool) -> Vec<Vec<f64>> {
    let n = bands.len() as isize;
    let mut a = vec![vec![0.0; n as usize]; n as usize];
    for (i, row) in bands.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let c = i as isize + j as isize - 2;
            if (0..n).contains(&c) {
                a[i][c as usize] += v;
            } else if cyclic {
                a[i][c.rem_euclid(n) as usize] += v;
            }
        }
    }
    a
}

fn random_penta(rng: &mut StdRng, n: usize, cyclic: bool) -> PentaSystem {
    let bands = (0..n)
        .map(|i| {
            let mut row = [0.0; 5];
            for (j, v) in row.iter_mut().enumerate() {
                let c = i as isize + j as isize - 2;
                if j != 2 && (cyclic || (0..n as isize).contains(&c)) {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            row[2] = 4.5 + rng.gen_range(0.0..1.0);
            row
        })
        .collect();
    PentaSystem {
        bands,
        rhs: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        cyclic,
    }
}

#[test]
fn penta_solver_matches_dense_elimination() {
    let mut rng = StdRng::seed_from_u64(11);
    for (n, cyclic, tol) in [(6, false, 1e-12), (100, false, 1e-11), (6, true, 1e-12), (40, true, 1e-11)] {
        let sys = random_penta(&mut rng, n, cyclic);
        let x = solve_penta(&sys).unwrap();
        let r = dense_solve(dense_of(&sys.bands, cyclic), sys.rhs.clone());
        for (a, b) in x.iter().zip(&r) {
            assert!((a - b).abs() < tol, "n {n} cyclic {cyclic}: {a} vs {b}");
        }
    }
}

#[test]
fn initial_averages_match_adaptive_quadrature() {
    let cfg = RunConfig::from_toml(
        r#"
model = "swe"
domain = [-4.0, 6.0]
n_cells = 200
t_end = 1.0
[ic]
kind = "fields"
eta = { kind = "gaussian", base = 0.7, amp = 0.2, center = 1.0, rate = 3.0 }
"#,
    )
    .unwrap();
    let case = build_case(&cfg).unwrap();
    let f = |x: f64| 0.7 + 0.2 * (-3.0 * (x - 1.0) * (x - 1.0)).exp();
    let g = &case.grid;
    for (i, e) in case.state0.eta.iter().enumerate() {
        let x = g.center(i as isize);
        let r = simpson(&f, x - 0.5 * g.dx, x + 0.5 * g.dx, 1e-15) / g.dx;
        assert!((e - r).abs() < 1e-10, "cell {i}: {e} vs {r}");
    }
}

/// Blend of the optimal quadratic and two linear candidates, built from the
/// definitions of the candidates and the smoothness indicators.
fn cweno_oracle(wl: f64, wc: f64, wr: f64, dx: f64, p: &CwenoParams) -> [f64; 3] {
    let lin_l = [wc, (wc - wl) / dx, 0.0];
    let lin_r = [wc, (wr - wc) / dx, 0.0];
    let curv = wl - 2.0 * wc + wr;
    let opt = [wc - curv / 24.0, (wr - wl) / (2.0 * dx), curv / (2.0 * dx * dx)];
    let cen: Vec<f64> = (0..3).map(|k| (opt[k] - p.d_l * lin_l[k] - p.d_r * lin_r[k]) / p.d_c).collect();
    // sum over l of dx^(2l-1) times the integral of the squared l-th derivative
    let indicator = |c: &[f64]| dx * dx * c[1] * c[1] + 13.0 / 3.0 * c[2] * c[2] * dx.powi(4);
    let alpha = [
        p.d_l / (indicator(&lin_l) + p.tau_eps).powi(2),
        p.d_c / (indicator(&cen) + p.tau_eps).powi(2),
        p.d_r / (indicator(&lin_r) + p.tau_eps).powi(2),
    ];
    let s: f64 = alpha.iter().sum();
    std::array::from_fn(|k| (alpha[0] * lin_l[k] + alpha[1] * cen[k] + alpha[2] * lin_r[k]) / s)
}

#[test]
fn cweno_coefficients_match_definition() {
    let p = CwenoParams::default();
    let mut rng = StdRng::seed_from_u64(3);
    let mut cases = vec![(1.0, 2.0, 4.0, 1.0)];
    for _ in 0..200 {
        cases.push((rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.05..2.0)));
    }
    for (wl, wc, wr, dx) in cases {
        let c = cweno_poly(wl, wc, wr, dx, &p);
        let o = cweno_oracle(wl, wc, wr, dx, &p);
        let scale = 1.0 + wl.abs().max(wc.abs()).max(wr.abs());
        for (k, (a, b)) in [c.a0, c.a1 * dx, c.a2 * dx * dx].iter().zip([o[0], o[1] * dx, o[2] * dx * dx]).enumerate() {
            assert!((a - b).abs() < 1e-13 * scale, "({wl},{wc},{wr},{dx}) coeff {k}: {a} vs {b}");
        }
    }
}

/// Cubic about the interface matching four cell averages, by solving the
/// moment system directly.
fn eta_cubic(eta: &[f64; 4], dx: f64) -> Vec<f64> {
    let edges = [-2.0 * dx, -dx, 0.0, dx, 2.0 * dx];
    let a: Vec<Vec<f64>> = (0..4)
        .map(|c| {
            let (lo, hi) = (edges[c], edges[c + 1]);
            (0..4)
                .map(|p| (hi.powi(p + 1) - lo.powi(p + 1)) / ((p + 1) as f64 * dx))
                .collect()
        })
        .collect();
    dense_solve(a, eta.to_vec())
}

#[test]
fn pressure_term_matches_gauss_quadrature() {
    let mut rng = StdRng::seed_from_u64(5);
    let p = CwenoParams::default();
    let nodes = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    for _ in 0..500 {
        let dx = rng.gen_range(0.05..3.0);
        let h: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.1..2.0));
        let eta: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let (pl, pr): (CwenoPoly, CwenoPoly) = (cweno_poly(h[0], h[1], h[2], dx, &p), cweno_poly(h[1], h[2], h[3], dx, &p));
        let st = xi_coeffs(&pl, &pr, dx);
        let c = eta_cubic(&eta, dx);
        let slope = |s: f64| c[1] + 2.0 * c[2] * s + 3.0 * c[3] * s * s;
        let mut integral = 0.0;
        for t in nodes {
            // left half [-dx/2, 0] in the left cell, right half [0, dx/2] in the right cell
            let sl = -0.5 * dx + 0.5 * dx * t;
            integral += 0.25 * dx * pl.eval(sl + 0.5 * dx) * slope(sl);
            let sr = 0.5 * dx * t;
            integral += 0.25 * dx * pr.eval(sr - 0.5 * dx) * slope(sr);
        }
        let want = integral / dx;
        let got = pressure_term(&st, &eta);
        assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

fn smooth_periodic() -> RunConfig {
    RunConfig::from_toml(
        r#"
model = "swe"
domain = [0.0, 10.0]
n_cells = 100
t_end = 1.0
[ic]
kind = "fields"
eta = { kind = "gaussian", base = 1.0, amp = 0.1, center = 5.0, rate = 1.0 }
q = { kind = "constant", value = 0.2 }
[boundary]
left = { kind = "periodic" }
right = { kind = "periodic" }
"#,
    )
    .unwrap()
}

fn one_step_gap(a: TimeScheme, b: TimeScheme, dt: f64) -> f64 {
    let cfg = smooth_periodic();
    let case = build_case(&cfg).unwrap();
    let sc = StepConfig::new(&case.grid, &case.policy, Model::Swe);
    let x = step(&case.state0, dt, a, &sc).unwrap();
    let y = step(&case.state0, dt, b, &sc).unwrap();
    x.eta.iter().zip(&y.eta).chain(x.q.iter().zip(&y.q)).map(|(u, v)| (u - v).abs()).sum()
}

#[test]
fn one_step_agreement_shrinks_at_second_order() {
    for (a, b) in [
        (TimeScheme::ImexSsp3, TimeScheme::Explicit3),
        (TimeScheme::ImexSsp3, TimeScheme::Euler1),
    ] {
        let gaps: Vec<f64> = [2e-3, 1e-3, 5e-4].iter().map(|&dt| one_step_gap(a, b, dt)).collect();
        for w in gaps.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "{a:?} vs {b:?}: gaps {gaps:?}");
        }
    }
}

#[test]
fn small_bump_moves_at_linearized_speed() {
    let (eta0, q0) = (10.0, 10.0);
    let p = GrassParams::new(0.1, 3.0, 0.2);
    let (n, len, t) = (1000, 100.0, 400.0);
    let dx = len / n as f64;
    let x = |i: usize| (i as f64 + 0.5) * dx;
    let bump = |i: usize| 0.1 + 1e-3 * (-0.05 * (x(i) - 20.0).powi(2)).exp();
    let z0: Vec<f64> = (0..n).map(bump).collect();
    let z = type1_evolve(&z0, dx, eta0, q0, &p, t, ScalarBc::Outflow).unwrap();
    let centroid = |z: &[f64]| {
        let w: Vec<f64> = z.iter().map(|v| v - 0.1).collect();
        w.iter().enumerate().map(|(i, v)| x(i) * v).sum::<f64>() / w.iter().sum::<f64>()
    };
    let measured = (centroid(&z) - centroid(&z0)) / t;
    let h = eta0 - 0.1;
    let linear = 3.0 * p.xi_por() * p.a_g * q0.powi(3) / h.powi(4);
    assert!((measured - linear).abs() < 0.05 * linear, "{measured} vs {linear}");
}

#[test]
fn quasi_stationary_reference_self_refines() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/catalog/sediment_evolution.toml")).unwrap();
    let coarse = RunConfig::from_toml(&text).unwrap();
    let mut fine = coarse.clone();
    fine.n_cells = 4 * coarse.n_cells;
    let zb = |c: &RunConfig| {
        let case = build_case(c).unwrap();
        reference_fields(c, &case).unwrap().unwrap().zb.unwrap()
    };
    let zc = zb(&coarse);
    let zf = restrict_primal(&zb(&fine), coarse.n_cells).unwrap();
    let dx = (coarse.domain[1] - coarse.domain[0]) / coarse.n_cells as f64;
    let e = error_norm(&zc, &zf, None, dx).unwrap();
    assert!(e < 0.02, "{e}");
}
