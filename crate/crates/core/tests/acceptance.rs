use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sve_core::boundary::NG;
use sve_core::harness::catalog::load_case;
use sve_core::harness::{
    ReferenceSpec, RunConfig, RunOutcome, build_case, compare, convergence_study, error_norm, reference_fields,
    run_case,
};
use sve_core::pressure::{EllipticBoundary, assemble_elliptic, stencils_from_h};
use sve_core::reconstruct::CwenoParams;
use sve_core::reference::riemann_left_state;
use sve_core::timeint::{SchemeVariant, TimeScheme};
use sve_core::GRAVITY;

/// Criteria expected to fail at the catalog settings.
const KNOWN_FAILURES: &[&str] = &["C4"];

type Verdict = (bool, String);

fn case(name: &str) -> RunConfig {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog");
    load_case(&dir, name).unwrap()
}

fn run(cfg: &RunConfig) -> RunOutcome {
    run_case(cfg, None).unwrap()
}

fn max_dev(v: &[f64], r: &[f64]) -> f64 {
    v.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn in_band(x: Option<f64>, lo: f64, hi: f64) -> bool {
    x.is_some_and(|x| (lo..=hi).contains(&x))
}

fn c1() -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["wb_swe_flat", "wb_swe_nonflat", "wb_sve_sediment"] {
        let r = run(&case(name));
        let de = max_dev(&r.state.eta, &r.initial.eta);
        let dq = r.state.q.iter().fold(0.0f64, |m, q| m.max(q.abs()));
        ok &= de <= 1e-12 && dq <= 1e-12 && r.report.runtime_s < 5.0;
        detail.push(format!("{name}: eta {de:.1e} q {dq:.1e} {:.2}s", r.report.runtime_s));
    }
    (ok, detail.join("; "))
}

fn c2_c3() -> (Verdict, Verdict) {
    let levels = [100, 200, 400, 800];
    let reference = ReferenceSpec::FineGrid { n_cells: 3200 };
    let base = case("swe_flat_accuracy");
    let t0 = Instant::now();
    let simple = convergence_study(&base, &levels, reference, None).unwrap();
    let runtime = t0.elapsed().as_secs_f64();
    let mut full_cfg = base.clone();
    full_cfg.variant = SchemeVariant::FullyThirdOrder;
    let full = convergence_study(&full_cfg, &levels, reference, None).unwrap();

    let orders_ok = |r: &sve_core::harness::StudyReport| {
        ["eta", "q"]
            .iter()
            .all(|v| [400, 800].iter().all(|&n| in_band(r.order(v, n), 2.4, 3.6)))
    };
    let e800 = simple.error("eta", 800).unwrap();
    let mcfl = simple.runs.iter().map(|r| r.mcfl_max).fold(0.0, f64::max);
    let c2 = orders_ok(&simple) && (1.75e-3 / 3.0..=1.75e-3 * 3.0).contains(&e800) && mcfl <= 0.4 + 1e-12 && runtime < 120.0;
    let d2 = format!(
        "eta orders {:.2}/{:.2}, q orders {:.2}/{:.2}, eta err(800) {e800:.3e}, mcfl {mcfl:.3}, {runtime:.1}s",
        simple.order("eta", 400).unwrap_or(f64::NAN),
        simple.order("eta", 800).unwrap_or(f64::NAN),
        simple.order("q", 400).unwrap_or(f64::NAN),
        simple.order("q", 800).unwrap_or(f64::NAN),
    );

    let mut worst: f64 = 0.0;
    for v in ["eta", "q"] {
        for n in [100, 200, 400] {
            let (a, b) = (simple.error(v, n).unwrap(), full.error(v, n).unwrap());
            worst = worst.max((a - b).abs() / a);
        }
    }
    let c3 = orders_ok(&simple) && orders_ok(&full) && worst < 0.2;
    let d3 = format!(
        "full eta orders {:.2}/{:.2}, max per-level difference {:.1}%",
        full.order("eta", 400).unwrap_or(f64::NAN),
        full.order("eta", 800).unwrap_or(f64::NAN),
        100.0 * worst
    );
    ((c2, d2), (c3, d3))
}

fn c4() -> Verdict {
    let levels = [124, 248, 496, 992];
    let t0 = Instant::now();
    let r = convergence_study(&case("exner_accuracy"), &levels, ReferenceSpec::Richardson, None).unwrap();
    let runtime = t0.elapsed().as_secs_f64();
    let orders: Vec<Option<f64>> = ["eta", "q", "zb"].iter().map(|v| r.order(v, 992)).collect();
    let ok = orders.iter().all(|&o| in_band(o, 2.6, 3.4)) && runtime < 300.0;
    let fmt = |o: Option<f64>| o.map_or("-".into(), |o| format!("{o:.2}"));
    (
        ok,
        format!(
            "orders at 992: eta {} q {} zb {}, {runtime:.1}s",
            fmt(orders[0]),
            fmt(orders[1]),
            fmt(orders[2])
        ),
    )
}

fn c5() -> Verdict {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let params = CwenoParams::default();
    let mut worst_row: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    let n = 9;
    for trial in 0..1000 {
        let dx = rng.gen_range(0.01..10.0);
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let h: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(0.01..1.0)).collect();
        let mut h_ext = Vec::with_capacity(n + 2 * NG);
        for k in 0..n + 2 * NG {
            h_ext.push(h[(k + n - NG) % n]);
        }
        let st = stencils_from_h(&h_ext, NG, n + 1, dx, &params);
        for s in &st {
            worst_row = worst_row.max(s.row_sum().abs() / s.max_abs());
        }
        let theta = rng.gen_range(0.1..1.0) * dx;
        let bc = if trial % 2 == 0 {
            EllipticBoundary::periodic()
        } else {
            EllipticBoundary::outflow()
        };
        let sys = assemble_elliptic(&st, &vec![1.0; n], &vec![0.0; n + 1], theta, dx, GRAVITY, &bc).unwrap();
        worst_a = worst_a.max(max_dev(&sys.matvec(&vec![1.0; n]), &vec![1.0; n]));
    }
    let runtime = t0.elapsed().as_secs_f64();
    (
        worst_row <= 1e-13 && worst_a <= 1e-12 && runtime < 1.0,
        format!("10000 stencils, max |row sum|/max|xi| {worst_row:.1e}, max |A1-1| {worst_a:.1e}, {runtime:.3}s"),
    )
}

fn c6() -> Verdict {
    let cfg = case("riemann_exact");
    let r = run(&cfg);
    let (h_r, q_r) = (0.6, 0.2);
    let v = q_r / h_r + (GRAVITY * h_r).sqrt() + 0.1;
    let (h_l, q_l) = riemann_left_state(h_r, q_r, v, GRAVITY).unwrap();
    let t = cfg.t_end;
    let dx = r.grid.dx;
    let mass = |e: &[f64]| e.iter().sum::<f64>() * dx;
    let m0 = mass(&r.initial.eta);
    let mass_err = ((mass(&r.state.eta) - m0 - (q_l - q_r) * t) / m0).abs();

    let mid = 0.5 * (h_l + h_r);
    let e = &r.state.eta;
    let i = (0..e.len() - 1).find(|&i| e[i] >= mid && e[i + 1] < mid).unwrap();
    let (x0, x1) = (r.grid.center(i as isize), r.grid.center(i as isize + 1));
    let xs = x0 + (e[i] - mid) / (e[i] - e[i + 1]) * (x1 - x0);
    let speed_err = ((xs / t) - v).abs() / v;

    let plateau = r
        .state
        .q
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            let x = r.grid.interface(k as isize);
            x > cfg.domain[0] + 0.5 && x < xs - 0.5
        })
        .map(|(_, q)| (q - q_l).abs())
        .fold(0.0, f64::max);
    let q_err = plateau / (q_l - q_r).abs();
    (
        mass_err <= 1e-12 && speed_err < 0.02 && q_err > 0.0 && q_err < 0.05,
        format!(
            "mass {mass_err:.1e}, shock speed error {:.2}%, discharge error {:.2}% of jump",
            100.0 * speed_err,
            100.0 * q_err
        ),
    )
}

fn c7() -> Verdict {
    let cfg = case("ode_type");
    let imex = run(&cfg);
    let mut base = cfg.clone();
    base.time_scheme = TimeScheme::Explicit1;
    let first = run(&base);
    let (a, b) = (imex.report.error("zb").unwrap(), first.report.error("zb").unwrap());
    let runtime = imex.report.runtime_s;
    (
        a < 0.1 && a < b && runtime < 120.0,
        format!("zb error third order {a:.3e}, first order {b:.3e}, {runtime:.2}s"),
    )
}

fn c8() -> Verdict {
    let mut cfg = case("sediment_evolution");
    cfg.reference = ReferenceSpec::Type2;
    let r = run(&cfg);
    let e2 = r.report.error("zb").unwrap();
    let mut c1 = cfg.clone();
    c1.reference = ReferenceSpec::Type1;
    let built = build_case(&c1).unwrap();
    let ref1 = reference_fields(&c1, &built).unwrap().unwrap();
    let e1 = compare(&c1, &r.grid, &r.state, &ref1).unwrap()[0].1;
    let z1 = ref1.zb.as_ref().unwrap();
    let change = error_norm(&r.state.zb, z1, Some(&r.initial.zb), r.grid.dx).unwrap();
    let runtime = r.report.runtime_s;
    (
        e1 <= 0.03 && e2 <= 0.03 && runtime < 180.0,
        format!(
            "zb error vs type 2 {e2:.2e}, vs type 1 {e1:.2e} (relative to bed change {change:.2e}), {runtime:.1}s"
        ),
    )
}

fn c9() -> Verdict {
    let mut imex = case("exner_waves_w07");
    imex.t_end = 300.0;
    let mut expl = imex.clone();
    expl.time_scheme = TimeScheme::Explicit3;
    let mut free = imex.clone();
    free.sponge.clear();
    let mut big = free.clone();
    big.domain = [-200.0, 2237.5];
    big.n_cells = 3000;
    let runs: Vec<RunOutcome> = std::thread::scope(|s| {
        let hs: Vec<_> = [&imex, &expl, &free, &big].map(|c| s.spawn(move || run(c))).into_iter().collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let ratio = runs[1].report.steps as f64 / runs[0].report.steps as f64;
    let cells: Vec<usize> = (0..imex.n_cells).filter(|&i| runs[0].grid.center(i as isize) < 400.0).collect();
    let pick = |v: &[f64]| cells.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let target = pick(&runs[3].state.eta);
    let eq = vec![10.0; cells.len()];
    let err = |o: &RunOutcome| error_norm(&pick(&o.state.eta), &target, Some(&eq), o.grid.dx).unwrap();
    let (e_sponge, e_free) = (err(&runs[0]), err(&runs[2]));
    (
        ratio >= 5.0 && e_free >= 10.0 * e_sponge,
        format!(
            "steps imex {} explicit {} (x{ratio:.1}), reflection error free {e_free:.2e} sponge {e_sponge:.2e}",
            runs[0].report.steps, runs[1].report.steps
        ),
    )
}

fn c10() -> Verdict {
    let base = RunConfig::from_toml(
        r#"
model = "swe"
domain = [0.0, 10.0]
n_cells = 200
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
    .unwrap();
    let dts = [0.005, 0.0025, 0.00125, 0.000625];
    let runs: Vec<RunOutcome> = dts
        .iter()
        .map(|&dt| {
            let mut c = base.clone();
            c.fixed_dt = Some(dt);
            run(&c)
        })
        .collect();
    let diff = |a: &RunOutcome, b: &RunOutcome| {
        let e: f64 = a.state.eta.iter().zip(&b.state.eta).map(|(x, y)| (x - y).abs()).sum();
        let q: f64 = a.state.q.iter().zip(&b.state.q).map(|(x, y)| (x - y).abs()).sum();
        e + q
    };
    let d: Vec<f64> = runs.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    let orders: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let last = *orders.last().unwrap();
    (
        last >= 2.7,
        format!(
            "dt {:?}: orders {}",
            dts,
            orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    let mut results: Vec<(&str, Verdict)> = vec![("C1", c1())];
    let (r2, r3) = c2_c3();
    results.push(("C2", r2));
    results.push(("C3", r3));
    results.push(("C4", c4()));
    results.push(("C5", c5()));
    results.push(("C6", c6()));
    results.push(("C7", c7()));
    results.push(("C8", c8()));
    results.push(("C9", c9()));
    results.push(("C10", c10()));
    let mut unexpected = Vec::new();
    for (id, (ok, detail)) in &results {
        println!("{id} {} {detail}", if *ok { "PASS" } else { "FAIL" });
        if !ok && !KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    let passed = results.iter().filter(|(_, (ok, _))| *ok).count();
    println!("{passed}/{} passed, known failures {KNOWN_FAILURES:?}", results.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
