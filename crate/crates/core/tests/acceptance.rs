//! Acceptance report. Prints one `PASS`/`FAIL` line per criterion with the
//! measured values. Exits non-zero on any failure only when
//! `XBOUSS_ACCEPTANCE_STRICT=1`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xbouss_core::corrector::{forcing_f, jet_v1, transport_pair, InitialData, DEFAULT_QUADRATURE_TOL};
use xbouss_core::oplab::{random_smooth, symmetry_defect, OperatorContext};
use xbouss_core::refwaves::{boussinesq_solitary, gn_profile, rescale_profile, sech2};
use xbouss_core::residuals::{sweep, ResidualConfig, SweepResult};
use xbouss_core::solitary::{solve_profile_with, OdeModel, SolitaryProfile, SolverOptions};
use xbouss_core::stencil::fd_weights;
use xbouss_core::{Grid1D, ModelParams};

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn report(id: usize, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn fd(g: impl Fn(f64) -> f64, x0: f64, h: f64, order: usize, half: i32) -> f64 {
    let nodes: Vec<f64> = (-half..=half).map(|j| j as f64 * h).collect();
    let w = fd_weights(0.0, &nodes, order);
    nodes.iter().zip(&w).map(|(s, w)| w * g(x0 + s)).sum()
}

// published residues: (eps, R1 l2, R2 l2, R1 inf, R2 inf)
const TABLE: [(f64, f64, f64, f64, f64); 5] = [
    (1e-1, 2.70e-2, 3.80e-3, 4.30e-3, 4.81e-4),
    (1e-2, 2.58e-5, 2.96e-6, 4.17e-6, 4.10e-7),
    (1e-3, 2.57e-8, 2.89e-9, 4.16e-9, 4.12e-10),
    (1e-4, 2.57e-11, 2.88e-12, 4.16e-12, 4.13e-13),
    (1e-5, 2.58e-14, 2.90e-15, 4.33e-15, 5.22e-16),
];

fn residual_sweep() -> (SweepResult, f64) {
    let config = ResidualConfig {
        workers: TABLE.len(),
        ..ResidualConfig::default()
    };
    let eps: Vec<f64> = TABLE.iter().map(|r| r.0).collect();
    let start = Instant::now();
    let result = sweep(&eps, &config).expect("residual sweep");
    (result, start.elapsed().as_secs_f64())
}

fn criterion_1(sw: &SweepResult, seconds: f64) -> Outcome {
    let mut pass = seconds <= 60.0;
    let mut parts = Vec::new();
    for r in sw.reports.iter().filter(|r| (1e-4..=1e-2).contains(&r.epsilon)) {
        let e3 = r.epsilon.powi(3);
        let (q1, q2) = (r.r1_l2 / e3, r.r2_l2 / e3);
        pass &= (20.0..=35.0).contains(&q1) && (2.0..=4.0).contains(&q2);
        parts.push(format!("eps={:.0e} R1/eps^3={q1:.2} R2/eps^3={q2:.3e}", r.epsilon));
    }
    report(1, pass, format!("{} time={seconds:.2}s", parts.join("; ")))
}

fn criterion_2(sw: &SweepResult) -> Outcome {
    let s = sw.slopes;
    let all = [s.r1_l2, s.r2_l2, s.r1_inf, s.r2_inf];
    let pass = all.iter().all(|v| v.is_some_and(|v| (v - 3.0).abs() <= 0.1));
    let f = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    report(
        2,
        pass,
        format!(
            "slopes r1_l2={} r2_l2={} r1_inf={} r2_inf={} over {} points",
            f(s.r1_l2),
            f(s.r2_l2),
            f(s.r1_inf),
            f(s.r2_inf),
            s.points
        ),
    )
}

fn criterion_3(sw: &SweepResult) -> Outcome {
    let mut pass = true;
    let mut worst = [1.0f64; 4];
    for (row, r) in TABLE.iter().zip(&sw.reports) {
        if row.0 < 1e-4 {
            continue;
        }
        let ours = [r.r1_l2, r.r2_l2, r.r1_inf, r.r2_inf];
        let theirs = [row.1, row.2, row.3, row.4];
        for j in 0..4 {
            let factor = (ours[j] / theirs[j]).max(theirs[j] / ours[j]);
            worst[j] = worst[j].max(factor);
            pass &= factor <= 5.0;
        }
    }
    report(
        3,
        pass,
        format!(
            "worst factor vs published r1_l2={:.2} r2_l2={:.1} r1_inf={:.2} r2_inf={:.1}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in [1.025, 1.01, 1.002] {
        let params = ModelParams::traveling(1.0, c).unwrap();
        let opts = SolverOptions {
            model: OdeModel::GreenNaghdi,
            ..SolverOptions::default()
        };
        let start = Instant::now();
        let err = match solve_profile_with(&params, &opts) {
            Ok(p) => p
                .grid
                .points()
                .iter()
                .zip(&p.zeta)
                .map(|(&x, z)| (z - gn_profile(&params, x).unwrap()).abs())
                .fold(0.0, f64::max),
            Err(e) => {
                parts.push(format!("c={c} error: {e}"));
                pass = false;
                continue;
            }
        };
        let secs = start.elapsed().as_secs_f64();
        pass &= err <= 1e-6 && secs <= 10.0;
        parts.push(format!("c={c} max_err={err:.2e} time={secs:.3}s"));
    }
    report(4, pass, parts.join("; "))
}

fn criterion_5(profile: &SolitaryProfile) -> Outcome {
    let (xs, zs) = rescale_profile(&profile.zeta, &profile.params, &profile.grid).unwrap();
    let mid = zs.len() / 2;
    let z0 = zs[mid];
    let dist = xs
        .iter()
        .zip(&zs)
        .map(|(x, z)| (z - sech2(*x)).abs())
        .fold(0.0, f64::max);
    report(
        5,
        (z0 - 1.0).abs() <= 0.01 && dist <= 0.02,
        format!("c=1.002 |Z(0)-1|={:.3e} max|Z-sech2|={dist:.3e}", (z0 - 1.0).abs()),
    )
}

fn criterion_6(profiles: &[SolitaryProfile]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in profiles {
        let r = p.max_ode_residual();
        let ratio = r / p.solver_tol;
        pass &= ratio <= 100.0;
        parts.push(format!("c={} {ratio:.2e}", p.params.celerity()));
    }
    report(6, pass, format!("max residual / tol: {}", parts.join(" ")))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let params = ModelParams::from_alpha(0.1, 1.0).unwrap();
    let data = InitialData::gaussian();
    let pair = |t: f64, x: f64| transport_pair(&params, t, x, &data, DEFAULT_QUADRATURE_TOL).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = rng.gen_range(0.3..3.0);
        let x = rng.gen_range(-8.0..8.0);
        let h = 1e-2;
        let zt = fd(|s| pair(s, x).0, t, h, 1, 4);
        let vt = fd(|s| pair(s, x).1, t, h, 1, 4);
        let zx = fd(|y| pair(t, y).0, x, h, 1, 4);
        let vx = fd(|y| pair(t, y).1, x, h, 1, 4);
        worst = worst
            .max((zt + vx).abs())
            .max((vt + zx - forcing_f(&params, t, x)).abs());
    }
    report(
        7,
        worst <= 1e-6,
        format!("max transport residual {worst:.2e} at 50 points"),
    )
}

fn criterion_8() -> Outcome {
    let grid = Grid1D::new(-20.0, 20.0, 256, true).unwrap();
    let zeta = grid.sample(|x| 0.8 * sech2(0.5 * x) - 0.3 * (-(x - 5.0f64).powi(2)).exp());
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut round, mut sym) = (0.0f64, 0.0f64);
    for eps in [1e-1, 1e-2, 1e-3] {
        let ctx = OperatorContext::new(grid, eps, &zeta).unwrap();
        for _ in 0..100 {
            let w = random_smooth(&grid, 24, &mut rng);
            let back = ctx.invert(&ctx.apply(&w).unwrap(), 1e-13).unwrap().solution;
            let num: f64 = back.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum();
            let den: f64 = w.iter().map(|b| b * b).sum();
            round = round.max((num / den).sqrt());
            let u = random_smooth(&grid, 24, &mut rng);
            sym = sym.max(symmetry_defect(&ctx, &u, &w).unwrap());
        }
    }
    report(
        8,
        round <= 1e-10 && sym <= 1e-11,
        format!("max round trip {round:.2e}, max symmetry defect {sym:.2e}"),
    )
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = g(a) + g(b);
    for i in 1..panels {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let params = ModelParams::from_alpha(0.1, 1.0).unwrap();
    let v1 = |t: f64, y: f64| boussinesq_solitary(&params, t, y).1;
    let mut jet_err = 0.0f64;
    for _ in 0..20 {
        let t = rng.gen_range(0.0..2.0);
        let x = rng.gen_range(-8.0..8.0);
        let j = jet_v1(&params, t, x);
        for m in 1..=4 {
            let est = fd(|y| v1(t, y), x, 0.08, m, 10);
            jet_err = jet_err.max((est - j.v1.derivative(m)).abs());
        }
        // the fifth derivative is checked by differencing the fourth
        let est = fd(|y| jet_v1(&params, t, y).v1.derivative(4), x, 0.05, 1, 10);
        jet_err = jet_err.max((est - j.v1.derivative(5)).abs());
        let est = fd(|s| v1(s, x), t, 0.02, 1, 4);
        jet_err = jet_err.max((est - j.v1_t.value()).abs());
    }
    let data = InitialData::gaussian();
    let mut quad_err = 0.0f64;
    for _ in 0..5 {
        let t = rng.gen_range(0.2..3.0);
        let x = rng.gen_range(-6.0..6.0);
        let (z2, v2) = transport_pair(&params, t, x, &data, DEFAULT_QUADRATURE_TOL).unwrap();
        let right = simpson(|s| forcing_f(&params, s, x - t + s), 0.0, t, 100_000);
        let left = simpson(|s| forcing_f(&params, s, x + t - s), 0.0, t, 100_000);
        let plus = data.zeta0(x - t) + data.v0(x - t);
        let minus = data.zeta0(x + t) - data.v0(x + t);
        quad_err = quad_err
            .max((z2 - 0.5 * (plus + minus + right - left)).abs())
            .max((v2 - 0.5 * (plus - minus + right + left)).abs());
    }
    report(
        9,
        jet_err <= 1e-8 && quad_err <= 1e-9,
        format!("jets vs FD {jet_err:.2e} at 20 points, quadrature vs Simpson {quad_err:.2e}"),
    )
}

fn main() {
    let mut outcomes = Vec::new();

    let (sw, secs) = residual_sweep();
    outcomes.push(criterion_1(&sw, secs));
    outcomes.push(criterion_2(&sw));
    outcomes.push(criterion_3(&sw));
    outcomes.push(criterion_4());

    let mut profiles = Vec::new();
    for c in [1.025, 1.02, 1.015, 1.01, 1.006, 1.002] {
        let params = ModelParams::traveling(1.0, c).unwrap();
        profiles.push(solve_profile_with(&params, &SolverOptions::default()).expect("solitary profile"));
    }
    outcomes.push(criterion_5(profiles.last().unwrap()));
    outcomes.push(criterion_6(&profiles));
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    outcomes.push(criterion_9());

    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {}: {tag} {}", o.id, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 && std::env::var("XBOUSS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
