use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use xbouss_core::corrector::CorrectedSolution;
use xbouss_core::oplab::{bound_probe, random_smooth, symmetry_defect, OperatorContext};
use xbouss_core::refwaves::{boussinesq_solitary, gn_profile, reference_profile, sech2, ReferenceKind};
use xbouss_core::residuals::{sweep, GridMeta, ResidualConfig};
use xbouss_core::solitary::{solve_profile_with, OdeModel, SolverOptions};
use xbouss_core::{Grid1D, ModelParams};

use crate::error::{usage, CliError};
use crate::output::{companion, emit, json_text, Cell, Format, Table};
use crate::{CompareArgs, CorrectorArgs, OpcheckArgs, ResidualsArgs, SolitaryArgs};

pub const WORKERS_ENV: &str = "XBOUSS_WORKERS";
const OPCHECK_SEED: u64 = 20_240_917;

/// Worker count from the environment, else the available parallelism.
pub fn workers() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(usage(format!("{WORKERS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker threads: {e}")))
}

fn grid_meta(g: &Grid1D) -> Value {
    serde_json::to_value(GridMeta::from(g)).expect("grid metadata")
}

fn model_name(m: OdeModel) -> &'static str {
    match m {
        OdeModel::Extended => "extended",
        OdeModel::GreenNaghdi => "green-naghdi",
    }
}

pub fn solitary(a: &SolitaryArgs) -> Result<(), CliError> {
    let params = ModelParams::traveling(a.eps, a.c)?;
    let model = if a.gn_mode {
        OdeModel::GreenNaghdi
    } else {
        OdeModel::Extended
    };
    let opts = SolverOptions {
        tol: a.tol,
        half_width: a.grid_half_width,
        points: a.grid_n,
        model,
        cross_check: false,
    };
    let p = solve_profile_with(&params, &opts)?;

    let mut t = Table::new("solitary", &["xi", "zeta", "v"]);
    t.meta("c", a.c)
        .meta("eps", a.eps)
        .meta("alpha", params.alpha())
        .meta("model", model_name(model))
        .meta("tol", a.tol)
        .meta("grid_n", a.grid_n)
        .meta("grid_half_width", p.grid.x_max())
        .meta("amplitude", p.amplitude)
        .meta("decay_rate", p.decay_rate)
        .meta("crest_slope", p.crest_slope)
        .meta("max_ode_residual", p.max_ode_residual());
    for (i, x) in p.grid.points().into_iter().enumerate() {
        t.push(vec![x.into(), p.zeta[i].into(), p.v[i].into()]);
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    emit(&t.render(format), a.output.out.as_deref())
}

pub fn compare(a: &CompareArgs, workers: usize) -> Result<(), CliError> {
    if a.c.is_empty() {
        return Err(usage("empty list of wave speeds"));
    }
    if !(a.grid_half_width > 0.0 && a.grid_half_width.is_finite()) {
        return Err(usage(format!(
            "grid half width must be positive, got {}",
            a.grid_half_width
        )));
    }
    let axis = Grid1D::symmetric(a.grid_half_width, a.grid_n, false)?;
    let xs = axis.points();
    let params: Vec<ModelParams> =
        a.c.iter()
            .map(|&c| ModelParams::traveling(a.eps, c))
            .collect::<Result<_, _>>()?;
    let opts = SolverOptions {
        tol: a.tol,
        ..SolverOptions::default()
    };
    let profiles = pool(workers)?.install(|| {
        params
            .par_iter()
            .map(|p| solve_profile_with(p, &opts))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut t = Table::new("compare", &["model", "c", "X", "Z"]);
    t.meta("c", a.c.clone())
        .meta("eps", a.eps)
        .meta("tol", a.tol)
        .meta("grid", grid_meta(&axis))
        .meta(
            "scaling",
            "X = x sqrt(3(c^2-1)/(4 c^2 eps)); Z = zeta / amplitude, amplitude (c^2-1)/eps for xB and GN, (c^2-1)/(eps c^2) for KdV and Boussinesq",
        );
    for (p, prof) in params.iter().zip(&profiles) {
        let c = p.celerity();
        let kappa = p.gn_wavenumber();
        let amp = p.gn_amplitude();
        for &xx in &xs {
            t.push(vec![
                "xB".into(),
                c.into(),
                xx.into(),
                (prof.sample(xx / kappa) / amp).into(),
            ]);
        }
        for &xx in &xs {
            t.push(vec![
                "GN".into(),
                c.into(),
                xx.into(),
                (gn_profile(p, xx / kappa)? / amp).into(),
            ]);
        }
        for kind in [ReferenceKind::KdV, ReferenceKind::StandardBoussinesq] {
            let own = kind.amplitude(p);
            for &xx in &xs {
                let z = reference_profile(kind, p, xx / kappa)? / own;
                t.push(vec![kind.label().into(), c.into(), xx.into(), z.into()]);
            }
        }
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    emit(&t.render(format), a.output.out.as_deref())
}

pub fn corrector(a: &CorrectorArgs, workers: usize) -> Result<(), CliError> {
    let params = ModelParams::from_alpha(a.eps, a.alpha)?;
    if !(a.tol > 0.0) {
        return Err(usage(format!("quadrature tolerance must be positive, got {}", a.tol)));
    }
    let sol = CorrectedSolution::new(params).with_quadrature_tol(a.tol);
    if !(0.0..=sol.max_time()).contains(&a.t) {
        return Err(usage(format!("time {} outside [0, {}]", a.t, sol.max_time())));
    }
    if !(a.grid_half_width > 0.0 && a.grid_half_width.is_finite()) {
        return Err(usage(format!(
            "grid half width must be positive, got {}",
            a.grid_half_width
        )));
    }
    let grid = Grid1D::symmetric(a.grid_half_width, a.grid_n, false)?;
    let xs = grid.points();
    let e2 = a.eps * a.eps;
    let rows = pool(workers)?.install(|| {
        xs.par_iter()
            .map(|&x| {
                let (z1, v1) = boussinesq_solitary(&params, a.t, x);
                let (z2, v2) = sol.corrector(a.t, x)?;
                Ok(vec![x, z1, v1, z2, v2, z1 + e2 * z2, v1 + e2 * v2])
            })
            .collect::<Result<Vec<_>, xbouss_core::Error>>()
    })?;

    let mut t = Table::new("corrector", &["x", "zeta1", "v1", "zeta2", "v2", "zeta", "v"]);
    t.meta("eps", a.eps)
        .meta("alpha", a.alpha)
        .meta("c", params.celerity())
        .meta("k", params.k())
        .meta("t", a.t)
        .meta("t_max", sol.max_time())
        .meta("tol", a.tol)
        .meta("initial_data", sol.initial_data.label())
        .meta("grid", grid_meta(&grid));
    for r in rows {
        t.push(r.into_iter().map(Cell::from).collect());
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    emit(&t.render(format), a.output.out.as_deref())
}

pub fn residuals(a: &ResidualsArgs, workers: usize) -> Result<(), CliError> {
    if a.eps.is_empty() {
        return Err(usage("empty epsilon list"));
    }
    if !(a.grid_half_width > 0.0 && a.grid_half_width.is_finite()) {
        return Err(usage(format!(
            "grid half width must be positive, got {}",
            a.grid_half_width
        )));
    }
    if !(a.tol > 0.0) {
        return Err(usage(format!("quadrature tolerance must be positive, got {}", a.tol)));
    }
    let grid = Grid1D::new(-a.grid_half_width, a.grid_half_width, a.grid_n, true)?;
    let config = ResidualConfig {
        t: a.t,
        alpha: a.alpha,
        grid,
        dt: a.dt,
        quadrature_tol: a.tol,
        workers,
        ..ResidualConfig::default()
    };
    let result = sweep(&a.eps, &config)?;

    let mut meta = Map::new();
    meta.insert("eps".into(), json!(a.eps));
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("t".into(), json!(a.t));
    meta.insert("grid".into(), grid_meta(&grid));
    meta.insert("dt".into(), json!(a.dt));
    meta.insert("tol".into(), json!(a.tol));
    meta.insert("initial_data".into(), json!(config.initial_data.label()));
    meta.insert("fit_range".into(), json!(config.fit_range));

    let mut table = Table::new("residuals", &["epsilon", "r1_l2", "r2_l2", "r1_inf", "r2_inf"]);
    let mut plot = Table::new(
        "residuals",
        &[
            "log10_eps",
            "log10_r1_l2",
            "log10_r2_l2",
            "log10_r1_inf",
            "log10_r2_inf",
            "log10_eps3",
        ],
    );
    for (k, v) in &meta {
        table.meta(k, v.clone());
        plot.meta(k, v.clone());
    }
    plot.meta("content", "plot data");
    for r in &result.reports {
        if r.discretization_warning {
            eprintln!(
                "xbouss: warning: eps = {:e} is discretisation-dominated (time-step sensitivity {:.3} / {:.3})",
                r.epsilon, r.r1_richardson, r.r2_richardson
            );
        }
        table.push(vec![
            r.epsilon.into(),
            r.r1_l2.into(),
            r.r2_l2.into(),
            r.r1_inf.into(),
            r.r2_inf.into(),
        ]);
        plot.push(
            [r.epsilon, r.r1_l2, r.r2_l2, r.r1_inf, r.r2_inf, r.epsilon.powi(3)]
                .iter()
                .map(|x| Cell::from(x.log10()))
                .collect(),
        );
    }

    let format = a.output.format.unwrap_or(Format::Csv);
    emit(&table.render(format), a.output.out.as_deref())?;
    if let Some(out) = &a.output.out {
        let mut summary = Map::new();
        let mut m = table.metadata.clone();
        m.insert("content".into(), json!("summary"));
        summary.insert("metadata".into(), Value::Object(m));
        summary.insert("slopes".into(), json!(result.slopes));
        summary.insert("reports".into(), json!(result.reports));
        emit(
            &json_text(&Value::Object(summary)),
            Some(&companion(out, ".summary.json")),
        )?;
        let plot_path = companion(out, &format!("_plot.{}", format.extension()));
        emit(&plot.render(format), Some(&plot_path))?;
    }
    Ok(())
}

fn bump(x: f64) -> f64 {
    0.8 * sech2(0.5 * x) - 0.3 * (-(x - 5.0) * (x - 5.0)).exp()
}

struct RoundTrip {
    h_min: f64,
    error: f64,
    symmetry: f64,
    iterations: usize,
}

fn round_trip(grid: &Grid1D, zeta: &[f64], eps: f64, a: &OpcheckArgs) -> Result<RoundTrip, CliError> {
    let ctx = OperatorContext::new(*grid, eps, zeta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(OPCHECK_SEED ^ eps.to_bits());
    let mut out = RoundTrip {
        h_min: ctx.h_min(),
        error: 0.0,
        symmetry: 0.0,
        iterations: 0,
    };
    for _ in 0..a.samples {
        let w = random_smooth(grid, 24, &mut rng);
        let inv = ctx.invert(&ctx.apply(&w)?, a.tol)?;
        let num: f64 = inv.solution.iter().zip(&w).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = w.iter().map(|y| y * y).sum();
        out.error = out.error.max((num / den).sqrt());
        out.iterations = out.iterations.max(inv.iterations);
        let u = random_smooth(grid, 24, &mut rng);
        out.symmetry = out.symmetry.max(symmetry_defect(&ctx, &u, &w)?);
    }
    Ok(out)
}

pub fn opcheck(a: &OpcheckArgs, workers: usize) -> Result<(), CliError> {
    if a.eps.is_empty() {
        return Err(usage("empty epsilon list"));
    }
    if a.samples == 0 {
        return Err(usage("at least one sample is needed"));
    }
    if !(a.tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {}", a.tol)));
    }
    if !(a.grid_half_width > 0.0 && a.grid_half_width.is_finite()) {
        return Err(usage(format!(
            "grid half width must be positive, got {}",
            a.grid_half_width
        )));
    }
    let grid = Grid1D::new(-a.grid_half_width, a.grid_half_width, a.grid_n, true)?;
    let zeta = grid.sample(bump);
    let trips = pool(workers)?.install(|| {
        a.eps
            .par_iter()
            .map(|&e| round_trip(&grid, &zeta, e, a))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let probes = bound_probe(&grid, &zeta, &a.eps, a.s, a.samples.min(20), OPCHECK_SEED)?;

    let mut by_eps: Vec<(f64, f64)> = probes.iter().map(|p| (p.epsilon, p.constant)).collect();
    by_eps.sort_by(|x, y| y.0.total_cmp(&x.0));
    let non_increasing = by_eps.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    let bounded = probes.iter().all(|p| p.constant.is_finite());
    let worst_trip = trips.iter().map(|r| r.error).fold(0.0, f64::max);
    let worst_sym = trips.iter().map(|r| r.symmetry).fold(0.0, f64::max);

    let mut t = Table::new(
        "opcheck",
        &[
            "epsilon",
            "h_min",
            "roundtrip_max",
            "symmetry_max",
            "iterations_max",
            "bound_value",
            "bound_first",
            "bound_second",
            "bound_constant",
        ],
    );
    t.meta("eps", a.eps.clone())
        .meta("s", a.s)
        .meta("tol", a.tol)
        .meta("samples", a.samples)
        .meta("bound_samples", a.samples.min(20))
        .meta("seed", OPCHECK_SEED)
        .meta("grid", grid_meta(&grid))
        .meta("surface", "0.8 sech^2(x/2) - 0.3 exp(-(x-5)^2)")
        .meta(
            "checks",
            json!({
                "roundtrip_max": worst_trip,
                "roundtrip_ok": worst_trip <= 1e-10,
                "symmetry_max": worst_sym,
                "symmetry_ok": worst_sym <= 1e-11,
                "bound_finite": bounded,
                "bound_non_increasing": non_increasing,
            }),
        );
    for (r, p) in trips.iter().zip(&probes) {
        t.push(vec![
            p.epsilon.into(),
            r.h_min.into(),
            r.error.into(),
            r.symmetry.into(),
            r.iterations.into(),
            p.value.into(),
            p.first.into(),
            p.second.into(),
            p.constant.into(),
        ]);
    }
    let format = a.output.format.unwrap_or(Format::Json);
    emit(&t.render(format), a.output.out.as_deref())
}
