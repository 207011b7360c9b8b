//! Differential operators of the extended Boussinesq system and the residues
//! of both equations along the corrected solution.

use serde::Serialize;

use crate::corrector::{background_jets, CorrectedSolution, InitialData, DEFAULT_QUADRATURE_TOL};
use crate::error::{Error, Result};
use crate::grid::{check_depth, discrete_norm, Differentiator, Grid1D, Norm};
use crate::params::ModelParams;

/// Pointwise `T[zeta] w = -(1/(3h)) d_x((1 + 3 eps zeta) w_x)`, expanded.
pub fn t_kernel(eps: f64, zeta: f64, zeta_x: f64, w_x: f64, w_xx: f64) -> f64 {
    let h = 1.0 + eps * zeta;
    -(3.0 * eps * zeta_x * w_x + (1.0 + 3.0 * eps * zeta) * w_xx) / (3.0 * h)
}

/// Pointwise `Q v = -(1/3) d_x(v v_xx - v_x^2) = -(1/3)(v v_xxx - v_x v_xx)`.
pub fn q_kernel(v: f64, v_x: f64, v_xx: f64, v_xxx: f64) -> f64 {
    -(v * v_xxx - v_x * v_xx) / 3.0
}

/// `T[zeta] w` on a grid, in divergence form.
pub fn op_t(zeta: &[f64], w: &[f64], grid: &Grid1D, eps: f64) -> Result<Vec<f64>> {
    check_depth(grid, eps, zeta)?;
    let d = Differentiator::new(*grid);
    let w_x = d.derivative(w, 1)?;
    let flux: Vec<f64> = zeta
        .iter()
        .zip(&w_x)
        .map(|(z, wx)| (1.0 + 3.0 * eps * z) * wx)
        .collect();
    let div = d.derivative(&flux, 1)?;
    Ok(zeta
        .iter()
        .zip(&div)
        .map(|(z, g)| -g / (3.0 * (1.0 + eps * z)))
        .collect())
}

/// `-(1/45) d_x^4 w`.
pub fn op_frak_t(w: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    let d4 = Differentiator::new(*grid).derivative(w, 4)?;
    Ok(d4.iter().map(|x| -x / 45.0).collect())
}

/// `-(1/3) d_x(v v_xx - v_x^2)`.
pub fn op_q(v: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    let d = Differentiator::new(*grid);
    let v_x = d.derivative(v, 1)?;
    let v_xx = d.derivative(v, 2)?;
    let inner: Vec<f64> = (0..v.len()).map(|i| v[i] * v_xx[i] - v_x[i] * v_x[i]).collect();
    Ok(d.derivative(&inner, 1)?.iter().map(|g| -g / 3.0).collect())
}

/// Local values needed by both residues; `w = d_t v`.
#[derive(Debug, Clone, Copy, Default)]
struct Local {
    z: f64,
    z_x: f64,
    z_t: f64,
    v: f64,
    v_x: f64,
    v_xx: f64,
    v_xxx: f64,
    w: f64,
    w_x: f64,
    w_xx: f64,
    w_xxxx: f64,
}

impl Local {
    fn plus_scaled(self, s: f64, o: &Local) -> Local {
        Local {
            z: self.z + s * o.z,
            z_x: self.z_x + s * o.z_x,
            z_t: self.z_t + s * o.z_t,
            v: self.v + s * o.v,
            v_x: self.v_x + s * o.v_x,
            v_xx: self.v_xx + s * o.v_xx,
            v_xxx: self.v_xxx + s * o.v_xxx,
            w: self.w + s * o.w,
            w_x: self.w_x + s * o.w_x,
            w_xx: self.w_xx + s * o.w_xx,
            w_xxxx: self.w_xxxx + s * o.w_xxxx,
        }
    }

    fn r1(&self, eps: f64) -> f64 {
        self.z_t + self.v_x + eps * (self.z_x * self.v + self.z * self.v_x)
    }

    fn r2(&self, eps: f64) -> f64 {
        self.w + eps * t_kernel(eps, self.z, self.z_x, self.w_x, self.w_xx) - eps * eps / 45.0 * self.w_xxxx
            + self.z_x
            + eps * self.v * self.v_x
            + eps * eps * q_kernel(self.v, self.v_x, self.v_xx, self.v_xxx)
    }
}

/// Grid samples of the fields and derivatives that make up `Local`.
struct Sampled {
    z: Vec<f64>,
    z_x: Vec<f64>,
    z_t: Vec<f64>,
    v: Vec<f64>,
    v_x: Vec<f64>,
    v_xx: Vec<f64>,
    v_xxx: Vec<f64>,
    w: Vec<f64>,
    w_x: Vec<f64>,
    w_xx: Vec<f64>,
    w_xxxx: Vec<f64>,
}

impl Sampled {
    fn new(d: &Differentiator, z: Vec<f64>, v: Vec<f64>, z_t: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        Ok(Self {
            z_x: d.derivative(&z, 1)?,
            v_x: d.derivative(&v, 1)?,
            v_xx: d.derivative(&v, 2)?,
            v_xxx: d.derivative(&v, 3)?,
            w_x: d.derivative(&w, 1)?,
            w_xx: d.derivative(&w, 2)?,
            w_xxxx: d.derivative(&w, 4)?,
            z,
            v,
            z_t,
            w,
        })
    }

    fn at(&self, i: usize) -> Local {
        Local {
            z: self.z[i],
            z_x: self.z_x[i],
            z_t: self.z_t[i],
            v: self.v[i],
            v_x: self.v_x[i],
            v_xx: self.v_xx[i],
            v_xxx: self.v_xxx[i],
            w: self.w[i],
            w_x: self.w_x[i],
            w_xx: self.w_xx[i],
            w_xxxx: self.w_xxxx[i],
        }
    }
}

fn background(params: &ModelParams, t: f64, x: f64) -> Local {
    let (z, v) = background_jets(params, t, x);
    let c = params.celerity();
    Local {
        z: z.value(),
        z_x: z.derivative(1),
        z_t: -c * z.derivative(1),
        v: v.value(),
        v_x: v.derivative(1),
        v_xx: v.derivative(2),
        v_xxx: v.derivative(3),
        w: -c * v.derivative(1),
        w_x: -c * v.derivative(2),
        w_xx: -c * v.derivative(3),
        w_xxxx: -c * v.derivative(5),
    }
}

fn centred(samples: &[Vec<f64>; 4], dt: f64, fourth: bool) -> Vec<f64> {
    let [m2, m1, p1, p2] = samples;
    (0..m1.len())
        .map(|i| {
            if fourth {
                (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * dt)
            } else {
                (p1[i] - m1[i]) / (2.0 * dt)
            }
        })
        .collect()
}

/// Residue samples on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualFields {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    /// The same residues with second-order time differences.
    pub r1_low: Vec<f64>,
    pub r2_low: Vec<f64>,
    /// Second residue of `(zeta_1, v_1)` alone, when a background exists.
    pub r2_background: Option<Vec<f64>>,
}

fn check_step(t: f64, dt: f64, t_max: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    if t - 2.0 * dt < 0.0 {
        return Err(Error::Parameter(format!(
            "time {t} too small for centred differences with step {dt} (need t - 2 dt >= 0)"
        )));
    }
    if t + 2.0 * dt > t_max {
        return Err(Error::Parameter(format!(
            "time {t} + 2 dt exceeds the admissible horizon {t_max}"
        )));
    }
    Ok(())
}

/// Residues of the corrected solution at time `t`.
///
/// Background terms come from exact jets; only the corrector is
/// differentiated numerically (centred differences in time, grid
/// derivatives in space).
pub fn residual_pair(sol: &CorrectedSolution, t: f64, grid: &Grid1D, dt: f64) -> Result<ResidualFields> {
    check_step(t, dt, sol.max_time())?;
    let eps = sol.params.epsilon();
    let xs = grid.points();
    let d = Differentiator::new(*grid);
    let (z2, v2) = sol.corrector_field(t, &xs)?;
    let mut zs: [Vec<f64>; 4] = Default::default();
    let mut vs: [Vec<f64>; 4] = Default::default();
    for (k, s) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
        let (z, v) = sol.corrector_field(t + s * dt, &xs)?;
        zs[k] = z;
        vs[k] = v;
    }
    let high = Sampled::new(
        &d,
        z2.clone(),
        v2.clone(),
        centred(&zs, dt, true),
        centred(&vs, dt, true),
    )?;
    let low = Sampled::new(&d, z2, v2, centred(&zs, dt, false), centred(&vs, dt, false))?;
    let e2 = eps * eps;
    let n = xs.len();
    let mut out = ResidualFields {
        r1: Vec::with_capacity(n),
        r2: Vec::with_capacity(n),
        r1_low: Vec::with_capacity(n),
        r2_low: Vec::with_capacity(n),
        r2_background: Some(Vec::with_capacity(n)),
    };
    let mut depth = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let bg = background(&sol.params, t, x);
        let hi = bg.plus_scaled(e2, &high.at(i));
        let lo = bg.plus_scaled(e2, &low.at(i));
        depth.push(hi.z);
        out.r1.push(hi.r1(eps));
        out.r2.push(hi.r2(eps));
        out.r1_low.push(lo.r1(eps));
        out.r2_low.push(lo.r2(eps));
        if let Some(b) = out.r2_background.as_mut() {
            b.push(bg.r2(eps));
        }
    }
    check_depth(grid, eps, &depth)?;
    Ok(out)
}

/// Residues of an arbitrary field `t -> (zeta, v)` sampled on `grid`, with
/// every derivative taken numerically.
pub fn residual_pair_sampled<F>(field: F, eps: f64, t: f64, grid: &Grid1D, dt: f64) -> Result<ResidualFields>
where
    F: Fn(f64) -> Result<(Vec<f64>, Vec<f64>)>,
{
    check_step(t, dt, f64::INFINITY)?;
    let d = Differentiator::new(*grid);
    let (z, v) = field(t)?;
    check_depth(grid, eps, &z)?;
    let mut zs: [Vec<f64>; 4] = Default::default();
    let mut vs: [Vec<f64>; 4] = Default::default();
    for (k, s) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
        let (a, b) = field(t + s * dt)?;
        zs[k] = a;
        vs[k] = b;
    }
    let high = Sampled::new(&d, z.clone(), v.clone(), centred(&zs, dt, true), centred(&vs, dt, true))?;
    let low = Sampled::new(&d, z, v, centred(&zs, dt, false), centred(&vs, dt, false))?;
    let n = grid.len();
    Ok(ResidualFields {
        r1: (0..n).map(|i| high.at(i).r1(eps)).collect(),
        r2: (0..n).map(|i| high.at(i).r2(eps)).collect(),
        r1_low: (0..n).map(|i| low.at(i).r1(eps)).collect(),
        r2_low: (0..n).map(|i| low.at(i).r2(eps)).collect(),
        r2_background: None,
    })
}

/// Relative change of a residue when the time differences drop to second
/// order, above which the residue is flagged as discretisation-dominated.
pub const RICHARDSON_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub periodic: bool,
}

impl From<&Grid1D> for GridMeta {
    fn from(g: &Grid1D) -> Self {
        Self {
            x_min: g.x_min(),
            x_max: g.x_max(),
            n: g.len(),
            periodic: g.is_periodic(),
        }
    }
}

/// Norms of both residues at one `eps`. The `l2` columns are plain vector
/// norms `sqrt(sum r_i^2)`; `l2_weighted` carries the `sqrt(dx)` factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub epsilon: f64,
    pub t_eval: f64,
    pub r1_l2: f64,
    pub r2_l2: f64,
    pub r1_inf: f64,
    pub r2_inf: f64,
    pub r1_l2_weighted: f64,
    pub r2_l2_weighted: f64,
    pub r2_background_l2: Option<f64>,
    pub r2_background_inf: Option<f64>,
    pub r1_richardson: f64,
    pub r2_richardson: f64,
    pub discretization_warning: bool,
    pub grid: GridMeta,
    pub dt: f64,
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

impl ResidualReport {
    pub fn from_fields(fields: &ResidualFields, epsilon: f64, t_eval: f64, grid: &Grid1D, dt: f64) -> Result<Self> {
        let dx = grid.dx();
        let r1_richardson = relative_change(&fields.r1, &fields.r1_low);
        let r2_richardson = relative_change(&fields.r2, &fields.r2_low);
        let (bg_l2, bg_inf) = match &fields.r2_background {
            Some(b) => (
                Some(discrete_norm(b, dx, Norm::L2Unweighted)?),
                Some(discrete_norm(b, dx, Norm::Inf)?),
            ),
            None => (None, None),
        };
        Ok(Self {
            epsilon,
            t_eval,
            r1_l2: discrete_norm(&fields.r1, dx, Norm::L2Unweighted)?,
            r2_l2: discrete_norm(&fields.r2, dx, Norm::L2Unweighted)?,
            r1_inf: discrete_norm(&fields.r1, dx, Norm::Inf)?,
            r2_inf: discrete_norm(&fields.r2, dx, Norm::Inf)?,
            r1_l2_weighted: discrete_norm(&fields.r1, dx, Norm::L2)?,
            r2_l2_weighted: discrete_norm(&fields.r2, dx, Norm::L2)?,
            r2_background_l2: bg_l2,
            r2_background_inf: bg_inf,
            r1_richardson,
            r2_richardson,
            discretization_warning: r1_richardson > RICHARDSON_LIMIT || r2_richardson > RICHARDSON_LIMIT,
            grid: grid.into(),
            dt,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ResidualConfig {
    pub t: f64,
    pub alpha: f64,
    pub grid: Grid1D,
    pub dt: f64,
    pub quadrature_tol: f64,
    pub initial_data: InitialData,
    /// Threads used by `sweep`; 0 or 1 runs serially.
    pub workers: usize,
    /// Range of `eps` entering the slope fit.
    pub fit_range: (f64, f64),
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            alpha: 1.0,
            grid: Grid1D::new(-50.0, 50.0, 4096, true).expect("default grid"),
            dt: 1e-3,
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
            initial_data: InitialData::gaussian(),
            workers: 1,
            fit_range: (1e-4, 1e-1),
        }
    }
}

impl ResidualConfig {
    pub fn solution(&self, epsilon: f64) -> Result<CorrectedSolution> {
        let params = ModelParams::from_alpha(epsilon, self.alpha)?;
        Ok(CorrectedSolution::new(params)
            .with_initial_data(self.initial_data.clone())
            .with_quadrature_tol(self.quadrature_tol))
    }
}

pub fn residual_report(epsilon: f64, config: &ResidualConfig) -> Result<ResidualReport> {
    let sol = config.solution(epsilon)?;
    let fields = residual_pair(&sol, config.t, &config.grid, config.dt)?;
    ResidualReport::from_fields(&fields, epsilon, config.t, &config.grid, config.dt)
}

/// Least-squares slopes of `log ||R||` against `log eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slopes {
    pub r1_l2: Option<f64>,
    pub r2_l2: Option<f64>,
    pub r1_inf: Option<f64>,
    pub r2_inf: Option<f64>,
    /// Reports inside the fit range.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub reports: Vec<ResidualReport>,
    pub slopes: Slopes,
    pub fit_range: (f64, f64),
}

/// Slope of the least-squares line through `(ln x, ln y)`; needs three
/// points with positive `y`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 3 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn slopes(reports: &[ResidualReport], range: (f64, f64)) -> Slopes {
    let inside: Vec<&ResidualReport> = reports
        .iter()
        .filter(|r| r.epsilon >= range.0 * (1.0 - 1e-12) && r.epsilon <= range.1 * (1.0 + 1e-12))
        .collect();
    let fit = |g: fn(&ResidualReport) -> f64| {
        let pts: Vec<(f64, f64)> = inside.iter().map(|r| (r.epsilon, g(r))).collect();
        fit_slope(&pts)
    };
    Slopes {
        r1_l2: fit(|r| r.r1_l2),
        r2_l2: fit(|r| r.r2_l2),
        r1_inf: fit(|r| r.r1_inf),
        r2_inf: fit(|r| r.r2_inf),
        points: inside.len(),
    }
}

/// Residual reports for each `eps` (strictly decreasing) plus slope fits.
pub fn sweep(eps_list: &[f64], config: &ResidualConfig) -> Result<SweepResult> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty epsilon list".into()));
    }
    if eps_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Parameter("epsilon values must be strictly decreasing".into()));
    }
    let workers = config.workers.clamp(1, eps_list.len());
    let mut slots: Vec<Option<Result<ResidualReport>>> = vec![None; eps_list.len()];
    if workers == 1 {
        for (slot, &eps) in slots.iter_mut().zip(eps_list) {
            *slot = Some(residual_report(eps, config));
        }
    } else {
        std::thread::scope(|scope| {
            let chunk = eps_list.len().div_ceil(workers);
            for (eps_chunk, slot_chunk) in eps_list.chunks(chunk).zip(slots.chunks_mut(chunk)) {
                scope.spawn(move || {
                    for (slot, &eps) in slot_chunk.iter_mut().zip(eps_chunk) {
                        *slot = Some(residual_report(eps, config));
                    }
                });
            }
        });
    }
    let reports = slots
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect::<Result<Vec<_>>>()?;
    let slopes = slopes(&reports, config.fit_range);
    Ok(SweepResult {
        reports,
        slopes,
        fit_range: config.fit_range,
    })
}
