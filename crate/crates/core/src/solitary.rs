//! Solitary waves of the extended Boussinesq system.
//!
//! A traveling wave `zeta(x - c t)` satisfies a third-order ODE, singular at
//! the crest where `zeta' = 0`, and its derivative, a regular fourth-order ODE.
//! Profiles are built from the tail: the decaying linear mode is followed
//! back to the crest on the fourth-order form. Shooting from the crest on the
//! third-order form gives an independent amplitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::ode::{DormandPrince, StopReason};
use crate::params::ModelParams;
use crate::stencil::FdOperator;

/// `|zeta'|` below which the third-order form is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-13;

/// Magnitude of the profile where the tail is truncated, by default.
pub const TAIL_START: f64 = 1e-13;

/// Largest admissible `|zeta|` at the ends of a profile.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OdeModel {
    /// The full extended Boussinesq traveling-wave equation.
    #[default]
    Extended,
    /// The `eps^2` terms removed, leaving the Green-Naghdi equation.
    GreenNaghdi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub zeta: f64,
    pub dzeta: f64,
    pub d2zeta: f64,
}

impl OdeState {
    pub fn new(zeta: f64, dzeta: f64, d2zeta: f64) -> Self {
        Self { zeta, dzeta, d2zeta }
    }
}

fn depth(params: &ModelParams, zeta: f64, xi: Option<f64>) -> Result<f64> {
    let h = 1.0 + params.epsilon() * zeta;
    if h > 0.0 {
        Ok(h)
    } else {
        Err(Error::Depth {
            depth: h,
            location: match xi {
                Some(x) => format!("xi = {x}"),
                None => format!("zeta = {zeta}"),
            },
        })
    }
}

/// Solves the traveling-wave equation for `zeta'''`.
pub fn xb_third_derivative(state: &OdeState, params: &ModelParams) -> Result<f64> {
    xb_third_derivative_with(state, params, SINGULARITY_THRESHOLD)
}

pub fn xb_third_derivative_with(state: &OdeState, params: &ModelParams, threshold: f64) -> Result<f64> {
    let OdeState { zeta, dzeta, d2zeta } = *state;
    if dzeta.abs() < threshold {
        return Err(Error::Singular {
            dzeta: dzeta.abs(),
            threshold,
        });
    }
    let h = depth(params, zeta, None)?;
    let eps = params.epsilon();
    let c2 = params.celerity().powi(2);
    let rhs = eps * c2 / 6.0 * (eps * zeta - 1.0) * dzeta * dzeta + eps * eps * c2 / 90.0 * d2zeta * d2zeta
        - 0.5 * zeta * zeta * (1.0 - c2 / h);
    Ok(rhs * 45.0 / (eps * eps * c2 * dzeta))
}

/// Left minus right side of the once-integrated traveling-wave equation.
pub fn traveling_residual(state: &OdeState, d3zeta: f64, params: &ModelParams) -> f64 {
    let OdeState { zeta, dzeta, d2zeta } = *state;
    let eps = params.epsilon();
    let c2 = params.celerity().powi(2);
    let h = 1.0 + eps * zeta;
    0.5 * zeta * zeta * (1.0 - c2 / h) - eps * c2 / 6.0 * (eps * zeta - 1.0) * dzeta * dzeta
        + eps * eps * c2 / 45.0 * d3zeta * dzeta
        - eps * eps * c2 / 90.0 * d2zeta * d2zeta
}

/// Residual of the Green-Naghdi first integral.
pub fn gn_residual(state: &OdeState, params: &ModelParams) -> f64 {
    let eps = params.epsilon();
    let c2 = params.celerity().powi(2);
    let h = 1.0 + eps * state.zeta;
    0.5 * state.zeta * state.zeta * (1.0 - c2 / h) + eps * c2 / 6.0 * state.dzeta * state.dzeta / h
}

/// Curvature `zeta''(0)` at a crest of height `a`, the negative root.
pub fn crest_curvature(a: f64, params: &ModelParams) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("crest amplitude must be positive, got {a}")));
    }
    let h = depth(params, a, Some(0.0))?;
    let eps = params.epsilon();
    let c2 = params.celerity().powi(2);
    let excess = (1.0 - c2) + eps * a;
    let scale = 90.0 / (eps * eps * c2) * 0.5 * a * a / h;
    let mut radicand = scale * excess;
    if excess < 0.0 && excess.abs() <= 4.0 * f64::EPSILON * (c2 + eps * a) {
        radicand = 0.0;
    }
    if radicand < 0.0 {
        return Err(Error::NoCrest { amplitude: a, radicand });
    }
    Ok(-radicand.sqrt())
}

#[derive(Debug, Clone, Copy)]
struct Traveling {
    params: ModelParams,
    model: OdeModel,
}

impl Traveling {
    fn eps(&self) -> f64 {
        self.params.epsilon()
    }

    fn c2(&self) -> f64 {
        self.params.celerity().powi(2)
    }

    fn decay_rate(&self) -> f64 {
        match self.model {
            OdeModel::Extended => self.params.decay_rate(),
            OdeModel::GreenNaghdi => self.params.gn_decay_rate(),
        }
    }

    fn third(&self, y: &[f64; 3]) -> Result<f64> {
        match self.model {
            OdeModel::Extended => xb_third_derivative(&OdeState::new(y[0], y[1], y[2]), &self.params),
            OdeModel::GreenNaghdi => {
                depth(&self.params, y[0], None)?;
                let (eps, c2) = (self.eps(), self.c2());
                Ok(3.0 / (eps * c2) * (c2 - 1.0 - 3.0 * eps * y[0]) * y[1])
            }
        }
    }

    fn fourth(&self, y: &[f64; 4]) -> Result<f64> {
        let h = depth(&self.params, y[0], None)?;
        let (eps, c2) = (self.eps(), self.c2());
        let [z, z1, z2, _] = *y;
        Ok(match self.model {
            OdeModel::Extended => {
                45.0 / (eps * eps * c2)
                    * (-z + c2 * z * (2.0 + eps * z) / (2.0 * h * h) - eps * c2 / 3.0 * z2
                        + eps * eps * c2 / 6.0 * z1 * z1
                        + eps * eps * c2 / 3.0 * z * z2)
            }
            OdeModel::GreenNaghdi => 3.0 / (eps * c2) * ((c2 - 1.0 - 3.0 * eps * z) * z2 - 3.0 * eps * z1 * z1),
        })
    }

    fn crest_curvature(&self, a: f64) -> Result<f64> {
        match self.model {
            OdeModel::Extended => crest_curvature(a, &self.params),
            OdeModel::GreenNaghdi => {
                depth(&self.params, a, Some(0.0))?;
                let (eps, c2) = (self.eps(), self.c2());
                Ok(3.0 / (eps * c2) * (a * (c2 - 1.0) - 1.5 * eps * a * a))
            }
        }
    }

    fn residual(&self, y: &[f64; 4]) -> f64 {
        let state = OdeState::new(y[0], y[1], y[2]);
        match self.model {
            OdeModel::Extended => traveling_residual(&state, y[3], &self.params),
            OdeModel::GreenNaghdi => gn_residual(&state, &self.params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative tolerance of the integrator.
    pub tol: f64,
    /// Half extent of the profile; `None` picks the point where the tail
    /// reaches `TAIL_START`.
    pub half_width: Option<f64>,
    /// Total number of grid points, odd so that the crest is a node.
    pub points: usize,
    pub model: OdeModel,
    /// Also run crest shooting and record its amplitude.
    pub cross_check: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            half_width: None,
            points: 4001,
            model: OdeModel::Extended,
            cross_check: false,
        }
    }
}

/// Half width at which the profile has decayed to `TAIL_START`.
pub fn default_half_width(params: &ModelParams, model: OdeModel) -> f64 {
    let tr = Traveling { params: *params, model };
    let a = params.gn_amplitude();
    (4.0 * a / TAIL_START).ln() / tr.decay_rate()
}

#[derive(Debug, Clone, Serialize)]
pub struct SolitaryProfile {
    pub grid: Grid1D,
    pub zeta: Vec<f64>,
    pub dzeta: Vec<f64>,
    pub d2zeta: Vec<f64>,
    pub d3zeta: Vec<f64>,
    pub v: Vec<f64>,
    pub params: ModelParams,
    pub model: OdeModel,
    pub amplitude: f64,
    pub solver_tol: f64,
    /// `zeta'(0)` as integrated; zero up to the event location error.
    pub crest_slope: f64,
    pub decay_rate: f64,
    /// Amplitude found by shooting from the crest, when requested.
    pub shooting_amplitude: Option<f64>,
}

impl SolitaryProfile {
    /// Crest offset used to start the crest series.
    pub fn crest_offset(&self) -> f64 {
        crest_offset(&self.params)
    }

    /// `zeta` at any abscissa: quintic Hermite between nodes, exponential
    /// decay outside the grid.
    pub fn sample(&self, xi: f64) -> f64 {
        let w = self.grid.x_max();
        let m = self.grid.len() / 2;
        let r = xi.abs();
        if r >= w {
            return self.zeta[self.grid.len() - 1] * (-self.decay_rate * (r - w)).exp();
        }
        let dx = self.grid.dx();
        let j = ((r / dx).floor() as usize).min(m - 1);
        let i0 = m + j;
        let i1 = i0 + 1;
        let t = (r - j as f64 * dx) / dx;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h21 = 0.5 * t3 - t4 + 0.5 * t5;
        h00 * self.zeta[i0]
            + h10 * dx * self.dzeta[i0]
            + h20 * dx * dx * self.d2zeta[i0]
            + h01 * self.zeta[i1]
            + h11 * dx * self.dzeta[i1]
            + h21 * dx * dx * self.d2zeta[i1]
    }

    /// Pointwise residual of the traveling-wave equation with `zeta'''`
    /// taken by finite differences of `zeta''`.
    pub fn ode_residual(&self) -> Vec<f64> {
        let d3 = FdOperator::eighth_order(1).apply(&self.d2zeta, self.grid.dx());
        let tr = Traveling {
            params: self.params,
            model: self.model,
        };
        (0..self.grid.len())
            .map(|i| tr.residual(&[self.zeta[i], self.dzeta[i], self.d2zeta[i], d3[i]]))
            .collect()
    }

    /// Largest residual over `crest_offset() <= |xi| <= half_width`.
    pub fn max_ode_residual(&self) -> f64 {
        let delta = self.crest_offset();
        self.ode_residual()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(*i).abs() >= delta)
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

fn crest_offset(params: &ModelParams) -> f64 {
    1e-3 / params.gn_wavenumber()
}

fn check_inputs(params: &ModelParams, opts: &SolverOptions) -> Result<()> {
    if params.celerity() <= 1.0 {
        return Err(Error::Parameter(format!(
            "celerity c = {} admits no solitary wave",
            params.celerity()
        )));
    }
    if !(1e-12..=1e-6).contains(&opts.tol) {
        return Err(Error::Parameter(format!(
            "tolerance {} outside [1e-12, 1e-6]",
            opts.tol
        )));
    }
    if opts.points < 9 || opts.points.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "point count {} must be odd and at least 9",
            opts.points
        )));
    }
    if let Some(w) = opts.half_width {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Parameter(format!("half width must be positive, got {w}")));
        }
    }
    Ok(())
}

/// Profile on `[-half_width, half_width]` with default options otherwise.
pub fn solve_profile(params: &ModelParams, half_width: f64, tol: f64) -> Result<SolitaryProfile> {
    solve_profile_with(
        params,
        &SolverOptions {
            tol,
            half_width: Some(half_width),
            ..SolverOptions::default()
        },
    )
}

pub fn solve_profile_with(params: &ModelParams, opts: &SolverOptions) -> Result<SolitaryProfile> {
    check_inputs(params, opts)?;
    let tr = Traveling {
        params: *params,
        model: opts.model,
    };
    let kappa = tr.decay_rate();
    let w = opts
        .half_width
        .unwrap_or_else(|| default_half_width(params, opts.model));
    let a_ref = params.gn_amplitude();
    let rhs = |_x: f64, y: &[f64; 4]| -> Result<[f64; 4]> { Ok([y[1], y[2], y[3], tr.fourth(y)?]) };
    let linear = |eta: f64| [eta, -kappa * eta, kappa * kappa * eta, -kappa.powi(3) * eta];

    // locate the crest relative to a tail start of known size
    let eta0 = TAIL_START * a_ref.min(1.0);
    let span = 20.0 * w.max(40.0 / kappa);
    let dp = DormandPrince::new(opts.tol, opts.tol * 1e-3 * eta0);
    let probe = dp.integrate(rhs, 0.0, linear(eta0), -span, &[], Some(|y: &[f64; 4]| y[1]))?;
    if probe.stop != StopReason::Event {
        return Err(Error::NoConvergence {
            lo: 0.0,
            hi: span,
            reason: "tail trajectory never reached a crest".into(),
        });
    }
    let crest_distance = -probe.x;

    // restart so that the crest lands on xi = 0
    let eta1 = eta0 * (-kappa * (w - crest_distance)).exp();
    if eta1 > TAIL_LIMIT {
        return Err(Error::Parameter(format!(
            "half width {w} too small: tail elevation {eta1:e} exceeds {TAIL_LIMIT:e}"
        )));
    }
    let m = opts.points / 2;
    let dx = w / m as f64;
    let mut abscissae: Vec<f64> = (0..=m).rev().map(|j| j as f64 * dx).collect();
    abscissae[0] = w;
    let dp = DormandPrince::new(opts.tol, opts.tol * 1e-3 * eta1);
    let tr_out = dp.integrate(rhs, w, linear(eta1), 0.0, &abscissae, None::<fn(&[f64; 4]) -> f64>)?;
    if tr_out.outputs.len() != m + 1 {
        return Err(Error::Integration {
            x: tr_out.x,
            reason: "missing output abscissae".into(),
        });
    }

    let grid = Grid1D::symmetric(w, opts.points, false)?;
    let n = opts.points;
    let mut zeta = vec![0.0; n];
    let mut dzeta = vec![0.0; n];
    let mut d2zeta = vec![0.0; n];
    let mut d3zeta = vec![0.0; n];
    for (k, (_, y)) in tr_out.outputs.iter().enumerate() {
        let j = m - k;
        let (ip, im) = (m + j, m - j);
        zeta[ip] = y[0];
        zeta[im] = y[0];
        dzeta[ip] = y[1];
        dzeta[im] = -y[1];
        d2zeta[ip] = y[2];
        d2zeta[im] = y[2];
        d3zeta[ip] = y[3];
        d3zeta[im] = -y[3];
    }
    let crest = tr_out.outputs[m].1;
    dzeta[m] = 0.0;
    d3zeta[m] = 0.0;
    let (eps, c) = (params.epsilon(), params.celerity());
    let v = zeta.iter().map(|&z| c * z / (1.0 + eps * z)).collect();

    let shooting_amplitude = if opts.cross_check {
        Some(shoot_crest_amplitude(params, opts)?.amplitude)
    } else {
        None
    };
    Ok(SolitaryProfile {
        grid,
        zeta,
        dzeta,
        d2zeta,
        d3zeta,
        v,
        params: *params,
        model: opts.model,
        amplitude: crest[0],
        solver_tol: opts.tol,
        crest_slope: crest[1],
        decay_rate: kappa,
        shooting_amplitude,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingReport {
    pub amplitude: f64,
    /// Distance from the crest at which the trajectory left the solitary
    /// branch (`zeta <= 0` or `zeta' >= 0`).
    pub escape: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Distance travelled from a crest of height `a` before the trajectory
/// turns back or crosses zero; zero when `a` admits no crest.
pub fn escape_distance(a: f64, params: &ModelParams, opts: &SolverOptions) -> Result<f64> {
    let tr = Traveling {
        params: *params,
        model: opts.model,
    };
    let z2 = match tr.crest_curvature(a) {
        Ok(z2) if z2 < 0.0 => z2,
        Ok(_) | Err(Error::NoCrest { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let z4 = tr.fourth(&[a, 0.0, z2, 0.0])?;
    let d = crest_offset(params);
    let y0 = [
        a + z2 * d * d / 2.0 + z4 * d.powi(4) / 24.0,
        z2 * d + z4 * d.powi(3) / 6.0,
        z2 + z4 * d * d / 2.0,
    ];
    let limit = opts
        .half_width
        .unwrap_or_else(|| default_half_width(params, opts.model));
    let rhs = |_x: f64, y: &[f64; 3]| -> Result<[f64; 3]> { Ok([y[1], y[2], tr.third(y)?]) };
    let dp = DormandPrince::new(opts.tol, opts.tol * 1e-3 * TAIL_START * a.min(1.0));
    match dp.integrate(rhs, d, y0, limit, &[], Some(|y: &[f64; 3]| y[0].min(-y[1]))) {
        Ok(tr) => Ok(tr.x),
        // the third-order form blows up where zeta' returns to zero
        Err(Error::Integration { x, reason }) if reason.contains("singular") || reason.contains("non-finite") => Ok(x),
        Err(e) => Err(e),
    }
}

/// Crest amplitude maximising the escape distance, by golden-section search
/// over `[0.5, 2]` times the Green-Naghdi amplitude.
pub fn shoot_crest_amplitude(params: &ModelParams, opts: &SolverOptions) -> Result<ShootingReport> {
    check_inputs(params, opts)?;
    let a_gn = params.gn_amplitude();
    let bracket = (0.5 * a_gn, 2.0 * a_gn);
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = bracket;
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let mut f1 = escape_distance(x1, params, opts)?;
    let mut f2 = escape_distance(x2, params, opts)?;
    let mut evaluations = 2;
    while hi - lo > 1e-14 * a_gn && evaluations < 200 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = escape_distance(x1, params, opts)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = escape_distance(x2, params, opts)?;
        }
        evaluations += 1;
    }
    let (amplitude, escape) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let edge = 1e-9 * a_gn;
    if amplitude - bracket.0 < edge || bracket.1 - amplitude < edge || escape == 0.0 {
        return Err(Error::NoConvergence {
            lo: bracket.0,
            hi: bracket.1,
            reason: format!("escape distance peaked at the bracket edge (a = {amplitude})"),
        });
    }
    Ok(ShootingReport {
        amplitude,
        escape,
        bracket,
        evaluations,
    })
}
