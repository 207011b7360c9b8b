//! Explicit corrected solution `(zeta_1, v_1) + eps^2 (zeta_2, v_2)`.
//!
//! `(zeta_1, v_1)` is the standard Boussinesq solitary wave and
//! `(zeta_2, v_2)` solves the forced linear wave system
//! `d_t zeta_2 + d_x v_2 = 0`, `d_t v_2 + d_x zeta_2 = f` by d'Alembert's
//! formula, with the forcing integrated along characteristics.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::params::ModelParams;
use crate::quadrature;

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

/// Time horizon `T` in the validity window `t <= T / sqrt(eps)`.
pub const DEFAULT_HORIZON: f64 = 1.0;

/// Taylor coefficients kept for the background: derivatives 0..=6.
pub const JET_LEN: usize = 7;

/// Value and spatial derivatives of orders 1 to 5 at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JetValue(pub [f64; 6]);

impl JetValue {
    fn from_jet(j: &Jet<JET_LEN>) -> Self {
        let mut d = [0.0; 6];
        for (m, slot) in d.iter_mut().enumerate() {
            *slot = j.derivative(m);
        }
        Self(d)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn derivative(&self, order: usize) -> f64 {
        self.0[order]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct V1Jets {
    pub v1: JetValue,
    /// `d_t v_1` and its spatial derivatives.
    pub v1_t: JetValue,
}

/// `zeta_1` and `v_1` expanded in `x` around the point `(t, x)`.
pub fn background_jets(params: &ModelParams, t: f64, x: f64) -> (Jet<JET_LEN>, Jet<JET_LEN>) {
    let c = params.celerity();
    let theta = Jet::<JET_LEN>::variable(x - c * t);
    let (s, _) = theta.scale(params.k()).sech2_tanh();
    let zeta = s.scale(params.alpha());
    let v = zeta.scale(c) / (zeta.scale(params.epsilon()) + 1.0);
    (zeta, v)
}

/// Derivatives of `v_1` and of `d_t v_1 = -c d_x v_1`.
pub fn jet_v1(params: &ModelParams, t: f64, x: f64) -> V1Jets {
    let (_, v) = background_jets(params, t, x);
    let v1 = JetValue::from_jet(&v);
    let c = params.celerity();
    let mut vt = [0.0; 6];
    for (m, slot) in vt.iter_mut().enumerate() {
        *slot = -c * v.derivative(m + 1);
    }
    V1Jets { v1, v1_t: JetValue(vt) }
}

/// Forcing `f(zeta_1, v_1)` of the corrector system.
pub fn forcing_f(params: &ModelParams, t: f64, x: f64) -> f64 {
    let (zeta, v) = background_jets(params, t, x);
    let c = params.celerity();
    let d = |m: usize| v.derivative(m);
    let dvt = |m: usize| -c * d(m + 1);
    zeta.derivative(1) * dvt(1) + 2.0 / 3.0 * zeta.value() * dvt(2) + dvt(4) / 45.0 + (d(0) * d(3) - d(1) * d(2)) / 3.0
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial values `(zeta_2^0, v_2^0)` of the corrector.
#[derive(Clone)]
pub struct InitialData {
    label: String,
    zeta: Profile,
    v: Profile,
}

impl InitialData {
    pub fn new(
        label: impl Into<String>,
        zeta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            zeta: Arc::new(zeta),
            v: Arc::new(v),
        }
    }

    /// `zeta_2^0 = v_2^0 = exp(-(3 pi x / 10)^2)`.
    pub fn gaussian() -> Self {
        let g = |x: f64| (-(0.3 * std::f64::consts::PI * x).powi(2)).exp();
        Self::new("gaussian", g, g)
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 0.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn zeta0(&self, x: f64) -> f64 {
        (self.zeta)(x)
    }

    pub fn v0(&self, x: f64) -> f64 {
        (self.v)(x)
    }
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData").field("label", &self.label).finish()
    }
}

/// `(zeta_2, v_2)` at `(t, x)` for the corrector forcing of `params`.
pub fn transport_pair(params: &ModelParams, t: f64, x: f64, data: &InitialData, tol: f64) -> Result<(f64, f64)> {
    transport_pair_with(|s, y| forcing_f(params, s, y), t, x, data, tol)
}

/// d'Alembert solution with an arbitrary forcing `f(t, x)`.
pub fn transport_pair_with<F>(forcing: F, t: f64, x: f64, data: &InitialData, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> f64,
{
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok((data.zeta0(x), data.v0(x)));
    }
    let plus = data.zeta0(x - t) + data.v0(x - t);
    let minus = data.zeta0(x + t) - data.v0(x + t);
    let right = quadrature::integrate(|s| forcing(s, x - t + s), 0.0, t, tol)?.value;
    let left = quadrature::integrate(|s| forcing(s, x + t - s), 0.0, t, tol)?.value;
    Ok((0.5 * (plus + minus + right - left), 0.5 * (plus - minus + right + left)))
}

#[derive(Debug, Clone)]
pub struct CorrectedSolution {
    pub params: ModelParams,
    pub initial_data: InitialData,
    pub quadrature_tol: f64,
    pub horizon: f64,
}

impl CorrectedSolution {
    /// Gaussian initial data, default tolerance and horizon.
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            initial_data: InitialData::gaussian(),
            quadrature_tol: DEFAULT_QUADRATURE_TOL,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn with_initial_data(mut self, data: InitialData) -> Self {
        self.initial_data = data;
        self
    }

    pub fn with_quadrature_tol(mut self, tol: f64) -> Self {
        self.quadrature_tol = tol;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    /// Largest admissible time `T / sqrt(eps)`.
    pub fn max_time(&self) -> f64 {
        self.horizon / self.params.epsilon().sqrt()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.max_time()).contains(&t) {
            return Err(Error::Parameter(format!("time {t} outside [0, {}]", self.max_time())));
        }
        Ok(())
    }

    /// `(zeta_2, v_2)` at `(t, x)`.
    pub fn corrector(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        self.check_time(t)?;
        transport_pair(&self.params, t, x, &self.initial_data, self.quadrature_tol)
    }

    /// `(zeta_2, v_2)` sampled at each of `xs`.
    pub fn corrector_field(&self, t: f64, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut z = Vec::with_capacity(xs.len());
        let mut v = Vec::with_capacity(xs.len());
        for &x in xs {
            let (a, b) = self.corrector(t, x)?;
            z.push(a);
            v.push(b);
        }
        Ok((z, v))
    }

    /// `(zeta, v)` at `(t, x)`.
    pub fn eval(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        corrected_eval(self, t, x)
    }
}

pub fn corrected_eval(sol: &CorrectedSolution, t: f64, x: f64) -> Result<(f64, f64)> {
    let (z1, v1) = crate::refwaves::boussinesq_solitary(&sol.params, t, x);
    let (z2, v2) = sol.corrector(t, x)?;
    let e2 = sol.params.epsilon().powi(2);
    Ok((z1 + e2 * z2, v1 + e2 * v2))
}
