//! Uniform 1-D grids, sampled wave fields, discrete norms and derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectral;
use crate::stencil::FdOperator;

/// Largest boundary magnitude accepted by non-periodic differentiation.
pub const DECAY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    periodic: bool,
}

impl Grid1D {
    /// Uniform grid of `n >= 8` points. Periodic grids omit the right end point.
    pub fn new(x_min: f64, x_max: f64, n: usize, periodic: bool) -> Result<Self> {
        if n < 8 {
            return Err(Error::Grid(format!("need at least 8 points, got {n}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Grid(format!("empty extent [{x_min}, {x_max}]")));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            periodic,
        })
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize, periodic: bool) -> Result<Self> {
        Self::new(-half_width, half_width, n, periodic)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        if self.periodic {
            self.length() / self.n as f64
        } else {
            self.length() / (self.n - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| f(self.x(i))).collect()
    }
}

impl Default for Grid1D {
    /// `[-50, 50]` with 4096 points.
    fn default() -> Self {
        Self {
            x_min: -50.0,
            x_max: 50.0,
            n: 4096,
            periodic: false,
        }
    }
}

/// Surface elevation and depth-averaged velocity sampled at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid1D,
    epsilon: f64,
    zeta: Vec<f64>,
    v: Vec<f64>,
    time: f64,
}

impl WaveField {
    pub fn new(grid: Grid1D, epsilon: f64, zeta: Vec<f64>, v: Vec<f64>, time: f64) -> Result<Self> {
        for f in [&zeta, &v] {
            if f.len() != grid.len() {
                return Err(Error::Length {
                    expected: grid.len(),
                    got: f.len(),
                });
            }
        }
        check_depth(&grid, epsilon, &zeta)?;
        Ok(Self {
            grid,
            epsilon,
            zeta,
            v,
            time,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Water depth `h = 1 + epsilon zeta`.
    pub fn depth(&self) -> Vec<f64> {
        self.zeta.iter().map(|z| 1.0 + self.epsilon * z).collect()
    }
}

/// Fails unless `1 + epsilon zeta > 0` at every node.
pub fn check_depth(grid: &Grid1D, epsilon: f64, zeta: &[f64]) -> Result<()> {
    for (i, z) in zeta.iter().enumerate() {
        let h = 1.0 + epsilon * z;
        if !(h > 0.0) {
            return Err(Error::Depth {
                depth: h,
                location: format!("x = {}", grid.x(i)),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    /// `sqrt(dx * sum f_i^2)`, approximating the continuous L2 norm.
    L2,
    /// Plain vector norm `sqrt(sum f_i^2)`.
    L2Unweighted,
    /// `max |f_i|`.
    Inf,
}

pub fn discrete_norm(f: &[f64], dx: f64, p: Norm) -> Result<f64> {
    if !(dx > 0.0) {
        return Err(Error::Grid(format!("spacing dx = {dx} must be positive")));
    }
    if let Some(index) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let sum_sq = || f.iter().map(|x| x * x).sum::<f64>();
    Ok(match p {
        Norm::L2 => (dx * sum_sq()).sqrt(),
        Norm::L2Unweighted => sum_sq().sqrt(),
        Norm::Inf => f.iter().fold(0.0, |m, x| m.max(x.abs())),
    })
}

/// Differentiation on a fixed grid: spectral when periodic, 8th-order
/// finite differences otherwise. Plans and stencils are built once.
#[derive(Debug, Clone)]
pub struct Differentiator {
    grid: Grid1D,
    spectral: Option<Spectral>,
    stencils: Vec<FdOperator>,
}

impl Differentiator {
    pub fn new(grid: Grid1D) -> Self {
        if grid.is_periodic() {
            Self {
                grid,
                spectral: Some(Spectral::new(grid.len(), grid.length())),
                stencils: Vec::new(),
            }
        } else {
            Self {
                grid,
                spectral: None,
                stencils: (1..=5).map(FdOperator::eighth_order).collect(),
            }
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// `order`-th derivative of `f`, checking the decay precondition on
    /// non-periodic grids.
    pub fn derivative(&self, f: &[f64], order: usize) -> Result<Vec<f64>> {
        if !(1..=5).contains(&order) {
            return Err(Error::Parameter(format!("derivative order {order} not in 1..=5")));
        }
        if f.len() != self.grid.len() {
            return Err(Error::Length {
                expected: self.grid.len(),
                got: f.len(),
            });
        }
        if let Some(index) = f.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        match &self.spectral {
            Some(s) => Ok(s.derivative(f, order as u32)),
            None => {
                for index in [0, f.len() - 1] {
                    if f[index].abs() > DECAY_THRESHOLD {
                        return Err(Error::NoDecay {
                            index,
                            magnitude: f[index].abs(),
                        });
                    }
                }
                let op = &self.stencils[order - 1];
                if f.len() <= 2 * ((order + 7) / 2) {
                    return Err(Error::Grid(format!(
                        "{} points too few for an order-{order} stencil",
                        f.len()
                    )));
                }
                Ok(op.apply(f, self.grid.dx()))
            }
        }
    }
}

pub fn spatial_derivative(f: &[f64], grid: &Grid1D, order: usize) -> Result<Vec<f64>> {
    Differentiator::new(*grid).derivative(f, order)
}
