//! The fourth-order operator `I = h - (eps/3) d_x(h^3 d_x) + (eps^2/45) d_x^4`
//! on periodic grids: application, inversion and norm probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{check_depth, Grid1D};
use crate::spectral::Spectral;

#[derive(Debug, Clone)]
pub struct OperatorContext {
    grid: Grid1D,
    epsilon: f64,
    depth: Vec<f64>,
    depth_cubed: Vec<f64>,
    mean_depth: f64,
    spectral: Spectral,
}

impl OperatorContext {
    pub fn new(grid: Grid1D, epsilon: f64, zeta: &[f64]) -> Result<Self> {
        if !grid.is_periodic() {
            return Err(Error::Grid("the operator lab needs a periodic grid".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if zeta.len() != grid.len() {
            return Err(Error::Length {
                expected: grid.len(),
                got: zeta.len(),
            });
        }
        check_depth(&grid, epsilon, zeta)?;
        let depth: Vec<f64> = zeta.iter().map(|z| 1.0 + epsilon * z).collect();
        let depth_cubed = depth.iter().map(|h| h * h * h).collect();
        let mean_depth = depth.iter().sum::<f64>() / depth.len() as f64;
        Ok(Self {
            spectral: Spectral::new(grid.len(), grid.length()),
            grid,
            epsilon,
            depth,
            depth_cubed,
            mean_depth,
        })
    }

    /// Context over a flat surface, `zeta = 0`.
    pub fn flat(grid: Grid1D, epsilon: f64) -> Result<Self> {
        let zero = vec![0.0; grid.len()];
        Self::new(grid, epsilon, &zero)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h_min(&self) -> f64 {
        self.depth.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Symbol of the operator frozen at depth `h`.
    pub fn symbol(&self, h: f64, k: f64) -> f64 {
        let e = self.epsilon;
        h + e / 3.0 * h * h * h * k * k + e * e / 45.0 * k.powi(4)
    }

    fn check(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.grid.len() {
            return Err(Error::Length {
                expected: self.grid.len(),
                got: w.len(),
            });
        }
        if let Some(index) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(())
    }

    fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        self.spectral.derivative(f, order)
    }

    pub fn apply(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check(w)?;
        Ok(self.apply_unchecked(w))
    }

    fn apply_unchecked(&self, w: &[f64]) -> Vec<f64> {
        let e = self.epsilon;
        let wx = self.derivative(w, 1);
        let flux: Vec<f64> = wx.iter().zip(&self.depth_cubed).map(|(a, b)| a * b).collect();
        let div = self.derivative(&flux, 1);
        let w4 = self.derivative(w, 4);
        (0..w.len())
            .map(|i| self.depth[i] * w[i] - e / 3.0 * div[i] + e * e / 45.0 * w4[i])
            .collect()
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let h = self.mean_depth;
        self.spectral
            .apply_symbol(r, false, |k| Complex64::new(1.0 / self.symbol(h, k), 0.0))
    }

    /// Solves `I w = f` to relative residual `tol` by conjugate gradients,
    /// preconditioned with the constant-depth symbol.
    pub fn invert(&self, f: &[f64], tol: f64) -> Result<Inversion> {
        self.check(f)?;
        if !(tol > 0.0) {
            return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let norm_f = dot(f, f).sqrt();
        let n = f.len();
        if norm_f == 0.0 {
            return Ok(Inversion {
                solution: vec![0.0; n],
                iterations: 0,
                residual: 0.0,
            });
        }
        let max_iter = 20 * n.max(50);
        let mut w = self.precondition(f);
        let aw = self.apply_unchecked(&w);
        let mut r: Vec<f64> = f.iter().zip(&aw).map(|(a, b)| a - b).collect();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut residual = dot(&r, &r).sqrt() / norm_f;
        let mut iterations = 0;
        while residual > tol {
            if iterations >= max_iter || !(rz > 0.0) {
                return Err(Error::Solver { iterations, residual });
            }
            let ap = self.apply_unchecked(&p);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::Solver { iterations, residual });
            }
            let alpha = rz / pap;
            for i in 0..n {
                w[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            // refresh the recursive residual now and then
            if iterations % 50 == 0 {
                let aw = self.apply_unchecked(&w);
                for i in 0..n {
                    r[i] = f[i] - aw[i];
                }
            }
            residual = dot(&r, &r).sqrt() / norm_f;
            z = self.precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let aw = self.apply_unchecked(&w);
        let true_residual = f.iter().zip(&aw).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / norm_f;
        if true_residual > tol * 10.0 {
            return Err(Error::Solver {
                iterations,
                residual: true_residual,
            });
        }
        Ok(Inversion {
            solution: w,
            iterations,
            residual: true_residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inversion {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Achieved `||I w - f|| / ||f||`.
    pub residual: f64,
}

pub fn apply_i(ctx: &OperatorContext, w: &[f64]) -> Result<Vec<f64>> {
    ctx.apply(w)
}

pub fn invert_i(ctx: &OperatorContext, f: &[f64], tol: f64) -> Result<Vec<f64>> {
    Ok(ctx.invert(f, tol)?.solution)
}

/// Discrete inner product `dx sum u_i v_i`.
pub fn inner(u: &[f64], v: &[f64], dx: f64) -> f64 {
    dx * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

/// `|(I u, v) - (u, I v)| / (||I u|| ||v||)`.
pub fn symmetry_defect(ctx: &OperatorContext, u: &[f64], v: &[f64]) -> Result<f64> {
    let dx = ctx.grid.dx();
    let au = ctx.apply(u)?;
    let av = ctx.apply(v)?;
    let scale = inner(&au, &au, dx).sqrt() * inner(v, v, dx).sqrt();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((inner(&au, v, dx) - inner(u, &av, dx)).abs() / scale)
}

/// Periodic Sobolev norm with Fourier weights `(1 + k^2)^(s/2)`.
pub fn sobolev_norm(f: &[f64], grid: &Grid1D, s: f64) -> Result<f64> {
    if !grid.is_periodic() {
        return Err(Error::Grid("Sobolev norms need a periodic grid".into()));
    }
    if f.len() != grid.len() {
        return Err(Error::Length {
            expected: grid.len(),
            got: f.len(),
        });
    }
    let spectral = Spectral::new(grid.len(), grid.length());
    let spec = spectral.forward(f);
    let n = grid.len() as f64;
    let sum: f64 = spec
        .iter()
        .zip(spectral.wavenumbers())
        .map(|(z, k)| (1.0 + k * k).powf(s) * z.norm_sqr())
        .sum();
    // Parseval: dx sum |f_i|^2 = (L / n^2) sum |F_k|^2
    Ok((grid.length() * sum).sqrt() / n)
}

/// Smooth random periodic field: Fourier modes up to `modes` with
/// amplitudes decaying like `1/(1+m)^2`.
pub fn random_smooth(grid: &Grid1D, modes: usize, rng: &mut impl Rng) -> Vec<f64> {
    let l = grid.length();
    let terms: Vec<(f64, f64, f64)> = (0..=modes)
        .map(|m| {
            let k = 2.0 * std::f64::consts::PI * m as f64 / l;
            let amp = 1.0 / (1.0 + m as f64).powi(2);
            (k, amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0))
        })
        .collect();
    grid.sample(|x| {
        terms
            .iter()
            .map(|(k, a, b)| a * (k * x).cos() + b * (k * x).sin())
            .sum()
    })
}

/// Largest ratios over the samples at one `eps`, for `||f||_{H^s} = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundProbe {
    pub epsilon: f64,
    /// `max ||I^-1 f||_{H^s}`.
    pub value: f64,
    /// `max sqrt(eps) ||d_x I^-1 f||_{H^s}`.
    pub first: f64,
    /// `max eps ||d_x^2 I^-1 f||_{H^s}`.
    pub second: f64,
    /// `max` over samples of the sum of the three.
    pub constant: f64,
    pub h_min: f64,
}

/// Probes the `eps`-uniform bound on `I^-1` over a fixed family of random
/// right-hand sides; `zeta` is the surface, scaled by each `eps`.
pub fn bound_probe(
    grid: &Grid1D,
    zeta: &[f64],
    eps_list: &[f64],
    s: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<BoundProbe>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = Vec::with_capacity(samples);
    for _ in 0..samples {
        let f = random_smooth(grid, 24, &mut rng);
        let norm = sobolev_norm(&f, grid, s)?;
        family.push(f.iter().map(|x| x / norm).collect::<Vec<f64>>());
    }
    let spectral = Spectral::new(grid.len(), grid.length());
    eps_list
        .iter()
        .map(|&eps| {
            let ctx = OperatorContext::new(*grid, eps, zeta)?;
            let mut probe = BoundProbe {
                epsilon: eps,
                value: 0.0,
                first: 0.0,
                second: 0.0,
                constant: 0.0,
                h_min: ctx.h_min(),
            };
            for f in &family {
                let w = ctx.invert(f, 1e-12)?.solution;
                let a = sobolev_norm(&w, grid, s)?;
                let b = eps.sqrt() * sobolev_norm(&spectral.derivative(&w, 1), grid, s)?;
                let c = eps * sobolev_norm(&spectral.derivative(&w, 2), grid, s)?;
                probe.value = probe.value.max(a);
                probe.first = probe.first.max(b);
                probe.second = probe.second.max(c);
                probe.constant = probe.constant.max(a + b + c);
            }
            Ok(probe)
        })
        .collect()
}
