//! Adaptive Dormand-Prince 5(4) integration with exact output abscissae and
//! terminal event location.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights are the last row of A; E = b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl DormandPrince {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    Event,
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    /// Final abscissa (the event location when `stop == Event`).
    pub x: f64,
    pub y: [f64; N],
    /// States at the requested output abscissae reached before stopping.
    pub outputs: Vec<(f64, [f64; N])>,
    pub steps: usize,
    pub stop: StopReason,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coeffs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coeffs) {
        if a != 0.0 {
            for i in 0..N {
                out[i] += h * a * k[i];
            }
        }
    }
    out
}

impl DormandPrince {
    /// One step of size `h` from `(x, y)` with `k1 = f(x, y)`.
    /// Returns the 5th-order solution and the embedded error estimate.
    pub fn step<const N: usize, F>(
        &self,
        f: &F,
        x: f64,
        y: &[f64; N],
        k1: [f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], [f64; N])>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let mut ks = [[0.0; N]; 7];
        ks[0] = k1;
        for s in 1..7 {
            let ys = axpy(y, h, &ks[..s], &A[s][..s]);
            ks[s] = f(x + C[s] * h, &ys)?;
        }
        let y_new = axpy(y, h, &ks[..6], &A[6]);
        let mut err = [0.0; N];
        for (s, e) in E.iter().enumerate() {
            for i in 0..N {
                err[i] += h * e * ks[s][i];
            }
        }
        Ok((y_new, err, ks[6]))
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                (err[i] / sc).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    /// Integrates from `x0` to `x_end` (either direction), landing exactly on
    /// every abscissa in `outputs` (ordered along the direction of travel).
    /// When `event` is given, stops at its first sign change.
    pub fn integrate<const N: usize, F, G>(
        &self,
        f: F,
        x0: f64,
        y0: [f64; N],
        x_end: f64,
        outputs: &[f64],
        event: Option<G>,
    ) -> Result<Trajectory<N>>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
        G: Fn(&[f64; N]) -> f64,
    {
        let dir = if x_end >= x0 { 1.0 } else { -1.0 };
        let span = (x_end - x0).abs();
        let wrap = |x: f64, e: Error| match e {
            Error::Integration { .. } => e,
            other => Error::Integration {
                x,
                reason: other.to_string(),
            },
        };
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y).map_err(|e| wrap(x, e))?;
        let mut h = (1e-2 * span).min(self.h_max).max(1e-12);
        let mut out = Vec::with_capacity(outputs.len());
        let mut next_out = 0;
        while next_out < outputs.len() && (outputs[next_out] - x0) * dir <= 0.0 {
            if outputs[next_out] == x0 {
                out.push((x0, y0));
            }
            next_out += 1;
        }
        let g0 = event.as_ref().map(|g| g(&y));
        let mut steps = 0;

        while (x_end - x) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::Integration {
                    x,
                    reason: format!("step limit {} reached", self.max_steps),
                });
            }
            let target = if next_out < outputs.len() {
                outputs[next_out]
            } else {
                x_end
            };
            let remaining = (target - x).abs();
            let clipped = h >= remaining;
            let h_try = if clipped { remaining } else { h };
            let (y_new, err, k_last) = self.step(&f, x, &y, k1, dir * h_try).map_err(|e| wrap(x, e))?;
            let en = self.error_norm(&y, &y_new, &err);
            if !en.is_finite() {
                h *= 0.25;
                if h < 1e-14 * span.max(1.0) {
                    return Err(Error::Integration {
                        x,
                        reason: "non-finite state".into(),
                    });
                }
                continue;
            }
            let factor = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            if en > 1.0 {
                h = h_try * factor;
                if h < 1e-14 * x.abs().max(1.0) {
                    return Err(Error::Integration {
                        x,
                        reason: "step size underflow".into(),
                    });
                }
                continue;
            }
            steps += 1;
            let x_new = if clipped { target } else { x + dir * h_try };

            if let (Some(g), Some(g_start)) = (event.as_ref(), g0) {
                let g_new = g(&y_new);
                if g_start != 0.0 && g_new.signum() != g_start.signum() {
                    let (xe, ye) = self.locate_event(&f, g, x, &y, k1, x_new - x).map_err(|e| wrap(x, e))?;
                    return Ok(Trajectory {
                        x: xe,
                        y: ye,
                        outputs: out,
                        steps,
                        stop: StopReason::Event,
                    });
                }
            }

            x = x_new;
            y = y_new;
            k1 = k_last;
            if clipped && next_out < outputs.len() {
                out.push((x, y));
                next_out += 1;
            }
            if !clipped || h_try >= h {
                h = (h_try * factor).min(self.h_max);
            }
        }
        Ok(Trajectory {
            x,
            y,
            outputs: out,
            steps,
            stop: StopReason::Completed,
        })
    }

    /// Regula falsi (Illinois) on the step length, re-stepping from the
    /// start of the step that crossed.
    fn locate_event<const N: usize, F, G>(
        &self,
        f: &F,
        g: &G,
        x: f64,
        y: &[f64; N],
        k1: [f64; N],
        h: f64,
    ) -> Result<(f64, [f64; N])>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
        G: Fn(&[f64; N]) -> f64,
    {
        let eval = |s: f64| -> Result<(f64, [f64; N])> {
            if s == 0.0 {
                return Ok((g(y), *y));
            }
            let (ys, _, _) = self.step(f, x, y, k1, s)?;
            Ok((g(&ys), ys))
        };
        let (mut a, mut b) = (0.0, h);
        let (mut ga, _) = eval(a)?;
        let (mut gb, mut yb) = eval(b)?;
        let mut side = 0;
        for _ in 0..200 {
            if (b - a).abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
            let s = (a * gb - b * ga) / (gb - ga);
            let s = if s.is_finite() && (s - a) * (s - b) < 0.0 {
                s
            } else {
                0.5 * (a + b)
            };
            let (gs, ys) = eval(s)?;
            if gs == 0.0 {
                return Ok((x + s, ys));
            }
            if gs.signum() == gb.signum() {
                b = s;
                gb = gs;
                yb = ys;
                if side == -1 {
                    ga *= 0.5;
                }
                side = -1;
            } else {
                a = s;
                ga = gs;
                if side == 1 {
                    gb *= 0.5;
                }
                side = 1;
            }
        }
        Ok((x + b, yb))
    }
}
