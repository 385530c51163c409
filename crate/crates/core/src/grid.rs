//! Uniform grids on [0, L], Fourier differentiation and quadrature.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `s_j = j L / N`. Periodic grids carry `N` samples (the endpoint
/// is identified with `s = 0`); open grids carry `N + 1` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicGrid {
    pub length: f64,
    pub n: usize,
    pub periodic: bool,
}

impl PeriodicGrid {
    pub fn new(length: f64, n: usize, periodic: bool) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grid length must be positive, got {length}"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 8 intervals, got {n}"
            )));
        }
        Ok(PeriodicGrid {
            length,
            n,
            periodic,
        })
    }

    pub fn periodic(length: f64, n: usize) -> Result<Self> {
        Self::new(length, n, true)
    }

    pub fn open(length: f64, n: usize) -> Result<Self> {
        Self::new(length, n, false)
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of stored samples.
    pub fn samples(&self) -> usize {
        if self.periodic {
            self.n
        } else {
            self.n + 1
        }
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.samples()).map(|j| self.s(j)).collect()
    }

    /// Nodes including the endpoint `s = L`.
    pub fn nodes_closed(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.s(j)).collect()
    }

    pub fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.samples() {
            return Err(Error::InvalidInput(format!(
                "{what} has {len} samples, grid expects {}",
                self.samples()
            )));
        }
        Ok(())
    }

    /// Integral of samples: trapezoid on periodic grids, composite Simpson otherwise.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        if self.periodic {
            trapezoid_periodic(values, self.h())
        } else {
            simpson(values, self.h())
        }
    }

    /// Values at `s_j + offset` for every stored node: trigonometric interpolation
    /// on periodic grids, local cubic interpolation otherwise.
    pub fn shifted(&self, values: &[f64], offset: f64) -> Vec<f64> {
        if self.periodic {
            shift_real(values, self.length, offset)
        } else {
            lagrange_shift(values, offset / self.h())
        }
    }

    /// Derivative of the samples: spectral on periodic grids, fourth-order
    /// finite differences otherwise.
    pub fn derivative(&self, values: &[f64], order: u32) -> Vec<f64> {
        if self.periodic {
            spectral_derivative(values, self.length, order)
        } else {
            let mut d = values.to_vec();
            for _ in 0..order {
                d = fd4_open(&d, self.h());
            }
            d
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn fft_forward(data: &mut [C64]) {
    let n = data.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    plan.process(data);
}

/// Inverse transform, normalized so that it undoes [`fft_forward`].
pub fn fft_inverse(data: &mut [C64]) {
    let n = data.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    plan.process(data);
    let inv = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= inv;
    }
}

/// Integer wavenumber of FFT bin `j` and whether it is the Nyquist bin.
fn wavenumber(j: usize, n: usize) -> (f64, bool) {
    if n % 2 == 0 && j == n / 2 {
        (j as f64, true)
    } else if j <= n / 2 {
        (j as f64, false)
    } else {
        (j as f64 - n as f64, false)
    }
}

/// Multiply Fourier coefficients by `(i(k + beta))^order`; the Nyquist bin is
/// dropped for odd orders.
fn apply_derivative(hat: &mut [C64], length: f64, order: u32, beta: f64) {
    let n = hat.len();
    let k0 = 2.0 * PI / length;
    for (j, v) in hat.iter_mut().enumerate() {
        let (k, nyq) = wavenumber(j, n);
        if nyq && order % 2 == 1 {
            *v = C64::new(0.0, 0.0);
            continue;
        }
        let ik = C64::new(0.0, k * k0 + beta);
        *v *= ik.powu(order);
    }
}

pub fn spectral_derivative(values: &[f64], length: f64, order: u32) -> Vec<f64> {
    let mut hat: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    fft_forward(&mut hat);
    apply_derivative(&mut hat, length, order, 0.0);
    fft_inverse(&mut hat);
    hat.into_iter().map(|v| v.re).collect()
}

/// First three spectral derivatives of a real periodic signal.
pub fn spectral_derivatives3(values: &[f64], length: f64) -> [Vec<f64>; 3] {
    let mut hat: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    fft_forward(&mut hat);
    let mut out: [Vec<f64>; 3] = Default::default();
    for (o, slot) in out.iter_mut().enumerate() {
        let mut h = hat.clone();
        apply_derivative(&mut h, length, o as u32 + 1, 0.0);
        fft_inverse(&mut h);
        *slot = h.into_iter().map(|v| v.re).collect();
    }
    out
}

pub fn spectral_derivative_complex(values: &[C64], length: f64, order: u32) -> Vec<C64> {
    twisted_derivative(values, length, 0.0, order)
}

/// Derivative of a quasi-periodic signal with `psi(s + L) = e^{i alpha} psi(s)`.
pub fn twisted_derivative(values: &[C64], length: f64, alpha: f64, order: u32) -> Vec<C64> {
    if alpha == 0.0 {
        // separate real transforms keep real data exactly real
        let re = spectral_derivative(
            &values.iter().map(|z| z.re).collect::<Vec<_>>(),
            length,
            order,
        );
        let im = spectral_derivative(
            &values.iter().map(|z| z.im).collect::<Vec<_>>(),
            length,
            order,
        );
        return re
            .into_iter()
            .zip(im)
            .map(|(a, b)| C64::new(a, b))
            .collect();
    }
    let n = values.len();
    let beta = alpha / length;
    let h = length / n as f64;
    let mut hat: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| v * C64::from_polar(1.0, -beta * j as f64 * h))
        .collect();
    fft_forward(&mut hat);
    apply_derivative(&mut hat, length, order, beta);
    fft_inverse(&mut hat);
    hat.iter_mut()
        .enumerate()
        .for_each(|(j, v)| *v *= C64::from_polar(1.0, beta * j as f64 * h));
    hat
}

/// Trigonometric interpolant of a periodic signal evaluated at `s_j + offset`.
pub fn shift_real(values: &[f64], length: f64, offset: f64) -> Vec<f64> {
    let c: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    shift_complex(&c, length, offset)
        .into_iter()
        .map(|v| v.re)
        .collect()
}

pub fn shift_complex(values: &[C64], length: f64, offset: f64) -> Vec<C64> {
    let n = values.len();
    let k0 = 2.0 * PI / length;
    let mut hat = values.to_vec();
    fft_forward(&mut hat);
    for (j, v) in hat.iter_mut().enumerate() {
        let (k, nyq) = wavenumber(j, n);
        if nyq {
            *v *= (k * k0 * offset).cos();
        } else {
            *v *= C64::from_polar(1.0, k * k0 * offset);
        }
    }
    fft_inverse(&mut hat);
    hat
}

/// Shift of a quasi-periodic signal with twist `alpha`.
pub fn shift_twisted(values: &[C64], length: f64, alpha: f64, offset: f64) -> Vec<C64> {
    let n = values.len();
    let beta = alpha / length;
    let h = length / n as f64;
    let untwisted: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| v * C64::from_polar(1.0, -beta * j as f64 * h))
        .collect();
    let mut out = shift_complex(&untwisted, length, offset);
    out.iter_mut()
        .enumerate()
        .for_each(|(j, v)| *v *= C64::from_polar(1.0, beta * (j as f64 * h + offset)));
    out
}

/// Periodic trapezoid rule.
pub fn trapezoid_periodic(values: &[f64], h: f64) -> f64 {
    h * values.iter().sum::<f64>()
}

/// Composite Simpson on `values.len() - 1` intervals; an odd interval count
/// finishes with the 3/8 rule.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len().saturating_sub(1);
    match m {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        2 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let even_end = if m % 2 == 0 { m } else { m - 3 };
            let mut acc = 0.0;
            let mut j = 0;
            while j < even_end {
                acc += h / 3.0 * (values[j] + 4.0 * values[j + 1] + values[j + 2]);
                j += 2;
            }
            if m % 2 == 1 {
                let v = &values[m - 3..=m];
                acc += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            acc
        }
    }
}

/// Fourth-order finite-difference derivative on an open grid (one-sided at the ends).
pub fn fd4_open(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "fourth-order stencil needs five samples");
    let f = values;
    (0..n)
        .map(|j| {
            if j >= 2 && j + 2 < n {
                (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h)
            } else if j == 0 {
                (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
            } else if j == 1 {
                (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
            } else {
                let k = n - 1 - j;
                if k == 0 {
                    let g = &f[n - 5..n];
                    let t = [3.0, -16.0, 36.0, -48.0, 25.0];
                    (0..5).map(|i| t[i] * g[i]).sum::<f64>() / (12.0 * h)
                } else {
                    (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3]
                        + 10.0 * f[n - 2]
                        + 3.0 * f[n - 1])
                        / (12.0 * h)
                }
            }
        })
        .collect()
}

/// Fourth-order central difference on a periodic grid.
pub fn fd4_periodic(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let f = |j: isize| values[j.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|j| (f(j - 2) - 8.0 * f(j - 1) + 8.0 * f(j + 1) - f(j + 2)) / (12.0 * h))
        .collect()
}

/// Values at fractional offset `theta` (in units of h) from every node, by cubic
/// Lagrange interpolation on the nearest four samples.
pub fn lagrange_shift(values: &[f64], theta: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cubic interpolation needs four samples");
    (0..n)
        .map(|j| {
            let x = j as f64 + theta;
            let base = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
            let mut acc = 0.0;
            for a in 0..4 {
                let xa = (base + a) as f64;
                let mut w = 1.0;
                for b in 0..4 {
                    if a != b {
                        let xb = (base + b) as f64;
                        w *= (x - xb) / (xa - xb);
                    }
                }
                acc += w * values[base + a];
            }
            acc
        })
        .collect()
}

/// Cumulative integral `F(s_j) = int_0^{s_j} f` by the midpoint rule with
/// midpoint values supplied separately (`mid[j]` at `s_j + h/2`).
pub fn cumulative_midpoint(mid: &[f64], h: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut acc = 0.0;
    out.push(0.0);
    for m in mid.iter().take(count - 1) {
        acc += h * m;
        out.push(acc);
    }
    out
}
