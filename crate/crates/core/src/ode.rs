//! Adaptive Dormand-Prince 5(4) integration with continuous output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Maximum number of consecutive rejections before giving up.
const MAX_REJECTS: usize = 50;

/// Accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep {
    s0: f64,
    h: f64,
    cont: [Vec<f64>; 5],
}

/// Solution of an initial-value problem: the accepted nodes plus a continuous
/// fifth-order interpolant between them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    steps: Vec<DenseStep>,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.s[0]
    }

    pub fn end(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn last(&self) -> &[f64] {
        &self.y[self.y.len() - 1]
    }

    /// State at `s` (clamped to the integrated interval).
    pub fn eval(&self, s: f64) -> Vec<f64> {
        if self.steps.is_empty() {
            return self.y[0].clone();
        }
        let forward = self.end() >= self.start();
        // index of the step containing s
        let idx = self
            .steps
            .partition_point(|st| {
                if forward {
                    st.s0 + st.h < s
                } else {
                    st.s0 + st.h > s
                }
            })
            .min(self.steps.len() - 1);
        let st = &self.steps[idx];
        let th = ((s - st.s0) / st.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let c = &st.cont;
        (0..c[0].len())
            .map(|i| c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i]))))
            .collect()
    }

    /// Samples at equally spaced points covering `[start, end]`.
    pub fn sample(&self, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (a, b) = (self.start(), self.end());
        let s: Vec<f64> = (0..count)
            .map(|k| a + (b - a) * k as f64 / (count - 1).max(1) as f64)
            .collect();
        let y = s.iter().map(|&x| self.eval(x)).collect();
        (s, y)
    }
}

/// Tolerances and step controls.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on `|h|`; defaults to the span.
    pub h_max: Option<f64>,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Tolerance {
            rtol: tol,
            atol: tol,
            h_max: None,
        }
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

/// Integrates `y' = f(s, y)` from `s0` over `span` (either sign).
pub fn dopri5(
    f: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    s0: f64,
    y0: &[f64],
    span: f64,
    tol: Tolerance,
) -> Result<Trajectory> {
    let dim = y0.len();
    let mut traj = Trajectory {
        s: vec![s0],
        y: vec![y0.to_vec()],
        steps: Vec::new(),
    };
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let s_end = s0 + span;
    let h_max = tol.h_max.unwrap_or(span.abs()).min(span.abs());
    let err_norm = |y: &[f64], yn: &[f64], e: &[f64]| -> f64 {
        let sum: f64 = (0..dim)
            .map(|i| {
                let sc = tol.atol + tol.rtol * y[i].abs().max(yn[i].abs());
                (e[i] / sc).powi(2)
            })
            .sum();
        (sum / dim.max(1) as f64).sqrt()
    };

    let mut s = s0;
    let mut y = y0.to_vec();
    let mut k1 = f(s, &y);
    // initial step guess
    let mut h = {
        let d0 = err_norm(&y, &y, &y);
        let d1 = err_norm(&y, &y, &k1);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(&y, dir * h0, &[(1.0, &k1)]);
        let f1 = f(s + dir * h0, &y1);
        let diff: Vec<f64> = f1.iter().zip(&k1).map(|(a, b)| a - b).collect();
        let d2 = err_norm(&y, &y, &diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(h_max)
    };
    let mut rejects = 0;
    let mut last_rejected = false;
    while dir * (s_end - s) > 0.0 {
        if h > dir * (s_end - s) {
            h = dir * (s_end - s);
        }
        let hs = dir * h;
        let k2 = f(s + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(s + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            s + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            s + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            s + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let yn = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(s + hs, &yn);
        let e: Vec<f64> = (0..dim)
            .map(|i| {
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            })
            .collect();
        let err = err_norm(&y, &yn, &e);
        if !err.is_finite() {
            return Err(Error::StepFailure { s, h: hs });
        }
        if err <= 1.0 {
            let ydiff: Vec<f64> = (0..dim).map(|i| yn[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..dim).map(|i| hs * k1[i] - ydiff[i]).collect();
            let c3: Vec<f64> = (0..dim).map(|i| ydiff[i] - hs * k7[i] - bspl[i]).collect();
            let c4: Vec<f64> = (0..dim)
                .map(|i| {
                    hs * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i])
                })
                .collect();
            traj.steps.push(DenseStep {
                s0: s,
                h: hs,
                cont: [y.clone(), ydiff, bspl, c3, c4],
            });
            s += hs;
            if dir * (s_end - s) < 1e-14 * span.abs() {
                s = s_end;
            }
            y = yn;
            k1 = k7;
            traj.s.push(s);
            traj.y.push(y.clone());
            rejects = 0;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            rejects += 1;
            if rejects > MAX_REJECTS || h < 1e-14 * span.abs().max(1.0) {
                return Err(Error::StepFailure { s, h: hs });
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            last_rejected = true;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_and_dense_output() {
        let f = |_s: f64, y: &[f64]| vec![y[1], -y[0]];
        let tr = dopri5(&f, 0.0, &[1.0, 0.0], 10.0, Tolerance::uniform(1e-12)).unwrap();
        assert!((tr.last()[0] - 10f64.cos()).abs() < 1e-9);
        for k in 0..50 {
            let s = 0.2 * k as f64 + 0.013;
            let y = tr.eval(s);
            assert!((y[0] - s.cos()).abs() < 1e-9, "s = {s}");
        }
        let back = dopri5(&f, 0.0, &[1.0, 0.0], -3.0, Tolerance::uniform(1e-12)).unwrap();
        assert!((back.eval(-1.5)[1] - 1.5f64.sin()).abs() < 1e-9);
    }
}
