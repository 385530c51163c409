//! Seeded initial data: random smooth fields and controls, magnons and helices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::ControlSignal;
use crate::grid::PeriodicGrid;
use crate::liealg::SpaceForm;
use crate::magnetic::{normalize, SpinField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric polynomial with `modes` harmonics of decaying amplitude.
fn random_trig(rng: &mut ChaCha8Rng, modes: usize, amplitude: f64) -> Vec<(f64, f64)> {
    (1..=modes)
        .map(|k| {
            let a = amplitude / k as f64;
            (rng.gen_range(-a..a), rng.gen_range(-a..a))
        })
        .collect()
}

fn eval_trig(coefs: &[(f64, f64)], x: f64) -> f64 {
    coefs
        .iter()
        .enumerate()
        .map(|(k, (c, s))| c * ((k + 1) as f64 * x).cos() + s * ((k + 1) as f64 * x).sin())
        .sum()
}

/// Normalized random smooth field: a random unit vector plus `modes`
/// harmonics of each component, renormalized. Amplitudes below about 0.5 keep
/// the unnormalized field away from the origin.
pub fn random_spin_field(
    grid: PeriodicGrid,
    form: SpaceForm,
    modes: usize,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpinField> {
    let base = normalize([
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ]);
    let coefs: Vec<Vec<(f64, f64)>> = (0..3).map(|_| random_trig(rng, modes, amplitude)).collect();
    let w = std::f64::consts::TAU / grid.length;
    SpinField::from_fn(grid, form, |s| {
        let x = w * s;
        normalize([0, 1, 2].map(|k| base[k] + eval_trig(&coefs[k], x)))
    })
}

/// Random smooth periodic controls with mean curvature `kappa0` along `u2`.
pub fn random_controls(
    grid: PeriodicGrid,
    modes: usize,
    amplitude: f64,
    kappa0: f64,
    rng: &mut ChaCha8Rng,
) -> ControlSignal {
    let coefs: Vec<Vec<(f64, f64)>> = (0..3).map(|_| random_trig(rng, modes, amplitude)).collect();
    let means = [rng.gen_range(-amplitude..amplitude), kappa0, 0.0];
    let w = std::f64::consts::TAU / grid.length;
    ControlSignal::from_fn(grid, |s| {
        [0, 1, 2].map(|k| means[k] + eval_trig(&coefs[k], w * s))
    })
}

/// `lambda = (sin th0 cos ks, sin th0 sin ks, cos th0)`, which precesses about
/// the third axis at rate `k^2 cos th0` under the magnetic flow.
pub fn magnon(grid: PeriodicGrid, form: SpaceForm, k: f64, theta0: f64) -> Result<SpinField> {
    SpinField::from_fn(grid, form, |s| {
        [
            theta0.sin() * (k * s).cos(),
            theta0.sin() * (k * s).sin(),
            theta0.cos(),
        ]
    })
}

/// Helix tangent `(a cos ws, a sin ws, b)` with `a^2 + b^2 = 1`.
pub fn helix(grid: PeriodicGrid, form: SpaceForm, a: f64, w: f64) -> Result<SpinField> {
    if !(0.0..=1.0).contains(&a.abs()) {
        return Err(Error::InvalidInput(format!(
            "helix amplitude {a} outside [-1, 1]"
        )));
    }
    let b = (1.0 - a * a).sqrt();
    SpinField::from_fn(grid, form, |s| [a * (w * s).cos(), a * (w * s).sin(), b])
}

/// Serializable description of an initial spin field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpinInit {
    /// Wavenumber given as an integer number of windings over the period.
    Magnon {
        windings: i64,
        theta0: f64,
    },
    Helix {
        amplitude: f64,
        windings: i64,
    },
    Random {
        modes: usize,
        amplitude: f64,
    },
}

impl SpinInit {
    pub fn build(&self, grid: PeriodicGrid, form: SpaceForm, seed: u64) -> Result<SpinField> {
        let w = std::f64::consts::TAU / grid.length;
        match *self {
            SpinInit::Magnon { windings, theta0 } => {
                magnon(grid, form, w * windings as f64, theta0)
            }
            SpinInit::Helix {
                amplitude,
                windings,
            } => helix(grid, form, amplitude, w * windings as f64),
            SpinInit::Random { modes, amplitude } => {
                random_spin_field(grid, form, modes, amplitude, &mut rng(seed))
            }
        }
    }
}
