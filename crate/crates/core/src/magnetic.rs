//! The Heisenberg magnetic flow `lambda_t = lambda x lambda_ss` on periodic spin
//! fields, its conserved functionals, and frame reconstruction from a field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{geometric_invariants, ControlSignal};
use crate::grid::{shift_real, spectral_derivative, spectral_derivatives3, PeriodicGrid};
use crate::liealg::{
    add3, cross, dot, norm, scale, su2_from_rotation, AlgebraElement, GroupElement, SpaceForm,
};
use crate::symplectic::moment_map;

/// Unit-norm tolerance for spin fields.
pub const UNIT_TOL: f64 = 1e-10;

/// Default constant in the stability bound `dt <= c (L/N)^2`.
pub const DEFAULT_STABILITY: f64 = 0.2;

/// Periodic field of unit vectors: Cartan coordinates of `Lambda(s_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinField {
    pub grid: PeriodicGrid,
    pub lam: Vec<[f64; 3]>,
    pub form: SpaceForm,
}

impl SpinField {
    pub fn new(grid: PeriodicGrid, lam: Vec<[f64; 3]>, form: SpaceForm) -> Result<Self> {
        if !grid.periodic {
            return Err(Error::InvalidInput(
                "spin fields live on periodic grids".into(),
            ));
        }
        grid.check_len(lam.len(), "spin field")?;
        if let Some((j, v)) = lam
            .iter()
            .enumerate()
            .find(|(_, v)| (norm(**v) - 1.0).abs() > UNIT_TOL)
        {
            return Err(Error::InvalidInput(format!(
                "|lambda| = {} at sample {j}",
                norm(*v)
            )));
        }
        Ok(SpinField { grid, lam, form })
    }

    /// Field from a vector-valued function, normalized pointwise.
    pub fn from_fn(
        grid: PeriodicGrid,
        form: SpaceForm,
        f: impl Fn(f64) -> [f64; 3],
    ) -> Result<Self> {
        let lam = grid.nodes().into_iter().map(|s| normalize(f(s))).collect();
        Self::new(grid, lam, form)
    }

    pub fn constant(grid: PeriodicGrid, form: SpaceForm, v: [f64; 3]) -> Result<Self> {
        Self::from_fn(grid, form, |_| v)
    }

    pub fn len(&self) -> usize {
        self.lam.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lam.is_empty()
    }

    /// `Lambda(s_j)` as an algebra element of the case.
    pub fn element(&self, j: usize) -> AlgebraElement {
        self.form.cartan_vec(self.lam[j])
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.lam.iter().map(|v| v[k]).collect()
    }

    /// First three spectral derivatives.
    pub fn derivatives(&self) -> [Vec<[f64; 3]>; 3] {
        let comps: Vec<[Vec<f64>; 3]> = (0..3)
            .map(|k| spectral_derivatives3(&self.component(k), self.grid.length))
            .collect();
        let n = self.len();
        let pack = |o: usize| {
            (0..n)
                .map(|j| [comps[0][o][j], comps[1][o][j], comps[2][o][j]])
                .collect()
        };
        [pack(0), pack(1), pack(2)]
    }

    pub fn derivative(&self, order: u32) -> Vec<[f64; 3]> {
        let comps: Vec<Vec<f64>> = (0..3)
            .map(|k| spectral_derivative(&self.component(k), self.grid.length, order))
            .collect();
        (0..self.len())
            .map(|j| [comps[0][j], comps[1][j], comps[2][j]])
            .collect()
    }

    /// Field evaluated at `s_j + offset` by trigonometric interpolation (not renormalized).
    pub fn shifted(&self, offset: f64) -> Vec<[f64; 3]> {
        let comps: Vec<Vec<f64>> = (0..3)
            .map(|k| shift_real(&self.component(k), self.grid.length, offset))
            .collect();
        (0..self.len())
            .map(|j| [comps[0][j], comps[1][j], comps[2][j]])
            .collect()
    }

    /// Rigid rotation `lambda -> M lambda`.
    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> SpinField {
        let lam = self.lam.iter().map(|v| normalize(mat_vec(m, *v))).collect();
        SpinField {
            grid: self.grid,
            lam,
            form: self.form,
        }
    }

    pub fn max_dist(&self, other: &SpinField) -> f64 {
        self.lam
            .iter()
            .zip(&other.lam)
            .map(|(a, b)| norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]))
            .fold(0.0, f64::max)
    }
}

pub fn normalize(v: [f64; 3]) -> [f64; 3] {
    scale(1.0 / norm(v), v)
}

pub fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// `lambda x lambda_ss` with Fourier differentiation.
pub fn heisenberg_rhs(state: &SpinField) -> Vec<[f64; 3]> {
    heisenberg_rhs_raw(&state.lam, state.grid.length)
}

fn heisenberg_rhs_raw(lam: &[[f64; 3]], length: f64) -> Vec<[f64; 3]> {
    let d2: Vec<Vec<f64>> = (0..3)
        .map(|k| spectral_derivative(&lam.iter().map(|v| v[k]).collect::<Vec<_>>(), length, 2))
        .collect();
    lam.iter()
        .enumerate()
        .map(|(j, v)| cross(*v, [d2[0][j], d2[1][j], d2[2][j]]))
        .collect()
}

/// Recorded trajectory of a spin-field flow.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinField>,
    pub dt: f64,
    pub order: u32,
    pub flow: String,
}

impl FlowTrajectory {
    pub fn last(&self) -> &SpinField {
        &self.states[self.states.len() - 1]
    }
}

/// Options for the renormalized fourth-order time stepping.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Constant `c` of the stability bound `dt <= c (L/N)^p`.
    pub stability: f64,
    /// Record every `record_every`-th step (the final state is always recorded).
    pub record_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            stability: DEFAULT_STABILITY,
            record_every: 1,
        }
    }
}

/// Classical fourth-order stepping of the magnetic flow with every node
/// renormalized after each step.
pub fn evolve(state0: &SpinField, t_final: f64, dt: f64) -> Result<FlowTrajectory> {
    evolve_with(state0, t_final, dt, EvolveOptions::default())
}

pub fn evolve_with(
    state0: &SpinField,
    t_final: f64,
    dt: f64,
    opts: EvolveOptions,
) -> Result<FlowTrajectory> {
    let length = state0.grid.length;
    let bound = opts.stability * (state0.grid.h()).powi(2);
    run_sphere_flow(
        state0,
        t_final,
        dt,
        bound,
        opts.record_every,
        "heisenberg",
        &|lam| heisenberg_rhs_raw(lam, length),
    )
}

/// Shared renormalized RK4 driver for flows on fields of unit vectors.
pub(crate) fn run_sphere_flow(
    state0: &SpinField,
    t_final: f64,
    dt: f64,
    bound: f64,
    record_every: usize,
    name: &str,
    rhs: &dyn Fn(&[[f64; 3]]) -> Vec<[f64; 3]>,
) -> Result<FlowTrajectory> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need dt > 0 and T >= 0, got dt = {dt}, T = {t_final}"
        )));
    }
    let steps = (t_final / dt).ceil() as usize;
    let dt_eff = if steps == 0 {
        dt
    } else {
        t_final / steps as f64
    };
    if dt_eff > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt: dt_eff, bound });
    }
    let every = record_every.max(1);
    let mut times = vec![0.0];
    let mut states = vec![state0.clone()];
    let mut lam = state0.lam.clone();
    for k in 0..steps {
        lam = rk4_renormalized(&lam, dt_eff, rhs).map_err(|norm| Error::StepUnstable {
            t: (k + 1) as f64 * dt_eff,
            norm,
        })?;
        if (k + 1) % every == 0 || k + 1 == steps {
            times.push((k + 1) as f64 * dt_eff);
            states.push(SpinField {
                grid: state0.grid,
                lam: lam.clone(),
                form: state0.form,
            });
        }
    }
    Ok(FlowTrajectory {
        times,
        states,
        dt: dt_eff,
        order: 4,
        flow: name.to_string(),
    })
}

/// One RK4 step followed by projection to unit length; returns the offending
/// norm when a node drifts by more than 0.1 before the projection.
fn rk4_renormalized(
    lam: &[[f64; 3]],
    dt: f64,
    rhs: &dyn Fn(&[[f64; 3]]) -> Vec<[f64; 3]>,
) -> std::result::Result<Vec<[f64; 3]>, f64> {
    let axpy = |x: &[[f64; 3]], a: f64, y: &[[f64; 3]]| -> Vec<[f64; 3]> {
        x.iter()
            .zip(y)
            .map(|(p, q)| add3(*p, scale(a, *q)))
            .collect()
    };
    let k1 = rhs(lam);
    let k2 = rhs(&axpy(lam, 0.5 * dt, &k1));
    let k3 = rhs(&axpy(lam, 0.5 * dt, &k2));
    let k4 = rhs(&axpy(lam, dt, &k3));
    let mut out = Vec::with_capacity(lam.len());
    for j in 0..lam.len() {
        let mut v = lam[j];
        for k in 0..3 {
            v[k] += dt / 6.0 * (k1[j][k] + 2.0 * k2[j][k] + 2.0 * k3[j][k] + k4[j][k]);
        }
        let nv = norm(v);
        if !nv.is_finite() || (nv - 1.0).abs() > 0.1 {
            return Err(nv);
        }
        out.push(scale(1.0 / nv, v));
    }
    Ok(out)
}

/// Conserved quantities of the magnetic flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    /// `1/2 int |lambda_s|^2`.
    pub f0: f64,
    /// `int kappa^2 tau` from the reconstructed frame, or the triple-product value
    /// when the torsion is undefined somewhere.
    pub f1: f64,
    /// `int lambda . (lambda_s x lambda_ss)`; equals `int kappa^2 (tau + offset)`.
    pub f1_triple: f64,
    /// Geometric value, absent where the curvature vanishes.
    pub f1_geometric: Option<f64>,
    /// `int |lambda_ss|^2 - 5/4 |lambda_s|^4`.
    pub f2: f64,
    /// Total spin `int lambda`.
    pub spin: [f64; 3],
}

pub fn functionals(state: &SpinField) -> Functionals {
    let [d1, d2, _] = state.derivatives();
    let g = &state.grid;
    let f0 = 0.5 * g.integrate(&d1.iter().map(|v| dot(*v, *v)).collect::<Vec<_>>());
    let f1_triple = g.integrate(
        &(0..state.len())
            .map(|j| dot(state.lam[j], cross(d1[j], d2[j])))
            .collect::<Vec<_>>(),
    );
    let f2 = g.integrate(
        &(0..state.len())
            .map(|j| {
                let a = dot(d1[j], d1[j]);
                dot(d2[j], d2[j]) - 1.25 * a * a
            })
            .collect::<Vec<_>>(),
    );
    let spin = state.form.cartan_coords(&moment_map(state));
    let f1_geometric = geometric_f1(state);
    Functionals {
        f0,
        f1: f1_geometric.unwrap_or(f1_triple),
        f1_triple,
        f1_geometric,
        f2,
        spin,
    }
}

/// `int kappa^2 tau` through the reconstructed frame and the torsion dictionary.
pub fn geometric_f1(state: &SpinField) -> Option<f64> {
    let rec = reconstruct_frame(state);
    let inv = geometric_invariants(&rec.controls, state.form);
    let tau = inv.tau_strict().ok()?;
    let vals: Vec<f64> = inv.kappa.iter().zip(&tau).map(|(k, t)| k * k * t).collect();
    Some(state.grid.integrate(&vals))
}

/// Frame recovered from a spin field.
#[derive(Debug, Clone)]
pub struct ReconstructedFrame {
    /// `R(0)`, mapping the case generator to `Lambda(0)`.
    pub origin: GroupElement,
    /// Absolute frames `R(s_j)` for `j = 0..=N`, with `R E R* = Lambda`.
    pub frames: Vec<GroupElement>,
    /// Periodic controls of the anchored frame `R(0)^{-1} R(s)`.
    pub controls: ControlSignal,
    /// Rotation angle of the parallel-transport holonomy about `Lambda(0)`.
    pub holonomy: f64,
}

/// Frame with `R E R* = Lambda`, built by parallel transport of a normal vector
/// (fourth-order Runge-Kutta on `n' = -(n . lambda') lambda`) followed by a
/// uniform rotation about the tangent that closes the frame. The resulting
/// controls are periodic with constant `u1 = -holonomy / L`.
pub fn reconstruct_frame(state: &SpinField) -> ReconstructedFrame {
    let n = state.len();
    let h = state.grid.h();
    let length = state.grid.length;
    let lam = &state.lam;
    let d1 = state.derivative(1);
    let half_lam = state.shifted(0.5 * h);
    let half_d1: Vec<[f64; 3]> = {
        let comps: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                shift_real(
                    &d1.iter().map(|v| v[k]).collect::<Vec<_>>(),
                    length,
                    0.5 * h,
                )
            })
            .collect();
        (0..n)
            .map(|j| [comps[0][j], comps[1][j], comps[2][j]])
            .collect()
    };
    let f = |nv: [f64; 3], l: [f64; 3], dl: [f64; 3]| scale(-dot(nv, dl), l);

    // initial normal: coordinate axis least aligned with lambda(0)
    let l0 = lam[0];
    let axis = (0..3)
        .min_by(|&a, &b| l0[a].abs().partial_cmp(&l0[b].abs()).unwrap())
        .unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let n0 = normalize(add3(e, scale(-dot(e, l0), l0)));

    let mut normals = Vec::with_capacity(n + 1);
    normals.push(n0);
    let mut cur = n0;
    for j in 0..n {
        let jp = (j + 1) % n;
        let (la, da) = (lam[j], d1[j]);
        let (lm, dm) = (half_lam[j], half_d1[j]);
        let (lb, db) = (lam[jp], d1[jp]);
        let k1 = f(cur, la, da);
        let k2 = f(add3(cur, scale(0.5 * h, k1)), lm, dm);
        let k3 = f(add3(cur, scale(0.5 * h, k2)), lm, dm);
        let k4 = f(add3(cur, scale(h, k3)), lb, db);
        let mut next = cur;
        for k in 0..3 {
            next[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        next = normalize(add3(next, scale(-dot(next, lb), lb)));
        normals.push(next);
        cur = next;
    }
    let b0 = cross(l0, n0);
    let n_end = normals[n];
    let beta = dot(n_end, b0).atan2(dot(n_end, n0));

    let mut frames = Vec::with_capacity(n + 1);
    let mut u1 = Vec::with_capacity(n);
    let mut u2 = Vec::with_capacity(n);
    let mut u3 = Vec::with_capacity(n);
    let mut prev: Option<GroupElement> = None;
    for (j, nv) in normals.iter().enumerate() {
        let l = lam[j % n];
        let gamma = -beta * j as f64 / n as f64;
        let bv = cross(l, *nv);
        let e2 = add3(scale(gamma.cos(), *nv), scale(gamma.sin(), bv));
        let e3 = cross(l, e2);
        let m = [
            [l[0], e2[0], e3[0]],
            [l[1], e2[1], e3[1]],
            [l[2], e2[2], e3[2]],
        ];
        let mut r = su2_from_rotation(&m);
        if let Some(p) = prev {
            if r.dist(&p) > (-r).dist(&p) {
                r = -r;
            }
        }
        prev = Some(r);
        frames.push(r);
        if j < n {
            let dl = d1[j];
            u1.push(-beta / length);
            u2.push(-dot(dl, e3));
            u3.push(dot(dl, e2));
        }
    }
    let controls = ControlSignal {
        grid: state.grid,
        u1,
        u2,
        u3,
    };
    ReconstructedFrame {
        origin: frames[0],
        frames,
        controls,
        holonomy: -beta,
    }
}
