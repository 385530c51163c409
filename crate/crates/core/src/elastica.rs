//! Extremals of the elastic problem: the six-dimensional Hamiltonian system,
//! its constants of motion, the elliptic and spherical reductions, and the
//! soliton construction on the energy level `H = epsilon`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::ControlSignal;
use crate::grid::PeriodicGrid;
use crate::hasimoto::{nls_residual, ComplexField};
use crate::io;
use crate::liealg::{bracket, AlgebraElement, SpaceForm};
use crate::ode::{dopri5, Tolerance, Trajectory};

/// Radius below which the reduction sphere is treated as degenerate.
pub const SPHERE_MIN: f64 = 1e-10;

/// `sin(theta)` below which the angle rates are flagged as singular.
pub const ANGLE_SINGULARITY: f64 = 1e-8;

/// Point of the extremal system: `h` pairs with the Cartan directions and `H`
/// with the rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalState {
    pub h: [f64; 3],
    #[serde(rename = "H")]
    pub hh: [f64; 3],
    pub form: SpaceForm,
}

impl ExtremalState {
    pub fn new(h: [f64; 3], hh: [f64; 3], form: SpaceForm) -> Self {
        ExtremalState { h, hh, form }
    }

    /// Ordering `(H1, H2, H3, h1, h2, h3)`.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.hh[0], self.hh[1], self.hh[2], self.h[0], self.h[1], self.h[2],
        ]
    }

    pub fn from_slice(v: &[f64], form: SpaceForm) -> Self {
        ExtremalState {
            hh: [v[0], v[1], v[2]],
            h: [v[3], v[4], v[5]],
            form,
        }
    }

    /// Control `u = H2 + i H3`.
    pub fn u(&self) -> C64 {
        C64::new(self.hh[1], self.hh[2])
    }

    /// `w = h2 + i h3`.
    pub fn w(&self) -> C64 {
        C64::new(self.h[1], self.h[2])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Hamiltonian vector field in the ordering of [`ExtremalState::to_array`].
pub fn extremal_rhs(x: &ExtremalState) -> [f64; 6] {
    let e = x.form.epsilon();
    let [h1, h2, h3] = x.h;
    let [p1, p2, p3] = x.hh;
    [
        0.0,
        -p3 * p1 + h3,
        p2 * p1 - h2,
        p3 * h2 - p2 * h3,
        -p3 * h1 + e * p3,
        p2 * h1 - e * p2,
    ]
}

/// The same vector field from `{x_i, H} = sum_j dH/dx_j {x_i, x_j}`, with the
/// coordinate brackets taken from the Lie algebra structure constants.
pub fn poisson_rhs(x: &ExtremalState) -> [f64; 6] {
    let v = x.to_array();
    // dH/dx for H = (H2^2 + H3^2)/2 + h1
    let grad = [0.0, v[1], v[2], 1.0, 0.0, 0.0];
    let coord =
        |e: &AlgebraElement| -> f64 { (0..3).map(|k| e.a[k] * v[k] + e.b[k] * v[3 + k]).sum() };
    let mut out = [0.0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..6)
            .map(|j| {
                grad[j]
                    * coord(&bracket(
                        &AlgebraElement::basis(i),
                        &AlgebraElement::basis(j),
                        x.form,
                    ))
            })
            .sum();
    }
    out
}

/// The four constants of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    #[serde(rename = "H")]
    pub hamiltonian: f64,
    #[serde(rename = "H1")]
    pub momentum: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
}

impl InvariantSet {
    pub fn max_diff(&self, o: &InvariantSet) -> f64 {
        [
            self.hamiltonian - o.hamiltonian,
            self.momentum - o.momentum,
            self.i1 - o.i1,
            self.i2 - o.i2,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }

    /// `J^2 = I1 - eps H1^2 - 2 eps H + eps^2`.
    pub fn sphere_radius_sq(&self, form: SpaceForm) -> f64 {
        let e = form.epsilon();
        self.i1 - e * self.momentum * self.momentum - 2.0 * e * self.hamiltonian + e * e
    }
}

pub fn invariants(x: &ExtremalState) -> InvariantSet {
    let e = x.form.epsilon();
    let [h1, h2, h3] = x.h;
    let [p1, p2, p3] = x.hh;
    InvariantSet {
        hamiltonian: 0.5 * (p2 * p2 + p3 * p3) + h1,
        momentum: p1,
        i1: h1 * h1 + h2 * h2 + h3 * h3 + e * (p1 * p1 + p2 * p2 + p3 * p3),
        i2: h1 * p1 + h2 * p2 + h3 * p3,
    }
}

/// Derivatives of `(H, H1, I1, I2)` along the vector field.
pub fn invariant_rates(x: &ExtremalState) -> [f64; 4] {
    let e = x.form.epsilon();
    let d = extremal_rhs(x);
    let [p1, p2, p3] = x.hh;
    let [h1, h2, h3] = x.h;
    [
        p2 * d[1] + p3 * d[2] + d[3],
        d[0],
        2.0 * (h1 * d[3] + h2 * d[4] + h3 * d[5]) + 2.0 * e * (p1 * d[0] + p2 * d[1] + p3 * d[2]),
        d[3] * p1 + h1 * d[0] + d[4] * p2 + h2 * d[1] + d[5] * p3 + h3 * d[2],
    ]
}

/// `kappa^2 tau` of the projected curve: `Im(conj(u) u') - offset |u|^2`.
pub fn kappa_sq_tau(x: &ExtremalState) -> f64 {
    let d = extremal_rhs(x);
    let u = x.u();
    let du = C64::new(d[1], d[2]);
    (u.conj() * du).im - x.form.torsion_offset() * u.norm_sqr()
}

/// Closed form of [`kappa_sq_tau`] in terms of the invariants and `h1`:
/// `2 H1 H - I2 - H1 h1 - offset kappa^2`.
pub fn kappa_sq_tau_closed_form(x: &ExtremalState) -> f64 {
    let inv = invariants(x);
    2.0 * inv.momentum * inv.hamiltonian
        - inv.i2
        - inv.momentum * x.h[0]
        - x.form.torsion_offset() * x.u().norm_sqr()
}

/// Constant `2 H1 H - I2` claimed for `kappa^2 tau`; it differs from the
/// pointwise value by `H1 h1` (plus the spherical offset term).
pub fn kappa_sq_tau_claimed(inv: &InvariantSet) -> f64 {
    2.0 * inv.momentum * inv.hamiltonian - inv.i2
}

/// Coefficients of `(h1')^2 = 2 h1^3 + c1 h1^2 + c2 h1 + c3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, h1: f64) -> f64 {
        ((2.0 * h1 + self.c1) * h1 + self.c2) * h1 + self.c3
    }
}

/// Coefficients from expanding `2(H - h1)(I1 - eps H1^2 - 2 eps (H - h1) - h1^2) - (I2 - h1 H1)^2`.
pub fn cubic_coefficients(inv: &InvariantSet, form: SpaceForm) -> CubicCoefficients {
    let e = form.epsilon();
    let (h, p, i1, i2) = (inv.hamiltonian, inv.momentum, inv.i1, inv.i2);
    CubicCoefficients {
        c1: -(p * p + 2.0 * h + 4.0 * e),
        c2: 2.0 * i2 * p + 2.0 * e * p * p + 8.0 * e * h - 2.0 * i1,
        c3: 2.0 * h * (i1 - e * p * p - 2.0 * e * h) - i2 * i2,
    }
}

/// Coefficients as printed in the source derivation, kept for comparison; they
/// disagree with the expansion in `c1` and `c2`.
pub fn cubic_coefficients_printed(inv: &InvariantSet, form: SpaceForm) -> CubicCoefficients {
    let e = form.epsilon();
    let (h, p, i1, i2) = (inv.hamiltonian, inv.momentum, inv.i1, inv.i2);
    CubicCoefficients {
        c1: -(p * p - 2.0 * h - 4.0 * e),
        c2: 2.0 * i2 * p - 2.0 * e * p * p + 4.0 * e * h - 2.0 * i1,
        c3: 2.0 * h * (i1 - e * p * p - 2.0 * e * h) - i2 * i2,
    }
}

/// `sin(theta)` below which nodes are excluded from the rate residuals: the
/// model rates carry a `1/sin^2` factor that amplifies invariant drift.
pub const REGULAR_SIN: f64 = 0.1;

/// Integrated extremal with continuous output.
#[derive(Debug, Clone)]
pub struct ExtremalTrajectory {
    pub form: SpaceForm,
    pub ode: Trajectory,
}

impl ExtremalTrajectory {
    pub fn state_at(&self, s: f64) -> ExtremalState {
        ExtremalState::from_slice(&self.ode.eval(s), self.form)
    }

    /// States at the accepted integrator nodes.
    pub fn nodes(&self) -> Vec<(f64, ExtremalState)> {
        self.ode
            .s
            .iter()
            .zip(&self.ode.y)
            .map(|(s, y)| (*s, ExtremalState::from_slice(y, self.form)))
            .collect()
    }

    /// States at `count` equally spaced points.
    pub fn sample(&self, count: usize) -> Vec<(f64, ExtremalState)> {
        let (s, y) = self.ode.sample(count);
        s.into_iter()
            .zip(y)
            .map(|(s, y)| (s, ExtremalState::from_slice(&y, self.form)))
            .collect()
    }

    /// Largest deviation of `(H, H1, I1, I2)` from their initial values over the
    /// accepted nodes.
    pub fn invariant_drift(&self) -> f64 {
        let nodes = self.nodes();
        let inv0 = invariants(&nodes[0].1);
        nodes
            .iter()
            .fold(0.0, |m, (_, x)| m.max(invariants(x).max_diff(&inv0)))
    }

    /// CSV with columns `s, h1, h2, h3, H1, H2, H3, H, I1, I2, kappa2, kappa2tau`.
    pub fn to_csv(&self, count: usize) -> String {
        let rows: Vec<Vec<f64>> = self
            .sample(count)
            .iter()
            .map(|(s, x)| {
                let inv = invariants(x);
                vec![
                    *s,
                    x.h[0],
                    x.h[1],
                    x.h[2],
                    x.hh[0],
                    x.hh[1],
                    x.hh[2],
                    inv.hamiltonian,
                    inv.i1,
                    inv.i2,
                    x.u().norm_sqr(),
                    kappa_sq_tau(x),
                ]
            })
            .collect();
        io::csv_string(
            &[
                "s",
                "h1",
                "h2",
                "h3",
                "H1",
                "H2",
                "H3",
                "H",
                "I1",
                "I2",
                "kappa2",
                "kappa2tau",
            ],
            &rows,
        )
    }
}

/// Adaptive fifth-order integration of the extremal system over `span`
/// (negative spans integrate backwards).
pub fn integrate_extremal(x0: &ExtremalState, span: f64, tol: f64) -> Result<ExtremalTrajectory> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} outside [1e-14, 1e-6]"
        )));
    }
    if !x0.is_finite() {
        return Err(Error::InvalidInput("non-finite extremal state".into()));
    }
    let form = x0.form;
    let f = move |_s: f64, y: &[f64]| extremal_rhs(&ExtremalState::from_slice(y, form)).to_vec();
    let ode = dopri5(&f, 0.0, &x0.to_array(), span, Tolerance::uniform(tol))?;
    Ok(ExtremalTrajectory { form, ode })
}

/// Polar description of `(h1 - eps, w)` on the sphere of radius `J`.
#[derive(Debug, Clone, Serialize)]
pub struct SphereReduction {
    #[serde(rename = "J")]
    pub j: f64,
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Max of `|(h1 - eps)^2 + |w|^2 - J^2|`.
    pub sphere_residual: f64,
    /// Max residual of the `phi` rate equation over nodes with `sin(theta) >= REGULAR_SIN`.
    pub phi_rate_residual: f64,
    /// Max residual of the `(theta')^2` equation over the same nodes.
    pub theta_rate_residual: f64,
    /// Nodes where `sin(theta) < ANGLE_SINGULARITY`.
    pub singular: Vec<usize>,
}

/// Angles along `count` equally spaced samples of a trajectory together with the
/// residuals of the reduced equations; rates come from the vector field.
pub fn sphere_reduction(traj: &ExtremalTrajectory, count: usize) -> Result<SphereReduction> {
    let form = traj.form;
    let e = form.epsilon();
    let samples = traj.sample(count);
    let inv = invariants(&samples[0].1);
    let j2 = inv.sphere_radius_sq(form);
    let j = j2.max(0.0).sqrt();
    if j <= SPHERE_MIN {
        return Err(Error::DegenerateSphere(j));
    }
    let (hh, i2, p) = (inv.hamiltonian, inv.i2, inv.momentum);
    let mut out = SphereReduction {
        j,
        s: Vec::with_capacity(count),
        theta: Vec::with_capacity(count),
        phi: Vec::with_capacity(count),
        sphere_residual: 0.0,
        phi_rate_residual: 0.0,
        theta_rate_residual: 0.0,
        singular: Vec::new(),
    };
    let mut prev_phi: Option<f64> = None;
    for (idx, (s, x)) in samples.iter().enumerate() {
        let w = x.w();
        let c = x.h[0] - e;
        out.sphere_residual = out.sphere_residual.max((c * c + w.norm_sqr() - j2).abs());
        let cos_t = (c / j).clamp(-1.0, 1.0);
        let theta = cos_t.acos();
        let mut phi = w.arg();
        if let Some(pp) = prev_phi {
            phi +=
                (2.0 * std::f64::consts::PI) * ((pp - phi) / (2.0 * std::f64::consts::PI)).round();
        }
        prev_phi = Some(phi);
        out.s.push(*s);
        out.theta.push(theta);
        out.phi.push(phi);
        let sin_t = theta.sin();
        if sin_t < ANGLE_SINGULARITY || w.norm_sqr() == 0.0 {
            out.singular.push(idx);
            continue;
        }
        if sin_t < REGULAR_SIN {
            continue;
        }
        let d = extremal_rhs(x);
        let dw = C64::new(d[4], d[5]);
        let phi_rate = (w.conj() * dw).im / w.norm_sqr();
        let theta_rate = -d[3] / (j * sin_t);
        let jc = j * cos_t;
        let s2 = j2 * sin_t * sin_t;
        let phi_model = jc * (i2 - p * (e + jc)) / s2;
        let q = i2 - p * (e + jc);
        let theta_model = 2.0 * (hh - e - jc) - q * q / s2;
        out.phi_rate_residual = out.phi_rate_residual.max((phi_rate - phi_model).abs());
        out.theta_rate_residual = out
            .theta_rate_residual
            .max((theta_rate * theta_rate - theta_model).abs());
    }
    Ok(out)
}

/// Targets for a soliton search on the level `H = eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonTargets {
    #[serde(rename = "H1")]
    pub momentum: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    /// Initial `h1`; searched when absent.
    #[serde(default)]
    pub h1: Option<f64>,
}

/// Initial state on `H = eps` with the requested invariants, `u(0)` real and
/// positive. Returns the slack `1 - |cos chi|` of the angle between `u` and `w`.
fn level_state(t: &SolitonTargets, form: SpaceForm, h1: f64) -> Option<(ExtremalState, f64)> {
    let e = form.epsilon();
    let u2 = 2.0 * (e - h1);
    if u2 < 0.0 {
        return None;
    }
    let w2 = t.i1 - h1 * h1 - e * (t.momentum * t.momentum + u2);
    if w2 < 0.0 {
        return None;
    }
    let (um, wm) = (u2.sqrt(), w2.sqrt());
    let dot = t.i2 - h1 * t.momentum;
    let cos_chi = if um * wm > 0.0 {
        dot / (um * wm)
    } else if dot.abs() < 1e-14 {
        1.0
    } else {
        return None;
    };
    if cos_chi.abs() > 1.0 {
        return None;
    }
    let chi = cos_chi.acos();
    let x = ExtremalState::new(
        [h1, wm * chi.cos(), wm * chi.sin()],
        [t.momentum, um, 0.0],
        form,
    );
    Some((x, 1.0 - cos_chi.abs()))
}

/// Feasible initial state for the targets, searching `h1` over `[eps - 10, eps]`
/// for the largest angular slack when no `h1` is given.
pub fn soliton_state(t: &SolitonTargets, form: SpaceForm) -> Result<ExtremalState> {
    let e = form.epsilon();
    if let Some(h1) = t.h1 {
        return level_state(t, form, h1).map(|p| p.0).ok_or_else(|| {
            Error::InfeasibleLevel(format!(
                "no real state with h1 = {h1} on H = {e} matches {t:?}"
            ))
        });
    }
    let mut best: Option<(ExtremalState, f64)> = None;
    for k in 0..=4000 {
        let h1 = e - 10.0 * k as f64 / 4000.0;
        if let Some((x, slack)) = level_state(t, form, h1) {
            if best.map_or(true, |b| slack > b.1) {
                best = Some((x, slack));
            }
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| Error::InfeasibleLevel(format!("no real state on H = {e} matches {t:?}")))
}

/// Soliton candidate: extremal on `H = eps` with wave speed `xi = -H1`.
#[derive(Debug, Clone)]
pub struct SolitonCandidate {
    pub state0: ExtremalState,
    pub xi: f64,
    pub invariants: InvariantSet,
    pub trajectory: ExtremalTrajectory,
    /// Reduced controls `(0, H2, H3)` on an open grid over the span.
    pub controls: ControlSignal,
}

#[derive(Serialize)]
struct CandidateJson<'a> {
    state0: &'a ExtremalState,
    xi: f64,
    invariants: &'a InvariantSet,
    span: f64,
    n: usize,
}

impl SolitonCandidate {
    pub fn to_json(&self) -> Result<String> {
        io::json_string(&CandidateJson {
            state0: &self.state0,
            xi: self.xi,
            invariants: &self.invariants,
            span: self.controls.grid.length,
            n: self.controls.grid.n,
        })
    }

    /// `psi(s_j, t) = u(a + s_j + xi t)` on an open grid of the given length;
    /// the offset `a` centres the sampled window inside the trajectory.
    pub fn travelling_wave(
        &self,
        xi: f64,
        length: f64,
        n: usize,
        times: &[f64],
    ) -> Result<ComplexField> {
        let grid = PeriodicGrid::open(length, n)?;
        let span = self.trajectory.ode.end();
        let (tmin, tmax) = times
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| {
                (a.min(*t), b.max(*t))
            });
        let lo = (xi * tmin).min(xi * tmax);
        let hi = (xi * tmin).max(xi * tmax);
        let a = 0.5 * (span - length - lo - hi);
        if a + lo < 0.0 || a + length + hi > span {
            return Err(Error::InvalidInput(format!(
                "window of length {length} moving at {xi} does not fit in span {span}"
            )));
        }
        let psi = times
            .iter()
            .map(|t| {
                grid.nodes()
                    .iter()
                    .map(|s| self.trajectory.state_at(a + s + xi * t).u())
                    .collect()
            })
            .collect();
        ComplexField::new(grid, times.to_vec(), psi)
    }
}

pub fn soliton_candidate(
    t: &SolitonTargets,
    form: SpaceForm,
    span: f64,
    n: usize,
    tol: f64,
) -> Result<SolitonCandidate> {
    let state0 = soliton_state(t, form)?;
    let trajectory = integrate_extremal(&state0, span, tol)?;
    let grid = PeriodicGrid::open(span, n)?;
    let states: Vec<ExtremalState> = grid
        .nodes()
        .iter()
        .map(|s| trajectory.state_at(*s))
        .collect();
    let controls = ControlSignal::new(
        grid,
        vec![0.0; n + 1],
        states.iter().map(|x| x.hh[1]).collect(),
        states.iter().map(|x| x.hh[2]).collect(),
    )?;
    let inv = invariants(&state0);
    Ok(SolitonCandidate {
        state0,
        xi: -state0.hh[0],
        invariants: inv,
        trajectory,
        controls,
    })
}

/// Which target is varied in a closure scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanParameter {
    H1,
    I1,
    I2,
}

/// Closure integral over one period of `h1` for each scanned value.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureScan {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
    /// `int J cos(theta) (I2 - H1 (eps + J cos theta)) / (J^2 sin^2 theta) ds`.
    pub integral: Vec<Option<f64>>,
    /// Variant with `I2 + H1` in place of `I2 - eps H1`; identical when `eps = -1`.
    pub integral_variant: Vec<Option<f64>>,
    /// Parameter values where the integral changes sign continuously, refined
    /// by bisection.
    pub roots: Vec<f64>,
    /// Sign changes that bisect onto a jump (period detection switching branch
    /// or a pole of the integrand) rather than a zero.
    pub jumps: Vec<f64>,
}

fn with_param(t: &SolitonTargets, p: ScanParameter, v: f64) -> SolitonTargets {
    let mut o = *t;
    match p {
        ScanParameter::H1 => o.momentum = v,
        ScanParameter::I1 => o.i1 = v,
        ScanParameter::I2 => o.i2 = v,
    }
    o
}

/// One period of `h1` starting from a maximum, found from sign changes of
/// `h1'` along a trajectory of length `max_span`.
fn h1_period(
    x0: &ExtremalState,
    max_span: f64,
    tol: f64,
) -> Option<(ExtremalTrajectory, f64, f64)> {
    let traj = integrate_extremal(x0, max_span, tol).ok()?;
    let dh = |s: f64| extremal_rhs(&traj.state_at(s))[3];
    let m = 20000;
    let step = max_span / m as f64;
    let mut maxima = Vec::new();
    let mut prev = dh(0.0);
    for k in 1..=m {
        let s = k as f64 * step;
        let cur = dh(s);
        if prev > 0.0 && cur <= 0.0 {
            let (mut a, mut b) = (s - step, s);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if dh(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            maxima.push(0.5 * (a + b));
            if maxima.len() == 2 {
                break;
            }
        }
        prev = cur;
    }
    if maxima.len() < 2 {
        return None;
    }
    Some((traj, maxima[0], maxima[1]))
}

fn closure_integrals(
    t: &SolitonTargets,
    form: SpaceForm,
    max_span: f64,
    tol: f64,
) -> (Option<f64>, Option<f64>) {
    let Ok(x0) = soliton_state(t, form) else {
        return (None, None);
    };
    let Some((traj, a, b)) = h1_period(&x0, max_span, tol) else {
        return (None, None);
    };
    let inv = invariants(&x0);
    let e = form.epsilon();
    let j2 = inv.sphere_radius_sq(form);
    if j2 <= SPHERE_MIN * SPHERE_MIN {
        return (None, None);
    }
    let j = j2.sqrt();
    let (p, i2) = (inv.momentum, inv.i2);
    let m = 4000;
    let hstep = (b - a) / m as f64;
    let mut f1 = Vec::with_capacity(m + 1);
    let mut f2 = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let x = traj.state_at(a + k as f64 * hstep);
        let jc = x.h[0] - e;
        let s2 = j2 - jc * jc;
        if s2 < (j * ANGLE_SINGULARITY).powi(2) {
            return (None, None);
        }
        f1.push(jc * (i2 - p * (e + jc)) / s2);
        f2.push(jc * (i2 + p - p * jc) / s2);
    }
    (
        Some(crate::grid::simpson(&f1, hstep)),
        Some(crate::grid::simpson(&f2, hstep)),
    )
}

/// Scans one target over `values`, integrating each candidate for up to
/// `max_span` to find a full period of `h1`, and bisects sign changes of the
/// closure integral.
pub fn closure_scan(
    base: &SolitonTargets,
    form: SpaceForm,
    parameter: ScanParameter,
    values: &[f64],
    max_span: f64,
    tol: f64,
) -> ClosureScan {
    let eval = |v: f64| closure_integrals(&with_param(base, parameter, v), form, max_span, tol);
    let pairs: Vec<(Option<f64>, Option<f64>)> = values.iter().map(|v| eval(*v)).collect();
    let integral: Vec<Option<f64>> = pairs.iter().map(|p| p.0).collect();
    let integral_variant: Vec<Option<f64>> = pairs.iter().map(|p| p.1).collect();
    let mut roots = Vec::new();
    let mut jumps = Vec::new();
    for k in 1..values.len() {
        if let (Some(fa), Some(fb)) = (integral[k - 1], integral[k]) {
            if fa == 0.0 {
                roots.push(values[k - 1]);
            } else if fa * fb < 0.0 {
                let (mut a, mut b, mut ga) = (values[k - 1], values[k], fa);
                let scale = fa.abs().max(fb.abs());
                let mut ok = true;
                for _ in 0..40 {
                    let mid = 0.5 * (a + b);
                    match eval(mid).0 {
                        Some(gm) if gm * ga > 0.0 => {
                            a = mid;
                            ga = gm;
                        }
                        Some(_) => b = mid,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    let mid = 0.5 * (a + b);
                    match eval(mid).0 {
                        Some(g) if g.abs() <= 1e-6 * scale => roots.push(mid),
                        _ => jumps.push(mid),
                    }
                }
            }
        }
    }
    ClosureScan {
        parameter,
        values: values.to_vec(),
        integral,
        integral_variant,
        roots,
        jumps,
    }
}

/// One resolution level of a travelling-wave residual study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Intervals of the spatial window.
    pub n: usize,
    /// Time slices over `[0, T]`.
    pub slices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: usize,
    pub slices: usize,
    pub ds: f64,
    pub dt: f64,
    pub residual: f64,
    /// `log(r_prev / r) / log(ds_prev / ds)`; absent on the first row.
    pub order: Option<f64>,
}

/// NLS residual of `psi(s, t) = u(a + s + xi t)` on a fixed window and time
/// interval, at each resolution.
pub fn travelling_wave_residuals(
    cand: &SolitonCandidate,
    xi: f64,
    length: f64,
    t_final: f64,
    levels: &[Resolution],
) -> Result<Vec<ResidualRow>> {
    let mut rows: Vec<ResidualRow> = Vec::with_capacity(levels.len());
    for lv in levels {
        if lv.slices < 3 {
            return Err(Error::InsufficientSlices(lv.slices));
        }
        let dt = t_final / (lv.slices - 1) as f64;
        let times: Vec<f64> = (0..lv.slices).map(|k| k as f64 * dt).collect();
        let field = cand.travelling_wave(xi, length, lv.n, &times)?;
        let residual = nls_residual(&field, C64::new(0.0, 0.0))?;
        let ds = length / lv.n as f64;
        let order = rows.last().and_then(|p| {
            (p.residual > 0.0 && residual > 0.0)
                .then(|| (p.residual / residual).ln() / (p.ds / ds).ln())
        });
        rows.push(ResidualRow {
            n: lv.n,
            slices: lv.slices,
            ds,
            dt,
            residual,
            order,
        });
    }
    Ok(rows)
}

/// Checks along one extremal: invariant drift, the `kappa^2 tau` identities,
/// the cubic for `h1`, and the sphere reduction.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalReport {
    pub invariants: InvariantSet,
    pub invariant_drift: f64,
    /// Max `|kappa^2 tau - (2 H1 H - I2 - H1 h1 - offset kappa^2)|`.
    pub kappa_sq_tau_identity: f64,
    /// Max `|kappa^2 tau - (2 H1 H - I2)|`.
    pub kappa_sq_tau_claimed: f64,
    /// Max `|(h1')^2 - cubic(h1)|` with the expanded coefficients.
    pub cubic_residual: f64,
    /// Same with the coefficients as printed.
    pub cubic_residual_printed: f64,
    pub sphere_residual: f64,
    pub phi_rate_residual: f64,
    pub theta_rate_residual: f64,
    pub singular_samples: usize,
}

pub fn extremal_report(traj: &ExtremalTrajectory, count: usize) -> Result<ExtremalReport> {
    let samples = traj.sample(count);
    let inv = invariants(&samples[0].1);
    let cubic = cubic_coefficients(&inv, traj.form);
    let printed = cubic_coefficients_printed(&inv, traj.form);
    let claimed = kappa_sq_tau_claimed(&inv);
    let (mut ident, mut claim, mut cub, mut cubp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (_, x) in &samples {
        let k = kappa_sq_tau(x);
        ident = ident.max((k - kappa_sq_tau_closed_form(x)).abs());
        claim = claim.max((k - claimed).abs());
        let dh1 = extremal_rhs(x)[3];
        cub = cub.max((dh1 * dh1 - cubic.eval(x.h[0])).abs());
        cubp = cubp.max((dh1 * dh1 - printed.eval(x.h[0])).abs());
    }
    let red = sphere_reduction(traj, count)?;
    Ok(ExtremalReport {
        invariants: inv,
        invariant_drift: traj.invariant_drift(),
        kappa_sq_tau_identity: ident,
        kappa_sq_tau_claimed: claim,
        cubic_residual: cub,
        cubic_residual_printed: cubp,
        sphere_residual: red.sphere_residual,
        phi_rate_residual: red.phi_rate_residual,
        theta_rate_residual: red.theta_rate_residual,
        singular_samples: red.singular.len(),
    })
}
