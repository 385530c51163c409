//! The Hasimoto correspondence between framed curves and the cubic Schroedinger
//! equation, and the zero-curvature reconstruction going back.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::ControlSignal;
use crate::grid::{
    cumulative_midpoint, fd4_open, lagrange_shift, shift_twisted, twisted_derivative, PeriodicGrid,
};
use crate::io;
use crate::liealg::{
    bracket, exp_algebra, matrix_bracket, AlgebraElement, GroupElement, Mat2, SpaceForm,
};
use crate::magnetic::{
    heisenberg_rhs, reconstruct_frame, FlowTrajectory, ReconstructedFrame, SpinField,
};

/// Complex field `psi(s_j, t_k)` stored slice by slice. On periodic grids each
/// slice may be quasi-periodic: `psi(s + L) = e^{i twist} psi(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: PeriodicGrid,
    pub times: Vec<f64>,
    pub psi: Vec<Vec<C64>>,
    pub twist: Vec<f64>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    length: f64,
    n: usize,
    periodic: bool,
    times: &'a [f64],
    twist: &'a [f64],
}

impl ComplexField {
    pub fn new(grid: PeriodicGrid, times: Vec<f64>, psi: Vec<Vec<C64>>) -> Result<Self> {
        let twist = vec![0.0; times.len()];
        Self::with_twist(grid, times, psi, twist)
    }

    pub fn with_twist(
        grid: PeriodicGrid,
        times: Vec<f64>,
        psi: Vec<Vec<C64>>,
        twist: Vec<f64>,
    ) -> Result<Self> {
        if psi.len() != times.len() || twist.len() != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} slices, {} times, {} twists",
                psi.len(),
                times.len(),
                twist.len()
            )));
        }
        for p in &psi {
            grid.check_len(p.len(), "field slice")?;
        }
        Ok(ComplexField {
            grid,
            times,
            psi,
            twist,
        })
    }

    /// Field sampled from a closed-form `f(s, t)`.
    pub fn from_fn(
        grid: PeriodicGrid,
        times: &[f64],
        twist: f64,
        f: impl Fn(f64, f64) -> C64,
    ) -> Self {
        let nodes = grid.nodes();
        let psi = times
            .iter()
            .map(|&t| nodes.iter().map(|&s| f(s, t)).collect())
            .collect();
        ComplexField {
            grid,
            times: times.to_vec(),
            psi,
            twist: vec![twist; times.len()],
        }
    }

    /// Plane wave `a e^{i(k s - omega t)}` with `omega = k^2 - a^2/2`.
    pub fn plane_wave(grid: PeriodicGrid, times: &[f64], a: f64, k: f64) -> Self {
        let omega = k * k - 0.5 * a * a;
        let twist = if grid.periodic { k * grid.length } else { 0.0 };
        Self::from_fn(grid, times, twist, |s, t| {
            C64::from_polar(a, k * s - omega * t)
        })
    }

    /// Bright soliton `2B sech(B (s - s0)) e^{i B^2 t}`.
    pub fn sech_soliton(grid: PeriodicGrid, times: &[f64], b: f64, s0: f64) -> Self {
        Self::from_fn(grid, times, 0.0, |s, t| {
            C64::from_polar(2.0 * b / (b * (s - s0)).cosh(), b * b * t)
        })
    }

    pub fn slices(&self) -> usize {
        self.times.len()
    }

    /// Constant phase rotation `e^{i theta0} psi`.
    pub fn rotated(&self, theta0: f64) -> Self {
        let w = C64::from_polar(1.0, theta0);
        let mut out = self.clone();
        out.psi.iter_mut().flatten().for_each(|z| *z *= w);
        out
    }

    /// `s`-derivative of slice `k`.
    pub fn s_derivative(&self, k: usize, order: u32) -> Vec<C64> {
        complex_derivative(&self.grid, &self.psi[k], self.twist[k], order)
    }

    /// `int |psi|^2 ds` per slice.
    pub fn mass(&self) -> Vec<f64> {
        self.psi
            .iter()
            .map(|p| {
                self.grid
                    .integrate(&p.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
            })
            .collect()
    }

    /// CSV with columns `t, s, re, im`.
    pub fn to_csv(&self) -> String {
        let nodes = self.grid.nodes();
        let rows: Vec<[f64; 4]> = self
            .times
            .iter()
            .zip(&self.psi)
            .flat_map(|(&t, p)| nodes.iter().zip(p).map(move |(&s, z)| [t, s, z.re, z.im]))
            .collect();
        io::csv_string(&["t", "s", "re", "im"], &rows)
    }

    /// JSON manifest describing the grid, times and twists.
    pub fn manifest(&self) -> Result<String> {
        io::json_string(&Manifest {
            length: self.grid.length,
            n: self.grid.n,
            periodic: self.grid.periodic,
            times: &self.times,
            twist: &self.twist,
        })
    }
}

/// Derivative of complex samples: twisted spectral on periodic grids, fourth-order
/// differences otherwise.
pub fn complex_derivative(grid: &PeriodicGrid, values: &[C64], twist: f64, order: u32) -> Vec<C64> {
    if grid.periodic {
        return twisted_derivative(values, grid.length, twist, order);
    }
    let mut re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = values.iter().map(|z| z.im).collect();
    for _ in 0..order {
        re = fd4_open(&re, grid.h());
        im = fd4_open(&im, grid.h());
    }
    re.into_iter()
        .zip(im)
        .map(|(a, b)| C64::new(a, b))
        .collect()
}

fn complex_shift(grid: &PeriodicGrid, values: &[C64], twist: f64, offset: f64) -> Vec<C64> {
    if grid.periodic {
        return shift_twisted(values, grid.length, twist, offset);
    }
    let th = offset / grid.h();
    let re = lagrange_shift(&values.iter().map(|z| z.re).collect::<Vec<_>>(), th);
    let im = lagrange_shift(&values.iter().map(|z| z.im).collect::<Vec<_>>(), th);
    re.into_iter()
        .zip(im)
        .map(|(a, b)| C64::new(a, b))
        .collect()
}

/// `psi = (u2 + i u3) exp(i int_0^s u1)` per time slice; the phase uses the
/// cumulative midpoint rule and the slice twist is `int_0^L u1`.
pub fn hasimoto_map(controls: &[ControlSignal], times: &[f64]) -> Result<ComplexField> {
    if controls.len() != times.len() || controls.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} control slices for {} times",
            controls.len(),
            times.len()
        )));
    }
    let grid = controls[0].grid;
    if !grid.periodic {
        return Err(Error::InvalidInput(
            "the Hasimoto map needs periodic controls".into(),
        ));
    }
    let h = grid.h();
    let mut psi = Vec::with_capacity(times.len());
    let mut twist = Vec::with_capacity(times.len());
    for c in controls {
        if c.grid != grid {
            return Err(Error::InvalidInput(
                "control slices use different grids".into(),
            ));
        }
        let mid = grid.shifted(&c.u1, 0.5 * h);
        let phase = cumulative_midpoint(&mid, h, grid.n + 1);
        twist.push(phase[grid.n]);
        psi.push(
            (0..grid.n)
                .map(|j| C64::new(c.u2[j], c.u3[j]) * C64::from_polar(1.0, phase[j]))
                .collect(),
        );
    }
    ComplexField::with_twist(grid, times.to_vec(), psi, twist)
}

/// Pointwise NLS defect `psi_t - i psi_ss - (i/2)|psi|^2 (psi + c)` on the
/// interior slices `1 .. K-1` (centered time differences).
pub fn nls_defect(field: &ComplexField, c: C64) -> Result<Vec<Vec<C64>>> {
    let k_count = field.slices();
    if k_count < 3 {
        return Err(Error::InsufficientSlices(k_count));
    }
    let half = C64::new(0.0, 0.5);
    Ok((1..k_count - 1)
        .map(|k| {
            let (tm, t0, tp) = (field.times[k - 1], field.times[k], field.times[k + 1]);
            let dss = field.s_derivative(k, 2);
            let p = &field.psi[k];
            (0..p.len())
                .map(|j| {
                    let dt = centered(field.psi[k - 1][j], p[j], field.psi[k + 1][j], tm, t0, tp);
                    dt - C64::i() * dss[j] - half * p[j].norm_sqr() * (p[j] + c)
                })
                .collect()
        })
        .collect())
}

/// Three-point derivative at `t0` on a possibly non-uniform stencil.
pub(crate) fn centered<T>(fm: T, f0: T, fp: T, tm: f64, t0: f64, tp: f64) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let (a, b) = (t0 - tm, tp - t0);
    fm * (-b / (a * (a + b))) + f0 * ((b - a) / (a * b)) + fp * (a / (b * (a + b)))
}

/// Discrete L2 norm of samples over the interior slices.
pub(crate) fn slab_norm(grid: &PeriodicGrid, times: &[f64], sq: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for (i, row) in sq.iter().enumerate() {
        let k = i + 1;
        let w = 0.5 * (times[k + 1] - times[k - 1]);
        acc += w * grid.integrate(row);
    }
    acc.sqrt()
}

/// Discrete L2 norm over `(s, t)` of the NLS defect.
pub fn nls_residual(field: &ComplexField, c: C64) -> Result<f64> {
    let d = nls_defect(field, c)?;
    let sq: Vec<Vec<f64>> = d
        .iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    Ok(slab_norm(&field.grid, &field.times, &sq))
}

/// Removes a time-dependent phase `psi -> e^{-i phi(t)} psi` whose rate is the
/// component of the NLS defect along `i psi`. Frames reconstructed independently
/// at each time carry such a phase through the normal chosen at `s = 0`.
pub fn remove_phase_drift(field: &ComplexField, c: C64) -> Result<ComplexField> {
    remove_phase_drift_with(field, |f| nls_defect(f, c))
}

/// Phase removal against an arbitrary defect evaluated on the interior slices.
pub fn remove_phase_drift_with(
    field: &ComplexField,
    defect: impl Fn(&ComplexField) -> Result<Vec<Vec<C64>>>,
) -> Result<ComplexField> {
    let d = defect(field)?;
    let g = &field.grid;
    let k_count = field.slices();
    let mut rate = vec![0.0; k_count];
    for (i, row) in d.iter().enumerate() {
        let p = &field.psi[i + 1];
        let num: Vec<f64> = p
            .iter()
            .zip(row)
            .map(|(z, r)| ((C64::i() * z).conj() * r).re)
            .collect();
        let den: Vec<f64> = p.iter().map(|z| z.norm_sqr()).collect();
        let den = g.integrate(&den);
        rate[i + 1] = if den > 0.0 {
            g.integrate(&num) / den
        } else {
            0.0
        };
    }
    // linear extrapolation to the end slices
    let t = &field.times;
    let lin =
        |r: &[f64], a: usize, b: usize, x: f64| r[a] + (r[b] - r[a]) * (x - t[a]) / (t[b] - t[a]);
    rate[0] = if k_count > 3 {
        lin(&rate, 1, 2, t[0])
    } else {
        rate[1]
    };
    rate[k_count - 1] = if k_count > 3 {
        lin(&rate, k_count - 3, k_count - 2, t[k_count - 1])
    } else {
        rate[1]
    };
    let mut out = field.clone();
    let mut phi = 0.0;
    for k in 0..k_count {
        if k > 0 {
            phi += 0.5 * (t[k] - t[k - 1]) * (rate[k] + rate[k - 1]);
        }
        let w = C64::from_polar(1.0, -phi);
        out.psi[k].iter_mut().for_each(|z| *z *= w);
    }
    Ok(out)
}

/// Lax pair on the `(s, t)` slab, `su(2)`-valued.
#[derive(Debug, Clone)]
pub struct ZeroCurvaturePair {
    pub grid: PeriodicGrid,
    pub times: Vec<f64>,
    pub u: Vec<Vec<AlgebraElement>>,
    pub v: Vec<Vec<AlgebraElement>>,
    /// Twist of the off-diagonal entries, as for the generating field.
    pub twist: Vec<f64>,
}

/// `U = 1/2 [[0, psi], [-conj psi, 0]]`.
pub fn u_matrix(psi: C64) -> Mat2 {
    Mat2::new(
        C64::new(0.0, 0.0),
        0.5 * psi,
        -0.5 * psi.conj(),
        C64::new(0.0, 0.0),
    )
}

/// `V = 1/2 [[-i (|psi|^2 + Re c)/2, i psi_s], [i conj psi_s, i (|psi|^2 + Re c)/2]]`.
pub fn v_matrix(psi: C64, psi_s: C64, c: C64) -> Mat2 {
    let d = 0.25 * (psi.norm_sqr() + c.re);
    Mat2::new(
        C64::new(0.0, -d),
        C64::new(0.0, 0.5) * psi_s,
        C64::new(0.0, 0.5) * psi_s.conj(),
        C64::new(0.0, d),
    )
}

fn algebra(m: &Mat2) -> AlgebraElement {
    AlgebraElement::from_matrix(m, f64::INFINITY).expect("infinite tolerance")
}

/// Builds the Lax pair from a field; `c` shifts the diagonal of `V` by a real
/// phase rate (only its real part enters, as a rotation of `psi`).
pub fn zero_curvature_from_nls(field: &ComplexField, c: C64) -> ZeroCurvaturePair {
    let mut u = Vec::with_capacity(field.slices());
    let mut v = Vec::with_capacity(field.slices());
    for k in 0..field.slices() {
        let ds = field.s_derivative(k, 1);
        u.push(
            field.psi[k]
                .iter()
                .map(|p| algebra(&u_matrix(*p)))
                .collect(),
        );
        v.push(
            field.psi[k]
                .iter()
                .zip(&ds)
                .map(|(p, d)| algebra(&v_matrix(*p, *d, c)))
                .collect(),
        );
    }
    ZeroCurvaturePair {
        grid: field.grid,
        times: field.times.clone(),
        u,
        v,
        twist: field.twist.clone(),
    }
}

/// Derivative in `s` of a matrix-valued slice whose `(0,1)` entry has twist
/// `alpha`, `(1,0)` twist `-alpha` and diagonal no twist.
fn matrix_s_derivative(grid: &PeriodicGrid, m: &[Mat2], alpha: f64) -> Vec<Mat2> {
    let entry = |a: usize, b: usize| m.iter().map(|x| x.m[a][b]).collect::<Vec<_>>();
    let tw = [[0.0, alpha], [-alpha, 0.0]];
    let d: Vec<Vec<Vec<C64>>> = (0..2)
        .map(|a| {
            (0..2)
                .map(|b| complex_derivative(grid, &entry(a, b), tw[a][b], 1))
                .collect()
        })
        .collect();
    (0..m.len())
        .map(|j| Mat2::new(d[0][0][j], d[0][1][j], d[1][0][j], d[1][1][j]))
        .collect()
}

/// Pointwise zero-curvature defect `U_t - V_s + [U, V]` (bracket `VU - UV`) on
/// the interior slices.
pub fn zero_curvature_defect(pair: &ZeroCurvaturePair) -> Result<Vec<Vec<Mat2>>> {
    let k_count = pair.times.len();
    if k_count < 3 {
        return Err(Error::InsufficientSlices(k_count));
    }
    let mats = |x: &[AlgebraElement]| x.iter().map(|e| e.to_matrix()).collect::<Vec<_>>();
    Ok((1..k_count - 1)
        .map(|k| {
            let (um, u0, up) = (mats(&pair.u[k - 1]), mats(&pair.u[k]), mats(&pair.u[k + 1]));
            let v0 = mats(&pair.v[k]);
            let vs = matrix_s_derivative(&pair.grid, &v0, pair.twist[k]);
            let (tm, t0, tp) = (pair.times[k - 1], pair.times[k], pair.times[k + 1]);
            (0..u0.len())
                .map(|j| {
                    let ut = centered(um[j], u0[j], up[j], tm, t0, tp);
                    ut - vs[j] + matrix_bracket(&u0[j], &v0[j])
                })
                .collect()
        })
        .collect())
}

pub fn zero_curvature_residual(pair: &ZeroCurvaturePair) -> Result<f64> {
    let d = zero_curvature_defect(pair)?;
    let sq: Vec<Vec<f64>> = d
        .iter()
        .map(|r| r.iter().map(|m| m.frobenius().powi(2)).collect())
        .collect();
    Ok(slab_norm(&pair.grid, &pair.times, &sq))
}

/// Frames and spin fields rebuilt from a Lax pair.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    /// `R(s_j, t_k)` for `j = 0..=N`.
    pub frames: Vec<Vec<GroupElement>>,
    pub spins: Vec<SpinField>,
}

/// Integrates `dR/ds = R U` on every slice (fourth-order Magnus) from `R(0, t)`,
/// itself obtained from `dR/dt = R V` at `s = 0` (midpoint rule in `t`), and sets
/// `Lambda = R A1 R*`.
pub fn reconstruct_frames(pair: &ZeroCurvaturePair) -> Result<Reconstruction> {
    let grid = pair.grid;
    if !grid.periodic {
        return Err(Error::InvalidInput(
            "frame reconstruction needs a periodic grid".into(),
        ));
    }
    let h = grid.h();
    let n = grid.n;
    let mut origin = Mat2::identity();
    let mut frames = Vec::with_capacity(pair.times.len());
    let mut spins = Vec::with_capacity(pair.times.len());
    let d = 3f64.sqrt() / 6.0;
    let cm = 3f64.sqrt() / 12.0 * h * h;
    for k in 0..pair.times.len() {
        if k > 0 {
            let dt = pair.times[k] - pair.times[k - 1];
            let vm = 0.5 * (pair.v[k - 1][0] + pair.v[k][0]);
            origin = origin * exp_algebra(&vm, dt);
        }
        let alpha = pair.twist[k];
        let z: Vec<C64> = pair.u[k].iter().map(|e| C64::new(e.a[1], e.a[2])).collect();
        let a1: Vec<f64> = pair.u[k].iter().map(|e| e.a[0]).collect();
        let stage = |off: f64| -> Vec<AlgebraElement> {
            let zs = complex_shift(&grid, &z, alpha, off);
            let a1s = grid.shifted(&a1, off);
            (0..n)
                .map(|j| AlgebraElement::new([a1s[j], zs[j].re, zs[j].im], [0.0; 3]))
                .collect()
        };
        let (s1, s2) = (stage((0.5 - d) * h), stage((0.5 + d) * h));
        let mut r = origin;
        let mut slice = Vec::with_capacity(n + 1);
        slice.push(r);
        for j in 0..n {
            let omega =
                0.5 * h * (s1[j] + s2[j]) - cm * bracket(&s1[j], &s2[j], SpaceForm::Spherical);
            r = r * exp_algebra(&omega, 1.0);
            slice.push(r);
        }
        let e = SpaceForm::Spherical.generator();
        let lam: Vec<[f64; 3]> = slice[..n]
            .iter()
            .map(|r| crate::liealg::adjoint(r, &e).map(|x| x.a))
            .collect::<Result<_>>()?;
        spins.push(SpinField::new(grid, lam, SpaceForm::Spherical)?);
        frames.push(slice);
    }
    Ok(Reconstruction {
        times: pair.times.clone(),
        frames,
        spins,
    })
}

/// Discrete L2 norm over the interior slices of `lambda_t - lambda x lambda_ss`.
pub fn heisenberg_residual(times: &[f64], spins: &[SpinField]) -> Result<f64> {
    if spins.len() != times.len() {
        return Err(Error::InvalidInput(
            "times and spin slices differ in number".into(),
        ));
    }
    if spins.len() < 3 {
        return Err(Error::InsufficientSlices(spins.len()));
    }
    let grid = spins[0].grid;
    let sq: Vec<Vec<f64>> = (1..spins.len() - 1)
        .map(|k| {
            let rhs = heisenberg_rhs(&spins[k]);
            (0..grid.n)
                .map(|j| {
                    let d: [f64; 3] = [0, 1, 2].map(|c| {
                        centered(
                            spins[k - 1].lam[j][c],
                            spins[k].lam[j][c],
                            spins[k + 1].lam[j][c],
                            times[k - 1],
                            times[k],
                            times[k + 1],
                        ) - rhs[j][c]
                    });
                    d.iter().map(|x| x * x).sum()
                })
                .collect()
        })
        .collect();
    Ok(slab_norm(&grid, times, &sq))
}

/// Residuals of the time-generator relations for frames of a magnetic-flow
/// trajectory: `v = -u1 u + i u_s` and `v1 = d/dt int_0^s u1 - |u|^2/2 + g(t)`.
#[derive(Debug, Clone, Serialize)]
pub struct VRelation {
    /// Discrete L2 norm of `v - (-u1 u + i u_s)`.
    pub v_residual: f64,
    /// Discrete L2 norm of the `v1` relation once the gauge function is removed.
    pub v1_residual: f64,
    /// Gauge function `g(t_k)` on the interior slices; it vanishes for frames
    /// anchored consistently in time.
    pub gauge: Vec<f64>,
}

/// `r` or `-r`, whichever is closer to `reference`.
fn aligned(r: GroupElement, reference: GroupElement) -> GroupElement {
    if r.dist(&reference) > (-r).dist(&reference) {
        -r
    } else {
        r
    }
}

/// Evaluates [`VRelation`] with `V = R^{-1} dR/dt` from centered differences of
/// the stored frames.
pub fn v_relation(times: &[f64], frames: &[ReconstructedFrame]) -> Result<VRelation> {
    if frames.len() != times.len() {
        return Err(Error::InvalidInput(
            "times and frame slices differ in number".into(),
        ));
    }
    let k_count = frames.len();
    if k_count < 3 {
        return Err(Error::InsufficientSlices(k_count));
    }
    let grid = frames[0].controls.grid;
    let h = grid.h();
    let n = grid.n;
    let phase = |f: &ReconstructedFrame| -> Vec<f64> {
        cumulative_midpoint(&grid.shifted(&f.controls.u1, 0.5 * h), h, n + 1)
    };
    let mut sq_v = Vec::new();
    let mut sq_v1 = Vec::new();
    let mut gauge = Vec::new();
    for k in 1..k_count - 1 {
        let (tm, t0, tp) = (times[k - 1], times[k], times[k + 1]);
        let c = &frames[k].controls;
        let u: Vec<C64> = c.complex_u();
        let us = twisted_derivative(&u, grid.length, 0.0, 1);
        let (pm, pp) = (phase(&frames[k - 1]), phase(&frames[k + 1]));
        let p0 = phase(&frames[k]);
        let mut row_v = Vec::with_capacity(n);
        let mut v1_raw = Vec::with_capacity(n);
        for j in 0..n {
            let r0 = frames[k].frames[j];
            let rt = centered(
                aligned(frames[k - 1].frames[j], r0),
                r0,
                aligned(frames[k + 1].frames[j], r0),
                tm,
                t0,
                tp,
            );
            let vm = frames[k].frames[j].adjugate() * rt;
            let va = algebra(&vm).a;
            let v = C64::new(va[1], va[2]);
            let target = -c.u1[j] * u[j] + C64::i() * us[j];
            row_v.push((v - target).norm_sqr());
            let theta_t = centered(pm[j], p0[j], pp[j], tm, t0, tp);
            v1_raw.push(va[0] - (theta_t - 0.5 * u[j].norm_sqr()));
        }
        let g = v1_raw[0];
        gauge.push(g);
        sq_v1.push(v1_raw.iter().map(|x| (x - g).powi(2)).collect());
        sq_v.push(row_v);
    }
    Ok(VRelation {
        v_residual: slab_norm(&grid, times, &sq_v),
        v1_residual: slab_norm(&grid, times, &sq_v1),
        gauge,
    })
}

/// Residuals of the chain magnetic flow -> Hasimoto field -> NLS -> Lax pair ->
/// reconstructed spins, for one trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct NlsCheck {
    pub n: usize,
    pub dt: f64,
    pub slices: usize,
    /// NLS residual of the raw Hasimoto field.
    pub nls_raw: f64,
    /// NLS residual after removing the per-slice phase of the `s = 0` normal.
    pub nls: f64,
    pub zero_curvature: f64,
    /// Magnetic-flow residual of the spins rebuilt from the Lax pair.
    pub heisenberg: f64,
    pub v_relation: VRelation,
}

/// Hasimoto field of a recorded spin trajectory, one reconstructed frame per slice.
pub fn hasimoto_of_trajectory(
    traj: &FlowTrajectory,
) -> Result<(ComplexField, Vec<ReconstructedFrame>)> {
    let frames: Vec<ReconstructedFrame> = traj.states.iter().map(reconstruct_frame).collect();
    let controls: Vec<ControlSignal> = frames.iter().map(|f| f.controls.clone()).collect();
    Ok((hasimoto_map(&controls, &traj.times)?, frames))
}

pub fn nls_check(traj: &FlowTrajectory) -> Result<NlsCheck> {
    let zero = C64::new(0.0, 0.0);
    let (field, frames) = hasimoto_of_trajectory(traj)?;
    let fixed = remove_phase_drift(&field, zero)?;
    let pair = zero_curvature_from_nls(&fixed, zero);
    let rec = reconstruct_frames(&pair)?;
    Ok(NlsCheck {
        n: field.grid.n,
        dt: traj.dt,
        slices: traj.times.len(),
        nls_raw: nls_residual(&field, zero)?,
        nls: nls_residual(&fixed, zero)?,
        zero_curvature: zero_curvature_residual(&pair)?,
        heisenberg: heisenberg_residual(&rec.times, &rec.spins)?,
        v_relation: v_relation(&traj.times, &frames)?,
    })
}
