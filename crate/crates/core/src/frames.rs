//! Darboux frames, horizontal lifts and the curvature/torsion dictionaries.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::io;
use crate::liealg::{
    adjoint, bracket, exp_algebra, point_coords, AlgebraElement, GroupElement, Mat2, SpaceForm,
};

/// Curvature below which torsion is reported as undefined.
pub const KAPPA_MIN: f64 = 1e-8;

/// Constraint tolerance for [`project_base`].
pub const MANIFOLD_TOL: f64 = 1e-8;

/// Lie-group stepping scheme for `dR/ds = R U(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Exponential of the midpoint sample, second order.
    #[default]
    Midpoint,
    /// Two-point Gauss Magnus expansion with the commutator correction, fourth order.
    Magnus4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Midpoint => 2,
            Scheme::Magnus4 => 4,
        }
    }
}

/// Node samples of the controls `(u1, u2, u3)(s_j)`. Integration evaluates
/// them between nodes by trigonometric (periodic grids) or cubic interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSignal {
    pub grid: PeriodicGrid,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub u3: Vec<f64>,
}

impl ControlSignal {
    pub fn new(grid: PeriodicGrid, u1: Vec<f64>, u2: Vec<f64>, u3: Vec<f64>) -> Result<Self> {
        for (name, v) in [("u1", &u1), ("u2", &u2), ("u3", &u3)] {
            grid.check_len(v.len(), name)?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        Ok(ControlSignal { grid, u1, u2, u3 })
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> [f64; 3]) -> Self {
        let vals: Vec<[f64; 3]> = grid.nodes().into_iter().map(f).collect();
        ControlSignal {
            grid,
            u1: vals.iter().map(|v| v[0]).collect(),
            u2: vals.iter().map(|v| v[1]).collect(),
            u3: vals.iter().map(|v| v[2]).collect(),
        }
    }

    pub fn zero(grid: PeriodicGrid) -> Self {
        Self::from_fn(grid, |_| [0.0; 3])
    }

    pub fn periodic(&self) -> bool {
        self.grid.periodic
    }

    pub fn len(&self) -> usize {
        self.u1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty()
    }

    pub fn at(&self, j: usize) -> [f64; 3] {
        [self.u1[j], self.u2[j], self.u3[j]]
    }

    /// `u2 + i u3`.
    pub fn complex_u(&self) -> Vec<C64> {
        self.u2
            .iter()
            .zip(&self.u3)
            .map(|(&a, &b)| C64::new(a, b))
            .collect()
    }

    /// Controls interpolated at `s_j + offset` for every node.
    pub fn shifted(&self, offset: f64) -> Vec<[f64; 3]> {
        let a = self.grid.shifted(&self.u1, offset);
        let b = self.grid.shifted(&self.u2, offset);
        let c = self.grid.shifted(&self.u3, offset);
        (0..a.len()).map(|j| [a[j], b[j], c[j]]).collect()
    }

    /// Controls after the gauge change `R -> R exp(theta(s) A1)`:
    /// `u1 -> u1 + theta'`, `u2 + i u3 -> e^{-i theta}(u2 + i u3)`.
    pub fn gauge_rotated(&self, theta: &[f64], dtheta: &[f64]) -> Self {
        let mut out = self.clone();
        for j in 0..self.len() {
            let z = C64::new(self.u2[j], self.u3[j]) * C64::from_polar(1.0, -theta[j]);
            out.u1[j] += dtheta[j];
            out.u2[j] = z.re;
            out.u3[j] = z.im;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let nodes = self.grid.nodes();
        let rows: Vec<Vec<f64>> = (0..self.len())
            .map(|j| vec![nodes[j], self.u1[j], self.u2[j], self.u3[j]])
            .collect();
        io::csv_string(&["s", "u1", "u2", "u3"], &rows)
    }

    /// Read a CSV with columns `s, u1, u2, u3`; the grid length must be supplied
    /// because a periodic grid does not store its endpoint.
    pub fn from_csv(text: &str, length: f64, periodic: bool) -> Result<Self> {
        let rows = io::parse_csv(text, &["s", "u1", "u2", "u3"])?;
        let n = if periodic {
            rows.len()
        } else {
            rows.len().saturating_sub(1)
        };
        let grid = PeriodicGrid::new(length, n, periodic)?;
        Self::new(
            grid,
            rows.iter().map(|r| r[1]).collect(),
            rows.iter().map(|r| r[2]).collect(),
            rows.iter().map(|r| r[3]).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("control signal serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ControlSignal =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(c.grid, c.u1, c.u2, c.u3)
    }
}

/// Rotational algebra element `u1 A1 + u2 A2 + u3 A3`.
pub fn control_element(u: [f64; 3]) -> AlgebraElement {
    AlgebraElement::new(u, [0.0; 3])
}

/// Integrated frame at the `N + 1` nodes `s_0 .. s_N`, together with the controls
/// and scheme that produced it.
#[derive(Debug, Clone)]
pub struct FrameCurve {
    pub grid: PeriodicGrid,
    pub r: Vec<GroupElement>,
    pub controls: ControlSignal,
    pub scheme: Scheme,
}

impl FrameCurve {
    /// `R(L) = R(0)` within `tol`.
    pub fn is_frame_periodic(&self, tol: f64) -> bool {
        self.r[self.r.len() - 1].dist(&self.r[0]) < tol
    }

    pub fn end(&self) -> GroupElement {
        self.r[self.r.len() - 1]
    }
}

/// Algebra increments per step of the chosen scheme, given the algebra element
/// at each stage; the closure maps a control sample to the stage element.
fn step_increments(
    u: &ControlSignal,
    scheme: Scheme,
    form: SpaceForm,
    stage: impl Fn([f64; 3]) -> AlgebraElement,
) -> Vec<AlgebraElement> {
    let h = u.grid.h();
    let n = u.grid.n;
    match scheme {
        Scheme::Midpoint => {
            let mid = u.shifted(0.5 * h);
            (0..n).map(|j| h * stage(mid[j])).collect()
        }
        Scheme::Magnus4 => {
            let d = 3f64.sqrt() / 6.0;
            let s1 = u.shifted((0.5 - d) * h);
            let s2 = u.shifted((0.5 + d) * h);
            let c = 3f64.sqrt() / 12.0 * h * h;
            (0..n)
                .map(|j| {
                    let x1 = stage(s1[j]);
                    let x2 = stage(s2[j]);
                    // [x1, x2] here is the YX - XY bracket, hence the minus sign
                    0.5 * h * (x1 + x2) - c * bracket(&x1, &x2, form)
                })
                .collect()
        }
    }
}

/// Anchored frame solving `dR/ds = R (u1 A1 + u2 A2 + u3 A3)`, `R(0) = I`,
/// with the default second-order scheme.
pub fn integrate_frame(u: &ControlSignal) -> FrameCurve {
    integrate_frame_with(u, Scheme::Midpoint)
}

pub fn integrate_frame_with(u: &ControlSignal, scheme: Scheme) -> FrameCurve {
    let inc = step_increments(u, scheme, SpaceForm::Spherical, control_element);
    let mut r = Vec::with_capacity(u.grid.n + 1);
    let mut cur = Mat2::identity();
    r.push(cur);
    for x in &inc {
        cur = cur * exp_algebra(x, 1.0);
        r.push(cur);
    }
    FrameCurve {
        grid: u.grid,
        r,
        controls: u.clone(),
        scheme,
    }
}

/// Element `(x, R)` of the Euclidean semidirect product; `x` is a translation
/// in the Hermitian coordinates `B1, B2, B3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemidirectElement {
    pub x: [f64; 3],
    pub r: GroupElement,
}

impl SemidirectElement {
    pub fn identity() -> Self {
        SemidirectElement {
            x: [0.0; 3],
            r: Mat2::identity(),
        }
    }

    /// `(x, R)(y, T) = (x + R y R*, R T)`.
    pub fn mul(&self, o: &SemidirectElement) -> SemidirectElement {
        let y = rotate_cartan(&self.r, o.x);
        SemidirectElement {
            x: crate::liealg::add3(self.x, y),
            r: self.r * o.r,
        }
    }

    /// Group exponential of `(b, a)`: rotation `exp(a.A)`, translation
    /// `int_0^1 Ad(exp(tau a.A)) b dtau`.
    pub fn exp(omega: &AlgebraElement) -> SemidirectElement {
        use crate::liealg::{cross, norm};
        let a = omega.a;
        let b = omega.b;
        let th = norm(a);
        let (c1, c2) = if th < 1e-3 {
            let t2 = th * th;
            (
                0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
            )
        } else {
            (
                (1.0 - th.cos()) / (th * th),
                (th - th.sin()) / (th * th * th),
            )
        };
        let axb = cross(a, b);
        let aaxb = cross(a, axb);
        let x = [0, 1, 2].map(|k| b[k] + c1 * axb[k] + c2 * aaxb[k]);
        let r = exp_algebra(&AlgebraElement::new(a, [0.0; 3]), 1.0);
        SemidirectElement { x, r }
    }
}

/// Coordinates of `R (v.B) R*`.
pub fn rotate_cartan(r: &GroupElement, v: [f64; 3]) -> [f64; 3] {
    let m = *r * AlgebraElement::new([0.0; 3], v).to_matrix() * r.dagger();
    AlgebraElement::from_matrix(&m, f64::INFINITY)
        .expect("infinite tolerance")
        .b
}

/// Base-space path of a horizontal curve.
#[derive(Debug, Clone)]
pub enum BasePath {
    Group(Vec<GroupElement>),
    Semidirect(Vec<SemidirectElement>),
}

/// Horizontal Darboux curve at the `N + 1` nodes.
#[derive(Debug, Clone)]
pub struct HorizontalCurve {
    pub grid: PeriodicGrid,
    pub form: SpaceForm,
    pub g: BasePath,
    pub lambda: Vec<AlgebraElement>,
}

impl HorizontalCurve {
    /// Cartan coordinates of the tangent `Lambda`.
    pub fn lambda_coords(&self) -> Vec<[f64; 3]> {
        self.lambda
            .iter()
            .map(|l| self.form.cartan_coords(l))
            .collect()
    }
}

/// Horizontal lift of an anchored frame: `Lambda = R E R*` with `E = A1` on the
/// sphere and `E = B1` otherwise; `dg/ds = g Lambda` (or `dx/ds = R B1 R*` in the
/// Euclidean case), integrated through the Darboux curve `G = g R` with
/// `dG/ds = G (E + U)` and the frame's own scheme.
pub fn horizontal_lift(frame: &FrameCurve, form: SpaceForm) -> HorizontalCurve {
    let e = form.generator();
    let lambda: Vec<AlgebraElement> = frame
        .r
        .iter()
        .map(|r| adjoint(r, &e).expect("frames are unimodular"))
        .collect();
    let inc = step_increments(&frame.controls, frame.scheme, form, |u| {
        e + control_element(u)
    });
    let g = match form {
        SpaceForm::Euclidean => {
            let mut cur = SemidirectElement::identity();
            let mut out = vec![cur];
            for (j, x) in inc.iter().enumerate() {
                cur = cur.mul(&SemidirectElement::exp(x));
                // keep the frame factor identical to the integrated frame
                cur.r = frame.r[j + 1];
                out.push(cur);
            }
            BasePath::Semidirect(out)
        }
        _ => {
            let mut big = Mat2::identity();
            let mut out = vec![Mat2::identity()];
            for (j, x) in inc.iter().enumerate() {
                big = big * exp_algebra(x, 1.0);
                out.push(big * frame.r[j + 1].adjugate());
            }
            BasePath::Group(out)
        }
    };
    HorizontalCurve {
        grid: frame.grid,
        form,
        g,
        lambda,
    }
}

/// Points of the base curve.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseCurve {
    /// Hyperboloid or sphere inside R^4.
    R4(Vec<[f64; 4]>),
    /// Euclidean space.
    R3(Vec<[f64; 3]>),
}

impl BaseCurve {
    pub fn len(&self) -> usize {
        match self {
            BaseCurve::R4(v) => v.len(),
            BaseCurve::R3(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points as plain vectors (4 or 3 coordinates).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match self {
            BaseCurve::R4(v) => v.iter().map(|p| p.to_vec()).collect(),
            BaseCurve::R3(v) => v.iter().map(|p| p.to_vec()).collect(),
        }
    }
}

/// Projection to the base space: `X = g g*` on the hyperboloid, the matrix
/// entries of `g` on the sphere, the translation part in the Euclidean case.
///
/// On the sphere the ambient speed of a unit-speed curve is 1/2: the metric
/// making `<Lambda, Lambda> = 1` is one quarter of the ambient one.
pub fn project_base(h: &HorizontalCurve, form: SpaceForm) -> Result<BaseCurve> {
    match (&h.g, form) {
        (BasePath::Semidirect(v), SpaceForm::Euclidean) => {
            Ok(BaseCurve::R3(v.iter().map(|e| e.x).collect()))
        }
        (BasePath::Group(v), SpaceForm::Hyperbolic) => {
            let mut pts = Vec::with_capacity(v.len());
            for (j, g) in v.iter().enumerate() {
                let x = point_coords(&(*g * g.dagger()), SpaceForm::Hyperbolic);
                let res = (x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3] - 1.0).abs();
                if res > MANIFOLD_TOL || x[0] <= 0.0 {
                    return Err(Error::OffManifold {
                        index: j,
                        residual: res,
                    });
                }
                pts.push(x);
            }
            Ok(BaseCurve::R4(pts))
        }
        (BasePath::Group(v), SpaceForm::Spherical) => {
            let mut pts = Vec::with_capacity(v.len());
            for (j, g) in v.iter().enumerate() {
                let x = point_coords(g, SpaceForm::Spherical);
                let res = (x.iter().map(|c| c * c).sum::<f64>() - 1.0).abs();
                let shape =
                    (g.m[1][1] - g.m[0][0].conj()).norm() + (g.m[1][0] + g.m[0][1].conj()).norm();
                if res > MANIFOLD_TOL || shape > MANIFOLD_TOL {
                    return Err(Error::OffManifold {
                        index: j,
                        residual: res.max(shape),
                    });
                }
                pts.push(x);
            }
            Ok(BaseCurve::R4(pts))
        }
        _ => Err(Error::InvalidInput(format!(
            "horizontal curve of type {:?} does not match the {} geometry",
            h.form,
            form.name()
        ))),
    }
}

/// Curvature and torsion samples; torsion is `None` where `kappa < kappa_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricInvariants {
    pub kappa: Vec<f64>,
    pub tau: Vec<Option<f64>>,
}

impl GeometricInvariants {
    /// All torsion samples, or the first undefined index.
    pub fn tau_strict(&self) -> Result<Vec<f64>> {
        self.tau
            .iter()
            .enumerate()
            .map(|(j, t)| {
                t.ok_or(Error::UndefinedTorsion {
                    index: j,
                    kappa_min: KAPPA_MIN,
                })
            })
            .collect()
    }
}

pub fn geometric_invariants(u: &ControlSignal, form: SpaceForm) -> GeometricInvariants {
    geometric_invariants_with(u, form, KAPPA_MIN)
}

/// `kappa = |u2 + i u3|` and `tau = u1 + dtheta/ds - offset`, where `theta` is the
/// phase of `u2 + i u3` and `offset` is 1/2 on the sphere, 0 otherwise. The phase
/// rate is evaluated as `(u2 u3' - u3 u2') / kappa^2`, which is the derivative of
/// the continuously unwrapped phase.
pub fn geometric_invariants_with(
    u: &ControlSignal,
    form: SpaceForm,
    kappa_min: f64,
) -> GeometricInvariants {
    let d2 = u.grid.derivative(&u.u2, 1);
    let d3 = u.grid.derivative(&u.u3, 1);
    let off = form.torsion_offset();
    let mut kappa = Vec::with_capacity(u.len());
    let mut tau = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let k2 = u.u2[j] * u.u2[j] + u.u3[j] * u.u3[j];
        let k = k2.sqrt();
        kappa.push(k);
        if k < kappa_min {
            tau.push(None);
        } else {
            let rate = (u.u2[j] * d3[j] - u.u3[j] * d2[j]) / k2;
            tau.push(Some(u.u1[j] + rate - off));
        }
    }
    GeometricInvariants { kappa, tau }
}

/// Serret-Frenet controls: `(tau, -kappa, 0)` hyperbolic, `(tau + 1/2, 0, kappa)`
/// spherical, `(tau, 0, kappa)` Euclidean.
pub fn controls_from_frenet(
    grid: PeriodicGrid,
    kappa: &[f64],
    tau: &[f64],
    form: SpaceForm,
) -> Result<ControlSignal> {
    grid.check_len(kappa.len(), "kappa")?;
    grid.check_len(tau.len(), "tau")?;
    if let Some((j, &k)) = kappa.iter().enumerate().find(|(_, &k)| k < 0.0) {
        return Err(Error::NegativeCurvature { index: j, value: k });
    }
    let n = kappa.len();
    let (u1, u2, u3) = match form {
        SpaceForm::Hyperbolic => (
            tau.to_vec(),
            kappa.iter().map(|k| -k).collect(),
            vec![0.0; n],
        ),
        SpaceForm::Spherical => (
            tau.iter().map(|t| t + 0.5).collect(),
            vec![0.0; n],
            kappa.to_vec(),
        ),
        SpaceForm::Euclidean => (tau.to_vec(), vec![0.0; n], kappa.to_vec()),
    };
    ControlSignal::new(grid, u1, u2, u3)
}
