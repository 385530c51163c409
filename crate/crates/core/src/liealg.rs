//! Pauli bases, the epsilon-parametrized brackets, trace forms, exponentials,
//! the adjoint action, the four-dimensional pairings and the spin cover.
//!
//! Brackets follow the convention `[X, Y] = YX - XY`. The structure constants
//! are the computational path; the 2x2 matrix realization is kept for
//! cross-checks and for group-level work.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Decomposition tolerance used by [`adjoint`] and [`pairing`].
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// The three constant-curvature geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum SpaceForm {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl SpaceForm {
    pub const ALL: [SpaceForm; 3] = [
        SpaceForm::Hyperbolic,
        SpaceForm::Euclidean,
        SpaceForm::Spherical,
    ];

    pub fn from_epsilon(eps: i64) -> Result<Self> {
        match eps {
            -1 => Ok(SpaceForm::Hyperbolic),
            0 => Ok(SpaceForm::Euclidean),
            1 => Ok(SpaceForm::Spherical),
            other => Err(Error::InvalidSpaceForm(other)),
        }
    }

    pub fn epsilon_int(self) -> i64 {
        match self {
            SpaceForm::Hyperbolic => -1,
            SpaceForm::Euclidean => 0,
            SpaceForm::Spherical => 1,
        }
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon_int() as f64
    }

    /// Unit generator whose adjoint orbit carries the tangent: `A1` on the
    /// sphere, `B1` otherwise.
    pub fn generator(self) -> AlgebraElement {
        self.cartan(1.0, 0.0, 0.0)
    }

    /// Element of the Cartan space with the given coordinates.
    pub fn cartan(self, x: f64, y: f64, z: f64) -> AlgebraElement {
        self.cartan_vec([x, y, z])
    }

    pub fn cartan_vec(self, v: [f64; 3]) -> AlgebraElement {
        match self {
            SpaceForm::Spherical => AlgebraElement::new(v, [0.0; 3]),
            _ => AlgebraElement::new([0.0; 3], v),
        }
    }

    /// Coordinates of the Cartan part of `x`.
    pub fn cartan_coords(self, x: &AlgebraElement) -> [f64; 3] {
        match self {
            SpaceForm::Spherical => x.a,
            _ => x.b,
        }
    }

    /// Trace-form convention under which the Cartan space is positive definite.
    pub fn convention(self) -> Convention {
        match self {
            SpaceForm::Spherical => Convention::Spherical,
            _ => Convention::Complex,
        }
    }

    /// Offset between the Darboux torsion `u1` and the geometric torsion in the
    /// Serret-Frenet gauge (`tau = u1 - offset`).
    pub fn torsion_offset(self) -> f64 {
        match self {
            SpaceForm::Spherical => 0.5,
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceForm::Hyperbolic => "hyperbolic",
            SpaceForm::Euclidean => "euclidean",
            SpaceForm::Spherical => "spherical",
        }
    }
}

impl TryFrom<i64> for SpaceForm {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        SpaceForm::from_epsilon(v)
    }
}

impl From<SpaceForm> for i64 {
    fn from(f: SpaceForm) -> i64 {
        f.epsilon_int()
    }
}

/// Trace-form sign conventions: `-2 Tr(XY)` (spherical) or `2 Tr(XY)` (complex).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Spherical,
    Complex,
}

// ---------------------------------------------------------------------------
// 3-vector helpers

pub fn cross(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

pub fn dot(x: [f64; 3], y: [f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub fn norm(x: [f64; 3]) -> f64 {
    dot(x, x).sqrt()
}

pub fn scale(c: f64, x: [f64; 3]) -> [f64; 3] {
    [c * x[0], c * x[1], c * x[2]]
}

pub fn add3(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

pub fn sub3(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

// ---------------------------------------------------------------------------
// Algebra elements

/// Element `sum a_j A_j + b_j B_j` of sl2(C) viewed as a real 6-dimensional algebra.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl AlgebraElement {
    pub const ZERO: AlgebraElement = AlgebraElement {
        a: [0.0; 3],
        b: [0.0; 3],
    };

    pub fn new(a: [f64; 3], b: [f64; 3]) -> Self {
        AlgebraElement { a, b }
    }

    /// Basis element `A_{i+1}`.
    pub fn a_basis(i: usize) -> Self {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        AlgebraElement { a, b: [0.0; 3] }
    }

    /// Basis element `B_{i+1}`.
    pub fn b_basis(i: usize) -> Self {
        let mut b = [0.0; 3];
        b[i] = 1.0;
        AlgebraElement { a: [0.0; 3], b }
    }

    /// Basis in the order `A1, A2, A3, B1, B2, B3`.
    pub fn basis(k: usize) -> Self {
        if k < 3 {
            Self::a_basis(k)
        } else {
            Self::b_basis(k - 3)
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.a[0], self.a[1], self.a[2], self.b[0], self.b[1], self.b[2],
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        AlgebraElement {
            a: [v[0], v[1], v[2]],
            b: [v[3], v[4], v[5]],
        }
    }

    /// Euclidean norm of the 6 coordinates.
    pub fn coord_norm(&self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Matrix in the half-normalized realization.
    pub fn to_matrix(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for j in 0..3 {
            let bj = pauli_b(j);
            m = m + bj.scale(C64::new(self.b[j], self.a[j]));
        }
        m
    }

    /// Inverse of [`AlgebraElement::to_matrix`]; fails for matrices with a trace.
    pub fn from_matrix(m: &Mat2, tol: f64) -> Result<Self> {
        let tr = m.trace();
        let scale = m.frobenius().max(1.0);
        if tr.norm() > tol * scale {
            return Err(Error::RealizationMismatch { defect: tr.norm() });
        }
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        for j in 0..3 {
            // Tr(B_j B_k) = delta_jk / 2
            let c = (*m * pauli_b(j)).trace() * 2.0;
            b[j] = c.re;
            a[j] = c.im;
        }
        Ok(AlgebraElement { a, b })
    }

    pub fn is_rotational(&self) -> bool {
        self.b == [0.0; 3]
    }

    pub fn is_cartan(&self) -> bool {
        self.a == [0.0; 3]
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        AlgebraElement {
            a: add3(self.a, o.a),
            b: add3(self.b, o.b),
        }
    }
}

impl AddAssign for AlgebraElement {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        AlgebraElement {
            a: sub3(self.a, o.a),
            b: sub3(self.b, o.b),
        }
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        AlgebraElement {
            a: scale(-1.0, self.a),
            b: scale(-1.0, self.b),
        }
    }
}

impl Mul<AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, x: AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            a: scale(self, x.a),
            b: scale(self, x.b),
        }
    }
}

/// Lie bracket from the structure constants.
///
/// `[A_a, A_a'] = (a' x a).A`, `[A_a, B_b'] = (b' x a).B` and
/// `[B_b, B_b'] = -eps (b x b').A`.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement, form: SpaceForm) -> AlgebraElement {
    let eps = form.epsilon();
    let a = sub3(cross(y.a, x.a), scale(eps, cross(x.b, y.b)));
    let b = add3(cross(y.b, x.a), cross(y.a, x.b));
    AlgebraElement { a, b }
}

/// Trace form `2 Tr(XY)` (complex) or `-2 Tr(XY)` (spherical) in coordinates.
pub fn trace_form(x: &AlgebraElement, y: &AlgebraElement, convention: Convention) -> C64 {
    let re = dot(x.b, y.b) - dot(x.a, y.a);
    let im = dot(x.a, y.b) + dot(x.b, y.a);
    let v = C64::new(re, im);
    match convention {
        Convention::Complex => v,
        Convention::Spherical => -v,
    }
}

/// Exponential `exp(t x)` in the matrix realization, via the closed form for
/// traceless 2x2 matrices: `exp(M) = cosh(mu) I + sinh(mu)/mu M`, `mu^2 = -det M`.
pub fn exp_algebra(x: &AlgebraElement, t: f64) -> GroupElement {
    exp_traceless(&x.to_matrix().scale(C64::new(t, 0.0)))
}

/// Exponential of a traceless 2x2 matrix.
pub fn exp_traceless(m: &Mat2) -> Mat2 {
    let mu2 = -m.det();
    let (c, s) = cosh_sinhc(mu2);
    Mat2::identity().scale(c) + m.scale(s)
}

/// `(cosh(sqrt z), sinh(sqrt z)/sqrt z)`, even in the branch of the root.
fn cosh_sinhc(z: C64) -> (C64, C64) {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        let z3 = z2 * z;
        let c = ONE + z / 2.0 + z2 / 24.0 + z3 / 720.0 + z2 * z2 / 40320.0;
        let s = ONE + z / 6.0 + z2 / 120.0 + z3 / 5040.0 + z2 * z2 / 362880.0;
        (c, s)
    } else {
        let mu = z.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    }
}

/// Adjoint action `g x g^{-1}` (equal to `g x g*` on SU2), re-expressed in the basis.
pub fn adjoint(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    let det = g.det();
    if (det - ONE).norm() > DECOMPOSITION_TOL {
        return Err(Error::RealizationMismatch {
            defect: (det - ONE).norm(),
        });
    }
    let m = *g * x.to_matrix() * g.adjugate();
    AlgebraElement::from_matrix(&m, DECOMPOSITION_TOL)
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices

/// Dense 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

/// Group elements are unimodular 2x2 matrices.
pub type GroupElement = Mat2;

impl Mat2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Mat2 {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn zero() -> Self {
        Mat2 { m: [[ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Classical adjugate; equals the inverse when the determinant is one.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0])
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut r = *self;
        for row in r.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        r
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).frobenius()
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - ONE).norm() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.dagger()).dist(&Mat2::identity()) <= tol
    }

    /// Rescale to unit determinant (used to strip round-off drift).
    pub fn renormalized(&self) -> Self {
        let d = self.det().sqrt();
        self.scale(ONE / d)
    }
}

impl Add for Mat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] -= o.m[i][j];
            }
        }
        r
    }
}

impl Neg for Mat2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, c: f64) -> Mat2 {
        self.scale_re(c)
    }
}

impl Mul for Mat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }
}

/// Matrix bracket in the convention `[X, Y] = YX - XY`.
pub fn matrix_bracket(x: &Mat2, y: &Mat2) -> Mat2 {
    *y * *x - *x * *y
}

/// Hermitian Pauli matrix `B_{j+1}` (half-normalized).
pub fn pauli_b(j: usize) -> Mat2 {
    let h = C64::new(0.5, 0.0);
    match j {
        0 => Mat2::new(h, ZERO, ZERO, -h),
        1 => Mat2::new(ZERO, -I * 0.5, I * 0.5, ZERO),
        2 => Mat2::new(ZERO, h, h, ZERO),
        _ => panic!("Pauli index out of range"),
    }
}

/// Skew-Hermitian Pauli matrix `A_{j+1} = i B_{j+1}`.
pub fn pauli_a(j: usize) -> Mat2 {
    pauli_b(j).scale(I)
}

// ---------------------------------------------------------------------------
// Points of R^4 as 2x2 matrices

/// Basis matrix `E_k` of the quaternionic model of R^4 (the sphere is the unit
/// sphere inside it): `X = [[x0 + i x1, x2 + i x3], [-x2 + i x3, x0 - i x1]]`.
pub fn sphere_basis(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => Mat2::new(I, ZERO, ZERO, -I),
        2 => Mat2::new(ZERO, ONE, -ONE, ZERO),
        3 => Mat2::new(ZERO, I, I, ZERO),
        _ => panic!("basis index out of range"),
    }
}

/// Basis matrix `E_k` of the Hermitian model of Minkowski space:
/// `X = [[x0 + x1, x2 + i x3], [x2 - i x3, x0 - x1]]`.
pub fn lorentz_basis(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        2 => Mat2::new(ZERO, ONE, ONE, ZERO),
        3 => Mat2::new(ZERO, I, -I, ZERO),
        _ => panic!("basis index out of range"),
    }
}

/// Matrix representing the point `x` in the model used by `form`; the
/// Euclidean case uses the quaternionic model of R^4.
pub fn point_matrix(x: [f64; 4], form: SpaceForm) -> Mat2 {
    let basis: fn(usize) -> Mat2 = match form {
        SpaceForm::Hyperbolic => lorentz_basis,
        _ => sphere_basis,
    };
    (0..4).fold(Mat2::zero(), |acc, k| acc + basis(k).scale_re(x[k]))
}

/// Coordinates of a point matrix (inverse of [`point_matrix`] on its image).
pub fn point_coords(m: &Mat2, form: SpaceForm) -> [f64; 4] {
    match form {
        SpaceForm::Hyperbolic => {
            let x0 = 0.5 * (m.m[0][0] + m.m[1][1]).re;
            let x1 = 0.5 * (m.m[0][0] - m.m[1][1]).re;
            [x0, x1, m.m[0][1].re, m.m[0][1].im]
        }
        _ => {
            let x0 = 0.5 * (m.m[0][0] + m.m[1][1]).re;
            let x1 = 0.5 * (m.m[0][0] - m.m[1][1]).im;
            [x0, x1, m.m[0][1].re, m.m[0][1].im]
        }
    }
}

/// Scalar `mu` with `(X Y^dagger + Y X^dagger)/2 = mu I`, where the companion
/// `X^dagger` of a point matrix is its adjugate. Gives the Euclidean inner product
/// in the quaternionic model and the Lorentz form `a0 b0 - a.b` in the Hermitian one.
pub fn pairing(x: &Mat2, y: &Mat2, form: SpaceForm) -> Result<f64> {
    let _ = form;
    let p = (*x * y.adjugate() + *y * x.adjugate()).scale_re(0.5);
    let mu = p.m[0][0];
    let defect = (p.m[1][1] - mu).norm() + p.m[0][1].norm() + p.m[1][0].norm() + mu.im.abs();
    let scale = (x.frobenius() * y.frobenius()).max(1.0);
    if defect > DECOMPOSITION_TOL * scale {
        return Err(Error::NotScalar { defect });
    }
    Ok(mu.re)
}

/// Minkowski form `a0 b0 - (a1 b1 + a2 b2 + a3 b3)`.
pub fn lorentz_form(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// The covering homomorphism SL2(C) -> SO(1,3): column `k` holds the Lorentz
/// coordinates of `p E_k p*`.
pub fn spin_cover(p: &GroupElement) -> [[f64; 4]; 4] {
    let mut r = [[0.0; 4]; 4];
    for k in 0..4 {
        let y = *p * lorentz_basis(k) * p.dagger();
        let c = point_coords(&y, SpaceForm::Hyperbolic);
        for j in 0..4 {
            r[j][k] = c[j];
        }
    }
    r
}

/// Rotation matrix of the adjoint action of an SU2 element on coordinate 3-vectors.
pub fn rotation_of(r: &GroupElement) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for k in 0..3 {
        let y = *r * pauli_b(k) * r.dagger();
        let c = AlgebraElement::from_matrix(&y, f64::INFINITY).expect("infinite tolerance");
        for j in 0..3 {
            m[j][k] = c.b[j];
        }
    }
    m
}

/// SU2 element whose adjoint action is the rotation `m` (one of the two lifts).
pub fn su2_from_rotation(m: &[[f64; 3]; 3]) -> GroupElement {
    // quaternion (w, v) with R = w I + 2 v.A, rotation axis v/|v| by angle 2 acos(w)
    let tr = m[0][0] + m[1][1] + m[2][2];
    let (w, x, y, z);
    if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (m[2][1] - m[1][2]) / s;
        y = (m[0][2] - m[2][0]) / s;
        z = (m[1][0] - m[0][1]) / s;
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
        w = (m[2][1] - m[1][2]) / s;
        x = 0.25 * s;
        y = (m[0][1] + m[1][0]) / s;
        z = (m[0][2] + m[2][0]) / s;
    } else if m[1][1] > m[2][2] {
        let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
        w = (m[0][2] - m[2][0]) / s;
        x = (m[0][1] + m[1][0]) / s;
        y = 0.25 * s;
        z = (m[1][2] + m[2][1]) / s;
    } else {
        let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
        w = (m[1][0] - m[0][1]) / s;
        x = (m[0][2] + m[2][0]) / s;
        y = (m[1][2] + m[2][1]) / s;
        z = 0.25 * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let v = AlgebraElement::new([2.0 * x / n, 2.0 * y / n, 2.0 * z / n], [0.0; 3]);
    Mat2::identity().scale_re(w / n) + v.to_matrix()
}

// ---------------------------------------------------------------------------
// Printed bracket tables

/// Table of brackets with constant coefficients (epsilon = -1).
pub const TABLE_SL2: [&str; 6] = [
    "0 -A3 A2 0 -B3 B2",
    "A3 0 -A1 B3 0 -B1",
    "-A2 A1 0 -B2 B1 0",
    "0 -B3 B2 0 A3 -A2",
    "B3 0 -B1 -A3 0 A1",
    "-B2 B1 0 A2 -A1 0",
];

/// Table of brackets with the curvature parameter `e`.
pub const TABLE_EPS: [&str; 6] = [
    "0 -A3 A2 0 -B3 B2",
    "A3 0 -A1 B3 0 -B1",
    "-A2 A1 0 -B2 B1 0",
    "0 -B3 B2 0 -eA3 eA2",
    "B3 0 -B1 eA3 0 -eA1",
    "-B2 B1 0 -eA2 eA1 0",
];

/// Poisson table of the coordinate functions `H_j` (dual to `A_j`) and `h_j` (dual to `B_j`).
pub const TABLE_POISSON: [&str; 6] = [
    "0 -H3 H2 0 -h3 h2",
    "H3 0 -H1 h3 0 -h1",
    "-H2 H1 0 -h2 h1 0",
    "0 -h3 h2 0 -eH3 eH2",
    "h3 0 -h1 eH3 0 -eH1",
    "-h2 h1 0 -eH2 eH1 0",
];

/// Parse one table entry such as `-eA3` into an algebra element.
pub fn parse_table_entry(entry: &str, eps: f64) -> Result<AlgebraElement> {
    let mut s = entry.trim();
    if s == "0" {
        return Ok(AlgebraElement::ZERO);
    }
    let mut coef = 1.0;
    if let Some(rest) = s.strip_prefix('-') {
        coef = -1.0;
        s = rest;
    }
    if let Some(rest) = s.strip_prefix('e') {
        coef *= eps;
        s = rest;
    }
    let bad = || Error::InvalidInput(format!("unparsable table entry '{entry}'"));
    let mut chars = s.chars();
    let kind = chars.next().ok_or_else(bad)?;
    let idx: usize = chars.as_str().parse().map_err(|_| bad())?;
    if !(1..=3).contains(&idx) {
        return Err(bad());
    }
    let base = match kind {
        'A' | 'H' => AlgebraElement::a_basis(idx - 1),
        'B' | 'h' => AlgebraElement::b_basis(idx - 1),
        _ => return Err(bad()),
    };
    Ok(coef * base)
}

/// Parsed 6x6 table, entries indexed by the basis order `A1..A3, B1..B3`.
pub fn parse_table(rows: &[&str; 6], eps: f64) -> Result<[[AlgebraElement; 6]; 6]> {
    let mut t = [[AlgebraElement::ZERO; 6]; 6];
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split_whitespace().collect();
        if entries.len() != 6 {
            return Err(Error::InvalidInput(format!(
                "table row {i} has {} entries",
                entries.len()
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            t[i][j] = parse_table_entry(e, eps)?;
        }
    }
    Ok(t)
}

pub const BASIS_NAMES: [&str; 6] = ["A1", "A2", "A3", "B1", "B2", "B3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_a1_is_diagonal() {
        let t = 0.7;
        let g = exp_algebra(&AlgebraElement::a_basis(0), t);
        let expect = Mat2::new(
            C64::from_polar(1.0, t / 2.0),
            ZERO,
            ZERO,
            C64::from_polar(1.0, -t / 2.0),
        );
        assert!(g.dist(&expect) < 1e-15);
    }

    #[test]
    fn small_argument_branch_is_continuous() {
        let x = AlgebraElement::new([0.3, -0.2, 0.1], [0.05, 0.4, -0.3]);
        let t = 2e-4;
        let g1 = exp_algebra(&x, t);
        let g2 = exp_algebra(&x, t * (1.0 + 1e-9));
        assert!(g1.dist(&g2) < 1e-12);
        assert!(g1.is_unimodular(1e-15));
    }

    #[test]
    fn rotation_lift_round_trip() {
        let x = AlgebraElement::new([0.3, -1.2, 2.1], [0.0; 3]);
        let g = exp_algebra(&x, 1.3);
        let m = rotation_of(&g);
        let h = su2_from_rotation(&m);
        assert!(g.dist(&h) < 1e-12 || g.dist(&(-h)) < 1e-12);
    }
}
