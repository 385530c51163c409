//! The symplectic form on horizontal Darboux curves, variations, the moment map
//! and the alternate form.
//!
//! Sign convention: `omega(U, [Lambda, U]) = + int |U|^2` on the sphere, with the
//! hyperbolic form carrying the same global sign so that the correspondence
//! `Lambda -> i Lambda` is an isometry of the two forms.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::frames::SemidirectElement;
use crate::grid::PeriodicGrid;
use crate::liealg::{bracket, scale, trace_form, AlgebraElement, Convention, SpaceForm};
use crate::magnetic::SpinField;

/// Tangency tolerance used by [`omega`].
pub const TANGENCY_TOL: f64 = 1e-8;

/// Variation datum `U(s)` at the grid samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPerturbation {
    pub grid: PeriodicGrid,
    pub u: Vec<AlgebraElement>,
}

impl TangentPerturbation {
    pub fn new(grid: PeriodicGrid, u: Vec<AlgebraElement>) -> Result<Self> {
        grid.check_len(u.len(), "perturbation")?;
        Ok(TangentPerturbation { grid, u })
    }

    /// Perturbation from Cartan coordinates of the given case.
    pub fn from_coords(grid: PeriodicGrid, form: SpaceForm, v: &[[f64; 3]]) -> Result<Self> {
        Self::new(grid, v.iter().map(|x| form.cartan_vec(*x)).collect())
    }

    pub fn coords(&self, form: SpaceForm) -> Vec<[f64; 3]> {
        self.u.iter().map(|x| form.cartan_coords(x)).collect()
    }

    /// `U(0) = 0` within `tol`.
    pub fn is_anchored(&self, tol: f64) -> bool {
        self.u[0].max_abs() <= tol
    }

    /// Largest `|<Lambda, U>|` over the samples, with its index.
    pub fn tangency_defect(&self, lambda: &SpinField) -> (usize, f64) {
        let conv = lambda.form.convention();
        (0..self.u.len())
            .map(|j| (j, trace_form(&lambda.element(j), &self.u[j], conv).norm()))
            .fold((0, 0.0), |m, x| if x.1 > m.1 { x } else { m })
    }

    fn check_tangent(&self, lambda: &SpinField) -> Result<()> {
        let (index, defect) = self.tangency_defect(lambda);
        if defect > TANGENCY_TOL {
            return Err(Error::TangencyViolation { index, defect });
        }
        Ok(())
    }
}

/// `i x` for an element of sl2(C): `i (a.A + b.B) = b.A - a.B`.
pub fn times_i(x: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::new(x.b, scale(-1.0, x.a))
}

/// Variation curve `V`: `dV/ds = [Lambda, V] + U` on the sphere, `dV/ds = U`
/// otherwise, `V(0) = 0`. Returns `N + 1` values (`s_0 .. s_N`). Midpoint
/// exponential stepping; exact for constant coefficients.
pub fn variational_transport(
    lambda: &SpinField,
    u: &TangentPerturbation,
    form: SpaceForm,
) -> Result<Vec<AlgebraElement>> {
    if lambda.grid != u.grid {
        return Err(Error::InvalidInput(
            "perturbation and spin field use different grids".into(),
        ));
    }
    let h = u.grid.h();
    let u_coords: Vec<[f64; 3]> = u.coords(form);
    let mid_u: Vec<[f64; 3]> = {
        let comps: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                u.grid
                    .shifted(&u_coords.iter().map(|v| v[k]).collect::<Vec<_>>(), 0.5 * h)
            })
            .collect();
        (0..u_coords.len())
            .map(|j| [comps[0][j], comps[1][j], comps[2][j]])
            .collect()
    };
    let n = u.grid.n;
    let mut out = Vec::with_capacity(n + 1);
    let mut v = [0.0; 3];
    out.push(form.cartan_vec(v));
    match form {
        SpaceForm::Spherical => {
            let mid_l = lambda.shifted(0.5 * h);
            for j in 0..n {
                // V' = -lambda x V + u: the affine flow is the semidirect
                // exponential with rotation generator -lambda and translation u
                let gen = AlgebraElement::new(scale(-h, mid_l[j]), scale(h, mid_u[j]));
                let step = SemidirectElement::exp(&gen);
                let rotated = crate::frames::rotate_cartan(&step.r, v);
                v = crate::liealg::add3(rotated, step.x);
                out.push(form.cartan_vec(v));
            }
        }
        _ => {
            for m in mid_u.iter().take(n) {
                v = crate::liealg::add3(v, scale(h, *m));
                out.push(form.cartan_vec(v));
            }
        }
    }
    Ok(out)
}

/// Pointwise integrand of the symplectic form.
fn omega_density(
    l: &AlgebraElement,
    u1: &AlgebraElement,
    u2: &AlgebraElement,
    form: SpaceForm,
) -> f64 {
    match form {
        SpaceForm::Spherical => trace_form(l, &bracket(u1, u2, form), Convention::Spherical).re,
        // the Hermitian pairing uses the sl2(C) brackets in both non-spherical cases
        _ => {
            let z = trace_form(
                l,
                &bracket(u1, u2, SpaceForm::Hyperbolic),
                Convention::Complex,
            );
            // -(1/i) z = i z
            (C64::i() * z).re
        }
    }
}

/// Symplectic form `omega(U1, U2)`: `int <Lambda, [U1, U2]>` (spherical trace form)
/// on the sphere and `i int <Lambda, [U1, U2]>` (complex trace form) otherwise.
pub fn omega(
    lambda: &SpinField,
    u1: &TangentPerturbation,
    u2: &TangentPerturbation,
    form: SpaceForm,
) -> Result<f64> {
    u1.check_tangent(lambda)?;
    u2.check_tangent(lambda)?;
    let vals: Vec<f64> = (0..lambda.len())
        .map(|j| omega_density(&lambda.element(j), &u1.u[j], &u2.u[j], form))
        .collect();
    Ok(lambda.grid.integrate(&vals))
}

/// Partner `[Lambda, U]` (spherical) or `i [Lambda, U]` (otherwise) realizing
/// the non-degeneracy pairing `omega(U, partner) = int |U|^2`.
pub fn tangent_partner(lambda: &SpinField, u: &TangentPerturbation) -> TangentPerturbation {
    let form = lambda.form;
    let v = (0..lambda.len())
        .map(|j| match form {
            SpaceForm::Spherical => bracket(&lambda.element(j), &u.u[j], form),
            _ => times_i(&bracket(&lambda.element(j), &u.u[j], SpaceForm::Hyperbolic)),
        })
        .collect();
    TangentPerturbation { grid: u.grid, u: v }
}

/// Alternate form `int <Lambda, [V1, V2]>`, with the factor `1/i` in the
/// non-spherical cases so that the value is real.
pub fn omega_alternate(
    lambda: &SpinField,
    v1: &[AlgebraElement],
    v2: &[AlgebraElement],
) -> Result<f64> {
    lambda.grid.check_len(v1.len(), "V1")?;
    lambda.grid.check_len(v2.len(), "V2")?;
    let form = lambda.form;
    let vals: Vec<f64> = (0..lambda.len())
        .map(|j| match form {
            SpaceForm::Spherical => {
                trace_form(
                    &lambda.element(j),
                    &bracket(&v1[j], &v2[j], form),
                    Convention::Spherical,
                )
                .re
            }
            _ => {
                let z = trace_form(
                    &lambda.element(j),
                    &bracket(&v1[j], &v2[j], SpaceForm::Hyperbolic),
                    Convention::Complex,
                );
                (z / C64::i()).re
            }
        })
        .collect();
    Ok(lambda.grid.integrate(&vals))
}

/// Moment map (total spin) `J = int Lambda ds`.
pub fn moment_map(lambda: &SpinField) -> AlgebraElement {
    let v = [0, 1, 2].map(|k| lambda.grid.integrate(&lambda.component(k)));
    lambda.form.cartan_vec(v)
}
