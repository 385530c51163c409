use std::f64::consts::TAU;

use darboux::grid::PeriodicGrid;
use darboux::liealg::{add3, cross, dot, exp_algebra, scale, sub3, AlgebraElement, SpaceForm};
use darboux::magnetic::{evolve, mat_vec, SpinField};
use darboux::samples::{random_spin_field, rng};
use darboux::symplectic::*;
use darboux::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn grid(l: f64, n: usize) -> PeriodicGrid {
    PeriodicGrid::periodic(l, n).unwrap()
}

/// Smooth random perturbation tangent to `lambda` and vanishing at `s = 0`.
fn tangent(lambda: &SpinField, r: &mut ChaCha8Rng) -> TangentPerturbation {
    let g = lambda.grid;
    let w = TAU / g.length;
    let c: Vec<[f64; 4]> = (0..3)
        .map(|_| [0; 4].map(|_| r.gen_range(-1.0..1.0)))
        .collect();
    let coords: Vec<[f64; 3]> = g
        .nodes()
        .iter()
        .zip(&lambda.lam)
        .map(|(&s, l)| {
            let x = w * s;
            let raw = [0, 1, 2].map(|k| {
                c[k][0] + c[k][1] * x.cos() + c[k][2] * x.sin() + c[k][3] * (2.0 * x).cos()
            });
            let perp = sub3(raw, scale(dot(raw, *l), *l));
            scale((0.5 * x).sin().powi(2), perp)
        })
        .collect();
    TangentPerturbation::from_coords(g, lambda.form, &coords).unwrap()
}

fn field(form: SpaceForm, seed: u64) -> SpinField {
    random_spin_field(grid(TAU, 128), form, 3, 0.3, &mut rng(seed)).unwrap()
}

fn combine(
    a: f64,
    x: &TangentPerturbation,
    b: f64,
    y: &TangentPerturbation,
) -> TangentPerturbation {
    TangentPerturbation::new(
        x.grid,
        x.u.iter().zip(&y.u).map(|(p, q)| a * *p + b * *q).collect(),
    )
    .unwrap()
}

#[test]
fn zero_perturbation_transports_to_zero() {
    for form in SpaceForm::ALL {
        let lam = field(form, 1);
        let u = TangentPerturbation::from_coords(lam.grid, form, &vec![[0.0; 3]; 128]).unwrap();
        let v = variational_transport(&lam, &u, form).unwrap();
        assert_eq!(v.len(), 129);
        assert!(v.iter().all(|x| x.max_abs() == 0.0));
    }
}

#[test]
fn hyperbolic_transport_integrates_the_perturbation() {
    let k = 2.0;
    let lam = SpinField::constant(grid(TAU, 256), SpaceForm::Hyperbolic, [1.0, 0.0, 0.0]).unwrap();
    let coords: Vec<[f64; 3]> = lam
        .grid
        .nodes()
        .iter()
        .map(|s| [0.0, (k * s).sin(), 1.0 - (k * s).cos()])
        .collect();
    let u = TangentPerturbation::from_coords(lam.grid, SpaceForm::Hyperbolic, &coords).unwrap();
    let v = variational_transport(&lam, &u, SpaceForm::Hyperbolic).unwrap();
    let h = lam.grid.h();
    for (j, x) in v.iter().enumerate() {
        assert!(x.is_cartan());
        let s = j as f64 * h;
        let exact = [0.0, (1.0 - (k * s).cos()) / k, s - (k * s).sin() / k];
        // composite midpoint error bound s h^2 max|U''| / 24
        let bound = s * h * h * k * k / 24.0 + 1e-13;
        assert!(
            sub3(x.b, exact).iter().all(|d| d.abs() <= bound),
            "{s}: {:?} vs {exact:?}",
            x.b
        );
    }
}

#[test]
fn spherical_transport_with_constant_coefficients_is_exact() {
    let c = 0.8;
    let lam = SpinField::constant(grid(5.0, 40), SpaceForm::Spherical, [1.0, 0.0, 0.0]).unwrap();
    let u =
        TangentPerturbation::from_coords(lam.grid, SpaceForm::Spherical, &vec![[0.0, c, 0.0]; 40])
            .unwrap();
    let v = variational_transport(&lam, &u, SpaceForm::Spherical).unwrap();
    // V' = [A1, V] + c A2 has the solution c (sin s A2 + (cos s - 1) A3)
    for (j, x) in v.iter().enumerate() {
        let s = j as f64 * lam.grid.h();
        let exact = [0.0, c * s.sin(), c * (s.cos() - 1.0)];
        assert!(sub3(x.a, exact).iter().all(|d| d.abs() < 1e-10), "{s}");
    }
}

#[test]
fn omega_is_antisymmetric_and_bilinear() {
    for form in SpaceForm::ALL {
        let lam = field(form, 2);
        let mut r = rng(20);
        for _ in 0..20 {
            let u1 = tangent(&lam, &mut r);
            let u2 = tangent(&lam, &mut r);
            let u3 = tangent(&lam, &mut r);
            let w12 = omega(&lam, &u1, &u2, form).unwrap();
            let w21 = omega(&lam, &u2, &u1, form).unwrap();
            let scale = w12.abs().max(1.0);
            assert!((w12 + w21).abs() < 1e-12 * scale);
            assert!(omega(&lam, &u1, &u1, form).unwrap().abs() < 1e-12);
            let lin = omega(&lam, &combine(1.5, &u1, -0.7, &u3), &u2, form).unwrap();
            let parts = 1.5 * w12 - 0.7 * omega(&lam, &u3, &u2, form).unwrap();
            assert!((lin - parts).abs() < 1e-12 * lin.abs().max(1.0));
        }
    }
}

#[test]
fn omega_is_nondegenerate() {
    for form in SpaceForm::ALL {
        let lam = field(form, 3);
        let mut r = rng(30);
        for _ in 0..100 {
            let u = tangent(&lam, &mut r);
            let partner = tangent_partner(&lam, &u);
            let w = omega(&lam, &u, &partner, form).unwrap();
            let norm: Vec<f64> = u.coords(form).iter().map(|x| dot(*x, *x)).collect();
            let n2 = lam.grid.integrate(&norm);
            assert!(w >= (1.0 - 1e-6) * n2, "{form:?}: {w} vs {n2}");
            assert!((w - n2).abs() < 1e-12 * n2);
        }
    }
}

#[test]
fn hyperbolic_form_matches_spherical_under_multiplication_by_i() {
    let lam = field(SpaceForm::Hyperbolic, 4);
    let sph = SpinField::new(lam.grid, lam.lam.clone(), SpaceForm::Spherical).unwrap();
    let mut r = rng(40);
    for _ in 0..10 {
        let u1 = tangent(&lam, &mut r);
        let u2 = tangent(&lam, &mut r);
        let t1 = TangentPerturbation::new(u1.grid, u1.u.iter().map(times_i).collect()).unwrap();
        let t2 = TangentPerturbation::new(u2.grid, u2.u.iter().map(times_i).collect()).unwrap();
        // i (b.B) = b.A, so the tilde data carry the same coordinates on the sphere
        assert_eq!(
            t1.coords(SpaceForm::Spherical),
            u1.coords(SpaceForm::Hyperbolic)
        );
        let h = omega(&lam, &u1, &u2, SpaceForm::Hyperbolic).unwrap();
        let s = omega(&sph, &t1, &t2, SpaceForm::Spherical).unwrap();
        assert!((h - s).abs() < 1e-10, "{h} vs {s}");
    }
}

#[test]
fn omega_rejects_non_tangent_input() {
    let lam = SpinField::constant(grid(1.0, 16), SpaceForm::Spherical, [1.0, 0.0, 0.0]).unwrap();
    let mut coords = vec![[0.0, 1.0, 0.0]; 16];
    coords[7] = [0.1, 1.0, 0.0];
    let bad = TangentPerturbation::from_coords(lam.grid, SpaceForm::Spherical, &coords).unwrap();
    let good = TangentPerturbation::from_coords(
        lam.grid,
        SpaceForm::Spherical,
        &vec![[0.0, 0.0, 1.0]; 16],
    )
    .unwrap();
    assert!(matches!(
        omega(&lam, &good, &bad, SpaceForm::Spherical),
        Err(Error::TangencyViolation { index: 7, .. })
    ));
}

#[test]
fn alternate_form_examples() {
    let l = 3.0;
    let lam = SpinField::constant(grid(l, 16), SpaceForm::Hyperbolic, [1.0, 0.0, 0.0]).unwrap();
    let v1 = vec![AlgebraElement::b_basis(1); 16];
    let v2 = vec![AlgebraElement::b_basis(2); 16];
    // [B2, B3] = A1 and <B1, A1> = i, so the integrand is 1
    assert!((omega_alternate(&lam, &v1, &v2).unwrap() - l).abs() < 1e-14);
    assert!((omega_alternate(&lam, &v2, &v1).unwrap() + l).abs() < 1e-14);
    assert_eq!(omega_alternate(&lam, &v1, &v1).unwrap(), 0.0);

    let lam = field(SpaceForm::Spherical, 5);
    let mut r = rng(50);
    let w1 = variational_transport(&lam, &tangent(&lam, &mut r), SpaceForm::Spherical).unwrap();
    let w2 = variational_transport(&lam, &tangent(&lam, &mut r), SpaceForm::Spherical).unwrap();
    let (w1, w2) = (&w1[..128], &w2[..128]);
    let a = omega_alternate(&lam, w1, w2).unwrap();
    let b = omega_alternate(&lam, w2, w1).unwrap();
    assert!((a + b).abs() < 1e-12 * a.abs().max(1.0));
    assert!(omega_alternate(&lam, w1, w1).unwrap().abs() < 1e-12);
}

#[test]
fn moment_map_examples() {
    let l = 2.5;
    let lam = SpinField::constant(grid(l, 32), SpaceForm::Spherical, [1.0, 0.0, 0.0]).unwrap();
    let j = moment_map(&lam);
    assert!((j - l * AlgebraElement::a_basis(0)).max_abs() < 1e-14);
    let loop_field = SpinField::from_fn(grid(l, 32), SpaceForm::Hyperbolic, |s| {
        let x = TAU * s / l;
        [x.cos(), x.sin(), 0.0]
    })
    .unwrap();
    assert!(moment_map(&loop_field).max_abs() < 1e-14);
}

#[test]
fn moment_map_is_equivariant() {
    let lam = field(SpaceForm::Spherical, 6);
    let r = exp_algebra(&AlgebraElement::new([0.3, -1.1, 0.6], [0.0; 3]), 1.0);
    let m = darboux::liealg::rotation_of(&r);
    let rotated = lam.rotated(&m);
    let j = moment_map(&lam).a;
    let jr = moment_map(&rotated).a;
    assert!(sub3(jr, mat_vec(&m, j)).iter().all(|d| d.abs() < 1e-10));
}

#[test]
fn total_spin_is_conserved_by_the_magnetic_flow() {
    let lam = random_spin_field(grid(TAU, 64), SpaceForm::Spherical, 3, 0.3, &mut rng(7)).unwrap();
    let traj = evolve(&lam, 1.0, 1e-3).unwrap();
    let j0 = moment_map(&traj.states[0]).a;
    let j1 = moment_map(traj.last()).a;
    let drift = sub3(j1, j0).iter().fold(0.0f64, |m, d| m.max(d.abs()));
    assert!(drift < 1e-6, "{drift}");
}

#[test]
fn tangent_partner_is_tangent() {
    for form in SpaceForm::ALL {
        let lam = field(form, 8);
        let u = tangent(&lam, &mut rng(80));
        let p = tangent_partner(&lam, &u);
        assert!(p.tangency_defect(&lam).1 < 1e-12);
        assert!(p.is_anchored(1e-15));
        // pointwise the partner is lambda x U up to sign
        for (x, (l, v)) in p
            .coords(form)
            .iter()
            .zip(lam.lam.iter().zip(u.coords(form)))
        {
            let c = cross(*l, v);
            assert!(
                sub3(*x, c).iter().all(|d| d.abs() < 1e-14)
                    || add3(*x, c).iter().all(|d| d.abs() < 1e-14)
            );
        }
    }
}
