use darboux::liealg::*;
use darboux::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn a(i: usize) -> AlgebraElement {
    AlgebraElement::a_basis(i)
}
fn b(i: usize) -> AlgebraElement {
    AlgebraElement::b_basis(i)
}

fn close(x: &AlgebraElement, y: &AlgebraElement, tol: f64) -> bool {
    (*x - *y).max_abs() <= tol
}

#[test]
fn rotation_generators_close_with_minus_sign() {
    for form in SpaceForm::ALL {
        assert_eq!(bracket(&a(0), &a(1), form), -1.0 * a(2));
    }
}

#[test]
fn hermitian_pair_depends_on_epsilon() {
    assert_eq!(bracket(&b(1), &b(2), SpaceForm::Hyperbolic), a(0));
    assert_eq!(
        bracket(&b(1), &b(2), SpaceForm::Euclidean),
        AlgebraElement::ZERO
    );
    assert_eq!(bracket(&b(1), &b(2), SpaceForm::Spherical), -1.0 * a(0));
}

#[test]
fn printed_tables_match_structure_constants() {
    let t1 = parse_table(&TABLE_SL2, -1.0).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let got = bracket(
                &AlgebraElement::basis(i),
                &AlgebraElement::basis(j),
                SpaceForm::Hyperbolic,
            );
            assert_eq!(got, t1[i][j], "[{}, {}]", BASIS_NAMES[i], BASIS_NAMES[j]);
        }
    }
    for form in SpaceForm::ALL {
        let t2 = parse_table(&TABLE_EPS, form.epsilon()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let got = bracket(&AlgebraElement::basis(i), &AlgebraElement::basis(j), form);
                assert_eq!(
                    got,
                    t2[i][j],
                    "eps {} [{}, {}]",
                    form.epsilon(),
                    BASIS_NAMES[i],
                    BASIS_NAMES[j]
                );
            }
        }
    }
}

#[test]
fn matrix_commutator_reproduces_hyperbolic_table() {
    let t1 = parse_table(&TABLE_SL2, -1.0).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let x = AlgebraElement::basis(i).to_matrix();
            let y = AlgebraElement::basis(j).to_matrix();
            let c = AlgebraElement::from_matrix(&matrix_bracket(&x, &y), 1e-14).unwrap();
            assert!(close(&c, &t1[i][j], 1e-15), "{i} {j}: {c:?}");
        }
    }
}

#[test]
fn malformed_table_entries_are_rejected() {
    assert!(parse_table_entry("C1", 1.0).is_err());
    assert!(parse_table_entry("A4", 1.0).is_err());
    assert_eq!(parse_table_entry("-eB2", -1.0).unwrap(), b(1));
}

#[test]
fn trace_form_values() {
    let one = Complex64::new(1.0, 0.0);
    assert_eq!(trace_form(&a(0), &a(0), Convention::Spherical), one);
    assert_eq!(trace_form(&a(0), &a(0), Convention::Complex), -one);
    assert_eq!(
        trace_form(&a(0), &b(0), Convention::Complex),
        Complex64::i()
    );
    assert_eq!(trace_form(&b(1), &b(1), Convention::Complex), one);
    assert_eq!(
        trace_form(&b(1), &b(2), Convention::Complex),
        Complex64::new(0.0, 0.0)
    );
}

#[test]
fn trace_form_matches_matrix_trace() {
    let x = AlgebraElement::new([0.3, -1.2, 0.5], [0.7, 0.1, -0.4]);
    let y = AlgebraElement::new([-0.6, 0.2, 0.9], [0.2, -0.8, 0.3]);
    let tr = (x.to_matrix() * y.to_matrix()).trace() * 2.0;
    assert!((trace_form(&x, &y, Convention::Complex) - tr).norm() < 1e-15);
    assert!((trace_form(&x, &y, Convention::Spherical) + tr).norm() < 1e-15);
}

#[test]
fn space_form_rejects_other_values() {
    assert_eq!(SpaceForm::from_epsilon(2), Err(Error::InvalidSpaceForm(2)));
    let f: SpaceForm = serde_json::from_str("-1").unwrap();
    assert_eq!(f, SpaceForm::Hyperbolic);
    assert!(serde_json::from_str::<SpaceForm>("3").is_err());
}

#[test]
fn exponential_closed_forms() {
    let t = 1.3;
    let g = exp_algebra(&a(0), t);
    let e = Mat2::new(
        Complex64::from_polar(1.0, t / 2.0),
        0.0.into(),
        0.0.into(),
        Complex64::from_polar(1.0, -t / 2.0),
    );
    assert!(g.dist(&e) < 1e-15);
    let x = AlgebraElement::new([0.3, 0.4, -0.2], [0.1, 0.5, 0.9]);
    assert!(exp_algebra(&x, 0.0).dist(&Mat2::identity()) < 1e-15);
    assert!(exp_algebra(&a(0), 4.0 * std::f64::consts::PI).dist(&Mat2::identity()) < 1e-14);
    // half turn of the spin lift is -I
    assert!(
        exp_algebra(&a(0), 2.0 * std::f64::consts::PI).dist(&Mat2::identity().scale_re(-1.0))
            < 1e-14
    );
    let h = exp_algebra(&b(0), 2.0);
    let e = Mat2::new(
        1f64.exp().into(),
        0.0.into(),
        0.0.into(),
        (-1f64).exp().into(),
    );
    assert!(h.dist(&e) < 1e-14);
}

#[test]
fn adjoint_examples() {
    let pi = std::f64::consts::PI;
    let g = exp_algebra(&a(0), 0.8);
    assert!(close(&adjoint(&g, &a(0)).unwrap(), &a(0), 1e-15));
    let g = exp_algebra(&a(0), pi);
    assert!(close(&adjoint(&g, &a(1)).unwrap(), &(-1.0 * a(1)), 1e-15));
    let x = AlgebraElement::new([0.3, 0.4, -0.2], [0.1, 0.5, 0.9]);
    assert!(close(&adjoint(&Mat2::identity(), &x).unwrap(), &x, 1e-15));
}

#[test]
fn adjoint_rejects_non_unimodular_input() {
    let g = Mat2::identity().scale_re(2.0);
    assert!(matches!(
        adjoint(&g, &a(0)),
        Err(Error::RealizationMismatch { .. })
    ));
}

#[test]
fn pairing_examples() {
    let e0 = point_matrix([1.0, 0.0, 0.0, 0.0], SpaceForm::Hyperbolic);
    let e1 = point_matrix([0.0, 1.0, 0.0, 0.0], SpaceForm::Hyperbolic);
    assert!((pairing(&e0, &e0, SpaceForm::Hyperbolic).unwrap() - 1.0).abs() < 1e-15);
    assert!((pairing(&e1, &e1, SpaceForm::Hyperbolic).unwrap() + 1.0).abs() < 1e-15);
    let x = [0.3, -1.1, 0.8, 0.25];
    let y = [-0.7, 0.4, 1.9, -0.6];
    let h = pairing(
        &point_matrix(x, SpaceForm::Hyperbolic),
        &point_matrix(y, SpaceForm::Hyperbolic),
        SpaceForm::Hyperbolic,
    );
    assert!((h.unwrap() - lorentz_form(x, y)).abs() < 1e-12);
    let e = pairing(
        &point_matrix(x, SpaceForm::Spherical),
        &point_matrix(y, SpaceForm::Spherical),
        SpaceForm::Spherical,
    );
    let dot4: f64 = (0..4).map(|k| x[k] * y[k]).sum();
    assert!((e.unwrap() - dot4).abs() < 1e-12);
}

#[test]
fn pairing_flags_non_scalar_products() {
    // the symmetrized product of 2x2 matrices is always scalar; a complex
    // scalar is what signals inputs outside the real point models
    let x = Mat2::identity().scale(Complex64::i());
    let y = Mat2::identity();
    assert!(matches!(
        pairing(&x, &y, SpaceForm::Hyperbolic),
        Err(Error::NotScalar { .. })
    ));
}

#[test]
fn spin_cover_examples() {
    let id = spin_cover(&Mat2::identity());
    for i in 0..4 {
        for j in 0..4 {
            assert!((id[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
        }
    }
    let r = exp_algebra(&AlgebraElement::new([0.4, -0.3, 1.1], [0.0; 3]), 1.0);
    let m = spin_cover(&r);
    assert!((m[0][0] - 1.0).abs() < 1e-14);
    for k in 1..4 {
        assert!(m[k][0].abs() < 1e-14 && m[0][k].abs() < 1e-14);
    }
    // the spatial block is a proper rotation
    for i in 1..4 {
        for j in 1..4 {
            let g: f64 = (1..4).map(|k| m[k][i] * m[k][j]).sum();
            assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }
    let det = m[1][1] * (m[2][2] * m[3][3] - m[2][3] * m[3][2])
        - m[1][2] * (m[2][1] * m[3][3] - m[2][3] * m[3][1])
        + m[1][3] * (m[2][1] * m[3][2] - m[2][2] * m[3][1]);
    assert!((det - 1.0).abs() < 1e-14);
}

#[test]
fn su2_lift_inverts_rotation() {
    let r = exp_algebra(&AlgebraElement::new([0.4, -0.3, 2.9], [0.0; 3]), 1.0);
    let back = su2_from_rotation(&rotation_of(&r));
    assert!(back.dist(&r).min(back.dist(&r.scale_re(-1.0))) < 1e-12);
}

// ---------------------------------------------------------------------------
// properties

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn element() -> impl Strategy<Value = AlgebraElement> {
    prop::array::uniform6(coord()).prop_map(AlgebraElement::from_array)
}

fn rotational() -> impl Strategy<Value = AlgebraElement> {
    prop::array::uniform3(coord()).prop_map(|v| AlgebraElement::new(v, [0.0; 3]))
}

fn hermitian() -> impl Strategy<Value = AlgebraElement> {
    prop::array::uniform3(coord()).prop_map(|v| AlgebraElement::new([0.0; 3], v))
}

fn form() -> impl Strategy<Value = SpaceForm> {
    prop::sample::select(SpaceForm::ALL.to_vec())
}

fn group_element() -> impl Strategy<Value = GroupElement> {
    prop::array::uniform6(-1.0..1.0f64)
        .prop_map(|v| exp_algebra(&AlgebraElement::from_array(v), 1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bracket_is_antisymmetric(x in element(), y in element(), f in form()) {
        let s = bracket(&x, &y, f) + bracket(&y, &x, f);
        prop_assert!(s.max_abs() < 1e-15);
    }

    #[test]
    fn jacobi_identity(x in element(), y in element(), z in element(), f in form()) {
        let j = bracket(&x, &bracket(&y, &z, f), f)
            + bracket(&y, &bracket(&z, &x, f), f)
            + bracket(&z, &bracket(&x, &y, f), f);
        prop_assert!(j.max_abs() < 1e-12, "residual {}", j.max_abs());
    }

    #[test]
    fn bracket_matches_matrix_commutator_for_hyperbolic(x in element(), y in element()) {
        let m = matrix_bracket(&x.to_matrix(), &y.to_matrix());
        let c = AlgebraElement::from_matrix(&m, 1e-12).unwrap();
        prop_assert!(close(&c, &bracket(&x, &y, SpaceForm::Hyperbolic), 1e-13));
    }

    #[test]
    fn rotational_triple_bracket(x in rotational(), y in rotational(), z in rotational()) {
        let ip = |p: &AlgebraElement, q: &AlgebraElement| trace_form(p, q, Convention::Spherical).re;
        let f = SpaceForm::Spherical;
        let lhs = bracket(&x, &bracket(&y, &z, f), f);
        let rhs = ip(&x, &z) * y - ip(&x, &y) * z;
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    /// On the Hermitian part the identity carries the factor `eps`; at eps = -1
    /// the signs of the two terms are exchanged relative to the rotational case.
    #[test]
    fn hermitian_triple_bracket(x in hermitian(), y in hermitian(), z in hermitian(), f in form()) {
        let ip = |p: &AlgebraElement, q: &AlgebraElement| trace_form(p, q, Convention::Complex).re;
        let lhs = bracket(&x, &bracket(&y, &z, f), f);
        let rhs = f.epsilon() * (ip(&x, &z) * y - ip(&x, &y) * z);
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn trace_form_is_conjugation_invariant(x in element(), y in element(), g in group_element()) {
        let gx = adjoint(&g, &x).unwrap();
        let gy = adjoint(&g, &y).unwrap();
        let d = trace_form(&gx, &gy, Convention::Complex) - trace_form(&x, &y, Convention::Complex);
        let scale = 1.0 + x.coord_norm() * y.coord_norm();
        prop_assert!(d.norm() < 1e-10 * scale, "defect {}", d.norm());
    }

    #[test]
    fn cartan_relations(x in rotational(), y in rotational(), p in hermitian(), q in hermitian(), f in form()) {
        prop_assert!(bracket(&p, &q, f).is_rotational());
        prop_assert!(bracket(&x, &p, f).is_cartan());
        prop_assert!(bracket(&x, &y, f).is_rotational());
    }

    #[test]
    fn exponential_is_a_one_parameter_group(x in element(), t in -1.0..1.0f64, u in -1.0..1.0f64) {
        let lhs = exp_algebra(&x, t + u);
        let rhs = exp_algebra(&x, t) * exp_algebra(&x, u);
        prop_assert!(lhs.dist(&rhs) < 1e-12 * lhs.frobenius().max(1.0));
        prop_assert!((lhs.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12 * lhs.frobenius().powi(2).max(1.0));
    }

    #[test]
    fn spin_cover_is_a_lorentz_homomorphism(p in group_element(), q in group_element()) {
        let mp = spin_cover(&p);
        let mq = spin_cover(&q);
        let mpq = spin_cover(&(p * q));
        let scale = mp.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs())) * mq.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            for j in 0..4 {
                let prod: f64 = (0..4).map(|k| mp[i][k] * mq[k][j]).sum();
                prop_assert!((prod - mpq[i][j]).abs() < 1e-10 * scale);
            }
        }
        let mneg = spin_cover(&p.scale_re(-1.0));
        prop_assert_eq!(mneg, mp);
        let cols: Vec<[f64; 4]> = (0..4).map(|k| [mp[0][k], mp[1][k], mp[2][k], mp[3][k]]).collect();
        for i in 0..4 {
            for j in 0..4 {
                let eta = if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 };
                prop_assert!((lorentz_form(cols[i], cols[j]) - eta).abs() < 1e-10 * scale);
            }
        }
    }
}
