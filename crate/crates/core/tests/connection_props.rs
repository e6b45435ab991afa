use nctorus::connections::{Connection, ConnectionRecord, ElementMatrix};
use nctorus::forms::MatrixForm;
use nctorus::linalg::{max_abs_diff, unitarity_residual, CMatrix};
use nctorus::{Exec, TorusElement, TorusParams, WeightVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> TorusParams {
    TorusParams::new(0.3819660113).unwrap()
}

fn cmatrix(rank: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rank * rank).prop_map(move |v| {
        CMatrix::from_iterator(
            rank,
            rank,
            v.into_iter().map(|(re, im)| Complex64::new(re, im)),
        )
    })
}

fn antihermitian(rank: usize) -> impl Strategy<Value = CMatrix> {
    cmatrix(rank).prop_map(|a| &a - a.adjoint())
}

fn constant_connection() -> impl Strategy<Value = Connection> {
    (1usize..=4)
        .prop_flat_map(|r| (cmatrix(r), cmatrix(r)))
        .prop_map(|(u, v)| Connection::from_constant(params(), &u, &v).unwrap())
}

fn element() -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((-2i64..=2, -2i64..=2, -1.0f64..1.0, -1.0f64..1.0), 0..4).prop_map(|ts| {
        TorusElement::from_terms(
            params(),
            ts.into_iter()
                .map(|(m, n, re, im)| (m, n, Complex64::new(re, im), 0)),
        )
    })
}

fn element_matrix(rank: usize) -> impl Strategy<Value = ElementMatrix> {
    prop::collection::vec(element(), rank * rank).prop_map(move |es| {
        let mut it = es.into_iter();
        MatrixForm::from_fn(rank, |_, _| it.next().unwrap())
    })
}

fn general_connection() -> impl Strategy<Value = Connection> {
    (1usize..=2)
        .prop_flat_map(|r| (element_matrix(r), element_matrix(r)))
        .prop_map(|(u, v)| Connection::new(u, v).unwrap())
}

fn weight() -> impl Strategy<Value = WeightVector> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| WeightVector::new(a, b))
}

fn curvature_pictures_agree(c: &Connection, tol: f64) -> bool {
    let form = c.curvature_form();
    let comm = c.curvature_commutator(WeightVector::U, WeightVector::V);
    form.entries()
        .iter()
        .zip(comm.entries())
        .all(|(f, t)| f.dudv.approx_eq(t, tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_form_matches_commutator_for_constant(c in constant_connection()) {
        prop_assert!(curvature_pictures_agree(&c, 1e-12));
    }

    #[test]
    fn curvature_form_matches_commutator_in_general(c in general_connection()) {
        prop_assert!(curvature_pictures_agree(&c, 1e-9));
    }

    #[test]
    fn commutator_curvature_is_antisymmetric(c in general_connection(), x in weight(), y in weight()) {
        let xy = c.curvature_commutator(x, y);
        let yx = c.curvature_commutator(y, x);
        for (a, b) in xy.entries().iter().zip(yx.entries()) {
            prop_assert!((a + b).max_abs() < 1e-9);
        }
    }

    #[test]
    fn commutator_curvature_is_bilinear(c in general_connection(), x in weight(), y in weight()) {
        let det = (x.alpha * y.beta - x.beta * y.alpha) as f64;
        let xy = c.curvature_commutator(x, y);
        let uv = c.curvature_commutator(WeightVector::U, WeightVector::V);
        for (a, b) in xy.entries().iter().zip(uv.entries()) {
            prop_assert!(a.approx_eq(&b.scale(Complex64::new(det, 0.0)), 1e-8));
        }
    }

    #[test]
    fn nabla_satisfies_leibniz(c in general_connection(), w in weight(), x in element(), xs in prop::collection::vec(element(), 2)) {
        let xi: Vec<_> = xs[..c.rank()].to_vec();
        let xi_x: Vec<_> = xi.iter().map(|e| e * &x).collect();
        let lhs = c.nabla(w, &xi_x).unwrap();
        let dxi = c.nabla(w, &xi).unwrap();
        let dx = x.apply_derivation(w);
        for ((l, (d, e)), _) in lhs.iter().zip(dxi.iter().zip(&xi)).zip(0..) {
            let rhs = &(d * &x) + &(e * &dx);
            prop_assert!(l.approx_eq(&rhs, 1e-9));
        }
    }

    #[test]
    fn transport_is_unitary_for_antihermitian_coefficients(
        (u, v) in (1usize..=4).prop_flat_map(|r| (antihermitian(r), antihermitian(r))),
        w in weight(),
        tau in -2.0f64..2.0,
    ) {
        let c = Connection::from_constant(params(), &u, &v).unwrap();
        prop_assert!(c.is_antihermitian(1e-12));
        let t = c.transport(w, tau).unwrap();
        prop_assert!(unitarity_residual(&t.matrix) < 1e-10);
    }

    #[test]
    fn transport_matrices_form_a_group(
        (u, v) in (1usize..=4).prop_flat_map(|r| (antihermitian(r), antihermitian(r))),
        w in weight(),
        tau in -1.0f64..1.0,
        sigma in -1.0f64..1.0,
    ) {
        let c = Connection::from_constant(params(), &u, &v).unwrap();
        let sum = c.transport(w, tau + sigma).unwrap().matrix;
        let prod = c.transport(w, tau).unwrap().matrix * c.transport(w, sigma).unwrap().matrix;
        let scale = sum.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(max_abs_diff(&sum, &prod) / scale < 1e-10);
        prop_assert!(max_abs_diff(&c.transport(w, 0.0).unwrap().matrix, &nctorus::linalg::identity(c.rank())) == 0.0);
    }

    #[test]
    fn record_round_trip(c in constant_connection()) {
        let rec = ConnectionRecord::from(&c);
        let text = serde_json::to_string(&rec).unwrap();
        let back: ConnectionRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.into_connection(params()).unwrap(), c);
    }
}

#[test]
fn fifty_random_constant_connections_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let r = rng.gen_range(1..=4);
        let mut m = || {
            CMatrix::from_fn(r, r, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        };
        let (u, v) = (m(), m());
        let c = Connection::from_constant(params(), &u, &v).unwrap();
        assert!(curvature_pictures_agree(&c, 1e-12));
        let comm = c.curvature_commutator(WeightVector::U, WeightVector::V);
        let expected = &u * &v - &v * &u;
        for i in 0..r {
            for j in 0..r {
                let got = comm.get(i, j).coeff(0, 0);
                assert!((got - expected[(i, j)]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn commuting_coefficients_are_flat_and_generic_ones_are_not() {
    let d = |a: f64, b: f64| {
        CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.0, a),
            (1, 1) => Complex64::new(0.0, b),
            _ => Complex64::new(0.0, 0.0),
        })
    };
    let flat = Connection::from_constant(params(), &d(0.1, 0.2), &d(0.3, -0.4)).unwrap();
    assert!(flat.is_flat());
    let x = CMatrix::from_fn(2, 2, |i, j| {
        Complex64::new(if (i, j) == (0, 1) { 1.0 } else { 0.0 }, 0.0)
    });
    let curved = Connection::from_constant(params(), &x, &x.transpose()).unwrap();
    assert!(!curved.is_flat());
}

#[test]
fn axiom_check_requires_constant_coefficients() {
    let tu = MatrixForm::from_fn(1, |_, _| TorusElement::u(params()));
    let tv = MatrixForm::from_fn(1, |_, _| TorusElement::zero(params()));
    let c = Connection::new(tu, tv).unwrap();
    let err = c
        .check_transport_axioms(WeightVector::U, 4, 1, Exec::Sequential)
        .unwrap_err();
    assert_eq!(err.code(), "non_constant_connection");
}
