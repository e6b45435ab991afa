use nctorus::forms::{d0, d1};
use nctorus::{TorusElement, TorusParams, WeightVector};
use num_complex::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn params() -> impl Strategy<Value = TorusParams> {
    (0.01f64..0.99).prop_map(|t| TorusParams::new(t).unwrap())
}

fn element(p: TorusParams) -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 0..6).prop_map(
        move |ts| {
            TorusElement::from_terms(
                p,
                ts.into_iter()
                    .map(|(m, n, re, im)| (m, n, Complex64::new(re, im), 0)),
            )
        },
    )
}

fn weight() -> impl Strategy<Value = WeightVector> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| WeightVector::new(a, b))
}

fn triple() -> impl Strategy<Value = (TorusElement, TorusElement, TorusElement)> {
    params().prop_flat_map(|p| (element(p), element(p), element(p)))
}

fn pair() -> impl Strategy<Value = (TorusElement, TorusElement)> {
    params().prop_flat_map(|p| (element(p), element(p)))
}

proptest! {
    #[test]
    fn multiplication_is_associative((a, b, c) in triple()) {
        let lhs = &(&a * &b) * &c;
        let rhs = &a * &(&b * &c);
        prop_assert!(lhs.approx_eq(&rhs, TOL), "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn multiplication_distributes((a, b, c) in triple()) {
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert!(lhs.approx_eq(&rhs, TOL));
    }

    #[test]
    fn star_is_an_involutive_antihomomorphism((a, b) in pair()) {
        prop_assert!(a.star().star().approx_eq(&a, TOL));
        let lhs = (&a * &b).star();
        let rhs = &b.star() * &a.star();
        prop_assert!(lhs.approx_eq(&rhs, TOL));
    }

    #[test]
    fn derivation_satisfies_leibniz((a, b) in pair(), w in weight()) {
        let lhs = (&a * &b).apply_derivation(w);
        let rhs = &(&a.apply_derivation(w) * &b) + &(&a * &b.apply_derivation(w));
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn flow_is_a_group_of_automorphisms((a, b) in pair(), w in weight(), t in -2.0f64..2.0, s in -2.0f64..2.0) {
        let composed = a.apply_auto(w, s).apply_auto(w, t);
        prop_assert!(a.apply_auto(w, t + s).approx_eq(&composed, TOL));
        prop_assert!(a.apply_auto(w, 0.0).approx_eq(&a, 0.0));
        let lhs = (&a * &b).apply_auto(w, t);
        let rhs = &a.apply_auto(w, t) * &b.apply_auto(w, t);
        prop_assert!(lhs.approx_eq(&rhs, TOL));
        prop_assert!(a.star().apply_auto(w, t).approx_eq(&a.apply_auto(w, t).star(), TOL));
    }

    #[test]
    fn derivation_is_the_generator_of_the_flow(a in params().prop_flat_map(element), w in weight()) {
        let t = 1e-6;
        let quotient = (&a.apply_auto(w, t) - &a).scale(Complex64::new(1.0 / t, 0.0));
        let exact = a.apply_derivation(w);
        let scale = exact.max_abs().max(1.0);
        prop_assert!(quotient.max_abs_diff(&exact) / scale < 1e-4);
    }

    #[test]
    fn exterior_derivative_squares_to_zero(a in params().prop_flat_map(element)) {
        let scale = a.apply_derivation(WeightVector::U).apply_derivation(WeightVector::V).max_abs().max(1.0);
        prop_assert!(d1(&d0(&a)).max_abs() <= 1e-14 * scale);
    }

    #[test]
    fn d0_satisfies_leibniz((a, b) in pair()) {
        let lhs = d0(&(&a * &b));
        let rhs = d0(&a).right_mul(&b).unwrap().checked_add(&d0(&b).left_mul(&a).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    #[test]
    fn json_round_trip(a in params().prop_flat_map(element)) {
        let text = serde_json::to_string(&a).unwrap();
        let back: TorusElement = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn mixed_parameters_are_rejected() {
    let a = TorusElement::u(TorusParams::new(0.3).unwrap());
    let b = TorusElement::v(TorusParams::new(0.4).unwrap());
    assert_eq!(a.checked_mul(&b).unwrap_err().code(), "param_mismatch");
}
