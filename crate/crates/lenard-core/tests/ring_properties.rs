//! Property tests for the differential-polynomial ring: algebraic axioms,
//! the derivation laws, exactness detection, and serialization round-trips.

use lenard_core::ring::{
    antiderivative, poly_from_json, poly_to_json, rat, total_derivative, variational_derivative,
    DiffPoly, Monomial,
};
use proptest::prelude::*;

/// Random rational with small numerator and denominator.
fn arb_rat() -> impl Strategy<Value = lenard_core::Rat> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

/// Random monomial; `laurent` admits negative `x` powers.
fn arb_monomial(laurent: bool) -> impl Strategy<Value = Monomial> {
    let xr = if laurent { -3i64..=3 } else { 0i64..=3 };
    (
        xr,
        proptest::collection::btree_map(0u32..=4, 1u32..=2, 0..=2),
    )
        .prop_map(|(x, jet)| Monomial::new(x, jet))
}

/// Random polynomial with up to `n` terms.
fn arb_poly_with(n: usize, laurent: bool) -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((arb_monomial(laurent), arb_rat()), 0..=n)
        .prop_map(DiffPoly::from_terms)
}

fn arb_poly() -> impl Strategy<Value = DiffPoly> {
    arb_poly_with(5, true)
}

/// Polynomial in `x` (no negative powers), for exactness-criterion tests.
fn arb_xpoly() -> impl Strategy<Value = DiffPoly> {
    arb_poly_with(5, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn addition_commutes(p in arb_poly(), q in arb_poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
    }

    #[test]
    fn multiplication_commutes(p in arb_poly(), q in arb_poly()) {
        prop_assert_eq!(&p * &q, &q * &p);
    }

    #[test]
    fn multiplication_associates(
        p in arb_poly_with(3, true),
        q in arb_poly_with(3, true),
        r in arb_poly_with(3, true),
    ) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
    }

    #[test]
    fn multiplication_distributes(
        p in arb_poly_with(3, true),
        q in arb_poly_with(3, true),
        r in arb_poly_with(3, true),
    ) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
    }

    #[test]
    fn subtraction_inverts_addition(p in arb_poly(), q in arb_poly()) {
        prop_assert_eq!(&(&p + &q) - &q, p);
    }

    #[test]
    fn total_derivative_is_linear(p in arb_poly(), q in arb_poly(), c in arb_rat()) {
        let lhs = total_derivative(&(&p + &q.scale(&c)));
        let rhs = &total_derivative(&p) + &total_derivative(&q).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn total_derivative_is_a_derivation(p in arb_poly_with(3, true), q in arb_poly_with(3, true)) {
        let lhs = total_derivative(&(&p * &q));
        let rhs = &(&total_derivative(&p) * &q) + &(&p * &total_derivative(&q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn variational_derivative_annihilates_derivatives(q in arb_poly()) {
        prop_assert!(variational_derivative(&total_derivative(&q)).is_zero());
    }

    #[test]
    fn antiderivative_inverts_derivative_up_to_constant(q in arb_poly()) {
        // The antiderivative is constant-free, so it recovers q minus its
        // constant term (constants are invisible to D).
        let p = total_derivative(&q);
        let got = antiderivative(&p).expect("derivative of a ring element is exact");
        let q_const = DiffPoly::constant(q.coefficient(&Monomial::one()));
        prop_assert_eq!(got, &q - &q_const);
    }

    #[test]
    fn exactness_matches_vanishing_variational_derivative(p in arb_xpoly()) {
        // For x-polynomial elements: E(p) = 0 exactly when p is a total
        // derivative. (Laurent elements break the forward direction only
        // through the single obstruction 1/x, tested separately.)
        let exact = antiderivative(&p).is_ok();
        let euler_zero = variational_derivative(&p).is_zero();
        prop_assert_eq!(exact, euler_zero);
        if let Ok(q) = antiderivative(&p) {
            prop_assert_eq!(total_derivative(&q), p);
        }
    }

    #[test]
    fn json_round_trip(p in arb_poly()) {
        let value = poly_to_json(&p);
        let back = poly_from_json(&value).expect("canonical form parses");
        prop_assert_eq!(back, p);
    }

    #[test]
    fn substitute_self_is_identity(p in arb_poly(), k in 0u32..=4) {
        prop_assert_eq!(p.substitute(k, &DiffPoly::v(k)), p);
    }

    #[test]
    fn exact_eval_is_additive(p in arb_poly(), q in arb_poly()) {
        let x = rat(3, 2);
        let jet: Vec<_> = (0..8).map(|i| rat(i - 3, 2)).collect();
        let lhs = (&p + &q).eval_rat(&x, &jet).unwrap();
        let rhs = p.eval_rat(&x, &jet).unwrap() + q.eval_rat(&x, &jet).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_eval_is_multiplicative(p in arb_poly_with(3, true), q in arb_poly_with(3, true)) {
        let x = rat(-5, 3);
        let jet: Vec<_> = (0..8).map(|i| rat(2 * i + 1, 3)).collect();
        let lhs = (&p * &q).eval_rat(&x, &jet).unwrap();
        let rhs = p.eval_rat(&x, &jet).unwrap() * q.eval_rat(&x, &jet).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
