//! Property tests for the symmetry builders: agreement of the two
//! independent construction routes, exactness of the verification path,
//! the κ-footprint, and tamper detection — all over generically sampled
//! family constants.

use lenard_core::hierarchy::ConstraintSpec;
use lenard_core::operator::DiffOperator;
use lenard_core::ring::rat;
use lenard_core::symmetry::{
    build_first_order, build_q_eps_elimination, build_q_recurrence, dilation_symmetry,
    kappa_commutator, l_equivalent, verify_commutator, SymmetryOperator,
};
use lenard_core::{DiffPoly, Rat};
use proptest::prelude::*;

fn arb_const() -> impl Strategy<Value = Rat> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn arb_nonzero_const() -> impl Strategy<Value = Rat> {
    (prop_oneof![-40i64..=-1, 1i64..=40], 1i64..12).prop_map(|(n, d)| rat(n, d))
}

/// A hierarchy level together with a matching family-constant vector.
fn arb_family() -> impl Strategy<Value = (u32, Vec<Rat>)> {
    (1u32..3).prop_flat_map(|level| {
        (
            Just(level),
            prop::collection::vec(arb_const(), level as usize),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commuting_builders_agree_and_both_verify((level, c) in arb_family()) {
        let spec = ConstraintSpec::commuting(level, c).unwrap();
        let eps = build_q_eps_elimination(&build_first_order(&spec).unwrap(), &spec).unwrap();
        let rec = build_q_recurrence(&spec).unwrap();
        prop_assert!(verify_commutator(&eps).is_zero());
        prop_assert!(verify_commutator(&rec).is_zero());
        prop_assert!(l_equivalent(eps.q(), rec.q()).is_some());
    }

    #[test]
    fn recurrence_verifies_for_any_kappa((level, c) in arb_family(), kf in arb_const()) {
        let spec = ConstraintSpec::new(level, kf.clone(), c).unwrap();
        let sym = build_q_recurrence(&spec).unwrap();
        prop_assert_eq!(sym.kappa(), &kappa_commutator(level, &kf));
        prop_assert!(verify_commutator(&sym).is_zero());
    }

    #[test]
    fn kappa_footprint_is_two_exact_terms((level, c) in arb_family(), kf in arb_nonzero_const()) {
        let with_kappa =
            build_q_recurrence(&ConstraintSpec::new(level, kf.clone(), c.clone()).unwrap())
                .unwrap();
        let without = build_q_recurrence(&ConstraintSpec::commuting(level, c).unwrap()).unwrap();
        let kc = kappa_commutator(level, &kf);
        let delta = with_kappa.q() - without.q();
        let expected = DiffOperator::from_coeffs([
            (1, DiffPoly::x().scale(&(rat(-1, 2) * &kc))),
            (0, DiffPoly::constant(kc / rat(4, 1))),
        ]);
        prop_assert_eq!(delta, expected);
    }

    #[test]
    fn h_polynomial_tails_are_invisible_to_verification(
        (level, c) in arb_family(),
        gamma in arb_nonzero_const(),
        bump in 0u32..3,
    ) {
        let spec = ConstraintSpec::commuting(level, c).unwrap();
        let sym = build_q_recurrence(&spec).unwrap();
        let h = DiffOperator::schrodinger(&DiffPoly::v(0));
        let extended = SymmetryOperator::from_parts(
            &sym.q().clone() + &h.pow(bump).scale(&gamma),
            sym.kappa().clone(),
            spec,
        );
        prop_assert!(verify_commutator(&extended).is_zero());
        let gammas = l_equivalent(extended.q(), sym.q()).expect("H-tail difference");
        prop_assert_eq!(&gammas[bump as usize], &gamma);
    }

    #[test]
    fn tampering_is_detected((level, c) in arb_family(), which in 0usize..4) {
        let spec = ConstraintSpec::commuting(level, c).unwrap();
        let sym = build_q_recurrence(&spec).unwrap();
        let tamper = match which {
            0 => DiffOperator::single(0, DiffPoly::v(0)),
            1 => DiffOperator::single(0, DiffPoly::x()),
            2 => DiffOperator::single(0, DiffPoly::v(1)),
            _ => DiffOperator::d(1),
        };
        let bad = SymmetryOperator::from_parts(
            &sym.q().clone() + &tamper,
            sym.kappa().clone(),
            spec,
        );
        prop_assert!(!verify_commutator(&bad).is_zero());
    }

    #[test]
    fn dilations_verify_for_all_parameters(kc in arb_nonzero_const(), c in arb_const()) {
        let sym = dilation_symmetry(&kc, &c).unwrap();
        prop_assert!(verify_commutator(&sym).is_zero());
    }
}
