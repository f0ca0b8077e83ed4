mod common;

use grushin::rearrange::{
    double_bubble_functional, elementary_inequality_check, quantitative_gap_check, rearrange, steiner_symmetrize_vertical,
    trace, x_symmetrize, SlabSet,
};
use grushin::Alpha;
use proptest::prelude::*;

fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rearrangement_properties(seed in any::<u64>()) {
        let s = common::random_schwarz_set(&mut common::rng(seed));
        let r = rearrange(&s).unwrap();
        prop_assert_eq!(r.area(), s.area());
        prop_assert!(le(r.perimeter(), s.perimeter()));
        prop_assert!(le(r.perimeter_open(), s.perimeter_open()));
        prop_assert!(le(trace(&s), trace(&r)));
        prop_assert_eq!(rearrange(&r).unwrap(), r.clone());
        let gap = quantitative_gap_check(&s, &r);
        prop_assert!(gap.lhs >= gap.rhs * (1.0 - 1e-12), "{:?}", gap);
        for a in [0.0, 1.0, 2.0] {
            let alpha = Alpha::new(a).unwrap();
            prop_assert!(le(s.weighted_area(alpha), r.weighted_area(alpha)));
        }
    }

    #[test]
    fn equal_perimeter_only_for_interval_sections(seed in any::<u64>()) {
        let s = common::random_schwarz_set(&mut common::rng(seed));
        let r = rearrange(&s).unwrap();
        if s.noninterval_measure() > num_traits::Zero::zero() {
            prop_assert!(r.perimeter() < s.perimeter());
        } else {
            prop_assert_eq!(r, s);
        }
    }

    #[test]
    fn x_convex_sets_are_fixed(seed in any::<u64>()) {
        let s = common::random_x_convex_set(&mut common::rng(seed));
        let r = rearrange(&s).unwrap();
        prop_assert_eq!(&r, &s);
        let gap = quantitative_gap_check(&s, &r);
        prop_assert_eq!((gap.lhs, gap.rhs), (0.0, 0.0));
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>()) {
        let s = common::random_schwarz_set(&mut common::rng(seed));
        prop_assert_eq!(SlabSet::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn steiner_then_rearrange_chain(seed in any::<u64>()) {
        let s = common::random_schwarz_set(&mut common::rng(seed));
        let t = steiner_symmetrize_vertical(&s);
        prop_assert_eq!(t.area(), s.area());
        prop_assert!(le(t.perimeter(), s.perimeter()));
        prop_assert!(t.validate_schwarz().is_ok());
        let r = rearrange(&t).unwrap();
        prop_assert!(le(r.perimeter(), t.perimeter()));
        for a in [0.0, 1.0, 2.0] {
            let alpha = Alpha::new(a).unwrap();
            prop_assert!(le(t.weighted_area(alpha), r.weighted_area(alpha)));
        }
    }

    #[test]
    fn x_symmetrization_lowers_pair_functional(a in any::<u64>(), b in any::<u64>()) {
        let right = common::random_schwarz_set(&mut common::rng(a));
        let left = common::random_schwarz_set(&mut common::rng(b));
        let f = x_symmetrize(&right, &left);
        prop_assert!(f == right || f == left);
        prop_assert!(le(double_bubble_functional(&f, &f), double_bubble_functional(&right, &left)));
    }

    #[test]
    fn elementary_inequalities(seed in any::<u64>()) {
        let a = common::random_vectors(&mut common::rng(seed));
        let c = elementary_inequality_check(&a).unwrap();
        prop_assert!(c.lhs >= c.rhs1 && c.rhs1 >= c.rhs2 && c.rhs2 >= 0.0, "{:?}", c);
    }
}
