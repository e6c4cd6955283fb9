mod common;

use common::*;
use discone_core::disjunctive::tangent_union;
use discone_core::exactla::Rat;
use discone_core::frontends::{encode, ProblemClass};
use discone_core::oracle::{
    grid_local_min, isolatedness_check, quadratic_growth_check, tangent_realization_check, Evidence, GridSpec,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn grid_counterexamples_recheck_exactly(seed in any::<u64>(), which in 0usize..5) {
        let mut r = rng(seed);
        let (cp, x) = random_class_instance(&mut r, ProblemClass::ALL[which]);
        let p = encode(&cp).unwrap();
        let spec = GridSpec::new(x.clone(), Rat::new(1.into(), 2.into()), 5).unwrap();
        let verdicts = [
            grid_local_min(&p, &x, &spec).unwrap(),
            quadratic_growth_check(&p, &x, &Rat::new(1.into(), 4.into()), &spec).unwrap(),
            isolatedness_check(&p, &x, &spec).unwrap(),
        ];
        for v in verdicts {
            prop_assert_eq!(v.passed, v.counterexample.is_none());
            prop_assert!(v.recheck(&p, &x).unwrap());
            prop_assert!(v.samples_examined <= spec.total());
        }
    }

    #[test]
    fn tangent_directions_are_realized_by_short_steps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let z = rand_half_point(&mut r, dim);
        let d = random_union_through(&mut r, &z, 3);
        let w = rand_int_vec(&mut r, dim, 2);
        let v = tangent_realization_check(&d, &z, &w, 12).unwrap();
        prop_assert!(v.recheck_in(&d, &z, &w).unwrap());
        let tangent = tangent_union(&d, &z).unwrap().contains(&w);
        match v.counterexample.as_ref().map(|c| &c.evidence) {
            Some(Evidence::NotTangent) => prop_assert!(!tangent),
            // slacks are at least one and |a·w| ≤ 18, so the line is back inside D by t = 1/32
            Some(Evidence::StepInfeasible { t }) => prop_assert!(*t > Rat::new(1.into(), 64.into())),
            _ => prop_assert!(tangent && v.passed),
        }
    }
}
