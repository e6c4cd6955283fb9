mod common;

use common::*;
use discone_core::analysis::{check_licq, linearization_cone, solve_s_stationarity};
use discone_core::exactla::{dot, Rat, Subspace};
use discone_core::expr::parse;
use discone_core::frontends::{
    binomial, branch_count, encode, index_sets, specialized_licq, specialized_s_stationarity, ClassIndexSets,
    ClassProblem, IndexSets, ProblemClass, SpecializedStationarity,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn sorted(mut v: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    v.sort();
    v
}

fn span(dim: usize, v: &[Vec<Rat>]) -> Subspace {
    Subspace::span(dim, v).unwrap()
}

/// The class linearization cone written out from the index sets.
fn displayed_cone(cp: &ClassProblem, sets: &IndexSets, jac: &[Vec<Rat>], d: &[Rat]) -> bool {
    let (p, q) = (cp.g().len(), cp.h().len());
    let row = |k: usize| dot(&jac[k], d);
    let gd = |j: usize| row(p + q + 2 * j);
    let hd = |j: usize| row(p + q + 2 * j + 1);
    if sets.active_g.iter().any(|&j| row(j).is_positive()) || (p..p + q).any(|k| !row(k).is_zero()) {
        return false;
    }
    match &sets.sets {
        ClassIndexSets::Nlp => true,
        ClassIndexSets::Mpcc {
            plus_zero,
            zero_plus,
            zero_zero,
        } => {
            zero_plus.iter().all(|&j| gd(j).is_zero())
                && plus_zero.iter().all(|&j| hd(j).is_zero())
                && zero_zero.iter().all(|&j| {
                    let (a, b) = (gd(j), hd(j));
                    !a.is_negative() && !b.is_negative() && (a * b).is_zero()
                })
        }
        ClassIndexSets::Mpvc {
            plus_zero,
            zero_plus,
            zero_minus,
            zero_zero,
            ..
        } => {
            zero_plus.iter().all(|&j| hd(j).is_zero())
                && zero_minus.iter().all(|&j| !hd(j).is_negative())
                && plus_zero.iter().all(|&j| !gd(j).is_positive())
                && zero_zero.iter().all(|&j| {
                    let (a, b) = (gd(j), hd(j));
                    !b.is_negative() && !(a * b).is_positive()
                })
        }
        ClassIndexSets::Ccmp { nonzero, zero } => {
            let moved = zero.iter().filter(|&&i| !d[i].is_zero()).count();
            moved + nonzero.len() <= cp.kappa().unwrap()
        }
        ClassIndexSets::Mpsc { g_only, h_only, both } => {
            g_only.iter().all(|&j| gd(j).is_zero())
                && h_only.iter().all(|&j| hd(j).is_zero())
                && both.iter().all(|&j| (gd(j) * hd(j)).is_zero())
        }
    }
}

fn directions(n: usize) -> Vec<Vec<Rat>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<Rat>| {
                (-2i64..=2).map(move |c| {
                    let mut w = v.clone();
                    w.push(Rat::from_integer(c.into()));
                    w
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn licq_and_stationarity_agree(seed in any::<u64>(), which in 0usize..5) {
        let mut r = rng(seed);
        let class = ProblemClass::ALL[which];
        let (cp, x) = random_class_instance(&mut r, class);
        let p = encode(&cp).unwrap();
        prop_assert_eq!(check_licq(&p, &x).unwrap().holds, specialized_licq(&cp, &x).unwrap().holds);

        let generic = solve_s_stationarity(&p, &x).unwrap();
        match specialized_s_stationarity(&cp, &x).unwrap() {
            SpecializedStationarity::NotStationary => prop_assert!(!generic.solvable),
            SpecializedStationarity::Stationary { multipliers, unique, vertices, rays, lines } => {
                prop_assert!(generic.solvable);
                prop_assert_eq!(generic.unique, unique);
                let ms = generic.multipliers.unwrap();
                prop_assert_eq!(sorted(ms.vertices), sorted(vertices));
                prop_assert_eq!(sorted(ms.rays), sorted(rays));
                prop_assert!(span(p.m(), &ms.lines).same_as(&span(p.m(), &lines)));
                if unique {
                    prop_assert_eq!(ms.particular, multipliers);
                }
            }
        }
    }

    #[test]
    fn linearization_cone_matches_the_class_display(seed in any::<u64>(), which in 0usize..5) {
        let mut r = rng(seed);
        let (cp, x) = random_class_instance(&mut r, ProblemClass::ALL[which]);
        let p = encode(&cp).unwrap();
        let sets = index_sets(&cp, &x).unwrap();
        let jac = p.bundle(&x).unwrap().map_jac.row_vecs();
        let lin = linearization_cone(&p, &x).unwrap();
        for d in directions(cp.n()) {
            prop_assert_eq!(lin.contains(&d), displayed_cone(&cp, &sets, &jac, &d), "d = {:?}", d);
        }
    }
}

#[test]
fn ccmp_branch_counts_are_binomial() {
    for n in 2..=6 {
        for kappa in 1..n {
            let cp = ClassProblem::new(
                ProblemClass::Ccmp,
                n,
                parse("0", n).unwrap(),
                vec![],
                vec![],
                vec![],
                vec![],
                Some(kappa),
            )
            .unwrap();
            let encoded = encode(&cp).unwrap();
            assert_eq!(encoded.set().branches().len(), binomial(n, kappa));
            assert_eq!(branch_count(&cp), binomial(n, kappa));
        }
    }
}

#[test]
fn mpsc_linearization_is_the_cross() {
    let cp = ClassProblem::new(
        ProblemClass::Mpsc,
        2,
        parse("0", 2).unwrap(),
        vec![],
        vec![],
        vec![parse("x1", 2).unwrap()],
        vec![parse("x2", 2).unwrap()],
        None,
    )
    .unwrap();
    let lin = linearization_cone(&encode(&cp).unwrap(), &[Rat::zero(), Rat::zero()]).unwrap();
    for d in directions(2) {
        assert_eq!(lin.contains(&d), (&d[0] * &d[1]).is_zero());
    }
}
