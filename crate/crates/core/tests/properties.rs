mod common;

use common::{random_cnf, random_ltd, random_td, rng};
use gapcnf::combinators::{gapp_impl_two_call, restricted_eval, CircuitClass, Instr, RecoveryProgram};
use gapcnf::counting::{count_bruteforce, count_dp_auto, count_sparse_dp, count_treewidth_dp, Count};
use gapcnf::reduction::{normalize_3cnf, reduce_impl, reduce_monotone};
use gapcnf::verification::{classify_rogue, for_each_model, symmetric_rogue, Model};
use gapcnf::{CnfFormula, TreeDecomposition};
use num_bigint::BigInt;
use proptest::prelude::*;

fn diff(psi1: &CnfFormula, psi2: &CnfFormula) -> Count {
    count_dp_auto(psi1).unwrap() - count_dp_auto(psi2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_matches_brute_force_on_any_decomposition(seed: u64, n in 0usize..9, m in 0usize..14) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 3);
        let td = random_td(&mut r, &f);
        let truth = count_bruteforce(&f).unwrap();
        prop_assert_eq!(count_treewidth_dp(&f, &td).unwrap(), truth.clone());
        prop_assert_eq!(count_sparse_dp(&f, &td).unwrap(), truth);
    }

    #[test]
    fn implication_difference_is_the_count(seed: u64, n in 0usize..6, m in 0usize..7) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 3);
        let pair = reduce_impl(&f, &random_ltd(&mut r, &f, false)).unwrap();
        prop_assert_eq!(diff(&pair.psi1, &pair.psi2), count_bruteforce(&f).unwrap());
    }

    #[test]
    fn monotone_difference_is_the_count(seed: u64, n in 0usize..4, m in 0usize..4) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 3);
        let pair = reduce_monotone(&f, &random_ltd(&mut r, &f, true)).unwrap();
        prop_assert_eq!(diff(&pair.psi1, &pair.psi2), count_bruteforce(&f).unwrap());
    }

    #[test]
    fn normalization_keeps_the_count(seed: u64, n in 0usize..8, m in 0usize..10) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 5);
        let (g, ltd) = normalize_3cnf(&f, &random_ltd(&mut r, &f, false)).unwrap();
        prop_assert!(ltd.check(&g).is_ok());
        prop_assert_eq!(count_dp_auto(&g).unwrap(), count_bruteforce(&f).unwrap());
    }

    #[test]
    fn rogue_partner_is_an_involution(seed: u64, n in 1usize..3, m in 1usize..3) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 2);
        let pair = reduce_impl(&f, &random_ltd(&mut r, &f, false)).unwrap();
        let mut checked = 0;
        for_each_model(&pair.psi1, 1 << 16, |a| {
            let model = Model::new(a.to_vec());
            if classify_rogue(&model, &pair).unwrap().is_rogue && checked < 32 {
                checked += 1;
                let partner = symmetric_rogue(&model, &pair).unwrap();
                assert!(pair.psi2.eval(&partner.assignment));
                assert_eq!(symmetric_rogue(&partner, &pair).unwrap(), model);
            }
            true
        });
    }

    #[test]
    fn mask_shift_subtract_round_trips(a in 0u64..1 << 20, b in 0u64..1 << 20) {
        let program = RecoveryProgram {
            class: CircuitClass::AC0,
            instrs: vec![Instr::Mask { m: 20 }, Instr::Shr { m: 20 }, Instr::Sub],
        };
        let packed = (BigInt::from(a) << 20u32) + BigInt::from(b);
        let out = restricted_eval(&program, &packed).unwrap();
        prop_assert_eq!(out.first, BigInt::from(a));
        prop_assert_eq!(out.second, BigInt::from(b));
        prop_assert_eq!(out.difference, Some(BigInt::from(a) - BigInt::from(b)));
    }

    #[test]
    fn two_call_gap_is_the_count_difference(seed: u64, n1 in 1usize..4, n2 in 1usize..4) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n1, 3, 3);
        let g = random_cnf(&mut r, n2, 3, 3);
        let (a, b) = gapp_impl_two_call(&f, &g).unwrap();
        prop_assert_eq!(diff(&a, &b), count_bruteforce(&f).unwrap() - count_bruteforce(&g).unwrap());
    }

    #[test]
    fn dimacs_and_pace_round_trip(seed: u64, n in 0usize..10, m in 0usize..12) {
        let mut r = rng(seed);
        let f = random_cnf(&mut r, n, m, 4);
        prop_assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f.clone());
        let g = f.primal_graph();
        let td = random_td(&mut r, &f);
        let back = TreeDecomposition::parse_pace(&td.to_pace(g.num_vertices()), &g).unwrap();
        prop_assert_eq!(back.width(), td.width());
        prop_assert!(back.validate(&g).is_ok());
    }
}
