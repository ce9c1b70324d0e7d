use posetdim::dimension::{
    all_linear_extensions, brute_force_dimension, critical_pairs, exact_dimension, is_realizer, CriticalPair,
};
use posetdim::format::{parse_poset, write_bipartite, write_poset};
use posetdim::generate::{random_bipartite, random_poset, random_skfree_bipartite};
use posetdim::skfree::coloring::{mates, ub_coloring, valid_colors};
use posetdim::skfree::matrix::{acquire_event_matrix, event_e_holds};
use posetdim::skfree::peel::{peel_realizer, step_limit, PeelConfig};
use posetdim::{Embedding, Poset};
use proptest::prelude::*;

fn poset(max_n: usize) -> impl Strategy<Value = Poset> {
    (0..=max_n, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, p, s)| random_poset(n, p, s).unwrap())
}

fn naive_contains_sk(p: &Poset, k: usize) -> bool {
    fn tuples(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n {
            if !prefix.contains(&x) {
                prefix.push(x);
                tuples(n, k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    tuples(p.len(), k, &mut Vec::new(), &mut all);
    all.iter().any(|a| {
        all.iter().any(|b| {
            Embedding {
                a_elems: a.clone(),
                b_elems: b.clone(),
            }
            .verify(p)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent(p in poset(12)) {
        prop_assert_eq!(Poset::from_relations(p.len(), p.relations()).unwrap(), p.clone());
        prop_assert_eq!(Poset::from_relations(p.len(), p.covers()).unwrap(), p);
    }

    #[test]
    fn dual_is_an_involution(p in poset(10)) {
        prop_assert_eq!(p.dual().dual(), p.clone());
        let mut flipped: Vec<CriticalPair> =
            critical_pairs(&p).into_iter().map(|c| CriticalPair::new(c.y, c.x)).collect();
        flipped.sort_by_key(|c| (c.x, c.y));
        prop_assert_eq!(critical_pairs(&p.dual()), flipped);
    }

    #[test]
    fn split_shape(p in poset(8)) {
        let n = p.len();
        let q = p.kimble_split();
        prop_assert_eq!(q.len(), 2 * n);
        prop_assert!(q.height() <= 2);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(q.lt(x, n + y), p.le(x, y));
                prop_assert!(!q.lt(x, y) && !q.lt(n + x, n + y) && !q.lt(n + x, y));
            }
        }
    }

    #[test]
    fn detection_matches_naive_search(p in poset(6), k in 2usize..=3) {
        let found = p.find_standard_example(k);
        prop_assert_eq!(found.is_some(), naive_contains_sk(&p, k));
        if let Some(e) = found {
            prop_assert!(e.verify(&p));
        }
    }

    #[test]
    fn exact_matches_brute_force(p in poset(6)) {
        prop_assume!(!p.is_empty());
        let r = exact_dimension(&p, None).unwrap();
        prop_assert_eq!(r.dimension, brute_force_dimension(&p).unwrap());
        prop_assert_eq!(r.dimension, r.realizer.len());
        prop_assert!(is_realizer(&p, &r.realizer.extensions).unwrap().valid);
    }

    #[test]
    fn dimension_is_dual_invariant(p in poset(8)) {
        prop_assume!(!p.is_empty());
        prop_assert_eq!(
            exact_dimension(&p, None).unwrap().dimension,
            exact_dimension(&p.dual(), None).unwrap().dimension
        );
    }

    #[test]
    fn every_listed_extension_is_valid(p in poset(6)) {
        for (i, order) in all_linear_extensions(&p).into_iter().enumerate() {
            prop_assert!(posetdim::LinearExtension::new(order).check_against(&p, i).is_ok());
        }
    }

    #[test]
    fn format_round_trip(p in poset(12)) {
        prop_assert_eq!(parse_poset(&write_poset(&p)).unwrap().poset, p);
    }

    #[test]
    fn bipartite_format_round_trip(na in 0usize..6, nb in 0usize..6, pr in 0.0..=1.0f64, s in any::<u64>()) {
        let bp = random_bipartite(na, nb, pr, s).unwrap();
        let back = parse_poset(&write_bipartite(&bp)).unwrap();
        prop_assert_eq!(back.bipartition, Some(bp));
    }

    #[test]
    fn mates_are_disjoint_and_colors_sound(
        na in 3usize..8, nb in 1usize..8, pr in 0.0..=1.0f64, s in any::<u64>(), k in 2usize..=3
    ) {
        let bp = random_bipartite(na, nb, pr, s).unwrap();
        let subset: Vec<usize> = bp.a_order()[..k].to_vec();
        let all: Vec<Vec<usize>> = (0..k).map(|i| mates(&bp, &subset, i)).collect();
        for i in 0..k {
            for j in i + 1..k {
                prop_assert!(all[i].iter().all(|b| !all[j].contains(b)));
            }
        }
        let expected: Vec<usize> = (0..k).filter(|&i| all[i].is_empty()).map(|i| i + 1).collect();
        match valid_colors(&bp, &subset) {
            Ok(colors) => prop_assert_eq!(colors, expected),
            Err(posetdim::Error::NoValidColor { embedding }) => {
                prop_assert!(expected.is_empty());
                prop_assert!(embedding.verify(bp.poset()));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn acquired_matrices_have_event(t in 1usize..=3, q in 3usize..=7, r in 1usize..=12, s in any::<u64>()) {
        prop_assume!(t <= q);
        if let Ok(m) = acquire_event_matrix(t, q, r, s, 200) {
            prop_assert!(event_e_holds(&m, t).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn peeled_realizers_verify_and_respect_the_bound(
        na in 2usize..14, nb in 2usize..14, pr in 0.05..0.4f64, s in any::<u64>(), q in 2usize..=3
    ) {
        let Ok(bp) = random_skfree_bipartite(na, nb, pr, 3, s, 200) else { return Ok(()) };
        prop_assert!(ub_coloring(&bp, 3).is_ok());
        let cfg = PeelConfig { k: 3, q, base_threshold: 6, seed: s, budget: None };
        let cert = peel_realizer(&bp, &cfg).unwrap();
        prop_assert!(is_realizer(bp.poset(), &cert.realizer.extensions).unwrap().valid);
        prop_assert!(cert.total_size <= cert.base_dimension + cert.steps.len() * step_limit(3, q));
        prop_assert!(cert.sizes_consistent());
    }
}
