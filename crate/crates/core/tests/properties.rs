mod common;

use std::collections::BTreeSet;

use common::*;
use esdp_core::eval::{precision_recall, roc_points};
use esdp_core::groum::{exas_vector, label_isomorphic, patt_explorer};
use esdp_core::repository::{parse, serialize};
use esdp_core::sequential::is_subsequence;
use esdp_core::{
    build_sequence_db, build_transactions, extract_items, mine_prefixspan, support, Granularity, RepositoryError,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefixspan_matches_enumeration(seed in any::<u64>(), min in 1u64..4) {
        let db = random_db(&mut rng(seed), 8, 6, 5);
        let mined = mine_prefixspan(&db, min).unwrap();
        prop_assert_eq!(as_count_map(&mined), brute_force_mine(&db, min));
    }

    #[test]
    fn support_is_anti_monotone_and_closed_downward(seed in any::<u64>()) {
        let db = random_db(&mut rng(seed), 8, 6, 4);
        let mined = mine_prefixspan(&db, 2).unwrap();
        let map = as_count_map(&mined);
        for p in &mined {
            prop_assert_eq!(support(&p.elements, &db), p.support.num);
            for drop in 0..p.k() {
                let mut sub = p.elements.clone();
                sub.remove(drop);
                if sub.is_empty() {
                    continue;
                }
                prop_assert!(is_subsequence(&sub, &p.elements));
                let s = map.get(&sub).copied();
                prop_assert!(s.is_some_and(|s| s >= p.support.num), "missing or smaller {:?}", sub);
            }
        }
    }

    #[test]
    fn repository_round_trips(seed in any::<u64>()) {
        let repo = random_repo(&mut rng(seed), 0);
        let xml = serialize(&repo);
        let back = parse(&xml).unwrap();
        prop_assert_eq!(&back, &repo);
        prop_assert_eq!(serialize(&back), xml);
    }

    #[test]
    fn mutated_repositories_are_rejected(seed in any::<u64>(), op in 0..MUTATIONS) {
        let xml = serialize(&random_repo(&mut rng(seed), 2));
        if let Some(bad) = mutate(&xml, op) {
            let is_violation = matches!(parse(&bad), Err(RepositoryError::SchemaViolation { .. }));
            prop_assert!(is_violation, "accepted mutation {}:\n{}", op, bad);
        }
    }

    #[test]
    fn vectors_are_necessary_for_isomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_groum(&mut r, 6, 3);
        let h = shuffled(&g, &mut r);
        prop_assert!(label_isomorphic(&g, &h));
        prop_assert_eq!(exas_vector(&g), exas_vector(&h));
        let other = random_groum(&mut r, 6, 3);
        prop_assert_eq!(label_isomorphic(&g, &other), brute_isomorphic(&g, &other));
        if label_isomorphic(&g, &other) {
            prop_assert_eq!(exas_vector(&g), exas_vector(&other));
        }
    }

    #[test]
    fn explorer_matches_enumeration(seed in any::<u64>(), sigma in 1u64..4) {
        let mut r = rng(seed);
        let n = rand::Rng::gen_range(&mut r, 1..=4);
        let data: Vec<_> = (0..n).map(|_| random_groum(&mut r, 5, 3)).collect();
        let found: Vec<_> = patt_explorer(&data, sigma, None)
            .unwrap()
            .into_iter()
            .map(|p| {
                for o in &p.occurrences {
                    assert!(label_isomorphic(&data[o.graph].induced(&o.nodes), &p.representative));
                }
                (p.representative, p.frequency)
            })
            .collect();
        let oracle = brute_force_groum_patterns(&data, sigma as usize);
        prop_assert!(same_pattern_sets(&found, &oracle));
    }

    #[test]
    fn recall_never_drops_along_a_ranking(
        ranking in proptest::collection::vec(0u32..40, 1..30),
        relevant in proptest::collection::btree_set(0u32..40, 1..20),
    ) {
        let mut last = None;
        for n in 1..=ranking.len() {
            let (_, r) = precision_recall(&ranking[..n], &relevant).unwrap();
            if let Some(prev) = last {
                prop_assert!(r.value_cmp(&prev).is_ge());
            }
            last = Some(r);
        }
    }

    #[test]
    fn roc_tpr_rises_with_fpr(
        scored in proptest::collection::vec((0.0f64..1.0, any::<bool>()), 2..30),
        thresholds in proptest::collection::vec(-0.5f64..1.5, 0..10),
    ) {
        prop_assume!(scored.iter().any(|s| s.1) && scored.iter().any(|s| !s.1));
        let pts = roc_points(&scored, &thresholds).unwrap();
        prop_assert!(pts[0].fpr.num == 0 && pts[0].tpr.num == 0);
        let last = pts.last().unwrap();
        prop_assert!(last.fpr.num == last.fpr.den && last.tpr.num == last.tpr.den);
        for w in pts.windows(2) {
            prop_assert!(w[0].tpr.value_cmp(&w[1].tpr).is_le());
            prop_assert!(w[0].fpr.value_cmp(&w[1].fpr).is_le());
        }
    }

    #[test]
    fn renaming_variables_keeps_items(names in proptest::collection::btree_set("[a-z][a-z0-9]{0,6}", 4)) {
        let names: Vec<String> = names.into_iter().collect();
        prop_assume!(names.iter().all(|n| !esdp_core::extractor::lexer::is_keyword(n) && n != "unknown"));
        let src = |v: &[&str]| {
            format!(
                "class C {{ void m(java.io.File {0}) {{ Reader {1} = new Reader({0}); String {2} = {1}.readLine(); \
                 while ({2} != null) {{ {2}.trim(); {2} = {1}.readLine(); }} int[] {3} = new int[2]; {3}[0] = 1; {1}.close(); }} }}",
                v[0], v[1], v[2], v[3]
            )
        };
        let base = extract_items(&src(&["f", "r", "line", "xs"]), "C.java").unwrap();
        let renamed = extract_items(&src(&names.iter().map(String::as_str).collect::<Vec<_>>()), "C.java").unwrap();
        let keys = |e: &esdp_core::Extraction| e.items.iter().map(|i| i.key()).collect::<Vec<_>>();
        prop_assert_eq!(keys(&base), keys(&renamed));
    }

    #[test]
    fn method_transactions_are_sequence_sets(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let calls = ["a.run();", "b.stop(1);", "new File(\"x\");", "return;", "int v = 0;", "c.f = 2;"];
        let mut src = String::from("class C {\n");
        for m in 0..r.gen_range(1..5) {
            src.push_str(&format!("void m{m}(A a, B b, C c) {{\n"));
            for _ in 0..r.gen_range(0..6) {
                src.push_str(calls[r.gen_range(0..calls.len())]);
                src.push('\n');
            }
            src.push_str("}\n");
        }
        src.push_str("}\n");
        let items = extract_items(&src, "C.java").unwrap().items;
        let tx = build_transactions(&items, Granularity::Method);
        let db = build_sequence_db(&items, "c");
        prop_assert_eq!(tx.len(), db.len());
        for (t, s) in tx.iter().zip(&db.records) {
            prop_assert_eq!(&t.block_id, &s.sid);
            prop_assert_eq!(&t.items, &s.items.iter().cloned().collect::<BTreeSet<_>>());
        }
    }
}
