use std::path::PathBuf;

use esdp_core::corpus::extract_corpus;
use esdp_core::query::{abstract_query, render_skeleton, search, skeleton_round_trip, QueryContext, UserQuery};
use esdp_core::{build_sequence_db, mine_prefixspan, MinedRepository};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/astparser")
}

fn mined() -> MinedRepository {
    let corpus = extract_corpus(&[fixture()], "java").unwrap();
    assert!(corpus.failures.is_empty());
    let db = build_sequence_db(&corpus.items(), "astparser");
    assert_eq!(db.len(), 12);
    let patterns = mine_prefixspan(&db, 2).unwrap();
    MinedRepository::new("astparser", "2024-01-01T00:00:00Z", 2, patterns)
}

#[test]
fn top_pattern_is_the_planted_chain() {
    let repo = mined();
    let top = &repo.patterns[0];
    let names: Vec<_> = top.elements.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "ASTParser.newParser(int)",
            "aSTParser.setKind(int)",
            "aSTParser.setSource(ICompilationUnit)",
            "aSTParser.setResolveBindings(boolean)",
            "aSTParser.createAST(null)",
        ]
    );
    assert_eq!(top.support.display2(), "0.58");
    assert_eq!(top.confidence.display2(), "1.00");
    assert_eq!(top.ranking().display2(), "2.92");
    assert!((top.ranking().to_f64() - 35.0 / 12.0).abs() < 1e-9);
}

#[test]
fn query_walkthrough() {
    let repo = mined();
    let ctx = QueryContext::default().with_var("parser", "ASTParser");
    let q = abstract_query("parser = ASTParser.newParser(AST.JLS3);", &ctx).unwrap();
    let recs = search(&q, &repo, 5);
    assert_eq!(recs[0].pattern, repo.patterns[0]);
    let s = render_skeleton(&recs[0], &q);
    assert!(s.to_text().contains("parser.setResolveBindings(true);"));
    assert_eq!(skeleton_round_trip(&s).unwrap(), recs[0].pattern.elements[1..]);
}

#[test]
fn every_mined_pattern_round_trips_through_its_skeleton() {
    let repo = mined();
    assert!(repo.patterns.len() > 10);
    for p in &repo.patterns {
        let q = UserQuery {
            raw_statement: String::new(),
            item: p.elements[0].clone(),
            context: QueryContext::default(),
        };
        let recs = search(&q, &MinedRepository::new("x", "2024-01-01T00:00:00Z", 1, vec![p.clone()]), 1);
        let s = render_skeleton(&recs[0], &q);
        assert_eq!(skeleton_round_trip(&s).unwrap(), p.elements[1..], "{}", s.to_text());
    }
}
