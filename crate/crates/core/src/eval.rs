//! Retrieval metrics: precision/recall, sequence precision/recall, ROC.

use std::collections::BTreeSet;

use crate::item::ItemKey;
use crate::query::{abstract_query, search, QueryContext};
use crate::ratio::Ratio;
use crate::repository::MinedRepository;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("UndefinedMetric: {0} has an empty denominator")]
    UndefinedMetric(&'static str),
    #[error("DegenerateLabels: ROC needs at least one positive and one negative")]
    DegenerateLabels,
    #[error("MalformedGold at line {line}: {message}")]
    MalformedGold { line: usize, message: String },
}

/// Precision and recall of `retrieved` against `relevant`; repeated
/// retrieved entries count once.
pub fn precision_recall<T: Ord>(retrieved: &[T], relevant: &BTreeSet<T>) -> Result<(Ratio, Ratio), EvalError> {
    let distinct: BTreeSet<&T> = retrieved.iter().collect();
    if distinct.is_empty() {
        return Err(EvalError::UndefinedMetric("precision"));
    }
    if relevant.is_empty() {
        return Err(EvalError::UndefinedMetric("recall"));
    }
    let hits = distinct.iter().filter(|r| relevant.contains(**r)).count() as u64;
    Ok((
        Ratio::new(hits, distinct.len() as u64),
        Ratio::new(hits, relevant.len() as u64),
    ))
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Order-respecting precision and recall: the relevant part of a
/// recommendation is its longest common subsequence with the gold one.
pub fn sequence_pr<T: PartialEq>(recommended: &[T], gold: &[T]) -> Result<(Ratio, Ratio), EvalError> {
    if recommended.is_empty() {
        return Err(EvalError::UndefinedMetric("sequence precision"));
    }
    if gold.is_empty() {
        return Err(EvalError::UndefinedMetric("sequence recall"));
    }
    let common = lcs_len(recommended, gold) as u64;
    Ok((
        Ratio::new(common, recommended.len() as u64),
        Ratio::new(common, gold.len() as u64),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RocPoint {
    pub fpr: Ratio,
    pub tpr: Ratio,
}

/// One point per threshold (score ≥ threshold predicts positive) plus the
/// (0,0) and (1,1) endpoints, sorted by FPR then TPR, duplicates removed.
pub fn roc_points(scored: &[(f64, bool)], thresholds: &[f64]) -> Result<Vec<RocPoint>, EvalError> {
    let pos = scored.iter().filter(|(_, l)| *l).count() as u64;
    let neg = scored.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::DegenerateLabels);
    }
    let mut points = vec![
        RocPoint {
            fpr: Ratio::new(0, neg),
            tpr: Ratio::new(0, pos),
        },
        RocPoint {
            fpr: Ratio::new(neg, neg),
            tpr: Ratio::new(pos, pos),
        },
    ];
    for &t in thresholds {
        let tp = scored.iter().filter(|(s, l)| *l && *s >= t).count() as u64;
        let fp = scored.iter().filter(|(s, l)| !*l && *s >= t).count() as u64;
        points.push(RocPoint {
            fpr: Ratio::new(fp, neg),
            tpr: Ratio::new(tp, pos),
        });
    }
    points.sort_by(|a, b| a.fpr.value_cmp(&b.fpr).then(a.tpr.value_cmp(&b.tpr)));
    points.dedup_by(|a, b| a.fpr.value_eq(&b.fpr) && a.tpr.value_eq(&b.tpr));
    Ok(points)
}

/// Trapezoid-rule area under FPR-sorted points.
pub fn auc(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr.to_f64() - w[0].fpr.to_f64()) * (w[0].tpr.to_f64() + w[1].tpr.to_f64()) / 2.0)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopNRow {
    pub n: usize,
    pub precision: f64,
    pub recall: f64,
    /// Queries with a defined value at this N.
    pub queries: usize,
}

/// Mean per-query precision and recall over each ranked list cut at `n`.
/// Queries whose cut list is empty are left out of the precision mean.
pub fn average_at_n<T: Ord>(runs: &[(Vec<T>, BTreeSet<T>)], ns: &[usize]) -> Vec<TopNRow> {
    ns.iter()
        .map(|&n| {
            let (mut p, mut r, mut count) = (0.0, 0.0, 0);
            for (ranked, relevant) in runs {
                let cut = &ranked[..n.min(ranked.len())];
                if let Ok((pp, rr)) = precision_recall(cut, relevant) {
                    p += pp.to_f64();
                    r += rr.to_f64();
                    count += 1;
                }
            }
            let mean = |x: f64| if count == 0 { 0.0 } else { x / count as f64 };
            TopNRow {
                n,
                precision: mean(p),
                recall: mean(r),
                queries: count,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEntry {
    pub statement: String,
    pub expected: Vec<ItemKey>,
}

/// `statement<TAB>KIND:name<TAB>KIND:name...` per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_gold(text: &str) -> Result<Vec<GoldEntry>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let statement = fields.next().unwrap_or_default().trim().to_string();
        let expected = fields
            .filter(|f| !f.trim().is_empty())
            .map(|f| f.trim().parse::<ItemKey>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| EvalError::MalformedGold {
                line: i + 1,
                message: e.to_string(),
            })?;
        if statement.is_empty() || expected.is_empty() {
            return Err(EvalError::MalformedGold {
                line: i + 1,
                message: "need a statement and at least one expected item".into(),
            });
        }
        out.push(GoldEntry { statement, expected });
    }
    Ok(out)
}

/// A recommendation is judged relevant when at least half of it appears,
/// in order, in the gold sequence.
pub fn is_relevant(recommended: &[ItemKey], gold: &[ItemKey]) -> bool {
    sequence_pr(recommended, gold).is_ok_and(|(p, _)| p.value_cmp(&Ratio::new(1, 2)).is_ge())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEvaluation {
    pub statement: String,
    /// None when the statement could not be abstracted.
    pub abstracted: Option<ItemKey>,
    /// (ranking, relevant, sequence precision, sequence recall) per
    /// recommendation, best first.
    pub ranked: Vec<(Ratio, bool, Ratio, Ratio)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub queries: Vec<QueryEvaluation>,
    pub top_n: Vec<TopNRow>,
    /// Empty when every judged recommendation had the same label.
    pub roc: Vec<RocPoint>,
    pub auc: Option<f64>,
}

/// Runs every gold query against `repo` and scores the top `max(ns)`
/// recommendations. Per query, the relevant set is the retrieved relevant
/// recommendations plus one stand-in for the gold sequence itself when
/// none was retrieved, so recall at N is 1 once any relevant one appears.
pub fn evaluate(gold: &[GoldEntry], repo: &MinedRepository, ns: &[usize]) -> EvalReport {
    let depth = ns.iter().copied().max().unwrap_or(0);
    let mut queries = Vec::new();
    let mut runs = Vec::new();
    let mut scored = Vec::new();
    for g in gold {
        let q = abstract_query(&g.statement, &QueryContext::default()).ok();
        let recs = q.as_ref().map(|q| search(q, repo, depth)).unwrap_or_default();
        let ranked: Vec<(Ratio, bool, Ratio, Ratio)> = recs
            .iter()
            .map(|r| {
                let (p, rc) = sequence_pr(&r.pattern.elements, &g.expected).expect("patterns and gold are non-empty");
                (r.score, is_relevant(&r.pattern.elements, &g.expected), p, rc)
            })
            .collect();
        let ids: Vec<usize> = (0..ranked.len()).collect();
        let mut relevant: BTreeSet<usize> = ids.iter().copied().filter(|&i| ranked[i].1).collect();
        if relevant.is_empty() {
            relevant.insert(usize::MAX);
        }
        runs.push((ids, relevant));
        scored.extend(ranked.iter().map(|(s, rel, _, _)| (s.to_f64(), *rel)));
        queries.push(QueryEvaluation {
            statement: g.statement.clone(),
            abstracted: q.map(|q| q.item),
            ranked,
        });
    }
    let mut thresholds: Vec<f64> = scored.iter().map(|(s, _)| *s).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let roc = roc_points(&scored, &thresholds).unwrap_or_default();
    let auc = (!roc.is_empty()).then(|| auc(&roc));
    EvalReport {
        queries,
        top_n: average_at_n(&runs, ns),
        roc,
        auc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: impl IntoIterator<Item = u32>) -> BTreeSet<u32> {
        xs.into_iter().collect()
    }

    #[test]
    fn worked_precision_recall() {
        let retrieved: Vec<u32> = (0..7).collect();
        let relevant = set([0, 1, 2, 3, 10, 11, 12, 13, 14]);
        let (p, r) = precision_recall(&retrieved, &relevant).unwrap();
        assert_eq!((p, r), (Ratio::new(4, 7), Ratio::new(4, 9)));
        let retrieved: Vec<u32> = (0..30).collect();
        let relevant = set((0..20).chain(100..140));
        assert_eq!(
            precision_recall(&retrieved, &relevant).unwrap(),
            (Ratio::new(20, 30), Ratio::new(20, 60))
        );
        let same = set([1, 2]);
        let (p, r) = precision_recall(&[1, 2], &same).unwrap();
        assert!(p.value_eq(&Ratio::new(1, 1)) && r.value_eq(&Ratio::new(1, 1)));
        assert_eq!(
            precision_recall::<u32>(&[], &same),
            Err(EvalError::UndefinedMetric("precision"))
        );
        assert_eq!(precision_recall(&[1], &set([])), Err(EvalError::UndefinedMetric("recall")));
    }

    #[test]
    fn worked_sequence_pr() {
        let gold = ["a", "b", "c", "d"];
        let rec = ["a", "x", "b", "c", "d"];
        assert_eq!(sequence_pr(&rec, &gold).unwrap(), (Ratio::new(4, 5), Ratio::new(4, 4)));
        assert_eq!(sequence_pr(&["c", "b", "a"], &["a", "b", "c"]).unwrap(), (Ratio::new(1, 3), Ratio::new(1, 3)));
        assert!(sequence_pr::<&str>(&[], &gold).is_err());
    }

    #[test]
    fn roc_examples() {
        let scored = [(0.9, true), (0.4, true), (0.6, false), (0.1, false)];
        let pts = roc_points(&scored, &[0.5]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts[1].tpr.value_eq(&Ratio::new(1, 2)) && pts[1].fpr.value_eq(&Ratio::new(1, 2)));
        let ends = roc_points(&scored, &[0.0, 1.0]).unwrap();
        assert_eq!(ends.len(), 2);
        let perfect = [(0.9, true), (0.8, true), (0.2, false)];
        let pts = roc_points(&perfect, &[0.5]).unwrap();
        assert!(pts.iter().any(|p| p.fpr.num == 0 && p.tpr.value_eq(&Ratio::new(1, 1))));
        assert!((auc(&pts) - 1.0).abs() < 1e-12);
        assert_eq!(roc_points(&[(0.5, true)], &[0.5]), Err(EvalError::DegenerateLabels));
    }

    #[test]
    fn gold_parsing() {
        let g = parse_gold("# c\n\nfoo();\tMI:foo()\tMI:bar()\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].expected[1].name, "bar()");
        assert!(matches!(parse_gold("x;\tNOPE:y"), Err(EvalError::MalformedGold { line: 1, .. })));
        assert!(parse_gold("x;").is_err());
    }

    #[test]
    fn top_n_means() {
        let runs = vec![(vec![1, 2, 3], set([1, 3])), (vec![4], set([9]))];
        let rows = average_at_n(&runs, &[1, 3]);
        assert!((rows[0].precision - 0.5).abs() < 1e-12);
        assert!((rows[1].recall - 0.5).abs() < 1e-12);
    }
}
