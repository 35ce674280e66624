//! Frequent sequential pattern mining (PrefixSpan) and pattern scoring.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::item::ItemKey;
use crate::ratio::Ratio;
use crate::transaction::SequenceDatabase;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MineError {
    #[error("InvalidThreshold: {0} (must be at least 1)")]
    InvalidThreshold(u64),
}

/// A frequent sequence with its scores.
///
/// `support` is `count / |db|` and `confidence` is `count / prefix count`;
/// ranking is always derived as `k × support`, so it can never drift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialPattern {
    pub elements: Vec<ItemKey>,
    pub support: Ratio,
    pub confidence: Ratio,
}

impl SequentialPattern {
    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn support_count(&self) -> u64 {
        self.support.num
    }

    pub fn ranking(&self) -> Ratio {
        self.support.scale(self.k() as u64)
    }
}

/// Canonical pattern order: ranking desc, support desc, element names,
/// then element kinds.
pub fn pattern_order(a: &SequentialPattern, b: &SequentialPattern) -> Ordering {
    b.ranking()
        .value_cmp(&a.ranking())
        .then_with(|| b.support.value_cmp(&a.support))
        .then_with(|| {
            let an = a.elements.iter().map(|e| e.name.as_str());
            let bn = b.elements.iter().map(|e| e.name.as_str());
            an.cmp(bn)
        })
        .then_with(|| {
            let ak = a.elements.iter().map(|e| e.kind);
            let bk = b.elements.iter().map(|e| e.kind);
            ak.cmp(bk)
        })
}

pub fn sort_patterns(patterns: &mut [SequentialPattern]) {
    patterns.sort_by(pattern_order);
}

/// Whether `needle` occurs in `hay` as a (gapped) subsequence.
pub fn is_subsequence<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// Number of records containing `alpha` as a subsequence.
pub fn support(alpha: &[ItemKey], db: &SequenceDatabase) -> u64 {
    db.records
        .iter()
        .filter(|r| is_subsequence(alpha, &r.items))
        .count() as u64
}

/// Recomputes `(support, confidence, ranking)` of `p` against `db` by
/// direct counting.
pub fn score(p: &SequentialPattern, db: &SequenceDatabase) -> (Ratio, Ratio, Ratio) {
    let n = db.len().max(1) as u64;
    let count = support(&p.elements, db);
    let prefix = if p.k() <= 1 {
        count
    } else {
        support(&p.elements[..p.k() - 1], db)
    };
    let support = Ratio::new(count, n);
    let confidence = Ratio::new(count, prefix.max(1));
    (support, confidence, support.scale(p.k() as u64))
}

/// Interned view of a database: items become dense ids in sorted key order.
struct Interned {
    alphabet: Vec<ItemKey>,
    seqs: Vec<Vec<u32>>,
}

impl Interned {
    fn new(db: &SequenceDatabase) -> Self {
        let alphabet: Vec<ItemKey> = db
            .records
            .iter()
            .flat_map(|r| r.items.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let seqs = db
            .records
            .iter()
            .map(|r| {
                r.items
                    .iter()
                    .map(|k| alphabet.binary_search(k).expect("interned") as u32)
                    .collect()
            })
            .collect();
        Interned { alphabet, seqs }
    }
}

struct Raw {
    elements: Vec<u32>,
    count: u64,
    prefix_count: u64,
}

/// Depth-first PrefixSpan over pseudo-projections `(sequence, start)`.
/// (item, support, projection) of one frequent extension.
type Extension = (u32, u64, Vec<(u32, u32)>);

struct Miner<'a> {
    seqs: &'a [Vec<u32>],
    alphabet_len: usize,
    min_support: u64,
    /// Abort once more than this many patterns were produced.
    cap: Option<usize>,
    out: Vec<Raw>,
    aborted: bool,
}

impl Miner<'_> {
    /// Frequent extensions of a projection with their new projections.
    fn extensions(&self, projection: &[(u32, u32)]) -> Vec<Extension> {
        let mut counts = vec![0u64; self.alphabet_len];
        let mut last_seen = vec![u32::MAX; self.alphabet_len];
        for &(sid, start) in projection {
            for &item in &self.seqs[sid as usize][start as usize..] {
                if last_seen[item as usize] != sid {
                    last_seen[item as usize] = sid;
                    counts[item as usize] += 1;
                }
            }
        }
        let mut result = Vec::new();
        for (item, &count) in counts.iter().enumerate() {
            if count < self.min_support {
                continue;
            }
            let item = item as u32;
            let projected: Vec<(u32, u32)> = projection
                .iter()
                .filter_map(|&(sid, start)| {
                    let seq = &self.seqs[sid as usize];
                    seq[start as usize..]
                        .iter()
                        .position(|&x| x == item)
                        .map(|p| (sid, start + p as u32 + 1))
                })
                .collect();
            result.push((item, count, projected));
        }
        result
    }

    fn grow(&mut self, prefix: &mut Vec<u32>, prefix_count: u64, projection: &[(u32, u32)]) {
        for (item, count, projected) in self.extensions(projection) {
            if self.aborted {
                return;
            }
            prefix.push(item);
            self.out.push(Raw {
                elements: prefix.clone(),
                count,
                prefix_count: if prefix.len() == 1 { count } else { prefix_count },
            });
            if self.cap.is_some_and(|c| self.out.len() > c) {
                self.aborted = true;
                prefix.pop();
                return;
            }
            self.grow(prefix, count, &projected);
            prefix.pop();
        }
    }
}

fn finish(raw: Vec<Raw>, interned: &Interned, n: u64) -> Vec<SequentialPattern> {
    let mut patterns: Vec<SequentialPattern> = raw
        .into_iter()
        .map(|r| SequentialPattern {
            elements: r
                .elements
                .iter()
                .map(|&i| interned.alphabet[i as usize].clone())
                .collect(),
            support: Ratio::new(r.count, n),
            confidence: Ratio::new(r.count, r.prefix_count),
        })
        .collect();
    sort_patterns(&mut patterns);
    patterns
}

fn root_projection(interned: &Interned) -> Vec<(u32, u32)> {
    (0..interned.seqs.len() as u32).map(|s| (s, 0)).collect()
}

/// All sequences with support of at least `min_support`, in canonical
/// order.
pub fn mine_prefixspan(db: &SequenceDatabase, min_support: u64) -> Result<Vec<SequentialPattern>, MineError> {
    if min_support < 1 {
        return Err(MineError::InvalidThreshold(min_support));
    }
    if db.is_empty() {
        return Ok(Vec::new());
    }
    let interned = Interned::new(db);
    let root = root_projection(&interned);
    let seed = Miner {
        seqs: &interned.seqs,
        alphabet_len: interned.alphabet.len(),
        min_support,
        cap: None,
        out: Vec::new(),
        aborted: false,
    };
    // each frequent first item roots an independent subtree
    let firsts = seed.extensions(&root);
    let raw: Vec<Raw> = firsts
        .into_par_iter()
        .flat_map_iter(|(item, count, projected)| {
            let mut miner = Miner {
                seqs: &interned.seqs,
                alphabet_len: interned.alphabet.len(),
                min_support,
                cap: None,
                out: vec![Raw {
                    elements: vec![item],
                    count,
                    prefix_count: count,
                }],
                aborted: false,
            };
            miner.grow(&mut vec![item], count, &projected);
            miner.out
        })
        .collect();
    Ok(finish(raw, &interned, db.len() as u64))
}

/// Like [`mine_prefixspan`] but gives up (returning `None`) as soon as more
/// than `cap` patterns exist.
pub fn mine_capped(db: &SequenceDatabase, min_support: u64, cap: usize) -> Result<Option<Vec<SequentialPattern>>, MineError> {
    if min_support < 1 {
        return Err(MineError::InvalidThreshold(min_support));
    }
    if db.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let interned = Interned::new(db);
    let root = root_projection(&interned);
    let mut miner = Miner {
        seqs: &interned.seqs,
        alphabet_len: interned.alphabet.len(),
        min_support,
        cap: Some(cap),
        out: Vec::new(),
        aborted: false,
    };
    miner.grow(&mut Vec::new(), 0, &root);
    if miner.aborted {
        return Ok(None);
    }
    Ok(Some(finish(miner.out, &interned, db.len() as u64)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveResult {
    pub patterns: Vec<SequentialPattern>,
    pub min_support_used: u64,
    /// True when even the highest threshold produced too many patterns
    /// and the list was cut to the best-ranked ones.
    pub truncated: bool,
}

/// Picks the smallest min-support whose result fits in `max_patterns`.
///
/// Result size never grows with the threshold, so a binary search over
/// `1..=|db|` finds it. If no threshold fits, the patterns at `|db|` are
/// truncated to the top `max_patterns` by canonical order.
pub fn adaptive_mine(db: &SequenceDatabase, max_patterns: usize) -> AdaptiveResult {
    let max_patterns = max_patterns.max(1);
    let n = db.len() as u64;
    if n == 0 {
        return AdaptiveResult {
            patterns: Vec::new(),
            min_support_used: 1,
            truncated: false,
        };
    }
    let fits = |m: u64| mine_capped(db, m, max_patterns).expect("threshold >= 1");
    if let Some(patterns) = fits(1) {
        return AdaptiveResult {
            patterns,
            min_support_used: 1,
            truncated: false,
        };
    }
    let Some(mut best) = fits(n) else {
        let mut patterns = mine_prefixspan(db, n).expect("threshold >= 1");
        patterns.truncate(max_patterns);
        return AdaptiveResult {
            patterns,
            min_support_used: n,
            truncated: true,
        };
    };
    // invariant: lo does not fit, hi fits
    let (mut lo, mut hi) = (1u64, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match fits(mid) {
            Some(p) => {
                best = p;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    AdaptiveResult {
        patterns: best,
        min_support_used: hi,
        truncated: false,
    }
}
