//! Pattern growth over induced subgraphs.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::iso::{exas_vector, label_isomorphic, ExasVector};
use super::{Groum, GroumError};

/// Above this many occurrences in one graph the independent-set count is
/// greedy and only a lower bound.
const EXACT_LIMIT: usize = 20;

/// An induced subgraph of `dataset[graph]`, identified by its node ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub graph: usize,
    /// Ascending.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroumPattern {
    pub representative: Groum,
    /// Every occurrence in the dataset, sorted.
    pub occurrences: Vec<Occurrence>,
    /// Sum over graphs of the maximum number of node-disjoint occurrences.
    pub frequency: usize,
    /// Set when some graph had too many occurrences for an exact count.
    pub lower_bound: bool,
}

impl GroumPattern {
    pub fn size(&self) -> usize {
        self.representative.len()
    }

    fn order_key(&self) -> (usize, ExasVector, Vec<(usize, usize)>) {
        (
            self.size(),
            exas_vector(&self.representative),
            self.representative.edges.iter().copied().collect(),
        )
    }
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn max_independent(candidates: u32, conflicts: &[u32]) -> usize {
    if candidates == 0 {
        return 0;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    let with = 1 + max_independent(rest & !conflicts[v], conflicts);
    if with > rest.count_ones() as usize {
        return with;
    }
    with.max(max_independent(rest, conflicts))
}

/// Maximum number of pairwise node-disjoint occurrences among `occs`
/// (node sets of one graph). Exact up to 20 occurrences; beyond that a
/// greedy pick in node order, flagged by `false`.
pub fn independent_occurrences(occs: &[Vec<usize>]) -> (usize, bool) {
    if occs.len() <= EXACT_LIMIT {
        let conflicts: Vec<u32> = occs
            .iter()
            .map(|a| {
                occs.iter()
                    .enumerate()
                    .filter(|(_, b)| !disjoint(a, b))
                    .fold(0u32, |m, (j, _)| m | (1 << j))
            })
            .collect();
        let all = if occs.is_empty() { 0 } else { u32::MAX >> (32 - occs.len()) };
        return (max_independent(all, &conflicts), true);
    }
    let mut sorted: Vec<&Vec<usize>> = occs.iter().collect();
    sorted.sort();
    let mut used = BTreeSet::new();
    let mut count = 0;
    for o in sorted {
        if o.iter().all(|n| !used.contains(n)) {
            used.extend(o.iter().copied());
            count += 1;
        }
    }
    (count, false)
}

fn frequency(occurrences: &[Occurrence]) -> (usize, bool) {
    let mut by_graph: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for o in occurrences {
        by_graph.entry(o.graph).or_default().push(o.nodes.clone());
    }
    by_graph.values().fold((0, false), |(f, lb), occs| {
        let (n, exact) = independent_occurrences(occs);
        (f + n, lb || !exact)
    })
}

struct Class {
    representative: Groum,
    vector: ExasVector,
    occurrences: Vec<Occurrence>,
}

/// Partitions occurrences into label-isomorphism classes; the vector is
/// compared first and exact isomorphism confirms.
fn classify(dataset: &[Groum], candidates: BTreeSet<Occurrence>) -> Vec<Class> {
    let mut classes: Vec<Class> = Vec::new();
    for occ in candidates {
        let g = dataset[occ.graph].induced(&occ.nodes);
        let v = exas_vector(&g);
        match classes
            .iter_mut()
            .find(|c| c.vector == v && label_isomorphic(&c.representative, &g))
        {
            Some(c) => c.occurrences.push(occ),
            None => classes.push(Class {
                representative: g,
                vector: v,
                occurrences: vec![occ],
            }),
        }
    }
    classes
}

/// Mines every connected induced subgraph pattern with frequency at least
/// `sigma`, growing patterns one adjacent frequent node at a time.
///
/// Each pattern of size k+1 has a non-cut node whose removal leaves a
/// connected size-k pattern of no lower frequency, so growth from frequent
/// patterns only is complete. `max_size` bounds the pattern size.
pub fn patt_explorer(
    dataset: &[Groum],
    sigma: u64,
    max_size: Option<usize>,
) -> Result<Vec<GroumPattern>, GroumError> {
    if sigma < 1 {
        return Err(GroumError::InvalidThreshold(sigma));
    }
    let sigma = usize::try_from(sigma).unwrap_or(usize::MAX);
    let adjacency: Vec<Vec<Vec<usize>>> = dataset.iter().map(Groum::adjacency).collect();

    let mut by_label: BTreeMap<&str, Vec<Occurrence>> = BTreeMap::new();
    for (gi, g) in dataset.iter().enumerate() {
        for n in &g.nodes {
            by_label.entry(n.label.as_str()).or_default().push(Occurrence {
                graph: gi,
                nodes: vec![n.id],
            });
        }
    }
    by_label.retain(|_, occs| occs.len() >= sigma);
    let frequent_label = |gi: usize, n: usize| by_label.contains_key(dataset[gi].nodes[n].label.as_str());

    let mut known: BTreeMap<ExasVector, Vec<Groum>> = BTreeMap::new();
    let mut current: Vec<GroumPattern> = by_label
        .values()
        .map(|occs| {
            let first = &occs[0];
            GroumPattern {
                representative: dataset[first.graph].induced(&first.nodes),
                occurrences: occs.clone(),
                frequency: occs.len(),
                lower_bound: false,
            }
        })
        .collect();
    for p in &current {
        known
            .entry(exas_vector(&p.representative))
            .or_default()
            .push(p.representative.clone());
    }
    let mut found: Vec<GroumPattern> = Vec::new();

    loop {
        let size = current.first().map(GroumPattern::size).unwrap_or(0);
        let grow = !current.is_empty() && max_size.is_none_or(|m| size < m);
        if !grow {
            found.append(&mut current);
            break;
        }
        let per_parent: Vec<Vec<Class>> = current
            .par_iter()
            .map(|p| {
                let mut candidates = BTreeSet::new();
                for occ in &p.occurrences {
                    let adj = &adjacency[occ.graph];
                    for &x in &occ.nodes {
                        for &y in &adj[x] {
                            if occ.nodes.binary_search(&y).is_err() && frequent_label(occ.graph, y) {
                                let mut nodes = occ.nodes.clone();
                                let at = nodes.binary_search(&y).unwrap_err();
                                nodes.insert(at, y);
                                candidates.insert(Occurrence {
                                    graph: occ.graph,
                                    nodes,
                                });
                            }
                        }
                    }
                }
                classify(dataset, candidates)
            })
            .collect();
        found.append(&mut current);
        for class in per_parent.into_iter().flatten() {
            let bucket = known.entry(class.vector).or_default();
            if bucket.iter().any(|g| label_isomorphic(g, &class.representative)) {
                continue;
            }
            bucket.push(class.representative.clone());
            let (f, lower_bound) = frequency(&class.occurrences);
            if f >= sigma {
                current.push(GroumPattern {
                    representative: class.representative,
                    occurrences: class.occurrences,
                    frequency: f,
                    lower_bound,
                });
            }
        }
    }
    found.sort_by_cached_key(GroumPattern::order_key);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groum::NodeRole;

    fn chain(labels: &[&str]) -> Groum {
        let mut g = Groum::new("c");
        for (i, l) in labels.iter().enumerate() {
            g.add_node(*l, NodeRole::Action);
            if i > 0 {
                g.add_edge(i - 1, i);
            }
        }
        g
    }

    #[test]
    fn independent_counts() {
        assert_eq!(independent_occurrences(&[vec![0, 1], vec![2, 3]]), (2, true));
        assert_eq!(independent_occurrences(&[vec![0, 1], vec![1, 2]]), (1, true));
        assert_eq!(
            independent_occurrences(&[vec![0, 1], vec![1, 2], vec![2, 3]]).0,
            2
        );
        let many: Vec<Vec<usize>> = (0..25).map(|i| vec![i]).collect();
        assert_eq!(independent_occurrences(&many), (25, false));
    }

    #[test]
    fn three_identical_chains() {
        let data = vec![chain(&["a", "b"]); 3];
        let ps = patt_explorer(&data, 3, None).unwrap();
        let summary: Vec<_> = ps
            .iter()
            .map(|p| (p.size(), p.frequency, p.representative.edges.len()))
            .collect();
        assert_eq!(summary, [(1, 3, 0), (1, 3, 0), (2, 3, 1)]);
        assert_eq!(ps[0].representative.nodes[0].label, "a");
    }

    #[test]
    fn threshold_edges() {
        let data = vec![chain(&["a", "b"])];
        assert!(patt_explorer(&data, 3, None).unwrap().is_empty());
        assert_eq!(patt_explorer(&data, 0, None), Err(GroumError::InvalidThreshold(0)));
        assert_eq!(patt_explorer(&data, 1, Some(1)).unwrap().len(), 2);
    }

    #[test]
    fn overlapping_occurrences_count_once() {
        // a→a→a holds two overlapping a→a occurrences
        let ps = patt_explorer(&[chain(&["a", "a", "a"])], 1, None).unwrap();
        let aa = ps.iter().find(|p| p.size() == 2).unwrap();
        assert_eq!(aa.occurrences.len(), 2);
        assert_eq!(aa.frequency, 1);
        assert_eq!(ps.len(), 3);
    }
}
