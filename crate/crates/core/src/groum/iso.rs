//! Structural feature vectors and exact label-isomorphism.

use std::collections::BTreeMap;

use super::Groum;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExasFeature {
    Node(String),
    Edge(String, String),
}

/// Multiset of label paths of length one and two. Equal vectors are
/// necessary, not sufficient, for label-isomorphism.
pub type ExasVector = BTreeMap<ExasFeature, usize>;

pub fn exas_vector(g: &Groum) -> ExasVector {
    let mut v = ExasVector::new();
    for n in &g.nodes {
        *v.entry(ExasFeature::Node(n.label.clone())).or_default() += 1;
    }
    for &(a, b) in &g.edges {
        let f = ExasFeature::Edge(g.nodes[a].label.clone(), g.nodes[b].label.clone());
        *v.entry(f).or_default() += 1;
    }
    v
}

fn degrees(g: &Groum) -> Vec<(usize, usize)> {
    let mut d = vec![(0, 0); g.len()];
    for &(a, b) in &g.edges {
        d[a].1 += 1;
        d[b].0 += 1;
    }
    d
}

/// True iff some bijection preserves labels and directed edges.
pub fn label_isomorphic(g1: &Groum, g2: &Groum) -> bool {
    if g1.len() != g2.len() || g1.edges.len() != g2.edges.len() {
        return false;
    }
    if exas_vector(g1) != exas_vector(g2) {
        return false;
    }
    let d1 = degrees(g1);
    let d2 = degrees(g2);
    let mut map = vec![usize::MAX; g1.len()];
    let mut used = vec![false; g2.len()];
    extend(g1, g2, &d1, &d2, 0, &mut map, &mut used)
}

fn extend(
    g1: &Groum,
    g2: &Groum,
    d1: &[(usize, usize)],
    d2: &[(usize, usize)],
    i: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == g1.len() {
        return true;
    }
    for j in 0..g2.len() {
        if used[j] || g1.nodes[i].label != g2.nodes[j].label || d1[i] != d2[j] {
            continue;
        }
        let consistent = (0..i).all(|k| {
            g1.has_edge(k, i) == g2.has_edge(map[k], j) && g1.has_edge(i, k) == g2.has_edge(j, map[k])
        });
        if !consistent {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if extend(g1, g2, d1, d2, i + 1, map, used) {
            return true;
        }
        used[j] = false;
    }
    map[i] = usize::MAX;
    false
}
