//! Generators and brute-force oracles shared by property and acceptance
//! tests. Oracles deliberately avoid the library's own algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use esdp_core::groum::{Groum, NodeRole};
use esdp_core::{ItemKey, ItemKind, MinedRepository, Ratio, SequenceDatabase, SequentialPattern};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn item(i: usize) -> ItemKey {
    ItemKey::new(ItemKind::MethodInvocation, format!("{}()", (b'a' + i as u8) as char))
}

/// Up to `max_records` records of up to `max_len` items over `alphabet`
/// symbols; repeats allowed.
pub fn random_db(rng: &mut impl Rng, max_records: usize, max_len: usize, alphabet: usize) -> SequenceDatabase {
    let n = rng.gen_range(1..=max_records);
    let seqs: Vec<Vec<ItemKey>> = (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len).map(|_| item(rng.gen_range(0..alphabet))).collect()
        })
        .collect();
    SequenceDatabase::from_sequences("random", seqs)
}

/// Every distinct subsequence of every record, with the number of records
/// containing it, filtered by `min_support`.
pub fn brute_force_mine(db: &SequenceDatabase, min_support: u64) -> BTreeMap<Vec<ItemKey>, u64> {
    let mut counts: BTreeMap<Vec<ItemKey>, u64> = BTreeMap::new();
    for r in &db.records {
        let n = r.items.len();
        let mut subs = BTreeSet::new();
        for mask in 1u32..(1 << n) {
            let sub: Vec<ItemKey> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| r.items[i].clone()).collect();
            subs.insert(sub);
        }
        for s in subs {
            *counts.entry(s).or_default() += 1;
        }
    }
    counts.retain(|_, c| *c >= min_support);
    counts
}

pub fn as_count_map(patterns: &[SequentialPattern]) -> BTreeMap<Vec<ItemKey>, u64> {
    patterns.iter().map(|p| (p.elements.clone(), p.support.num)).collect()
}

const NAMES: &[&str] = &[
    "a()",
    "File.delete()",
    "list.add(Object)",
    "Map<K,V>.get()",
    "x & y",
    "\"quoted\"",
    "it's",
    "a < b > c",
    "java.io.File(String)",
    "ünïcode.m()",
];

pub fn random_repo(rng: &mut impl Rng, min_patterns: usize) -> MinedRepository {
    let n = rng.gen_range(min_patterns..=min_patterns + 8);
    let patterns = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=5);
            let elements = (0..k)
                .map(|_| {
                    let kind = *ItemKind::ALL.choose(rng).unwrap();
                    let name = format!("{}{}", NAMES.choose(rng).unwrap(), rng.gen_range(0..4));
                    ItemKey::new(kind, name)
                })
                .collect();
            let den = rng.gen_range(1..=40);
            let num = rng.gen_range(1..=den);
            let cden = rng.gen_range(num..=den);
            SequentialPattern {
                elements,
                support: Ratio::new(num, den),
                confidence: Ratio::new(num, cden),
            }
        })
        .collect();
    let label = format!("corpus <{}> & co", rng.gen_range(0..100));
    MinedRepository::new(label, "2024-03-01T12:30:00Z", rng.gen_range(1..=9), patterns)
}

fn replace_first(s: &str, from: &str, to: &str) -> Option<String> {
    s.contains(from).then(|| s.replacen(from, to, 1))
}

fn lines_with(s: &str, prefix: &str) -> Vec<usize> {
    s.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with(prefix))
        .map(|(i, _)| i)
        .collect()
}

fn edit_line(s: &str, idx: usize, f: impl FnOnce(&str) -> String) -> String {
    let mut lines: Vec<String> = s.lines().map(str::to_string).collect();
    lines[idx] = f(&lines[idx]);
    lines.join("\n") + "\n"
}

fn attr(line: &str, name: &str) -> u64 {
    let key = format!("{name}=\"");
    let start = line.find(&key).unwrap() + key.len();
    let end = start + line[start..].find('"').unwrap();
    line[start..end].parse().unwrap()
}

pub const MUTATIONS: usize = 24;

/// Applies schema-breaking edit number `op` to a canonical document with
/// at least two patterns. Returns None if the edit does not apply.
pub fn mutate(xml: &str, op: usize) -> Option<String> {
    let support = lines_with(xml, "<support ")[0];
    let confidence = lines_with(xml, "<confidence ")[0];
    let ranking = lines_with(xml, "<ranking>")[0];
    let first_s = lines_with(xml, "<s i=\"1\"")[0];
    let pattern_open = lines_with(xml, "<pattern ");
    let pattern_close = lines_with(xml, "</pattern>");
    let lines: Vec<&str> = xml.lines().collect();
    let out = match op {
        0 => replace_first(xml, "version=\"1\"", "version=\"2\"")?,
        1 => {
            let start = xml.find(" corpus=\"")?;
            let end = start + 9 + xml[start + 9..].find('"')? + 1;
            format!("{}{}", &xml[..start], &xml[end..])
        }
        2 => {
            let start = xml.find("min-support=\"")? + 13;
            let end = start + xml[start..].find('"')?;
            format!("{}0{}", &xml[..start], &xml[end..])
        }
        3 => {
            let start = xml.find("created=\"")? + 9;
            let end = start + xml[start..].find('"')?;
            format!("{}yesterday{}", &xml[..start], &xml[end..])
        }
        4 => edit_line(xml, support, |l| {
            let den = attr(l, "den");
            format!("      <support num=\"{}\" den=\"{den}\">1.00</support>", den + 1)
        }),
        5 => edit_line(xml, support, |l| {
            format!("      <support num=\"{}\" den=\"0\">1.00</support>", attr(l, "num"))
        }),
        6 => edit_line(xml, support, |l| {
            format!(
                "      <support num=\"{}\" den=\"{}\">9.99</support>",
                attr(l, "num"),
                attr(l, "den")
            )
        }),
        7 => edit_line(xml, ranking, |_| "      <ranking>-1</ranking>".into()),
        8 => edit_line(xml, pattern_open[0], |l| {
            let k = attr(l, "k");
            l.replace(&format!("k=\"{k}\""), &format!("k=\"{}\"", k + 1))
        }),
        9 => {
            let mut v: Vec<&str> = lines.clone();
            v.swap(support, confidence);
            v.join("\n") + "\n"
        }
        10 => edit_line(xml, ranking, |l| format!("{l}<extra/>")),
        11 => {
            let block = lines[pattern_open[0]..=pattern_close[0]].join("\n");
            let mut v: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
            v.insert(pattern_close[0] + 1, block);
            v.join("\n") + "\n"
        }
        12 => {
            let mut cut = xml.len() / 2;
            while !xml.is_char_boundary(cut) {
                cut -= 1;
            }
            xml[..cut].to_string()
        }
        13 => edit_line(xml, pattern_open[0], |l| {
            let start = l.find("kind=\"").unwrap() + 6;
            let end = start + l[start..].find('"').unwrap();
            format!("{}XX{}", &l[..start], &l[end..])
        }),
        14 => replace_first(xml, "<esdp-repository ", "<esdp-repository foo=\"1\" ")?,
        15 => edit_line(xml, first_s, |l| l.replacen("i=\"1\"", "i=\"2\"", 1)),
        16 => edit_line(xml, first_s, |l| {
            let start = l.find('>').unwrap() + 1;
            format!("{}</s>", &l[..start])
        }),
        17 => edit_line(xml, pattern_open[0], |l| {
            let k = attr(l, "k");
            l.replace(&format!("k=\"{k}\""), &format!("k=\"0{k}\""))
        }),
        18 => {
            let mut v: Vec<&str> = lines.clone();
            v.remove(ranking);
            v.join("\n") + "\n"
        }
        19 => edit_line(xml, confidence, |l| {
            let n = attr(l, "num") + 1;
            format!("      <confidence num=\"{n}\" den=\"{n}\">1.00</confidence>")
        }),
        20 => xml.replace("esdp-repository", "esdp-repo"),
        21 => edit_line(xml, first_s, |l| {
            let start = l.find('>').unwrap() + 1;
            format!("{} {}", &l[..start], &l[start..])
        }),
        22 => {
            let open = lines[pattern_open[0]];
            let start = open.find("kind=\"").unwrap() + 6;
            let end = start + open[start..].find('"').unwrap();
            let kind = &open[start..end];
            edit_line(xml, first_s, |l| l.replacen("<s i=\"1\"", &format!("<s i=\"1\" kind=\"{kind}\""), 1))
        }
        23 => {
            if pattern_open.len() < 2 {
                return None;
            }
            let first = lines[pattern_open[0]..=pattern_close[0]].to_vec();
            let second = lines[pattern_open[1]..=pattern_close[1]].to_vec();
            let mut v: Vec<&str> = lines[..pattern_open[0]].to_vec();
            v.extend(second);
            v.extend(first);
            v.extend(&lines[pattern_close[1] + 1..]);
            v.join("\n") + "\n"
        }
        _ => return None,
    };
    (out != xml).then_some(out)
}

// ----- graphs ------------------------------------------------------------------------------

pub fn random_groum(rng: &mut impl Rng, max_nodes: usize, labels: usize) -> Groum {
    let mut g = Groum::new("random");
    let n = rng.gen_range(1..=max_nodes);
    for _ in 0..n {
        let l = rng.gen_range(0..labels);
        g.add_node(format!("T.m{l}"), NodeRole::Action);
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.4) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// Isomorphism by trying every bijection.
pub fn brute_isomorphic(a: &Groum, b: &Groum) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    permutations(a.nodes.len()).into_iter().any(|perm| {
        (0..a.nodes.len()).all(|i| a.nodes[i].label == b.nodes[perm[i]].label)
            && a.edges.iter().all(|&(x, y)| b.edges.contains(&(perm[x], perm[y])))
    })
}

/// Random relabeling of node order; edges keep their direction.
pub fn shuffled(g: &Groum, rng: &mut impl Rng) -> Groum {
    let mut perm: Vec<usize> = (0..g.nodes.len()).collect();
    perm.shuffle(rng);
    let mut out = Groum::new(g.origin.clone());
    let mut inverse = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
        out.nodes.push(esdp_core::groum::GroumNode {
            id: new,
            label: g.nodes[old].label.clone(),
            role: g.nodes[old].role,
        });
    }
    for &(a, b) in &g.edges {
        out.edges.insert((inverse[a], inverse[b]));
    }
    out
}

fn connected(g: &Groum, nodes: &[usize]) -> bool {
    let mut seen = vec![nodes[0]];
    let mut stack = vec![nodes[0]];
    while let Some(x) = stack.pop() {
        for &y in nodes {
            if !seen.contains(&y) && (g.edges.contains(&(x, y)) || g.edges.contains(&(y, x))) {
                seen.push(y);
                stack.push(y);
            }
        }
    }
    seen.len() == nodes.len()
}

/// Largest family of pairwise disjoint node sets, by trying every subset.
fn brute_mis(sets: &[Vec<usize>]) -> usize {
    let n = sets.len();
    (0u32..(1 << n))
        .filter(|mask| {
            let chosen: Vec<&Vec<usize>> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &sets[i]).collect();
            chosen.iter().enumerate().all(|(i, a)| {
                chosen[i + 1..].iter().all(|b| a.iter().all(|x| !b.contains(x)))
            })
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

/// A representative and its occurrence node sets per graph.
type OccurrenceClass = (Groum, BTreeMap<usize, Vec<Vec<usize>>>);

/// Every connected induced subgraph of every graph, grouped into
/// isomorphism classes with exact independent-occurrence frequency;
/// classes below `sigma` dropped.
pub fn brute_force_groum_patterns(dataset: &[Groum], sigma: usize) -> Vec<(Groum, usize)> {
    // (representative, per-graph occurrence node sets)
    let mut classes: Vec<OccurrenceClass> = Vec::new();
    for (gi, g) in dataset.iter().enumerate() {
        let n = g.nodes.len();
        for mask in 1u32..(1 << n) {
            let nodes: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if !connected(g, &nodes) {
                continue;
            }
            let sub = g.induced(&nodes);
            match classes.iter_mut().find(|(rep, _)| brute_isomorphic(rep, &sub)) {
                Some((_, occ)) => occ.entry(gi).or_default().push(nodes),
                None => classes.push((sub, BTreeMap::from([(gi, vec![nodes])]))),
            }
        }
    }
    classes
        .into_iter()
        .map(|(rep, occ)| (rep, occ.values().map(|sets| brute_mis(sets)).sum()))
        .filter(|(_, f)| *f >= sigma)
        .collect()
}

/// Explorer output and oracle output describe the same classes with the
/// same frequencies.
pub fn same_pattern_sets(found: &[(Groum, usize)], oracle: &[(Groum, usize)]) -> bool {
    found.len() == oracle.len()
        && oracle
            .iter()
            .all(|(rep, f)| found.iter().any(|(g, h)| h == f && brute_isomorphic(g, rep)))
}

const TYPES: &[&str] = &["File", "ASTParser", "Connection", "Reader", "List", "Map", "Socket", "Buffer"];
const METHODS: &[&str] = &["open", "close", "read", "write", "get", "put", "setKind", "flush", "size", "clear"];
const ARGS: &[&str] = &["", "int", "String", "boolean", "Object,int", "null"];

/// An API call item in the corpus naming scheme.
pub fn random_call(rng: &mut impl Rng) -> ItemKey {
    let ty = TYPES.choose(rng).unwrap();
    let m = METHODS.choose(rng).unwrap();
    let args = ARGS.choose(rng).unwrap();
    let recv = if rng.gen_bool(0.3) {
        ty.to_string()
    } else {
        let mut c = ty.chars();
        let first = c.next().unwrap().to_lowercase().collect::<String>();
        first + c.as_str()
    };
    ItemKey::new(ItemKind::MethodInvocation, format!("{recv}.{m}({args})"))
}

/// A repository of `n` distinct call-sequence patterns.
pub fn synthetic_repo(rng: &mut impl Rng, n: usize) -> MinedRepository {
    let mut seen = BTreeSet::new();
    let mut patterns = Vec::new();
    while patterns.len() < n {
        let k = rng.gen_range(1..=6);
        let elements: Vec<ItemKey> = (0..k).map(|_| random_call(rng)).collect();
        if !seen.insert(elements.clone()) {
            continue;
        }
        let den = 500;
        let num = rng.gen_range(2..=60);
        patterns.push(SequentialPattern {
            elements,
            support: Ratio::new(num, den),
            confidence: Ratio::new(num, rng.gen_range(num..=120)),
        });
    }
    MinedRepository::new("synthetic", "2024-03-01T12:30:00Z", 2, patterns)
}
