//! Seeded synthetic inputs for the benches.

use esdp_core::groum::{Groum, NodeRole};
use esdp_core::{ItemKey, ItemKind, MinedRepository, Ratio, SequenceDatabase, SequentialPattern};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TYPES: &[&str] = &["File", "ASTParser", "Connection", "Reader", "List", "Map", "Socket", "Buffer"];
const METHODS: &[&str] = &["open", "close", "read", "write", "get", "put", "setKind", "flush", "size", "clear"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn call(rng: &mut impl Rng) -> ItemKey {
    let ty = TYPES.choose(rng).unwrap();
    let m = METHODS.choose(rng).unwrap();
    ItemKey::new(ItemKind::MethodInvocation, format!("{}.{m}()", ty.to_lowercase()))
}

/// `records` method blocks of 5..=`max_len` calls; a few planted chains
/// give the miner something longer than noise to find.
pub fn sequence_db(seed: u64, records: usize, max_len: usize) -> SequenceDatabase {
    let mut rng = rng(seed);
    let chains: Vec<Vec<ItemKey>> = (0..4).map(|_| (0..4).map(|_| call(&mut rng)).collect()).collect();
    let seqs = (0..records).map(|_| {
        let len = rng.gen_range(5..=max_len.max(5));
        let mut s: Vec<ItemKey> = (0..len).map(|_| call(&mut rng)).collect();
        if rng.gen_bool(0.4) {
            let chain = chains.choose(&mut rng).unwrap();
            let at = rng.gen_range(0..=s.len());
            s.splice(at..at, chain.iter().cloned());
        }
        s
    });
    SequenceDatabase::from_sequences("bench", seqs)
}

/// A repository of `n` distinct call-sequence patterns.
pub fn repository(seed: u64, n: usize) -> MinedRepository {
    let mut rng = rng(seed);
    let mut seen = std::collections::HashSet::new();
    let mut patterns = Vec::with_capacity(n);
    while patterns.len() < n {
        let elements: Vec<ItemKey> = (0..rng.gen_range(1..=6)).map(|_| call(&mut rng)).collect();
        if !seen.insert(elements.clone()) {
            continue;
        }
        let num = rng.gen_range(2..=60);
        patterns.push(SequentialPattern {
            elements,
            support: Ratio::new(num, 500),
            confidence: Ratio::new(num, rng.gen_range(num..=120)),
        });
    }
    MinedRepository::new("bench", "2024-01-01T00:00:00Z", 2, patterns)
}

/// Chain-shaped usage graphs with occasional data-dependency skips.
pub fn groums(seed: u64, graphs: usize, nodes: usize, labels: usize) -> Vec<Groum> {
    let mut rng = rng(seed);
    (0..graphs)
        .map(|i| {
            let mut g = Groum::new(format!("g{i}"));
            for n in 0..nodes {
                g.add_node(format!("T.m{}", rng.gen_range(0..labels)), NodeRole::Action);
                if n > 0 {
                    g.add_edge(n - 1, n);
                }
                if n > 1 && rng.gen_bool(0.3) {
                    g.add_edge(rng.gen_range(0..n - 1), n);
                }
            }
            g
        })
        .collect()
}
