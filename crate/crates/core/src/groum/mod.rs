//! Graph-based object usage models and frequent induced subgraph mining.

mod explorer;
mod iso;

use std::collections::BTreeSet;

use crate::extractor::Extraction;
use crate::item::{BlockPath, ControlKind, ControlMarker, SourceItem};

pub use explorer::{independent_occurrences, patt_explorer, GroumPattern, Occurrence};
pub use iso::{exas_vector, label_isomorphic, ExasFeature, ExasVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroumError {
    #[error("MalformedControlNesting at line {line}: {message}")]
    MalformedControlNesting { line: u32, message: String },
    #[error("InvalidThreshold: {0} (must be at least 1)")]
    InvalidThreshold(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRole {
    Action,
    Control,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroumNode {
    pub id: usize,
    pub label: String,
    pub role: NodeRole,
}

/// A labeled DAG. Node ids are indices into `nodes` and every edge goes
/// from a lower to a higher id, so id order is a topological order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Groum {
    pub nodes: Vec<GroumNode>,
    pub edges: BTreeSet<(usize, usize)>,
    pub origin: String,
}

impl Groum {
    pub fn new(origin: impl Into<String>) -> Self {
        Groum {
            origin: origin.into(),
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, label: impl Into<String>, role: NodeRole) -> usize {
        let id = self.nodes.len();
        self.nodes.push(GroumNode {
            id,
            label: label.into(),
            role,
        });
        id
    }

    /// Adds `from → to`; panics unless `from < to < len`.
    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(from < to && to < self.nodes.len(), "edge {from}->{to} breaks id order");
        self.edges.insert((from, to));
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Undirected neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// The subgraph induced by `nodes` (ascending ids), renumbered 0.. in
    /// that order.
    pub fn induced(&self, nodes: &[usize]) -> Groum {
        let mut g = Groum::new(self.origin.clone());
        for &n in nodes {
            g.add_node(self.nodes[n].label.clone(), self.nodes[n].role);
        }
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if self.has_edge(a, b) {
                    g.edges.insert((i, j));
                }
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `node <id> <label>` / `edge <from> <to>` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&format!("node {} {}\n", n.id, n.label));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("edge {a} {b}\n"));
        }
        out
    }
}

enum Event<'a> {
    Action(&'a SourceItem),
    Marker(&'a ControlMarker),
}

impl Event<'_> {
    fn pos(&self) -> (u32, u32) {
        match self {
            Event::Action(i) => (i.line, i.column),
            Event::Marker(m) => (m.line, m.column),
        }
    }
}

/// Builds the groum of one method body.
///
/// Each action item becomes a node labeled with its `Type.member` label;
/// each IF/LOOP region becomes one control node at its start. A node gets
/// an edge from its predecessor in the sequence and from the nearest
/// earlier node sharing each of its variables.
pub fn build_groum(
    origin: impl Into<String>,
    items: &[SourceItem],
    markers: &[ControlMarker],
) -> Result<Groum, GroumError> {
    let mut events: Vec<Event> = items
        .iter()
        .filter(|i| i.kind.is_action())
        .map(Event::Action)
        .chain(markers.iter().map(Event::Marker))
        .collect();
    // a region starting where an item sits encloses it; ends sort after it
    events.sort_by_key(|e| {
        let rank = match e {
            Event::Marker(m) if matches!(m.kind, ControlKind::IfBegin | ControlKind::LoopBegin) => 0,
            Event::Action(_) => 1,
            Event::Marker(_) => 2,
        };
        (e.pos(), rank)
    });

    let mut g = Groum::new(origin);
    let mut node_vars: Vec<&[String]> = Vec::new();
    let mut open: Vec<(ControlKind, u32)> = Vec::new();
    for e in &events {
        let (label, role, vars) = match e {
            Event::Action(i) => (
                i.action_label.clone().unwrap_or_else(|| i.name.clone()),
                NodeRole::Action,
                i.vars.as_slice(),
            ),
            Event::Marker(m) => match m.kind {
                ControlKind::IfBegin | ControlKind::LoopBegin => {
                    open.push((m.kind, m.line));
                    let label = if m.kind == ControlKind::IfBegin { "IF" } else { "LOOP" };
                    (label.to_string(), NodeRole::Control, m.vars.as_slice())
                }
                ControlKind::IfEnd | ControlKind::LoopEnd => {
                    let want = if m.kind == ControlKind::IfEnd {
                        ControlKind::IfBegin
                    } else {
                        ControlKind::LoopBegin
                    };
                    match open.pop() {
                        Some((k, _)) if k == want => continue,
                        _ => {
                            return Err(GroumError::MalformedControlNesting {
                                line: m.line,
                                message: format!("unexpected {}", m.kind.code()),
                            })
                        }
                    }
                }
            },
        };
        let id = g.add_node(label, role);
        if id > 0 {
            g.add_edge(id - 1, id);
        }
        for v in vars {
            if let Some(prev) = node_vars.iter().rposition(|vs| vs.contains(v)) {
                g.add_edge(prev, id);
            }
        }
        node_vars.push(vars);
    }
    if let Some((k, line)) = open.pop() {
        return Err(GroumError::MalformedControlNesting {
            line,
            message: format!("unclosed {}", k.code()),
        });
    }
    Ok(g)
}

/// One groum per method of the extraction, in method order of appearance.
pub fn groums_of(extraction: &Extraction) -> Result<Vec<Groum>, GroumError> {
    let mut methods: Vec<&BlockPath> = Vec::new();
    for p in extraction
        .items
        .iter()
        .map(|i| &i.enclosing)
        .chain(extraction.markers.iter().map(|m| &m.enclosing))
    {
        if p.is_method() && !methods.contains(&p) {
            methods.push(p);
        }
    }
    methods
        .into_iter()
        .map(|m| {
            let items: Vec<SourceItem> = extraction.items.iter().filter(|i| &i.enclosing == m).cloned().collect();
            let markers: Vec<ControlMarker> =
                extraction.markers.iter().filter(|k| &k.enclosing == m).cloned().collect();
            build_groum(m.to_string(), &items, &markers)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::extract_items;

    fn groums(src: &str) -> Vec<Groum> {
        groums_of(&extract_items(src, "T.java").unwrap()).unwrap()
    }

    #[test]
    fn parser_setup_chain() {
        let g = &groums(
            "class C { ASTParser parser; ICompilationUnit unit;\n void m() {\n\
             parser = ASTParser.newParser(AST.JLS3);\n parser.setKind(ASTParser.K_COMPILATION_UNIT);\n\
             parser.setSource(unit);\n parser.setResolveBindings(true);\n\
             CompilationUnit cu = (CompilationUnit) parser.createAST(null);\n } }",
        )[0];
        let labels: Vec<_> = g.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "ASTParser.newParser",
                "ASTParser.setKind",
                "ASTParser.setSource",
                "ASTParser.setResolveBindings",
                "ASTParser.createAST"
            ]
        );
        assert_eq!(g.edges.iter().copied().collect::<Vec<_>>(), [(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(g.origin, "C.m()");
    }

    #[test]
    fn single_and_unrelated_calls() {
        let g = &groums("class C { void m() { a.run(); } }")[0];
        assert_eq!((g.len(), g.edges.len()), (1, 0));
        let g = &groums("class C { void m(A a, B b) { a.run(); b.stop(); } }")[0];
        assert_eq!((g.len(), g.edges.len()), (2, 1));
    }

    #[test]
    fn data_dependency_skips_unrelated_nodes() {
        let g = &groums("class C { void m(A a, B b) { a.open(); b.stop(); a.close(); } }")[0];
        assert_eq!(g.edges.iter().copied().collect::<Vec<_>>(), [(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn control_nodes() {
        let g = &groums(
            "class C { void m(Iterator it) { while (it.hasNext()) { if (x) { it.next(); } } it.remove(); } }",
        )[0];
        let labels: Vec<_> = g.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["LOOP", "Iterator.hasNext", "IF", "Iterator.next", "Iterator.remove"]);
        assert_eq!(g.nodes[0].role, NodeRole::Control);
        // LOOP reads `it`, so every later `it` use links back through the chain
        assert!(g.has_edge(0, 1) && g.has_edge(1, 3) && g.has_edge(3, 4));
    }

    #[test]
    fn malformed_nesting() {
        let m = |kind, line| ControlMarker {
            kind,
            enclosing: BlockPath::Method {
                class: "C".into(),
                method: "m()".into(),
            },
            file: "T.java".into(),
            line,
            column: 1,
            vars: vec![],
        };
        let err = build_groum("x", &[], &[m(ControlKind::IfBegin, 1), m(ControlKind::LoopEnd, 2)]);
        assert!(matches!(err, Err(GroumError::MalformedControlNesting { line: 2, .. })));
        let err = build_groum("x", &[], &[m(ControlKind::LoopBegin, 3)]);
        assert!(matches!(err, Err(GroumError::MalformedControlNesting { line: 3, .. })));
    }

    #[test]
    fn induced_subgraph_keeps_all_edges() {
        let mut g = Groum::new("g");
        for l in ["a", "b", "c"] {
            g.add_node(l, NodeRole::Action);
        }
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 2);
        let s = g.induced(&[0, 2]);
        assert_eq!(s.edges.iter().copied().collect::<Vec<_>>(), [(0, 1)]);
        assert!(s.is_connected());
        assert!(!g.induced(&[]).is_connected());
        assert_eq!(s.to_text(), "node 0 a\nnode 1 c\nedge 0 1\n");
    }
}
