//! Source abstraction: Java-subset source text in, abstracted items out.

mod abstraction;
pub mod ast;
pub mod lexer;
pub mod parser;

use std::fmt::Write as _;
use std::sync::Arc;

use crate::item::{BlockPath, ControlMarker, ItemKind, SourceItem};
pub use parser::Recovery;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("UnparsableSource at {line}:{column}: {message}")]
    UnparsableSource {
        line: u32,
        column: u32,
        message: String,
    },
}

/// A variable or field declared in the source, with its resolved type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub type_name: String,
    pub enclosing: BlockPath,
    pub line: u32,
}

/// Everything pulled out of one source file.
#[derive(Debug, Clone, Default)]
pub struct Extraction {
    /// Sorted by (line, column).
    pub items: Vec<SourceItem>,
    /// Sorted by (line, column).
    pub markers: Vec<ControlMarker>,
    pub declarations: Vec<Declaration>,
    /// Places where the parser skipped an unsupported construct.
    pub recoveries: Vec<Recovery>,
}

/// Abstracts one source file.
///
/// Lexical errors and unbalanced brackets fail; statement forms the parser
/// does not understand are skipped and reported in `recoveries`.
pub fn extract_items(source: &str, file_label: &str) -> Result<Extraction, ExtractError> {
    let tokens = lexer::tokenize(source)?;
    lexer::check_balance(&tokens)?;
    let mut parser = parser::Parser::new(&tokens);
    let unit = parser.compilation_unit();
    let mut walker = abstraction::Walker::new(Arc::from(file_label));
    walker.compilation_unit(&unit);
    let mut items = walker.items;
    items.sort_by_key(|i| (i.line, i.column));
    let mut markers = walker.markers;
    markers.sort_by_key(|m| (m.line, m.column));
    Ok(Extraction {
        items,
        markers,
        declarations: walker.declarations,
        recoveries: parser.recoveries,
    })
}

/// `ASTParser` -> `aSTParser`: only the first character is lowered.
pub fn lower_camel(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn strip_generics(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

/// Reduces a raw construct text to its identity name.
///
/// Declarations drop the variable identifier; method invocations replace
/// the receiver expression by the lower-camel simple name of
/// `declared_type` (or `unknown` when it is empty).
pub fn normalize_item(kind: ItemKind, raw_name: &str, declared_type: &str) -> String {
    let raw = strip_generics(raw_name.trim());
    let raw = raw.trim().trim_end_matches(';').trim();
    match kind {
        ItemKind::FieldDeclaration | ItemKind::VariableDeclaration => {
            let without_init = raw.split('=').next().unwrap_or(raw).trim();
            let mut words: Vec<&str> = without_init.split_whitespace().collect();
            // drop modifiers
            words.retain(|w| {
                !matches!(
                    *w,
                    "public" | "private" | "protected" | "static" | "final" | "transient" | "volatile"
                )
            });
            match words.as_slice() {
                [ty, _var, ..] => ty.to_string(),
                [only] => only.to_string(),
                [] => raw.to_string(),
            }
        }
        ItemKind::MethodInvocation => {
            let open = raw.find('(').unwrap_or(raw.len());
            let head = &raw[..open];
            let call = match head.rfind('.') {
                Some(dot) => &raw[dot + 1..],
                None => return raw.to_string(),
            };
            let recv = declared_type.trim();
            let recv = if recv.is_empty() {
                "unknown".to_string()
            } else {
                let simple = recv.rsplit('.').next().unwrap_or(recv);
                lower_camel(&strip_generics(simple))
            };
            format!("{recv}.{call}")
        }
        _ => raw.to_string(),
    }
}

/// Debug dump: `KIND<TAB>name<TAB>enclosing<TAB>line`, one item per line.
pub fn dump_items(items: &[SourceItem]) -> String {
    let mut out = String::new();
    for i in items {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", i.kind, i.name, i.enclosing, i.line);
    }
    out
}
