//! The mined pattern repository and its canonical XML form.
//!
//! Writing is done by hand so that bytes are fully determined by the
//! value: UTF-8, LF, two-space indent, fixed attribute order. Reading goes
//! through quick-xml into a small element tree which is then checked
//! against the schema; any deviation is a [`RepositoryError::SchemaViolation`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::escape::{escape, unescape};
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::item::{ItemKey, ItemKind};
use crate::ratio::Ratio;
use crate::sequential::{pattern_order, sort_patterns, SequentialPattern};

pub const DEFAULT_FILE_NAME: &str = "esdp-repo.xml";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepositoryError {
    #[error("SchemaViolation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },
}

fn violation(path: &str, reason: impl Into<String>) -> RepositoryError {
    RepositoryError::SchemaViolation {
        path: path.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinedRepository {
    pub corpus_label: String,
    /// RFC 3339 timestamp.
    pub created_at: String,
    pub min_support_used: u64,
    /// Canonical order, no two with the same element list.
    pub patterns: Vec<SequentialPattern>,
}

impl MinedRepository {
    /// Builds a repository, sorting and de-duplicating `patterns` (the
    /// first of two equal element lists in canonical order wins).
    pub fn new(
        corpus_label: impl Into<String>,
        created_at: impl Into<String>,
        min_support_used: u64,
        mut patterns: Vec<SequentialPattern>,
    ) -> Self {
        sort_patterns(&mut patterns);
        let mut seen = std::collections::HashSet::new();
        patterns.retain(|p| seen.insert(p.elements.clone()));
        MinedRepository {
            corpus_label: corpus_label.into(),
            created_at: created_at.into(),
            min_support_used,
            patterns,
        }
    }

    /// Patterns grouped by the kind of their leading element.
    pub fn by_leading_kind(&self) -> BTreeMap<ItemKind, Vec<&SequentialPattern>> {
        let mut groups: BTreeMap<ItemKind, Vec<&SequentialPattern>> = BTreeMap::new();
        for p in &self.patterns {
            groups.entry(p.elements[0].kind).or_default().push(p);
        }
        groups
    }
}

// ----- writing -------------------------------------------------------------------------

pub fn serialize(repo: &MinedRepository) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<esdp-repository version=\"1\" corpus=\"{}\" created=\"{}\" min-support=\"{}\">",
        escape(repo.corpus_label.as_str()),
        escape(repo.created_at.as_str()),
        repo.min_support_used
    );
    if repo.patterns.is_empty() {
        out.push_str("  <patterns/>\n");
    } else {
        out.push_str("  <patterns>\n");
        for p in &repo.patterns {
            write_pattern(&mut out, p);
        }
        out.push_str("  </patterns>\n");
    }
    out.push_str("</esdp-repository>\n");
    out
}

fn write_pattern(out: &mut String, p: &SequentialPattern) {
    let kind = p.elements[0].kind;
    let _ = writeln!(out, "    <pattern kind=\"{kind}\" k=\"{}\">", p.k());
    let _ = writeln!(
        out,
        "      <support num=\"{}\" den=\"{}\">{}</support>",
        p.support.num,
        p.support.den,
        p.support.display2()
    );
    let _ = writeln!(
        out,
        "      <confidence num=\"{}\" den=\"{}\">{}</confidence>",
        p.confidence.num,
        p.confidence.den,
        p.confidence.display2()
    );
    let _ = writeln!(out, "      <ranking>{}</ranking>", p.ranking().display2());
    out.push_str("      <sequence>\n");
    for (i, e) in p.elements.iter().enumerate() {
        if e.kind == kind {
            let _ = writeln!(out, "        <s i=\"{}\">{}</s>", i + 1, escape(e.name.as_str()));
        } else {
            let _ = writeln!(
                out,
                "        <s i=\"{}\" kind=\"{}\">{}</s>",
                i + 1,
                e.kind,
                escape(e.name.as_str())
            );
        }
    }
    out.push_str("      </sequence>\n");
    out.push_str("    </pattern>\n");
}

// ----- reading -------------------------------------------------------------------------

#[derive(Debug, Default)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
    text: String,
}

fn read_tree(xml: &str) -> Result<Element, RepositoryError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    let malformed = |reader: &Reader<&[u8]>, why: String| {
        violation("/", format!("malformed XML near byte {}: {why}", reader.buffer_position()))
    };
    let open = |e: &quick_xml::events::BytesStart<'_>, reader: &Reader<&[u8]>| -> Result<Element, RepositoryError> {
        let name = e.name().as_ref().to_string();
        let mut attrs = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|err| malformed(reader, err.to_string()))?;
            let key = a.key.as_ref().to_string();
            let value = a.normalized_value(quick_xml::XmlVersion::Implicit1_0).map_err(|err| malformed(reader, err.to_string()))?;
            attrs.push((key, value.into_owned()));
        }
        Ok(Element {
            name,
            attrs,
            ..Element::default()
        })
    };
    loop {
        let event = reader.read_event().map_err(|e| malformed(&reader, e.to_string()))?;
        match event {
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) => {}
            Event::DocType(_) => return Err(violation("/", "DOCTYPE not allowed")),
            Event::Start(e) => {
                if root.is_some() {
                    return Err(violation("/", "content after root element"));
                }
                stack.push(open(&e, &reader)?);
            }
            Event::Empty(e) => {
                let el = open(&e, &reader)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None if root.is_none() => root = Some(el),
                    None => return Err(violation("/", "content after root element")),
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| malformed(&reader, "unmatched end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let text = t.xml10_content();
                match stack.last_mut() {
                    Some(el) => el.text.push_str(&text),
                    None if text.trim().is_empty() => {}
                    None => return Err(violation("/", "text outside root element")),
                }
            }
            Event::CData(t) => {
                let text = t.xml10_content();
                match stack.last_mut() {
                    Some(el) => el.text.push_str(&text),
                    None => return Err(violation("/", "text outside root element")),
                }
            }
            Event::GeneralRef(r) => {
                let raw = format!("&{};", r.xml10_content());
                let text = unescape(&raw).map_err(|e| malformed(&reader, e.to_string()))?;
                match stack.last_mut() {
                    Some(el) => el.text.push_str(&text),
                    None => return Err(violation("/", "text outside root element")),
                }
            }
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(violation("/", "unclosed element"));
    }
    root.ok_or_else(|| violation("/", "no root element"))
}

struct Checker<'e> {
    el: &'e Element,
    path: String,
}

impl<'e> Checker<'e> {
    fn new(el: &'e Element, path: String) -> Self {
        Checker { el, path }
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, RepositoryError> {
        Err(violation(&self.path, reason))
    }

    fn name(&self, expected: &str) -> Result<(), RepositoryError> {
        if self.el.name != expected {
            return self.fail(format!("expected <{expected}>, found <{}>", self.el.name));
        }
        Ok(())
    }

    /// Attributes must be exactly `required` plus any of `optional`.
    fn attrs(&self, required: &[&str], optional: &[&str]) -> Result<(), RepositoryError> {
        let mut seen: Vec<&str> = Vec::new();
        for (k, _) in &self.el.attrs {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                return self.fail(format!("unknown attribute `{k}`"));
            }
            if seen.contains(&k.as_str()) {
                return self.fail(format!("duplicate attribute `{k}`"));
            }
            seen.push(k);
        }
        for r in required {
            if !seen.contains(r) {
                return self.fail(format!("missing attribute `{r}`"));
            }
        }
        Ok(())
    }

    fn attr(&self, key: &str) -> Option<&'e str> {
        self.el.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn number(&self, key: &str) -> Result<u64, RepositoryError> {
        let raw = self.attr(key).unwrap_or_default();
        // canonical decimal only: no sign, no leading zeros, no spaces
        let canonical = !raw.is_empty()
            && raw.bytes().all(|b| b.is_ascii_digit())
            && (raw == "0" || !raw.starts_with('0'));
        match raw.parse::<u64>() {
            Ok(v) if canonical => Ok(v),
            _ => self.fail(format!("attribute `{key}` is not a non-negative integer: `{raw}`")),
        }
    }

    /// Container elements carry no text.
    fn no_text(&self) -> Result<(), RepositoryError> {
        if !self.el.text.trim().is_empty() {
            return self.fail("unexpected text content");
        }
        Ok(())
    }

    /// Leaf elements carry no children.
    fn leaf(&self) -> Result<&'e str, RepositoryError> {
        if let Some(c) = self.el.children.first() {
            return self.fail(format!("unexpected child <{}>", c.name));
        }
        Ok(&self.el.text)
    }

    fn child(&self, i: usize, name: &str) -> Checker<'e> {
        Checker::new(&self.el.children[i], format!("{}/{name}", self.path))
    }
}

fn ratio_element(c: &Checker<'_>) -> Result<Ratio, RepositoryError> {
    c.attrs(&["num", "den"], &[])?;
    let num = c.number("num")?;
    let den = c.number("den")?;
    if den == 0 {
        return c.fail("zero denominator");
    }
    if num > den {
        return c.fail("ratio above 1");
    }
    let r = Ratio::new(num, den);
    let text = c.leaf()?;
    if text != r.display2() {
        return c.fail(format!("display `{text}` does not match {num}/{den} (expected {})", r.display2()));
    }
    Ok(r)
}

fn parse_pattern(c: &Checker<'_>) -> Result<SequentialPattern, RepositoryError> {
    c.name("pattern")?;
    c.attrs(&["kind", "k"], &[])?;
    c.no_text()?;
    let kind: ItemKind = match c.attr("kind").unwrap_or_default().parse() {
        Ok(k) => k,
        Err(e) => return c.fail(e.to_string()),
    };
    let k = c.number("k")?;
    if k == 0 {
        return c.fail("k must be at least 1");
    }
    const ORDER: [&str; 4] = ["support", "confidence", "ranking", "sequence"];
    let names: Vec<&str> = c.el.children.iter().map(|e| e.name.as_str()).collect();
    if names != ORDER {
        return c.fail(format!("children must be {ORDER:?}, found {names:?}"));
    }
    let support = ratio_element(&c.child(0, "support"))?;
    if support.num == 0 {
        return c.child(0, "support").fail("support count must be positive");
    }
    let confidence = ratio_element(&c.child(1, "confidence"))?;
    if confidence.num != support.num {
        return c
            .child(1, "confidence")
            .fail("confidence numerator must equal the support count");
    }
    let seq = c.child(3, "sequence");
    seq.attrs(&[], &[])?;
    seq.no_text()?;
    if seq.el.children.len() as u64 != k {
        return seq.fail(format!("{} elements but k={k}", seq.el.children.len()));
    }
    let mut elements = Vec::with_capacity(k as usize);
    for (i, s) in seq.el.children.iter().enumerate() {
        let sc = Checker::new(s, format!("{}/s[{}]", seq.path, i + 1));
        sc.name("s")?;
        sc.attrs(&["i"], &["kind"])?;
        if sc.number("i")? != i as u64 + 1 {
            return sc.fail(format!("index must be {}", i + 1));
        }
        let item_kind = match sc.attr("kind") {
            None => kind,
            Some(raw) => match raw.parse::<ItemKind>() {
                Ok(kk) if kk != kind => kk,
                Ok(_) => return sc.fail("redundant kind attribute"),
                Err(e) => return sc.fail(e.to_string()),
            },
        };
        if i == 0 && item_kind != kind {
            return sc.fail("first element must have the pattern kind");
        }
        let name = sc.leaf()?;
        if name.is_empty() || name.trim() != name {
            return sc.fail("element name must be non-empty without surrounding whitespace");
        }
        elements.push(ItemKey::new(item_kind, name));
    }
    let pattern = SequentialPattern {
        elements,
        support,
        confidence,
    };
    let ranking = c.child(2, "ranking");
    ranking.attrs(&[], &[])?;
    let text = ranking.leaf()?;
    if text != pattern.ranking().display2() {
        return ranking.fail(format!(
            "ranking `{text}` does not equal k × support ({})",
            pattern.ranking().display2()
        ));
    }
    Ok(pattern)
}

/// Parses and validates a repository document.
pub fn parse(xml: &str) -> Result<MinedRepository, RepositoryError> {
    let root = read_tree(xml)?;
    let c = Checker::new(&root, "/esdp-repository".to_string());
    c.name("esdp-repository")?;
    c.attrs(&["version", "corpus", "created", "min-support"], &[])?;
    c.no_text()?;
    if c.attr("version") != Some("1") {
        return c.fail(format!("unsupported version `{}`", c.attr("version").unwrap_or_default()));
    }
    let created = c.attr("created").unwrap_or_default();
    if chrono::DateTime::parse_from_rfc3339(created).is_err() {
        return c.fail(format!("`created` is not an RFC 3339 timestamp: `{created}`"));
    }
    let min_support = c.number("min-support")?;
    if min_support == 0 {
        return c.fail("min-support must be at least 1");
    }
    if c.el.children.len() != 1 {
        return c.fail("expected exactly one <patterns> child");
    }
    let pc = c.child(0, "patterns");
    pc.name("patterns")?;
    pc.attrs(&[], &[])?;
    pc.no_text()?;
    let mut patterns: Vec<SequentialPattern> = Vec::with_capacity(pc.el.children.len());
    for (i, el) in pc.el.children.iter().enumerate() {
        let pat_c = Checker::new(el, format!("{}/pattern[{}]", pc.path, i + 1));
        let p = parse_pattern(&pat_c)?;
        if let Some(prev) = patterns.last() {
            match pattern_order(prev, &p) {
                Ordering::Less => {}
                Ordering::Equal => return pat_c.fail("duplicate pattern"),
                Ordering::Greater => return pat_c.fail("patterns out of canonical order"),
            }
        }
        patterns.push(p);
    }
    let mut seen = std::collections::HashSet::new();
    for (i, p) in patterns.iter().enumerate() {
        if !seen.insert(&p.elements) {
            return Err(violation(
                &format!("{}/pattern[{}]", pc.path, i + 1),
                "duplicate element list",
            ));
        }
    }
    Ok(MinedRepository {
        corpus_label: c.attr("corpus").unwrap_or_default().to_string(),
        created_at: created.to_string(),
        min_support_used: min_support,
        patterns,
    })
}

// ----- updating ------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    /// Fresh scores win, new patterns are added, nothing is removed.
    Incremental,
    /// The fresh set replaces the old one entirely.
    Replace,
}

/// Produces the updated repository; `existing` is left untouched.
pub fn merge_update(existing: &MinedRepository, fresh: &[SequentialPattern], mode: MergeMode) -> MinedRepository {
    let patterns = match mode {
        MergeMode::Replace => fresh.to_vec(),
        MergeMode::Incremental => {
            let mut by_elements: BTreeMap<Vec<ItemKey>, SequentialPattern> = existing
                .patterns
                .iter()
                .map(|p| (p.elements.clone(), p.clone()))
                .collect();
            for p in fresh {
                by_elements.insert(p.elements.clone(), p.clone());
            }
            by_elements.into_values().collect()
        }
    };
    MinedRepository::new(
        existing.corpus_label.clone(),
        existing.created_at.clone(),
        existing.min_support_used,
        patterns,
    )
}
