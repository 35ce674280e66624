//! Grouping of item streams into transactions and sequences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::item::{BlockPath, ItemKey, SourceItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Class,
    Method,
}

/// The unordered set of items used together in one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionRecord {
    pub block_id: String,
    pub items: BTreeSet<ItemKey>,
}

/// The line-ordered items of one method block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub sid: String,
    pub items: Vec<ItemKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequenceDatabase {
    pub records: Vec<SequenceRecord>,
    pub corpus_label: String,
}

impl SequenceDatabase {
    pub fn new(corpus_label: impl Into<String>, records: Vec<SequenceRecord>) -> Self {
        SequenceDatabase {
            records,
            corpus_label: corpus_label.into(),
        }
    }

    /// Convenience for tests and benches: one record per item list, with
    /// generated sids.
    pub fn from_sequences<I>(corpus_label: &str, seqs: I) -> Self
    where
        I: IntoIterator<Item = Vec<ItemKey>>,
    {
        let records = seqs
            .into_iter()
            .enumerate()
            .map(|(i, items)| SequenceRecord {
                sid: format!("s{i:04}"),
                items,
            })
            .collect();
        SequenceDatabase::new(corpus_label, records)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Sort items of one group into source order.
fn line_ordered(mut items: Vec<&SourceItem>) -> Vec<&SourceItem> {
    items.sort_by_key(|i| (i.line, i.column));
    items
}

/// Builds one transaction per block with at least one item.
///
/// At class granularity every item of a class (including its methods'
/// bodies) joins the class record, and the file's package and import
/// items join every class of that file. At method granularity only method
/// blocks count, headed by their declaration.
pub fn build_transactions(items: &[SourceItem], granularity: Granularity) -> Vec<TransactionRecord> {
    let mut blocks: BTreeMap<String, BTreeSet<ItemKey>> = BTreeMap::new();
    match granularity {
        // same block ids as the sequence database, order forgotten
        Granularity::Method => {
            for r in build_sequence_db(items, "").records {
                blocks.insert(r.sid, r.items.into_iter().collect());
            }
        }
        Granularity::Class => {
            let mut file_level: BTreeMap<&Arc<str>, Vec<ItemKey>> = BTreeMap::new();
            let mut classes_of_file: BTreeMap<&Arc<str>, BTreeSet<String>> = BTreeMap::new();
            for i in items {
                match &i.enclosing {
                    BlockPath::File(_) => file_level.entry(&i.file).or_default().push(i.key()),
                    other => {
                        let class = other.class_path().to_string();
                        classes_of_file.entry(&i.file).or_default().insert(class.clone());
                        blocks.entry(class).or_default().insert(i.key());
                    }
                }
            }
            for (file, keys) in file_level {
                match classes_of_file.get(file) {
                    Some(classes) => {
                        for c in classes {
                            blocks.get_mut(c).expect("class block").extend(keys.iter().cloned());
                        }
                    }
                    // a file with imports but no class still forms a block
                    None => {
                        blocks.entry(file.to_string()).or_default().extend(keys);
                    }
                }
            }
        }
    }
    blocks
        .into_iter()
        .map(|(block_id, items)| TransactionRecord { block_id, items })
        .collect()
}

/// Builds the sequence database: one record per method block in line
/// order, duplicates kept. When the same method path occurs in several
/// files, later files get a `#n` suffix so sids stay unique.
pub fn build_sequence_db(items: &[SourceItem], corpus_label: &str) -> SequenceDatabase {
    let mut groups: BTreeMap<(String, Arc<str>), Vec<&SourceItem>> = BTreeMap::new();
    for i in items {
        if i.enclosing.is_method() {
            groups
                .entry((i.enclosing.to_string(), i.file.clone()))
                .or_default()
                .push(i);
        }
    }
    let mut records = Vec::with_capacity(groups.len());
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for ((path, _file), group) in groups {
        let n = seen.entry(path.clone()).or_insert(0);
        *n += 1;
        let sid = if *n == 1 { path } else { format!("{path}#{n}") };
        records.push(SequenceRecord {
            sid,
            items: line_ordered(group).into_iter().map(SourceItem::key).collect(),
        });
    }
    records.sort_by(|a, b| a.sid.cmp(&b.sid));
    SequenceDatabase::new(corpus_label, records)
}

/// The persisted transaction document.
pub fn transactions_to_xml(corpus_label: &str, records: &[TransactionRecord]) -> String {
    use quick_xml::escape::escape;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if records.is_empty() {
        let _ = writeln!(out, "<esdp-transactions corpus=\"{}\"/>", escape(corpus_label));
        return out;
    }
    let _ = writeln!(out, "<esdp-transactions corpus=\"{}\">", escape(corpus_label));
    for r in records {
        let _ = writeln!(out, "  <transaction block=\"{}\">", escape(r.block_id.as_str()));
        for k in &r.items {
            let _ = writeln!(out, "    <item kind=\"{}\">{}</item>", k.kind, escape(k.name.as_str()));
        }
        out.push_str("  </transaction>\n");
    }
    out.push_str("</esdp-transactions>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::extract_items;

    fn items(src: &str, file: &str) -> Vec<SourceItem> {
        extract_items(src, file).unwrap().items
    }

    const TWO_METHODS: &str = "package pkg;\nimport java.io.File;\nclass Cls {\n  File f;\n  void m1() {\n    f.delete();\n  }\n  void m2() {\n    f.exists();\n    f.exists();\n  }\n}\n";

    #[test]
    fn two_methods_two_records() {
        let t = build_transactions(&items(TWO_METHODS, "Cls.java"), Granularity::Method);
        let ids: Vec<_> = t.iter().map(|r| r.block_id.as_str()).collect();
        assert_eq!(ids, ["pkg.Cls.m1()", "pkg.Cls.m2()"]);
        let m1: Vec<String> = t[0].items.iter().map(|k| k.to_string()).collect();
        assert_eq!(m1, ["MD:m1(): void", "MI:file.delete()"]);
        // duplicates collapse in the set form
        assert_eq!(t[1].items.len(), 2);
    }

    #[test]
    fn class_records_include_file_level_items() {
        let t = build_transactions(&items(TWO_METHODS, "Cls.java"), Granularity::Class);
        assert_eq!(t.len(), 1);
        let keys: Vec<String> = t[0].items.iter().map(|k| k.to_string()).collect();
        for want in ["PD:pkg", "ID:java.io.File", "FD:java.io.File", "TD:pkg.Cls", "MD:m2(): void"] {
            assert!(keys.contains(&want.to_string()), "{want} missing in {keys:?}");
        }
    }

    #[test]
    fn sequences_keep_duplicates_and_order() {
        let db = build_sequence_db(&items(TWO_METHODS, "Cls.java"), "c");
        assert_eq!(db.len(), 2);
        let m2: Vec<String> = db.records[1].items.iter().map(|k| k.to_string()).collect();
        assert_eq!(m2, ["MD:m2(): void", "MI:file.exists()", "MI:file.exists()"]);
    }

    #[test]
    fn empty_input() {
        assert!(build_transactions(&[], Granularity::Class).is_empty());
        assert!(build_sequence_db(&[], "x").is_empty());
    }

    #[test]
    fn same_path_in_two_files_gets_distinct_sids() {
        let src = "class A { void m() { foo(); } }";
        let mut all = items(src, "a/A.java");
        all.extend(items(src, "b/A.java"));
        let db = build_sequence_db(&all, "c");
        let sids: Vec<_> = db.records.iter().map(|r| r.sid.as_str()).collect();
        assert_eq!(sids, ["A.m()", "A.m()#2"]);
    }

    #[test]
    fn xml_form() {
        let t = build_transactions(&items(TWO_METHODS, "Cls.java"), Granularity::Method);
        let xml = transactions_to_xml("corpus", &t);
        assert!(xml.contains("<transaction block=\"pkg.Cls.m1()\">"));
        assert!(xml.contains("<item kind=\"MI\">file.delete()</item>"));
        assert!(transactions_to_xml("c", &[]).contains("<esdp-transactions corpus=\"c\"/>"));
    }
}
