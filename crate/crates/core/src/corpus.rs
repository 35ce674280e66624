//! Corpus discovery and parallel extraction.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::extractor::{extract_items, ExtractError, Extraction};
use crate::item::SourceItem;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug)]
pub struct FileExtraction {
    /// Path relative to the corpus root it was found under.
    pub label: String,
    pub path: PathBuf,
    pub extraction: Extraction,
}

#[derive(Debug, Default)]
pub struct CorpusExtraction {
    /// Sorted by label.
    pub files: Vec<FileExtraction>,
    /// Files that failed to lex or had unbalanced brackets.
    pub failures: Vec<(PathBuf, ExtractError)>,
}

impl CorpusExtraction {
    pub fn items(&self) -> Vec<SourceItem> {
        self.files
            .iter()
            .flat_map(|f| f.extraction.items.iter().cloned())
            .collect()
    }
}

/// Source files under `roots` whose extension is `extension` (without the
/// dot), sorted by path. A root may itself be a file.
pub fn discover(roots: &[PathBuf], extension: &str) -> Result<Vec<(PathBuf, String)>, CorpusError> {
    let mut found = Vec::new();
    for root in roots {
        for entry in walkdir::WalkDir::new(root).follow_links(true).sort_by_file_name() {
            let entry = entry.map_err(|e| CorpusError::Io {
                path: e.path().map(Path::to_path_buf).unwrap_or_else(|| root.clone()),
                source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("filesystem loop")),
            })?;
            let path = entry.path();
            if entry.file_type().is_file() && path.extension().is_some_and(|e| e == extension) {
                let rel = path.strip_prefix(root).unwrap_or(path);
                let rel = if rel.as_os_str().is_empty() {
                    path.file_name().map(Path::new).unwrap_or(path)
                } else {
                    rel
                };
                let label = rel.to_string_lossy().replace('\\', "/");
                found.push((path.to_path_buf(), label));
            }
        }
    }
    found.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(found)
}

/// Extracts every discovered file in parallel; output order does not
/// depend on scheduling.
pub fn extract_corpus(roots: &[PathBuf], extension: &str) -> Result<CorpusExtraction, CorpusError> {
    let files = discover(roots, extension)?;
    let results: Vec<_> = files
        .into_par_iter()
        .map(|(path, label)| {
            let bytes = std::fs::read(&path).map_err(|source| CorpusError::Io {
                path: path.clone(),
                source,
            })?;
            let text = String::from_utf8_lossy(&bytes);
            Ok::<_, CorpusError>((path, label.clone(), extract_items(&text, &label)))
        })
        .collect::<Result<_, _>>()?;
    let mut out = CorpusExtraction::default();
    for (path, label, result) in results {
        match result {
            Ok(extraction) => out.files.push(FileExtraction {
                label,
                path,
                extraction,
            }),
            Err(e) => out.failures.push((path, e)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discovers_sorted_and_filters_extension() {
        let dir = std::env::temp_dir().join(format!("esdp-corpus-{}", std::process::id()));
        std::fs::create_dir_all(dir.join("b")).unwrap();
        std::fs::write(dir.join("b/Z.java"), "class Z { void m() { foo(); } }").unwrap();
        std::fs::write(dir.join("A.java"), "class A { }").unwrap();
        std::fs::write(dir.join("notes.txt"), "x").unwrap();
        std::fs::write(dir.join("Bad.java"), "class Bad {").unwrap();
        let c = extract_corpus(std::slice::from_ref(&dir), "java").unwrap();
        let labels: Vec<_> = c.files.iter().map(|f| f.label.as_str()).collect();
        assert_eq!(labels, ["A.java", "b/Z.java"]);
        assert_eq!(c.failures.len(), 1);
        assert!(c.items().iter().any(|i| i.name == "foo()"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
