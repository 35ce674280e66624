//! Command dispatch for the `esdp` binary. Kept in a library so the
//! integration tests can drive it without a subprocess when convenient.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use esdp_core::corpus::{extract_corpus, CorpusExtraction};
use esdp_core::eval::{evaluate, parse_gold};
use esdp_core::extractor::dump_items;
use esdp_core::groum::{groums_of, patt_explorer};
use esdp_core::query::{render_skeleton, Recommendation};
use esdp_core::repository::{self, DEFAULT_FILE_NAME};
use esdp_core::sequential::adaptive_mine;
use esdp_core::transaction::transactions_to_xml;
use esdp_core::{
    abstract_query, build_sequence_db, build_transactions, merge_update, mine_prefixspan, search, Granularity,
    MergeMode, MinedRepository, QueryContext,
};

#[derive(Debug, Parser)]
#[command(name = "esdp", version, about = "Mine API usage patterns from Java sources and recommend what comes next")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the abstracted item stream of source files.
    Extract(ExtractArgs),
    /// Mine sequential patterns and write the repository.
    Mine(MineArgs),
    /// Re-mine a corpus and merge the result into an existing repository.
    Update(UpdateArgs),
    /// Rank patterns for one typed statement and print a code skeleton.
    Query(QueryArgs),
    /// Build usage graphs per method and mine frequent subgraphs.
    Groum(GroumArgs),
    /// Score a repository against a gold file.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransactionLevel {
    Method,
    Class,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Source directories or files.
    #[arg(long = "corpus", required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// Source file extension.
    #[arg(long, default_value = "java")]
    pub ext: String,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long, default_value = "java")]
    pub ext: String,
    /// Print the transaction document at this granularity instead.
    #[arg(long, value_enum)]
    pub transactions: Option<TransactionLevel>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 2)]
    pub min_support: u64,
    /// Choose the smallest min-support that yields at most this many
    /// patterns (overrides --min-support).
    #[arg(long)]
    pub max_patterns: Option<usize>,
    #[arg(long, env = "ESDP_REPO", default_value = DEFAULT_FILE_NAME)]
    pub repo: PathBuf,
    /// RFC 3339 creation time; defaults to SOURCE_DATE_EPOCH, then now.
    #[arg(long)]
    pub created: Option<String>,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Defaults to the threshold recorded in the repository.
    #[arg(long)]
    pub min_support: Option<u64>,
    #[arg(long, env = "ESDP_REPO", default_value = DEFAULT_FILE_NAME)]
    pub repo: PathBuf,
    /// Drop patterns the fresh mine no longer finds.
    #[arg(long)]
    pub replace: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// One Java statement, e.g. `parser = ASTParser.newParser(AST.JLS3);`.
    pub statement: String,
    #[arg(long, env = "ESDP_REPO", default_value = DEFAULT_FILE_NAME)]
    pub repo: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    /// Variable in scope, as `name:Type`.
    #[arg(long = "var", value_parser = parse_var)]
    pub vars: Vec<(String, String)>,
    /// Import in scope, e.g. `java.io.File`.
    #[arg(long = "import")]
    pub imports: Vec<String>,
    #[arg(long = "class")]
    pub class_name: Option<String>,
    #[arg(long = "method")]
    pub method_name: Option<String>,
    /// Recommendation to expand (1-based); prompts when interactive.
    #[arg(long)]
    pub pick: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Print wall-clock time of the query.
    #[arg(long)]
    pub time: bool,
}

#[derive(Debug, Args)]
pub struct GroumArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 2)]
    pub sigma: u64,
    /// Largest pattern size to grow to.
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    /// Also dump every method graph.
    #[arg(long)]
    pub graphs: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, env = "ESDP_REPO", default_value = DEFAULT_FILE_NAME)]
    pub repo: PathBuf,
    /// Lines of `statement<TAB>KIND:name<TAB>...`.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20, 25, 30])]
    pub top: Vec<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Also print ROC points.
    #[arg(long)]
    pub roc: bool,
}

fn parse_var(s: &str) -> Result<(String, String), String> {
    match s.split_once(':') {
        Some((n, t)) if !n.trim().is_empty() && !t.trim().is_empty() => {
            Ok((n.trim().to_string(), t.trim().to_string()))
        }
        _ => Err(format!("expected name:Type, got `{s}`")),
    }
}

/// Parses `args` and runs the command. Returns the process exit status:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, input: &mut dyn BufRead, interactive: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out, input, interactive) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write, input: &mut dyn BufRead, interactive: bool) -> Result<()> {
    match command {
        Command::Extract(a) => extract(a, out),
        Command::Mine(a) => mine(a, out),
        Command::Update(a) => update(a, out),
        Command::Query(a) => query(a, out, input, interactive),
        Command::Groum(a) => groum(a, out),
        Command::Eval(a) => eval(a, out),
    }
}

fn load_corpus(roots: &[PathBuf], ext: &str) -> Result<CorpusExtraction> {
    let corpus = extract_corpus(roots, ext)?;
    for (path, err) in &corpus.failures {
        eprintln!("skipped {}: {err}", path.display());
    }
    if corpus.files.is_empty() {
        bail!("no .{ext} files could be read under the given corpus paths");
    }
    Ok(corpus)
}

fn corpus_label(roots: &[PathBuf]) -> String {
    roots
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn extract(a: ExtractArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&a.paths, &a.ext)?;
    if let Some(level) = a.transactions {
        let granularity = match level {
            TransactionLevel::Method => Granularity::Method,
            TransactionLevel::Class => Granularity::Class,
        };
        let records = build_transactions(&corpus.items(), granularity);
        out.write_all(transactions_to_xml(&corpus_label(&a.paths), &records).as_bytes())?;
        return Ok(());
    }
    match a.format {
        Format::Text => {
            for f in &corpus.files {
                writeln!(out, "# {}", f.label)?;
                out.write_all(dump_items(&f.extraction.items).as_bytes())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["file", "kind", "name", "enclosing", "line"])?;
            for f in &corpus.files {
                for i in &f.extraction.items {
                    w.write_record([
                        f.label.as_str(),
                        i.kind.code(),
                        &i.name,
                        &i.enclosing.to_string(),
                        &i.line.to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn created_stamp(explicit: Option<String>) -> Result<String> {
    use chrono::{DateTime, SecondsFormat, Utc};
    if let Some(c) = explicit {
        DateTime::parse_from_rfc3339(&c).with_context(|| format!("--created `{c}` is not an RFC 3339 timestamp"))?;
        return Ok(c);
    }
    if let Ok(raw) = std::env::var("SOURCE_DATE_EPOCH") {
        let secs: i64 = raw.trim().parse().with_context(|| format!("SOURCE_DATE_EPOCH `{raw}`"))?;
        let t = DateTime::from_timestamp(secs, 0).context("SOURCE_DATE_EPOCH out of range")?;
        return Ok(t.to_rfc3339_opts(SecondsFormat::Secs, true));
    }
    Ok(Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true))
}

fn write_repo(path: &Path, repo: &MinedRepository) -> Result<()> {
    let tmp = path.with_extension("xml.tmp");
    std::fs::write(&tmp, repository::serialize(repo)).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_repo(path: &Path) -> Result<MinedRepository> {
    let xml = std::fs::read_to_string(path).with_context(|| format!("reading repository {}", path.display()))?;
    Ok(repository::parse(&xml)?)
}

fn mine(a: MineArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&a.corpus.corpus, &a.corpus.ext)?;
    let label = corpus_label(&a.corpus.corpus);
    let db = build_sequence_db(&corpus.items(), &label);
    let (patterns, min_support, truncated) = match a.max_patterns {
        Some(max) => {
            let r = adaptive_mine(&db, max);
            (r.patterns, r.min_support_used, r.truncated)
        }
        None => (mine_prefixspan(&db, a.min_support)?, a.min_support, false),
    };
    let repo = MinedRepository::new(label, created_stamp(a.created)?, min_support, patterns);
    write_repo(&a.repo, &repo)?;
    writeln!(
        out,
        "{} patterns from {} method blocks (min-support {min_support}{}) written to {}",
        repo.patterns.len(),
        db.len(),
        if truncated { ", truncated" } else { "" },
        a.repo.display()
    )?;
    Ok(())
}

fn update(a: UpdateArgs, out: &mut dyn Write) -> Result<()> {
    let existing = read_repo(&a.repo)?;
    let corpus = load_corpus(&a.corpus.corpus, &a.corpus.ext)?;
    let db = build_sequence_db(&corpus.items(), &existing.corpus_label);
    let min = a.min_support.unwrap_or(existing.min_support_used);
    let fresh = mine_prefixspan(&db, min)?;
    let mode = if a.replace {
        MergeMode::Replace
    } else {
        MergeMode::Incremental
    };
    let merged = merge_update(&existing, &fresh, mode);
    write_repo(&a.repo, &merged)?;
    writeln!(
        out,
        "{} -> {} patterns ({} freshly mined) in {}",
        existing.patterns.len(),
        merged.patterns.len(),
        fresh.len(),
        a.repo.display()
    )?;
    Ok(())
}

fn preview(r: &Recommendation) -> String {
    let mut names: Vec<String> = r.pattern.elements.iter().take(3).map(|e| e.to_string()).collect();
    if r.pattern.k() > 3 {
        names.push("...".into());
    }
    names.join(" ; ")
}

fn query(a: QueryArgs, out: &mut dyn Write, input: &mut dyn BufRead, interactive: bool) -> Result<()> {
    let start = Instant::now();
    let repo = read_repo(&a.repo)?;
    let ctx = QueryContext {
        class_name: a.class_name,
        method_name: a.method_name,
        vars: a.vars,
        imports: a.imports,
    };
    let q = abstract_query(&a.statement, &ctx)?;
    let recs = search(&q, &repo, a.top);
    let elapsed = start.elapsed();

    if a.format == Format::Csv {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(["rank", "k", "support", "confidence", "ranking", "match", "elements"])?;
        for (i, r) in recs.iter().enumerate() {
            let elements: Vec<String> = r.pattern.elements.iter().map(|e| e.to_string()).collect();
            w.write_record([
                (i + 1).to_string(),
                r.pattern.k().to_string(),
                r.pattern.support.display2(),
                r.pattern.confidence.display2(),
                r.score.display2(),
                format!("{:?}", r.tier).to_lowercase(),
                elements.join(" ; "),
            ])?;
        }
        w.flush()?;
        drop(w);
        if a.time {
            writeln!(out, "# query time {:.1} ms", elapsed.as_secs_f64() * 1e3)?;
        }
        return Ok(());
    }

    writeln!(out, "query item: {}", q.item)?;
    if recs.is_empty() {
        writeln!(out, "no recommendations")?;
    } else {
        writeln!(out, "rank  k  support  confidence  ranking  match       elements")?;
        for (i, r) in recs.iter().enumerate() {
            writeln!(
                out,
                "{:>4}  {}  {:>7}  {:>10}  {:>7}  {:<10}  {}",
                i + 1,
                r.pattern.k(),
                r.pattern.support.display2(),
                r.pattern.confidence.display2(),
                r.score.display2(),
                format!("{:?}", r.tier).to_lowercase(),
                preview(r)
            )?;
        }
        let pick = match a.pick {
            Some(p) => p,
            None if interactive => prompt(out, input, recs.len())?,
            None => 1,
        };
        if pick == 0 || pick > recs.len() {
            bail!("selection {pick} out of range 1..{}", recs.len());
        }
        let skeleton = render_skeleton(&recs[pick - 1], &q);
        writeln!(out)?;
        write!(out, "{}", skeleton.to_text())?;
    }
    if a.time {
        writeln!(out, "query time {:.1} ms", elapsed.as_secs_f64() * 1e3)?;
    }
    Ok(())
}

fn prompt(out: &mut dyn Write, input: &mut dyn BufRead, n: usize) -> Result<usize> {
    write!(out, "select 1..{n} [1]: ")?;
    out.flush()?;
    let mut line = String::new();
    input.read_line(&mut line)?;
    let line = line.trim();
    if line.is_empty() {
        return Ok(1);
    }
    line.parse().with_context(|| format!("`{line}` is not a number"))
}

fn groum(a: GroumArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&a.corpus.corpus, &a.corpus.ext)?;
    let mut dataset = Vec::new();
    for f in &corpus.files {
        match groums_of(&f.extraction) {
            Ok(gs) => dataset.extend(gs.into_iter().filter(|g| !g.is_empty())),
            Err(e) => eprintln!("skipped {}: {e}", f.label),
        }
    }
    if a.graphs {
        for g in &dataset {
            writeln!(out, "graph {}", g.origin)?;
            write!(out, "{}", g.to_text())?;
            writeln!(out)?;
        }
    }
    let patterns = patt_explorer(&dataset, a.sigma, Some(a.max_size))?;
    writeln!(out, "{} graphs, {} patterns (sigma {})", dataset.len(), patterns.len(), a.sigma)?;
    for (i, p) in patterns.iter().enumerate() {
        writeln!(out)?;
        writeln!(
            out,
            "pattern {} size {} frequency {}{}",
            i + 1,
            p.size(),
            p.frequency,
            if p.lower_bound { " (lower bound)" } else { "" }
        )?;
        write!(out, "{}", p.representative.to_text())?;
    }
    Ok(())
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let repo = read_repo(&a.repo)?;
    let text = std::fs::read_to_string(&a.gold).with_context(|| format!("reading gold file {}", a.gold.display()))?;
    let gold = parse_gold(&text)?;
    let report = evaluate(&gold, &repo, &a.top);
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "precision", "recall", "queries"])?;
            for row in &report.top_n {
                w.write_record([
                    row.n.to_string(),
                    format!("{:.4}", row.precision),
                    format!("{:.4}", row.recall),
                    row.queries.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "{} queries against {} patterns", gold.len(), repo.patterns.len())?;
            for qe in &report.queries {
                let item = qe.abstracted.as_ref().map(|i| i.to_string()).unwrap_or_else(|| "unparsable".into());
                let relevant = qe.ranked.iter().filter(|r| r.1).count();
                writeln!(out, "  {} -> {item}: {relevant}/{} relevant", qe.statement, qe.ranked.len())?;
            }
            writeln!(out, "top-N  precision  recall  queries")?;
            for row in &report.top_n {
                writeln!(
                    out,
                    "{:>5}  {:>9.4}  {:>6.4}  {:>7}",
                    row.n, row.precision, row.recall, row.queries
                )?;
            }
            match report.auc {
                Some(auc) => writeln!(out, "AUC {auc:.4}")?,
                None => writeln!(out, "AUC undefined (all judged recommendations share one label)")?,
            }
        }
    }
    if a.roc {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(["fpr", "tpr"])?;
        for p in &report.roc {
            w.write_record([format!("{:.4}", p.fpr.to_f64()), format!("{:.4}", p.tpr.to_f64())])?;
        }
        w.flush()?;
    }
    Ok(())
}
