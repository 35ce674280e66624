//! Single-statement queries against a mined repository.
//!
//! A query statement is abstracted with exactly the same walker as the
//! corpus (it is wrapped in a synthetic class), so query items and pattern
//! elements share one identity space.

use std::fmt::Write as _;

use crate::extractor::{extract_items, lexer::is_keyword, lower_camel, ExtractError};
use crate::item::{BlockPath, ItemKey, ItemKind};
use crate::ratio::Ratio;
use crate::repository::MinedRepository;
use crate::sequential::SequentialPattern;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("UnparsableQuery near `{token}`")]
    UnparsableQuery { token: String },
}

/// What the user's editor knows around the typed statement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryContext {
    pub class_name: Option<String>,
    pub method_name: Option<String>,
    /// Variable name and declared type, in declaration order.
    pub vars: Vec<(String, String)>,
    pub imports: Vec<String>,
}

impl QueryContext {
    pub fn with_var(mut self, name: &str, ty: &str) -> Self {
        self.vars.push((name.to_string(), ty.to_string()));
        self
    }

    pub fn with_import(mut self, path: &str) -> Self {
        self.imports.push(path.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserQuery {
    pub raw_statement: String,
    pub item: ItemKey,
    /// The caller's context plus variables the statement itself declares.
    pub context: QueryContext,
}

fn first_token(s: &str) -> String {
    s.split_whitespace().next().unwrap_or_default().to_string()
}

/// Source with the statement placed either in a method body or directly
/// in the class body; returns the source and the statement's first line.
fn wrap_query(statement: &str, ctx: &QueryContext, as_member: bool) -> (String, u32) {
    let mut src = String::new();
    let mut line = 1u32;
    for imp in &ctx.imports {
        let _ = writeln!(src, "import {imp};");
        line += 1;
    }
    let class = ctx.class_name.as_deref().unwrap_or("Query");
    let _ = writeln!(src, "class {class} {{");
    line += 1;
    for (name, ty) in &ctx.vars {
        let _ = writeln!(src, "  {ty} {name};");
        line += 1;
    }
    if as_member {
        let _ = writeln!(src, "{statement}");
        src.push_str("}\n");
    } else {
        let method = ctx.method_name.as_deref().unwrap_or("query");
        let _ = writeln!(src, "  void {method}() {{");
        line += 1;
        let _ = writeln!(src, "{statement}");
        src.push_str("  }\n}\n");
    }
    (src, line)
}

/// Abstracts one typed statement into a query item.
///
/// The first item on the statement's lines is the query, except that a
/// local declaration whose initializer yields further items defers to the
/// next item (`ASTParser p = ASTParser.newParser(..)` queries the call).
/// Variables the statement declares are added to the returned context.
pub fn abstract_query(statement: &str, ctx: &QueryContext) -> Result<UserQuery, QueryError> {
    let trimmed = statement.trim();
    if trimmed.is_empty() {
        return Err(QueryError::UnparsableQuery { token: String::new() });
    }
    let mut text = trimmed.to_string();
    if !text.ends_with(';') && !text.ends_with('}') {
        text.push(';');
    }
    let n_lines = text.lines().count().max(1) as u32;
    let mut last_error = QueryError::UnparsableQuery {
        token: first_token(trimmed),
    };
    for as_member in [false, true] {
        let (src, first_line) = wrap_query(&text, ctx, as_member);
        let extraction = match extract_items(&src, "<query>") {
            Ok(e) => e,
            Err(ExtractError::UnparsableSource { message, .. }) => {
                last_error = QueryError::UnparsableQuery { token: message };
                continue;
            }
        };
        let on_statement = |line: u32| line >= first_line && line < first_line + n_lines;
        if let Some(r) = extraction.recoveries.iter().find(|r| on_statement(r.line)) {
            last_error = QueryError::UnparsableQuery { token: r.token.clone() };
            continue;
        }
        let items: Vec<_> = extraction.items.iter().filter(|i| on_statement(i.line)).collect();
        let Some(first) = items.first() else {
            continue;
        };
        let chosen = if first.kind == ItemKind::VariableDeclaration && items.len() > 1 {
            items[1]
        } else {
            first
        };
        let mut context = ctx.clone();
        for d in extraction.declarations.iter().filter(|d| on_statement(d.line)) {
            if !context.vars.iter().any(|(n, _)| n == &d.name) {
                context.vars.push((d.name.clone(), d.type_name.clone()));
            }
        }
        return Ok(UserQuery {
            raw_statement: trimmed.to_string(),
            item: chosen.key(),
            context,
        });
    }
    Err(last_error)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchTier {
    /// The query item is the pattern's first element.
    Antecedent,
    /// The query item occurs somewhere in the pattern.
    Contains,
    /// A same-kind element's name contains the query name.
    Substring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommendation {
    pub pattern: SequentialPattern,
    pub match_offset: usize,
    pub score: Ratio,
    pub tier: MatchTier,
}

type Matcher<'a> = &'a dyn Fn(&SequentialPattern) -> Option<usize>;

/// Ranked recommendations: antecedent matches first, then containment,
/// then name-substring matches, each tier in repository (ranking) order.
pub fn search(q: &UserQuery, repo: &MinedRepository, top_n: usize) -> Vec<Recommendation> {
    let mut out: Vec<Recommendation> = Vec::new();
    let mut taken = vec![false; repo.patterns.len()];
    let tiers: [(MatchTier, Matcher); 3] = [
        (MatchTier::Antecedent, &|p| (p.elements[0] == q.item).then_some(0)),
        (MatchTier::Contains, &|p| p.elements.iter().position(|e| *e == q.item)),
        (MatchTier::Substring, &|p| {
            p.elements
                .iter()
                .position(|e| e.kind == q.item.kind && e.name.contains(q.item.name.as_str()))
        }),
    ];
    for (tier, matcher) in tiers {
        for (i, p) in repo.patterns.iter().enumerate() {
            if out.len() >= top_n {
                return out;
            }
            if taken[i] {
                continue;
            }
            if let Some(offset) = matcher(p) {
                taken[i] = true;
                out.push(Recommendation {
                    pattern: p.clone(),
                    match_offset: offset,
                    score: p.ranking(),
                    tier,
                });
            }
        }
    }
    out
}

// ----- skeletons ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// A statement in the method body.
    Statement,
    /// A member of the enclosing class.
    Member,
    /// A file header line (imports).
    Header,
    /// Not expressible as code; shown as a comment.
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonLine {
    pub text: String,
    pub element: ItemKey,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub query_line: String,
    /// Variables the skeleton assumes: the context ones it uses plus fresh
    /// ones (type, name) the user must declare or bind.
    pub context: Vec<(String, String)>,
    pub fresh: Vec<(String, String)>,
    pub lines: Vec<SkeletonLine>,
}

impl Skeleton {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// The query line followed by the generated code.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.query_line);
        if !self.fresh.is_empty() {
            let decls: Vec<String> = self.fresh.iter().map(|(t, n)| format!("{t} {n};")).collect();
            let _ = writeln!(out, "// declare: {}", decls.join(" "));
        }
        for l in &self.lines {
            let _ = writeln!(out, "{}", l.text);
        }
        out
    }
}

fn upper_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn simple_with_dims(ty: &str) -> &str {
    let base_end = ty.find('[').unwrap_or(ty.len());
    let start = ty[..base_end].rfind('.').map(|d| d + 1).unwrap_or(0);
    &ty[start..]
}

/// Literal for primitive and text types.
fn literal_for(ty: &str) -> Option<&'static str> {
    Some(match ty {
        "int" => "0",
        "long" => "0L",
        "float" => "0.0f",
        "double" => "0.0",
        "char" => "' '",
        "boolean" => "true",
        "String" => "\"\"",
        "short" => "(short) 0",
        "byte" => "(byte) 0",
        "null" => "null",
        _ => return None,
    })
}

/// Splits `recv.name(args)` into (receiver, name, args); receiver is empty
/// for unqualified calls.
fn split_call(name: &str) -> (&str, &str, Vec<&str>) {
    let open = name.find('(').unwrap_or(name.len());
    let close = name.rfind(')').unwrap_or(name.len());
    let head = &name[..open];
    let args_text = if open < close { &name[open + 1..close] } else { "" };
    let args = if args_text.trim().is_empty() {
        Vec::new()
    } else {
        args_text.split(',').map(str::trim).collect()
    };
    match head.rfind('.') {
        Some(dot) => (&head[..dot], &head[dot + 1..], args),
        None => ("", head, args),
    }
}

struct Renderer {
    /// (name, type) of everything in scope, most recent last.
    bindings: Vec<(String, String)>,
    used_context: Vec<(String, String)>,
    context_len: usize,
    fresh: Vec<(String, String)>,
    taken_names: Vec<String>,
    members: usize,
}

impl Renderer {
    fn new(ctx: &QueryContext) -> Self {
        Renderer {
            bindings: ctx.vars.clone(),
            used_context: Vec::new(),
            context_len: ctx.vars.len(),
            fresh: Vec::new(),
            taken_names: ctx.vars.iter().map(|(n, _)| n.clone()).collect(),
            members: 0,
        }
    }

    fn note_use(&mut self, idx: usize) -> String {
        let (name, ty) = self.bindings[idx].clone();
        if idx < self.context_len && !self.used_context.iter().any(|(n, _)| *n == name) {
            self.used_context.push((name.clone(), ty));
        }
        name
    }

    fn unique_name(&mut self, ty: &str) -> String {
        let simple = simple_with_dims(ty);
        let dims = simple.matches("[]").count();
        let base = simple.trim_end_matches("[]");
        let mut name = lower_camel(base);
        for _ in 0..dims {
            name.push_str("Array");
        }
        if name.is_empty() {
            name = "value".to_string();
        }
        let mut candidate = name.clone();
        let mut n = 1;
        while is_keyword(&candidate) || candidate == "unknown" || self.taken_names.contains(&candidate) {
            n += 1;
            candidate = format!("{name}{n}");
        }
        self.taken_names.push(candidate.clone());
        candidate
    }

    /// A variable of exactly `ty`, declaring a fresh one if needed.
    fn var_of_type(&mut self, ty: &str) -> String {
        if let Some(idx) = self.bindings.iter().rposition(|(_, t)| t == ty) {
            return self.note_use(idx);
        }
        let name = self.unique_name(ty);
        self.fresh.push((ty.to_string(), name.clone()));
        self.bindings.push((name.clone(), ty.to_string()));
        name
    }

    /// A variable whose type renders as receiver `recv` (`aSTParser`).
    fn receiver_var(&mut self, recv: &str) -> String {
        if let Some(idx) = self
            .bindings
            .iter()
            .rposition(|(_, t)| lower_camel(simple_with_dims(t)) == recv)
        {
            return self.note_use(idx);
        }
        let ty = upper_first(recv);
        self.var_of_type(&ty)
    }

    fn receiver_expr(&mut self, recv: &str) -> String {
        match recv {
            "" | "super" | "unknown" => recv.to_string(),
            r if !r.contains('.') && r.starts_with(|c: char| c.is_lowercase()) => self.receiver_var(r),
            r => r.to_string(),
        }
    }

    fn placeholder(&mut self, ty: &str) -> String {
        if let Some(idx) = self.bindings.iter().rposition(|(_, t)| t == ty) {
            return self.note_use(idx);
        }
        match literal_for(ty) {
            Some(l) => l.to_string(),
            None => format!("({ty}) null"),
        }
    }

    fn args(&mut self, types: &[&str]) -> String {
        types
            .iter()
            .map(|t| self.placeholder(t))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn declare_local(&mut self, ty: &str) -> String {
        let name = self.unique_name(ty);
        self.bindings.push((name.clone(), ty.to_string()));
        name
    }

    fn render(&mut self, e: &ItemKey) -> (String, Placement) {
        use ItemKind::*;
        let name = e.name.as_str();
        match e.kind {
            MethodInvocation => {
                let (recv, method, args) = split_call(name);
                let recv = self.receiver_expr(recv);
                let args = self.args(&args);
                if recv.is_empty() {
                    (format!("{method}({args});"), Placement::Statement)
                } else {
                    (format!("{recv}.{method}({args});"), Placement::Statement)
                }
            }
            ClassInstanceCreation => {
                let (_, _, args) = split_call(name);
                let full_ty = name[..name.find('(').unwrap_or(name.len())].to_string();
                let args = self.args(&args);
                (format!("new {full_ty}({args});"), Placement::Statement)
            }
            AnonymousClassDeclaration => (format!("new {name}() {{ }};"), Placement::Statement),
            ArrayCreation => {
                let base = name.trim_end_matches("[]");
                let dims = name.matches("[]").count().max(1);
                (format!("new {base}[0]{};", "[]".repeat(dims - 1)), Placement::Statement)
            }
            ArrayAccess => {
                let array = if name == "unknown[]" {
                    "unknown".to_string()
                } else {
                    self.var_of_type(name)
                };
                let element = name.strip_suffix("[]").unwrap_or("Object");
                let value = if name == "unknown[]" {
                    "null".to_string()
                } else {
                    self.placeholder(element)
                };
                (format!("{array}[0] = {value};"), Placement::Statement)
            }
            FieldAccess => {
                let (recv, field) = name.rsplit_once('.').unwrap_or(("unknown", name));
                let recv = self.receiver_expr(recv);
                (format!("{recv}.{field} = null;"), Placement::Statement)
            }
            ConstructorInvocation | SuperConstructorInvocation => {
                let (_, head, args) = split_call(name);
                let args = self.args(&args);
                (format!("{head}({args});"), Placement::Statement)
            }
            ReturnStatement => {
                if name == "void" {
                    return ("return;".to_string(), Placement::Statement);
                }
                if let Some(idx) = self.bindings.iter().rposition(|(_, t)| t == name) {
                    let var = self.note_use(idx);
                    return (format!("return {var};"), Placement::Statement);
                }
                match literal_for(name) {
                    Some(l) => (format!("return {l};"), Placement::Statement),
                    None => {
                        let var = self.var_of_type(name);
                        (format!("return {var};"), Placement::Statement)
                    }
                }
            }
            VariableDeclaration => {
                let var = self.declare_local(name);
                (format!("{name} {var};"), Placement::Statement)
            }
            FieldDeclaration => {
                let var = self.declare_local(name);
                (format!("{name} {var};"), Placement::Member)
            }
            MethodDeclaration => {
                let (sig, ret) = match name.rsplit_once("): ") {
                    Some((sig, ret)) => (format!("{sig})"), Some(ret)),
                    None => (name.to_string(), None),
                };
                let (_, method, params) = split_call(&sig);
                self.members += 1;
                let params: Vec<String> = params
                    .iter()
                    .enumerate()
                    .map(|(i, t)| format!("{t} p{i}"))
                    .collect();
                let head = match ret {
                    Some(ret) => format!("{ret} {method}"),
                    None => method.to_string(),
                };
                (format!("{head}({}) {{ }}", params.join(", ")), Placement::Member)
            }
            TypeDeclaration if !name.contains('.') => (format!("class {name} {{ }}"), Placement::Statement),
            ImportDeclaration => (format!("import {name};"), Placement::Header),
            _ => (format!("// {}: {name}", e.kind), Placement::Comment),
        }
    }
}

/// Renders the pattern elements after the match as code below the query.
pub fn render_skeleton(rec: &Recommendation, q: &UserQuery) -> Skeleton {
    let mut r = Renderer::new(&q.context);
    let tail = &rec.pattern.elements[(rec.match_offset + 1).min(rec.pattern.elements.len())..];
    let lines = tail
        .iter()
        .map(|e| {
            let (text, placement) = r.render(e);
            SkeletonLine {
                text,
                element: e.clone(),
                placement,
            }
        })
        .collect();
    Skeleton {
        query_line: q.raw_statement.clone(),
        context: r.used_context,
        fresh: r.fresh,
        lines,
    }
}

/// Re-extracts the skeleton's generated lines and returns their items in
/// line order. Context and fresh variables become parameters of a host
/// method so that they are typed but produce no items themselves.
pub fn skeleton_round_trip(s: &Skeleton) -> Result<Vec<ItemKey>, ExtractError> {
    let mut src = String::new();
    let mut line = 1u32;
    let mut line_of = vec![0u32; s.lines.len()];
    for (i, l) in s.lines.iter().enumerate() {
        if l.placement == Placement::Header {
            let _ = writeln!(src, "{}", l.text);
            line_of[i] = line;
            line += 1;
        }
    }
    src.push_str("class SkeletonHost {\n");
    line += 1;
    for (i, l) in s.lines.iter().enumerate() {
        if l.placement == Placement::Member {
            let _ = writeln!(src, "{}", l.text);
            line_of[i] = line;
            line += 1;
        }
    }
    let params: Vec<String> = s
        .context
        .iter()
        .map(|(n, t)| format!("{t} {n}"))
        .chain(s.fresh.iter().map(|(t, n)| format!("{t} {n}")))
        .collect();
    let _ = writeln!(src, "void skeletonHost({}) {{", params.join(", "));
    line += 1;
    for (i, l) in s.lines.iter().enumerate() {
        if l.placement == Placement::Statement {
            let _ = writeln!(src, "{}", l.text);
            line_of[i] = line;
            line += 1;
        }
    }
    src.push_str("}\n}\n");
    let extraction = extract_items(&src, "<skeleton>")?;
    let mut keys = Vec::new();
    for (i, l) in s.lines.iter().enumerate() {
        if l.placement == Placement::Comment {
            continue;
        }
        keys.extend(
            extraction
                .items
                .iter()
                .filter(|it| it.line == line_of[i])
                // the host method's own declaration is not generated code
                .filter(|it| !matches!(&it.enclosing, BlockPath::Class(c) if c == "SkeletonHost" && it.kind == ItemKind::TypeDeclaration))
                .map(|it| it.key()),
        );
    }
    Ok(keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::ItemKind::*;

    fn mi(name: &str) -> ItemKey {
        ItemKey::new(MethodInvocation, name)
    }

    fn pattern(elements: Vec<ItemKey>, count: u64, n: u64) -> SequentialPattern {
        SequentialPattern {
            elements,
            support: Ratio::new(count, n),
            confidence: Ratio::new(count, count),
        }
    }

    fn parser_chain() -> SequentialPattern {
        pattern(
            vec![
                mi("ASTParser.newParser(int)"),
                mi("aSTParser.setKind(int)"),
                mi("aSTParser.setSource(ICompilationUnit)"),
                mi("aSTParser.setResolveBindings(boolean)"),
                mi("aSTParser.createAST(null)"),
            ],
            7,
            12,
        )
    }

    fn repo(patterns: Vec<SequentialPattern>) -> MinedRepository {
        MinedRepository::new("t", "2024-01-01T00:00:00Z", 1, patterns)
    }

    #[test]
    fn parser_query_abstracts_to_static_call() {
        let ctx = QueryContext::default().with_var("parser", "ASTParser");
        let q = abstract_query("parser = ASTParser.newParser(AST.JLS3);", &ctx).unwrap();
        assert_eq!(q.item, mi("ASTParser.newParser(int)"));
        let ctx = ctx.with_import("org.eclipse.jdt.core.dom.ASTParser");
        let q = abstract_query("parser = ASTParser.newParser(AST.JLS3);", &ctx).unwrap();
        assert_eq!(q.item, mi("org.eclipse.jdt.core.dom.ASTParser.newParser(int)"));
    }

    #[test]
    fn member_statement_abstracts_to_field() {
        let q = abstract_query("private Connection conn;", &QueryContext::default()).unwrap();
        assert_eq!(q.item, ItemKey::new(FieldDeclaration, "Connection"));
    }

    #[test]
    fn declaration_with_call_queries_the_call_and_binds_the_variable() {
        let q = abstract_query("ASTParser parser = ASTParser.newParser(AST.JLS3)", &QueryContext::default()).unwrap();
        assert_eq!(q.item, mi("ASTParser.newParser(int)"));
        assert_eq!(q.context.vars, [("parser".to_string(), "ASTParser".to_string())]);
    }

    #[test]
    fn unparsable_queries() {
        assert!(matches!(
            abstract_query("", &QueryContext::default()),
            Err(QueryError::UnparsableQuery { .. })
        ));
        assert!(abstract_query("int int x y;", &QueryContext::default()).is_err());
        assert!(abstract_query("\"unterminated", &QueryContext::default()).is_err());
        assert!(abstract_query("x;", &QueryContext::default()).is_err());
    }

    #[test]
    fn search_tiers_and_order() {
        let a = mi("a()");
        let ab = pattern(vec![a.clone(), mi("b()")], 6, 10); // 1.2
        let ac = pattern(vec![a.clone(), mi("c()")], 45, 100); // 0.9
        let xa = pattern(vec![mi("x()"), a.clone()], 9, 10); // 1.8
        let r = repo(vec![ab.clone(), ac.clone(), xa.clone()]);
        let q = UserQuery {
            raw_statement: "a();".into(),
            item: a.clone(),
            context: QueryContext::default(),
        };
        let got = search(&q, &r, 2);
        assert_eq!(got.iter().map(|g| &g.pattern).collect::<Vec<_>>(), [&ab, &ac]);
        let got = search(&q, &r, 5);
        assert_eq!(got.len(), 3);
        assert_eq!(got[2].tier, MatchTier::Contains);
        assert_eq!(got[2].match_offset, 1);
        // prefix property
        for n in 1..4 {
            assert_eq!(search(&q, &r, n)[..], search(&q, &r, n + 1)[..n]);
        }
        let absent = UserQuery {
            item: mi("zzz()"),
            ..q
        };
        assert!(search(&absent, &r, 5).is_empty());
    }

    #[test]
    fn substring_tier_bridges_import_resolution() {
        let r = repo(vec![pattern(
            vec![mi("org.eclipse.jdt.core.dom.ASTParser.newParser(int)"), mi("aSTParser.setKind(int)")],
            7,
            12,
        )]);
        let q = abstract_query("parser = ASTParser.newParser(AST.JLS3);", &QueryContext::default()).unwrap();
        let got = search(&q, &r, 5);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].tier, MatchTier::Substring);
    }

    #[test]
    fn parser_chain_skeleton() {
        let ctx = QueryContext::default().with_var("parser", "ASTParser");
        let q = abstract_query("parser = ASTParser.newParser(AST.JLS3);", &ctx).unwrap();
        let recs = search(&q, &repo(vec![parser_chain()]), 5);
        assert_eq!(recs[0].score.display2(), "2.92");
        let s = render_skeleton(&recs[0], &q);
        let body: Vec<&str> = s.lines.iter().map(|l| l.text.as_str()).collect();
        assert_eq!(
            body,
            [
                "parser.setKind(0);",
                "parser.setSource((ICompilationUnit) null);",
                "parser.setResolveBindings(true);",
                "parser.createAST(null);",
            ]
        );
        assert!(s.fresh.is_empty());
        assert_eq!(skeleton_round_trip(&s).unwrap(), parser_chain().elements[1..]);
    }

    #[test]
    fn match_at_end_is_empty() {
        let p = parser_chain();
        let rec = Recommendation {
            match_offset: p.k() - 1,
            score: p.ranking(),
            tier: MatchTier::Contains,
            pattern: p,
        };
        let q = UserQuery {
            raw_statement: "x".into(),
            item: mi("aSTParser.createAST(null)"),
            context: QueryContext::default(),
        };
        assert!(render_skeleton(&rec, &q).is_empty());
    }

    #[test]
    fn fresh_receiver_declared_from_type() {
        let p = pattern(
            vec![ItemKey::new(FieldDeclaration, "Connection"), mi("connection.close()")],
            2,
            2,
        );
        let rec = Recommendation {
            match_offset: 0,
            score: p.ranking(),
            tier: MatchTier::Antecedent,
            pattern: p.clone(),
        };
        // the query's own declaration is bound
        let q = abstract_query("private Connection conn;", &QueryContext::default()).unwrap();
        let s = render_skeleton(&rec, &q);
        assert!(s.fresh.is_empty());
        assert_eq!(s.lines[0].text, "conn.close();");
        assert_eq!(skeleton_round_trip(&s).unwrap(), p.elements[1..]);
        // without one, a fresh variable is introduced
        let q = UserQuery {
            context: QueryContext::default(),
            ..q
        };
        let s = render_skeleton(&rec, &q);
        assert_eq!(s.fresh, [("Connection".to_string(), "connection".to_string())]);
        assert!(s.to_text().contains("// declare: Connection connection;\nconnection.close();"));
        assert_eq!(skeleton_round_trip(&s).unwrap(), p.elements[1..]);
    }

    #[test]
    fn every_renderable_kind_round_trips() {
        let tail = vec![
            ItemKey::new(VariableDeclaration, "File"),
            mi("file.open(String,int)"),
            mi("helper(long,File)"),
            mi("super.close()"),
            mi("unknown.run()"),
            mi("java.util.Collections.emptyList()"),
            ItemKey::new(ClassInstanceCreation, "File(String)"),
            ItemKey::new(AnonymousClassDeclaration, "Runnable"),
            ItemKey::new(ArrayCreation, "File[][]"),
            ItemKey::new(ArrayAccess, "File[]"),
            ItemKey::new(ArrayAccess, "unknown[]"),
            ItemKey::new(FieldAccess, "point.x"),
            ItemKey::new(ConstructorInvocation, "this(int,char)"),
            ItemKey::new(SuperConstructorInvocation, "super(double,float,boolean,short)"),
            ItemKey::new(FieldDeclaration, "Connection"),
            ItemKey::new(MethodDeclaration, "run(int,String): void"),
            ItemKey::new(ImportDeclaration, "java.util.List"),
            ItemKey::new(ReturnStatement, "CompilationUnit"),
            ItemKey::new(ReturnStatement, "int"),
            ItemKey::new(ReturnStatement, "void"),
        ];
        let mut elements = vec![mi("start()")];
        elements.extend(tail.iter().cloned());
        let p = pattern(elements, 1, 1);
        let rec = Recommendation {
            match_offset: 0,
            score: p.ranking(),
            tier: MatchTier::Antecedent,
            pattern: p,
        };
        let q = UserQuery {
            raw_statement: "start();".into(),
            item: mi("start()"),
            context: QueryContext::default(),
        };
        let s = render_skeleton(&rec, &q);
        assert_eq!(skeleton_round_trip(&s).unwrap(), tail, "{}", s.to_text());
    }
}
