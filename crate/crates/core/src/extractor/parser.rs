//! Tolerant recursive-descent parser for the supported Java subset.
//!
//! Statements and members the grammar does not cover are skipped up to the
//! next `;` or balanced block and recorded as [`Recovery`] entries; brace
//! balance is checked before parsing so recovery always terminates inside
//! the enclosing block.

use super::ast::*;
use super::lexer::{Tok, Token};

/// A region the parser skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    pub line: u32,
    pub column: u32,
    pub token: String,
}

#[derive(Debug, Clone)]
pub(crate) struct Fail {
    at: usize,
}

pub(crate) type PResult<T> = Result<T, Fail>;

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
];

pub struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    pub recoveries: Vec<Recovery>,
}

impl<'t> Parser<'t> {
    /// `toks` must end with [`Tok::Eof`].
    pub fn new(toks: &'t [Token]) -> Self {
        Parser {
            toks,
            pos: 0,
            recoveries: Vec::new(),
        }
    }

    // ----- token helpers -------------------------------------------------

    fn tok(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn nth(&self, n: usize) -> &'t Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn here(&self) -> Pos {
        let t = self.tok();
        Pos {
            line: t.line,
            column: t.column,
        }
    }

    fn last_pos(&self) -> Pos {
        let t = &self.toks[self.pos.saturating_sub(1)];
        Pos {
            line: t.line,
            column: t.column,
        }
    }

    fn at_eof(&self) -> bool {
        self.tok().tok == Tok::Eof
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.tok().tok, Tok::Punct(q) if q == p)
    }

    fn nth_is_punct(&self, n: usize, p: &str) -> bool {
        matches!(self.nth(n).tok, Tok::Punct(q) if q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.tok().tok, Tok::Keyword(q) if q == k)
    }

    fn nth_is_kw(&self, n: usize, k: &str) -> bool {
        matches!(self.nth(n).tok, Tok::Keyword(q) if q == k)
    }

    fn is_ident(&self) -> bool {
        matches!(self.tok().tok, Tok::Ident(_))
    }

    fn is_ident_text(&self, s: &str) -> bool {
        matches!(&self.tok().tok, Tok::Ident(q) if q == s)
    }


    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self) -> PResult<T> {
        Err(Fail { at: self.pos })
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.fail()
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.tok().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(),
        }
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is_punct(".") && matches!(self.nth(1).tok, Tok::Ident(_)) {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    // ----- recovery --------------------------------------------------------

    fn record(&mut self, fail: &Fail) {
        let t = &self.toks[fail.at.min(self.toks.len() - 1)];
        self.recoveries.push(Recovery {
            line: t.line,
            column: t.column,
            token: t.text(),
        });
    }

    /// Skips from `start` to the end of the current statement or member.
    fn skip_from(&mut self, start: usize) {
        self.pos = start;
        let mut depth = 0usize;
        let begin = self.pos;
        loop {
            match self.tok().tok {
                Tok::Eof => break,
                Tok::Punct("{") | Tok::Punct("(") | Tok::Punct("[") => {
                    depth += 1;
                    self.pos += 1;
                }
                Tok::Punct("}") | Tok::Punct(")") | Tok::Punct("]") => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    let closed_brace = self.is_punct("}");
                    self.pos += 1;
                    if depth == 0 && closed_brace && !self.is_punct(";") && !self.is_punct(")") && !self.is_punct(",") && !self.is_punct(".") {
                        break;
                    }
                }
                Tok::Punct(";") if depth == 0 => {
                    self.pos += 1;
                    break;
                }
                _ => self.pos += 1,
            }
        }
        if self.pos == begin && !self.at_eof() && !self.is_punct("}") {
            self.pos += 1;
        }
    }

    // ----- compilation unit -------------------------------------------------

    pub fn compilation_unit(&mut self) -> CompilationUnit {
        let mut cu = CompilationUnit::default();
        while !self.at_eof() {
            let start = self.pos;
            if let Err(f) = self.top_level(&mut cu) {
                self.record(&f);
                self.skip_from(start);
                if self.is_punct("}") {
                    // stray closer at top level cannot happen after the
                    // balance check, but never loop on it
                    self.pos += 1;
                }
            }
        }
        cu
    }

    fn top_level(&mut self, cu: &mut CompilationUnit) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        if self.is_kw("package") {
            let pos = self.here();
            self.pos += 1;
            let name = self.qualified_name()?;
            self.expect_punct(";")?;
            cu.package = Some((pos, name));
            return Ok(());
        }
        if self.is_kw("import") {
            let pos = self.here();
            self.pos += 1;
            let is_static = self.eat_kw("static");
            let mut path = self.qualified_name()?;
            let mut wildcard = false;
            if self.is_punct(".") && self.nth_is_punct(1, "*") {
                self.pos += 2;
                path.push_str(".*");
                wildcard = true;
            }
            self.expect_punct(";")?;
            cu.imports.push(Import {
                pos,
                path,
                is_static,
                wildcard,
            });
            return Ok(());
        }
        let mod_start = self.pos;
        self.modifiers()?;
        match self.type_decl(mod_start)? {
            Some(td) => {
                cu.types.push(td);
                Ok(())
            }
            None => self.fail(),
        }
    }

    fn annotation(&mut self) -> PResult<()> {
        self.expect_punct("@")?;
        self.qualified_name()?;
        if self.is_punct("(") {
            self.skip_balanced("(", ")")?;
        }
        Ok(())
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect_punct(open)?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                return self.fail();
            }
            if self.is_punct(open) {
                depth += 1;
            } else if self.is_punct(close) {
                depth -= 1;
            }
            self.pos += 1;
        }
        Ok(())
    }

    /// Skips modifiers and annotations (but not `@interface`).
    fn modifiers(&mut self) -> PResult<()> {
        loop {
            if self.is_punct("@") && !self.nth_is_kw(1, "interface") {
                self.annotation()?;
            } else if MODIFIERS.iter().any(|m| self.is_kw(m)) {
                // `default:` inside switch never reaches here
                self.pos += 1;
            } else if (self.is_ident_text("sealed") || self.is_ident_text("non"))
                && self.looks_like_sealed()
            {
                if self.is_ident_text("non") {
                    self.pos += 3;
                } else {
                    self.pos += 1;
                }
            } else {
                return Ok(());
            }
        }
    }

    fn looks_like_sealed(&self) -> bool {
        if self.is_ident_text("non") {
            return self.nth_is_punct(1, "-") && matches!(&self.nth(2).tok, Tok::Ident(s) if s == "sealed");
        }
        matches!(self.nth(1).tok, Tok::Keyword("class" | "interface" | "abstract" | "public" | "static" | "final"))
    }

    fn is_record_start(&self) -> bool {
        self.is_ident_text("record") && matches!(self.nth(1).tok, Tok::Ident(_)) && (self.nth_is_punct(2, "(") || self.nth_is_punct(2, "<"))
    }

    /// Parses a type declaration if one starts here (after modifiers).
    fn type_decl(&mut self, start: usize) -> PResult<Option<TypeDecl>> {
        let start_tok = &self.toks[start];
        let pos = Pos {
            line: start_tok.line,
            column: start_tok.column,
        };
        let flavor = if self.eat_kw("class") {
            TypeFlavor::Class
        } else if self.eat_kw("interface") {
            TypeFlavor::Interface
        } else if self.eat_kw("enum") {
            TypeFlavor::Enum
        } else if self.is_record_start() {
            self.pos += 1;
            TypeFlavor::Record
        } else if self.is_punct("@") && self.nth_is_kw(1, "interface") {
            // annotation type: parsed as an interface without members
            self.pos += 2;
            let name = self.ident()?;
            self.skip_balanced("{", "}")?;
            return Ok(Some(TypeDecl {
                pos,
                flavor: TypeFlavor::Interface,
                name,
                extends: Vec::new(),
                implements: Vec::new(),
                components: Vec::new(),
                members: Vec::new(),
            }));
        } else {
            return Ok(None);
        };
        let name = self.ident()?;
        if self.is_punct("<") {
            self.type_args()?;
        }
        let mut components = Vec::new();
        if flavor == TypeFlavor::Record {
            components = self.params()?;
        }
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        loop {
            if self.eat_kw("extends") {
                extends = self.type_list()?;
            } else if self.eat_kw("implements") {
                implements = self.type_list()?;
            } else if self.is_ident_text("permits") {
                self.pos += 1;
                self.type_list()?;
            } else {
                break;
            }
        }
        let members = self.class_body(flavor == TypeFlavor::Enum)?;
        Ok(Some(TypeDecl {
            pos,
            flavor,
            name,
            extends,
            implements,
            components,
            members,
        }))
    }

    fn type_list(&mut self) -> PResult<Vec<TypeRef>> {
        let mut out = vec![self.parse_type()?];
        while self.eat_punct(",") {
            out.push(self.parse_type()?);
        }
        Ok(out)
    }

    fn class_body(&mut self, is_enum: bool) -> PResult<Vec<Member>> {
        self.expect_punct("{")?;
        let mut members = Vec::new();
        if is_enum {
            self.enum_constants(&mut members)?;
        }
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.fail();
            }
            let start = self.pos;
            match self.member() {
                Ok(Some(m)) => members.push(m),
                Ok(None) => {}
                Err(f) => {
                    self.record(&f);
                    self.skip_from(start);
                }
            }
        }
        self.expect_punct("}")?;
        Ok(members)
    }

    fn enum_constants(&mut self, members: &mut Vec<Member>) -> PResult<()> {
        loop {
            while self.is_punct("@") {
                self.annotation()?;
            }
            if !self.is_ident() {
                break;
            }
            let pos = self.here();
            self.pos += 1;
            let args = if self.is_punct("(") { self.args()? } else { Vec::new() };
            let body = if self.is_punct("{") {
                Some(self.class_body(false)?)
            } else {
                None
            };
            members.push(Member::EnumConstant { pos, args, body });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.eat_punct(";");
        Ok(())
    }

    fn member(&mut self) -> PResult<Option<Member>> {
        if self.eat_punct(";") {
            return Ok(None);
        }
        let start = self.pos;
        let start_pos = self.here();
        self.modifiers()?;
        if self.is_punct("{") {
            return Ok(Some(Member::Initializer(self.block()?)));
        }
        if let Some(td) = self.type_decl(start)? {
            return Ok(Some(Member::Type(td)));
        }
        if self.is_punct("<") {
            self.type_args()?;
        }
        // constructor
        if self.is_ident() && self.nth_is_punct(1, "(") {
            let name_pos = self.here();
            let name = self.ident()?;
            let params = self.params()?;
            self.throws_clause()?;
            let body = if self.is_punct("{") {
                Some(self.block()?)
            } else {
                self.expect_punct(";")?;
                None
            };
            let _ = start_pos;
            return Ok(Some(Member::Method(MethodDecl {
                pos: name_pos,
                name,
                ret: None,
                params,
                body,
            })));
        }
        // compact record constructor: `Name {`
        if self.is_ident() && self.nth_is_punct(1, "{") {
            self.pos += 1;
            return Ok(Some(Member::Initializer(self.block()?)));
        }
        let ty = self.parse_type()?;
        let name_pos = self.here();
        let name = self.ident()?;
        if self.is_punct("(") {
            let params = self.params()?;
            let mut ret = ty;
            while self.is_punct("[") && self.nth_is_punct(1, "]") {
                self.pos += 2;
                ret.dims += 1;
            }
            self.throws_clause()?;
            let body = if self.is_punct("{") {
                Some(self.block()?)
            } else {
                if self.eat_kw("default") {
                    self.expression()?;
                }
                self.expect_punct(";")?;
                None
            };
            return Ok(Some(Member::Method(MethodDecl {
                pos: name_pos,
                name,
                ret: Some(ret),
                params,
                body,
            })));
        }
        let declarators = self.declarators_after_name(name)?;
        self.expect_punct(";")?;
        Ok(Some(Member::Field(FieldDecl {
            pos: ty.pos,
            ty,
            declarators,
        })))
    }

    fn throws_clause(&mut self) -> PResult<()> {
        if self.eat_kw("throws") {
            self.type_list()?;
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        loop {
            self.modifiers()?;
            let mut ty = self.parse_type()?;
            if self.eat_punct("...") {
                ty.dims += 1;
            }
            // receiver parameter `Type this`
            let name = if self.eat_kw("this") {
                "this".to_string()
            } else {
                self.ident()?
            };
            while self.is_punct("[") && self.nth_is_punct(1, "]") {
                self.pos += 2;
                ty.dims += 1;
            }
            if name != "this" {
                out.push(Param { ty, name });
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn declarators_after_name(&mut self, first: String) -> PResult<Vec<Declarator>> {
        let mut out = Vec::new();
        let mut name = first;
        loop {
            let mut extra_dims = 0;
            while self.is_punct("[") && self.nth_is_punct(1, "]") {
                self.pos += 2;
                extra_dims += 1;
            }
            let init = if self.eat_punct("=") {
                Some(self.var_init()?)
            } else {
                None
            };
            out.push(Declarator {
                name,
                extra_dims,
                init,
            });
            if !self.eat_punct(",") {
                break;
            }
            name = self.ident()?;
        }
        Ok(out)
    }

    fn var_init(&mut self) -> PResult<Expr> {
        if self.is_punct("{") {
            self.array_init()
        } else {
            self.expression()
        }
    }

    fn array_init(&mut self) -> PResult<Expr> {
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.is_punct("}") {
            items.push(self.var_init()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(Expr::ArrayInit(items))
    }

    // ----- types -------------------------------------------------------------

    /// Skips a `<...>` type argument list.
    fn type_args(&mut self) -> PResult<()> {
        self.expect_punct("<")?;
        let mut depth = 1;
        while depth > 0 {
            match &self.tok().tok {
                Tok::Punct("<") => depth += 1,
                Tok::Punct(">") => depth -= 1,
                Tok::Punct("." | "," | "?" | "[" | "]" | "&" | "@") => {}
                Tok::Ident(_) => {}
                Tok::Keyword(k) if PRIMITIVES.contains(k) || *k == "extends" || *k == "super" => {}
                _ => return self.fail(),
            }
            self.pos += 1;
        }
        Ok(())
    }

    pub(crate) fn parse_type(&mut self) -> PResult<TypeRef> {
        while self.is_punct("@") {
            self.annotation()?;
        }
        let pos = self.here();
        let mut name = match &self.tok().tok {
            Tok::Keyword(k) if PRIMITIVES.contains(k) => {
                self.pos += 1;
                (*k).to_string()
            }
            Tok::Ident(_) => {
                let mut name = self.ident()?;
                loop {
                    if self.is_punct("<") {
                        self.type_args()?;
                    }
                    if self.is_punct(".") && matches!(self.nth(1).tok, Tok::Ident(_)) {
                        self.pos += 1;
                        name.push('.');
                        name.push_str(&self.ident()?);
                    } else {
                        break;
                    }
                }
                name
            }
            _ => return self.fail(),
        };
        let mut dims = 0;
        while self.is_punct("[") && self.nth_is_punct(1, "]") {
            self.pos += 2;
            dims += 1;
        }
        if name.is_empty() {
            name.push('?');
        }
        Ok(TypeRef { pos, name, dims })
    }

    // ----- statements ----------------------------------------------------------

    pub(crate) fn block(&mut self) -> PResult<Block> {
        self.expect_punct("{")?;
        let stmts = self.statements_until_close()?;
        self.expect_punct("}")?;
        Ok(Block { stmts })
    }

    /// Statements up to (not including) the closing `}`.
    pub(crate) fn statements_until_close(&mut self) -> PResult<Vec<Stmt>> {
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.fail();
            }
            let start = self.pos;
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(f) => {
                    self.record(&f);
                    self.skip_from(start);
                    stmts.push(Stmt::Skipped);
                }
            }
        }
        Ok(stmts)
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect_punct("(")?;
        let e = self.expression()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let pos = self.here();
        match &self.tok().tok {
            Tok::Punct("{") => return Ok(Stmt::Block(self.block()?)),
            Tok::Punct(";") => {
                self.pos += 1;
                return Ok(Stmt::Block(Block::default()));
            }
            Tok::Punct("@") => {
                self.modifiers()?;
                return self.statement();
            }
            Tok::Keyword("if") => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.eat_kw("else") {
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                return Ok(Stmt::If {
                    pos,
                    end: self.last_pos(),
                    cond,
                    then,
                    otherwise,
                });
            }
            Tok::Keyword("while") => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let body = Box::new(self.statement()?);
                return Ok(Stmt::While {
                    pos,
                    end: self.last_pos(),
                    cond,
                    body,
                });
            }
            Tok::Keyword("do") => {
                self.pos += 1;
                let body = Box::new(self.statement()?);
                if !self.eat_kw("while") {
                    return self.fail();
                }
                let cond = self.paren_expr()?;
                self.expect_punct(";")?;
                return Ok(Stmt::DoWhile {
                    pos,
                    end: self.last_pos(),
                    body,
                    cond,
                });
            }
            Tok::Keyword("for") => return self.for_statement(pos),
            Tok::Keyword("return") => {
                self.pos += 1;
                let value = if self.is_punct(";") {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.expect_punct(";")?;
                return Ok(Stmt::Return { pos, value });
            }
            Tok::Keyword("throw") => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect_punct(";")?;
                return Ok(Stmt::Throw(e));
            }
            Tok::Keyword("break") | Tok::Keyword("continue") => {
                self.pos += 1;
                if self.is_ident() {
                    self.pos += 1;
                }
                self.expect_punct(";")?;
                return Ok(Stmt::Block(Block::default()));
            }
            Tok::Keyword("assert") => {
                self.pos += 1;
                let mut exprs = vec![self.expression()?];
                if self.eat_punct(":") {
                    exprs.push(self.expression()?);
                }
                self.expect_punct(";")?;
                return Ok(Stmt::Assert(exprs));
            }
            Tok::Keyword("try") => return self.try_statement(),
            Tok::Keyword("switch") => {
                self.pos += 1;
                let selector = self.paren_expr()?;
                let body = self.switch_body()?;
                return Ok(Stmt::Switch { selector, body });
            }
            Tok::Keyword("synchronized") if self.nth_is_punct(1, "(") => {
                self.pos += 1;
                let lock = self.paren_expr()?;
                let body = self.block()?;
                return Ok(Stmt::Synchronized { lock, body });
            }
            Tok::Keyword(k @ ("this" | "super")) if self.nth_is_punct(1, "(") => {
                let is_super = *k == "super";
                let save = self.pos;
                self.pos += 1;
                let args = self.args()?;
                if self.eat_punct(";") {
                    return Ok(Stmt::ExplicitCtor { pos, is_super, args });
                }
                self.pos = save;
            }
            Tok::Keyword("class" | "interface" | "enum" | "abstract" | "final" | "static") => {
                let start = self.pos;
                self.modifiers()?;
                if let Some(td) = self.type_decl(start)? {
                    return Ok(Stmt::LocalClass(td));
                }
                // `final Type x = ...;`
                return self.local_var_or_expr();
            }
            Tok::Ident(word) if word == "yield" && !matches!(self.nth(1).tok, Tok::Punct("=" | "." | "(" | "[" | "++" | "--")) => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect_punct(";")?;
                return Ok(Stmt::Expr(e));
            }
            Tok::Ident(_) if self.nth_is_punct(1, ":") => {
                self.pos += 2;
                return self.statement();
            }
            _ => {}
        }
        if self.is_record_start() {
            let start = self.pos;
            if let Some(td) = self.type_decl(start)? {
                return Ok(Stmt::LocalClass(td));
            }
        }
        self.local_var_or_expr()
    }

    fn local_var_or_expr(&mut self) -> PResult<Stmt> {
        if let Some(stmt) = self.try_local_var()? {
            self.expect_punct(";")?;
            return Ok(stmt);
        }
        let e = self.expression()?;
        self.expect_punct(";")?;
        Ok(Stmt::Expr(e))
    }

    /// Speculatively parses `Type name ...` declarators.
    fn try_local_var(&mut self) -> PResult<Option<Stmt>> {
        let save = self.pos;
        let looks_like_type = matches!(self.tok().tok, Tok::Ident(_))
            || matches!(self.tok().tok, Tok::Keyword(k) if PRIMITIVES.contains(&k));
        if !looks_like_type {
            return Ok(None);
        }
        let Ok(ty) = self.parse_type() else {
            self.pos = save;
            return Ok(None);
        };
        let is_decl = self.is_ident()
            && matches!(self.nth(1).tok, Tok::Punct("=" | ";" | "," | "[" | ":"));
        if !is_decl {
            self.pos = save;
            return Ok(None);
        }
        let name = self.ident()?;
        let declarators = self.declarators_after_name(name)?;
        Ok(Some(Stmt::LocalVar {
            pos: ty.pos,
            ty,
            declarators,
        }))
    }

    fn for_statement(&mut self, pos: Pos) -> PResult<Stmt> {
        self.pos += 1;
        self.expect_punct("(")?;
        // enhanced for
        let save = self.pos;
        self.modifiers()?;
        if let Ok(var_ty) = self.parse_type() {
            if self.is_ident() && self.nth_is_punct(1, ":") {
                let name = self.ident()?;
                self.pos += 1;
                let iterable = self.expression()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                return Ok(Stmt::ForEach {
                    pos,
                    end: self.last_pos(),
                    var: Param { ty: var_ty, name },
                    iterable,
                    body,
                });
            }
        }
        self.pos = save;
        self.modifiers()?;
        let mut init = Vec::new();
        if !self.is_punct(";") {
            if let Some(decl) = self.try_local_var()? {
                init.push(decl);
            } else {
                init.push(Stmt::Expr(self.expression()?));
                while self.eat_punct(",") {
                    init.push(Stmt::Expr(self.expression()?));
                }
            }
        }
        self.expect_punct(";")?;
        let cond = if self.is_punct(";") {
            None
        } else {
            Some(self.expression()?)
        };
        self.expect_punct(";")?;
        let mut update = Vec::new();
        if !self.is_punct(")") {
            update.push(self.expression()?);
            while self.eat_punct(",") {
                update.push(self.expression()?);
            }
        }
        self.expect_punct(")")?;
        let body = Box::new(self.statement()?);
        Ok(Stmt::For {
            pos,
            end: self.last_pos(),
            init,
            cond,
            update,
            body,
        })
    }

    fn try_statement(&mut self) -> PResult<Stmt> {
        self.pos += 1;
        let mut resources = Vec::new();
        if self.eat_punct("(") {
            while !self.is_punct(")") {
                self.modifiers()?;
                if let Some(decl) = self.try_local_var()? {
                    resources.push(decl);
                } else {
                    resources.push(Stmt::Expr(self.expression()?));
                }
                if !self.eat_punct(";") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        let body = self.block()?;
        let mut catches = Vec::new();
        while self.eat_kw("catch") {
            self.expect_punct("(")?;
            self.modifiers()?;
            let ty = self.parse_type()?;
            while self.eat_punct("|") {
                self.parse_type()?;
            }
            let name = self.ident()?;
            self.expect_punct(")")?;
            catches.push((Param { ty, name }, self.block()?));
        }
        let finally = if self.eat_kw("finally") {
            Some(self.block()?)
        } else {
            None
        };
        Ok(Stmt::Try {
            resources,
            body,
            catches,
            finally,
        })
    }

    fn switch_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.fail();
            }
            if self.is_kw("case") || self.is_kw("default") {
                self.pos += 1;
                // labels: skip to `:` or `->` at depth 0
                let mut depth = 0;
                loop {
                    match self.tok().tok {
                        Tok::Eof => return self.fail(),
                        Tok::Punct("(" | "[" | "{") => depth += 1,
                        Tok::Punct(")" | "]" | "}") => {
                            if depth == 0 {
                                return self.fail();
                            }
                            depth -= 1
                        }
                        Tok::Punct(":") | Tok::Punct("->") if depth == 0 => break,
                        _ => {}
                    }
                    self.pos += 1;
                }
                let arrow = self.is_punct("->");
                self.pos += 1;
                if arrow {
                    let start = self.pos;
                    let stmt = if self.is_punct("{") || self.is_kw("throw") {
                        self.statement()
                    } else {
                        self.expression().and_then(|e| {
                            self.expect_punct(";")?;
                            Ok(Stmt::Expr(e))
                        })
                    };
                    match stmt {
                        Ok(s) => stmts.push(s),
                        Err(f) => {
                            self.record(&f);
                            self.skip_from(start);
                        }
                    }
                }
                continue;
            }
            let start = self.pos;
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(f) => {
                    self.record(&f);
                    self.skip_from(start);
                }
            }
        }
        self.expect_punct("}")?;
        Ok(stmts)
    }

    // ----- expressions -----------------------------------------------------------

    pub(crate) fn expression(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if let Some((op, len)) = self.assign_op() {
            self.pos += len;
            let value = if self.is_punct("{") {
                self.array_init()?
            } else {
                self.expression()?
            };
            return Ok(Expr::Assign {
                target: Box::new(lhs),
                op,
                value: Box::new(value),
            });
        }
        Ok(lhs)
    }

    fn assign_op(&self) -> Option<(&'static str, usize)> {
        if let Tok::Punct(p) = self.tok().tok {
            if p != ">" && ASSIGN_OPS.contains(&p) {
                return Some((p, 1));
            }
        }
        // `>>=` and `>>>=` arrive split
        if self.is_punct(">") && self.tok().joined && self.nth_is_punct(1, ">") {
            if self.nth(1).joined && self.nth_is_punct(2, "=") {
                return Some((">>=", 3));
            }
            if self.nth(1).joined && self.nth_is_punct(2, ">") && self.nth(2).joined && self.nth_is_punct(3, "=") {
                return Some((">>>=", 4));
            }
        }
        None
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(1)?;
        if self.eat_punct("?") {
            let then = self.conditional_branch()?;
            self.expect_punct(":")?;
            let otherwise = self.conditional_branch()?;
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        Ok(cond)
    }

    fn conditional_branch(&mut self) -> PResult<Expr> {
        if self.lambda_ahead() {
            return self.lambda();
        }
        self.conditional()
    }

    /// Binary operator at the cursor with its precedence and token length.
    fn binary_op(&self) -> Option<(&'static str, u8, usize)> {
        let t = self.tok();
        let p = match t.tok {
            Tok::Punct(p) => p,
            Tok::Keyword("instanceof") => return Some(("instanceof", 7, 1)),
            _ => return None,
        };
        if p == ">" {
            if t.joined && self.nth_is_punct(1, ">") {
                let second = self.nth(1);
                if second.joined && self.nth_is_punct(2, ">") {
                    if self.nth(2).joined && self.nth_is_punct(3, "=") {
                        return None;
                    }
                    return Some((">>>", 8, 3));
                }
                if second.joined && self.nth_is_punct(2, "=") {
                    return None;
                }
                return Some((">>", 8, 2));
            }
            if t.joined && self.nth_is_punct(1, "=") {
                return Some((">=", 7, 2));
            }
            return Some((">", 7, 1));
        }
        let prec = match p {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | "<=" => 7,
            "<<" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        };
        Some((p, prec, 1))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec, len)) = self.binary_op() {
            if prec < min_prec {
                break;
            }
            self.pos += len;
            if op == "instanceof" {
                self.eat_kw("final");
                let ty = self.parse_type()?;
                let binding = if self.is_ident() { Some(self.ident()?) } else { None };
                lhs = Expr::InstanceOf {
                    expr: Box::new(lhs),
                    ty,
                    binding,
                };
                continue;
            }
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if let Tok::Punct(op @ ("+" | "-" | "++" | "--" | "!" | "~")) = self.tok().tok {
            self.pos += 1;
            let operand = self.unary()?;
            return Ok(Expr::Unary {
                op,
                operand: Box::new(operand),
            });
        }
        if self.is_punct("(") {
            if let Some(cast) = self.try_cast()? {
                return Ok(cast);
            }
        }
        self.postfix()
    }

    fn try_cast(&mut self) -> PResult<Option<Expr>> {
        if self.lambda_ahead() {
            return Ok(None);
        }
        let save = self.pos;
        self.pos += 1;
        let ty = match self.parse_type() {
            Ok(ty) => ty,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        while self.eat_punct("&") {
            if self.parse_type().is_err() {
                self.pos = save;
                return Ok(None);
            }
        }
        if !self.eat_punct(")") {
            self.pos = save;
            return Ok(None);
        }
        let primitive = PRIMITIVES.contains(&ty.name.as_str());
        let next_ok = match &self.tok().tok {
            Tok::Ident(_) | Tok::Int(_) | Tok::Long(_) | Tok::Float(_) | Tok::Double(_) | Tok::Char(_) | Tok::Str(_) => true,
            Tok::Keyword(k) => matches!(*k, "this" | "super" | "new" | "true" | "false" | "null" | "switch") || PRIMITIVES.contains(k),
            Tok::Punct(p) => matches!(*p, "(" | "!" | "~") || (primitive && matches!(*p, "+" | "-" | "++" | "--")),
            Tok::Eof => false,
        };
        if !next_ok {
            self.pos = save;
            return Ok(None);
        }
        let expr = if self.lambda_ahead() {
            self.lambda()?
        } else {
            self.unary()?
        };
        Ok(Some(Expr::Cast {
            ty,
            expr: Box::new(expr),
        }))
    }

    fn lambda_ahead(&self) -> bool {
        if self.is_ident() && self.nth_is_punct(1, "->") {
            return true;
        }
        if !self.is_punct("(") {
            return false;
        }
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            match self.toks[i].tok {
                Tok::Punct("(") => depth += 1,
                Tok::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(self.toks.get(i + 1).map(|t| &t.tok), Some(Tok::Punct("->")));
                    }
                }
                Tok::Punct(";" | "{" | "}") | Tok::Eof => return false,
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let mut params = Vec::new();
        if self.is_ident() {
            params.push((None, self.ident()?));
        } else {
            self.expect_punct("(")?;
            while !self.is_punct(")") {
                self.modifiers()?;
                if self.is_ident() && (self.nth_is_punct(1, ",") || self.nth_is_punct(1, ")")) {
                    params.push((None, self.ident()?));
                } else {
                    let mut ty = self.parse_type()?;
                    if self.eat_punct("...") {
                        ty.dims += 1;
                    }
                    let name = self.ident()?;
                    let ty = if ty.is_var() { None } else { Some(ty) };
                    params.push((ty, name));
                }
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        self.expect_punct("->")?;
        let body = if self.is_punct("{") {
            LambdaBody::Block(self.block()?)
        } else {
            LambdaBody::Expr(Box::new(self.expression()?))
        };
        Ok(Expr::Lambda { params, body })
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        loop {
            if self.lambda_ahead() {
                out.push(self.lambda()?);
            } else {
                out.push(self.expression()?);
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.is_punct(".") {
                self.pos += 1;
                if self.is_punct("<") {
                    self.type_args()?;
                }
                if self.is_kw("new") {
                    // qualified inner creation `outer.new Inner()`
                    e = self.creation()?;
                    continue;
                }
                if self.eat_kw("class") {
                    e = Expr::Opaque;
                    continue;
                }
                if self.is_kw("this") || self.is_kw("super") {
                    let pos = self.here();
                    let sup = self.is_kw("super");
                    self.pos += 1;
                    e = if sup { Expr::Super(pos) } else { Expr::This(pos) };
                    continue;
                }
                let pos = self.here();
                let name = self.ident()?;
                if self.is_punct("(") {
                    let args = self.args()?;
                    e = Expr::Call {
                        pos,
                        target: Some(Box::new(e)),
                        name,
                        args,
                    };
                } else {
                    e = Expr::FieldAccess {
                        pos,
                        target: Box::new(e),
                        name,
                    };
                }
            } else if self.is_punct("[") {
                let pos = self.here();
                self.pos += 1;
                let index = self.expression()?;
                self.expect_punct("]")?;
                e = Expr::Index {
                    pos,
                    array: Box::new(e),
                    index: Box::new(index),
                };
            } else if let Tok::Punct(op @ ("++" | "--")) = self.tok().tok {
                self.pos += 1;
                e = Expr::Unary {
                    op,
                    operand: Box::new(e),
                };
            } else if self.is_punct("::") {
                self.pos += 1;
                let name = if self.eat_kw("new") {
                    "new".to_string()
                } else {
                    self.ident()?
                };
                e = Expr::MethodRef {
                    target: Box::new(e),
                    name,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn creation(&mut self) -> PResult<Expr> {
        let pos = self.here();
        self.pos += 1; // new
        if self.is_punct("<") {
            self.type_args()?;
        }
        let mut ty = self.parse_type_no_dims()?;
        if self.is_punct("[") {
            let mut dim_exprs = Vec::new();
            while self.is_punct("[") {
                self.pos += 1;
                if self.eat_punct("]") {
                    ty.dims += 1;
                    continue;
                }
                dim_exprs.push(self.expression()?);
                self.expect_punct("]")?;
                ty.dims += 1;
            }
            let init = if self.is_punct("{") {
                match self.array_init()? {
                    Expr::ArrayInit(items) => Some(items),
                    _ => None,
                }
            } else {
                None
            };
            return Ok(Expr::NewArray {
                pos,
                ty,
                dim_exprs,
                init,
            });
        }
        let args = self.args()?;
        let body = if self.is_punct("{") {
            Some(self.class_body(false)?)
        } else {
            None
        };
        Ok(Expr::New {
            pos,
            ty,
            args,
            body,
        })
    }

    fn parse_type_no_dims(&mut self) -> PResult<TypeRef> {
        while self.is_punct("@") {
            self.annotation()?;
        }
        let pos = self.here();
        let name = match &self.tok().tok {
            Tok::Keyword(k) if PRIMITIVES.contains(k) => {
                self.pos += 1;
                (*k).to_string()
            }
            Tok::Ident(_) => {
                let mut name = self.ident()?;
                loop {
                    if self.is_punct("<") {
                        self.type_args()?;
                    }
                    if self.is_punct(".") && matches!(self.nth(1).tok, Tok::Ident(_)) {
                        self.pos += 1;
                        name.push('.');
                        name.push_str(&self.ident()?);
                    } else {
                        break;
                    }
                }
                name
            }
            _ => return self.fail(),
        };
        Ok(TypeRef { pos, name, dims: 0 })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.here();
        let t = self.tok();
        let e = match &t.tok {
            Tok::Int(_) => Expr::Literal(LitKind::Int),
            Tok::Long(_) => Expr::Literal(LitKind::Long),
            Tok::Float(_) => Expr::Literal(LitKind::Float),
            Tok::Double(_) => Expr::Literal(LitKind::Double),
            Tok::Char(_) => Expr::Literal(LitKind::Char),
            Tok::Str(_) => Expr::Literal(LitKind::Str),
            Tok::Keyword("true" | "false") => Expr::Literal(LitKind::Bool),
            Tok::Keyword("null") => Expr::Literal(LitKind::Null),
            Tok::Keyword("this") => {
                self.pos += 1;
                if self.is_punct("(") {
                    let args = self.args()?;
                    return Ok(Expr::Call {
                        pos,
                        target: None,
                        name: "this".into(),
                        args,
                    });
                }
                return Ok(Expr::This(pos));
            }
            Tok::Keyword("super") => {
                self.pos += 1;
                return Ok(Expr::Super(pos));
            }
            Tok::Keyword("new") => return self.creation(),
            Tok::Keyword("switch") => {
                self.pos += 1;
                let selector = self.paren_expr()?;
                let body = self.switch_body()?;
                return Ok(Expr::Switch {
                    selector: Box::new(selector),
                    body,
                });
            }
            Tok::Keyword(k) if PRIMITIVES.contains(k) => {
                // `int.class`, `int[]::new`
                let ty = self.parse_type()?;
                if self.is_punct(".") && self.nth_is_kw(1, "class") {
                    self.pos += 2;
                    return Ok(Expr::ClassLiteral(ty));
                }
                if self.is_punct("::") {
                    return Ok(Expr::Opaque);
                }
                return self.fail();
            }
            Tok::Punct("(") => {
                if self.lambda_ahead() {
                    return self.lambda();
                }
                self.pos += 1;
                let e = self.expression()?;
                self.expect_punct(")")?;
                return Ok(e);
            }
            Tok::Ident(name) => {
                if self.nth_is_punct(1, "->") {
                    return self.lambda();
                }
                let name = name.clone();
                self.pos += 1;
                if self.is_punct("(") {
                    let args = self.args()?;
                    return Ok(Expr::Call {
                        pos,
                        target: None,
                        name,
                        args,
                    });
                }
                // array type in expression position: `String[].class`, `Foo[]::new`
                if self.is_punct("[") && self.nth_is_punct(1, "]") {
                    let mut dims = 0;
                    while self.is_punct("[") && self.nth_is_punct(1, "]") {
                        self.pos += 2;
                        dims += 1;
                    }
                    let ty = TypeRef { pos, name, dims };
                    if self.is_punct(".") && self.nth_is_kw(1, "class") {
                        self.pos += 2;
                        return Ok(Expr::ClassLiteral(ty));
                    }
                    return Ok(Expr::Opaque);
                }
                return Ok(Expr::Name { pos, name });
            }
            _ => return self.fail(),
        };
        self.pos += 1;
        Ok(e)
    }
}
