//! Walks a parsed compilation unit and emits abstracted items.

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::*;
use super::{lower_camel, Declaration};
use crate::item::{BlockPath, ControlKind, ControlMarker, ItemKind, SourceItem};

/// Static type of an expression as far as syntax can tell.
#[derive(Debug, Clone, PartialEq)]
enum Ty {
    Known(TypeRef),
    Null,
    Unknown,
}

impl Ty {
    fn prim(name: &str) -> Ty {
        Ty::Known(TypeRef {
            pos: Pos::default(),
            name: name.to_string(),
            dims: 0,
        })
    }
}

/// Whether `name` looks like a constant (`K_COMPILATION_UNIT`, `JLS3`).
fn is_constant_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
        && !name.chars().any(|c| c.is_lowercase())
}

fn starts_upper(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase())
}

struct ClassCtx {
    path: String,
    simple: String,
    superclass: Option<TypeRef>,
    fields: HashMap<String, TypeRef>,
}

pub(super) struct Walker {
    file: Arc<str>,
    package: Option<String>,
    /// Simple name to qualified name; `None` when two imports collide.
    imports: HashMap<String, Option<String>>,
    pub items: Vec<SourceItem>,
    pub markers: Vec<ControlMarker>,
    pub declarations: Vec<Declaration>,
    classes: Vec<ClassCtx>,
    scopes: Vec<HashMap<String, Option<TypeRef>>>,
    block: BlockPath,
    method_ret: Option<TypeRef>,
    lambda_depth: usize,
    anon_counters: HashMap<String, usize>,
}

impl Walker {
    pub fn new(file: Arc<str>) -> Self {
        let block = BlockPath::File(file.to_string());
        Walker {
            file,
            package: None,
            imports: HashMap::new(),
            items: Vec::new(),
            markers: Vec::new(),
            declarations: Vec::new(),
            classes: Vec::new(),
            scopes: Vec::new(),
            block,
            method_ret: None,
            lambda_depth: 0,
            anon_counters: HashMap::new(),
        }
    }

    // ----- emission -------------------------------------------------------------

    fn emit(&mut self, kind: ItemKind, name: String, pos: Pos, label: Option<String>, vars: Vec<String>) {
        let mut vars = vars;
        vars.sort();
        vars.dedup();
        self.items.push(SourceItem {
            kind,
            name,
            enclosing: self.block.clone(),
            file: self.file.clone(),
            line: pos.line,
            column: pos.column,
            action_label: label,
            vars,
        });
    }

    fn marker(&mut self, kind: ControlKind, pos: Pos, vars: Vec<String>) {
        let mut vars = vars;
        vars.sort();
        vars.dedup();
        self.markers.push(ControlMarker {
            kind,
            enclosing: self.block.clone(),
            file: self.file.clone(),
            line: pos.line,
            column: pos.column,
            vars,
        });
    }

    fn declare(&mut self, name: &str, ty: Option<TypeRef>, pos: Pos) {
        if let Some(t) = &ty {
            self.declarations.push(Declaration {
                name: name.to_string(),
                type_name: self.render_type(t),
                enclosing: self.block.clone(),
                line: pos.line,
            });
        }
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name.to_string(), ty);
        }
    }

    // ----- name resolution ---------------------------------------------------------

    fn resolve_name(&self, name: &str) -> String {
        let (head, rest) = match name.split_once('.') {
            Some((h, r)) => (h, Some(r)),
            None => (name, None),
        };
        match self.imports.get(head) {
            Some(Some(q)) => match rest {
                Some(r) => format!("{q}.{r}"),
                None => q.clone(),
            },
            _ => name.to_string(),
        }
    }

    pub(super) fn render_type(&self, t: &TypeRef) -> String {
        let mut s = self.resolve_name(&t.name);
        for _ in 0..t.dims {
            s.push_str("[]");
        }
        s
    }

    fn simple_with_dims(t: &TypeRef) -> String {
        let mut s = t.simple_name().to_string();
        for _ in 0..t.dims {
            s.push_str("[]");
        }
        s
    }

    fn current_class(&self) -> Option<&ClassCtx> {
        self.classes.last()
    }

    fn class_type(&self) -> Option<TypeRef> {
        self.current_class().map(|c| TypeRef {
            pos: Pos::default(),
            name: c.simple.clone(),
            dims: 0,
        })
    }

    /// Looks up a variable: locals innermost first, then fields of the
    /// enclosing classes. `Some(None)` means declared without a type.
    fn lookup(&self, name: &str) -> Option<Option<TypeRef>> {
        for scope in self.scopes.iter().rev() {
            if let Some(t) = scope.get(name) {
                return Some(t.clone());
            }
        }
        for class in self.classes.iter().rev() {
            if let Some(t) = class.fields.get(name) {
                return Some(Some(t.clone()));
            }
        }
        None
    }

    fn field_type(&self, name: &str) -> Option<TypeRef> {
        self.current_class().and_then(|c| c.fields.get(name).cloned())
    }

    /// Dotted package prefix made of undeclared lower-case names.
    fn package_path(&self, e: &Expr) -> Option<String> {
        match e {
            Expr::Name { name, .. } if !starts_upper(name) && self.lookup(name).is_none() => {
                Some(name.clone())
            }
            Expr::FieldAccess { target, name, .. } if !starts_upper(name) => {
                self.package_path(target).map(|p| format!("{p}.{name}"))
            }
            _ => None,
        }
    }

    /// The type named by `e` when `e` denotes a type rather than a value.
    fn static_type_path(&self, e: &Expr) -> Option<String> {
        match e {
            Expr::Name { name, .. } if starts_upper(name) && self.lookup(name).is_none() => {
                Some(name.clone())
            }
            Expr::FieldAccess { target, name, .. } if starts_upper(name) && !is_constant_name(name) => {
                if let Some(t) = self.static_type_path(target) {
                    return Some(format!("{t}.{name}"));
                }
                self.package_path(target).map(|p| format!("{p}.{name}"))
            }
            _ => None,
        }
    }

    fn var_of(&self, e: &Expr) -> Option<String> {
        match e {
            Expr::Name { name, .. } if self.lookup(name).is_some() => Some(name.clone()),
            Expr::FieldAccess { target, name, .. } if matches!(**target, Expr::This(_)) => {
                Some(name.clone())
            }
            Expr::Cast { expr, .. } => self.var_of(expr),
            Expr::Assign { target, .. } => self.var_of(target),
            _ => None,
        }
    }

    fn type_of(&self, e: &Expr) -> Ty {
        match e {
            Expr::Literal(k) => match k {
                LitKind::Int => Ty::prim("int"),
                LitKind::Long => Ty::prim("long"),
                LitKind::Float => Ty::prim("float"),
                LitKind::Double => Ty::prim("double"),
                LitKind::Char => Ty::prim("char"),
                LitKind::Str => Ty::prim("String"),
                LitKind::Bool => Ty::prim("boolean"),
                LitKind::Null => Ty::Null,
            },
            Expr::Name { name, .. } => match self.lookup(name) {
                Some(Some(t)) => Ty::Known(t),
                _ => Ty::Unknown,
            },
            Expr::This(_) => self.class_type().map(Ty::Known).unwrap_or(Ty::Unknown),
            Expr::FieldAccess { target, name, .. } => {
                if matches!(**target, Expr::This(_)) {
                    return self.field_type(name).map(Ty::Known).unwrap_or(Ty::Unknown);
                }
                if self.static_type_path(target).is_some() || self.package_path(target).is_some() {
                    if is_constant_name(name) {
                        return Ty::prim("int");
                    }
                    return Ty::Unknown;
                }
                if name == "length" {
                    if let Ty::Known(t) = self.type_of(target) {
                        if t.dims > 0 {
                            return Ty::prim("int");
                        }
                    }
                }
                Ty::Unknown
            }
            Expr::New { ty, .. } => Ty::Known(ty.clone()),
            Expr::NewArray { ty, .. } => Ty::Known(ty.clone()),
            Expr::Cast { ty, .. } => Ty::Known(ty.clone()),
            Expr::Index { array, .. } => match self.type_of(array) {
                Ty::Known(t) if t.dims > 0 => Ty::Known(TypeRef {
                    dims: t.dims - 1,
                    ..t
                }),
                _ => Ty::Unknown,
            },
            Expr::Assign { target, .. } => self.type_of(target),
            Expr::InstanceOf { .. } => Ty::prim("boolean"),
            Expr::Unary { op, operand } => {
                if *op == "!" {
                    Ty::prim("boolean")
                } else {
                    self.type_of(operand)
                }
            }
            Expr::Binary { op, lhs, rhs } => match *op {
                "||" | "&&" | "==" | "!=" | "<" | ">" | "<=" | ">=" => Ty::prim("boolean"),
                _ => {
                    let (l, r) = (self.type_of(lhs), self.type_of(rhs));
                    let is_string = |t: &Ty| matches!(t, Ty::Known(t) if t.name == "String" && t.dims == 0);
                    if *op == "+" && (is_string(&l) || is_string(&r)) {
                        return Ty::prim("String");
                    }
                    numeric_promotion(&l, &r)
                }
            },
            Expr::Conditional { then, otherwise, .. } => match self.type_of(then) {
                Ty::Known(t) => Ty::Known(t),
                _ => self.type_of(otherwise),
            },
            Expr::ClassLiteral(_) => Ty::prim("Class"),
            _ => Ty::Unknown,
        }
    }

    fn arg_types(&self, args: &[Expr]) -> String {
        args.iter()
            .map(|a| match self.type_of(a) {
                Ty::Known(t) => self.render_type(&t),
                Ty::Null => "null".to_string(),
                Ty::Unknown => "Object".to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn arg_vars(&self, args: &[Expr]) -> Vec<String> {
        args.iter().filter_map(|a| self.var_of(a)).collect()
    }

    // ----- declarations --------------------------------------------------------------

    pub fn compilation_unit(&mut self, cu: &CompilationUnit) {
        let file_scope = match &cu.package {
            Some((_, name)) => name.clone(),
            None => self.file.to_string(),
        };
        self.block = BlockPath::File(file_scope);
        if let Some((pos, name)) = &cu.package {
            self.package = Some(name.clone());
            self.emit(ItemKind::PackageDeclaration, name.clone(), *pos, None, Vec::new());
        }
        for imp in &cu.imports {
            self.emit(ItemKind::ImportDeclaration, imp.path.clone(), imp.pos, None, Vec::new());
            if imp.wildcard || imp.is_static {
                continue;
            }
            let simple = imp.path.rsplit('.').next().unwrap_or(&imp.path).to_string();
            match self.imports.get(&simple) {
                Some(Some(existing)) if existing != &imp.path => {
                    self.imports.insert(simple, None);
                }
                Some(_) => {}
                None => {
                    self.imports.insert(simple, Some(imp.path.clone()));
                }
            }
        }
        for td in &cu.types {
            let path = match &self.package {
                Some(p) => format!("{p}.{}", td.name),
                None => td.name.clone(),
            };
            self.type_decl(td, path, true);
        }
    }

    fn type_decl(&mut self, td: &TypeDecl, path: String, emit_td: bool) {
        let saved_block = std::mem::replace(&mut self.block, BlockPath::Class(path.clone()));
        if emit_td {
            self.emit(ItemKind::TypeDeclaration, path.clone(), td.pos, None, Vec::new());
        }
        self.class_body(td, path, saved_block);
    }

    fn class_body(&mut self, td: &TypeDecl, path: String, saved_block: BlockPath) {
        let superclass = if td.flavor == TypeFlavor::Class {
            td.extends.first().cloned()
        } else {
            None
        };
        for t in &td.extends {
            let name = self.render_type(t);
            self.emit(ItemKind::SuperClassInheritance, name, t.pos, None, Vec::new());
        }
        for t in &td.implements {
            let name = self.render_type(t);
            self.emit(ItemKind::InterfaceImplementation, name, t.pos, None, Vec::new());
        }
        self.members(&td.members, &td.components, path, td.name.clone(), superclass);
        self.block = saved_block;
    }

    fn members(
        &mut self,
        members: &[Member],
        components: &[Param],
        path: String,
        simple: String,
        superclass: Option<TypeRef>,
    ) {
        let mut fields = HashMap::new();
        for p in components {
            fields.insert(p.name.clone(), p.ty.clone());
        }
        for m in members {
            if let Member::Field(f) = m {
                for d in &f.declarators {
                    let mut ty = f.ty.clone();
                    ty.dims += d.extra_dims;
                    fields.insert(d.name.clone(), ty);
                }
            }
        }
        for (name, ty) in &fields {
            self.declarations.push(Declaration {
                name: name.clone(),
                type_name: self.render_type(ty),
                enclosing: BlockPath::Class(path.clone()),
                line: ty.pos.line,
            });
        }
        self.classes.push(ClassCtx {
            path: path.clone(),
            simple,
            superclass,
            fields,
        });
        let saved_scopes = std::mem::take(&mut self.scopes);
        for m in members {
            self.block = BlockPath::Class(path.clone());
            match m {
                Member::Field(f) => {
                    let name = self.render_type(&f.ty);
                    self.emit(ItemKind::FieldDeclaration, name, f.pos, None, Vec::new());
                    for d in &f.declarators {
                        if let Some(init) = &d.init {
                            self.expr(init, Some(d.name.clone()));
                        }
                    }
                }
                Member::Method(md) => self.method(md, &path),
                Member::Type(inner) => {
                    let inner_path = format!("{path}.{}", inner.name);
                    self.type_decl(inner, inner_path, true);
                }
                Member::Initializer(block) => {
                    self.scopes.push(HashMap::new());
                    self.block_stmts(block);
                    self.scopes.pop();
                }
                Member::EnumConstant { args, body, .. } => {
                    for a in args {
                        self.expr(a, None);
                    }
                    if let Some(body) = body {
                        self.anonymous_body(body, None);
                    }
                }
            }
        }
        self.scopes = saved_scopes;
        self.classes.pop();
    }

    fn method(&mut self, md: &MethodDecl, class_path: &str) {
        let written: Vec<String> = md
            .params
            .iter()
            .map(|p| {
                let mut s = p.ty.name.clone();
                for _ in 0..p.ty.dims {
                    s.push_str("[]");
                }
                s
            })
            .collect();
        let signature = format!("{}({})", md.name, written.join(","));
        self.block = BlockPath::Method {
            class: class_path.to_string(),
            method: signature,
        };
        let params: Vec<String> = md.params.iter().map(|p| self.render_type(&p.ty)).collect();
        let name = match &md.ret {
            Some(ret) => format!("{}({}): {}", md.name, params.join(","), self.render_type(ret)),
            None => format!("{}({})", md.name, params.join(",")),
        };
        self.emit(ItemKind::MethodDeclaration, name, md.pos, None, Vec::new());
        let saved_ret = std::mem::replace(&mut self.method_ret, md.ret.clone());
        self.scopes.push(HashMap::new());
        for p in &md.params {
            self.declare(&p.name, Some(p.ty.clone()), p.ty.pos);
        }
        if let Some(body) = &md.body {
            self.block_stmts(body);
        }
        self.scopes.pop();
        self.method_ret = saved_ret;
    }

    fn anonymous_body(&mut self, body: &[Member], base: Option<&TypeRef>) {
        let outer = self
            .current_class()
            .map(|c| c.path.clone())
            .unwrap_or_else(|| self.block.class_path().to_string());
        let counter = self.anon_counters.entry(outer.clone()).or_insert(0);
        *counter += 1;
        let path = format!("{outer}${counter}");
        let simple = base.map(|b| b.simple_name().to_string()).unwrap_or_else(|| path.clone());
        let saved_block = std::mem::replace(&mut self.block, BlockPath::Class(path.clone()));
        let saved_ret = self.method_ret.take();
        let saved_lambda = std::mem::replace(&mut self.lambda_depth, 0);
        // anonymous bodies still see the enclosing locals
        let outer_scopes = self.scopes.clone();
        self.members(body, &[], path, simple, base.cloned());
        self.scopes = outer_scopes;
        self.lambda_depth = saved_lambda;
        self.method_ret = saved_ret;
        self.block = saved_block;
    }

    // ----- statements ----------------------------------------------------------------

    fn block_stmts(&mut self, block: &Block) {
        self.scopes.push(HashMap::new());
        for s in &block.stmts {
            self.stmt(s);
        }
        self.scopes.pop();
    }

    fn scoped_stmt(&mut self, s: &Stmt) {
        self.scopes.push(HashMap::new());
        self.stmt(s);
        self.scopes.pop();
    }

    fn expr_names(&self, e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Name { name, .. } => {
                if self.lookup(name).is_some() {
                    out.push(name.clone());
                }
            }
            Expr::FieldAccess { target, name, .. } => {
                if matches!(**target, Expr::This(_)) {
                    out.push(name.clone());
                } else {
                    self.expr_names(target, out);
                }
            }
            Expr::Call { target, args, .. } => {
                if let Some(t) = target {
                    self.expr_names(t, out);
                }
                for a in args {
                    self.expr_names(a, out);
                }
            }
            Expr::Index { array, index, .. } => {
                self.expr_names(array, out);
                self.expr_names(index, out);
            }
            Expr::Assign { target, value, .. } => {
                self.expr_names(target, out);
                self.expr_names(value, out);
            }
            Expr::Binary { lhs, rhs, .. } => {
                self.expr_names(lhs, out);
                self.expr_names(rhs, out);
            }
            Expr::Unary { operand, .. } => self.expr_names(operand, out),
            Expr::Cast { expr, .. } | Expr::InstanceOf { expr, .. } => self.expr_names(expr, out),
            Expr::Conditional { cond, then, otherwise } => {
                self.expr_names(cond, out);
                self.expr_names(then, out);
                self.expr_names(otherwise, out);
            }
            _ => {}
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Block(b) => self.block_stmts(b),
            Stmt::LocalVar { pos, ty, declarators } => self.local_var(*pos, ty, declarators),
            Stmt::LocalClass(td) => {
                let outer = self
                    .current_class()
                    .map(|c| c.path.clone())
                    .unwrap_or_default();
                self.emit(ItemKind::TypeDeclaration, td.name.clone(), td.pos, None, Vec::new());
                let saved_block = self.block.clone();
                let saved_ret = self.method_ret.take();
                let outer_scopes = self.scopes.clone();
                self.block = BlockPath::Class(format!("{outer}.{}", td.name));
                self.class_body(td, format!("{outer}.{}", td.name), saved_block);
                self.scopes = outer_scopes;
                self.method_ret = saved_ret;
            }
            Stmt::Expr(e) => self.expr(e, None),
            Stmt::If {
                pos,
                end,
                cond,
                then,
                otherwise,
            } => {
                let mut vars = Vec::new();
                self.expr_names(cond, &mut vars);
                self.marker(ControlKind::IfBegin, *pos, vars);
                self.expr(cond, None);
                self.scoped_stmt(then);
                if let Some(o) = otherwise {
                    self.scoped_stmt(o);
                }
                self.marker(ControlKind::IfEnd, *end, Vec::new());
            }
            Stmt::While { pos, end, cond, body } => {
                let mut vars = Vec::new();
                self.expr_names(cond, &mut vars);
                self.marker(ControlKind::LoopBegin, *pos, vars);
                self.expr(cond, None);
                self.scoped_stmt(body);
                self.marker(ControlKind::LoopEnd, *end, Vec::new());
            }
            Stmt::DoWhile { pos, end, body, cond } => {
                let mut vars = Vec::new();
                self.expr_names(cond, &mut vars);
                self.marker(ControlKind::LoopBegin, *pos, vars);
                self.scoped_stmt(body);
                self.expr(cond, None);
                self.marker(ControlKind::LoopEnd, *end, Vec::new());
            }
            Stmt::For {
                pos,
                end,
                init,
                cond,
                update,
                body,
            } => {
                self.scopes.push(HashMap::new());
                let mut vars = Vec::new();
                if let Some(c) = cond {
                    self.expr_names(c, &mut vars);
                }
                self.marker(ControlKind::LoopBegin, *pos, vars);
                for i in init {
                    self.stmt(i);
                }
                if let Some(c) = cond {
                    self.expr(c, None);
                }
                for u in update {
                    self.expr(u, None);
                }
                self.scoped_stmt(body);
                self.marker(ControlKind::LoopEnd, *end, Vec::new());
                self.scopes.pop();
            }
            Stmt::ForEach {
                pos,
                end,
                var,
                iterable,
                body,
            } => {
                self.scopes.push(HashMap::new());
                let mut vars = Vec::new();
                self.expr_names(iterable, &mut vars);
                self.marker(ControlKind::LoopBegin, *pos, vars);
                self.expr(iterable, None);
                let ty = self.local_type(&var.ty, None);
                let name = self.render_type(&ty);
                self.emit(ItemKind::VariableDeclaration, name, var.ty.pos, None, vec![var.name.clone()]);
                self.declare(&var.name, Some(ty), var.ty.pos);
                self.scoped_stmt(body);
                self.marker(ControlKind::LoopEnd, *end, Vec::new());
                self.scopes.pop();
            }
            Stmt::Return { pos, value } => {
                let name = match value {
                    None => "void".to_string(),
                    Some(v) => match self.type_of(v) {
                        Ty::Known(t) => self.render_type(&t),
                        Ty::Null | Ty::Unknown => match (&self.method_ret, self.lambda_depth) {
                            (Some(ret), 0) => self.render_type(ret),
                            _ => "Object".to_string(),
                        },
                    },
                };
                let vars = value.as_ref().and_then(|v| self.var_of(v)).into_iter().collect();
                self.emit(ItemKind::ReturnStatement, name, *pos, None, vars);
                if let Some(v) = value {
                    self.expr(v, None);
                }
            }
            Stmt::Throw(e) => self.expr(e, None),
            Stmt::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                self.scopes.push(HashMap::new());
                for r in resources {
                    self.stmt(r);
                }
                self.block_stmts(body);
                self.scopes.pop();
                for (param, block) in catches {
                    self.scopes.push(HashMap::new());
                    self.declare(&param.name, Some(param.ty.clone()), param.ty.pos);
                    self.block_stmts(block);
                    self.scopes.pop();
                }
                if let Some(f) = finally {
                    self.block_stmts(f);
                }
            }
            Stmt::Switch { selector, body } => {
                self.expr(selector, None);
                self.scopes.push(HashMap::new());
                for s in body {
                    self.stmt(s);
                }
                self.scopes.pop();
            }
            Stmt::Synchronized { lock, body } => {
                self.expr(lock, None);
                self.block_stmts(body);
            }
            Stmt::ExplicitCtor { pos, is_super, args } => self.explicit_ctor(*pos, *is_super, args),
            Stmt::Assert(exprs) => {
                for e in exprs {
                    self.expr(e, None);
                }
            }
            Stmt::Skipped => {}
        }
    }

    /// Resolves `var` declarations from their initializer.
    fn local_type(&self, ty: &TypeRef, init: Option<&Expr>) -> TypeRef {
        if !ty.is_var() {
            return ty.clone();
        }
        match init.map(|e| self.type_of(e)) {
            Some(Ty::Known(t)) => TypeRef { pos: ty.pos, ..t },
            _ => TypeRef {
                pos: ty.pos,
                name: "Object".to_string(),
                dims: 0,
            },
        }
    }

    fn local_var(&mut self, pos: Pos, ty: &TypeRef, declarators: &[Declarator]) {
        let first_init = declarators.first().and_then(|d| d.init.as_ref());
        let declared = self.local_type(ty, first_init);
        let name = self.render_type(&declared);
        let vars = declarators.iter().map(|d| d.name.clone()).collect();
        self.emit(ItemKind::VariableDeclaration, name, pos, None, vars);
        for d in declarators {
            let mut t = self.local_type(ty, d.init.as_ref());
            t.dims += d.extra_dims;
            if let Some(init) = &d.init {
                self.expr(init, Some(d.name.clone()));
            }
            self.declare(&d.name, Some(t), pos);
        }
    }

    fn explicit_ctor(&mut self, pos: Pos, is_super: bool, args: &[Expr]) {
        let types = self.arg_types(args);
        let vars = self.arg_vars(args);
        if is_super {
            let owner = self
                .current_class()
                .and_then(|c| c.superclass.as_ref())
                .map(|t| t.simple_name().to_string())
                .unwrap_or_else(|| "Object".to_string());
            self.emit(
                ItemKind::SuperConstructorInvocation,
                format!("super({types})"),
                pos,
                Some(format!("{owner}.<init>")),
                vars,
            );
        } else {
            let owner = self
                .current_class()
                .map(|c| c.simple.clone())
                .unwrap_or_else(|| "unknown".to_string());
            self.emit(
                ItemKind::ConstructorInvocation,
                format!("this({types})"),
                pos,
                Some(format!("{owner}.<init>")),
                vars,
            );
        }
        for a in args {
            self.expr(a, None);
        }
    }

    // ----- expressions ---------------------------------------------------------------

    /// Receiver text and label owner for a member access on `target`.
    fn receiver(&self, target: &Expr) -> (String, String) {
        if let Expr::Super(_) = target {
            let owner = self
                .current_class()
                .and_then(|c| c.superclass.as_ref())
                .map(|t| t.simple_name().to_string())
                .unwrap_or_else(|| "Object".to_string());
            return ("super".to_string(), owner);
        }
        if let Some(path) = self.static_type_path(target) {
            let simple = path.rsplit('.').next().unwrap_or(&path).to_string();
            return (self.resolve_name(&path), simple);
        }
        match self.type_of(target) {
            Ty::Known(t) => {
                let simple = Self::simple_with_dims(&t);
                (lower_camel(&simple), simple)
            }
            _ => ("unknown".to_string(), "unknown".to_string()),
        }
    }

    fn expr(&mut self, e: &Expr, def: Option<String>) {
        match e {
            Expr::Call {
                pos,
                target,
                name,
                args,
            } => {
                if target.is_none() && name == "this" {
                    self.explicit_ctor(*pos, false, args);
                    return;
                }
                let types = self.arg_types(args);
                let mut vars = self.arg_vars(args);
                vars.extend(def);
                let (item_name, owner) = match target {
                    None => {
                        let owner = self
                            .current_class()
                            .map(|c| c.simple.clone())
                            .unwrap_or_else(|| "unknown".to_string());
                        (format!("{name}({types})"), owner)
                    }
                    Some(t) => {
                        vars.extend(self.var_of(t));
                        let (recv, owner) = self.receiver(t);
                        (format!("{recv}.{name}({types})"), owner)
                    }
                };
                self.emit(
                    ItemKind::MethodInvocation,
                    item_name,
                    *pos,
                    Some(format!("{owner}.{name}")),
                    vars,
                );
                if let Some(t) = target {
                    self.expr(t, None);
                }
                for a in args {
                    self.expr(a, None);
                }
            }
            Expr::New { pos, ty, args, body } => {
                let type_name = self.render_type(ty);
                let mut vars = self.arg_vars(args);
                vars.extend(def);
                match body {
                    None => {
                        let types = self.arg_types(args);
                        self.emit(
                            ItemKind::ClassInstanceCreation,
                            format!("{type_name}({types})"),
                            *pos,
                            Some(format!("{}.<init>", ty.simple_name())),
                            vars,
                        );
                        for a in args {
                            self.expr(a, None);
                        }
                    }
                    Some(members) => {
                        self.emit(ItemKind::AnonymousClassDeclaration, type_name, *pos, None, vars);
                        for a in args {
                            self.expr(a, None);
                        }
                        self.anonymous_body(members, Some(ty));
                    }
                }
            }
            Expr::NewArray {
                pos,
                ty,
                dim_exprs,
                init,
            } => {
                let vars = def.into_iter().collect();
                self.emit(ItemKind::ArrayCreation, self.render_type(ty), *pos, None, vars);
                for d in dim_exprs {
                    self.expr(d, None);
                }
                for i in init.iter().flatten() {
                    self.expr(i, None);
                }
            }
            Expr::ArrayInit(items) => {
                for i in items {
                    self.expr(i, None);
                }
            }
            Expr::Index { pos, array, index } => {
                let name = match self.type_of(array) {
                    Ty::Known(t) if t.dims > 0 => self.render_type(&t),
                    _ => "unknown[]".to_string(),
                };
                let vars = self.var_of(array).into_iter().chain(def).collect();
                self.emit(ItemKind::ArrayAccess, name, *pos, None, vars);
                self.expr(array, None);
                self.expr(index, None);
            }
            Expr::FieldAccess { pos, target, name } => {
                let is_type = self.static_type_path(target).is_some()
                    || self.package_path(target).is_some()
                    || self.static_type_path(e).is_some();
                if !is_type {
                    let (recv, owner) = self.receiver(target);
                    let mut vars: Vec<String> = self.var_of(target).into_iter().collect();
                    if matches!(**target, Expr::This(_)) {
                        vars.push(name.clone());
                    }
                    vars.extend(def);
                    self.emit(
                        ItemKind::FieldAccess,
                        format!("{recv}.{name}"),
                        *pos,
                        Some(format!("{owner}.{name}")),
                        vars,
                    );
                    self.expr(target, None);
                }
            }
            Expr::Assign { target, value, .. } => {
                let def = self.var_of(target).or(def);
                self.expr(target, None);
                self.expr(value, def);
            }
            Expr::Binary { lhs, rhs, .. } => {
                self.expr(lhs, None);
                self.expr(rhs, None);
            }
            Expr::Unary { operand, .. } => self.expr(operand, None),
            Expr::Cast { expr, .. } => self.expr(expr, def),
            Expr::InstanceOf { expr, ty, binding } => {
                self.expr(expr, None);
                if let Some(b) = binding {
                    self.declare(b, Some(ty.clone()), ty.pos);
                }
            }
            Expr::Conditional {
                cond,
                then,
                otherwise,
            } => {
                self.expr(cond, None);
                self.expr(then, def.clone());
                self.expr(otherwise, def);
            }
            Expr::Lambda { params, body } => {
                self.lambda_depth += 1;
                self.scopes.push(HashMap::new());
                for (ty, name) in params {
                    if let Some(scope) = self.scopes.last_mut() {
                        scope.insert(name.clone(), ty.clone());
                    }
                }
                match body {
                    LambdaBody::Expr(e) => self.expr(e, None),
                    LambdaBody::Block(b) => self.block_stmts(b),
                }
                self.scopes.pop();
                self.lambda_depth -= 1;
            }
            Expr::MethodRef { target, .. } => self.expr(target, None),
            Expr::Switch { selector, body } => {
                self.expr(selector, None);
                self.scopes.push(HashMap::new());
                for s in body {
                    self.stmt(s);
                }
                self.scopes.pop();
            }
            Expr::Literal(_)
            | Expr::Name { .. }
            | Expr::This(_)
            | Expr::Super(_)
            | Expr::ClassLiteral(_)
            | Expr::Opaque => {}
        }
    }
}

fn numeric_promotion(l: &Ty, r: &Ty) -> Ty {
    const ORDER: [&str; 7] = ["byte", "short", "char", "int", "long", "float", "double"];
    let rank = |t: &Ty| match t {
        Ty::Known(t) if t.dims == 0 => ORDER.iter().position(|p| *p == t.name),
        _ => None,
    };
    match (rank(l), rank(r)) {
        (Some(a), Some(b)) => Ty::prim(ORDER[a.max(b).max(3)]),
        (Some(a), None) | (None, Some(a)) => Ty::prim(ORDER[a.max(3)]),
        (None, None) => Ty::Unknown,
    }
}
