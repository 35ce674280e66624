//! Syntax tree for the supported Java subset.
//!
//! Only the shapes needed for abstraction are modelled; anything the parser
//! cannot place is dropped as [`Stmt::Skipped`] or [`Expr::Opaque`].

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

/// A type as written, with generic arguments stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub pos: Pos,
    /// Dotted name, e.g. `Map.Entry` or `int`.
    pub name: String,
    pub dims: usize,
}

impl TypeRef {
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    pub fn is_var(&self) -> bool {
        self.name == "var" && self.dims == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompilationUnit {
    pub package: Option<(Pos, String)>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
}

#[derive(Debug, Clone)]
pub struct Import {
    pub pos: Pos,
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeFlavor {
    Class,
    Interface,
    Enum,
    Record,
}

#[derive(Debug, Clone)]
pub struct TypeDecl {
    pub pos: Pos,
    pub flavor: TypeFlavor,
    pub name: String,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    /// Record components act as fields.
    pub components: Vec<Param>,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Type(TypeDecl),
    Initializer(Block),
    EnumConstant {
        pos: Pos,
        args: Vec<Expr>,
        body: Option<Vec<Member>>,
    },
}

#[derive(Debug, Clone)]
pub struct FieldDecl {
    pub pos: Pos,
    pub ty: TypeRef,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone)]
pub struct Declarator {
    pub name: String,
    pub extra_dims: usize,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub pos: Pos,
    pub name: String,
    /// `None` for constructors.
    pub ret: Option<TypeRef>,
    pub params: Vec<Param>,
    pub body: Option<Block>,
}

#[derive(Debug, Clone, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Block(Block),
    LocalVar {
        pos: Pos,
        ty: TypeRef,
        declarators: Vec<Declarator>,
    },
    LocalClass(TypeDecl),
    Expr(Expr),
    If {
        pos: Pos,
        end: Pos,
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    While {
        pos: Pos,
        end: Pos,
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        pos: Pos,
        end: Pos,
        body: Box<Stmt>,
        cond: Expr,
    },
    For {
        pos: Pos,
        end: Pos,
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        pos: Pos,
        end: Pos,
        var: Param,
        iterable: Expr,
        body: Box<Stmt>,
    },
    Return {
        pos: Pos,
        value: Option<Expr>,
    },
    Throw(Expr),
    Try {
        resources: Vec<Stmt>,
        body: Block,
        catches: Vec<(Param, Block)>,
        finally: Option<Block>,
    },
    Switch {
        selector: Expr,
        body: Vec<Stmt>,
    },
    Synchronized {
        lock: Expr,
        body: Block,
    },
    /// `this(...)` or `super(...)` at statement level.
    ExplicitCtor {
        pos: Pos,
        is_super: bool,
        args: Vec<Expr>,
    },
    Assert(Vec<Expr>),
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitKind {
    Int,
    Long,
    Float,
    Double,
    Char,
    Str,
    Bool,
    Null,
}

#[derive(Debug, Clone)]
pub enum LambdaBody {
    Expr(Box<Expr>),
    Block(Block),
}

#[derive(Debug, Clone)]
pub enum Expr {
    Literal(LitKind),
    Name {
        pos: Pos,
        name: String,
    },
    This(Pos),
    Super(Pos),
    FieldAccess {
        pos: Pos,
        target: Box<Expr>,
        name: String,
    },
    Call {
        pos: Pos,
        target: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        pos: Pos,
        ty: TypeRef,
        args: Vec<Expr>,
        body: Option<Vec<Member>>,
    },
    NewArray {
        pos: Pos,
        ty: TypeRef,
        dim_exprs: Vec<Expr>,
        init: Option<Vec<Expr>>,
    },
    ArrayInit(Vec<Expr>),
    Index {
        pos: Pos,
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Assign {
        target: Box<Expr>,
        op: &'static str,
        value: Box<Expr>,
    },
    Binary {
        op: &'static str,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: &'static str,
        operand: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
        binding: Option<String>,
    },
    Conditional {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Lambda {
        params: Vec<(Option<TypeRef>, String)>,
        body: LambdaBody,
    },
    MethodRef {
        target: Box<Expr>,
        name: String,
    },
    ClassLiteral(TypeRef),
    Switch {
        selector: Box<Expr>,
        body: Vec<Stmt>,
    },
    Opaque,
}
