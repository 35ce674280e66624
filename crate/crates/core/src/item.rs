//! Abstracted code entities.
//!
//! A [`SourceItem`] is one syntactic construct reduced to a kind tag and a
//! qualified name. Mining identity is the [`ItemKey`] pair only; the block
//! path, line, column and usage metadata ride along for reporting and for
//! groum construction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// The seventeen kinds of abstracted items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    /// `package foo.biz;`
    PackageDeclaration,
    /// `import java.io.File;`
    ImportDeclaration,
    /// `class Example { }`
    TypeDeclaration,
    /// `private Connection conn;`
    FieldDeclaration,
    /// `new File()`
    ClassInstanceCreation,
    /// `public File method(String s) { }`
    MethodDeclaration,
    /// `file.open(name)`
    MethodInvocation,
    /// `implements Runnable`
    InterfaceImplementation,
    /// `String s` inside a method body
    VariableDeclaration,
    /// `new Enumeration() { }`
    AnonymousClassDeclaration,
    /// `array[i]`
    ArrayAccess,
    /// `new File[n]`
    ArrayCreation,
    /// `this(arg)`
    ConstructorInvocation,
    /// `object.field = 2`
    FieldAccess,
    /// `super(arg)`
    SuperConstructorInvocation,
    /// `return value;`
    ReturnStatement,
    /// `extends SuperClass`
    SuperClassInheritance,
}

impl ItemKind {
    pub const ALL: [ItemKind; 17] = [
        ItemKind::PackageDeclaration,
        ItemKind::ImportDeclaration,
        ItemKind::TypeDeclaration,
        ItemKind::FieldDeclaration,
        ItemKind::ClassInstanceCreation,
        ItemKind::MethodDeclaration,
        ItemKind::MethodInvocation,
        ItemKind::InterfaceImplementation,
        ItemKind::VariableDeclaration,
        ItemKind::AnonymousClassDeclaration,
        ItemKind::ArrayAccess,
        ItemKind::ArrayCreation,
        ItemKind::ConstructorInvocation,
        ItemKind::FieldAccess,
        ItemKind::SuperConstructorInvocation,
        ItemKind::ReturnStatement,
        ItemKind::SuperClassInheritance,
    ];

    /// Short code used in dumps and XML attributes.
    pub fn code(self) -> &'static str {
        match self {
            ItemKind::PackageDeclaration => "PD",
            ItemKind::ImportDeclaration => "ID",
            ItemKind::TypeDeclaration => "TD",
            ItemKind::FieldDeclaration => "FD",
            ItemKind::ClassInstanceCreation => "CI",
            ItemKind::MethodDeclaration => "MD",
            ItemKind::MethodInvocation => "MI",
            ItemKind::InterfaceImplementation => "II",
            ItemKind::VariableDeclaration => "VD",
            ItemKind::AnonymousClassDeclaration => "ACD",
            ItemKind::ArrayAccess => "AA",
            ItemKind::ArrayCreation => "AC",
            ItemKind::ConstructorInvocation => "CTI",
            ItemKind::FieldAccess => "FA",
            ItemKind::SuperConstructorInvocation => "SCI",
            ItemKind::ReturnStatement => "RT",
            ItemKind::SuperClassInheritance => "SC",
        }
    }

    /// Kinds that become action nodes in an object usage graph.
    pub fn is_action(self) -> bool {
        matches!(
            self,
            ItemKind::ClassInstanceCreation
                | ItemKind::MethodInvocation
                | ItemKind::FieldAccess
                | ItemKind::ConstructorInvocation
                | ItemKind::SuperConstructorInvocation
        )
    }

    /// Kinds that describe a file rather than a class or method.
    pub fn is_file_level(self) -> bool {
        matches!(
            self,
            ItemKind::PackageDeclaration | ItemKind::ImportDeclaration
        )
    }
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown item kind `{0}`")]
pub struct UnknownItemKind(pub String);

impl FromStr for ItemKind {
    type Err = UnknownItemKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ItemKind::ALL
            .iter()
            .copied()
            .find(|k| k.code() == s)
            .ok_or_else(|| UnknownItemKind(s.to_string()))
    }
}

/// Mining identity of an item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemKey {
    pub kind: ItemKind,
    pub name: String,
}

impl ItemKey {
    pub fn new(kind: ItemKind, name: impl Into<String>) -> Self {
        ItemKey {
            kind,
            name: name.into(),
        }
    }
}

impl fmt::Display for ItemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.name)
    }
}

impl FromStr for ItemKey {
    type Err = UnknownItemKind;

    /// Parses the `KIND:name` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, name) = s
            .split_once(':')
            .ok_or_else(|| UnknownItemKind(s.to_string()))?;
        Ok(ItemKey::new(kind.trim().parse()?, name.trim()))
    }
}

/// Where an item lives: a file, a class, or a method of a class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockPath {
    /// Package name, or the file label for the default package.
    File(String),
    /// Qualified class path such as `com.Test` or `com.Outer.Inner`.
    Class(String),
    /// Class path plus a method signature such as `parse(ICompilationUnit)`.
    Method { class: String, method: String },
}

impl BlockPath {
    pub fn class_path(&self) -> &str {
        match self {
            BlockPath::File(p) | BlockPath::Class(p) => p,
            BlockPath::Method { class, .. } => class,
        }
    }

    pub fn is_method(&self) -> bool {
        matches!(self, BlockPath::Method { .. })
    }
}

impl fmt::Display for BlockPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockPath::File(p) | BlockPath::Class(p) => f.write_str(p),
            BlockPath::Method { class, method } => write!(f, "{class}.{method}"),
        }
    }
}

/// One abstracted code entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceItem {
    pub kind: ItemKind,
    pub name: String,
    pub enclosing: BlockPath,
    /// Label of the file the item came from.
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    /// `Type.member` label for action kinds (see [`ItemKind::is_action`]).
    pub action_label: Option<String>,
    /// Variables read, written or used as receiver; drives data-dependency edges.
    pub vars: Vec<String>,
}

impl SourceItem {
    pub fn key(&self) -> ItemKey {
        ItemKey::new(self.kind, self.name.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlKind {
    IfBegin,
    IfEnd,
    LoopBegin,
    LoopEnd,
}

impl ControlKind {
    pub fn code(self) -> &'static str {
        match self {
            ControlKind::IfBegin => "IF_BEGIN",
            ControlKind::IfEnd => "IF_END",
            ControlKind::LoopBegin => "LOOP_BEGIN",
            ControlKind::LoopEnd => "LOOP_END",
        }
    }
}

/// Start or end of a branching or looping region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlMarker {
    pub kind: ControlKind,
    pub enclosing: BlockPath,
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    /// Variables read by the condition (or the iteration header).
    pub vars: Vec<String>,
}
