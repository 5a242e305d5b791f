//! AST for the annotated Fortran-77 subset and its Esope extension.
//!
//! Comments are first-class statements and every node carries a source span.
//! [`FortranAst`] (what [`crate::parser`] produces) and [`EsopeAst`] (what
//! [`crate::recovery`] produces) share the same node types; the difference is
//! an invariant, not a shape: a recovered tree contains no annotation
//! comments and no `D__`/`S__` call heads, and may contain the five
//! Esope-specific node kinds.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::span::SourceSpan;

/// AST of one source file.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ast {
    pub units: Vec<ProgramUnit>,
    /// Comment statements after the last program unit.
    pub trailing_comments: Vec<Stmt>,
}

/// Tree produced by parsing annotated Fortran; contains no Esope node kinds.
pub type FortranAst = Ast;
/// Tree produced by recovery; annotation comments and `D__`/`S__` heads are
/// replaced by Esope node kinds.
pub type EsopeAst = Ast;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    MainProgram,
    Subroutine,
    Function,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgramUnit {
    pub kind: UnitKind,
    /// `None` for a headless fragment (an include file parsed on its own).
    pub name: Option<String>,
    pub params: Vec<String>,
    pub span: SourceSpan,
    /// Comments physically above the unit's header line.
    pub leading_comments: Vec<Stmt>,
    pub body: Vec<Stmt>,
}

/// A statement with its optional numeric label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub label: Option<u32>,
    pub span: SourceSpan,
    #[serde(flatten)]
    pub kind: StmtKind,
}

impl Stmt {
    pub fn new(label: Option<u32>, span: SourceSpan, kind: StmtKind) -> Self {
        Stmt { label, span, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseType {
    Integer,
    Real,
    Logical,
    Character,
    DoublePrecision,
}

impl BaseType {
    pub fn keyword(self) -> &'static str {
        match self {
            BaseType::Integer => "INTEGER",
            BaseType::Real => "REAL",
            BaseType::Logical => "LOGICAL",
            BaseType::Character => "CHARACTER",
            BaseType::DoublePrecision => "DOUBLEPRECISION",
        }
    }
}

/// One declared entity: `UBB(UBBCNT)` has a name and a dimension list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeclEntity {
    pub name: String,
    pub dims: Option<Vec<Expr>>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElseIf {
    pub cond: Expr,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointerBinding {
    pub variable: String,
    pub segment: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegKeyword {
    Segini,
    Segact,
    Segadj,
    Segdes,
    Segprt,
    Segsup,
}

impl SegKeyword {
    pub fn parse(word: &str) -> Option<Self> {
        match word.to_ascii_lowercase().as_str() {
            "segini" => Some(SegKeyword::Segini),
            "segact" => Some(SegKeyword::Segact),
            "segadj" => Some(SegKeyword::Segadj),
            "segdes" => Some(SegKeyword::Segdes),
            "segprt" => Some(SegKeyword::Segprt),
            "segsup" => Some(SegKeyword::Segsup),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SegKeyword::Segini => "segini",
            SegKeyword::Segact => "segact",
            SegKeyword::Segadj => "segadj",
            SegKeyword::Segdes => "segdes",
            SegKeyword::Segprt => "segprt",
            SegKeyword::Segsup => "segsup",
        }
    }
}

impl fmt::Display for SegKeyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StmtKind {
    TypeDeclaration {
        base: BaseType,
        /// The `*n` length spec of `CHARACTER*40` / `INTEGER*8`.
        length: Option<u32>,
        entities: Vec<DeclEntity>,
    },
    /// Classified statements whose internals the pipeline never needs;
    /// the raw text round-trips verbatim.
    Implicit { raw: String },
    Common { raw: String },
    Equivalence { raw: String },
    Parameter { raw: String },
    Dimension { raw: String },
    Assignment { target: Expr, value: Expr },
    /// `name(params) = body`. For `D__`/`S__` heads the params may be
    /// arbitrary expressions; plain statement functions have identifiers.
    StatementFunctionDef { name: String, params: Vec<Expr>, body: Expr },
    Call { name: String, args: Vec<Expr> },
    IfLogical { cond: Expr, then_stmt: Box<Stmt> },
    IfBlock {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_ifs: Vec<ElseIf>,
        else_body: Option<Vec<Stmt>>,
    },
    Do {
        do_label: u32,
        var: String,
        from: Expr,
        to: Expr,
        step: Option<Expr>,
        /// Includes the labeled terminal statement.
        body: Vec<Stmt>,
    },
    Goto { target: u32 },
    Continue,
    Write { control: Vec<Expr>, items: Vec<Expr> },
    Read { control: Vec<Expr>, items: Vec<Expr> },
    Return,
    Stop,
    End,
    Comment {
        text: String,
        /// True for `c@_` annotation comments; `text` is then the payload
        /// after the marker.
        annotation: bool,
    },
    Include { path: String, raw: String },
    /// A statement outside the supported subset; re-emitted verbatim.
    Opaque { raw: String },
    #[serde(rename = "esope_segment_definition")]
    SegmentDefinition {
        name: String,
        /// Type declarations, pointer declarations, and interleaved comments.
        members: Vec<Stmt>,
    },
    #[serde(rename = "esope_pointer_declaration")]
    PointerDeclaration { bindings: Vec<PointerBinding> },
    #[serde(rename = "esope_segment_instruction")]
    SegmentInstruction { keyword: SegKeyword, pointers: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnaryOp {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = ".not.")]
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
    #[serde(rename = "**")]
    Pow,
    #[serde(rename = ".lt.")]
    Lt,
    #[serde(rename = ".le.")]
    Le,
    #[serde(rename = ".gt.")]
    Gt,
    #[serde(rename = ".ge.")]
    Ge,
    #[serde(rename = ".eq.")]
    Eq,
    #[serde(rename = ".ne.")]
    Ne,
    #[serde(rename = ".and.")]
    And,
    #[serde(rename = ".or.")]
    Or,
}

impl BinOp {
    pub fn text(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "**",
            BinOp::Lt => ".LT.",
            BinOp::Le => ".LE.",
            BinOp::Gt => ".GT.",
            BinOp::Ge => ".GE.",
            BinOp::Eq => ".EQ.",
            BinOp::Ne => ".NE.",
            BinOp::And => ".AND.",
            BinOp::Or => ".OR.",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    /// An identifier; also carries the `*` pseudo-identifier used in
    /// READ/WRITE control lists and assumed-size dimensions.
    Ident { name: String, span: SourceSpan },
    /// Integer literal, exact source text.
    IntLit { text: String, span: SourceSpan },
    /// Real literal, exact source text.
    RealLit { text: String, span: SourceSpan },
    /// Character literal content, quotes stripped and `''` unescaped.
    StringLit { value: String, span: SourceSpan },
    LogicalLit { value: bool, span: SourceSpan },
    Unary { op: UnaryOp, operand: Box<Expr>, span: SourceSpan },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: SourceSpan },
    /// Array reference or function call; the two are indistinguishable
    /// without symbol tables and the pipeline never needs to know.
    CallOrRef { name: String, args: Vec<Expr>, span: SourceSpan },
    #[serde(rename = "esope_attribute_access")]
    AttributeAccess {
        pointer: Box<Expr>,
        attribute: String,
        /// Subscripts of a subscripted member access `p.arr(i)`.
        subscripts: Option<Vec<Expr>>,
        span: SourceSpan,
    },
    #[serde(rename = "esope_dimension_query")]
    DimensionQuery { target: Box<Expr>, dim_index: u32, span: SourceSpan },
}

impl Expr {
    pub fn span(&self) -> SourceSpan {
        match self {
            Expr::Ident { span, .. }
            | Expr::IntLit { span, .. }
            | Expr::RealLit { span, .. }
            | Expr::StringLit { span, .. }
            | Expr::LogicalLit { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. }
            | Expr::CallOrRef { span, .. }
            | Expr::AttributeAccess { span, .. }
            | Expr::DimensionQuery { span, .. } => *span,
        }
    }

    /// Integer value of an `IntLit`, when it fits.
    pub fn int_value(&self) -> Option<i64> {
        match self {
            Expr::IntLit { text, .. } => text.parse().ok(),
            _ => None,
        }
    }
}

/// Reset every span in the tree to the default; used for structural
/// comparisons "modulo spans" (regenerated text has different positions).
pub fn erase_spans(ast: &mut Ast) {
    for unit in &mut ast.units {
        unit.span = SourceSpan::default();
        for stmt in unit.leading_comments.iter_mut().chain(unit.body.iter_mut()) {
            erase_stmt_spans(stmt);
        }
    }
    for stmt in &mut ast.trailing_comments {
        erase_stmt_spans(stmt);
    }
}

fn erase_stmt_spans(stmt: &mut Stmt) {
    stmt.span = SourceSpan::default();
    match &mut stmt.kind {
        StmtKind::TypeDeclaration { entities, .. } => {
            for entity in entities {
                entity.span = SourceSpan::default();
                if let Some(dims) = &mut entity.dims {
                    for dim in dims {
                        erase_expr_spans(dim);
                    }
                }
            }
        }
        StmtKind::Assignment { target, value } => {
            erase_expr_spans(target);
            erase_expr_spans(value);
        }
        StmtKind::StatementFunctionDef { params, body, .. } => {
            for p in params {
                erase_expr_spans(p);
            }
            erase_expr_spans(body);
        }
        StmtKind::Call { args, .. } => {
            for a in args {
                erase_expr_spans(a);
            }
        }
        StmtKind::IfLogical { cond, then_stmt } => {
            erase_expr_spans(cond);
            erase_stmt_spans(then_stmt);
        }
        StmtKind::IfBlock { cond, then_body, else_ifs, else_body } => {
            erase_expr_spans(cond);
            for s in then_body {
                erase_stmt_spans(s);
            }
            for e in else_ifs {
                e.span = SourceSpan::default();
                erase_expr_spans(&mut e.cond);
                for s in &mut e.body {
                    erase_stmt_spans(s);
                }
            }
            if let Some(body) = else_body {
                for s in body {
                    erase_stmt_spans(s);
                }
            }
        }
        StmtKind::Do { from, to, step, body, .. } => {
            erase_expr_spans(from);
            erase_expr_spans(to);
            if let Some(step) = step {
                erase_expr_spans(step);
            }
            for s in body {
                erase_stmt_spans(s);
            }
        }
        StmtKind::Write { control, items } | StmtKind::Read { control, items } => {
            for e in control.iter_mut().chain(items.iter_mut()) {
                erase_expr_spans(e);
            }
        }
        StmtKind::SegmentDefinition { members, .. } => {
            for m in members {
                erase_stmt_spans(m);
            }
        }
        StmtKind::Implicit { .. }
        | StmtKind::Common { .. }
        | StmtKind::Equivalence { .. }
        | StmtKind::Parameter { .. }
        | StmtKind::Dimension { .. }
        | StmtKind::Goto { .. }
        | StmtKind::Continue
        | StmtKind::Return
        | StmtKind::Stop
        | StmtKind::End
        | StmtKind::Comment { .. }
        | StmtKind::Include { .. }
        | StmtKind::Opaque { .. }
        | StmtKind::PointerDeclaration { .. }
        | StmtKind::SegmentInstruction { .. } => {}
    }
}

fn erase_expr_spans(expr: &mut Expr) {
    match expr {
        Expr::Ident { span, .. }
        | Expr::IntLit { span, .. }
        | Expr::RealLit { span, .. }
        | Expr::StringLit { span, .. }
        | Expr::LogicalLit { span, .. } => *span = SourceSpan::default(),
        Expr::Unary { operand, span, .. } => {
            *span = SourceSpan::default();
            erase_expr_spans(operand);
        }
        Expr::Binary { lhs, rhs, span, .. } => {
            *span = SourceSpan::default();
            erase_expr_spans(lhs);
            erase_expr_spans(rhs);
        }
        Expr::CallOrRef { args, span, .. } => {
            *span = SourceSpan::default();
            for a in args {
                erase_expr_spans(a);
            }
        }
        Expr::AttributeAccess { pointer, subscripts, span, .. } => {
            *span = SourceSpan::default();
            erase_expr_spans(pointer);
            if let Some(subs) = subscripts {
                for s in subs {
                    erase_expr_spans(s);
                }
            }
        }
        Expr::DimensionQuery { target, span, .. } => {
            *span = SourceSpan::default();
            erase_expr_spans(target);
        }
    }
}
