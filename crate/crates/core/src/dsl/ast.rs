use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::Pos;
use crate::terms::{Func, Rational, RowSource, TypeTag};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Nat(u64),
    Bool(bool),
    Star,
    EmptySet,
    Name(String),
    /// `P.x` or `P[e].x`: a private variable of a named process or family member.
    Member { process: String, index: Option<Box<Expr>>, var: String },
    Chan(Box<Expr>),
    Bcast,
    Call { name: String, args: Vec<Expr> },
    At { process: String, index: Option<Box<Expr>> },
    Row { source: RowSource, index: Box<Expr> },
    Matrix(String),
    QRow(Vec<Rational>),
    QMatrix(Vec<Vec<Rational>>),
    Not(Box<Expr>),
    Binary(Func, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    Set(Vec<Expr>),
    Array(Vec<Option<Expr>>),
    Index(Box<Expr>, Box<Expr>),
}

/// `[w in lo..hi]` on a process or invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub var: String,
    pub lo: Expr,
    pub hi: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub pos: Pos,
    pub default: Expr,
    pub constraint: Option<Expr>,
}

/// A document-level `input` or `aux` declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalDecl {
    pub name: String,
    pub pos: Pos,
    pub ty: TypeTag,
    pub value: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EaKind {
    Guard(Expr),
    Send { chan: Expr, msg: Expr },
    Recv { chan: Expr, pattern: Expr },
    Assign { lhs: Expr, rhs: Expr, aux: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EaDecl {
    pub pos: Pos,
    pub kind: EaKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub pos: Pos,
    pub from: u32,
    pub to: u32,
    pub eas: Vec<EaDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcStmt {
    Inputs(Vec<(String, Pos)>),
    Var { name: String, pos: Pos, ty: TypeTag, init: Option<Expr> },
    Aux(Vec<(String, Pos)>),
    Init(Expr),
    Start(u32, Pos),
    Nodes(Vec<(u32, Pos)>),
    Edge(EdgeDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDecl {
    pub name: String,
    pub pos: Pos,
    pub family: Option<Family>,
    pub body: Vec<ProcStmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantDecl {
    pub name: String,
    pub pos: Pos,
    pub family: Option<Family>,
    pub scope: Option<Expr>,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Param(ParamDecl),
    Input(GlobalDecl),
    Aux(GlobalDecl),
    Process(ProcessDecl),
    Invariant(InvariantDecl),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub name: Option<String>,
    pub items: Vec<Item>,
}
