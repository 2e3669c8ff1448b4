//! Terms over variables, constants and the fixed interpreted signature.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::{ChannelId, Queue, Rational, RowSource, TypeTag, Value};

/// Interpreted function symbols. The signature is closed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Add,
    /// Truncated subtraction on naturals.
    Sub,
    Min,
    Max,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Implies,
    Tuple(usize),
    Channel,
    SetOf(usize),
    /// `range(lo, hi)` is the set `{lo, ..., hi}`.
    Range,
    Union,
    /// `⊔`: union whose arguments are claimed to be disjoint.
    DisjointUnion,
    SetMinus,
    Intersect,
    Member,
    Subset,
    Size,
    /// Row times matrix.
    Prod,
    Row(RowSource),
    /// `rows(N)`: the symbolic array `[A_1, ..., A_N]`.
    RowsA,
    /// `empty_array(n)`: an array of `n` unset cells.
    EmptyArray,
    /// Number of messages in a channel. State access, invariants only.
    QueueLen,
    /// Set of `k`-th components of a channel's messages. State access, invariants only.
    QueueProj,
    /// Current control node of the named process, as a natural. State access, invariants only.
    At(String),
}

impl Func {
    pub fn arity(&self) -> usize {
        match self {
            Func::Tuple(n) | Func::SetOf(n) => *n,
            Func::Not | Func::Channel | Func::Size | Func::Row(_) | Func::RowsA | Func::EmptyArray
            | Func::QueueLen => 1,
            Func::At(_) => 0,
            _ => 2,
        }
    }

    /// Constructors fold to a constant when every argument is constant.
    pub fn is_constructor(&self) -> bool {
        matches!(self, Func::Tuple(_) | Func::Channel | Func::SetOf(_) | Func::Row(_))
    }

    /// Reads channel contents or control locations rather than variables.
    pub fn reads_state(&self) -> bool {
        matches!(self, Func::QueueLen | Func::QueueProj | Func::At(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Add => "+",
            Func::Sub => "-",
            Func::Min => "min",
            Func::Max => "max",
            Func::Eq => "=",
            Func::Ne => "!=",
            Func::Lt => "<",
            Func::Le => "<=",
            Func::Gt => ">",
            Func::Ge => ">=",
            Func::And => "&&",
            Func::Or => "||",
            Func::Not => "!",
            Func::Implies => "=>",
            Func::Tuple(_) => "tuple",
            Func::Channel => "channel",
            Func::SetOf(_) => "set",
            Func::Range => "range",
            Func::Union => "\\/",
            Func::DisjointUnion => "++",
            Func::SetMinus => "\\",
            Func::Intersect => "/\\",
            Func::Member => "member",
            Func::Subset => "subset",
            Func::Size => "size",
            Func::Prod => "prod",
            Func::Row(_) => "row",
            Func::RowsA => "rows",
            Func::EmptyArray => "empty_array",
            Func::QueueLen => "len",
            Func::QueueProj => "proj",
            Func::At(_) => "at",
        }
    }

    /// Result type for the given argument types.
    pub fn result_type(&self, args: &[TypeTag]) -> Result<TypeTag, String> {
        if args.len() != self.arity() {
            return Err(format!("`{}` expects {} arguments, got {}", self.name(), self.arity(), args.len()));
        }
        let want = |k: usize, ty: &TypeTag| -> Result<(), String> {
            if args[k].compatible(ty) {
                Ok(())
            } else {
                Err(format!("argument {} of `{}` has type {}, expected {}", k + 1, self.name(), args[k], ty))
            }
        };
        let set_elem = |k: usize| -> Result<TypeTag, String> {
            match &args[k] {
                TypeTag::Set(e) => Ok((**e).clone()),
                TypeTag::Any => Ok(TypeTag::Any),
                other => Err(format!("argument {} of `{}` has type {}, expected a set", k + 1, self.name(), other)),
            }
        };
        match self {
            Func::Add | Func::Sub | Func::Min | Func::Max => {
                want(0, &TypeTag::Nat)?;
                want(1, &TypeTag::Nat)?;
                Ok(TypeTag::Nat)
            }
            Func::Lt | Func::Le | Func::Gt | Func::Ge => {
                want(0, &TypeTag::Nat)?;
                want(1, &TypeTag::Nat)?;
                Ok(TypeTag::Bool)
            }
            Func::Eq | Func::Ne => {
                if args[0].compatible(&args[1]) {
                    Ok(TypeTag::Bool)
                } else {
                    Err(format!("cannot compare {} with {}", args[0], args[1]))
                }
            }
            Func::And | Func::Or | Func::Implies => {
                want(0, &TypeTag::Bool)?;
                want(1, &TypeTag::Bool)?;
                Ok(TypeTag::Bool)
            }
            Func::Not => {
                want(0, &TypeTag::Bool)?;
                Ok(TypeTag::Bool)
            }
            Func::Tuple(_) => Ok(TypeTag::Tuple(args.to_vec())),
            Func::Channel => {
                want(0, &TypeTag::Nat)?;
                Ok(TypeTag::Chan)
            }
            Func::SetOf(_) => {
                let mut elem = TypeTag::Any;
                for (k, t) in args.iter().enumerate() {
                    if matches!(t, TypeTag::Set(_)) {
                        return Err("nested sets are not supported".to_string());
                    }
                    if !elem.compatible(t) {
                        return Err(format!("set element {} has type {}, expected {}", k + 1, t, elem));
                    }
                    if elem == TypeTag::Any {
                        elem = t.clone();
                    }
                }
                Ok(TypeTag::set_of(elem))
            }
            Func::Range => {
                want(0, &TypeTag::Nat)?;
                want(1, &TypeTag::Nat)?;
                Ok(TypeTag::set_of(TypeTag::Nat))
            }
            Func::Union | Func::DisjointUnion | Func::SetMinus | Func::Intersect => {
                let a = set_elem(0)?;
                let b = set_elem(1)?;
                if !a.compatible(&b) {
                    return Err(format!("`{}` mixes set<{}> and set<{}>", self.name(), a, b));
                }
                Ok(TypeTag::set_of(if a == TypeTag::Any { b } else { a }))
            }
            Func::Member => {
                let elem = set_elem(1)?;
                want(0, &elem)?;
                Ok(TypeTag::Bool)
            }
            Func::Subset => {
                let a = set_elem(0)?;
                let b = set_elem(1)?;
                if !a.compatible(&b) {
                    return Err(format!("`subset` mixes set<{}> and set<{}>", a, b));
                }
                Ok(TypeTag::Bool)
            }
            Func::Size => {
                set_elem(0)?;
                Ok(TypeTag::Nat)
            }
            Func::Prod => {
                want(0, &TypeTag::Row)?;
                want(1, &TypeTag::Matrix)?;
                Ok(TypeTag::Row)
            }
            Func::Row(_) => {
                want(0, &TypeTag::Nat)?;
                Ok(TypeTag::Row)
            }
            Func::RowsA => {
                want(0, &TypeTag::Nat)?;
                Ok(TypeTag::array_of(TypeTag::Row))
            }
            Func::EmptyArray => {
                want(0, &TypeTag::Nat)?;
                Ok(TypeTag::array_of(TypeTag::Any))
            }
            Func::QueueLen => {
                want(0, &TypeTag::Chan)?;
                Ok(TypeTag::Nat)
            }
            Func::QueueProj => {
                want(0, &TypeTag::Chan)?;
                want(1, &TypeTag::Nat)?;
                Ok(TypeTag::set_of(TypeTag::Any))
            }
            Func::At(_) => Ok(TypeTag::Nat),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Value),
    App(Func, Vec<Term>),
    /// Array cell `base[index]`, 1-based.
    Index(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in `{func}`: {detail}")]
    TypeMismatch { func: String, detail: String },
    #[error("index {index} out of range for array of length {len}")]
    IndexOutOfRange { index: u64, len: usize },
    #[error("array cell {0} is unset")]
    UnsetCell(u64),
    #[error("arithmetic overflow in `{0}`")]
    Overflow(&'static str),
    #[error("`{0}` needs access to a process state")]
    NoStateAccess(&'static str),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
}

/// What evaluation may read: variable values and, for invariant predicates,
/// channel contents and control locations.
pub trait Env {
    fn var(&self, name: &str) -> Option<&Value>;

    /// Contents of a channel; `Ok(None)` means the empty queue.
    fn queue(&self, _chan: ChannelId) -> Result<Option<&Queue>, EvalError> {
        Err(EvalError::NoStateAccess("len/proj"))
    }

    fn location(&self, process: &str) -> Result<u64, EvalError> {
        Err(EvalError::UnknownProcess(process.to_string()))
    }
}

/// Total-on-its-domain map from variable names to ground values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(pub BTreeMap<String, Value>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: Value) -> Self {
        self.0.insert(name.to_string(), v);
        self
    }

    pub fn insert(&mut self, name: &str, v: Value) {
        self.0.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }
}

impl Env for Valuation {
    fn var(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }
}

fn mismatch(func: &Func, detail: impl Into<String>) -> EvalError {
    EvalError::TypeMismatch { func: func.name().to_string(), detail: detail.into() }
}

fn nat_arg(func: &Func, v: &Value) -> Result<u64, EvalError> {
    v.as_nat().ok_or_else(|| mismatch(func, format!("expected nat, got {v}")))
}

fn boolean(func: &Func, v: &Value) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| mismatch(func, format!("expected bool, got {v}")))
}

fn set(func: &Func, v: Value) -> Result<BTreeSet<Value>, EvalError> {
    match v {
        Value::Set(s) => Ok(s),
        other => Err(mismatch(func, format!("expected set, got {other}"))),
    }
}

fn chan_arg(func: &Func, v: &Value) -> Result<ChannelId, EvalError> {
    match v {
        Value::Chan(c) => Ok(*c),
        other => Err(mismatch(func, format!("expected channel, got {other}"))),
    }
}

/// `vector · matrix` over exact rationals.
fn vecmat(vector: &[Rational], matrix: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    if vector.len() != matrix.len() {
        return None;
    }
    let width = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != width) {
        return None;
    }
    let mut result = vec![Rational::from_integer(0); width];
    for (j, cell) in result.iter_mut().enumerate() {
        for (k, x) in vector.iter().enumerate() {
            *cell += *x * matrix[k][j];
        }
    }
    Some(result)
}

/// The `prod` function symbol: `Y·B`.
pub fn prod(row: &Value, matrix: &Value) -> Result<Value, EvalError> {
    match (row, matrix) {
        (Value::Row(RowSource::A, i), Value::MatrixAtom(_)) => Ok(Value::Row(RowSource::Prod, *i)),
        (Value::QRow(v), Value::QMatrix(m)) => vecmat(v, m)
            .map(Value::QRow)
            .ok_or_else(|| mismatch(&Func::Prod, "row length does not match matrix height")),
        (r, m) => Err(mismatch(&Func::Prod, format!("cannot multiply {r} by {m}"))),
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn nat(k: u64) -> Term {
        Term::Const(Value::Nat(k))
    }

    pub fn bool(b: bool) -> Term {
        Term::Const(Value::Bool(b))
    }

    /// Builds an application, folding constructors over constant arguments.
    pub fn app(func: Func, args: Vec<Term>) -> Term {
        if func.is_constructor() && args.iter().all(|a| matches!(a, Term::Const(_))) {
            let t = Term::App(func, args);
            if let Ok(v) = t.eval(&Valuation::new()) {
                return Term::Const(v);
            }
            return t;
        }
        Term::App(func, args)
    }

    pub fn index(base: Term, idx: Term) -> Term {
        Term::Index(Box::new(base), Box::new(idx))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            Term::Index(b, i) => b.is_ground() && i.is_ground(),
        }
    }

    /// `𝒳_e`: variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Index(b, i) => {
                b.collect_vars(out);
                i.collect_vars(out);
            }
        }
    }

    pub fn reads_state(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(f, args) => f.reads_state() || args.iter().any(Term::reads_state),
            Term::Index(b, i) => b.reads_state() || i.reads_state(),
        }
    }

    pub fn type_of(&self, types: &BTreeMap<String, TypeTag>) -> Result<TypeTag, String> {
        match self {
            Term::Var(x) => types.get(x).cloned().ok_or_else(|| format!("unknown variable `{x}`")),
            Term::Const(v) => Ok(v.type_of()),
            Term::App(f, args) => {
                let tys = args.iter().map(|a| a.type_of(types)).collect::<Result<Vec<_>, _>>()?;
                f.result_type(&tys)
            }
            Term::Index(b, i) => {
                let it = i.type_of(types)?;
                if !it.compatible(&TypeTag::Nat) {
                    return Err(format!("array index has type {it}, expected nat"));
                }
                match b.type_of(types)? {
                    TypeTag::Array(elem) => Ok(*elem),
                    TypeTag::Any => Ok(TypeTag::Any),
                    other => Err(format!("indexing a value of type {other}")),
                }
            }
        }
    }

    pub fn eval(&self, env: &dyn Env) -> Result<Value, EvalError> {
        match self {
            Term::Var(x) => env.var(x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Term::Const(v) => Ok(v.clone()),
            Term::Index(b, i) => {
                let base = b.eval(env)?;
                let k = i.eval(env)?.as_nat().ok_or_else(|| EvalError::TypeMismatch {
                    func: "[]".to_string(),
                    detail: "array index is not a nat".to_string(),
                })?;
                match &base {
                    Value::Array(cells) => {
                        if k == 0 || k as usize > cells.len() {
                            return Err(EvalError::IndexOutOfRange { index: k, len: cells.len() });
                        }
                        cells[(k - 1) as usize].clone().ok_or(EvalError::UnsetCell(k))
                    }
                    other => Err(EvalError::TypeMismatch {
                        func: "[]".to_string(),
                        detail: format!("indexing non-array {other}"),
                    }),
                }
            }
            Term::App(f, args) => eval_app(f, args, env),
        }
    }

    /// Every `⊔` application in this term whose arguments intersect under
    /// `env`, reported as the shared elements.
    pub fn disjoint_union_overlaps(&self, env: &dyn Env) -> Result<Vec<BTreeSet<Value>>, EvalError> {
        let mut out = Vec::new();
        self.collect_overlaps(env, &mut out)?;
        Ok(out)
    }

    fn collect_overlaps(&self, env: &dyn Env, out: &mut Vec<BTreeSet<Value>>) -> Result<(), EvalError> {
        match self {
            Term::Var(_) | Term::Const(_) => Ok(()),
            Term::Index(b, i) => {
                b.collect_overlaps(env, out)?;
                i.collect_overlaps(env, out)
            }
            Term::App(f, args) => {
                for a in args {
                    a.collect_overlaps(env, out)?;
                }
                if *f == Func::DisjointUnion {
                    let l = set(f, args[0].eval(env)?)?;
                    let r = set(f, args[1].eval(env)?)?;
                    let shared: BTreeSet<Value> = l.intersection(&r).cloned().collect();
                    if !shared.is_empty() {
                        out.push(shared);
                    }
                }
                Ok(())
            }
        }
    }
}

fn eval_app(f: &Func, args: &[Term], env: &dyn Env) -> Result<Value, EvalError> {
    if args.len() != f.arity() {
        return Err(mismatch(f, format!("expected {} arguments, got {}", f.arity(), args.len())));
    }
    // Short-circuit connectives so guarded sub-terms are only evaluated when meaningful.
    match f {
        Func::And => {
            return Ok(Value::Bool(boolean(f, &args[0].eval(env)?)? && boolean(f, &args[1].eval(env)?)?));
        }
        Func::Or => {
            return Ok(Value::Bool(boolean(f, &args[0].eval(env)?)? || boolean(f, &args[1].eval(env)?)?));
        }
        Func::Implies => {
            return Ok(Value::Bool(!boolean(f, &args[0].eval(env)?)? || boolean(f, &args[1].eval(env)?)?));
        }
        Func::At(p) => return Ok(Value::Nat(env.location(p)?)),
        _ => {}
    }
    let vals = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>, _>>()?;
    let mut vals = vals.into_iter();
    let mut next = || vals.next().expect("arity checked");
    Ok(match f {
        Func::Add => {
            let (a, b) = (nat_arg(f, &next())?, nat_arg(f, &next())?);
            Value::Nat(a.checked_add(b).ok_or(EvalError::Overflow("+"))?)
        }
        Func::Sub => {
            let (a, b) = (nat_arg(f, &next())?, nat_arg(f, &next())?);
            Value::Nat(a.saturating_sub(b))
        }
        Func::Min => Value::Nat(nat_arg(f, &next())?.min(nat_arg(f, &next())?)),
        Func::Max => Value::Nat(nat_arg(f, &next())?.max(nat_arg(f, &next())?)),
        Func::Eq => Value::Bool(next() == next()),
        Func::Ne => Value::Bool(next() != next()),
        Func::Lt => Value::Bool(nat_arg(f, &next())? < nat_arg(f, &next())?),
        Func::Le => Value::Bool(nat_arg(f, &next())? <= nat_arg(f, &next())?),
        Func::Gt => Value::Bool(nat_arg(f, &next())? > nat_arg(f, &next())?),
        Func::Ge => Value::Bool(nat_arg(f, &next())? >= nat_arg(f, &next())?),
        Func::Not => Value::Bool(!boolean(f, &next())?),
        Func::Tuple(n) => Value::Tuple((0..*n).map(|_| next()).collect()),
        Func::Channel => Value::Chan(ChannelId::Indexed(nat_arg(f, &next())?)),
        Func::SetOf(n) => {
            let items: BTreeSet<Value> = (0..*n).map(|_| next()).collect();
            if items.iter().any(|v| matches!(v, Value::Set(_))) {
                return Err(mismatch(f, "nested sets are not supported"));
            }
            Value::Set(items)
        }
        Func::Range => {
            let (lo, hi) = (nat_arg(f, &next())?, nat_arg(f, &next())?);
            Value::nat_set(lo..=hi)
        }
        Func::Union | Func::DisjointUnion => {
            let mut a = set(f, next())?;
            a.extend(set(f, next())?);
            Value::Set(a)
        }
        Func::SetMinus => {
            let a = set(f, next())?;
            let b = set(f, next())?;
            Value::Set(a.difference(&b).cloned().collect())
        }
        Func::Intersect => {
            let a = set(f, next())?;
            let b = set(f, next())?;
            Value::Set(a.intersection(&b).cloned().collect())
        }
        Func::Member => {
            let x = next();
            Value::Bool(set(f, next())?.contains(&x))
        }
        Func::Subset => {
            let a = set(f, next())?;
            Value::Bool(a.is_subset(&set(f, next())?))
        }
        Func::Size => Value::Nat(set(f, next())?.len() as u64),
        Func::Prod => {
            let r = next();
            prod(&r, &next())?
        }
        Func::Row(src) => {
            let k = nat_arg(f, &next())?;
            if k == 0 {
                return Err(mismatch(f, "row numbers start at 1"));
            }
            Value::Row(*src, k)
        }
        Func::RowsA => Value::Array((1..=nat_arg(f, &next())?).map(|k| Some(Value::Row(RowSource::A, k))).collect()),
        Func::EmptyArray => Value::Array(vec![None; nat_arg(f, &next())? as usize]),
        Func::QueueLen => {
            let c = chan_arg(f, &next())?;
            Value::Nat(env.queue(c)?.map_or(0, Queue::len) as u64)
        }
        Func::QueueProj => {
            let c = chan_arg(f, &next())?;
            let k = nat_arg(f, &next())? as usize;
            match env.queue(c)? {
                None => Value::Set(BTreeSet::new()),
                Some(q) => Value::Set(
                    q.component_set(k)
                        .ok_or_else(|| mismatch(f, format!("channel holds a message without component {k}")))?,
                ),
            }
        }
        Func::And | Func::Or | Func::Implies | Func::At(_) => unreachable!("handled above"),
    })
}

/// Free-function spelling of the common term constructors.
pub mod ops {
    use super::*;

    pub fn var(name: &str) -> Term {
        Term::var(name)
    }
    pub fn nat(k: u64) -> Term {
        Term::nat(k)
    }
    pub fn konst(v: Value) -> Term {
        Term::Const(v)
    }
    fn bin(f: Func, a: Term, b: Term) -> Term {
        Term::app(f, vec![a, b])
    }
    pub fn add(a: Term, b: Term) -> Term {
        bin(Func::Add, a, b)
    }
    pub fn sub(a: Term, b: Term) -> Term {
        bin(Func::Sub, a, b)
    }
    pub fn min(a: Term, b: Term) -> Term {
        bin(Func::Min, a, b)
    }
    pub fn eq(a: Term, b: Term) -> Term {
        bin(Func::Eq, a, b)
    }
    pub fn ne(a: Term, b: Term) -> Term {
        bin(Func::Ne, a, b)
    }
    pub fn lt(a: Term, b: Term) -> Term {
        bin(Func::Lt, a, b)
    }
    pub fn le(a: Term, b: Term) -> Term {
        bin(Func::Le, a, b)
    }
    pub fn gt(a: Term, b: Term) -> Term {
        bin(Func::Gt, a, b)
    }
    pub fn ge(a: Term, b: Term) -> Term {
        bin(Func::Ge, a, b)
    }
    pub fn and(a: Term, b: Term) -> Term {
        bin(Func::And, a, b)
    }
    pub fn or(a: Term, b: Term) -> Term {
        bin(Func::Or, a, b)
    }
    pub fn not(a: Term) -> Term {
        Term::app(Func::Not, vec![a])
    }
    pub fn tuple(items: Vec<Term>) -> Term {
        Term::app(Func::Tuple(items.len()), items)
    }
    pub fn chan(k: Term) -> Term {
        Term::app(Func::Channel, vec![k])
    }
    pub fn set_of(items: Vec<Term>) -> Term {
        Term::app(Func::SetOf(items.len()), items)
    }
    pub fn disjoint_union(a: Term, b: Term) -> Term {
        bin(Func::DisjointUnion, a, b)
    }
    pub fn union(a: Term, b: Term) -> Term {
        bin(Func::Union, a, b)
    }
    pub fn set_minus(a: Term, b: Term) -> Term {
        bin(Func::SetMinus, a, b)
    }
    pub fn prod(a: Term, b: Term) -> Term {
        bin(Func::Prod, a, b)
    }
    pub fn index(base: Term, idx: Term) -> Term {
        Term::index(base, idx)
    }
}

#[cfg(test)]
mod tests {
    use super::ops::*;
    use super::*;

    fn theta() -> Valuation {
        Valuation::new().with("n", Value::Nat(2)).with("N", Value::Nat(3)).with("i", Value::Nat(1))
    }

    #[test]
    fn constants_are_self_valued() {
        assert_eq!(nat(5).eval(&Valuation::new()), Ok(Value::Nat(5)));
    }

    #[test]
    fn min_of_inputs() {
        assert_eq!(min(var("n"), var("N")).eval(&theta()), Ok(Value::Nat(2)));
    }

    #[test]
    fn symbolic_prod() {
        let t = ops::prod(konst(Value::Row(RowSource::A, 4)), konst(Value::MatrixAtom("B".into())));
        assert_eq!(t.eval(&Valuation::new()), Ok(Value::Row(RowSource::Prod, 4)));
    }

    #[test]
    fn manager_message_tuple() {
        let env = theta().with("A", Value::Array((1..=3).map(|k| Some(Value::Row(RowSource::A, k))).collect()));
        let t = tuple(vec![index(var("A"), var("i")), nat(0), var("i")]);
        assert_eq!(
            t.eval(&env),
            Ok(Value::Tuple(vec![Value::Row(RowSource::A, 1), Value::Nat(0), Value::Nat(1)]))
        );
    }

    #[test]
    fn truncated_minus() {
        assert_eq!(sub(nat(1), nat(3)).eval(&Valuation::new()), Ok(Value::Nat(0)));
        assert_eq!(sub(nat(3), nat(1)).eval(&Valuation::new()), Ok(Value::Nat(2)));
    }

    #[test]
    fn unbound_and_ill_typed() {
        assert_eq!(var("z").eval(&Valuation::new()), Err(EvalError::UnboundVariable("z".into())));
        assert!(matches!(
            add(Term::bool(true), nat(1)).eval(&Valuation::new()),
            Err(EvalError::TypeMismatch { .. })
        ));
        assert!(matches!(
            ops::prod(konst(Value::Star), konst(Value::MatrixAtom("B".into()))).eval(&Valuation::new()),
            Err(EvalError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn array_cells() {
        let env = Valuation::new().with("C", Value::Array(vec![None, Some(Value::Nat(7))]));
        assert_eq!(index(var("C"), nat(2)).eval(&env), Ok(Value::Nat(7)));
        assert_eq!(index(var("C"), nat(1)).eval(&env), Err(EvalError::UnsetCell(1)));
        assert_eq!(index(var("C"), nat(3)).eval(&env), Err(EvalError::IndexOutOfRange { index: 3, len: 2 }));
    }

    #[test]
    fn constructors_fold() {
        assert_eq!(chan(nat(2)), Term::Const(Value::Chan(ChannelId::Indexed(2))));
        assert!(matches!(chan(var("i")), Term::App(Func::Channel, _)));
        assert_eq!(set_of(vec![]), Term::Const(Value::nat_set([])));
    }

    #[test]
    fn overlaps_detected() {
        let env = Valuation::new().with("a", Value::nat_set([1, 2])).with("x", Value::Nat(2));
        let t = disjoint_union(var("a"), set_of(vec![var("x")]));
        assert_eq!(t.eval(&env), Ok(Value::nat_set([1, 2])));
        let o = t.disjoint_union_overlaps(&env).unwrap();
        assert_eq!(o, vec![Value::nat_set([2]).as_set().unwrap().clone()]);
        let env = env.with("x", Value::Nat(3));
        assert!(t.disjoint_union_overlaps(&env).unwrap().is_empty());
    }

    #[test]
    fn vecmat_numeric() {
        let q = |x: i64| Rational::from_integer(x);
        let row = Value::QRow(vec![q(1), q(2)]);
        let m = Value::QMatrix(vec![vec![q(5), q(6)], vec![q(7), q(8)]]);
        assert_eq!(super::prod(&row, &m), Ok(Value::QRow(vec![q(19), q(22)])));
        let bad = Value::QMatrix(vec![vec![q(1)]]);
        assert!(super::prod(&row, &bad).is_err());
    }

    #[test]
    fn typing() {
        let mut types = BTreeMap::new();
        types.insert("i".to_string(), TypeTag::Nat);
        types.insert("alpha".to_string(), TypeTag::set_of(TypeTag::Nat));
        assert_eq!(
            disjoint_union(var("alpha"), set_of(vec![var("i")])).type_of(&types),
            Ok(TypeTag::set_of(TypeTag::Nat))
        );
        assert!(add(var("alpha"), nat(1)).type_of(&types).is_err());
        assert!(var("q").type_of(&types).is_err());
    }
}
