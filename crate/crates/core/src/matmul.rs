//! The manager/worker row-distribution matrix multiplication model.
//!
//! The manager `P0` hands rows of `A` to workers over `c_1..c_n`, collects
//! `(A_jB, worker, j)` results on `c_0` into the partial array `C`, and
//! finally sends every worker the stop message `(*, 0, 0)`. Worker `Pw`
//! loops receiving `(Y_w, 0, j_w)` and replying until it sees tag 0.
//!
//! The manager's `i` is one more than the number of rows handed out so far.
//!
//! Manager edges, by index:
//!
//! | # | edge | label |
//! |---|------|-------|
//! | 0 | 0→0 | `[i <= min(n, N)]; c[i] ! (A[i], 0, i); i := i + 1` |
//! | 1 | 0→1 | `[i > min(n, N)]` |
//! | 2 | 1→2 | `[k < N]; c[0] ? (C[j], p, j); k := k + 1` |
//! | 3 | 2→1 | `[i > N]` |
//! | 4 | 2→1 | `[i <= N]; c[p] ! (A[i], 0, i); i := i + 1` |
//! | 5 | 1→3 | `[k >= N]` |
//! | 6 | 3→3 | `[l <= n]; c[l] ! (*, 0, 0); l := l + 1` |
//! | 7 | 3→4 | `[l > n]` |
//!
//! Worker edges: 0 is 0→1 `c[w] ? (Y_w, 0, j_w)`, 1 is 1→0
//! `[j_w != 0]; c[0] ! (prod(Y_w, B), w, j_w)`, 2 is 1→2 `[j_w = 0]`.
//!
//! The augmented model adds ghost assignments to `alpha` (channels holding a
//! task), `beta` (rows being multiplied) and `gamma` (rows written to `C`).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::explorer::{ExplorationResult, InvariantSpec, OverlapRecord, Predicate};
use crate::process::{ElementaryAction as EA, SeqProcess, VarDecl};
use crate::semantics::{DistributedProcess, DpState, SemanticsError, StateView};
use crate::terms::ops::*;
use crate::terms::{EvalError, Func, NodeId, Rational, RowSource, Term, TypeTag, Valuation, Value};

pub const MANAGER: &str = "P0";
pub const ALPHA: &str = "alpha";
pub const BETA: &str = "beta";
pub const GAMMA: &str = "gamma";

pub fn worker_name(w: u64) -> String {
    format!("P{w}")
}

pub fn worker_row_var(w: u64) -> String {
    format!("Y_{w}")
}

pub fn worker_tag_var(w: u64) -> String {
    format!("j_{w}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Rows are opaque atoms `A_i`; results are `A_iB`.
    Symbolic,
    /// Exact rational matrices: `a` is N×L, `b` is L×M.
    Numeric { a: Vec<Vec<Rational>>, b: Vec<Vec<Rational>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatmulParams {
    /// `N`, the number of rows of `A`.
    pub rows: u64,
    /// `n`, the number of workers.
    pub workers: u64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatmulError {
    #[error("the model needs at least one worker")]
    NoWorkers,
    #[error("A has {actual} rows but N = {expected}")]
    RowCount { expected: u64, actual: usize },
    #[error("matrix {0} is empty or ragged")]
    Ragged(&'static str),
    #[error("A has {a_cols} columns but B has {b_rows} rows")]
    Inner { a_cols: usize, b_rows: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl MatmulParams {
    pub fn symbolic(rows: u64, workers: u64) -> Self {
        MatmulParams { rows, workers, mode: Mode::Symbolic }
    }

    /// Numeric instance; `N` is the row count of `a`.
    pub fn numeric(a: Vec<Vec<Rational>>, b: Vec<Vec<Rational>>, workers: u64) -> Self {
        MatmulParams { rows: a.len() as u64, workers, mode: Mode::Numeric { a, b } }
    }

    pub fn validate(&self) -> Result<(), MatmulError> {
        if self.workers == 0 {
            return Err(MatmulError::NoWorkers);
        }
        if let Mode::Numeric { a, b } = &self.mode {
            if a.len() as u64 != self.rows {
                return Err(MatmulError::RowCount { expected: self.rows, actual: a.len() });
            }
            let rect = |m: &Vec<Vec<Rational>>| !m.is_empty() && !m[0].is_empty() && m.iter().all(|r| r.len() == m[0].len());
            if !rect(a) {
                return Err(MatmulError::Ragged("A"));
            }
            if !rect(b) {
                return Err(MatmulError::Ragged("B"));
            }
            if a[0].len() != b.len() {
                return Err(MatmulError::Inner { a_cols: a[0].len(), b_rows: b.len() });
            }
        }
        Ok(())
    }

    /// Values of the shared inputs `A`, `B`, `N`, `n`.
    pub fn inputs(&self) -> Valuation {
        let (a, b) = match &self.mode {
            Mode::Symbolic => (
                Value::Array((1..=self.rows).map(|k| Some(Value::Row(RowSource::A, k))).collect()),
                Value::MatrixAtom(String::from("B")),
            ),
            Mode::Numeric { a, b } => (
                Value::Array(a.iter().map(|r| Some(Value::QRow(r.clone()))).collect()),
                Value::QMatrix(b.clone()),
            ),
        };
        Valuation::new()
            .with("A", a)
            .with("B", b)
            .with("N", Value::Nat(self.rows))
            .with("n", Value::Nat(self.workers))
    }

    /// Row `r` of `A` (1-based) as a value.
    pub fn a_row(&self, r: u64) -> Option<Value> {
        if r == 0 || r > self.rows {
            return None;
        }
        Some(match &self.mode {
            Mode::Symbolic => Value::Row(RowSource::A, r),
            Mode::Numeric { a, .. } => Value::QRow(a[(r - 1) as usize].clone()),
        })
    }

    /// Row `r` of the product `AB`, computed directly from the matrices.
    pub fn ab_row(&self, r: u64) -> Option<Value> {
        if r == 0 || r > self.rows {
            return None;
        }
        Some(match &self.mode {
            Mode::Symbolic => Value::Row(RowSource::Prod, r),
            Mode::Numeric { a, b } => {
                let row = &a[(r - 1) as usize];
                let cols = b.first().map_or(0, Vec::len);
                Value::QRow(
                    (0..cols)
                        .map(|j| row.iter().zip(b).fold(Rational::from_integer(0), |acc, (x, b_row)| acc + *x * b_row[j]))
                        .collect(),
                )
            }
        })
    }
}

/// Deliberate model defects used to check that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mutation {
    /// Manager edge 2 omits `gamma := gamma ++ {j}`.
    DropGammaUpdate,
    /// The collection loop runs while `k <= N` and exits on `k > N`.
    LoopGuardInclusive,
    /// Only edge 2's guard becomes `k <= N`; the exit guard stays `k >= N`.
    GuardOnlyInclusive,
    /// Manager edge 0 sends `(A[i], 0, 0)` instead of tagging with `i`.
    ZeroTag,
}

impl Mutation {
    pub const ALL: [Mutation; 4] =
        [Mutation::DropGammaUpdate, Mutation::LoopGuardInclusive, Mutation::GuardOnlyInclusive, Mutation::ZeroTag];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DropGammaUpdate => "drop-gamma-update",
            Mutation::LoopGuardInclusive => "loop-guard-inclusive",
            Mutation::GuardOnlyInclusive => "guard-only-inclusive",
            Mutation::ZeroTag => "zero-tag",
        }
    }
}

fn assign(x: &str, e: Term) -> EA {
    EA::Assign { lhs: var(x), rhs: e, aux: false }
}

fn ghost(x: &str, e: Term) -> EA {
    EA::Assign { lhs: var(x), rhs: e, aux: true }
}

fn send(c: Term, msg: Term) -> EA {
    EA::Send { chan: chan(c), msg }
}

fn recv(c: Term, pattern: Term) -> EA {
    EA::Recv { chan: chan(c), pattern }
}

fn guard(t: Term) -> EA {
    EA::Guard(t)
}

fn set_nat() -> TypeTag {
    TypeTag::set_of(TypeTag::Nat)
}

fn aux_decl(name: &str) -> VarDecl {
    VarDecl::new(name, set_nat())
}

fn input_decls() -> Vec<VarDecl> {
    vec![
        VarDecl::new("A", TypeTag::array_of(TypeTag::Row)),
        VarDecl::new("B", TypeTag::Matrix),
        VarDecl::new("N", TypeTag::Nat),
        VarDecl::new("n", TypeTag::Nat),
    ]
}

fn manager(augmented: bool, mutation: Option<Mutation>) -> SeqProcess {
    let mut p = SeqProcess::new(MANAGER, NodeId(0));
    for v in 0..=4 {
        p.add_node(NodeId(v));
    }
    p.inputs = input_decls();
    p.privates = vec![
        VarDecl::with_init("C", TypeTag::array_of(TypeTag::Row), Term::app(Func::EmptyArray, vec![var("N")])),
        VarDecl::with_init("i", TypeTag::Nat, nat(1)),
        VarDecl::new("j", TypeTag::Nat),
        VarDecl::with_init("k", TypeTag::Nat, nat(0)),
        VarDecl::with_init("l", TypeTag::Nat, nat(1)),
        VarDecl::new("p", TypeTag::Nat),
    ];
    if augmented {
        p.aux = vec![aux_decl(ALPHA), aux_decl(GAMMA)];
    }
    p.init_cond = and(
        and(ge(var("N"), nat(1)), eq(var("i"), nat(1))),
        and(eq(var("k"), nat(0)), eq(var("l"), nat(1))),
    );
    let min_nn = min(var("n"), var("N"));
    let tag0 = if mutation == Some(Mutation::ZeroTag) { nat(0) } else { var("i") };
    let task = |tag: Term| tuple(vec![index(var("A"), var("i")), nat(0), tag]);
    let bump_i = assign("i", add(var("i"), nat(1)));

    let mut e0 = vec![guard(le(var("i"), min_nn.clone())), send(var("i"), task(tag0))];
    if augmented {
        e0.push(ghost(ALPHA, disjoint_union(var(ALPHA), set_of(vec![var("i")]))));
    }
    e0.push(bump_i.clone());
    p.add_edge(0, 0, e0);

    p.add_edge(0, 1, vec![guard(gt(var("i"), min_nn))]);

    let (loop_guard, exit_guard) = match mutation {
        Some(Mutation::LoopGuardInclusive) => (le(var("k"), var("N")), gt(var("k"), var("N"))),
        Some(Mutation::GuardOnlyInclusive) => (le(var("k"), var("N")), ge(var("k"), var("N"))),
        _ => (lt(var("k"), var("N")), ge(var("k"), var("N"))),
    };
    let mut e2 = vec![
        guard(loop_guard),
        recv(nat(0), tuple(vec![index(var("C"), var("j")), var("p"), var("j")])),
    ];
    if augmented && mutation != Some(Mutation::DropGammaUpdate) {
        e2.push(ghost(GAMMA, disjoint_union(var(GAMMA), set_of(vec![var("j")]))));
    }
    e2.push(assign("k", add(var("k"), nat(1))));
    p.add_edge(1, 2, e2);

    p.add_edge(2, 1, vec![guard(gt(var("i"), var("N")))]);

    let mut e4 = vec![guard(le(var("i"), var("N"))), send(var("p"), task(var("i")))];
    if augmented {
        e4.push(ghost(ALPHA, disjoint_union(var(ALPHA), set_of(vec![var("p")]))));
    }
    e4.push(bump_i);
    p.add_edge(2, 1, e4);

    p.add_edge(1, 3, vec![guard(exit_guard)]);
    p.add_edge(3, 3, vec![
        guard(le(var("l"), var("n"))),
        send(var("l"), konst(Value::Tuple(vec![Value::Star, Value::Nat(0), Value::Nat(0)]))),
        assign("l", add(var("l"), nat(1))),
    ]);
    p.add_edge(3, 4, vec![guard(gt(var("l"), var("n")))]);
    p
}

fn worker(w: u64, augmented: bool) -> SeqProcess {
    let y = worker_row_var(w);
    let j = worker_tag_var(w);
    let mut p = SeqProcess::new(&worker_name(w), NodeId(0));
    for v in 0..=2 {
        p.add_node(NodeId(v));
    }
    p.inputs = vec![VarDecl::new("B", TypeTag::Matrix)];
    p.privates = vec![VarDecl::new(&y, TypeTag::Row), VarDecl::new(&j, TypeTag::Nat)];
    if augmented {
        p.aux = vec![aux_decl(ALPHA), aux_decl(BETA)];
    }
    let mut e0 = vec![recv(nat(w), tuple(vec![var(&y), nat(0), var(&j)]))];
    if augmented {
        e0.push(ghost(BETA, disjoint_union(var(BETA), set_of(vec![var(&j)]))));
        e0.push(ghost(ALPHA, set_minus(var(ALPHA), set_of(vec![nat(w)]))));
    }
    p.add_edge(0, 1, e0);
    let mut e1 = vec![
        guard(ne(var(&j), nat(0))),
        send(nat(0), tuple(vec![prod(var(&y), var("B")), nat(w), var(&j)])),
    ];
    if augmented {
        e1.push(ghost(BETA, set_minus(var(BETA), set_of(vec![var(&j)]))));
    }
    p.add_edge(1, 0, e1);
    p.add_edge(1, 2, vec![guard(eq(var(&j), nat(0)))]);
    p
}

pub fn build(params: &MatmulParams, augmented: bool, mutation: Option<Mutation>) -> Result<DistributedProcess, MatmulError> {
    params.validate()?;
    let mut procs = vec![manager(augmented, mutation)];
    procs.extend((1..=params.workers).map(|w| worker(w, augmented)));
    Ok(DistributedProcess::new(procs)?)
}

pub fn build_plain(params: &MatmulParams) -> Result<DistributedProcess, MatmulError> {
    build(params, false, None)
}

pub fn build_augmented(params: &MatmulParams) -> Result<DistributedProcess, MatmulError> {
    build(params, true, None)
}

fn type_err(what: &str) -> EvalError {
    EvalError::TypeMismatch { func: String::from("invariant"), detail: format!("unexpected shape of {what}") }
}

fn nat_elems(s: &BTreeSet<Value>, what: &str) -> Result<Vec<u64>, EvalError> {
    s.iter().map(|v| v.as_nat().ok_or_else(|| type_err(what))).collect()
}

/// Third components of every message on channel `c`.
fn tags(v: &StateView<'_>, c: u64) -> Result<Vec<u64>, EvalError> {
    v.channel(c)
        .iter()
        .map(|m| m.as_tuple().and_then(|t| t.get(2)).and_then(Value::as_nat).ok_or_else(|| type_err("message")))
        .collect()
}

fn manager_at(v: &StateView<'_>) -> u32 {
    v.loc(0).0
}

fn in_range(x: u64, lo: u64, hi: u64) -> bool {
    lo <= x && x <= hi
}

/// Scope of the invariant suite: the manager is not in its shutdown phase.
pub fn outside_shutdown() -> Predicate {
    Predicate::native(|v| Ok(!matches!(manager_at(v), 3 | 4)))
}

fn spec(id: &str, description: &str, f: impl Fn(&StateView<'_>) -> Result<bool, EvalError> + Send + Sync + 'static) -> InvariantSpec {
    InvariantSpec::new(id, description, Predicate::native(f)).scoped(outside_shutdown())
}

/// The twelve invariants of the augmented model, each scoped to states where
/// the manager is not at node 3 or 4.
pub fn invariant_suite(params: &MatmulParams) -> Vec<InvariantSpec> {
    let params = Arc::new(params.clone());
    let workers = params.workers;
    let p9 = params.clone();
    let p10 = params.clone();
    let p11 = params;
    vec![
        spec("1", "alpha ⊆ {1..i-1}", |v| {
            let i = v.nat("i")?;
            Ok(nat_elems(v.set(ALPHA)?, ALPHA)?.iter().all(|&x| in_range(x, 1, i.saturating_sub(1))))
        }),
        spec("2", "i - 1 <= N", |v| Ok(v.nat("i")?.saturating_sub(1) <= v.nat("N")?)),
        spec("3", "|gamma| = k <= N", |v| {
            let k = v.nat("k")?;
            Ok(v.set(GAMMA)?.len() as u64 == k && k <= v.nat("N")?)
        }),
        spec("4", "at(P0) = 1 and k < N imply k < i - 1", |v| {
            let (k, n, i) = (v.nat("k")?, v.nat("N")?, v.nat("i")?);
            Ok(!(manager_at(v) == 1 && k < n) || k < i.saturating_sub(1))
        }),
        spec("5", "second components of c[0] are disjoint from alpha", |v| {
            let alpha = v.set(ALPHA)?;
            for m in v.channel(0).iter() {
                let who = m.as_tuple().and_then(|t| t.get(1)).ok_or_else(|| type_err("message"))?;
                if alpha.contains(who) {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        spec("6", "|c[w]| = 1 if w ∈ alpha else 0; at(Pw) = 1 implies w ∉ alpha and j_w ∉ gamma", move |v| {
            let alpha = v.set(ALPHA)?;
            let gamma = v.set(GAMMA)?;
            for w in 1..=workers {
                let busy = alpha.contains(&Value::Nat(w));
                if v.channel(w).len() != usize::from(busy) {
                    return Ok(false);
                }
                if v.loc(w as usize).0 == 1 && (busy || gamma.contains(v.value(&worker_tag_var(w))?)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        spec("7", "at(P0) = 2 implies p ∉ alpha and p ∈ {1..i-1}", |v| {
            if manager_at(v) != 2 {
                return Ok(true);
            }
            let p = v.nat("p")?;
            Ok(!v.set(ALPHA)?.contains(&Value::Nat(p)) && in_range(p, 1, v.nat("i")?.saturating_sub(1)))
        }),
        spec("8", "tags of c[1..n], beta, tags of c[0] and gamma partition {1..i-1}", move |v| {
            let mut all = Vec::new();
            for w in 1..=workers {
                all.extend(tags(v, w)?);
            }
            all.extend(nat_elems(v.set(BETA)?, BETA)?);
            all.extend(tags(v, 0)?);
            all.extend(nat_elems(v.set(GAMMA)?, GAMMA)?);
            all.sort_unstable();
            Ok(all.into_iter().eq(1..v.nat("i")?))
        }),
        spec("9", "every busy channel holds exactly one task (A_r, 0, r) with r ∈ {1..N}", move |v| {
            for p in nat_elems(v.set(ALPHA)?, ALPHA)? {
                let q = v.channel(p);
                if q.len() != 1 {
                    return Ok(false);
                }
                let ok = match q.head().and_then(Value::as_tuple) {
                    Some([row, Value::Nat(0), Value::Nat(r)]) => p9.a_row(*r).as_ref() == Some(row),
                    _ => false,
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        spec("10", "every result on c[0] is (A_rB, q, r) with r ∈ {1..N}", move |v| {
            Ok(v.channel(0).iter().all(|m| match m.as_tuple() {
                Some([row, Value::Nat(_), Value::Nat(r)]) => p10.ab_row(*r).as_ref() == Some(row),
                _ => false,
            }))
        }),
        spec("11", "C[j] = A_jB for every j ∈ gamma", move |v| {
            let c = v.value("C")?;
            for j in nat_elems(v.set(GAMMA)?, GAMMA)? {
                if c.cell(j).is_none() || c.cell(j).cloned() != p11.ab_row(j) {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        spec("12", "k = N implies gamma = {1..N}", |v| {
            let n = v.nat("N")?;
            if v.nat("k")? != n {
                return Ok(true);
            }
            Ok(nat_elems(v.set(GAMMA)?, GAMMA)?.into_iter().eq(1..=n))
        }),
    ]
}

/// Unscoped shape check on every queued message: tasks on `c[1..n]` are
/// `(row or *, 0, nat)`, results on `c[0]` are `(row, nat >= 1, nat >= 1)`.
pub fn message_shape_spec(params: &MatmulParams) -> InvariantSpec {
    let workers = params.workers;
    InvariantSpec::new(
        "shape",
        "messages on c[1..n] are (row|*, 0, nat); on c[0] are (row, nat>=1, nat>=1)",
        Predicate::native(move |v| {
            let is_row = |x: &Value| matches!(x, Value::Row(..) | Value::QRow(_));
            for w in 1..=workers {
                for m in v.channel(w).iter() {
                    match m.as_tuple() {
                        Some([x, Value::Nat(0), Value::Nat(_)]) if is_row(x) || *x == Value::Star => {}
                        _ => return Ok(false),
                    }
                }
            }
            Ok(v.channel(0).iter().all(|m| match m.as_tuple() {
                Some([x, Value::Nat(q), Value::Nat(r)]) => is_row(x) && *q >= 1 && *r >= 1,
                _ => false,
            }))
        }),
    )
}

/// Outcome of checking `C = AB` on every terminal state together with the
/// disjointness of every `⊔` that fired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSpecVerdict {
    pub terminals: usize,
    /// Terminal states where some `C_i` differs from `A_iB`.
    pub bad_terminals: Vec<usize>,
    /// Overlapping `⊔` firings from states outside the shutdown phase.
    pub overlaps_in_scope: Vec<OverlapRecord>,
    /// Overlapping `⊔` firings from shutdown-phase states, where a second
    /// worker receiving the stop tag 0 re-adds 0 to `beta`.
    pub overlaps_out_of_scope: usize,
    pub complete: bool,
}

impl FinalSpecVerdict {
    pub fn product_holds(&self) -> bool {
        self.complete && self.terminals > 0 && self.bad_terminals.is_empty()
    }

    pub fn disjointness_holds(&self) -> bool {
        self.overlaps_in_scope.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.product_holds() && self.disjointness_holds()
    }
}

/// `C` in a state, as cells 1..N.
pub fn c_cells(dp: &DistributedProcess, s: &DpState) -> Vec<Option<Value>> {
    match dp.slot("C").map(|k| &s.vars[k]) {
        Some(Value::Array(cells)) => cells.clone(),
        _ => Vec::new(),
    }
}

pub fn check_final_spec(params: &MatmulParams, dp: &DistributedProcess, r: &ExplorationResult) -> FinalSpecVerdict {
    let terminals = r.terminals();
    let bad_terminals = terminals
        .iter()
        .copied()
        .filter(|&t| {
            let cells = c_cells(dp, &r.states[t]);
            cells.len() as u64 != params.rows
                || (1..=params.rows).any(|i| cells[(i - 1) as usize] != params.ab_row(i))
        })
        .collect();
    let (in_scope, out): (Vec<_>, Vec<_>) =
        r.overlaps.iter().cloned().partition(|o| !matches!(r.states[o.from].locs[0].0, 3 | 4));
    FinalSpecVerdict {
        terminals: terminals.len(),
        bad_terminals,
        overlaps_in_scope: in_scope,
        overlaps_out_of_scope: out.len(),
        complete: r.is_complete(),
    }
}
