//! Exhaustive reachability analysis over the interleaving semantics.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::semantics::{
    initial_states, successors, DistributedProcess, DpState, SemanticsError, StateClass, StateView, StepError,
    Successor,
};
use crate::terms::{EvalError, Term, Valuation, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_queue_len: usize,
    pub max_depth: Option<usize>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_states: 1_000_000, max_queue_len: 64, max_depth: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundKind {
    MaxStates,
    MaxQueueLen,
    MaxDepth,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::MaxStates => "max-states",
            BoundKind::MaxQueueLen => "max-queue",
            BoundKind::MaxDepth => "max-depth",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Bfs,
    Dfs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionRef {
    pub from: usize,
    pub process: usize,
    pub edge: usize,
    pub to: usize,
}

/// A `⊔` that fired with overlapping arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapRecord {
    pub from: usize,
    pub process: usize,
    pub edge: usize,
    pub ea: usize,
    pub shared: BTreeSet<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("the initial condition is unsatisfiable for these inputs")]
    InitialConditionUnsatisfiable,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("while expanding state #{state}: {source}")]
    Step { state: usize, source: StepError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorationResult {
    pub states: Vec<DpState>,
    /// `None` for states left unexpanded because a bound fired.
    pub classes: Vec<Option<StateClass>>,
    pub depth: Vec<usize>,
    /// Transition through which each state was first discovered.
    pub parent: Vec<Option<usize>>,
    pub transitions: Vec<TransitionRef>,
    pub initials: Vec<usize>,
    pub overlaps: Vec<OverlapRecord>,
    pub truncated: Option<BoundKind>,
}

impl ExplorationResult {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn with_class(&self, c: StateClass) -> Vec<usize> {
        (0..self.states.len()).filter(|&k| self.classes[k] == Some(c)).collect()
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.with_class(StateClass::Terminal)
    }

    pub fn deadlocks(&self) -> Vec<usize> {
        self.with_class(StateClass::Deadlock)
    }

    pub fn is_complete(&self) -> bool {
        self.truncated.is_none()
    }

    /// Transition indices from an initial state to `state` along discovery
    /// parents. Under BFS this is a shortest path.
    pub fn path_to(&self, state: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = state;
        while let Some(t) = self.parent[cur] {
            path.push(t);
            cur = self.transitions[t].from;
        }
        path.reverse();
        path
    }

    pub fn successors_of(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (k, t) in self.transitions.iter().enumerate() {
            out[t.from].push(k);
        }
        out
    }
}

/// Computes the successor lists of a batch of frontier states. Results must
/// come back in frontier order so exploration is independent of how the batch
/// is processed.
pub trait Expander {
    fn expand(&self, dp: &DistributedProcess, states: &[&DpState]) -> Vec<Result<Vec<Successor>, StepError>>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Expander for Sequential {
    fn expand(&self, dp: &DistributedProcess, states: &[&DpState]) -> Vec<Result<Vec<Successor>, StepError>> {
        states.iter().map(|s| successors(dp, s)).collect()
    }
}

struct Builder<'a> {
    dp: &'a DistributedProcess,
    bounds: Bounds,
    index: BTreeMap<DpState, usize>,
    r: ExplorationResult,
}

impl<'a> Builder<'a> {
    fn new(dp: &'a DistributedProcess, inputs: &Valuation, bounds: Bounds) -> Result<Self, ExploreError> {
        let init = initial_states(dp, inputs)?;
        if init.is_empty() {
            return Err(ExploreError::InitialConditionUnsatisfiable);
        }
        let mut b = Builder {
            dp,
            bounds,
            index: BTreeMap::new(),
            r: ExplorationResult {
                states: Vec::new(),
                classes: Vec::new(),
                depth: Vec::new(),
                parent: Vec::new(),
                transitions: Vec::new(),
                initials: Vec::new(),
                overlaps: Vec::new(),
                truncated: None,
            },
        };
        for s in init {
            if let Some(k) = b.intern(s, 0, None) {
                b.r.initials.push(k);
            }
        }
        Ok(b)
    }

    fn truncate(&mut self, why: BoundKind) {
        if self.r.truncated.is_none() {
            self.r.truncated = Some(why);
        }
    }

    /// Index of `s`, adding it if new. `None` if a bound refuses it.
    fn intern(&mut self, s: DpState, depth: usize, parent: Option<usize>) -> Option<usize> {
        if let Some(&k) = self.index.get(&s) {
            return Some(k);
        }
        if s.max_queue_len() > self.bounds.max_queue_len {
            self.truncate(BoundKind::MaxQueueLen);
            return None;
        }
        if self.r.states.len() >= self.bounds.max_states {
            self.truncate(BoundKind::MaxStates);
            return None;
        }
        let k = self.r.states.len();
        self.index.insert(s.clone(), k);
        self.r.states.push(s);
        self.r.classes.push(None);
        self.r.depth.push(depth);
        self.r.parent.push(parent);
        Some(k)
    }

    /// Records the expansion of state `from`; returns newly discovered indices.
    fn record(&mut self, from: usize, succs: Vec<Successor>) -> Vec<usize> {
        let class = if self.dp.is_terminal(&self.r.states[from]) {
            StateClass::Terminal
        } else if succs.is_empty() {
            StateClass::Deadlock
        } else {
            StateClass::Live
        };
        self.r.classes[from] = Some(class);
        let depth = self.r.depth[from] + 1;
        let mut fresh = Vec::new();
        for succ in succs {
            for o in succ.overlaps {
                self.r.overlaps.push(OverlapRecord {
                    from,
                    process: succ.process,
                    edge: succ.edge,
                    ea: o.ea,
                    shared: o.shared,
                });
            }
            let before = self.r.states.len();
            let t = self.r.transitions.len();
            let Some(to) = self.intern(succ.state, depth, Some(t)) else { continue };
            self.r.transitions.push(TransitionRef { from, process: succ.process, edge: succ.edge, to });
            if to == before {
                fresh.push(to);
            }
        }
        fresh
    }

    fn depth_exhausted(&mut self, k: usize) -> bool {
        if self.bounds.max_depth.is_some_and(|d| self.r.depth[k] >= d) {
            self.truncate(BoundKind::MaxDepth);
            true
        } else {
            false
        }
    }
}

/// Breadth-first exploration of every state reachable from the initial state.
pub fn explore(dp: &DistributedProcess, inputs: &Valuation, bounds: Bounds) -> Result<ExplorationResult, ExploreError> {
    explore_with(dp, inputs, bounds, &Sequential)
}

/// Level-synchronous BFS; each level is handed to `expander` as one batch.
pub fn explore_with(
    dp: &DistributedProcess,
    inputs: &Valuation,
    bounds: Bounds,
    expander: &dyn Expander,
) -> Result<ExplorationResult, ExploreError> {
    let mut b = Builder::new(dp, inputs, bounds)?;
    let mut frontier: Vec<usize> = b.r.initials.clone();
    while !frontier.is_empty() {
        frontier.retain(|&k| !b.depth_exhausted(k));
        let batch: Vec<&DpState> = frontier.iter().map(|&k| &b.r.states[k]).collect();
        let results = expander.expand(dp, &batch);
        let mut next = Vec::new();
        for (&k, res) in frontier.iter().zip(results) {
            let succs = res.map_err(|source| ExploreError::Step { state: k, source })?;
            next.extend(b.record(k, succs));
        }
        frontier = next;
    }
    Ok(b.r)
}

/// Depth-first exploration. Reaches the same state set as BFS but numbers
/// states in DFS discovery order.
pub fn explore_dfs(dp: &DistributedProcess, inputs: &Valuation, bounds: Bounds) -> Result<ExplorationResult, ExploreError> {
    let mut b = Builder::new(dp, inputs, bounds)?;
    let mut stack: Vec<usize> = b.r.initials.iter().rev().copied().collect();
    while let Some(k) = stack.pop() {
        if b.r.classes[k].is_some() || b.depth_exhausted(k) {
            continue;
        }
        let succs = successors(dp, &b.r.states[k]).map_err(|source| ExploreError::Step { state: k, source })?;
        let fresh = b.record(k, succs);
        stack.extend(fresh.into_iter().rev());
    }
    Ok(b.r)
}

pub fn explore_strategy(
    dp: &DistributedProcess,
    inputs: &Valuation,
    bounds: Bounds,
    strategy: Strategy,
) -> Result<ExplorationResult, ExploreError> {
    match strategy {
        Strategy::Bfs => explore(dp, inputs, bounds),
        Strategy::Dfs => explore_dfs(dp, inputs, bounds),
    }
}

/// A reachable cycle: `prefix` leads from an initial state to the cycle's
/// first state, `cycle` returns to it. Both are transition indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

/// Cycle search by repeatedly removing states without incoming transitions.
pub fn kahn_cycle(r: &ExplorationResult) -> Option<Lasso> {
    let n = r.states.len();
    let out = r.successors_of();
    let mut indeg = vec![0usize; n];
    for t in &r.transitions {
        indeg[t.to] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&k| indeg[k] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(k) = queue.pop_front() {
        removed[k] = true;
        for &t in &out[k] {
            let to = r.transitions[t].to;
            indeg[to] -= 1;
            if indeg[to] == 0 {
                queue.push_back(to);
            }
        }
    }
    let start = (0..n).find(|&k| !removed[k])?;
    // Every remaining state has a remaining predecessor; walk backwards until
    // a state repeats, then read the cycle forwards.
    let mut into = vec![None; n];
    for (k, t) in r.transitions.iter().enumerate() {
        if !removed[t.from] && !removed[t.to] && into[t.to].is_none() {
            into[t.to] = Some(k);
        }
    }
    let mut seen = BTreeMap::new();
    let mut cur = start;
    let mut walk = Vec::new();
    while !seen.contains_key(&cur) {
        seen.insert(cur, walk.len());
        let t = into[cur].expect("remaining states keep a remaining predecessor");
        walk.push(t);
        cur = r.transitions[t].from;
    }
    let mut cycle: Vec<usize> = walk[seen[&cur]..].to_vec();
    cycle.reverse();
    let entry = r.transitions[cycle[0]].from;
    Some(Lasso { prefix: r.path_to(entry), cycle })
}

/// Cycle search by iterative depth-first back-edge detection.
pub fn dfs_cycle(r: &ExplorationResult) -> Option<Lasso> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let out = r.successors_of();
    let mut color = vec![Color::White; r.states.len()];
    for &root in &r.initials {
        if color[root] != Color::White {
            continue;
        }
        // (state, next outgoing position, transition used to enter)
        let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(root, 0, None)];
        color[root] = Color::Grey;
        while let Some(&mut (k, ref mut pos, _)) = stack.last_mut() {
            if *pos == out[k].len() {
                color[k] = Color::Black;
                stack.pop();
                continue;
            }
            let t = out[k][*pos];
            *pos += 1;
            let to = r.transitions[t].to;
            match color[to] {
                Color::White => {
                    color[to] = Color::Grey;
                    stack.push((to, 0, Some(t)));
                }
                Color::Grey => {
                    let at = stack.iter().position(|e| e.0 == to).expect("grey states are on the stack");
                    let mut cycle: Vec<usize> = stack[at + 1..].iter().filter_map(|e| e.2).collect();
                    cycle.push(t);
                    let prefix = stack[..=at].iter().filter_map(|e| e.2).collect();
                    return Some(Lasso { prefix, cycle });
                }
                Color::Black => {}
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleReport {
    pub kahn: Option<Lasso>,
    pub dfs: Option<Lasso>,
    /// A truncated graph may hide cycles, so "acyclic" is only a sound
    /// verdict when this is false.
    pub unsound: bool,
}

impl CycleReport {
    pub fn acyclic(&self) -> bool {
        self.kahn.is_none() && self.dfs.is_none()
    }

    pub fn agree(&self) -> bool {
        self.kahn.is_some() == self.dfs.is_some()
    }

    pub fn witness(&self) -> Option<&Lasso> {
        self.dfs.as_ref().or(self.kahn.as_ref())
    }
}

pub fn detect_cycles(r: &ExplorationResult) -> CycleReport {
    CycleReport { kahn: kahn_cycle(r), dfs: dfs_cycle(r), unsound: r.truncated.is_some() }
}

pub type NativePredicate = Arc<dyn Fn(&StateView<'_>) -> Result<bool, EvalError> + Send + Sync>;

#[derive(Clone)]
pub enum Predicate {
    Expr(Term),
    Native(NativePredicate),
}

impl Predicate {
    pub fn always() -> Self {
        Predicate::Expr(Term::bool(true))
    }

    pub fn native(f: impl Fn(&StateView<'_>) -> Result<bool, EvalError> + Send + Sync + 'static) -> Self {
        Predicate::Native(Arc::new(f))
    }

    pub fn holds(&self, view: &StateView<'_>) -> Result<bool, EvalError> {
        match self {
            Predicate::Native(f) => f(view),
            Predicate::Expr(t) => match t.eval(view)? {
                Value::Bool(b) => Ok(b),
                other => Err(EvalError::TypeMismatch {
                    func: String::from("invariant"),
                    detail: alloc::format!("{other} is not a bool"),
                }),
            },
        }
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Expr(t) => f.debug_tuple("Expr").field(t).finish(),
            Predicate::Native(_) => f.write_str("Native(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSpec {
    pub id: String,
    pub description: String,
    pub scope: Predicate,
    pub predicate: Predicate,
}

impl InvariantSpec {
    pub fn new(id: &str, description: &str, predicate: Predicate) -> Self {
        InvariantSpec { id: id.into(), description: description.into(), scope: Predicate::always(), predicate }
    }

    pub fn scoped(mut self, scope: Predicate) -> Self {
        self.scope = scope;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub state: usize,
    /// Set when the predicate could not be evaluated rather than being false.
    pub error: Option<EvalError>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantOutcome {
    pub id: String,
    pub description: String,
    /// Number of states inside the invariant's scope.
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl InvariantOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every spec at every in-scope reachable state.
pub fn check_invariants(dp: &DistributedProcess, r: &ExplorationResult, specs: &[InvariantSpec]) -> Vec<InvariantOutcome> {
    specs
        .iter()
        .map(|spec| {
            let mut out = InvariantOutcome {
                id: spec.id.clone(),
                description: spec.description.clone(),
                checked: 0,
                violations: Vec::new(),
            };
            for (k, s) in r.states.iter().enumerate() {
                let view = StateView::new(dp, s);
                match spec.scope.holds(&view) {
                    Ok(false) => continue,
                    Ok(true) => {}
                    Err(e) => {
                        out.violations.push(Violation { state: k, error: Some(e) });
                        continue;
                    }
                }
                out.checked += 1;
                match spec.predicate.holds(&view) {
                    Ok(true) => {}
                    Ok(false) => out.violations.push(Violation { state: k, error: None }),
                    Err(e) => out.violations.push(Violation { state: k, error: Some(e) }),
                }
            }
            out
        })
        .collect()
}

/// Discovery-order-independent description of an explored graph, with state
/// identity given by a projection of the canonical key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSignature {
    pub states: BTreeSet<String>,
    /// (source key, process name, edge index, target key)
    pub edges: BTreeSet<(String, String, usize, String)>,
    pub initials: BTreeSet<String>,
    /// Raw counts, so a projection that merges states is detectable.
    pub state_count: usize,
    pub edge_count: usize,
}

pub fn graph_signature(
    dp: &DistributedProcess,
    r: &ExplorationResult,
    map: &dyn Fn(&str) -> Option<String>,
) -> GraphSignature {
    let keys: Vec<String> = r.states.iter().map(|s| dp.canonical_key_with(s, map)).collect();
    GraphSignature {
        states: keys.iter().cloned().collect(),
        edges: r
            .transitions
            .iter()
            .map(|t| (keys[t.from].clone(), dp.process(t.process).name.clone(), t.edge, keys[t.to].clone()))
            .collect(),
        initials: r.initials.iter().map(|&k| keys[k].clone()).collect(),
        state_count: r.states.len(),
        edge_count: r.transitions.len(),
    }
}

/// Signature with auxiliary variables left out of state identity.
pub fn signature_without_aux(dp: &DistributedProcess, r: &ExplorationResult) -> GraphSignature {
    graph_signature(dp, r, &|name| if dp.is_aux_var(name) { None } else { Some(String::from(name)) })
}
