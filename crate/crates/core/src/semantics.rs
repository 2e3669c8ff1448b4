//! Operational semantics of distributed processes: states, the elementary
//! transition rules, atomic actions and the interleaving step.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use crate::process::{rename, ElementaryAction, Renaming, SeqProcess, VarDecl};
use crate::terms::{ChannelId, Env, EvalError, NodeId, Queue, Term, TypeTag, Valuation, Value};

/// Storage key for channel contents. The broadcast channel is realised as one
/// in-queue per receiving process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueueId {
    Channel(u64),
    Inbox(usize),
}

/// A state of a distributed process: the binding of every variable, the
/// channel contents, and the control location of every process.
///
/// Empty queues are not stored, so structurally equal states are equal as
/// values and can be used directly as visited-set keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DpState {
    pub locs: Vec<NodeId>,
    /// Indexed by the variable slots of the owning [`DistributedProcess`].
    pub vars: Vec<Value>,
    pub queues: BTreeMap<QueueId, Queue>,
}

static EMPTY_QUEUE: Queue = Queue::new();

impl DpState {
    pub fn queue(&self, id: QueueId) -> &Queue {
        self.queues.get(&id).unwrap_or(&EMPTY_QUEUE)
    }

    pub fn max_queue_len(&self) -> usize {
        self.queues.values().map(Queue::len).max().unwrap_or(0)
    }

    fn push(&mut self, id: QueueId, v: Value) {
        self.queues.entry(id).or_default().push(v);
    }

    fn pop(&mut self, id: QueueId) -> Option<Value> {
        let q = self.queues.get_mut(&id)?;
        let v = q.pop();
        if q.is_empty() {
            self.queues.remove(&id);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarOwner {
    Input,
    Aux,
    Private(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("a distributed process needs at least one sequential process")]
    NoProcesses,
    #[error("two processes are named `{0}`")]
    DuplicateProcess(String),
    #[error("variable `{name}` is declared with conflicting types {first} and {second}")]
    ConflictingDeclaration { name: String, first: TypeTag, second: TypeTag },
    #[error("missing value for input variable `{0}`")]
    MissingInput(String),
    #[error("input `{name}` = {value} does not have type {expected}")]
    InputType { name: String, expected: TypeTag, value: Value },
    #[error("cannot evaluate the initial value of `{name}`: {source}")]
    Initializer { name: String, source: EvalError },
    #[error("cannot evaluate the initial condition of `{process}`: {source}")]
    InitCondition { process: String, source: EvalError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("process #{process}{}: {source}", edge.map(|e| format!(", edge #{e}")).unwrap_or_default())]
pub struct StepError {
    pub process: usize,
    pub edge: Option<usize>,
    pub source: EvalError,
}

/// A family of sequential processes with pairwise disjoint private variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributedProcess {
    processes: Vec<SeqProcess>,
    inputs: Vec<VarDecl>,
    aux: Vec<VarDecl>,
    /// Sorted variable names; position is the slot in [`DpState::vars`].
    names: Vec<String>,
    owners: Vec<VarOwner>,
    types: Vec<TypeTag>,
    slots: BTreeMap<String, usize>,
}

fn merge_decl(into: &mut Vec<VarDecl>, d: &VarDecl) -> Result<(), SemanticsError> {
    match into.iter().find(|e| e.name == d.name) {
        Some(e) if e.ty != d.ty => Err(SemanticsError::ConflictingDeclaration {
            name: d.name.clone(),
            first: e.ty.clone(),
            second: d.ty.clone(),
        }),
        Some(_) => Ok(()),
        None => {
            into.push(d.clone());
            Ok(())
        }
    }
}

impl DistributedProcess {
    /// Builds the family. Private variables that collide with another
    /// process's privates, an input, or an auxiliary variable are renamed by
    /// appending `_<process index>`.
    pub fn new(processes: Vec<SeqProcess>) -> Result<Self, SemanticsError> {
        if processes.is_empty() {
            return Err(SemanticsError::NoProcesses);
        }
        let mut seen = BTreeSet::new();
        for p in &processes {
            if !seen.insert(p.name.clone()) {
                return Err(SemanticsError::DuplicateProcess(p.name.clone()));
            }
        }
        let mut inputs = Vec::new();
        let mut aux = Vec::new();
        for p in &processes {
            for d in &p.inputs {
                merge_decl(&mut inputs, d)?;
            }
            for d in &p.aux {
                merge_decl(&mut aux, d)?;
            }
        }
        let mut taken: BTreeSet<String> = inputs.iter().chain(&aux).map(|d| d.name.clone()).collect();
        let mut fixed = Vec::with_capacity(processes.len());
        for (idx, p) in processes.into_iter().enumerate() {
            let mut eta = Renaming::new();
            let own: BTreeSet<String> = p.privates.iter().map(|d| d.name.clone()).collect();
            for d in &p.privates {
                if taken.contains(&d.name) {
                    let mut fresh = format!("{}_{}", d.name, idx);
                    while taken.contains(&fresh) || own.contains(&fresh) {
                        fresh.push('\'');
                    }
                    taken.insert(fresh.clone());
                    eta = eta.with(&d.name, &fresh);
                } else {
                    taken.insert(d.name.clone());
                }
            }
            let p = if eta.0.is_empty() {
                p
            } else {
                rename(&p, &eta).expect("fresh names avoid every declared variable")
            };
            fixed.push(p);
        }

        let mut table: Vec<(String, VarOwner, TypeTag)> = Vec::new();
        table.extend(inputs.iter().map(|d| (d.name.clone(), VarOwner::Input, d.ty.clone())));
        table.extend(aux.iter().map(|d| (d.name.clone(), VarOwner::Aux, d.ty.clone())));
        for (i, p) in fixed.iter().enumerate() {
            table.extend(p.privates.iter().map(|d| (d.name.clone(), VarOwner::Private(i), d.ty.clone())));
        }
        table.sort_by(|a, b| a.0.cmp(&b.0));
        let slots = table.iter().enumerate().map(|(k, (n, _, _))| (n.clone(), k)).collect();
        Ok(DistributedProcess {
            processes: fixed,
            inputs,
            aux,
            names: table.iter().map(|t| t.0.clone()).collect(),
            owners: table.iter().map(|t| t.1).collect(),
            types: table.into_iter().map(|t| t.2).collect(),
            slots,
        })
    }

    pub fn processes(&self) -> &[SeqProcess] {
        &self.processes
    }

    pub fn process(&self, i: usize) -> &SeqProcess {
        &self.processes[i]
    }

    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    /// `X_𝒫`, the shared input variables.
    pub fn inputs(&self) -> &[VarDecl] {
        &self.inputs
    }

    pub fn aux(&self) -> &[VarDecl] {
        &self.aux
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.slots.get(name).copied()
    }

    pub fn owner(&self, slot: usize) -> VarOwner {
        self.owners[slot]
    }

    pub fn var_type(&self, slot: usize) -> &TypeTag {
        &self.types[slot]
    }

    pub fn var_types(&self) -> BTreeMap<String, TypeTag> {
        self.names.iter().cloned().zip(self.types.iter().cloned()).collect()
    }

    pub fn is_aux_var(&self, name: &str) -> bool {
        self.slot(name).is_some_and(|s| self.owners[s] == VarOwner::Aux)
    }

    /// The same family with every auxiliary assignment and variable removed.
    pub fn erase_aux(&self) -> DistributedProcess {
        DistributedProcess::new(self.processes.iter().map(SeqProcess::erase_aux).collect())
            .expect("erasing auxiliaries keeps declarations consistent")
    }

    pub fn is_terminal(&self, s: &DpState) -> bool {
        self.processes.iter().zip(&s.locs).all(|(p, &v)| p.is_sink(v))
    }

    /// Stable textual serialization of a state: locations, sorted binding,
    /// then non-empty queues.
    pub fn canonical_key(&self, s: &DpState) -> String {
        self.canonical_key_with(s, &|name| Some(name.to_string()))
    }

    /// Canonical key after renaming variables; variables mapped to `None` are
    /// left out.
    pub fn canonical_key_with(&self, s: &DpState, map: &dyn Fn(&str) -> Option<String>) -> String {
        let mut out = String::from("at[");
        for (k, (p, v)) in self.processes.iter().zip(&s.locs).enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}={}", p.name, v);
        }
        out.push_str("] vars[");
        let mut vars: Vec<(String, &Value)> = self
            .names
            .iter()
            .zip(&s.vars)
            .filter_map(|(n, v)| map(n).map(|m| (m, v)))
            .collect();
        vars.sort();
        for (k, (n, v)) in vars.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{n}={v}");
        }
        out.push_str("] chans[");
        for (k, (id, q)) in s.queues.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            match id {
                QueueId::Channel(c) => {
                    let _ = write!(out, "c[{c}]=<");
                }
                QueueId::Inbox(p) => {
                    let _ = write!(out, "bcast>{}=<", self.processes[*p].name);
                }
            }
            for (j, v) in q.iter().enumerate() {
                if j > 0 {
                    out.push_str("; ");
                }
                let _ = write!(out, "{v}");
            }
            out.push('>');
        }
        out.push(']');
        out
    }
}

/// Read access to a state for evaluation.
#[derive(Clone, Copy)]
pub struct StateView<'a> {
    pub dp: &'a DistributedProcess,
    pub state: &'a DpState,
    /// The process whose broadcast in-queue `bcast` refers to.
    pub process: Option<usize>,
}

impl<'a> StateView<'a> {
    pub fn new(dp: &'a DistributedProcess, state: &'a DpState) -> Self {
        StateView { dp, state, process: None }
    }

    pub fn value(&self, name: &str) -> Result<&'a Value, EvalError> {
        self.dp
            .slot(name)
            .map(|s| &self.state.vars[s])
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
    }

    pub fn nat(&self, name: &str) -> Result<u64, EvalError> {
        let v = self.value(name)?;
        v.as_nat().ok_or_else(|| EvalError::TypeMismatch {
            func: name.to_string(),
            detail: format!("expected nat, got {v}"),
        })
    }

    pub fn set(&self, name: &str) -> Result<&'a BTreeSet<Value>, EvalError> {
        let v = self.value(name)?;
        v.as_set().ok_or_else(|| EvalError::TypeMismatch {
            func: name.to_string(),
            detail: format!("expected set, got {v}"),
        })
    }

    pub fn channel(&self, c: u64) -> &'a Queue {
        self.state.queue(QueueId::Channel(c))
    }

    pub fn loc(&self, process: usize) -> NodeId {
        self.state.locs[process]
    }
}

impl Env for StateView<'_> {
    fn var(&self, name: &str) -> Option<&Value> {
        self.dp.slot(name).map(|s| &self.state.vars[s])
    }

    fn queue(&self, chan: ChannelId) -> Result<Option<&Queue>, EvalError> {
        let id = match chan {
            ChannelId::Indexed(c) => QueueId::Channel(c),
            ChannelId::Broadcast => match self.process {
                Some(p) => QueueId::Inbox(p),
                None => return Err(EvalError::NoStateAccess("bcast outside a process")),
            },
        };
        Ok(self.state.queues.get(&id))
    }

    fn location(&self, process: &str) -> Result<u64, EvalError> {
        self.dp
            .process_index(process)
            .map(|i| u64::from(self.state.locs[i].0))
            .ok_or_else(|| EvalError::UnknownProcess(process.to_string()))
    }
}

/// All initial states for the given input values: every channel empty,
/// every process at its initial node, privates and auxiliaries at their
/// declared initial values. Empty if some initial condition evaluates to 0.
pub fn initial_states(dp: &DistributedProcess, inputs: &Valuation) -> Result<Vec<DpState>, SemanticsError> {
    let mut env = Valuation::new();
    for d in &dp.inputs {
        let v = inputs.get(&d.name).ok_or_else(|| SemanticsError::MissingInput(d.name.clone()))?;
        if !v.conforms(&d.ty) {
            return Err(SemanticsError::InputType { name: d.name.clone(), expected: d.ty.clone(), value: v.clone() });
        }
        env.insert(&d.name, v.clone());
    }
    let init_of = |d: &VarDecl| -> Result<Value, SemanticsError> {
        match &d.init {
            None => Ok(d.ty.default_value()),
            Some(t) => t
                .eval(&env)
                .map_err(|source| SemanticsError::Initializer { name: d.name.clone(), source }),
        }
    };
    let mut vars = Vec::with_capacity(dp.names.len());
    for name in &dp.names {
        let decl = dp
            .inputs
            .iter()
            .chain(&dp.aux)
            .chain(dp.processes.iter().flat_map(|p| &p.privates))
            .find(|d| &d.name == name)
            .expect("every slot has a declaration");
        vars.push(match env.get(name) {
            Some(v) => v.clone(),
            None => init_of(decl)?,
        });
    }
    let state = DpState { locs: dp.processes.iter().map(|p| p.initial).collect(), vars, queues: BTreeMap::new() };
    let view = StateView::new(dp, &state);
    for p in &dp.processes {
        let ok = p
            .init_cond
            .eval(&view)
            .map_err(|source| SemanticsError::InitCondition { process: p.name.clone(), source })?;
        match ok {
            Value::Bool(true) => {}
            Value::Bool(false) => return Ok(Vec::new()),
            other => {
                return Err(SemanticsError::InitCondition {
                    process: p.name.clone(),
                    source: EvalError::TypeMismatch {
                        func: "init".to_string(),
                        detail: format!("initial condition evaluated to {other}"),
                    },
                })
            }
        }
    }
    Ok(alloc::vec![state])
}

/// A `⊔` whose arguments shared elements when it fired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionOverlap {
    /// Position of the assignment within the action.
    pub ea: usize,
    pub shared: BTreeSet<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub process: usize,
    pub edge: usize,
    pub state: DpState,
    pub overlaps: Vec<UnionOverlap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateClass {
    Terminal,
    Deadlock,
    Live,
}

fn chan_queue(dp: &DistributedProcess, s: &DpState, i: usize, chan: &Term) -> Result<(ChannelId, QueueId), EvalError> {
    let view = StateView { dp, state: s, process: Some(i) };
    match chan.eval(&view)? {
        Value::Chan(c @ ChannelId::Indexed(k)) => Ok((c, QueueId::Channel(k))),
        Value::Chan(ChannelId::Broadcast) => Ok((ChannelId::Broadcast, QueueId::Inbox(i))),
        other => Err(EvalError::TypeMismatch { func: "channel".to_string(), detail: format!("{other} is not a channel") }),
    }
}

struct Match<'t> {
    binds: Vec<(usize, Value)>,
    cells: Vec<(usize, &'t Term, Value)>,
}

/// Structural matching of a restricted receive pattern against a message.
fn match_pattern<'t>(
    dp: &DistributedProcess,
    s: &DpState,
    i: usize,
    pat: &'t Term,
    val: &Value,
    m: &mut Match<'t>,
) -> Result<bool, EvalError> {
    match pat {
        Term::App(crate::terms::Func::Tuple(n), args) => match val {
            Value::Tuple(items) if items.len() == *n => {
                for (a, v) in args.iter().zip(items) {
                    if !match_pattern(dp, s, i, a, v, m)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
        Term::Var(x) if dp.slot(x).is_some_and(|k| dp.owners[k] == VarOwner::Private(i)) => {
            let slot = dp.slots[x];
            if !val.conforms(&dp.types[slot]) {
                return Ok(false);
            }
            if let Some((_, prev)) = m.binds.iter().find(|(k, _)| *k == slot) {
                return Ok(prev == val);
            }
            m.binds.push((slot, val.clone()));
            Ok(true)
        }
        Term::Index(base, idx) => match &**base {
            Term::Var(x) if dp.slot(x).is_some_and(|k| dp.owners[k] == VarOwner::Private(i)) => {
                m.cells.push((dp.slots[x], idx, val.clone()));
                Ok(true)
            }
            _ => Err(EvalError::TypeMismatch {
                func: "?".to_string(),
                detail: "pattern cell must belong to a private array".to_string(),
            }),
        },
        other => {
            let view = StateView { dp, state: s, process: Some(i) };
            Ok(&other.eval(&view)? == val)
        }
    }
}

fn write_cell(s: &mut DpState, slot: usize, k: u64, v: Value) -> Result<(), EvalError> {
    match &mut s.vars[slot] {
        Value::Array(cells) => {
            if k == 0 || k as usize > cells.len() {
                return Err(EvalError::IndexOutOfRange { index: k, len: cells.len() });
            }
            cells[(k - 1) as usize] = Some(v);
            Ok(())
        }
        other => Err(EvalError::TypeMismatch { func: "[]".to_string(), detail: format!("{other} is not an array") }),
    }
}

fn target_slot(dp: &DistributedProcess, x: &str) -> Result<usize, EvalError> {
    dp.slot(x).ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
}

/// Applies one elementary action in place. `Ok(false)` means the action is
/// disabled; `s` may then be partially updated and must be discarded.
fn apply_ea(
    dp: &DistributedProcess,
    s: &mut DpState,
    i: usize,
    ea: &ElementaryAction,
    pos: usize,
    overlaps: &mut Vec<UnionOverlap>,
) -> Result<bool, EvalError> {
    match ea {
        ElementaryAction::Guard(phi) => {
            let view = StateView { dp, state: s, process: Some(i) };
            match phi.eval(&view)? {
                Value::Bool(b) => Ok(b),
                other => Err(EvalError::TypeMismatch { func: "guard".to_string(), detail: format!("{other} is not a bool") }),
            }
        }
        ElementaryAction::Send { chan, msg } => {
            let (c, _) = chan_queue(dp, s, i, chan)?;
            let view = StateView { dp, state: s, process: Some(i) };
            let v = msg.eval(&view)?;
            match c {
                ChannelId::Indexed(k) => s.push(QueueId::Channel(k), v),
                ChannelId::Broadcast => {
                    for j in (0..dp.processes.len()).filter(|&j| j != i) {
                        s.push(QueueId::Inbox(j), v.clone());
                    }
                }
            }
            Ok(true)
        }
        ElementaryAction::Recv { chan, pattern } => {
            let (_, q) = chan_queue(dp, s, i, chan)?;
            let Some(head) = s.queue(q).head().cloned() else {
                return Ok(false);
            };
            let mut m = Match { binds: Vec::new(), cells: Vec::new() };
            if !match_pattern(dp, s, i, pattern, &head, &mut m)? {
                return Ok(false);
            }
            for (slot, v) in m.binds {
                s.vars[slot] = v;
            }
            for (slot, idx, v) in m.cells {
                let view = StateView { dp, state: s, process: Some(i) };
                let k = idx.eval(&view)?.as_nat().ok_or_else(|| EvalError::TypeMismatch {
                    func: "[]".to_string(),
                    detail: "array index is not a nat".to_string(),
                })?;
                write_cell(s, slot, k, v)?;
            }
            s.pop(q);
            Ok(true)
        }
        ElementaryAction::Assign { lhs, rhs, .. } => {
            let view = StateView { dp, state: s, process: Some(i) };
            let v = rhs.eval(&view)?;
            for shared in rhs.disjoint_union_overlaps(&view)? {
                overlaps.push(UnionOverlap { ea: pos, shared });
            }
            match lhs {
                Term::Var(x) => {
                    let slot = target_slot(dp, x)?;
                    s.vars[slot] = v;
                }
                Term::Index(base, idx) => {
                    let Term::Var(x) = &**base else {
                        return Err(EvalError::TypeMismatch {
                            func: ":=".to_string(),
                            detail: "only cells of array variables can be assigned".to_string(),
                        });
                    };
                    let slot = target_slot(dp, x)?;
                    let k = idx.eval(&view)?.as_nat().ok_or_else(|| EvalError::TypeMismatch {
                        func: "[]".to_string(),
                        detail: "array index is not a nat".to_string(),
                    })?;
                    write_cell(s, slot, k, v)?;
                }
                _ => {
                    return Err(EvalError::TypeMismatch {
                        func: ":=".to_string(),
                        detail: "assignment target must be a variable or array cell".to_string(),
                    })
                }
            }
            Ok(true)
        }
    }
}

/// One elementary transition of process `i` from `s`; `None` if it is not enabled.
pub fn step_elementary(
    dp: &DistributedProcess,
    s: &DpState,
    i: usize,
    ea: &ElementaryAction,
) -> Result<Option<DpState>, StepError> {
    let mut next = s.clone();
    let mut overlaps = Vec::new();
    match apply_ea(dp, &mut next, i, ea, 0, &mut overlaps) {
        Ok(true) => Ok(Some(next)),
        Ok(false) => Ok(None),
        Err(source) => Err(StepError { process: i, edge: None, source }),
    }
}

/// Fires edge `edge` of process `i` atomically: every elementary action in
/// the label fires in order, or the edge is disabled and `None` is returned.
/// Only process `i` changes location.
pub fn step_action(
    dp: &DistributedProcess,
    s: &DpState,
    i: usize,
    edge: usize,
) -> Result<Option<Successor>, StepError> {
    let e = &dp.processes[i].edges[edge];
    if s.locs[i] != e.from {
        return Ok(None);
    }
    let mut next = s.clone();
    let mut overlaps = Vec::new();
    for (pos, ea) in e.action.0.iter().enumerate() {
        match apply_ea(dp, &mut next, i, ea, pos, &mut overlaps) {
            Ok(true) => {}
            Ok(false) => return Ok(None),
            Err(source) => return Err(StepError { process: i, edge: Some(edge), source }),
        }
    }
    next.locs[i] = e.to;
    Ok(Some(Successor { process: i, edge, state: next, overlaps }))
}

/// Every enabled transition from `s`, ordered by process index then edge index.
pub fn successors(dp: &DistributedProcess, s: &DpState) -> Result<Vec<Successor>, StepError> {
    let mut out = Vec::new();
    for (i, p) in dp.processes.iter().enumerate() {
        for (k, _) in p.edges_from(s.locs[i]) {
            if let Some(succ) = step_action(dp, s, i, k)? {
                out.push(succ);
            }
        }
    }
    Ok(out)
}

pub fn classify_state(dp: &DistributedProcess, s: &DpState) -> Result<StateClass, StepError> {
    if dp.is_terminal(s) {
        return Ok(StateClass::Terminal);
    }
    Ok(if successors(dp, s)?.is_empty() { StateClass::Deadlock } else { StateClass::Live })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ElementaryAction as EA;
    use crate::terms::ops::*;
    use alloc::vec;

    fn recv(c: u64, pat: Term) -> EA {
        EA::Recv { chan: chan(nat(c)), pattern: pat }
    }
    fn send(c: u64, m: Term) -> EA {
        EA::Send { chan: chan(nat(c)), msg: m }
    }

    /// Two processes, each waiting on the other's empty channel.
    fn mutual_wait() -> DistributedProcess {
        let mut a = SeqProcess::new("A", NodeId(0));
        a.privates.push(VarDecl::new("x", TypeTag::Nat));
        a.add_edge(0, 1, vec![recv(1, var("x"))]);
        a.add_edge(1, 2, vec![send(2, var("x"))]);
        let mut b = SeqProcess::new("B", NodeId(0));
        b.privates.push(VarDecl::new("x", TypeTag::Nat));
        b.add_edge(0, 1, vec![recv(2, var("x"))]);
        b.add_edge(1, 2, vec![send(1, var("x"))]);
        DistributedProcess::new(vec![a, b]).unwrap()
    }

    #[test]
    fn private_clash_is_renamed() {
        let dp = mutual_wait();
        assert_eq!(dp.var_names(), &["x".to_string(), "x_1".to_string()]);
        assert_eq!(dp.owner(1), VarOwner::Private(1));
        assert!(dp.process(1).edges[0].action.vars().contains("x_1"));
    }

    #[test]
    fn canonical_deadlock() {
        let dp = mutual_wait();
        let init = initial_states(&dp, &Valuation::new()).unwrap();
        assert_eq!(init.len(), 1);
        assert!(successors(&dp, &init[0]).unwrap().is_empty());
        assert_eq!(classify_state(&dp, &init[0]), Ok(StateClass::Deadlock));
        let mut done = init[0].clone();
        done.locs = vec![NodeId(2), NodeId(2)];
        assert_eq!(classify_state(&dp, &done), Ok(StateClass::Terminal));
    }

    #[test]
    fn recv_on_empty_is_disabled() {
        let dp = mutual_wait();
        let s = &initial_states(&dp, &Valuation::new()).unwrap()[0];
        assert_eq!(step_elementary(&dp, s, 0, &recv(1, var("x"))), Ok(None));
    }

    #[test]
    fn recv_matches_constants_and_binds() {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.privates.push(VarDecl::new("x", TypeTag::Nat));
        p.privates.push(VarDecl::new("y", TypeTag::Nat));
        p.add_edge(0, 1, vec![recv(0, tuple(vec![var("x"), nat(0), var("y")]))]);
        let dp = DistributedProcess::new(vec![p]).unwrap();
        let mut s = initial_states(&dp, &Valuation::new()).unwrap().remove(0);
        s.push(QueueId::Channel(0), Value::Tuple(vec![Value::Nat(4), Value::Nat(1), Value::Nat(5)]));
        // Middle component 1 ≠ 0: no match.
        assert_eq!(step_action(&dp, &s, 0, 0), Ok(None));
        let mut s2 = initial_states(&dp, &Valuation::new()).unwrap().remove(0);
        s2.push(QueueId::Channel(0), Value::Tuple(vec![Value::Nat(4), Value::Nat(0), Value::Nat(5)]));
        s2.push(QueueId::Channel(0), Value::Nat(9));
        let next = step_action(&dp, &s2, 0, 0).unwrap().unwrap().state;
        assert_eq!(next.vars, vec![Value::Nat(4), Value::Nat(5)]);
        assert_eq!(next.queue(QueueId::Channel(0)).len(), 1);
        assert_eq!(next.locs, vec![NodeId(1)]);
    }

    #[test]
    fn recv_writes_array_cell_indexed_by_pattern_variable() {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.privates.push(VarDecl::with_init("C", TypeTag::array_of(TypeTag::Nat), Term::app(crate::terms::Func::EmptyArray, vec![nat(3)])));
        p.privates.push(VarDecl::new("j", TypeTag::Nat));
        p.add_edge(0, 0, vec![recv(0, tuple(vec![index(var("C"), var("j")), var("j")]))]);
        let dp = DistributedProcess::new(vec![p]).unwrap();
        let mut s = initial_states(&dp, &Valuation::new()).unwrap().remove(0);
        s.push(QueueId::Channel(0), Value::Tuple(vec![Value::Nat(7), Value::Nat(2)]));
        let next = step_action(&dp, &s, 0, 0).unwrap().unwrap().state;
        let c = &next.vars[dp.slot("C").unwrap()];
        assert_eq!(c, &Value::Array(vec![None, Some(Value::Nat(7)), None]));
        assert_eq!(next.vars[dp.slot("j").unwrap()], Value::Nat(2));
    }

    #[test]
    fn guard_rule() {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.inputs.push(VarDecl::new("N", TypeTag::Nat));
        p.privates.push(VarDecl::new("k", TypeTag::Nat));
        let dp = DistributedProcess::new(vec![p]).unwrap();
        let mut s = initial_states(&dp, &Valuation::new().with("N", Value::Nat(1))).unwrap().remove(0);
        let g = EA::Guard(ge(var("k"), var("N")));
        assert_eq!(step_elementary(&dp, &s, 0, &g), Ok(None));
        s.vars[dp.slot("k").unwrap()] = Value::Nat(1);
        assert_eq!(step_elementary(&dp, &s, 0, &g), Ok(Some(s.clone())));
    }

    #[test]
    fn action_is_atomic() {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.privates.push(VarDecl::new("x", TypeTag::Nat));
        p.add_edge(0, 1, vec![
            EA::Guard(Term::bool(true)),
            recv(0, var("x")),
            EA::Assign { lhs: var("x"), rhs: nat(5), aux: false },
        ]);
        let dp = DistributedProcess::new(vec![p]).unwrap();
        let s = initial_states(&dp, &Valuation::new()).unwrap().remove(0);
        let before = s.clone();
        assert_eq!(step_action(&dp, &s, 0, 0), Ok(None));
        assert_eq!(s, before);
    }

    #[test]
    fn broadcast_reaches_every_other_process() {
        let mut root = SeqProcess::new("R", NodeId(0));
        root.add_edge(0, 1, vec![EA::Send { chan: konst(Value::Chan(ChannelId::Broadcast)), msg: nat(7) }]);
        let mut procs = vec![root];
        for k in 1..=2 {
            let mut w = SeqProcess::new(&format!("W{k}"), NodeId(0));
            w.privates.push(VarDecl::new("y", TypeTag::Nat));
            w.add_edge(0, 1, vec![EA::Recv { chan: konst(Value::Chan(ChannelId::Broadcast)), pattern: var("y") }]);
            procs.push(w);
        }
        let dp = DistributedProcess::new(procs).unwrap();
        let s0 = initial_states(&dp, &Valuation::new()).unwrap().remove(0);
        let succ = successors(&dp, &s0).unwrap();
        assert_eq!(succ.len(), 1);
        let s1 = &succ[0].state;
        assert_eq!(s1.queue(QueueId::Inbox(1)).len(), 1);
        assert_eq!(s1.queue(QueueId::Inbox(2)).len(), 1);
        assert_eq!(s1.queue(QueueId::Inbox(0)).len(), 0);
        // One receiver consuming does not steal the other's copy.
        let s2 = step_action(&dp, s1, 1, 0).unwrap().unwrap().state;
        assert_eq!(s2.queue(QueueId::Inbox(2)).len(), 1);
        assert_eq!(s2.vars[dp.slot("y").unwrap()], Value::Nat(7));
    }

    #[test]
    fn initial_condition_and_missing_input() {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.inputs.push(VarDecl::new("N", TypeTag::Nat));
        p.init_cond = ge(var("N"), nat(1));
        let dp = DistributedProcess::new(vec![p]).unwrap();
        assert!(initial_states(&dp, &Valuation::new().with("N", Value::Nat(0))).unwrap().is_empty());
        assert_eq!(initial_states(&dp, &Valuation::new().with("N", Value::Nat(2))).unwrap().len(), 1);
        assert_eq!(initial_states(&dp, &Valuation::new()), Err(SemanticsError::MissingInput("N".into())));
        assert!(matches!(
            initial_states(&dp, &Valuation::new().with("N", Value::Bool(true))),
            Err(SemanticsError::InputType { .. })
        ));
    }
}
