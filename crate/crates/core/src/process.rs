//! Sequential processes: action-labeled control graphs, plus reduction and
//! renaming.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::terms::{substitute, Binding, Func, NodeId, Term, TypeTag};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementaryAction {
    /// `c!e`
    Send { chan: Term, msg: Term },
    /// `c?e`
    Recv { chan: Term, pattern: Term },
    /// `e := e′`. Auxiliary assignments only write auxiliary variables and
    /// never influence control flow.
    Assign { lhs: Term, rhs: Term, aux: bool },
    /// `[[φ]]`
    Guard(Term),
}

impl ElementaryAction {
    pub fn is_message_passing(&self) -> bool {
        matches!(self, ElementaryAction::Send { .. } | ElementaryAction::Recv { .. })
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, ElementaryAction::Assign { aux: true, .. })
    }

    pub fn terms(&self) -> [&Term; 2] {
        match self {
            ElementaryAction::Send { chan, msg } => [chan, msg],
            ElementaryAction::Recv { chan, pattern } => [chan, pattern],
            ElementaryAction::Assign { lhs, rhs, .. } => [lhs, rhs],
            ElementaryAction::Guard(phi) => [phi, phi],
        }
    }

    fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Self {
        match self {
            ElementaryAction::Send { chan, msg } => ElementaryAction::Send { chan: f(chan), msg: f(msg) },
            ElementaryAction::Recv { chan, pattern } => {
                ElementaryAction::Recv { chan: f(chan), pattern: f(pattern) }
            }
            ElementaryAction::Assign { lhs, rhs, aux } => {
                ElementaryAction::Assign { lhs: f(lhs), rhs: f(rhs), aux: *aux }
            }
            ElementaryAction::Guard(phi) => ElementaryAction::Guard(f(phi)),
        }
    }
}

/// A finite sequence of elementary actions with at most one send or receive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Action(pub Vec<ElementaryAction>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Sending,
    Receiving,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("action contains {sends} sends and {recvs} receives; at most one message-passing action is allowed")]
pub struct MalformedAction {
    pub sends: usize,
    pub recvs: usize,
}

impl Action {
    pub fn new(eas: Vec<ElementaryAction>) -> Self {
        Action(eas)
    }

    pub fn classify(&self) -> Result<ActionKind, MalformedAction> {
        let sends = self.0.iter().filter(|ea| matches!(ea, ElementaryAction::Send { .. })).count();
        let recvs = self.0.iter().filter(|ea| matches!(ea, ElementaryAction::Recv { .. })).count();
        match (sends, recvs) {
            (0, 0) => Ok(ActionKind::Internal),
            (1, 0) => Ok(ActionKind::Sending),
            (0, 1) => Ok(ActionKind::Receiving),
            _ => Err(MalformedAction { sends, recvs }),
        }
    }

    pub fn is_internal(&self) -> bool {
        !self.0.iter().any(ElementaryAction::is_message_passing)
    }

    /// Concatenation `αα′`.
    pub fn concat(&self, other: &Action) -> Action {
        Action(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// The action with every auxiliary assignment removed.
    pub fn erase_aux(&self) -> Action {
        Action(self.0.iter().filter(|ea| !ea.is_aux()).cloned().collect())
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ea in &self.0 {
            for t in ea.terms() {
                out.extend(t.vars());
            }
        }
        out
    }
}

/// Free function form of [`Action::classify`].
pub fn classify(a: &Action) -> Result<ActionKind, MalformedAction> {
    a.classify()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub ty: TypeTag,
    /// Initial value, evaluated over the input variables. `None` means the
    /// type's default value.
    pub init: Option<Term>,
}

impl VarDecl {
    pub fn new(name: &str, ty: TypeTag) -> Self {
        VarDecl { name: name.to_string(), ty, init: None }
    }

    pub fn with_init(name: &str, ty: TypeTag, init: Term) -> Self {
        VarDecl { name: name.to_string(), ty, init: Some(init) }
    }
}

/// A sequential process `(P, X, φ)`. The control variable `at_P` is implicit:
/// it is the current node, and edge endpoints stand for the bracketing
/// `[[at_P = v]]` / `at_P := v′` actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqProcess {
    pub name: String,
    /// Sorted, without duplicates.
    pub nodes: Vec<NodeId>,
    pub initial: NodeId,
    /// Parallel edges are allowed; an edge is identified by its index.
    pub edges: Vec<Edge>,
    pub inputs: Vec<VarDecl>,
    pub privates: Vec<VarDecl>,
    /// Auxiliary variables this process writes or reads.
    pub aux: Vec<VarDecl>,
    pub init_cond: Term,
}

impl SeqProcess {
    pub fn new(name: &str, initial: NodeId) -> Self {
        SeqProcess {
            name: name.to_string(),
            nodes: alloc::vec![initial],
            initial,
            edges: Vec::new(),
            inputs: Vec::new(),
            privates: Vec::new(),
            aux: Vec::new(),
            init_cond: Term::bool(true),
        }
    }

    pub fn add_node(&mut self, v: NodeId) {
        if let Err(pos) = self.nodes.binary_search(&v) {
            self.nodes.insert(pos, v);
        }
    }

    /// Adds an edge, registering both endpoints as nodes. Returns its index.
    pub fn add_edge(&mut self, from: u32, to: u32, eas: Vec<ElementaryAction>) -> usize {
        self.add_node(NodeId(from));
        self.add_node(NodeId(to));
        self.edges.push(Edge { from: NodeId(from), to: NodeId(to), action: Action(eas) });
        self.edges.len() - 1
    }

    pub fn edges_from(&self, v: NodeId) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == v)
    }

    pub fn is_sink(&self, v: NodeId) -> bool {
        self.edges_from(v).next().is_none()
    }

    pub fn is_private(&self, name: &str) -> bool {
        self.privates.iter().any(|d| d.name == name)
    }

    pub fn is_aux(&self, name: &str) -> bool {
        self.aux.iter().any(|d| d.name == name)
    }

    /// Declared type of every variable visible to this process.
    pub fn var_types(&self) -> BTreeMap<String, TypeTag> {
        self.inputs
            .iter()
            .chain(&self.privates)
            .chain(&self.aux)
            .map(|d| (d.name.clone(), d.ty.clone()))
            .collect()
    }

    pub fn erase_aux(&self) -> SeqProcess {
        let mut p = self.clone();
        for e in &mut p.edges {
            e.action = e.action.erase_aux();
        }
        p.aux.clear();
        p
    }

    /// Every problem with this process, one diagnostic per violation.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    InitCond,
    Initializer(String),
    Edge(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::InitCond => f.write_str("initial condition"),
            Location::Initializer(x) => write!(f, "initializer of `{x}`"),
            Location::Edge(k) => write!(f, "edge #{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("initial node {0} is not a node of the graph")]
    MissingInitialNode(NodeId),
    #[error("edge #{edge} ends at undeclared node {node}")]
    UnknownNode { edge: usize, node: NodeId },
    #[error("variable `{0}` is both an input and a private variable")]
    InputPrivateOverlap(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("unknown variable `{name}` in {at}")]
    UnknownVariable { name: String, at: Location },
    #[error("type error in {at}: {detail}")]
    TypeError { at: Location, detail: String },
    #[error("edge #{0} has more than one send or receive")]
    TooManyMessagePassingEAs(usize),
    #[error("node {0} is unreachable from the initial node")]
    UnreachableNode(NodeId),
    #[error("edge #{edge} assigns to `{name}`, which is not a private or auxiliary variable")]
    AssignToNonPrivate { edge: usize, name: String },
    #[error("edge #{edge}: auxiliary assignment writes non-auxiliary `{name}`")]
    AuxWritesNonAux { edge: usize, name: String },
    #[error("edge #{edge}: auxiliary variable `{name}` is read by a non-auxiliary action")]
    AuxReadByProgram { edge: usize, name: String },
    #[error("edge #{edge}: unsupported receive pattern: {detail}")]
    UnsupportedPattern { edge: usize, detail: String },
    #[error("{at} reads channel contents or control locations")]
    StateAccessInProcess { at: Location },
}

fn check_term(
    t: &Term,
    types: &BTreeMap<String, TypeTag>,
    at: Location,
    expect: Option<&TypeTag>,
    out: &mut Vec<Diagnostic>,
) {
    let mut unknown = false;
    for x in t.vars() {
        if !types.contains_key(&x) {
            out.push(Diagnostic::UnknownVariable { name: x, at: at.clone() });
            unknown = true;
        }
    }
    if t.reads_state() {
        out.push(Diagnostic::StateAccessInProcess { at: at.clone() });
    }
    if unknown {
        return;
    }
    match t.type_of(types) {
        Err(detail) => out.push(Diagnostic::TypeError { at, detail }),
        Ok(ty) => {
            if let Some(want) = expect {
                if !ty.compatible(want) {
                    out.push(Diagnostic::TypeError { at, detail: format!("expected {want}, found {ty}") });
                }
            }
        }
    }
}

/// Checks that a receive pattern has the restricted shape matching needs:
/// tuple trees whose leaves are variables, constants, or array cells, with
/// each private variable bound at most once.
fn check_pattern(p: &SeqProcess, t: &Term, edge: usize, seen: &mut BTreeSet<String>, out: &mut Vec<Diagnostic>) {
    match t {
        Term::App(Func::Tuple(_), args) => {
            for a in args {
                check_pattern(p, a, edge, seen, out);
            }
        }
        Term::Var(x) => {
            if p.is_private(x) && !seen.insert(x.clone()) {
                out.push(Diagnostic::UnsupportedPattern {
                    edge,
                    detail: format!("private variable `{x}` is bound twice"),
                });
            }
        }
        Term::Const(_) => {}
        Term::Index(base, _) => match &**base {
            Term::Var(x) if p.is_private(x) => {}
            _ => out.push(Diagnostic::UnsupportedPattern {
                edge,
                detail: "array cells in patterns must belong to a private array".to_string(),
            }),
        },
        Term::App(..) => {
            if t.vars().iter().any(|x| p.is_private(x)) {
                out.push(Diagnostic::UnsupportedPattern {
                    edge,
                    detail: "function applications in patterns may not mention private variables".to_string(),
                });
            }
        }
    }
}

fn assign_target(lhs: &Term) -> Option<&str> {
    match lhs {
        Term::Var(x) => Some(x),
        Term::Index(b, _) => match &**b {
            Term::Var(x) => Some(x),
            _ => None,
        },
        _ => None,
    }
}

pub fn validate(p: &SeqProcess) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let nodes: BTreeSet<NodeId> = p.nodes.iter().copied().collect();
    if !nodes.contains(&p.initial) {
        out.push(Diagnostic::MissingInitialNode(p.initial));
    }
    let mut declared = BTreeSet::new();
    for d in p.inputs.iter().chain(&p.privates).chain(&p.aux) {
        if !declared.insert(d.name.clone()) {
            if p.inputs.iter().any(|i| i.name == d.name) && p.is_private(&d.name) {
                out.push(Diagnostic::InputPrivateOverlap(d.name.clone()));
            } else {
                out.push(Diagnostic::DuplicateVariable(d.name.clone()));
            }
        }
    }
    let types = p.var_types();
    let input_types: BTreeMap<String, TypeTag> =
        p.inputs.iter().map(|d| (d.name.clone(), d.ty.clone())).collect();
    check_term(&p.init_cond, &types, Location::InitCond, Some(&TypeTag::Bool), &mut out);
    for d in p.privates.iter().chain(&p.aux) {
        if let Some(init) = &d.init {
            check_term(init, &input_types, Location::Initializer(d.name.clone()), Some(&d.ty), &mut out);
        }
    }

    for (k, e) in p.edges.iter().enumerate() {
        for v in [e.from, e.to] {
            if !nodes.contains(&v) {
                out.push(Diagnostic::UnknownNode { edge: k, node: v });
            }
        }
        if e.action.classify().is_err() {
            out.push(Diagnostic::TooManyMessagePassingEAs(k));
        }
        let at = Location::Edge(k);
        for ea in &e.action.0 {
            match ea {
                ElementaryAction::Guard(phi) => check_term(phi, &types, at.clone(), Some(&TypeTag::Bool), &mut out),
                ElementaryAction::Send { chan, msg } => {
                    check_term(chan, &types, at.clone(), Some(&TypeTag::Chan), &mut out);
                    check_term(msg, &types, at.clone(), None, &mut out);
                }
                ElementaryAction::Recv { chan, pattern } => {
                    check_term(chan, &types, at.clone(), Some(&TypeTag::Chan), &mut out);
                    check_term(pattern, &types, at.clone(), None, &mut out);
                    check_pattern(p, pattern, k, &mut BTreeSet::new(), &mut out);
                }
                ElementaryAction::Assign { lhs, rhs, aux } => {
                    match assign_target(lhs) {
                        Some(x) if *aux && !p.is_aux(x) => {
                            out.push(Diagnostic::AuxWritesNonAux { edge: k, name: x.to_string() })
                        }
                        Some(x) if !*aux && !p.is_private(x) && types.contains_key(x) => {
                            out.push(Diagnostic::AssignToNonPrivate { edge: k, name: x.to_string() })
                        }
                        None => out.push(Diagnostic::TypeError {
                            at: at.clone(),
                            detail: "assignment target must be a variable or an array cell".to_string(),
                        }),
                        _ => {}
                    }
                    check_term(lhs, &types, at.clone(), None, &mut out);
                    if let (Ok(lt), Ok(rt)) = (lhs.type_of(&types), rhs.type_of(&types)) {
                        if !lt.compatible(&rt) {
                            out.push(Diagnostic::TypeError {
                                at: at.clone(),
                                detail: format!("cannot assign {rt} to {lt}"),
                            });
                        }
                    }
                    check_term(rhs, &types, at.clone(), None, &mut out);
                }
            }
            if !ea.is_aux() {
                for t in ea.terms() {
                    for x in t.vars() {
                        if p.is_aux(&x) {
                            out.push(Diagnostic::AuxReadByProgram { edge: k, name: x });
                        }
                    }
                }
            }
        }
    }

    let mut reached = BTreeSet::from([p.initial]);
    let mut stack = alloc::vec![p.initial];
    while let Some(v) = stack.pop() {
        for (_, e) in p.edges_from(v) {
            if reached.insert(e.to) {
                stack.push(e.to);
            }
        }
    }
    for v in &p.nodes {
        if !reached.contains(v) {
            out.push(Diagnostic::UnreachableNode(*v));
        }
    }
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("node {0} is the initial node")]
    InitialNode(NodeId),
    #[error("node {0} is not in the graph")]
    NoSuchNode(NodeId),
    #[error("node {0} has a self-loop")]
    SelfLoop(NodeId),
    #[error("neither all incoming nor all outgoing actions of node {0} are internal")]
    NotInternal(NodeId),
    #[error("merging edge #{incoming} with edge #{outgoing} would give an action with two message-passing steps")]
    TooManyMessagePassing { incoming: usize, outgoing: usize },
}

/// Removes `v`, replacing every pair of an incoming edge `v_i -α-> v` and an
/// outgoing edge `v -α′-> v′` by `v_i -αα′-> v′`. New edges are appended in
/// incoming-major order.
pub fn reduce(p: &SeqProcess, v: NodeId) -> Result<SeqProcess, ReductionError> {
    if v == p.initial {
        return Err(ReductionError::InitialNode(v));
    }
    if !p.nodes.contains(&v) {
        return Err(ReductionError::NoSuchNode(v));
    }
    let incoming: Vec<usize> = (0..p.edges.len()).filter(|&k| p.edges[k].to == v).collect();
    let outgoing: Vec<usize> = (0..p.edges.len()).filter(|&k| p.edges[k].from == v).collect();
    if incoming.iter().any(|&k| p.edges[k].from == v) {
        return Err(ReductionError::SelfLoop(v));
    }
    let all_internal = |ks: &[usize]| ks.iter().all(|&k| p.edges[k].action.is_internal());
    if !all_internal(&incoming) && !all_internal(&outgoing) {
        return Err(ReductionError::NotInternal(v));
    }
    let mut merged = Vec::new();
    for &i in &incoming {
        for &o in &outgoing {
            let action = p.edges[i].action.concat(&p.edges[o].action);
            if action.classify().is_err() {
                return Err(ReductionError::TooManyMessagePassing { incoming: i, outgoing: o });
            }
            merged.push(Edge { from: p.edges[i].from, to: p.edges[o].to, action });
        }
    }
    let mut out = p.clone();
    out.nodes.retain(|&n| n != v);
    out.edges = p.edges.iter().filter(|e| e.from != v && e.to != v).cloned().collect();
    out.edges.extend(merged);
    Ok(out)
}

/// An injective renaming of private variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming(pub BTreeMap<String, String>);

impl Renaming {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, from: &str, to: &str) -> Self {
        self.0.insert(from.to_string(), to.to_string());
        self
    }

    pub fn inverse(&self) -> Renaming {
        Renaming(self.0.iter().map(|(a, b)| (b.clone(), a.clone())).collect())
    }

    pub fn apply<'a>(&'a self, name: &'a str) -> &'a str {
        self.0.get(name).map_or(name, String::as_str)
    }

    fn binding(&self) -> Binding {
        let mut b = Binding::identity();
        for (from, to) in &self.0 {
            b.insert(from, Term::var(to));
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("`{0}` is not a private variable")]
    NotPrivate(String),
    #[error("renaming is not injective: two variables map to `{0}`")]
    NotInjective(String),
    #[error("`{0}` collides with an existing variable")]
    Clash(String),
}

/// `P^η`: renames private variables everywhere they occur.
pub fn rename(p: &SeqProcess, eta: &Renaming) -> Result<SeqProcess, RenameError> {
    let mut images = BTreeSet::new();
    for (from, to) in &eta.0 {
        if !p.is_private(from) {
            return Err(RenameError::NotPrivate(from.clone()));
        }
        if !images.insert(to.clone()) {
            return Err(RenameError::NotInjective(to.clone()));
        }
    }
    for to in &images {
        let kept_private = p.is_private(to) && !eta.0.contains_key(to);
        let other = p.inputs.iter().chain(&p.aux).any(|d| &d.name == to);
        if kept_private || other {
            return Err(RenameError::Clash(to.clone()));
        }
    }
    let theta = eta.binding();
    let sub = |t: &Term| substitute(t, &theta);
    let mut out = p.clone();
    for d in &mut out.privates {
        d.name = eta.apply(&d.name).to_string();
        d.init = d.init.as_ref().map(sub);
    }
    out.init_cond = sub(&p.init_cond);
    for e in &mut out.edges {
        e.action = Action(e.action.0.iter().map(|ea| ea.map_terms(&sub)).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::ops::*;
    use crate::terms::Value;
    use alloc::vec;

    fn guard(t: Term) -> ElementaryAction {
        ElementaryAction::Guard(t)
    }
    fn assign(x: &str, t: Term) -> ElementaryAction {
        ElementaryAction::Assign { lhs: var(x), rhs: t, aux: false }
    }
    fn send(c: u64, m: Term) -> ElementaryAction {
        ElementaryAction::Send { chan: chan(nat(c)), msg: m }
    }
    fn recv(c: u64, x: &str) -> ElementaryAction {
        ElementaryAction::Recv { chan: chan(nat(c)), pattern: var(x) }
    }

    fn simple() -> SeqProcess {
        let mut p = SeqProcess::new("P", NodeId(0));
        p.privates.push(VarDecl::new("x", TypeTag::Nat));
        p
    }

    #[test]
    fn classify_manager_send() {
        let a = Action(vec![
            guard(le(var("i"), min(var("n"), var("N")))),
            ElementaryAction::Send {
                chan: chan(var("i")),
                msg: tuple(vec![index(var("A"), var("i")), nat(0), var("i")]),
            },
            assign("i", add(var("i"), nat(1))),
        ]);
        assert_eq!(classify(&a), Ok(ActionKind::Sending));
        assert_eq!(classify(&Action(vec![guard(ge(var("k"), var("N")))])), Ok(ActionKind::Internal));
        assert_eq!(classify(&Action::default()), Ok(ActionKind::Internal));
        assert_eq!(classify(&Action(vec![recv(0, "x")])), Ok(ActionKind::Receiving));
        assert_eq!(
            classify(&Action(vec![send(1, nat(0)), recv(0, "x")])),
            Err(MalformedAction { sends: 1, recvs: 1 })
        );
    }

    #[test]
    fn reduce_chain() {
        let mut p = simple();
        p.add_edge(0, 1, vec![guard(Term::bool(true))]);
        p.add_edge(1, 2, vec![assign("x", nat(1))]);
        let r = reduce(&p, NodeId(1)).unwrap();
        assert_eq!(r.nodes, vec![NodeId(0), NodeId(2)]);
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].from, NodeId(0));
        assert_eq!(r.edges[0].to, NodeId(2));
        assert_eq!(r.edges[0].action.0, vec![guard(Term::bool(true)), assign("x", nat(1))]);
    }

    #[test]
    fn reduce_fan_is_cartesian() {
        let mut p = simple();
        p.add_edge(0, 1, vec![assign("x", nat(1))]);
        p.add_edge(0, 1, vec![assign("x", nat(2))]);
        for t in 2..5 {
            p.add_edge(1, t, vec![send(t as u64, var("x"))]);
        }
        let r = reduce(&p, NodeId(1)).unwrap();
        assert_eq!(r.edges.len(), 6);
        assert!(r.edges.iter().all(|e| e.from == NodeId(0)));
        assert_eq!(r.edges[0].action.0, vec![assign("x", nat(1)), send(2, var("x"))]);
        assert_eq!(r.edges[5].action.0, vec![assign("x", nat(2)), send(4, var("x"))]);
    }

    #[test]
    fn reduce_rejects_two_message_passing_steps() {
        let mut p = simple();
        p.add_edge(0, 1, vec![send(1, nat(0))]);
        p.add_edge(1, 2, vec![recv(0, "x")]);
        assert_eq!(reduce(&p, NodeId(1)), Err(ReductionError::NotInternal(NodeId(1))));
        let mut q = simple();
        q.add_edge(0, 1, vec![guard(Term::bool(true))]);
        q.add_edge(1, 2, vec![recv(0, "x"), send(2, nat(0))]);
        assert_eq!(
            reduce(&q, NodeId(1)),
            Err(ReductionError::TooManyMessagePassing { incoming: 0, outgoing: 1 })
        );
    }

    #[test]
    fn reduce_preconditions() {
        let mut p = simple();
        p.add_edge(0, 1, vec![]);
        p.add_edge(1, 1, vec![]);
        assert_eq!(reduce(&p, NodeId(0)), Err(ReductionError::InitialNode(NodeId(0))));
        assert_eq!(reduce(&p, NodeId(1)), Err(ReductionError::SelfLoop(NodeId(1))));
        assert_eq!(reduce(&p, NodeId(9)), Err(ReductionError::NoSuchNode(NodeId(9))));
    }

    #[test]
    fn reduce_mixed_message_passing() {
        // Out-edges internal, in-edge a send: allowed, the merged action keeps one send.
        let mut p = simple();
        p.add_edge(0, 1, vec![send(1, nat(0))]);
        p.add_edge(1, 2, vec![assign("x", nat(3))]);
        let r = reduce(&p, NodeId(1)).unwrap();
        assert_eq!(r.edges[0].action.classify(), Ok(ActionKind::Sending));
    }

    #[test]
    fn rename_identity_and_inverse() {
        let mut p = simple();
        p.privates.push(VarDecl::with_init("y", TypeTag::Nat, nat(2)));
        p.add_edge(0, 1, vec![recv(0, "x"), assign("y", add(var("x"), var("y")))]);
        assert_eq!(rename(&p, &Renaming::new()).unwrap(), p);
        let eta = Renaming::new().with("x", "x2").with("y", "y2");
        let q = rename(&p, &eta).unwrap();
        assert!(q.edges[0].action.vars().contains("x2"));
        assert!(!q.edges[0].action.vars().contains("x"));
        assert_eq!(rename(&q, &eta.inverse()).unwrap(), p);
    }

    #[test]
    fn rename_errors() {
        let mut p = simple();
        p.privates.push(VarDecl::new("y", TypeTag::Nat));
        p.inputs.push(VarDecl::new("N", TypeTag::Nat));
        assert_eq!(rename(&p, &Renaming::new().with("N", "M")), Err(RenameError::NotPrivate("N".into())));
        assert_eq!(rename(&p, &Renaming::new().with("x", "y")), Err(RenameError::Clash("y".into())));
        assert_eq!(rename(&p, &Renaming::new().with("x", "N")), Err(RenameError::Clash("N".into())));
        assert_eq!(
            rename(&p, &Renaming::new().with("x", "z").with("y", "z")),
            Err(RenameError::NotInjective("z".into()))
        );
        // Swapping two privates is a valid injective renaming.
        assert!(rename(&p, &Renaming::new().with("x", "y").with("y", "x")).is_ok());
    }

    #[test]
    fn validate_reports_problems() {
        let mut p = simple();
        p.add_edge(0, 1, vec![assign("x", var("z"))]);
        assert_eq!(
            validate(&p),
            vec![Diagnostic::UnknownVariable { name: "z".into(), at: Location::Edge(0) }]
        );

        let mut q = simple();
        q.add_edge(0, 1, vec![send(1, nat(0)), send(2, nat(0))]);
        assert_eq!(validate(&q), vec![Diagnostic::TooManyMessagePassingEAs(0)]);

        let mut r = simple();
        r.add_edge(0, 1, vec![]);
        r.add_node(NodeId(5));
        r.edges.push(Edge { from: NodeId(1), to: NodeId(7), action: Action::default() });
        let d = validate(&r);
        assert!(d.contains(&Diagnostic::UnknownNode { edge: 1, node: NodeId(7) }));
        assert!(d.contains(&Diagnostic::UnreachableNode(NodeId(5))));
    }

    #[test]
    fn validate_typing_and_aux() {
        let mut p = simple();
        p.aux.push(VarDecl::new("alpha", TypeTag::set_of(TypeTag::Nat)));
        p.inputs.push(VarDecl::new("N", TypeTag::Nat));
        p.add_edge(0, 0, vec![
            guard(add(var("x"), nat(1))),
            ElementaryAction::Assign { lhs: var("x"), rhs: var("alpha"), aux: true },
            assign("N", nat(3)),
        ]);
        let d = validate(&p);
        assert!(d.iter().any(|x| matches!(x, Diagnostic::TypeError { .. })));
        assert!(d.contains(&Diagnostic::AuxWritesNonAux { edge: 0, name: "x".into() }));
        assert!(d.contains(&Diagnostic::AssignToNonPrivate { edge: 0, name: "N".into() }));
    }

    #[test]
    fn validate_patterns() {
        let mut p = simple();
        p.add_edge(0, 0, vec![ElementaryAction::Recv {
            chan: chan(nat(0)),
            pattern: tuple(vec![var("x"), var("x")]),
        }]);
        assert!(matches!(validate(&p)[..], [Diagnostic::UnsupportedPattern { edge: 0, .. }]));
        let mut q = simple();
        q.add_edge(0, 0, vec![ElementaryAction::Recv {
            chan: chan(nat(0)),
            pattern: tuple(vec![add(var("x"), nat(1)), konst(Value::Nat(0))]),
        }]);
        assert!(matches!(validate(&q)[..], [Diagnostic::UnsupportedPattern { edge: 0, .. }]));
    }
}
