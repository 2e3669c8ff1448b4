use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::emit::term_to_string;
use super::lexer::Pos;
use super::parser::parse;
use super::{Diagnostic, DiagnosticKind};
use crate::explorer::{InvariantSpec, Predicate};
use crate::process::{Diagnostic as ProcDiag, ElementaryAction, Location, SeqProcess, VarDecl};
use crate::semantics::{DistributedProcess, SemanticsError};
use crate::terms::{ChannelId, Func, NodeId, Term, TypeTag, Valuation, Value};

/// Command-line overrides applied while elaborating a document.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub params: BTreeMap<String, u64>,
    /// Replacement values for `input` declarations.
    pub inputs: BTreeMap<String, Expr>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: Option<String>,
    pub dp: DistributedProcess,
    /// Values of every input that has one, after overrides.
    pub inputs: Valuation,
    pub invariants: Vec<InvariantSpec>,
    pub params: BTreeMap<String, u64>,
}

impl Model {
    /// Inputs the model declares but gives no value.
    pub fn missing_inputs(&self) -> Vec<String> {
        self.dp
            .inputs()
            .iter()
            .filter(|d| self.inputs.get(&d.name).is_none())
            .map(|d| d.name.clone())
            .collect()
    }
}

/// Parses and elaborates in one go.
pub fn load(text: &str, opts: &Options) -> Result<Model, Vec<Diagnostic>> {
    elaborate(&parse(text)?, opts)
}

const NOWHERE: Pos = Pos { line: 0, col: 0 };

fn diag(pos: Pos, kind: DiagnosticKind) -> Diagnostic {
    Diagnostic { pos, kind }
}

fn invalid(pos: Pos, msg: impl Into<String>) -> Diagnostic {
    diag(pos, DiagnosticKind::Invalid(msg.into()))
}

/// Final private-variable names of each process, keyed by declared name.
type Members = BTreeMap<String, BTreeMap<String, String>>;

/// Name resolution context for one expression.
struct Scope<'a> {
    params: &'a BTreeMap<String, u64>,
    family: Option<(&'a str, u64)>,
    renames: BTreeMap<String, String>,
    vars: BTreeSet<String>,
    /// Present only where process state may be read, that is in invariants.
    members: Option<&'a Members>,
}

impl<'a> Scope<'a> {
    fn constants(params: &'a BTreeMap<String, u64>) -> Self {
        Scope { params, family: None, renames: BTreeMap::new(), vars: BTreeSet::new(), members: None }
    }

    fn resolve(&self, x: &str) -> Option<Term> {
        if let Some((w, k)) = self.family {
            if w == x {
                return Some(Term::nat(k));
            }
        }
        if let Some(y) = self.renames.get(x) {
            return Some(Term::var(y));
        }
        if self.vars.contains(x) {
            return Some(Term::var(x));
        }
        self.params.get(x).map(|&k| Term::nat(k))
    }
}

fn call_func(name: &str) -> Option<Func> {
    Some(match name {
        "min" => Func::Min,
        "max" => Func::Max,
        "range" => Func::Range,
        "member" => Func::Member,
        "subset" => Func::Subset,
        "size" => Func::Size,
        "prod" => Func::Prod,
        "rows" => Func::RowsA,
        "empty_array" => Func::EmptyArray,
        "len" => Func::QueueLen,
        "proj" => Func::QueueProj,
        _ => return None,
    })
}

fn term(e: &Expr, sc: &Scope<'_>) -> Result<Term, Diagnostic> {
    let unknown = |what, name: &str| diag(e.pos, DiagnosticKind::Unknown { what, name: name.to_string() });
    Ok(match &e.kind {
        ExprKind::Nat(k) => Term::nat(*k),
        ExprKind::Bool(b) => Term::bool(*b),
        ExprKind::Star => Term::Const(Value::Star),
        ExprKind::EmptySet => Term::Const(Value::Set(BTreeSet::new())),
        ExprKind::Bcast => Term::Const(Value::Chan(ChannelId::Broadcast)),
        ExprKind::Matrix(m) => Term::Const(Value::MatrixAtom(m.clone())),
        ExprKind::QRow(r) => Term::Const(Value::QRow(r.clone())),
        ExprKind::QMatrix(m) => Term::Const(Value::QMatrix(m.clone())),
        ExprKind::Name(x) => sc.resolve(x).ok_or_else(|| unknown("name", x))?,
        ExprKind::Member { process, index, var } => {
            let Some(members) = sc.members else {
                return Err(invalid(e.pos, "other processes' variables can only be read in invariants"));
            };
            let pname = instance_name(process, index.as_deref(), sc)?;
            let m = members.get(&pname).ok_or_else(|| unknown("process", &pname))?;
            Term::var(m.get(var).ok_or_else(|| unknown("variable", &format!("{pname}.{var}")))?)
        }
        ExprKind::At { process, index } => {
            let Some(members) = sc.members else {
                return Err(invalid(e.pos, "control locations can only be read in invariants"));
            };
            let pname = instance_name(process, index.as_deref(), sc)?;
            if !members.contains_key(&pname) {
                return Err(unknown("process", &pname));
            }
            Term::app(Func::At(pname), Vec::new())
        }
        ExprKind::Chan(k) => Term::app(Func::Channel, vec![term(k, sc)?]),
        ExprKind::Row { source, index } => Term::app(Func::Row(*source), vec![term(index, sc)?]),
        ExprKind::Call { name, args } if name == "node" => {
            if args.len() != 1 {
                return Err(invalid(e.pos, "`node` expects 1 argument"));
            }
            let k = const_nat(&args[0], sc)?;
            let k = u32::try_from(k).map_err(|_| invalid(e.pos, "node number is too large"))?;
            Term::Const(Value::Node(NodeId(k)))
        }
        ExprKind::Call { name, args } => {
            let f = call_func(name).ok_or_else(|| unknown("function", name))?;
            if args.len() != f.arity() {
                return Err(invalid(e.pos, format!("`{name}` expects {} arguments, got {}", f.arity(), args.len())));
            }
            Term::app(f, args.iter().map(|a| term(a, sc)).collect::<Result<_, _>>()?)
        }
        ExprKind::Not(a) => Term::app(Func::Not, vec![term(a, sc)?]),
        ExprKind::Binary(f, a, b) => Term::app(f.clone(), vec![term(a, sc)?, term(b, sc)?]),
        ExprKind::Tuple(items) => {
            Term::app(Func::Tuple(items.len()), items.iter().map(|a| term(a, sc)).collect::<Result<_, _>>()?)
        }
        ExprKind::Set(items) => {
            Term::app(Func::SetOf(items.len()), items.iter().map(|a| term(a, sc)).collect::<Result<_, _>>()?)
        }
        ExprKind::Array(cells) => {
            let mut out = Vec::with_capacity(cells.len());
            for c in cells {
                out.push(match c {
                    None => None,
                    Some(c) => Some(constant(c, sc)?),
                });
            }
            Term::Const(Value::Array(out))
        }
        ExprKind::Index(b, i) => Term::index(term(b, sc)?, term(i, sc)?),
    })
}

/// Evaluates an expression that may mention only parameters and the family index.
fn constant(e: &Expr, sc: &Scope<'_>) -> Result<Value, Diagnostic> {
    let t = term(e, sc)?;
    if !t.is_ground() || t.reads_state() {
        return Err(invalid(e.pos, "expected a constant expression"));
    }
    t.eval(&Valuation::new()).map_err(|err| invalid(e.pos, err.to_string()))
}

fn const_nat(e: &Expr, sc: &Scope<'_>) -> Result<u64, Diagnostic> {
    match constant(e, sc)? {
        Value::Nat(k) => Ok(k),
        other => Err(diag(e.pos, DiagnosticKind::Type(format!("expected a nat, found {other}")))),
    }
}

fn instance_name(process: &str, index: Option<&Expr>, sc: &Scope<'_>) -> Result<String, Diagnostic> {
    Ok(match index {
        None => process.to_string(),
        Some(i) => format!("{process}{}", const_nat(i, sc)?),
    })
}

/// Values the family index ranges over; empty when there is no family.
fn family_range(f: &Family, params: &BTreeMap<String, u64>) -> Result<core::ops::RangeInclusive<u64>, Diagnostic> {
    let sc = Scope::constants(params);
    Ok(const_nat(&f.lo, &sc)?..=const_nat(&f.hi, &sc)?)
}

struct Elab<'o> {
    opts: &'o Options,
    diags: Vec<Diagnostic>,
    params: BTreeMap<String, u64>,
    inputs: BTreeMap<String, VarDecl>,
    values: Valuation,
    aux: BTreeMap<String, VarDecl>,
}

/// Where each part of a built process came from, for mapping validation
/// diagnostics back to the source.
struct Origin {
    process: Pos,
    init: Option<Pos>,
    vars: BTreeMap<String, Pos>,
    edges: Vec<Pos>,
}

impl Origin {
    fn locate(&self, d: &ProcDiag) -> Pos {
        let at = |loc: &Location| match loc {
            Location::InitCond => self.init.unwrap_or(self.process),
            Location::Initializer(x) => self.vars.get(x).copied().unwrap_or(self.process),
            Location::Edge(k) => self.edges.get(*k).copied().unwrap_or(self.process),
        };
        match d {
            ProcDiag::UnknownVariable { at: loc, .. }
            | ProcDiag::TypeError { at: loc, .. }
            | ProcDiag::StateAccessInProcess { at: loc } => at(loc),
            ProcDiag::UnknownNode { edge, .. }
            | ProcDiag::AssignToNonPrivate { edge, .. }
            | ProcDiag::AuxWritesNonAux { edge, .. }
            | ProcDiag::AuxReadByProgram { edge, .. }
            | ProcDiag::UnsupportedPattern { edge, .. }
            | ProcDiag::TooManyMessagePassingEAs(edge) => at(&Location::Edge(*edge)),
            ProcDiag::DuplicateVariable(x) | ProcDiag::InputPrivateOverlap(x) => {
                self.vars.get(x).copied().unwrap_or(self.process)
            }
            _ => self.process,
        }
    }
}

impl Elab<'_> {
    fn params(&mut self, doc: &Document) {
        let mut declared = BTreeSet::new();
        for item in &doc.items {
            let Item::Param(p) = item else { continue };
            if !declared.insert(p.name.clone()) {
                self.diags.push(diag(p.pos, DiagnosticKind::Duplicate(p.name.clone())));
                continue;
            }
            let value = match self.opts.params.get(&p.name) {
                Some(&k) => k,
                None => match const_nat(&p.default, &Scope::constants(&self.params)) {
                    Ok(k) => k,
                    Err(d) => {
                        self.diags.push(d);
                        continue;
                    }
                },
            };
            self.params.insert(p.name.clone(), value);
            if let Some(c) = &p.constraint {
                match constant(c, &Scope::constants(&self.params)) {
                    Ok(Value::Bool(true)) => {}
                    Ok(Value::Bool(false)) => self.diags.push(invalid(
                        c.pos,
                        format!("parameter `{}` = {value} violates its constraint", p.name),
                    )),
                    Ok(other) => self.diags.push(diag(c.pos, DiagnosticKind::Type(format!("constraint is {other}, not a bool")))),
                    Err(d) => self.diags.push(d),
                }
            }
        }
        for name in self.opts.params.keys() {
            if !declared.contains(name) {
                self.diags.push(diag(NOWHERE, DiagnosticKind::Unknown { what: "parameter", name: name.clone() }));
            }
        }
    }

    fn globals(&mut self, doc: &Document) {
        for item in &doc.items {
            let Item::Input(g) = item else { continue };
            if self.inputs.contains_key(&g.name) {
                self.diags.push(diag(g.pos, DiagnosticKind::Duplicate(g.name.clone())));
                continue;
            }
            self.inputs.insert(g.name.clone(), VarDecl::new(&g.name, g.ty.clone()));
            let Some(e) = self.opts.inputs.get(&g.name).or(g.value.as_ref()) else { continue };
            let mut sc = Scope::constants(&self.params);
            sc.vars = self.values.0.keys().cloned().collect();
            let value = term(e, &sc).and_then(|t| t.eval(&self.values).map_err(|err| invalid(e.pos, err.to_string())));
            match value {
                Ok(v) if v.conforms(&g.ty) => self.values.insert(&g.name, v),
                Ok(v) => self.diags.push(diag(
                    e.pos,
                    DiagnosticKind::Type(format!("input `{}` = {v} does not have type {}", g.name, g.ty)),
                )),
                Err(d) => self.diags.push(d),
            }
        }
        for name in self.opts.inputs.keys() {
            if !self.inputs.contains_key(name) {
                self.diags.push(diag(NOWHERE, DiagnosticKind::Unknown { what: "input", name: name.clone() }));
            }
        }
        for item in &doc.items {
            let Item::Aux(g) = item else { continue };
            if self.aux.contains_key(&g.name) || self.inputs.contains_key(&g.name) {
                self.diags.push(diag(g.pos, DiagnosticKind::Duplicate(g.name.clone())));
                continue;
            }
            let mut decl = VarDecl::new(&g.name, g.ty.clone());
            if let Some(e) = &g.value {
                let mut sc = Scope::constants(&self.params);
                sc.vars = self.inputs.keys().cloned().collect();
                match term(e, &sc) {
                    Ok(t) => decl.init = Some(t),
                    Err(d) => self.diags.push(d),
                }
            }
            self.aux.insert(g.name.clone(), decl);
        }
    }

    /// Builds one member of a process declaration. Returns the process, its
    /// private variables as written in the source, and source positions.
    fn process(&mut self, decl: &ProcessDecl, w: Option<u64>) -> Option<(SeqProcess, Vec<String>, Origin)> {
        let before = self.diags.len();
        let name = match w {
            Some(k) => format!("{}{k}", decl.name),
            None => decl.name.clone(),
        };
        let mut origin = Origin { process: decl.pos, init: None, vars: BTreeMap::new(), edges: Vec::new() };
        let mut inputs = Vec::new();
        let mut aux = Vec::new();
        let mut declared = Vec::new();
        let mut renames = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut start = None;
        let mut nodes = Vec::new();
        for stmt in &decl.body {
            match stmt {
                ProcStmt::Inputs(names) | ProcStmt::Aux(names) => {
                    let is_input = matches!(stmt, ProcStmt::Inputs(_));
                    for (x, pos) in names {
                        if !seen.insert(x.clone()) {
                            self.diags.push(diag(*pos, DiagnosticKind::Duplicate(x.clone())));
                            continue;
                        }
                        let (table, list, what) = if is_input {
                            (&self.inputs, &mut inputs, "input")
                        } else {
                            (&self.aux, &mut aux, "auxiliary variable")
                        };
                        match table.get(x) {
                            Some(d) => {
                                origin.vars.insert(x.clone(), *pos);
                                list.push(d.clone());
                            }
                            None => self.diags.push(diag(*pos, DiagnosticKind::Unknown { what, name: x.clone() })),
                        }
                    }
                }
                ProcStmt::Var { name: x, pos, .. } => {
                    if !seen.insert(x.clone()) {
                        self.diags.push(diag(*pos, DiagnosticKind::Duplicate(x.clone())));
                        continue;
                    }
                    let fin = match w {
                        Some(k) => format!("{x}_{k}"),
                        None => x.clone(),
                    };
                    origin.vars.insert(fin.clone(), *pos);
                    renames.insert(x.clone(), fin.clone());
                    declared.push(x.clone());
                }
                ProcStmt::Start(v, pos) => {
                    if start.replace(*v).is_some() {
                        self.diags.push(diag(*pos, DiagnosticKind::Duplicate("start".to_string())));
                    }
                }
                ProcStmt::Nodes(vs) => nodes.extend(vs.iter().map(|(v, _)| *v)),
                ProcStmt::Init(_) | ProcStmt::Edge(_) => {}
            }
        }
        let sc = Scope {
            params: &self.params,
            family: decl.family.as_ref().zip(w).map(|(f, k)| (f.var.as_str(), k)),
            renames,
            vars: inputs.iter().chain(&aux).map(|d| d.name.clone()).collect(),
            members: None,
        };
        let mut p = SeqProcess::new(&name, NodeId(start.unwrap_or(0)));
        p.inputs = inputs;
        p.aux = aux;
        // With an explicit node list, edges may only connect listed nodes.
        let declares_nodes = !nodes.is_empty();
        for v in nodes {
            p.add_node(NodeId(v));
        }
        let mut errs = Vec::new();
        for stmt in &decl.body {
            match stmt {
                ProcStmt::Var { name: x, ty, init, .. } => {
                    let Some(fin) = sc.renames.get(x) else { continue };
                    if p.privates.iter().any(|d| &d.name == fin) {
                        continue;
                    }
                    let mut d = VarDecl::new(fin, ty.clone());
                    if let Some(e) = init {
                        match term(e, &sc) {
                            Ok(t) => d.init = Some(t),
                            Err(e) => errs.push(e),
                        }
                    }
                    p.privates.push(d);
                }
                ProcStmt::Init(e) => {
                    if origin.init.replace(e.pos).is_some() {
                        errs.push(diag(e.pos, DiagnosticKind::Duplicate("init".to_string())));
                    }
                    match term(e, &sc) {
                        Ok(t) => p.init_cond = t,
                        Err(e) => errs.push(e),
                    }
                }
                ProcStmt::Edge(edge) => {
                    if declares_nodes {
                        for v in [edge.from, edge.to] {
                            if !p.nodes.contains(&NodeId(v)) {
                                errs.push(invalid(edge.pos, format!("edge uses undeclared node {v}")));
                            }
                        }
                    }
                    let mut eas = Vec::new();
                    for ea in &edge.eas {
                        let built = match &ea.kind {
                            EaKind::Guard(g) => term(g, &sc).map(ElementaryAction::Guard),
                            EaKind::Send { chan, msg } => term(chan, &sc)
                                .and_then(|chan| Ok(ElementaryAction::Send { chan, msg: term(msg, &sc)? })),
                            EaKind::Recv { chan, pattern } => term(chan, &sc)
                                .and_then(|chan| Ok(ElementaryAction::Recv { chan, pattern: term(pattern, &sc)? })),
                            EaKind::Assign { lhs, rhs, aux } => term(lhs, &sc).and_then(|lhs| {
                                Ok(ElementaryAction::Assign { lhs, rhs: term(rhs, &sc)?, aux: *aux })
                            }),
                        };
                        match built {
                            Ok(ea) => eas.push(ea),
                            Err(e) => errs.push(e),
                        }
                    }
                    origin.edges.push(edge.pos);
                    p.add_edge(edge.from, edge.to, eas);
                }
                _ => {}
            }
        }
        self.diags.extend(errs);
        if self.diags.len() > before {
            return None;
        }
        for d in p.validate() {
            let pos = origin.locate(&d);
            self.diags.push(invalid(pos, format!("in process `{name}`: {d}")));
        }
        (self.diags.len() == before).then_some((p, declared, origin))
    }

    fn invariant(&mut self, decl: &InvariantDecl, dp: &DistributedProcess, members: &Members) -> Option<InvariantSpec> {
        let types = dp.var_types();
        let sc = |family| Scope {
            params: &self.params,
            family,
            renames: BTreeMap::new(),
            vars: dp.var_names().iter().cloned().collect(),
            members: Some(members),
        };
        let boolean = |e: &Expr, sc: &Scope<'_>| -> Result<Term, Diagnostic> {
            let t = term(e, sc)?;
            match t.type_of(&types) {
                Ok(ty) if ty.compatible(&TypeTag::Bool) => Ok(t),
                Ok(ty) => Err(diag(e.pos, DiagnosticKind::Type(format!("expected bool, found {ty}")))),
                Err(msg) => Err(diag(e.pos, DiagnosticKind::Type(msg))),
            }
        };
        let result = (|| {
            let body = match &decl.family {
                None => boolean(&decl.body, &sc(None))?,
                Some(f) => {
                    let mut acc: Option<Term> = None;
                    for w in family_range(f, &self.params)? {
                        let t = boolean(&decl.body, &sc(Some((f.var.as_str(), w))))?;
                        acc = Some(match acc {
                            None => t,
                            Some(a) => Term::app(Func::And, vec![a, t]),
                        });
                    }
                    acc.unwrap_or(Term::bool(true))
                }
            };
            let description = term_to_string(&body);
            let mut spec = InvariantSpec::new(&decl.name, &description, Predicate::Expr(body));
            if let Some(s) = &decl.scope {
                spec = spec.scoped(Predicate::Expr(boolean(s, &sc(None))?));
            }
            Ok(spec)
        })();
        result.map_err(|d| self.diags.push(d)).ok()
    }
}

/// Turns a parsed document into a distributed process with its inputs and
/// invariants. Family declarations are expanded: member `w` of `P` is named
/// `P<w>` and its private `x` becomes `x_<w>`.
pub fn elaborate(doc: &Document, opts: &Options) -> Result<Model, Vec<Diagnostic>> {
    let mut el = Elab {
        opts,
        diags: Vec::new(),
        params: BTreeMap::new(),
        inputs: BTreeMap::new(),
        values: Valuation::new(),
        aux: BTreeMap::new(),
    };
    el.params(doc);
    el.globals(doc);
    let mut procs = Vec::new();
    let mut declared_names = Vec::new();
    let mut first_pos = None;
    for item in &doc.items {
        let Item::Process(decl) = item else { continue };
        first_pos.get_or_insert(decl.pos);
        let members: Vec<Option<u64>> = match &decl.family {
            None => vec![None],
            Some(f) => match family_range(f, &el.params) {
                Ok(r) => r.map(Some).collect(),
                Err(d) => {
                    el.diags.push(d);
                    continue;
                }
            },
        };
        for w in members {
            if let Some((p, finals, _)) = el.process(decl, w) {
                declared_names.push((p.name.clone(), decl.pos, finals));
                procs.push(p);
            }
        }
    }
    if !el.diags.is_empty() {
        return Err(el.diags);
    }
    if procs.is_empty() {
        return Err(vec![invalid(first_pos.unwrap_or(NOWHERE), "the model has no processes")]);
    }
    let dp = match DistributedProcess::new(procs) {
        Ok(dp) => dp,
        Err(e) => {
            let pos = match &e {
                SemanticsError::DuplicateProcess(n) => {
                    declared_names.iter().filter(|d| &d.0 == n).nth(1).map(|d| d.1)
                }
                _ => None,
            };
            return Err(vec![invalid(pos.or(first_pos).unwrap_or(NOWHERE), e.to_string())]);
        }
    };
    let mut members = Members::new();
    for (i, (pname, _, written)) in declared_names.iter().enumerate() {
        let actual = &dp.process(i).privates;
        members.insert(pname.clone(), written.iter().cloned().zip(actual.iter().map(|d| d.name.clone())).collect());
    }
    let mut invariants = Vec::new();
    let mut ids = BTreeSet::new();
    for item in &doc.items {
        let Item::Invariant(decl) = item else { continue };
        if !ids.insert(decl.name.clone()) {
            el.diags.push(diag(decl.pos, DiagnosticKind::Duplicate(decl.name.clone())));
            continue;
        }
        if let Some(spec) = el.invariant(decl, &dp, &members) {
            invariants.push(spec);
        }
    }
    if !el.diags.is_empty() {
        return Err(el.diags);
    }
    Ok(Model { name: doc.name.clone(), dp, inputs: el.values, invariants, params: el.params })
}
