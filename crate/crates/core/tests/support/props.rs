//! Generated small models and the transition-rule properties checked on them.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use dpcheck_core::explorer::{explore, Bounds, ExplorationResult};
use dpcheck_core::process::{ElementaryAction as EA, SeqProcess, VarDecl};
use dpcheck_core::semantics::{step_action, step_elementary, DistributedProcess, DpState, QueueId, VarOwner};
use dpcheck_core::terms::ops::*;
use dpcheck_core::terms::{NodeId, Queue, Term, TypeTag, Valuation, Value};

pub const SEEN: &str = "seen";

#[derive(Clone, Debug)]
pub enum Mp {
    None,
    /// Channel, payload variable, whether the payload is paired with a constant.
    Send(u64, usize, Option<u64>),
    Recv(u64, usize, Option<u64>),
}

#[derive(Clone, Debug)]
pub struct GenEdge {
    pub from: u32,
    pub to: u32,
    pub guard: Option<(usize, u8, u64)>,
    pub mp: Mp,
    pub assign: Option<(usize, usize, u64)>,
    pub assign_first: bool,
    pub ghost: bool,
}

pub fn gen_edge() -> impl Strategy<Value = GenEdge> {
    let mp = prop_oneof![
        Just(Mp::None),
        (0u64..3, 0usize..2, proptest::option::of(0u64..2)).prop_map(|(c, v, k)| Mp::Send(c, v, k)),
        (0u64..3, 0usize..2, proptest::option::of(0u64..2)).prop_map(|(c, v, k)| Mp::Recv(c, v, k)),
    ];
    (
        0u32..4,
        0u32..4,
        proptest::option::of((0usize..2, 0u8..3, 0u64..3)),
        mp,
        proptest::option::of((0usize..2, 0usize..2, 0u64..3)),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(from, to, guard, mp, assign, assign_first, ghost)| GenEdge {
            from,
            to,
            guard,
            mp,
            assign,
            assign_first,
            ghost,
        })
}

pub fn gen_model() -> impl Strategy<Value = Vec<Vec<GenEdge>>> {
    proptest::collection::vec(proptest::collection::vec(gen_edge(), 1..6), 1..4)
}

pub fn pvar(p: usize, v: usize) -> String {
    format!("x{p}_{v}")
}

pub fn build(model: &[Vec<GenEdge>]) -> DistributedProcess {
    let procs = model
        .iter()
        .enumerate()
        .map(|(pi, edges)| {
            let x = |v: usize| var(&pvar(pi, v));
            let mut p = SeqProcess::new(&format!("Q{pi}"), NodeId(0));
            p.privates = vec![VarDecl::new(&pvar(pi, 0), TypeTag::Nat), VarDecl::new(&pvar(pi, 1), TypeTag::Nat)];
            p.aux = vec![VarDecl::new(SEEN, TypeTag::set_of(TypeTag::Nat))];
            for e in edges {
                let mut eas = Vec::new();
                if let Some((v, op, k)) = e.guard {
                    eas.push(EA::Guard(match op {
                        0 => lt(x(v), nat(k)),
                        1 => eq(x(v), nat(k)),
                        _ => ge(x(v), nat(k)),
                    }));
                }
                let assign = e.assign.map(|(dst, src, k)| EA::Assign {
                    lhs: x(dst),
                    rhs: min(add(x(src), nat(k)), nat(3)),
                    aux: false,
                });
                if e.assign_first {
                    eas.extend(assign.clone());
                }
                let payload = |v: usize, k: Option<u64>| match k {
                    Some(k) => tuple(vec![x(v), nat(k)]),
                    None => x(v),
                };
                match &e.mp {
                    Mp::None => {}
                    Mp::Send(c, v, k) => eas.push(EA::Send { chan: chan(nat(*c)), msg: payload(*v, *k) }),
                    Mp::Recv(c, v, k) => eas.push(EA::Recv { chan: chan(nat(*c)), pattern: payload(*v, *k) }),
                }
                if !e.assign_first {
                    eas.extend(assign);
                }
                if e.ghost {
                    eas.push(EA::Assign { lhs: var(SEEN), rhs: union(var(SEEN), set_of(vec![x(0)])), aux: true });
                }
                p.add_edge(e.from, e.to, eas);
            }
            p
        })
        .collect();
    DistributedProcess::new(procs).unwrap()
}

pub fn bounds() -> Bounds {
    Bounds { max_states: 80, max_queue_len: 3, max_depth: None }
}

pub fn run(dp: &DistributedProcess) -> ExplorationResult {
    explore(dp, &Valuation::new(), bounds()).unwrap()
}

pub fn queue_diff(a: &DpState, b: &DpState) -> Vec<QueueId> {
    let mut ids: Vec<QueueId> = a.queues.keys().chain(b.queues.keys()).copied().collect();
    ids.sort();
    ids.dedup();
    ids.into_iter().filter(|&id| a.queue(id) != b.queue(id)).collect()
}

/// Channel of the message-passing step of an action, if any.
pub fn mp_of(dp: &DistributedProcess, process: usize, edge: usize) -> Option<(bool, u64)> {
    dp.process(process).edges[edge].action.0.iter().find_map(|ea| match ea {
        EA::Send { chan: Term::Const(Value::Chan(c)), .. } => Some((true, chan_index(c))),
        EA::Recv { chan: Term::Const(Value::Chan(c)), .. } => Some((false, chan_index(c))),
        _ => None,
    })
}

pub fn chan_index(c: &dpcheck_core::terms::ChannelId) -> u64 {
    match c {
        dpcheck_core::terms::ChannelId::Indexed(k) => *k,
        dpcheck_core::terms::ChannelId::Broadcast => unreachable!("generator uses indexed channels"),
    }
}

pub fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 1000, ..ProptestConfig::default() }
}


/// A move of process i changes only its location, its privates and the
/// auxiliaries, and at most the one queue its action touches.
pub fn frame_property(model: &[Vec<GenEdge>]) -> Result<(), TestCaseError> {
    let dp = build(model);
    let r = run(&dp);
    for t in &r.transitions {
        let (a, b) = (&r.states[t.from], &r.states[t.to]);
        for (k, (x, y)) in a.locs.iter().zip(&b.locs).enumerate() {
            prop_assert!(k == t.process || x == y);
        }
        for (slot, (x, y)) in a.vars.iter().zip(&b.vars).enumerate() {
            if x != y {
                prop_assert!(matches!(dp.owner(slot), VarOwner::Aux) || dp.owner(slot) == VarOwner::Private(t.process));
            }
        }
        let changed = queue_diff(a, b);
        match mp_of(&dp, t.process, t.edge) {
            None => prop_assert!(changed.is_empty()),
            Some((_, c)) => prop_assert!(changed.iter().all(|&id| id == QueueId::Channel(c)) && changed.len() <= 1),
        }
    }
    Ok(())
}

/// Sends append at the tail, receives remove the head, and along every
/// discovery path the queue holds exactly what was sent and not yet
/// received, in order.
pub fn fifo_conservation(model: &[Vec<GenEdge>]) -> Result<(), TestCaseError> {
    let dp = build(model);
    let r = run(&dp);
    for t in &r.transitions {
        let (a, b) = (&r.states[t.from], &r.states[t.to]);
        if let Some((is_send, c)) = mp_of(&dp, t.process, t.edge) {
            let (qa, qb) = (a.queue(QueueId::Channel(c)), b.queue(QueueId::Channel(c)));
            if is_send {
                prop_assert_eq!(qb.len(), qa.len() + 1);
                prop_assert!(qa.iter().zip(qb.iter()).all(|(x, y)| x == y));
            } else {
                prop_assert_eq!(Some(qb.clone()), qa.tail());
            }
        }
    }
    for target in 0..r.states.len() {
        let mut sent: BTreeMap<u64, Vec<Value>> = BTreeMap::new();
        let mut received: BTreeMap<u64, Vec<Value>> = BTreeMap::new();
        for ti in r.path_to(target) {
            let t = r.transitions[ti];
            if let Some((is_send, c)) = mp_of(&dp, t.process, t.edge) {
                let id = QueueId::Channel(c);
                if is_send {
                    sent.entry(c).or_default().push(r.states[t.to].queue(id).iter().last().unwrap().clone());
                } else {
                    received.entry(c).or_default().push(r.states[t.from].queue(id).head().unwrap().clone());
                }
            }
        }
        for c in 0..3 {
            let s = sent.get(&c).cloned().unwrap_or_default();
            let rcv = received.get(&c).cloned().unwrap_or_default();
            prop_assert!(rcv.len() <= s.len());
            prop_assert_eq!(&s[..rcv.len()], &rcv[..]);
            let rest: Queue = s[rcv.len()..].iter().cloned().collect();
            prop_assert_eq!(r.states[target].queue(QueueId::Channel(c)), &rest);
        }
    }
    Ok(())
}

/// Guards never change the state, and edges carrying only guards change
/// nothing but the mover's location.
pub fn guards_leave_binding_alone(model: &[Vec<GenEdge>]) -> Result<(), TestCaseError> {
    let dp = build(model);
    let r = run(&dp);
    let guards: Vec<(usize, EA)> = (0..dp.processes().len())
        .flat_map(|i| dp.process(i).edges.iter().flat_map(move |e| e.action.0.iter().filter(|ea| matches!(ea, EA::Guard(_))).cloned().map(move |g| (i, g))))
        .collect();
    for s in &r.states {
        for (i, g) in &guards {
            match step_elementary(&dp, s, *i, g).unwrap() {
                None => {}
                Some(next) => prop_assert_eq!(&next, s),
            }
        }
    }
    for t in &r.transitions {
        let only_guards = dp.process(t.process).edges[t.edge].action.0.iter().all(|ea| matches!(ea, EA::Guard(_)));
        if only_guards {
            let (a, b) = (&r.states[t.from], &r.states[t.to]);
            prop_assert_eq!(&a.vars, &b.vars);
            prop_assert_eq!(&a.queues, &b.queues);
        }
    }
    Ok(())
}

/// Firing an edge is all-or-nothing and agrees with firing its elementary
/// actions one at a time.
pub fn actions_are_atomic(model: &[Vec<GenEdge>]) -> Result<(), TestCaseError> {
    let dp = build(model);
    let r = run(&dp);
    for s in &r.states {
        for i in 0..dp.processes().len() {
            for (k, e) in dp.process(i).edges_from(s.locs[i]) {
                let before = s.clone();
                let whole = step_action(&dp, s, i, k).unwrap();
                prop_assert_eq!(s, &before);
                let mut cur = Some(s.clone());
                for ea in &e.action.0 {
                    cur = match cur {
                        Some(c) => step_elementary(&dp, &c, i, ea).unwrap(),
                        None => None,
                    };
                }
                if let Some(c) = cur.as_mut() {
                    c.locs[i] = e.to;
                }
                prop_assert_eq!(whole.map(|w| w.state), cur);
            }
        }
    }
    Ok(())
}
