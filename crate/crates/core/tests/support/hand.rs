//! The complete state graph of the plain model at N = 1, n = 1, written out by
//! hand from the process graphs.

use std::collections::BTreeMap;

use dpcheck_core::explorer::TransitionRef;
use dpcheck_core::semantics::{DistributedProcess, DpState, QueueId};
use dpcheck_core::terms::{NodeId, Queue, RowSource, Value};

fn nat(k: u64) -> Value {
    Value::Nat(k)
}

fn a1() -> Value {
    Value::Row(RowSource::A, 1)
}

fn ab1() -> Value {
    Value::Row(RowSource::Prod, 1)
}

fn triple(x: Value, y: u64, z: u64) -> Value {
    Value::Tuple(vec![x, nat(y), nat(z)])
}

struct Hand<'a> {
    dp: &'a DistributedProcess,
}

impl Hand<'_> {
    /// A state given by manager/worker locations, the variables that differ
    /// from their initial values, and the non-empty channels.
    fn state(&self, p0: u32, p1: u32, changed: &[(&str, Value)], chans: &[(u64, Vec<Value>)]) -> DpState {
        let mut vals: BTreeMap<&str, Value> = BTreeMap::from([
            ("A", Value::Array(vec![Some(a1())])),
            ("B", Value::MatrixAtom("B".into())),
            ("C", Value::Array(vec![None])),
            ("N", nat(1)),
            ("n", nat(1)),
            ("i", nat(1)),
            ("j", nat(0)),
            ("k", nat(0)),
            ("l", nat(1)),
            ("p", nat(0)),
            ("Y_1", Value::Star),
            ("j_1", nat(0)),
        ]);
        for (x, v) in changed {
            assert!(vals.insert(x, v.clone()).is_some(), "unknown variable {x}");
        }
        assert_eq!(vals.len(), self.dp.var_names().len());
        let mut vars = vec![Value::Nat(0); vals.len()];
        for (x, v) in vals {
            vars[self.dp.slot(x).unwrap()] = v;
        }
        DpState {
            locs: vec![NodeId(p0), NodeId(p1)],
            vars,
            queues: chans.iter().map(|(c, items)| (QueueId::Channel(*c), items.iter().cloned().collect::<Queue>())).collect(),
        }
    }
}

/// States in discovery order and transitions, both in the order a
/// breadth-first explorer that tries processes and edges in index order
/// finds them. The only terminal is state 15.
pub fn plain_one_one(dp: &DistributedProcess) -> (Vec<DpState>, Vec<TransitionRef>) {
    let h = Hand { dp };

    let task = || vec![triple(a1(), 0, 1)];
    let result = || vec![triple(ab1(), 1, 1)];
    let stop = || vec![triple(Value::Star, 0, 0)];
    let got_i = [("i", nat(2)), ("Y_1", a1()), ("j_1", nat(1))];
    let stored = [
        ("i", nat(2)),
        ("Y_1", a1()),
        ("j_1", nat(1)),
        ("C", Value::Array(vec![Some(ab1())])),
        ("p", nat(1)),
        ("j", nat(1)),
        ("k", nat(1)),
    ];
    let with = |extra: &[(&'static str, Value)]| -> Vec<(&'static str, Value)> {
        let mut v: Vec<_> = stored.to_vec();
        for (x, val) in extra {
            if let Some(slot) = v.iter_mut().find(|(y, _)| y == x) {
                slot.1 = val.clone();
            } else {
                v.push((x, val.clone()));
            }
        }
        v
    };

    let expected = vec![
        /* 0 */ h.state(0, 0, &[], &[]),
        /* 1 */ h.state(0, 0, &[("i", nat(2))], &[(1, task())]),
        /* 2 */ h.state(1, 0, &[("i", nat(2))], &[(1, task())]),
        /* 3 */ h.state(0, 1, &got_i, &[]),
        /* 4 */ h.state(1, 1, &got_i, &[]),
        /* 5 */ h.state(0, 0, &got_i, &[(0, result())]),
        /* 6 */ h.state(1, 0, &got_i, &[(0, result())]),
        /* 7 */ h.state(2, 0, &stored, &[]),
        /* 8 */ h.state(1, 0, &stored, &[]),
        /* 9 */ h.state(3, 0, &stored, &[]),
        /* 10 */ h.state(3, 0, &with(&[("l", nat(2))]), &[(1, stop())]),
        /* 11 */ h.state(4, 0, &with(&[("l", nat(2))]), &[(1, stop())]),
        /* 12 */ h.state(3, 1, &with(&[("l", nat(2)), ("Y_1", Value::Star), ("j_1", nat(0))]), &[]),
        /* 13 */ h.state(4, 1, &with(&[("l", nat(2)), ("Y_1", Value::Star), ("j_1", nat(0))]), &[]),
        /* 14 */ h.state(3, 2, &with(&[("l", nat(2)), ("Y_1", Value::Star), ("j_1", nat(0))]), &[]),
        /* 15 */ h.state(4, 2, &with(&[("l", nat(2)), ("Y_1", Value::Star), ("j_1", nat(0))]), &[]),
    ];
    // (from, process, edge, to); process 0 is the manager.
    let edges = [
        (0, 0, 0, 1),
        (1, 0, 1, 2),
        (1, 1, 0, 3),
        (2, 1, 0, 4),
        (3, 0, 1, 4),
        (3, 1, 1, 5),
        (4, 1, 1, 6),
        (5, 0, 1, 6),
        (6, 0, 2, 7),
        (7, 0, 3, 8),
        (8, 0, 5, 9),
        (9, 0, 6, 10),
        (10, 0, 7, 11),
        (10, 1, 0, 12),
        (11, 1, 0, 13),
        (12, 0, 7, 13),
        (12, 1, 2, 14),
        (13, 1, 2, 15),
        (14, 0, 7, 15),
    ];
    let edges = edges.iter().map(|&(from, process, edge, to)| TransitionRef { from, process, edge, to }).collect();
    (expected, edges)
}

