//! The explorer's output for the plain model at N = 1, n = 1 compared
//! state-for-state and edge-for-edge with the hand-written graph.

#[path = "support/hand.rs"]
mod hand;

use dpcheck_core::explorer::{explore, Bounds};
use dpcheck_core::matmul::{build_plain, MatmulParams};
use dpcheck_core::semantics::StateClass;

#[test]
fn plain_model_one_row_one_worker() {
    let params = MatmulParams::symbolic(1, 1);
    let dp = build_plain(&params).unwrap();
    let (expected, expected_edges) = hand::plain_one_one(&dp);
    let r = explore(&dp, &params.inputs(), Bounds::default()).unwrap();
    assert!(r.is_complete());
    assert_eq!(r.states.len(), expected.len());
    for (k, (a, b)) in r.states.iter().zip(&expected).enumerate() {
        assert_eq!(a, b, "state {k}: explorer {} vs hand {}", dp.canonical_key(a), dp.canonical_key(b));
    }
    assert_eq!(r.transitions, expected_edges);
    assert_eq!(r.terminals(), vec![15]);
    assert!(r.deadlocks().is_empty());
    assert!(r.classes[..15].iter().all(|c| *c == Some(StateClass::Live)));
}
