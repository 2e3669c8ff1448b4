use std::collections::BTreeMap;

use dpcheck_core::dsl::{emit, emit_with_inputs, load, parse, Diagnostic, DiagnosticKind, Options};
use dpcheck_core::explorer::{check_invariants, explore, graph_signature, Bounds};
use dpcheck_core::matmul::{build, build_augmented, build_plain, MatmulParams};
use dpcheck_core::terms::Rational;
use proptest::prelude::*;

const MATMUL: &str = include_str!("../../../models/matmul.dp");
const MATMUL_AUG: &str = include_str!("../../../models/matmul_aug.dp");
const MUTUAL_WAIT: &str = include_str!("../../../models/mutual_wait.dp");
const SELF_LOOP: &str = include_str!("../../../models/self_loop.dp");

fn grid() -> impl Iterator<Item = (u64, u64)> {
    (1..=3).flat_map(|rows| (1..=3).map(move |n| (rows, n)))
}

fn with_params(rows: u64, workers: u64) -> Options {
    Options { params: BTreeMap::from([("rows".into(), rows), ("workers".into(), workers)]), ..Options::default() }
}

fn numeric_instances() -> Vec<MatmulParams> {
    let q = |n: i64, d: i64| Rational::new(n, d);
    vec![
        MatmulParams::numeric(
            vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]],
            vec![vec![q(1, 2), q(2, 1)], vec![q(3, 1), q(-1, 1)]],
            1,
        ),
        MatmulParams::numeric(
            vec![vec![q(1, 2), q(1, 3)], vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 4)]],
            vec![vec![q(6, 1), q(3, 1)], vec![q(12, 1), q(0, 1)]],
            2,
        ),
    ]
}

#[test]
fn bundled_matmul_matches_the_builder() {
    for (rows, workers) in grid() {
        let p = MatmulParams::symbolic(rows, workers);
        let plain = load(MATMUL, &with_params(rows, workers)).unwrap();
        assert_eq!(plain.dp, build_plain(&p).unwrap(), "plain N={rows} n={workers}");
        assert_eq!(plain.inputs, p.inputs());
        let aug = load(MATMUL_AUG, &with_params(rows, workers)).unwrap();
        assert_eq!(aug.dp, build_augmented(&p).unwrap(), "augmented N={rows} n={workers}");
    }
}

#[test]
fn bundled_invariants_hold_on_the_grid() {
    for (rows, workers) in grid() {
        let m = load(MATMUL_AUG, &with_params(rows, workers)).unwrap();
        assert_eq!(m.invariants.len(), 8);
        let r = explore(&m.dp, &m.inputs, Bounds::default()).unwrap();
        for o in check_invariants(&m.dp, &r, &m.invariants) {
            assert!(o.passed(), "invariant {} fails at N={rows} n={workers}", o.id);
            assert!(o.checked > 0);
        }
    }
}

#[test]
fn emit_round_trips_every_builder_output() {
    let mut instances: Vec<MatmulParams> = grid().map(|(r, n)| MatmulParams::symbolic(r, n)).collect();
    instances.extend(numeric_instances());
    for p in instances {
        for augmented in [false, true] {
            let dp = build(&p, augmented, None).unwrap();
            let inputs = p.inputs();
            let text = emit_with_inputs(&dp, &inputs);
            let back = load(&text, &Options::default()).unwrap_or_else(|d| panic!("{d:?}\n{text}"));
            assert_eq!(back.dp, dp);
            assert_eq!(back.inputs, inputs);
            // Same reachable graph, compared through canonical state keys.
            let id = |n: &str| Some(n.to_string());
            let a = explore(&dp, &inputs, Bounds::default()).unwrap();
            let b = explore(&back.dp, &back.inputs, Bounds::default()).unwrap();
            assert_eq!(graph_signature(&dp, &a, &id), graph_signature(&back.dp, &b, &id));
        }
    }
}

#[test]
fn emit_is_deterministic() {
    let dp = build_plain(&MatmulParams::symbolic(2, 2)).unwrap();
    assert_eq!(emit(&dp), emit(&dp));
    assert_eq!(emit(&dp), emit(&dp.clone()));
}

/// Indices of the edges of each process whose body contains a ghost assignment.
fn aux_edges(text: &str) -> BTreeMap<String, Vec<usize>> {
    let mut out = BTreeMap::new();
    let mut current = String::new();
    let mut edge = 0;
    let mut in_edge = false;
    for line in text.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("process ") {
            current = rest.trim_end_matches(" {").to_string();
            out.insert(current.clone(), Vec::new());
            edge = 0;
        } else if line.starts_with("edge ") {
            in_edge = !line.ends_with('}');
            edge += 1;
        } else if line == "}" && in_edge {
            in_edge = false;
        } else if in_edge && line.starts_with("aux ") {
            let list: &mut Vec<usize> = out.get_mut(&current).unwrap();
            if list.last() != Some(&(edge - 1)) {
                list.push(edge - 1);
            }
        }
    }
    out
}

#[test]
fn ghost_assignments_sit_on_the_expected_edges() {
    let text = emit(&build_augmented(&MatmulParams::symbolic(1, 1)).unwrap());
    let found = aux_edges(&text);
    assert_eq!(found["P0"], vec![0, 2, 4]);
    assert_eq!(found["P1"], vec![0, 1]);
    assert!(aux_edges(&emit(&build_plain(&MatmulParams::symbolic(1, 1)).unwrap())).values().all(Vec::is_empty));
}

fn first_error(text: &str) -> Diagnostic {
    load(text, &Options::default()).unwrap_err().remove(0)
}

#[test]
fn empty_document_is_rejected() {
    let d = first_error("");
    assert!(d.is_syntax());
    assert_eq!((d.pos.line, d.pos.col), (1, 1));
    assert!(first_error("// only a comment\n").is_syntax());
}

#[test]
fn undeclared_node_is_located() {
    let text = "process P {\n    nodes 0, 1;\n    edge 0 -> 1 { }\n    edge 1 -> 7 { }\n}\n";
    let d = first_error(text);
    assert_eq!((d.pos.line, d.pos.col), (4, 5));
    assert!(d.to_string().contains("node 7"), "{d}");
}

#[test]
fn semantic_errors_are_located() {
    let d = first_error("process P {\n    var x : nat;\n    var x : bool;\n}\n");
    assert_eq!(d.kind, DiagnosticKind::Duplicate("x".into()));
    assert_eq!(d.pos.line, 3);

    let d = first_error("process P {\n    var x : nat;\n    edge 0 -> 1 {\n        x := true;\n    }\n}\n");
    assert_eq!(d.pos.line, 3);
    assert!(d.to_string().contains("type"), "{d}");

    let d = first_error("process P {\n    edge 0 -> 1 { y := 1; }\n}\n");
    assert!(matches!(d.kind, DiagnosticKind::Unknown { .. }));
    assert_eq!((d.pos.line, d.pos.col), (2, 19));

    let d = first_error("process P { edge 0 -> 1 { c[1] ! 1; c[2] ? 2; } }");
    assert!(d.to_string().contains("more than one send or receive"), "{d}");

    let d = first_error("process P {}\ninvariant bad : 1 + 1;\n");
    assert!(matches!(d.kind, DiagnosticKind::Type(_)));
    assert_eq!(d.pos.line, 2);
}

#[test]
fn parameter_constraints_and_overrides() {
    let bad = load(MATMUL, &with_params(0, 1)).unwrap_err();
    assert!(bad[0].to_string().contains("constraint"), "{bad:?}");
    let unknown = load(MATMUL, &Options { params: BTreeMap::from([("cols".into(), 1)]), ..Options::default() });
    assert!(unknown.is_err());
}

#[test]
fn small_models_elaborate() {
    let m = load(MUTUAL_WAIT, &Options::default()).unwrap();
    assert_eq!(m.dp.processes().len(), 2);
    let m = load(SELF_LOOP, &Options::default()).unwrap();
    assert_eq!(m.invariants.len(), 1);
}

#[test]
fn collected_diagnostics_are_ordered_and_located() {
    let text = "process P {\n  var x : nat = ;\n  edge 0 -> 1 { x := ; }\n}\nprocess { }\ninvariant : true;\n";
    let errs = parse(text).unwrap_err();
    assert!(errs.len() >= 3);
    assert!(errs.windows(2).all(|w| w[0].pos <= w[1].pos));
    assert!(errs.iter().all(|d| d.pos.line >= 1 && d.pos.col >= 1));
}

fn mutate(text: &str, edits: &[(usize, u8, char)]) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for &(at, op, c) in edits {
        if chars.is_empty() {
            chars.push(c);
            continue;
        }
        let k = at % chars.len();
        match op % 3 {
            0 => {
                chars.remove(k);
            }
            1 => chars.insert(k, c),
            _ => chars[k] = c,
        }
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parser_never_panics_on_arbitrary_text(text in "\\PC{0,200}") {
        if let Err(errs) = load(&text, &Options::default()) {
            prop_assert!(!errs.is_empty());
        }
    }

    #[test]
    fn parser_never_panics_on_damaged_models(
        edits in prop::collection::vec(
            (any::<usize>(), any::<u8>(), prop::sample::select(vec!['[', ']', '{', '}', ';', '(', ')', ',', '!', '?', 'c', '0', ' ', ':', '=', '.', '-', '>', '_', '"'])),
            1..6,
        )
    ) {
        let text = mutate(MATMUL_AUG, &edits);
        match load(&text, &Options::default()) {
            Ok(_) => {}
            Err(errs) => {
                prop_assert!(!errs.is_empty());
                for d in &errs {
                    prop_assert!(d.pos.line >= 1 && d.pos.col >= 1, "{}", d);
                }
            }
        }
    }
}
