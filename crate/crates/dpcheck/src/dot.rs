//! Graphviz renderings of control graphs and reachable state graphs.

use std::fmt::Write;

use dpcheck_core::dsl::action_to_string;
use dpcheck_core::explorer::ExplorationResult;
use dpcheck_core::process::SeqProcess;
use dpcheck_core::semantics::{DistributedProcess, StateClass};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_process(out: &mut String, p: &SeqProcess, indent: &str) {
    for v in &p.nodes {
        let shape = if p.is_sink(*v) { "doublecircle" } else { "circle" };
        let bold = if *v == p.initial { ", penwidth=2" } else { "" };
        let _ = writeln!(out, "{indent}{} [label={}, shape={shape}{bold}];", quote(&format!("{}:{}", p.name, v.0)), quote(&v.0.to_string()));
    }
    for (k, e) in p.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "{indent}{} -> {} [label={}];",
            quote(&format!("{}:{}", p.name, e.from.0)),
            quote(&format!("{}:{}", p.name, e.to.0)),
            quote(&format!("e{k}: {}", action_to_string(&e.action))),
        );
    }
}

/// Control graph of a single sequential process.
pub fn dot_seq_process(p: &SeqProcess) -> String {
    let mut out = format!("digraph {} {{\n", quote(&p.name));
    write_process(&mut out, p, "  ");
    out.push_str("}\n");
    out
}

/// Control graphs of every process, one cluster each.
pub fn dot_process(dp: &DistributedProcess) -> String {
    let mut out = String::from("digraph processes {\n");
    for (k, p) in dp.processes().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{k} {{");
        let _ = writeln!(out, "    label={};", quote(&p.name));
        write_process(&mut out, p, "    ");
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// Reachable state graph. Terminal states are green double circles,
/// deadlocks red, states left unexpanded by a bound dashed.
pub fn dot_states(dp: &DistributedProcess, r: &ExplorationResult) -> String {
    let mut out = String::from("digraph states {\n  node [shape=box, fontsize=10];\n");
    for (k, s) in r.states.iter().enumerate() {
        let locs: Vec<String> = dp.processes().iter().zip(&s.locs).map(|(p, v)| format!("{}={}", p.name, v.0)).collect();
        let style = match r.classes[k] {
            Some(StateClass::Terminal) => ", shape=doubleoctagon, color=darkgreen",
            Some(StateClass::Deadlock) => ", style=filled, fillcolor=salmon",
            Some(StateClass::Live) => "",
            None => ", style=dashed",
        };
        let init = if r.initials.contains(&k) { ", penwidth=2" } else { "" };
        let _ = writeln!(
            out,
            "  s{k} [label={}, tooltip={}{style}{init}];",
            quote(&format!("#{k}\n{}", locs.join(" "))),
            quote(&dp.canonical_key(s)),
        );
    }
    for t in &r.transitions {
        let _ = writeln!(out, "  s{} -> s{} [label={}];", t.from, t.to, quote(&format!("{}.e{}", dp.process(t.process).name, t.edge)));
    }
    out.push_str("}\n");
    out
}
