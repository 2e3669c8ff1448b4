//! Verification reports as plain text and JSON. Reports carry no timings or
//! host details, so identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use dpcheck_core::dsl::action_to_string;
use dpcheck_core::explorer::{Bounds, CycleReport, ExplorationResult, InvariantOutcome, Lasso};
use dpcheck_core::semantics::DistributedProcess;
use serde::Serialize;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub process: String,
    pub edge: usize,
    pub from: u32,
    pub to: u32,
    pub action: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index of the offending state in exploration order.
    pub state: usize,
    pub key: String,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LassoReport {
    pub prefix: Vec<Step>,
    pub cycle: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub max_states: usize,
    pub max_queue: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplorationReport {
    pub states: usize,
    pub transitions: usize,
    pub initial_states: usize,
    pub max_depth: usize,
    pub complete: bool,
    pub truncated_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeadlockReport {
    pub count: usize,
    /// Shortest path to the first deadlock found.
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminationReport {
    pub acyclic: bool,
    pub kahn_found_cycle: bool,
    pub dfs_found_cycle: bool,
    pub agree: bool,
    /// Acyclicity of a truncated graph says nothing about the full one.
    pub conclusive: bool,
    pub lasso: Option<LassoReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    pub witness: Option<Witness>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub holds: bool,
    pub terminals: usize,
    pub bad_terminals: usize,
    /// Distinct values of `C` over all terminal states.
    pub c_values: Vec<String>,
    pub expected: String,
    pub overlaps_in_scope: usize,
    pub overlaps_out_of_scope: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: String,
    pub exit_code: i32,
    pub failures: Vec<String>,
}

/// An explored model together with the results of the checks run on it.
#[derive(Clone, Copy)]
pub struct Checked<'a> {
    pub dp: &'a DistributedProcess,
    pub result: &'a ExplorationResult,
    pub cycles: &'a CycleReport,
    pub invariants: &'a [InvariantOutcome],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub model: String,
    pub parameters: BTreeMap<String, String>,
    pub bounds: BoundsReport,
    pub exploration: ExplorationReport,
    pub deadlocks: DeadlockReport,
    pub termination: TerminationReport,
    pub terminals: usize,
    pub invariants: Vec<InvariantReport>,
    pub product: Option<ProductReport>,
    pub require_termination: bool,
    pub verdict: Verdict,
}

fn step(dp: &DistributedProcess, r: &ExplorationResult, t: usize) -> Step {
    let tr = r.transitions[t];
    let p = dp.process(tr.process);
    let e = &p.edges[tr.edge];
    Step { process: p.name.clone(), edge: tr.edge, from: e.from.0, to: e.to.0, action: action_to_string(&e.action) }
}

pub fn witness(dp: &DistributedProcess, r: &ExplorationResult, state: usize) -> Witness {
    Witness {
        state,
        key: dp.canonical_key(&r.states[state]),
        steps: r.path_to(state).into_iter().map(|t| step(dp, r, t)).collect(),
    }
}

fn lasso(dp: &DistributedProcess, r: &ExplorationResult, l: &Lasso) -> LassoReport {
    LassoReport {
        prefix: l.prefix.iter().map(|&t| step(dp, r, t)).collect(),
        cycle: l.cycle.iter().map(|&t| step(dp, r, t)).collect(),
    }
}

impl Report {
    /// Summarizes an exploration and computes the verdict.
    pub fn new(
        model: &str,
        parameters: BTreeMap<String, String>,
        bounds: Bounds,
        checked: &Checked<'_>,
        require_termination: bool,
    ) -> Report {
        let Checked { dp, result: r, cycles, invariants: outcomes } = *checked;
        let deadlocks = r.deadlocks();
        let mut report = Report {
            model: model.to_string(),
            parameters,
            bounds: BoundsReport { max_states: bounds.max_states, max_queue: bounds.max_queue_len },
            exploration: ExplorationReport {
                states: r.state_count(),
                transitions: r.transitions.len(),
                initial_states: r.initials.len(),
                max_depth: r.depth.iter().copied().max().unwrap_or(0),
                complete: r.is_complete(),
                truncated_by: r.truncated.map(|b| b.to_string()),
            },
            deadlocks: DeadlockReport {
                count: deadlocks.len(),
                witness: deadlocks.first().map(|&s| witness(dp, r, s)),
            },
            termination: TerminationReport {
                acyclic: cycles.acyclic(),
                kahn_found_cycle: cycles.kahn.is_some(),
                dfs_found_cycle: cycles.dfs.is_some(),
                agree: cycles.agree(),
                conclusive: !cycles.unsound,
                lasso: cycles.witness().map(|l| lasso(dp, r, l)),
            },
            terminals: r.terminals().len(),
            invariants: outcomes
                .iter()
                .map(|o| {
                    let first = o.violations.first();
                    InvariantReport {
                        id: o.id.clone(),
                        description: o.description.clone(),
                        passed: o.passed(),
                        checked: o.checked,
                        violations: o.violations.len(),
                        witness: first.map(|v| witness(dp, r, v.state)),
                        error: first.and_then(|v| v.error.as_ref()).map(|e| e.to_string()),
                    }
                })
                .collect(),
            product: None,
            require_termination,
            verdict: Verdict { status: String::new(), exit_code: 0, failures: Vec::new() },
        };
        report.finalize();
        report
    }

    /// Recomputes the verdict. A violation found in a truncated exploration
    /// is still a real violation, so it takes precedence over truncation.
    pub fn finalize(&mut self) {
        let mut failures = Vec::new();
        for inv in &self.invariants {
            if !inv.passed {
                failures.push(format!("invariant {} violated in {} state(s)", inv.id, inv.violations));
            }
        }
        if self.deadlocks.count > 0 {
            failures.push(format!("{} deadlock state(s)", self.deadlocks.count));
        }
        if !self.termination.agree {
            failures.push("cycle detectors disagree".to_string());
        }
        if self.require_termination && !self.termination.acyclic {
            failures.push("reachable cycle: some executions do not terminate".to_string());
        }
        if let Some(p) = &self.product {
            if p.bad_terminals > 0 {
                failures.push(format!("C differs from AB in {} terminal state(s)", p.bad_terminals));
            }
            if self.exploration.complete && p.terminals == 0 {
                failures.push("no terminal state is reachable".to_string());
            }
            if p.overlaps_in_scope > 0 {
                failures.push(format!("{} disjoint union(s) with overlapping arguments", p.overlaps_in_scope));
            }
        }
        let (status, exit_code) = if !failures.is_empty() {
            ("fail", EXIT_VIOLATION)
        } else if !self.exploration.complete {
            ("truncated", EXIT_TRUNCATED)
        } else {
            ("pass", EXIT_PASS)
        };
        self.verdict = Verdict { status: status.to_string(), exit_code, failures };
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        if !self.parameters.is_empty() {
            let ps: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "parameters: {}", ps.join(", "));
        }
        let _ = writeln!(out, "bounds: max-states={}, max-queue={}", self.bounds.max_states, self.bounds.max_queue);
        let e = &self.exploration;
        let _ = writeln!(
            out,
            "exploration: {} states, {} transitions, max depth {}, {}",
            e.states,
            e.transitions,
            e.max_depth,
            match &e.truncated_by {
                None => "complete".to_string(),
                Some(b) => format!("truncated by {b}"),
            }
        );
        match &self.deadlocks.witness {
            None => out.push_str("deadlocks: none\n"),
            Some(w) => {
                let _ = writeln!(out, "deadlocks: {} (shortest witness, {} steps)", self.deadlocks.count, w.steps.len());
                write_witness(&mut out, w);
            }
        }
        let t = &self.termination;
        let agreement = if t.agree { "kahn and dfs agree" } else { "kahn and dfs DISAGREE" };
        let conclusive = if t.conclusive { "" } else { ", inconclusive: graph truncated" };
        if t.acyclic {
            let _ = writeln!(out, "termination: acyclic ({agreement}{conclusive})");
        } else {
            let _ = writeln!(out, "termination: cycle found ({agreement})");
            if let Some(l) = &t.lasso {
                let _ = writeln!(out, "  prefix ({} steps):", l.prefix.len());
                write_steps(&mut out, &l.prefix, "    ");
                let _ = writeln!(out, "  cycle ({} steps):", l.cycle.len());
                write_steps(&mut out, &l.cycle, "    ");
            }
        }
        let _ = writeln!(out, "terminal states: {}", self.terminals);
        if !self.invariants.is_empty() {
            let passed = self.invariants.iter().filter(|i| i.passed).count();
            let _ = writeln!(out, "invariants: {passed}/{} pass", self.invariants.len());
            for inv in &self.invariants {
                if inv.passed {
                    let _ = writeln!(out, "  pass  {:<4} {}  [{} states in scope]", inv.id, inv.description, inv.checked);
                } else {
                    let _ = writeln!(
                        out,
                        "  FAIL  {:<4} {}  [violated in {} of {} states]",
                        inv.id, inv.description, inv.violations, inv.checked
                    );
                    if let Some(err) = &inv.error {
                        let _ = writeln!(out, "        evaluation error: {err}");
                    }
                    if let Some(w) = &inv.witness {
                        write_witness(&mut out, w);
                    }
                }
            }
        }
        if let Some(p) = &self.product {
            if p.holds {
                let _ = writeln!(out, "product: C = AB holds in all {} terminal state(s)", p.terminals);
            } else {
                let _ = writeln!(out, "product: C = AB fails in {} of {} terminal state(s)", p.bad_terminals, p.terminals);
            }
            for c in &p.c_values {
                let _ = writeln!(out, "  C  = {c}");
            }
            let _ = writeln!(out, "  AB = {}", p.expected);
            let _ = writeln!(
                out,
                "disjoint unions: {} overlapping before shutdown, {} during shutdown",
                p.overlaps_in_scope, p.overlaps_out_of_scope
            );
        }
        let _ = write!(out, "verdict: {} (exit {})", self.verdict.status.to_uppercase(), self.verdict.exit_code);
        out.push('\n');
        for f in &self.verdict.failures {
            let _ = writeln!(out, "  - {f}");
        }
        out
    }
}

fn write_steps(out: &mut String, steps: &[Step], indent: &str) {
    for s in steps {
        let _ = writeln!(out, "{indent}{} e{} {}->{}: {}", s.process, s.edge, s.from, s.to, s.action);
    }
}

fn write_witness(out: &mut String, w: &Witness) {
    write_steps(out, &w.steps, "        ");
    let _ = writeln!(out, "        reaching {}", w.key);
}
