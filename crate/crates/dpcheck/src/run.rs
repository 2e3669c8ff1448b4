//! Build, explore and check a model, producing a [`Report`].

use std::collections::{BTreeMap, BTreeSet};

use dpcheck_core::dsl::Model;
use dpcheck_core::explorer::{check_invariants, detect_cycles, Bounds, ExplorationResult, ExploreError};
use dpcheck_core::matmul::{build, c_cells, check_final_spec, invariant_suite, MatmulError, MatmulParams, Mode, Mutation};
use dpcheck_core::semantics::DistributedProcess;
use dpcheck_core::terms::Value;
use thiserror::Error;

use crate::parallel::explore_threads;
use crate::report::{Checked, ProductReport, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub bounds: Bounds,
    pub threads: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { bounds: Bounds::default(), threads: 1 }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Matmul(#[from] MatmulError),
    #[error("N must be at least 1, otherwise the initial condition is unsatisfiable")]
    NoRows,
    #[error("inputs without a value: {}", .0.join(", "))]
    MissingInputs(Vec<String>),
    #[error(transparent)]
    Explore(#[from] ExploreError),
}

impl RunError {
    /// A runtime evaluation error reached during exploration is a defect of
    /// the model, so it counts as a violation; everything else is a model
    /// or usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Explore(ExploreError::Step { .. }) => crate::report::EXIT_VIOLATION,
            _ => crate::cli::EXIT_USAGE,
        }
    }
}

/// A finished run: the report together with the explored graph.
pub struct Outcome {
    pub report: Report,
    pub dp: DistributedProcess,
    pub result: ExplorationResult,
}

fn matmul_parameters(p: &MatmulParams) -> BTreeMap<String, String> {
    let mode = match p.mode {
        Mode::Symbolic => "symbolic",
        Mode::Numeric { .. } => "numeric",
    };
    BTreeMap::from([
        ("N".to_string(), p.rows.to_string()),
        ("n".to_string(), p.workers.to_string()),
        ("mode".to_string(), mode.to_string()),
    ])
}

/// Checks the augmented matrix multiplication model: the twelve invariants,
/// deadlock freedom, termination, `C = AB` on every terminal state and
/// disjointness of every `⊔` outside the shutdown phase.
pub fn verify_matmul(params: &MatmulParams, mutation: Option<Mutation>, settings: Settings) -> Result<Outcome, RunError> {
    if params.rows == 0 {
        return Err(RunError::NoRows);
    }
    let dp = build(params, true, mutation)?;
    let inputs = params.inputs();
    let result = explore_threads(&dp, &inputs, settings.bounds, settings.threads)?;
    let cycles = detect_cycles(&result);
    let outcomes = check_invariants(&dp, &result, &invariant_suite(params));
    let mut parameters = matmul_parameters(params);
    if let Some(m) = mutation {
        parameters.insert("mutation".to_string(), m.name().to_string());
    }
    let name = "matmul (augmented)";
    let checked = Checked { dp: &dp, result: &result, cycles: &cycles, invariants: &outcomes };
    let mut report = Report::new(name, parameters, settings.bounds, &checked, true);

    let fin = check_final_spec(params, &dp, &result);
    let c_values: BTreeSet<String> = result
        .terminals()
        .into_iter()
        .map(|t| Value::Array(c_cells(&dp, &result.states[t])).to_string())
        .collect();
    let expected = Value::Array((1..=params.rows).map(|r| params.ab_row(r)).collect()).to_string();
    report.product = Some(ProductReport {
        holds: fin.product_holds(),
        terminals: fin.terminals,
        bad_terminals: fin.bad_terminals.len(),
        c_values: c_values.into_iter().collect(),
        expected,
        overlaps_in_scope: fin.overlaps_in_scope.len(),
        overlaps_out_of_scope: fin.overlaps_out_of_scope,
    });
    report.finalize();
    Ok(Outcome { report, dp, result })
}

/// Explores an elaborated `.dp` model and checks its inline invariants.
/// Cycles are reported always but fail the run only with `require_termination`.
pub fn check_model(name: &str, model: Model, settings: Settings, require_termination: bool) -> Result<Outcome, RunError> {
    let missing = model.missing_inputs();
    if !missing.is_empty() {
        return Err(RunError::MissingInputs(missing));
    }
    let result = explore_threads(&model.dp, &model.inputs, settings.bounds, settings.threads)?;
    let cycles = detect_cycles(&result);
    let outcomes = check_invariants(&model.dp, &result, &model.invariants);
    let parameters = model.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    let checked = Checked { dp: &model.dp, result: &result, cycles: &cycles, invariants: &outcomes };
    let report = Report::new(name, parameters, settings.bounds, &checked, require_termination);
    Ok(Outcome { report, dp: model.dp, result })
}

/// One `(N, n)` instance of a grid sweep.
pub struct GridRow {
    pub rows: u64,
    pub workers: u64,
    pub outcome: Result<Report, RunError>,
}

pub fn grid(max_rows: u64, max_workers: u64, settings: Settings) -> Vec<GridRow> {
    let mut out = Vec::new();
    for rows in 1..=max_rows {
        for workers in 1..=max_workers {
            let outcome = verify_matmul(&MatmulParams::symbolic(rows, workers), None, settings).map(|o| o.report);
            out.push(GridRow { rows, workers, outcome });
        }
    }
    out
}

impl GridRow {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(r) => r.exit_code(),
            Err(e) => e.exit_code(),
        }
    }

    pub fn line(&self) -> String {
        let head = format!("N={} n={}", self.rows, self.workers);
        match &self.outcome {
            Err(e) => format!("{head}: error: {e}"),
            Ok(r) => {
                let passed = r.invariants.iter().filter(|i| i.passed).count();
                let p = r.product.as_ref();
                format!(
                    "{head}: {} states, {} transitions, invariants {passed}/{}, deadlocks {}, {}, C = AB {}, overlaps {}/{} -> {}",
                    r.exploration.states,
                    r.exploration.transitions,
                    r.invariants.len(),
                    r.deadlocks.count,
                    if r.termination.acyclic { "acyclic" } else { "cyclic" },
                    if p.is_some_and(|p| p.holds) { "holds" } else { "fails" },
                    p.map_or(0, |p| p.overlaps_in_scope),
                    p.map_or(0, |p| p.overlaps_out_of_scope),
                    r.verdict.status,
                )
            }
        }
    }
}
