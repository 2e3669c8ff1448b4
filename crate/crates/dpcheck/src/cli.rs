//! Command-line interface. [`run`] takes the argument list and output
//! streams and returns the process exit code, so it can be driven from tests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dpcheck_core::dsl::{emit_with_inputs, load, parse_expr, Diagnostic, Options};
use dpcheck_core::explorer::Bounds;
use dpcheck_core::matmul::{build, MatmulParams, Mutation};

use crate::dot::{dot_process, dot_states};
use crate::qgrid::parse_grid;
use crate::report::{EXIT_PASS, EXIT_TRUNCATED, EXIT_VIOLATION};
use crate::run::{check_model, grid, verify_matmul, RunError, Settings};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_WRITE: i32 = 73;

#[derive(Parser, Debug)]
#[command(name = "dpcheck", version, about = "Explicit-state verifier for message-passing process models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the bundled matrix multiplication model.
    VerifyMatmul {
        #[command(flatten)]
        matmul: MatmulArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Explore a .dp model and check its invariants.
    Check {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Write a process graph, state graph, JSON report or flat .dp document.
    Export {
        #[arg(long, value_enum)]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// A .dp model. Without it the bundled matrix multiplication model is used.
        file: Option<PathBuf>,
        /// Use the matrix multiplication model without auxiliary variables.
        #[arg(long)]
        plain: bool,
        #[command(flatten)]
        matmul: MatmulArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Verify the symbolic matrix multiplication model for every N and n up to the given sizes.
    Grid {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_rows: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_workers: u64,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Args, Debug)]
struct MatmulArgs {
    /// N, the number of rows of A. In numeric mode it defaults to the rows of --numeric-a.
    #[arg(long)]
    n_rows: Option<u64>,
    /// n, the number of workers.
    #[arg(long, default_value_t = 2)]
    n_workers: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Symbolic)]
    mode: ModeArg,
    /// Matrix A as rows of rationals `p/q`.
    #[arg(long)]
    numeric_a: Option<PathBuf>,
    /// Matrix B as rows of rationals `p/q`.
    #[arg(long)]
    numeric_b: Option<PathBuf>,
    /// Apply a deliberate defect to the model.
    #[arg(long, value_enum)]
    mutate: Option<MutationArg>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Override a parameter: NAME=VALUE.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Set an input to an expression: NAME=EXPR.
    #[arg(long = "set", value_name = "NAME=EXPR")]
    sets: Vec<String>,
    /// Treat a reachable cycle as a violation.
    #[arg(long)]
    require_termination: bool,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    /// Longest channel queue allowed before exploration stops.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_queue: u64,
    /// Threads for exploration. Defaults to the available parallelism.
    #[arg(long, env = "DPCHECK_WORKERS", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the reachable state graph in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Symbolic,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MutationArg {
    DropGammaUpdate,
    LoopGuardInclusive,
    GuardOnlyInclusive,
    ZeroTag,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::DropGammaUpdate => Mutation::DropGammaUpdate,
            MutationArg::LoopGuardInclusive => Mutation::LoopGuardInclusive,
            MutationArg::GuardOnlyInclusive => Mutation::GuardOnlyInclusive,
            MutationArg::ZeroTag => Mutation::ZeroTag,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    DotProcess,
    DotStates,
    ReportJson,
    Dp,
}

/// A failure that ends the run with a message on stderr.
struct Fail {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Fail {
    Fail { code, message: message.into() }
}

impl From<RunError> for Fail {
    fn from(e: RunError) -> Self {
        fail(e.exit_code(), format!("error: {e}"))
    }
}

impl BoundArgs {
    fn settings(&self) -> Settings {
        let threads = match self.workers {
            Some(w) => w as usize,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Settings {
            bounds: Bounds { max_states: self.max_states as usize, max_queue_len: self.max_queue as usize, max_depth: None },
            threads,
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_NO_INPUT, format!("error: cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Fail> {
    std::fs::write(path, contents).map_err(|e| fail(EXIT_CANT_WRITE, format!("error: cannot write {}: {e}", path.display())))
}

impl MatmulArgs {
    fn params(&self) -> Result<MatmulParams, Fail> {
        let params = match self.mode {
            ModeArg::Symbolic => {
                if self.numeric_a.is_some() || self.numeric_b.is_some() {
                    return Err(fail(EXIT_USAGE, "error: --numeric-a and --numeric-b need --mode numeric"));
                }
                MatmulParams::symbolic(self.n_rows.unwrap_or(2), self.n_workers)
            }
            ModeArg::Numeric => {
                let (Some(a), Some(b)) = (&self.numeric_a, &self.numeric_b) else {
                    return Err(fail(EXIT_USAGE, "error: --mode numeric needs --numeric-a and --numeric-b"));
                };
                let grid = |path: &Path| {
                    parse_grid(&read(path)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
                };
                let mut p = MatmulParams::numeric(grid(a)?, grid(b)?, self.n_workers);
                if let Some(n) = self.n_rows {
                    p.rows = n;
                }
                p
            }
        };
        if params.rows == 0 {
            return Err(RunError::NoRows.into());
        }
        params.validate().map_err(RunError::from)?;
        Ok(params)
    }
}

fn render_diagnostics(file: &Path, diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        if d.pos.line == 0 {
            out.push_str(&format!("{}: {}\n", file.display(), d.kind));
        } else {
            out.push_str(&format!("{}:{d}\n", file.display()));
        }
    }
    out
}

impl ModelArgs {
    fn options(&self) -> Result<Options, Fail> {
        let mut params = BTreeMap::new();
        for p in &self.params {
            let (k, v) = p.split_once('=').ok_or_else(|| fail(EXIT_USAGE, format!("error: --param `{p}` is not NAME=VALUE")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| fail(EXIT_USAGE, format!("error: --param {k}: `{v}` is not a natural number")))?;
            params.insert(k.trim().to_string(), v);
        }
        let mut inputs = BTreeMap::new();
        for s in &self.sets {
            let (k, e) = s.split_once('=').ok_or_else(|| fail(EXIT_USAGE, format!("error: --set `{s}` is not NAME=EXPR")))?;
            let expr = parse_expr(e).map_err(|d| {
                let lines: Vec<String> = d.iter().map(|d| format!("--set {k}: {d}")).collect();
                fail(EXIT_PARSE, lines.join("\n"))
            })?;
            inputs.insert(k.trim().to_string(), expr);
        }
        Ok(Options { params, inputs })
    }

    fn load(&self, file: &Path) -> Result<(String, dpcheck_core::dsl::Model), Fail> {
        let text = read(file)?;
        let opts = self.options()?;
        let model = load(&text, &opts).map_err(|diags| {
            let code = if diags.iter().any(Diagnostic::is_syntax) { EXIT_PARSE } else { EXIT_USAGE };
            fail(code, render_diagnostics(file, &diags).trim_end().to_string())
        })?;
        let name = model.name.clone().unwrap_or_else(|| file.display().to_string());
        Ok((name, model))
    }
}

fn emit_outputs(outcome: &crate::run::Outcome, outputs: &OutputArgs, out: &mut dyn Write) -> Result<i32, Fail> {
    let _ = out.write_all(outcome.report.to_text().as_bytes());
    if let Some(path) = &outputs.report {
        write_file(path, &outcome.report.to_json())?;
    }
    if let Some(path) = &outputs.dot {
        write_file(path, &dot_states(&outcome.dp, &outcome.result))?;
    }
    Ok(outcome.report.exit_code())
}

fn grid_exit(codes: &[i32]) -> i32 {
    if codes.contains(&EXIT_VIOLATION) {
        EXIT_VIOLATION
    } else if let Some(&c) = codes.iter().find(|&&c| c != EXIT_PASS && c != EXIT_TRUNCATED) {
        c
    } else if codes.contains(&EXIT_TRUNCATED) {
        EXIT_TRUNCATED
    } else {
        EXIT_PASS
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Fail> {
    match cli.command {
        Command::VerifyMatmul { matmul, bounds, outputs } => {
            let params = matmul.params()?;
            let outcome = verify_matmul(&params, matmul.mutate.map(Mutation::from), bounds.settings())?;
            emit_outputs(&outcome, &outputs, out)
        }
        Command::Check { file, model, bounds, outputs } => {
            let (name, m) = model.load(&file)?;
            let outcome = check_model(&name, m, bounds.settings(), model.require_termination)?;
            emit_outputs(&outcome, &outputs, out)
        }
        Command::Export { format, out: path, file, plain, matmul, model, bounds } => {
            let text = export(format, file.as_deref(), plain, &matmul, &model, &bounds)?;
            match path {
                Some(p) => write_file(&p, &text)?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Grid { max_rows, max_workers, bounds } => {
            let rows = grid(max_rows, max_workers, bounds.settings());
            for r in &rows {
                let _ = writeln!(out, "{}", r.line());
            }
            Ok(grid_exit(&rows.iter().map(|r| r.exit_code()).collect::<Vec<_>>()))
        }
    }
}

fn export(
    format: Format,
    file: Option<&Path>,
    plain: bool,
    matmul: &MatmulArgs,
    model: &ModelArgs,
    bounds: &BoundArgs,
) -> Result<String, Fail> {
    let settings = bounds.settings();
    let outcome = match (file, format) {
        (Some(f), Format::DotProcess | Format::Dp) => {
            let (_, m) = model.load(f)?;
            return Ok(match format {
                Format::Dp => emit_with_inputs(&m.dp, &m.inputs),
                _ => dot_process(&m.dp),
            });
        }
        (None, Format::DotProcess | Format::Dp) => {
            let params = matmul.params()?;
            let dp = build(&params, !plain, matmul.mutate.map(Mutation::from)).map_err(RunError::from)?;
            return Ok(match format {
                Format::Dp => emit_with_inputs(&dp, &params.inputs()),
                _ => dot_process(&dp),
            });
        }
        (Some(f), _) => {
            let (name, m) = model.load(f)?;
            check_model(&name, m, settings, model.require_termination)?
        }
        (None, _) => {
            if plain {
                return Err(fail(EXIT_USAGE, "error: --plain applies only to dot-process and dp exports"));
            }
            verify_matmul(&matmul.params()?, matmul.mutate.map(Mutation::from), settings)?
        }
    };
    match format {
        Format::ReportJson => Ok(outcome.report.to_json()),
        _ => {
            if !outcome.result.is_complete() {
                return Err(fail(EXIT_TRUNCATED, "error: exploration was truncated; raise --max-states or --max-queue"));
            }
            Ok(dot_states(&outcome.dp, &outcome.result))
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}
