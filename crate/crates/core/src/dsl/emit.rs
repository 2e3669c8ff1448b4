use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::process::{Action, ElementaryAction, SeqProcess};
use crate::semantics::DistributedProcess;
use crate::terms::{Func, RowSource, Term, Valuation};

fn infix(f: &Func) -> bool {
    matches!(
        f,
        Func::Add
            | Func::Sub
            | Func::Eq
            | Func::Ne
            | Func::Lt
            | Func::Le
            | Func::Gt
            | Func::Ge
            | Func::And
            | Func::Or
            | Func::Implies
            | Func::Union
            | Func::DisjointUnion
            | Func::SetMinus
            | Func::Intersect
    )
}

fn write_list(out: &mut String, args: &[Term]) {
    for (k, a) in args.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        write_term(out, a);
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Const(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Index(b, i) => {
            if matches!(**b, Term::Var(_)) {
                write_term(out, b);
            } else {
                out.push('(');
                write_term(out, b);
                out.push(')');
            }
            out.push('[');
            write_term(out, i);
            out.push(']');
        }
        Term::App(f, args) if infix(f) && args.len() == 2 => {
            out.push('(');
            write_term(out, &args[0]);
            let _ = write!(out, " {} ", f.name());
            write_term(out, &args[1]);
            out.push(')');
        }
        Term::App(f, args) => match f {
            Func::Not => {
                out.push_str("!(");
                write_list(out, args);
                out.push(')');
            }
            Func::Tuple(_) => {
                out.push('(');
                write_list(out, args);
                if args.len() == 1 {
                    out.push(',');
                }
                out.push(')');
            }
            Func::SetOf(_) => {
                out.push('{');
                write_list(out, args);
                out.push('}');
            }
            Func::Channel => {
                out.push_str("c[");
                write_list(out, args);
                out.push(']');
            }
            Func::Row(src) => {
                out.push_str(match src {
                    RowSource::A => "row(A, ",
                    RowSource::Prod => "row(AB, ",
                });
                write_list(out, args);
                out.push(')');
            }
            Func::At(p) => {
                let _ = write!(out, "at({p})");
            }
            _ => {
                out.push_str(f.name());
                out.push('(');
                write_list(out, args);
                out.push(')');
            }
        },
    }
}

/// Renders a term in the text syntax, with every binary operator parenthesized.
pub fn term_to_string(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_ea(out: &mut String, ea: &ElementaryAction) {
    match ea {
        ElementaryAction::Guard(g) => {
            let _ = write!(out, "[{}];", term_to_string(g));
        }
        ElementaryAction::Send { chan, msg } => {
            let _ = write!(out, "{} ! {};", term_to_string(chan), term_to_string(msg));
        }
        ElementaryAction::Recv { chan, pattern } => {
            let _ = write!(out, "{} ? {};", term_to_string(chan), term_to_string(pattern));
        }
        ElementaryAction::Assign { lhs, rhs, aux } => {
            let _ = write!(out, "{}{} := {};", if *aux { "aux " } else { "" }, term_to_string(lhs), term_to_string(rhs));
        }
    }
}

/// One elementary action in the text syntax, with its trailing `;`.
pub fn ea_to_string(ea: &ElementaryAction) -> String {
    let mut out = String::new();
    write_ea(&mut out, ea);
    out
}

/// An edge label: its elementary actions separated by spaces, or `skip`
/// for the empty action.
pub fn action_to_string(a: &Action) -> String {
    if a.0.is_empty() {
        return String::from("skip");
    }
    a.0.iter().map(ea_to_string).collect::<alloc::vec::Vec<_>>().join(" ")
}

fn names(decls: &[crate::process::VarDecl]) -> String {
    decls.iter().map(|d| d.name.as_str()).collect::<alloc::vec::Vec<_>>().join(", ")
}

fn write_process(out: &mut String, p: &SeqProcess) {
    let _ = writeln!(out, "process {} {{", p.name);
    if !p.inputs.is_empty() {
        let _ = writeln!(out, "    inputs {};", names(&p.inputs));
    }
    for d in &p.privates {
        let _ = write!(out, "    var {} : {}", d.name, d.ty);
        if let Some(init) = &d.init {
            let _ = write!(out, " = {}", term_to_string(init));
        }
        out.push_str(";\n");
    }
    if !p.aux.is_empty() {
        let _ = writeln!(out, "    aux {};", names(&p.aux));
    }
    let _ = writeln!(out, "    init {};", term_to_string(&p.init_cond));
    let _ = writeln!(out, "    start {};", p.initial.0);
    let nodes: alloc::vec::Vec<String> = p.nodes.iter().map(|v| format!("{}", v.0)).collect();
    let _ = writeln!(out, "    nodes {};", nodes.join(", "));
    for e in &p.edges {
        let _ = write!(out, "    edge {} -> {} {{", e.from.0, e.to.0);
        if e.action.0.is_empty() {
            out.push_str("}\n");
            continue;
        }
        out.push('\n');
        for ea in &e.action.0 {
            out.push_str("        ");
            write_ea(out, ea);
            out.push('\n');
        }
        out.push_str("    }\n");
    }
    out.push_str("}\n");
}

/// Prints a distributed process as a flat document: no parameters or
/// families, every process spelled out. Parsing the result gives back an
/// equal process.
pub fn emit(dp: &DistributedProcess) -> String {
    emit_with_inputs(dp, &Valuation::new())
}

/// As [`emit`], also recording the given input values.
pub fn emit_with_inputs(dp: &DistributedProcess, inputs: &Valuation) -> String {
    let mut out = String::new();
    for d in dp.inputs() {
        let _ = write!(out, "input {} : {}", d.name, d.ty);
        if let Some(v) = inputs.get(&d.name) {
            let _ = write!(out, " = {v}");
        }
        out.push_str(";\n");
    }
    for d in dp.aux() {
        let _ = write!(out, "aux {} : {}", d.name, d.ty);
        if let Some(init) = &d.init {
            let _ = write!(out, " = {}", term_to_string(init));
        }
        out.push_str(";\n");
    }
    for p in dp.processes() {
        out.push('\n');
        write_process(&mut out, p);
    }
    out
}
