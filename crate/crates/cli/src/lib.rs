//! Driver behind the `chcmodel` binary.
//!
//! Exit codes: 0 success, 1 refuted, 2 resource limit reached,
//! 3 explanation found, 4 oracle disagreement, 5 query violated,
//! 10 parse error, 11 I/O error, 12 internal or semantic error,
//! 64 usage error.

use std::io::Write;
use std::path::PathBuf;

use chcmodel::eval::{check_clause, explain, Verdict};
use chcmodel::frontend::{self, Problem};
use chcmodel::model::{construct_model, ModelConstruction};
use chcmodel::oracle::{restrict_model, step_bound, tn_lfp, window_closed, Window};
use chcmodel::saturation::{saturate, Limits, SaturationState, Status};
use chcmodel::{ClauseId, ConstrainedClause, Error, PrecedenceOrder, Symbol, Theory};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_RESOURCE_OUT: i32 = 2;
pub const EXIT_EXPLAINED: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;
pub const EXIT_VIOLATED: i32 = 5;
pub const EXIT_PARSE: i32 = 10;
pub const EXIT_IO: i32 = 11;
pub const EXIT_INTERNAL: i32 = 12;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Saturate,
    /// `raw` skips saturation and prints the candidate model of the input.
    Model { force: bool, raw: bool },
    Eval { query: String, force: bool },
    Explain,
    CheckLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: PathBuf,
    pub order_override: Option<Vec<String>>,
    pub limits: Limits,
    pub window: Option<Window>,
    pub format: Format,
}

/// Failure with a diagnostic and an exit code.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure(EXIT_PARSE, format!("parse error at {p}")),
            other => Failure(EXIT_INTERNAL, other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

/// Run a command, writing the report to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config, out) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Session {
    problem: Problem,
    clauses: Vec<ConstrainedClause>,
    order: PrecedenceOrder,
}

fn load(config: &RunConfig) -> Result<Session, Failure> {
    let text = std::fs::read_to_string(&config.input_path)
        .map_err(|e| Failure(EXIT_IO, format!("{}: {e}", config.input_path.display())))?;
    let problem = frontend::parse(&text).map_err(|e| match e {
        Error::Parse(p) => Failure(EXIT_PARSE, format!("{}:{p}", config.input_path.display())),
        other => Failure::from(other),
    })?;
    let order = match &config.order_override {
        Some(names) => {
            let syms: Vec<Symbol> = names.iter().map(|n| Symbol::new(n)).collect();
            for s in problem.declarations.symbols() {
                if !syms.contains(s) {
                    return Err(Failure(EXIT_USAGE, format!("--order does not mention `{s}`")));
                }
            }
            if let Some(s) = syms.iter().find(|s| !problem.declarations.contains(s)) {
                return Err(Failure(EXIT_USAGE, format!("--order mentions undeclared `{s}`")));
            }
            PrecedenceOrder::new(syms).map_err(|e| Failure(EXIT_USAGE, e.to_string()))?
        }
        None => problem.order()?,
    };
    let clauses = problem.clause_set()?;
    Ok(Session { problem, clauses, order })
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Saturated | Status::Running => EXIT_OK,
        Status::Refuted(_) => EXIT_REFUTED,
        Status::ResourceOut => EXIT_RESOURCE_OUT,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn emit_json(out: &mut dyn Write, v: serde_json::Value) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(&v).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

/// Saturate and build the model, or report why no model is printed.
fn saturated_model(
    s: &Session,
    config: &RunConfig,
    force: bool,
    out: &mut dyn Write,
) -> Result<Result<(SaturationState, ModelConstruction), i32>, Failure> {
    let st = saturate(&s.clauses, &s.order, s.problem.theory, config.limits)?;
    match st.status {
        Status::Refuted(id) => {
            match config.format {
                Format::Text => emit(out, &format!("refuted by {id}; the clause set has no model\n"))?,
                Format::Json => emit_json(out, json!({ "status": "refuted", "refutation": id.to_string() }))?,
            }
            return Ok(Err(EXIT_REFUTED));
        }
        Status::ResourceOut if !force => {
            match config.format {
                Format::Text => emit(
                    out,
                    &format!(
                        "resource limit reached after {} derived clauses; rerun with --force to print the unsaturated model\n",
                        st.derived_count
                    ),
                )?,
                Format::Json => emit_json(out, json!({ "status": "resource_out", "derived": st.derived_count }))?,
            }
            return Ok(Err(EXIT_RESOURCE_OUT));
        }
        _ => {}
    }
    let kept: Vec<ConstrainedClause> = st.clauses().into_iter().cloned().collect();
    let m = construct_model(&kept, &s.order, s.problem.theory)?;
    Ok(Ok((st, m)))
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = load(config)?;
    let theory = s.problem.theory;
    let sig = &s.problem.declarations;
    match &config.command {
        Command::Saturate => {
            let st = saturate(&s.clauses, &s.order, theory, config.limits)?;
            match config.format {
                Format::Text => {
                    let mut text = frontend::print_trace(&st);
                    text.push('\n');
                    for c in st.clauses() {
                        text.push_str(&frontend::print_clause(c));
                        text.push('\n');
                    }
                    emit(out, &text)?;
                }
                Format::Json => emit_json(out, frontend::saturation_json(&st))?,
            }
            Ok(status_code(st.status))
        }
        Command::Model { force, raw } => {
            let (m, saturated) = if *raw {
                (construct_model(&s.clauses, &s.order, theory)?, false)
            } else {
                match saturated_model(&s, config, *force, out)? {
                    Ok((st, m)) => (m, st.status == Status::Saturated),
                    Err(code) => return Ok(code),
                }
            };
            match config.format {
                Format::Text => {
                    let mut text = String::new();
                    if !saturated {
                        text.push_str("; UNSATURATED: this is a candidate model and may not satisfy the clause set\n");
                    }
                    text.push_str(&frontend::print_model(&m.model, sig));
                    emit(out, &text)?;
                }
                Format::Json => {
                    let mut v = frontend::model_json(&m.model, sig);
                    v["saturated"] = json!(saturated);
                    emit_json(out, v)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Eval { query, force } => {
            let q = frontend::parse_clause(query, sig, theory)?;
            let mut c = q.to_clause(ClauseId::UNASSIGNED)?;
            if c.name.is_none() {
                c = c.with_name("query");
            }
            let m = match saturated_model(&s, config, *force, out)? {
                Ok((_, m)) => m,
                Err(code) => return Ok(code),
            };
            let report = check_clause(&c, &m.model, theory)?;
            match config.format {
                Format::Text => {
                    let mut text = format!("{}\n", frontend::print_clause(&c));
                    match &report.witness {
                        None => text.push_str("valid\n"),
                        Some(w) => text.push_str(&format!("violated\nwitness: {w}\n")),
                    }
                    emit(out, &text)?;
                }
                Format::Json => {
                    let mut v = frontend::eval_report_json(&report);
                    v["clause"] = json!(c.label());
                    emit_json(out, v)?;
                }
            }
            Ok(if report.verdict == Verdict::Valid { EXIT_OK } else { EXIT_VIOLATED })
        }
        Command::Explain => {
            let m = construct_model(&s.clauses, &s.order, theory)?;
            let e = explain(&s.clauses, &m.model, &m.records, &s.order, theory)?;
            match (&e, config.format) {
                (None, Format::Text) => emit(out, "every clause holds in the candidate model\n")?,
                (None, Format::Json) => emit_json(out, json!(null))?,
                (Some(e), Format::Text) => {
                    let find = |id: ClauseId| s.clauses.iter().find(|c| c.id == id).expect("input clause");
                    let text = format!(
                        "violated: {}\nwitness: {}\natom: {}\nproducer: {}\nresolvent: {}\n",
                        frontend::print_clause(find(e.violated_clause)),
                        e.witness,
                        e.max_neg_literal,
                        frontend::print_clause(find(e.producer_clause)),
                        e.resolvent,
                    );
                    emit(out, &text)?;
                }
                (Some(e), Format::Json) => emit_json(out, frontend::explanation_json(e))?,
            }
            Ok(if e.is_some() { EXIT_EXPLAINED } else { EXIT_OK })
        }
        Command::CheckLeast => {
            if theory != Theory::Lia {
                return Err(Failure(EXIT_USAGE, format!("check-least needs theory lia, the problem uses {theory}")));
            }
            let w = config
                .window
                .or(s.problem.window_hint)
                .ok_or_else(|| Failure(EXIT_USAGE, "check-least needs --window LO HI or a (window ...) directive".into()))?;
            let m = match saturated_model(&s, config, false, out)? {
                Ok((_, m)) => m,
                Err(code) => return Ok(code),
            };
            let restricted = restrict_model(&m.model, w)?;
            let fp = tn_lfp(&s.clauses, w, step_bound(&s.clauses, w), theory)?;
            let closed = window_closed(&s.clauses, w, theory)?;
            let diff = restricted.difference(&fp.interpretation);
            let scope = if closed { "closed" } else { "not closed, results hold within the window only" };
            match config.format {
                Format::Text => {
                    let mut text = format!("window {w} ({scope})\n");
                    if diff.is_empty() {
                        text.push_str("agree\n");
                    } else {
                        text.push_str("disagree\n");
                        for (p, t, in_model) in &diff {
                            let pt: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                            let side = if *in_model { "only in model" } else { "only in fixpoint" };
                            text.push_str(&format!("{p}({}) {side}\n", pt.join(",")));
                        }
                    }
                    emit(out, &text)?;
                }
                Format::Json => {
                    let pts: Vec<_> = diff
                        .iter()
                        .map(|(p, t, in_model)| json!({ "pred": p.to_string(), "args": t, "in_model": in_model }))
                        .collect();
                    emit_json(
                        out,
                        json!({ "window": [w.lo, w.hi], "closed": closed, "agree": diff.is_empty(), "differences": pts }),
                    )?;
                }
            }
            Ok(if diff.is_empty() { EXIT_OK } else { EXIT_DISAGREE })
        }
    }
}
