//! JSON renderings mirroring the text printers.

use serde_json::{json, Map, Value};

use super::print::{clause_sexp, formula_sexp, print_problem, source_clause_sexp};
use super::Problem;
use crate::clause::{ConstrainedClause, Provenance, Signature};
use crate::eval::{EvalReport, Explanation, Verdict};
use crate::la::Formula;
use crate::model::SymbolicInterpretation;
use crate::saturation::{SaturationState, Status};
use crate::term::{Assignment, LaAtom, LinTerm, Rel};

fn term_json(t: &LinTerm) -> Value {
    let coeffs: Map<String, Value> = t.coeffs().map(|(v, c)| (v.to_string(), json!(c.to_string()))).collect();
    json!({ "coeffs": coeffs, "constant": t.constant_part().to_string() })
}

fn atom_json(a: &LaAtom) -> Value {
    let (lhs, rel, rhs) = a.sides();
    match rel {
        Rel::Divides(m) => json!({ "op": "divides", "modulus": m.to_string(), "term": term_json(&lhs) }),
        Rel::NotDivides(m) => json!({ "op": "not_divides", "modulus": m.to_string(), "term": term_json(&lhs) }),
        r => json!({ "op": r.symbol(), "lhs": term_json(&lhs), "rhs": term_json(&rhs) }),
    }
}

pub fn formula_json(f: &Formula) -> Value {
    match f {
        Formula::True => json!({ "op": "true" }),
        Formula::False => json!({ "op": "false" }),
        Formula::Atom(a) => atom_json(a),
        Formula::Not(g) => json!({ "op": "not", "arg": formula_json(g) }),
        Formula::And(xs) => json!({ "op": "and", "args": xs.iter().map(formula_json).collect::<Vec<_>>() }),
        Formula::Or(xs) => json!({ "op": "or", "args": xs.iter().map(formula_json).collect::<Vec<_>>() }),
        Formula::Exists(v, g) => json!({ "op": "exists", "var": v.to_string(), "body": formula_json(g) }),
    }
}

fn assignment_json(beta: &Assignment) -> Value {
    let m: Map<String, Value> = beta.iter().map(|(v, r)| (v.to_string(), json!(r.to_string()))).collect();
    Value::Object(m)
}

pub fn model_json(s: &SymbolicInterpretation, sig: &Signature) -> Value {
    let preds: Vec<Value> = sig
        .symbols()
        .iter()
        .map(|p| {
            let f = s.get(p);
            json!({
                "name": p.to_string(),
                "arity": sig.arity(p).unwrap(),
                "text": formula_sexp(&f),
                "formula": formula_json(&f),
            })
        })
        .collect();
    json!({ "theory": s.theory.name(), "predicates": preds })
}

pub fn clause_json(c: &ConstrainedClause) -> Value {
    let literals: Vec<Value> = c
        .literals
        .iter()
        .map(|l| {
            json!({
                "positive": l.positive,
                "pred": l.atom.pred.to_string(),
                "args": l.atom.args.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let provenance = match &c.provenance {
        Provenance::Input => json!({ "kind": "input" }),
        Provenance::Resolvent {
            left,
            right,
            left_literal,
            right_literal,
            unifier,
        } => json!({
            "kind": "resolvent",
            "left": left.to_string(),
            "right": right.to_string(),
            "left_literal": left_literal,
            "right_literal": right_literal,
            "unifier": unifier.to_string(),
        }),
    };
    json!({
        "id": c.id.to_string(),
        "label": c.label(),
        "text": clause_sexp(c),
        "constraint": c.constraint.iter().map(atom_json).collect::<Vec<_>>(),
        "literals": literals,
        "provenance": provenance,
    })
}

pub fn problem_json(p: &Problem) -> Value {
    json!({
        "theory": p.theory.name(),
        "declarations": p.declarations.symbols().iter().map(|s| json!({ "name": s.to_string(), "arity": p.declarations.arity(s).unwrap() })).collect::<Vec<_>>(),
        "order": p.precedence.as_ref().map(|o| o.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        "window": p.window_hint.map(|w| json!([w.lo, w.hi])),
        "clauses": p.clauses.iter().map(source_clause_sexp).collect::<Vec<_>>(),
        "text": print_problem(p),
    })
}

pub fn saturation_json(st: &SaturationState) -> Value {
    let refutation = match st.status {
        Status::Refuted(id) => Some(id.to_string()),
        _ => None,
    };
    json!({
        "status": st.status.name(),
        "refutation": refutation,
        "derived": st.derived_count,
        "trace": st.trace_lines(),
        "clauses": st.clauses().into_iter().map(clause_json).collect::<Vec<_>>(),
    })
}

pub fn eval_report_json(r: &EvalReport) -> Value {
    json!({
        "clause": r.clause.to_string(),
        "verdict": match r.verdict { Verdict::Valid => "valid", Verdict::Violated => "violated" },
        "witness": r.witness.as_ref().map(assignment_json),
    })
}

pub fn explanation_json(e: &Explanation) -> Value {
    json!({
        "violated_clause": e.violated_clause.to_string(),
        "witness": assignment_json(&e.witness),
        "max_neg_literal": e.max_neg_literal.to_string(),
        "producer_clause": e.producer_clause.to_string(),
        "resolvent": clause_json(&e.resolvent),
    })
}
