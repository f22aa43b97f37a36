use num_traits::{One, Zero};

use super::{Problem, SourceClause, SourceLiteral};
use crate::clause::{ConstrainedClause, Signature};
use crate::la::Formula;
use crate::model::SymbolicInterpretation;
use crate::saturation::SaturationState;
use crate::term::{LaAtom, LinTerm, Rational, Rel};

pub fn rational_sexp(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("(/ {} {})", r.numer(), r.denom())
    }
}

pub fn term_sexp(t: &LinTerm) -> String {
    let mut parts = Vec::new();
    for (v, c) in t.coeffs() {
        parts.push(if c.is_one() {
            v.to_string()
        } else if *c == -Rational::one() {
            format!("(- {v})")
        } else {
            format!("(* {} {v})", rational_sexp(c))
        });
    }
    if !t.constant_part().is_zero() || parts.is_empty() {
        parts.push(rational_sexp(t.constant_part()));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

pub fn atom_sexp(a: &LaAtom) -> String {
    let (lhs, rel, rhs) = a.sides();
    let op = match rel {
        Rel::Le => "<=",
        Rel::Lt => "<",
        Rel::Eq => "=",
        Rel::Ne => "distinct",
        Rel::Ge => ">=",
        Rel::Gt => ">",
        Rel::Divides(m) => return format!("(div {m} {})", term_sexp(&lhs)),
        Rel::NotDivides(m) => return format!("(not (div {m} {}))", term_sexp(&lhs)),
    };
    format!("({op} {} {})", term_sexp(&lhs), term_sexp(&rhs))
}

pub fn formula_sexp(f: &Formula) -> String {
    let list = |op: &str, xs: &[Formula]| {
        let inner: Vec<String> = xs.iter().map(formula_sexp).collect();
        format!("({op} {})", inner.join(" "))
    };
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(a) => atom_sexp(a),
        Formula::Not(g) => format!("(not {})", formula_sexp(g)),
        Formula::And(xs) if xs.is_empty() => "true".into(),
        Formula::Or(xs) if xs.is_empty() => "false".into(),
        Formula::And(xs) => list("and", xs),
        Formula::Or(xs) => list("or", xs),
        Formula::Exists(v, g) => format!("(exists ({v}) {})", formula_sexp(g)),
    }
}

pub fn constraint_sexp(atoms: &[LaAtom]) -> String {
    match atoms {
        [] => "true".into(),
        [a] => atom_sexp(a),
        _ => format!("(and {})", atoms.iter().map(atom_sexp).collect::<Vec<_>>().join(" ")),
    }
}

fn literal_sexp(l: &SourceLiteral, positive: bool) -> String {
    let atom = if l.atom.args.is_empty() {
        l.atom.pred.to_string()
    } else {
        let args: Vec<String> = l.atom.args.iter().map(term_sexp).collect();
        format!("({} {})", l.atom.pred, args.join(" "))
    };
    if positive {
        atom
    } else {
        format!("(not {atom})")
    }
}

/// Implication form when there are body literals, otherwise the bare head.
fn fo_sexp(lits: &[SourceLiteral]) -> String {
    let head = lits.iter().find(|l| l.positive);
    let body: Vec<String> = lits.iter().filter(|l| !l.positive).map(|l| literal_sexp(l, true)).collect();
    match (head, body.len()) {
        (None, 0) => "false".into(),
        (Some(h), 0) => literal_sexp(h, true),
        (None, 1) => literal_sexp(lits.iter().find(|l| !l.positive).unwrap(), false),
        (h, _) => {
            let b = if body.len() == 1 {
                body[0].clone()
            } else {
                format!("(and {})", body.join(" "))
            };
            let h = h.map(|h| literal_sexp(h, true)).unwrap_or_else(|| "false".into());
            format!("(=> {b} {h})")
        }
    }
}

pub fn source_clause_sexp(c: &SourceClause) -> String {
    let name = c.name.as_ref().map(|n| format!("{n} ")).unwrap_or_default();
    format!("(clause {name}{} {})", constraint_sexp(&c.constraint), fo_sexp(&c.literals))
}

/// `(clause LABEL CONSTRAINT FO)`, labelled with the name or id.
pub fn clause_sexp(c: &ConstrainedClause) -> String {
    let mut s = SourceClause::from_clause(c);
    s.name = Some(c.label());
    source_clause_sexp(&s)
}

/// Clause in the conventional `Λ ∥ C` notation with its label.
pub fn print_clause(c: &ConstrainedClause) -> String {
    format!("{}: {c}", c.label())
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = format!("(theory {})\n", p.theory);
    for s in p.declarations.symbols() {
        out.push_str(&format!("(pred {s} {})\n", p.declarations.arity(s).unwrap()));
    }
    if let Some(order) = &p.precedence {
        let names: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("(order {})\n", names.join(" ")));
    }
    if let Some(w) = &p.window_hint {
        out.push_str(&format!("(window {} {})\n", w.lo, w.hi));
    }
    for c in &p.clauses {
        out.push_str(&source_clause_sexp(c));
        out.push('\n');
    }
    out
}

/// One `model P/n := FORMULA` line per declared predicate.
pub fn print_model(s: &SymbolicInterpretation, sig: &Signature) -> String {
    let mut out = String::new();
    for p in sig.symbols() {
        let arity = sig.arity(p).unwrap();
        out.push_str(&format!("model {p}/{arity} := {}\n", formula_sexp(&s.get(p))));
    }
    out
}

pub fn print_trace(st: &SaturationState) -> String {
    st.to_string()
}

#[cfg(test)]
mod tests {
    use super::super::{parse, parse_model};
    use super::*;
    use crate::term::{rat, ratio, Theory, Var};

    #[test]
    fn terms() {
        let x = Var::named("x");
        assert_eq!(term_sexp(&LinTerm::zero()), "0");
        assert_eq!(term_sexp(&LinTerm::constant(ratio(-1, 2))), "(/ -1 2)");
        let t = LinTerm::scaled_var(rat(-1), x.clone()).plus(&LinTerm::constant(rat(3)));
        assert_eq!(term_sexp(&t), "(+ (- x) 3)");
        assert_eq!(term_sexp(&LinTerm::scaled_var(rat(2), x)), "(* 2 x)");
    }

    #[test]
    fn problem_round_trip() {
        let text = "(theory lra)\n(pred P 1)\n(pred Q 2)\n(order Q P)\n(window -1 3)\n\
                    (clause C1 (and (< x (/ 1 3)) (distinct x y)) (=> (and (P x) (P y)) (Q x (+ y 1))))\n\
                    (clause (>= x 0) (not (P x)))\n(clause true false)\n";
        let p = parse(text).unwrap();
        let printed = print_problem(&p);
        assert_eq!(parse(&printed).unwrap(), p, "{printed}");
        assert_eq!(print_problem(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn bottom_model_prints_false() {
        let p = parse("(theory lia) (pred P 2) (pred R 0)").unwrap();
        let s = SymbolicInterpretation::bottom(Theory::Lia);
        let text = print_model(&s, &p.declarations);
        assert_eq!(text, "model P/2 := false\nmodel R/0 := false\n");
        assert_eq!(parse_model(&text, &p.declarations, Theory::Lia).unwrap().get(&crate::clause::Symbol::new("P")), Formula::False);
    }
}
