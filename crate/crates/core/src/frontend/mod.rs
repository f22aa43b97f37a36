//! Problem files: parsing, abstraction and printing.
//!
//! ```text
//! (theory lia)
//! (pred P 2)
//! (pred Q 2)
//! (order P Q)            ; optional, defaults to declaration order
//! (window 0 4)           ; optional, used by the oracle
//! (clause (and (<= 0 x 2) (<= 0 y 2)) (P x y))
//! (clause C2 (and (>= x' (+ x 1)) (>= y' (+ y 1))) (=> (P x y) (Q x' y')))
//! ```

mod json;
mod parse;
mod print;
mod sexpr;

use std::collections::BTreeSet;

use crate::clause::{ClauseId, ConstrainedClause, FoAtom, Literal, Signature, Symbol};
use crate::error::Result;
use crate::oracle::Window;
use crate::order::PrecedenceOrder;
use crate::term::{LaAtom, LinTerm, Rel, Theory, Var};

pub use json::{
    clause_json, eval_report_json, explanation_json, formula_json, model_json, problem_json, saturation_json,
};
pub use parse::{parse, parse_clause, parse_formula, parse_model};
pub use print::{
    atom_sexp, clause_sexp, constraint_sexp, formula_sexp, print_clause, print_model, print_problem, print_trace,
    rational_sexp, source_clause_sexp, term_sexp,
};
pub use sexpr::{read_all, Sexp};

/// First-order atom as written, with arbitrary linear terms as arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceAtom {
    pub pred: Symbol,
    pub args: Vec<LinTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceLiteral {
    pub positive: bool,
    pub atom: SourceAtom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceClause {
    pub name: Option<String>,
    pub constraint: Vec<LaAtom>,
    pub literals: Vec<SourceLiteral>,
}

impl SourceClause {
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.constraint.iter().flat_map(|a| a.vars().cloned()).collect();
        for l in &self.literals {
            for t in &l.atom.args {
                out.extend(t.vars().cloned());
            }
        }
        out
    }

    pub fn is_abstracted(&self) -> bool {
        self.literals.iter().all(|l| l.atom.args.iter().all(|t| t.as_var().is_some()))
    }

    /// Replace every non-variable argument `t` by a fresh variable `v` and
    /// add `v = t` to the constraint.
    pub fn abstracted(&self) -> SourceClause {
        let mut used = self.vars();
        let mut fresh = fresh_names();
        let mut out = self.clone();
        for l in &mut out.literals {
            for t in &mut l.atom.args {
                if t.as_var().is_some() {
                    continue;
                }
                let v = fresh.by_ref().find(|v| !used.contains(v)).unwrap();
                used.insert(v.clone());
                let vt = LinTerm::var(v);
                out.constraint.push(LaAtom::new(&vt, Rel::Eq, t));
                *t = vt;
            }
        }
        out
    }

    /// Internal clause; requires an abstracted clause.
    pub fn to_clause(&self, id: ClauseId) -> Result<ConstrainedClause> {
        let c = self.abstracted();
        let literals = c
            .literals
            .iter()
            .map(|l| {
                let atom = FoAtom::new(
                    l.atom.pred.clone(),
                    l.atom.args.iter().map(|t| t.as_var().expect("abstracted").clone()).collect(),
                );
                if l.positive {
                    Literal::pos(atom)
                } else {
                    Literal::neg(atom)
                }
            })
            .collect();
        let mut out = ConstrainedClause::new(id, c.constraint, literals)?;
        if let Some(n) = &self.name {
            out = out.with_name(n);
        }
        Ok(out)
    }

    pub fn from_clause(c: &ConstrainedClause) -> SourceClause {
        SourceClause {
            name: c.name.as_ref().map(|n| n.to_string()),
            constraint: c.constraint.clone(),
            literals: c
                .literals
                .iter()
                .map(|l| SourceLiteral {
                    positive: l.positive,
                    atom: SourceAtom {
                        pred: l.atom.pred.clone(),
                        args: l.atom.args.iter().map(|v| LinTerm::var(v.clone())).collect(),
                    },
                })
                .collect(),
        }
    }
}

/// `x, y, z, u, v, w, x1, y1, …`
fn fresh_names() -> impl Iterator<Item = Var> {
    const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    (0..).flat_map(|k: usize| {
        BASE.iter().map(move |b| if k == 0 { Var::named(b) } else { Var::named(&format!("{b}{k}")) })
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub theory: Theory,
    pub declarations: Signature,
    pub precedence: Option<Vec<Symbol>>,
    pub clauses: Vec<SourceClause>,
    pub window_hint: Option<Window>,
}

impl Problem {
    pub fn abstracted(&self) -> Problem {
        Problem {
            clauses: self.clauses.iter().map(|c| c.abstracted()).collect(),
            ..self.clone()
        }
    }

    /// Abstracted clauses numbered from 1 in file order.
    pub fn clause_set(&self) -> Result<Vec<ConstrainedClause>> {
        self.clauses
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_clause(ClauseId(i as u32 + 1)))
            .collect()
    }

    /// The explicit order if given, else declaration order.
    pub fn order(&self) -> Result<PrecedenceOrder> {
        PrecedenceOrder::new(self.precedence.clone().unwrap_or_else(|| self.declarations.symbols().to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::rat;

    fn source(text: &str) -> SourceClause {
        parse(&format!("(theory lia) (pred P 2) (clause {text})")).unwrap().clauses.remove(0)
    }

    #[test]
    fn abstraction_examples() {
        let c = source("(>= x 3) (P x 1)").abstracted();
        let y = LinTerm::var(Var::named("y"));
        assert_eq!(c.constraint[1], LaAtom::new(&y, Rel::Eq, &LinTerm::constant(rat(1))));
        assert_eq!(c.literals[0].atom.args, vec![LinTerm::var(Var::named("x")), y.clone()]);

        let c = source("true (P 3 5)").abstracted();
        let x = LinTerm::var(Var::named("x"));
        assert_eq!(
            c.constraint,
            vec![
                LaAtom::new(&x, Rel::Eq, &LinTerm::constant(rat(3))),
                LaAtom::new(&y, Rel::Eq, &LinTerm::constant(rat(5)))
            ]
        );
        assert_eq!(c.abstracted(), c);
    }

    #[test]
    fn fresh_names_skip_used() {
        let c = source("(and (= x 0) (= y 0) (= z 0)) (P (+ x 1) y)").abstracted();
        assert_eq!(c.literals[0].atom.args[0], LinTerm::var(Var::named("u")));
        let names: Vec<Var> = fresh_names().take(8).collect();
        assert_eq!(names[6], Var::named("x1"));
    }
}
