//! Evaluation of clauses and literals under a symbolic interpretation, and
//! diagnosis of clause sets whose candidate model is not a model.

use std::cmp::Ordering;

use crate::clause::{ClauseId, ConstrainedClause, GroundAtom, GroundLiteral, Literal, Provenance};
use crate::error::{Error, Result};
use crate::la::{self, Formula};
use crate::model::{producers_of, ProductionRecord, SymbolicInterpretation};
use crate::order::{maximal_literals, tuple_cmp, PrecedenceOrder};
use crate::saturation::{is_redundant, resolve};
use crate::term::{Assignment, Rational, Theory};

/// `(⋀Λ) → ⋁ φ_i`, where `φ_i` is the interpretation of the `i`-th
/// literal's predicate over its arguments, negated for negative literals.
pub fn clause_to_formula(c: &ConstrainedClause, s: &SymbolicInterpretation) -> Result<Formula> {
    let mut disjuncts = Vec::new();
    for l in &c.literals {
        disjuncts.push(literal_formula(l, s)?);
    }
    Ok(Formula::implies(Formula::conjunction_of(&c.constraint), Formula::or(disjuncts)))
}

fn literal_formula(l: &Literal, s: &SymbolicInterpretation) -> Result<Formula> {
    let f = s.instantiate(&l.atom.pred, &l.atom.args)?;
    Ok(if l.positive { f } else { Formula::not(f) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Violated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub clause: ClauseId,
    pub verdict: Verdict,
    /// Present exactly when the clause is violated; assigns every variable
    /// of the clause.
    pub witness: Option<Assignment>,
}

pub fn check_clause(c: &ConstrainedClause, s: &SymbolicInterpretation, theory: Theory) -> Result<EvalReport> {
    let negation = Formula::not(clause_to_formula(c, s)?);
    let (verdict, witness) = match la::is_satisfiable(&negation, theory) {
        None => (Verdict::Valid, None),
        Some(beta) => (Verdict::Violated, Some(beta.restricted_to(&c.vars()))),
    };
    Ok(EvalReport {
        clause: c.id,
        verdict,
        witness,
    })
}

pub fn check_ground_literal(l: &GroundLiteral, s: &SymbolicInterpretation) -> Result<bool> {
    Ok(s.holds(&l.atom)? == l.positive)
}

/// A non-ground literal holds when its formula is valid.
pub fn entails_literal(l: &Literal, s: &SymbolicInterpretation) -> Result<bool> {
    let f = literal_formula(l, s)?;
    Ok(la::is_satisfiable(&Formula::not(f), s.theory).is_none())
}

/// A violated clause together with a non-redundant inference that repairs
/// the violation.
#[derive(Clone, Debug, PartialEq)]
pub struct Explanation {
    pub violated_clause: ClauseId,
    pub witness: Assignment,
    pub max_neg_literal: GroundAtom,
    pub producer_clause: ClauseId,
    pub resolvent: ConstrainedClause,
}

/// (maximal predicate rank, literal count, id).
fn heuristic_key(c: &ConstrainedClause, ord: &PrecedenceOrder) -> Result<(Option<usize>, usize, ClauseId)> {
    let mut top = None;
    for l in &c.literals {
        top = top.max(Some(ord.rank(&l.atom.pred)?));
    }
    Ok((top, c.literals.len(), c.id))
}

fn ground(l: &Literal, beta: &Assignment) -> Result<GroundAtom> {
    let args = l
        .atom
        .args
        .iter()
        .map(|v| beta.get(v).cloned().ok_or_else(|| Error::UnassignedVariable(v.clone())))
        .collect::<Result<Vec<Rational>>>()?;
    Ok(GroundAtom {
        pred: l.atom.pred.clone(),
        args,
    })
}

/// Diagnose why `s` is not a model of `n`. Returns `None` when every
/// clause is valid.
pub fn explain(
    n: &[ConstrainedClause],
    s: &SymbolicInterpretation,
    records: &[ProductionRecord],
    ord: &PrecedenceOrder,
    theory: Theory,
) -> Result<Option<Explanation>> {
    let mut violated = Vec::new();
    for c in n {
        let report = check_clause(c, s, theory)?;
        if let Some(w) = report.witness {
            violated.push((heuristic_key(c, ord)?, c, w));
        }
    }
    if violated.is_empty() {
        return Ok(None);
    }
    violated.sort_by_key(|a| a.0);
    let next_id = ClauseId(n.iter().map(|c| c.id.0).max().unwrap_or(0) + 1);
    for (_, c, witness) in &violated {
        let mut best: Option<(usize, GroundAtom)> = None;
        for m in maximal_literals(c, ord)? {
            let l = &c.literals[m.index];
            if l.positive {
                continue;
            }
            let g = ground(l, witness)?;
            let better = match &best {
                None => true,
                Some((_, b)) => tuple_cmp(&g.args, &b.args) == Ordering::Greater,
            };
            if better {
                best = Some((m.index, g));
            }
        }
        let Some((lit_index, atom)) = best else {
            return Err(Error::Internal(format!("violated clause {} has no negative maximal literal", c.label())));
        };
        let mut producers = Vec::new();
        for id in producers_of(&atom, records, theory)? {
            if let Some(d) = n.iter().find(|d| d.id == id) {
                producers.push((heuristic_key(d, ord)?, d));
            }
        }
        producers.sort_by_key(|a| a.0);
        for (_, d) in producers {
            for r in resolve(d, c, ord)? {
                let Provenance::Resolvent { right_literal, .. } = &r.provenance else {
                    continue;
                };
                if *right_literal != lit_index {
                    continue;
                }
                let mut r = r;
                r.id = next_id;
                match la::simplify_constraint(&r.constraint, theory) {
                    Some(atoms) => r.constraint = atoms,
                    None => continue,
                }
                if !is_redundant(&r, n, theory) {
                    return Ok(Some(Explanation {
                        violated_clause: c.id,
                        witness: witness.clone(),
                        max_neg_literal: atom,
                        producer_clause: d.id,
                        resolvent: r,
                    }));
                }
            }
        }
    }
    Err(Error::Internal("no non-redundant inference found for any violated clause".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{FoAtom, Symbol};
    use crate::model::construct_model;
    use crate::term::{rat, LaAtom, LinTerm, Rel, Var};

    fn v(n: &str) -> Var {
        Var::named(n)
    }
    fn atom(p: &str, args: &[&str]) -> FoAtom {
        FoAtom::new(Symbol::new(p), args.iter().map(|a| v(a)).collect())
    }
    fn cmp(x: &str, rel: Rel, k: i64) -> LaAtom {
        LaAtom::new(&LinTerm::var(v(x)), rel, &LinTerm::constant(rat(k)))
    }
    fn ord() -> PrecedenceOrder {
        PrecedenceOrder::new(vec![Symbol::new("P"), Symbol::new("Q")]).unwrap()
    }
    fn example4() -> Vec<ConstrainedClause> {
        let c = |id, k, lits| ConstrainedClause::new(ClauseId(id), k, lits).unwrap();
        vec![
            c(1, vec![cmp("x", Rel::Lt, 0)], vec![Literal::pos(atom("P", &["x"]))]),
            c(2, vec![cmp("x", Rel::Gt, 0)], vec![Literal::pos(atom("P", &["x"]))]),
            c(3, vec![cmp("x", Rel::Lt, 1)], vec![Literal::pos(atom("Q", &["x"]))]),
            c(
                4,
                vec![cmp("x", Rel::Le, 0)],
                vec![Literal::neg(atom("Q", &["x"])), Literal::pos(atom("P", &["x"]))],
            ),
        ]
    }

    #[test]
    fn example4_violation_and_explanation() {
        let n = example4();
        let m = construct_model(&n, &ord(), Theory::Lra).unwrap();
        let report = check_clause(&n[3], &m.model, Theory::Lra).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert_eq!(report.witness.as_ref().unwrap().get(&v("x")), Some(&rat(0)));
        let q0 = GroundLiteral {
            positive: true,
            atom: GroundAtom {
                pred: Symbol::new("Q"),
                args: vec![rat(0)],
            },
        };
        assert!(check_ground_literal(&q0, &m.model).unwrap());
        let p0 = GroundLiteral {
            positive: true,
            atom: GroundAtom {
                pred: Symbol::new("P"),
                args: vec![rat(0)],
            },
        };
        assert!(!check_ground_literal(&p0, &m.model).unwrap());

        let e = explain(&n, &m.model, &m.records, &ord(), Theory::Lra).unwrap().unwrap();
        assert_eq!(e.violated_clause, ClauseId(4));
        assert_eq!(e.producer_clause, ClauseId(3));
        assert_eq!(e.max_neg_literal, q0.atom);
        assert_eq!(e.resolvent.id, ClauseId(5));
        assert_eq!(e.resolvent.constraint, vec![cmp("x", Rel::Le, 0)]);
        assert_eq!(e.resolvent.literals, vec![Literal::pos(atom("P", &["x"]))]);
    }

    #[test]
    fn repaired_set_has_no_explanation() {
        let mut n = example4();
        let fix = ConstrainedClause::new(ClauseId(5), vec![cmp("x", Rel::Le, 0)], vec![Literal::pos(atom("P", &["x"]))]).unwrap();
        n.push(fix);
        let m = construct_model(&n, &ord(), Theory::Lra).unwrap();
        assert_eq!(m.model.get(&Symbol::new("P")), Formula::True);
        assert!(explain(&n, &m.model, &m.records, &ord(), Theory::Lra).unwrap().is_none());
    }

    #[test]
    fn unsatisfiable_constraint_is_valid_under_bottom() {
        let c = ConstrainedClause::new(
            ClauseId(1),
            vec![cmp("x", Rel::Lt, 0), cmp("x", Rel::Gt, 0)],
            vec![Literal::pos(atom("P", &["x"]))],
        )
        .unwrap();
        let s = SymbolicInterpretation::bottom(Theory::Lra);
        assert_eq!(check_clause(&c, &s, Theory::Lra).unwrap().verdict, Verdict::Valid);
    }

    #[test]
    fn non_ground_literal_entailment() {
        let mut s = SymbolicInterpretation::bottom(Theory::Lra);
        s.set(Symbol::new("P"), 1, Formula::True);
        assert!(entails_literal(&Literal::pos(atom("P", &["y"])), &s).unwrap());
        assert!(!entails_literal(&Literal::pos(atom("Q", &["y"])), &s).unwrap());
        assert!(entails_literal(&Literal::neg(atom("Q", &["y"])), &s).unwrap());
    }
}
