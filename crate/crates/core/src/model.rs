//! Explicit least-model construction.
//!
//! Predicates are processed in ascending precedence. Each clause whose
//! positive literal `P(ȳ)` is maximal and whose body-plus-constraint is
//! satisfiable under the interpretation built so far contributes the
//! projection of that conjunction onto `ȳ`, renamed to the canonical
//! variables `x1..xn` of `P`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::clause::{ClauseId, ConstrainedClause, GroundAtom, Symbol};
use crate::error::{Error, Result};
use crate::la::{self, Formula};
use crate::order::PrecedenceOrder;
use crate::term::{Assignment, LinTerm, Rel, Theory, Var};

/// Total map from predicates to formulas over `x1..xn`; unmapped
/// predicates are `⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicInterpretation {
    pub theory: Theory,
    entries: BTreeMap<Symbol, (usize, Formula)>,
}

impl SymbolicInterpretation {
    pub fn bottom(theory: Theory) -> Self {
        SymbolicInterpretation {
            theory,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, pred: &Symbol) -> Formula {
        self.entries.get(pred).map(|(_, f)| f.clone()).unwrap_or(Formula::False)
    }

    pub fn arity(&self, pred: &Symbol) -> Option<usize> {
        self.entries.get(pred).map(|(n, _)| *n)
    }

    /// Set the formula of `pred`. Free variables must be among `x1..x_arity`.
    pub fn set(&mut self, pred: Symbol, arity: usize, f: Formula) {
        debug_assert!(f.free_vars().iter().all(|v| v.canon_index().is_some_and(|i| i >= 1 && i as usize <= arity)));
        self.entries.insert(pred, (arity, f));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize, &Formula)> {
        self.entries.iter().map(|(p, (n, f))| (p, *n, f))
    }

    /// Formula of `pred` with `x_i` renamed to `args[i]`.
    pub fn instantiate(&self, pred: &Symbol, args: &[Var]) -> Result<Formula> {
        match self.entries.get(pred) {
            None => Ok(Formula::False),
            Some((n, f)) => {
                if *n != args.len() {
                    return Err(Error::ArityMismatch {
                        pred: pred.to_string(),
                        expected: *n,
                        found: args.len(),
                    });
                }
                let map: BTreeMap<Var, Var> = Var::canon_tuple(*n).into_iter().zip(args.iter().cloned()).collect();
                Ok(f.rename(&map))
            }
        }
    }

    /// Pointwise disjunction.
    pub fn union(&self, other: &SymbolicInterpretation) -> SymbolicInterpretation {
        let mut out = self.clone();
        for (p, (n, f)) in &other.entries {
            let g = la::simplify(&Formula::or([out.get(p), f.clone()]), self.theory);
            out.entries.insert(p.clone(), (*n, g));
        }
        out
    }

    /// Is `P(ā)` true?
    pub fn holds(&self, atom: &GroundAtom) -> Result<bool> {
        let Some((n, f)) = self.entries.get(&atom.pred) else {
            return Ok(false);
        };
        if *n != atom.args.len() {
            return Err(Error::ArityMismatch {
                pred: atom.pred.to_string(),
                expected: *n,
                found: atom.args.len(),
            });
        }
        la::eval_formula(f, &canonical_assignment(&atom.args), self.theory)
    }
}

impl fmt::Display for SymbolicInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, (n, g)) in &self.entries {
            writeln!(f, "{p}/{n} := {g}")?;
        }
        Ok(())
    }
}

/// `{x_i ↦ a_i}`.
pub fn canonical_assignment(args: &[crate::term::Rational]) -> Assignment {
    Var::canon_tuple(args.len()).into_iter().zip(args.iter().cloned()).collect()
}

/// Conjunction of `x_i = x_j` for all `i < j` with `y_i = y_j`.
pub fn sharing(ys: &[Var], xs: &[Var]) -> Result<Formula> {
    if ys.len() != xs.len() {
        return Err(Error::LengthMismatch(ys.len(), xs.len()));
    }
    let mut eqs = Vec::new();
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            if ys[i] == ys[j] {
                eqs.push(Formula::rel(&LinTerm::var(xs[i].clone()), Rel::Eq, &LinTerm::var(xs[j].clone())));
            }
        }
    }
    Ok(Formula::and(eqs))
}

/// `⋀Λ ∧ ⋀ P_i^S σ_i` over the clause's own variables.
fn body_formula(s: &SymbolicInterpretation, c: &ConstrainedClause) -> Result<Formula> {
    let mut parts = vec![Formula::conjunction_of(&c.constraint)];
    for (_, l) in c.negative_literals() {
        parts.push(s.instantiate(&l.atom.pred, &l.atom.args)?);
    }
    Ok(Formula::and(parts))
}

/// Head literal of `c` if it is strictly maximal with every body predicate
/// strictly below it.
fn productive_head<'a>(c: &'a ConstrainedClause, ord: &PrecedenceOrder) -> Result<Option<&'a crate::clause::Literal>> {
    let Some((_, head)) = c.positive_literal() else {
        return Ok(None);
    };
    let r = ord.rank(&head.atom.pred)?;
    for (_, l) in c.negative_literals() {
        if ord.rank(&l.atom.pred)? >= r {
            return Ok(None);
        }
    }
    Ok(Some(head))
}

/// Head points forced by `c` over the stage interpretation `s`.
pub fn delta(s: &SymbolicInterpretation, c: &ConstrainedClause, ord: &PrecedenceOrder) -> Result<SymbolicInterpretation> {
    let head = productive_head(c, ord)?
        .ok_or_else(|| Error::DeltaPrecondition(format!("{}: no positive literal strictly above the body", c.label())))?;
    let ys = &head.atom.args;
    let xs = Var::canon_tuple(ys.len());
    let body = body_formula(s, c)?;
    let keep: BTreeSet<Var> = ys.iter().cloned().collect();
    let projected = la::project(&keep, &body, s.theory);
    // σ maps each head variable to the canonical variable of its first position
    let mut sigma = BTreeMap::new();
    for (y, x) in ys.iter().zip(&xs) {
        sigma.entry(y.clone()).or_insert_with(|| x.clone());
    }
    let f = la::simplify(&Formula::and([projected.rename(&sigma), sharing(ys, &xs)?]), s.theory);
    let mut out = SymbolicInterpretation::bottom(s.theory);
    out.set(head.atom.pred.clone(), ys.len(), f);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductionRecord {
    pub predicate: Symbol,
    pub clause: ClauseId,
    pub delta_formula: Formula,
}

/// One step of the induction: the interpretation before `predicate` and
/// the `Δ` written for it.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub predicate: Symbol,
    pub before: SymbolicInterpretation,
    pub delta: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConstruction {
    pub model: SymbolicInterpretation,
    pub records: Vec<ProductionRecord>,
    pub stages: Vec<Stage>,
}

impl ModelConstruction {
    /// `S_{≺P}`.
    pub fn stage_before(&self, pred: &Symbol) -> Option<&SymbolicInterpretation> {
        self.stages.iter().find(|s| s.predicate == *pred).map(|s| &s.before)
    }
}

pub fn construct_model(n: &[ConstrainedClause], ord: &PrecedenceOrder, theory: Theory) -> Result<ModelConstruction> {
    let mut arities: BTreeMap<Symbol, usize> = BTreeMap::new();
    for c in n {
        if c.is_empty_fo() {
            if la::is_satisfiable(&Formula::conjunction_of(&c.constraint), theory).is_some() {
                return Err(Error::ContainsRefutation(c.label()));
            }
            continue;
        }
        for l in &c.literals {
            ord.rank(&l.atom.pred)?;
            arities.entry(l.atom.pred.clone()).or_insert(l.atom.args.len());
        }
    }
    let mut s = SymbolicInterpretation::bottom(theory);
    let mut records = Vec::new();
    let mut stages = Vec::new();
    for p in ord.symbols() {
        let before = s.clone();
        let mut parts = Vec::new();
        for c in n {
            let Some(head) = productive_head(c, ord)? else {
                continue;
            };
            if head.atom.pred != *p {
                continue;
            }
            if la::is_satisfiable(&body_formula(&before, c)?, theory).is_none() {
                continue;
            }
            let d = delta(&before, c, ord)?.get(p);
            if d.is_false() {
                continue;
            }
            records.push(ProductionRecord {
                predicate: p.clone(),
                clause: c.id,
                delta_formula: d.clone(),
            });
            parts.push(d);
        }
        let delta_p = la::simplify(&Formula::or(parts), theory);
        if let Some(&arity) = arities.get(p) {
            s.set(p.clone(), arity, delta_p.clone());
        }
        stages.push(Stage {
            predicate: p.clone(),
            before,
            delta: delta_p,
        });
    }
    Ok(ModelConstruction { model: s, records, stages })
}

/// Clauses whose contribution contains `point`.
pub fn producers_of(point: &GroundAtom, records: &[ProductionRecord], theory: Theory) -> Result<Vec<ClauseId>> {
    let beta = canonical_assignment(&point.args);
    let mut out = Vec::new();
    for r in records {
        if r.predicate == point.pred && la::eval_formula(&r.delta_formula, &beta, theory)? {
            out.push(r.clause);
        }
    }
    if out.is_empty() {
        return Err(Error::NotInModel(point.to_string()));
    }
    Ok(out)
}
