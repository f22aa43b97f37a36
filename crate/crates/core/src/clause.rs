//! First-order atoms, literals and constrained Horn clauses `Λ ∥ C`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::subst::Substitution;
use crate::term::{LaAtom, Var};

/// Predicate symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Declared predicates with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Symbol, usize>,
    declared: Vec<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the symbol was already declared.
    pub fn declare(&mut self, pred: Symbol, arity: usize) -> bool {
        if self.arities.contains_key(&pred) {
            return false;
        }
        self.arities.insert(pred.clone(), arity);
        self.declared.push(pred);
        true
    }

    pub fn arity(&self, pred: &Symbol) -> Option<usize> {
        self.arities.get(pred).copied()
    }

    /// Symbols in declaration order.
    pub fn symbols(&self) -> &[Symbol] {
        &self.declared
    }

    pub fn contains(&self, pred: &Symbol) -> bool {
        self.arities.contains_key(pred)
    }

    /// Signature inferred from the literals of a clause set, in order of
    /// first occurrence.
    pub fn from_clauses<'a>(clauses: impl IntoIterator<Item = &'a ConstrainedClause>) -> Result<Self> {
        let mut sig = Signature::new();
        for c in clauses {
            for l in &c.literals {
                match sig.arity(&l.atom.pred) {
                    None => {
                        sig.declare(l.atom.pred.clone(), l.atom.args.len());
                    }
                    Some(n) if n != l.atom.args.len() => {
                        return Err(Error::ArityMismatch {
                            pred: l.atom.pred.to_string(),
                            expected: n,
                            found: l.atom.args.len(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(sig)
    }

    pub fn check_atom(&self, atom: &FoAtom) -> Result<()> {
        match self.arity(&atom.pred) {
            None => Err(Error::UndeclaredPredicate(atom.pred.to_string())),
            Some(n) if n != atom.args.len() => Err(Error::ArityMismatch {
                pred: atom.pred.to_string(),
                expected: n,
                found: atom.args.len(),
            }),
            Some(_) => Ok(()),
        }
    }
}

/// Abstracted first-order atom: every argument is a variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FoAtom {
    pub pred: Symbol,
    pub args: Vec<Var>,
}

impl FoAtom {
    pub fn new(pred: Symbol, args: Vec<Var>) -> Self {
        FoAtom { pred, args }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> FoAtom {
        FoAtom {
            pred: self.pred.clone(),
            args: self
                .args
                .iter()
                .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for FoAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: FoAtom,
}

impl Literal {
    pub fn pos(atom: FoAtom) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: FoAtom) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }

    pub fn pred(&self) -> &Symbol {
        &self.atom.pred
    }

    pub fn complement(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub u32);

impl ClauseId {
    /// Placeholder for conclusions not yet registered with a clause store.
    pub const UNASSIGNED: ClauseId = ClauseId(0);
}

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Input,
    /// Resolution of literal `left_literal` of `left` against literal
    /// `right_literal` of `right` (indices into the premises' first-order parts).
    Resolvent {
        left: ClauseId,
        right: ClauseId,
        left_literal: usize,
        right_literal: usize,
        unifier: Substitution,
    },
}

/// Constrained Horn clause `Λ ∥ C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedClause {
    pub id: ClauseId,
    pub name: Option<Arc<str>>,
    pub constraint: Vec<LaAtom>,
    pub literals: Vec<Literal>,
    pub provenance: Provenance,
}

impl ConstrainedClause {
    pub fn new(id: ClauseId, constraint: Vec<LaAtom>, literals: Vec<Literal>) -> Result<Self> {
        let c = ConstrainedClause {
            id,
            name: None,
            constraint,
            literals,
            provenance: Provenance::Input,
        };
        c.check_horn()?;
        Ok(c)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(Arc::from(name));
        self
    }

    pub fn with_id(mut self, id: ClauseId) -> Self {
        self.id = id;
        self
    }

    pub fn check_horn(&self) -> Result<()> {
        if self.literals.iter().filter(|l| l.positive).count() > 1 {
            return Err(Error::NotHorn(self.to_string()));
        }
        Ok(())
    }

    /// Display label: the user-given name or the numeric id.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.to_string(),
            None => self.id.to_string(),
        }
    }

    pub fn positive_literal(&self) -> Option<(usize, &Literal)> {
        self.literals.iter().enumerate().find(|(_, l)| l.positive)
    }

    pub fn negative_literals(&self) -> impl Iterator<Item = (usize, &Literal)> {
        self.literals.iter().enumerate().filter(|(_, l)| !l.positive)
    }

    pub fn is_empty_fo(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn fo_vars(&self) -> BTreeSet<Var> {
        self.literals
            .iter()
            .flat_map(|l| l.atom.args.iter().cloned())
            .collect()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut vs = self.fo_vars();
        for a in &self.constraint {
            vs.extend(a.vars().cloned());
        }
        vs
    }

    /// Number of arithmetic atoms plus first-order literals.
    pub fn atom_count(&self) -> usize {
        self.constraint.len() + self.literals.len()
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> ConstrainedClause {
        ConstrainedClause {
            id: self.id,
            name: self.name.clone(),
            constraint: self.constraint.iter().map(|a| a.rename(map)).collect(),
            literals: self
                .literals
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: l.atom.rename(map),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Complementary literals with identical atoms.
    pub fn has_complementary_literals(&self) -> bool {
        self.literals.iter().any(|l| {
            l.positive
                && self
                    .literals
                    .iter()
                    .any(|k| !k.positive && k.atom == l.atom)
        })
    }
}

impl fmt::Display for ConstrainedClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.constraint.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.constraint.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("∥ ")?;
        if self.literals.is_empty() {
            return f.write_str("⊥");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Ground first-order atom with exact arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: Symbol,
    pub args: Vec<crate::term::Rational>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub positive: bool,
    pub atom: GroundAtom,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str, args: &[&str]) -> FoAtom {
        FoAtom::new(Symbol::new(p), args.iter().map(|a| Var::named(a)).collect())
    }

    #[test]
    fn non_horn_rejected() {
        let lits = vec![Literal::pos(atom("P", &["x"])), Literal::pos(atom("Q", &["x"]))];
        assert!(matches!(
            ConstrainedClause::new(ClauseId(1), vec![], lits),
            Err(Error::NotHorn(_))
        ));
    }

    #[test]
    fn complementary_literals_detected() {
        let lits = vec![Literal::neg(atom("P", &["x"])), Literal::pos(atom("P", &["x"]))];
        let c = ConstrainedClause::new(ClauseId(1), vec![], lits).unwrap();
        assert!(c.has_complementary_literals());
        let lits = vec![Literal::neg(atom("P", &["y"])), Literal::pos(atom("P", &["x"]))];
        let c = ConstrainedClause::new(ClauseId(1), vec![], lits).unwrap();
        assert!(!c.has_complementary_literals());
    }

    #[test]
    fn signature_from_clauses_checks_arity() {
        let c1 = ConstrainedClause::new(ClauseId(1), vec![], vec![Literal::pos(atom("P", &["x"]))]).unwrap();
        let c2 = ConstrainedClause::new(ClauseId(2), vec![], vec![Literal::pos(atom("P", &["x", "y"]))]).unwrap();
        assert!(Signature::from_clauses([&c1]).is_ok());
        assert!(matches!(
            Signature::from_clauses([&c1, &c2]),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
