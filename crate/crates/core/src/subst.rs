//! Substitutions and most general unifiers over variable-only atoms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::clause::{ConstrainedClause, FoAtom, Literal};
use crate::error::{Error, Result};
use crate::term::{LaAtom, LinTerm, Rational, Var};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Binding {
    Var(Var),
    Num(Rational),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Var(v) => write!(f, "{v}"),
            Binding::Num(c) => write!(f, "{c}"),
        }
    }
}

/// Finite map from variables to variables or numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Binding>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn bind_var(&mut self, from: Var, to: Var) {
        if from != to {
            self.map.insert(from, Binding::Var(to));
        }
    }

    pub fn bind_num(&mut self, from: Var, to: Rational) {
        self.map.insert(from, Binding::Num(to));
    }

    pub fn get(&self, v: &Var) -> Option<&Binding> {
        self.map.get(v)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Binding)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Variable-to-variable part as a renaming map.
    pub fn var_map(&self) -> BTreeMap<Var, Var> {
        self.map
            .iter()
            .filter_map(|(k, b)| match b {
                Binding::Var(v) => Some((k.clone(), v.clone())),
                Binding::Num(_) => None,
            })
            .collect()
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|b| match b {
            Binding::Var(v) => !self.map.contains_key(v),
            Binding::Num(_) => true,
        })
    }

    pub fn apply_var(&self, v: &Var) -> Binding {
        self.map
            .get(v)
            .cloned()
            .unwrap_or_else(|| Binding::Var(v.clone()))
    }

    pub fn apply_term(&self, t: &LinTerm) -> LinTerm {
        let mut out = LinTerm::constant(t.constant_part().clone());
        for (v, c) in t.coeffs() {
            match self.apply_var(v) {
                Binding::Var(w) => out.add_var(c.clone(), w),
                Binding::Num(n) => out.add_constant(&(c * n)),
            }
        }
        out
    }

    pub fn apply_la_atom(&self, a: &LaAtom) -> LaAtom {
        LaAtom::from_zero_form(self.apply_term(a.term()), a.rel().clone())
    }

    /// Fails if an argument would become a number: first-order arguments
    /// must stay variables.
    pub fn apply_atom(&self, a: &FoAtom) -> Result<FoAtom> {
        let mut args = Vec::with_capacity(a.args.len());
        for v in &a.args {
            match self.apply_var(v) {
                Binding::Var(w) => args.push(w),
                Binding::Num(_) => {
                    return Err(Error::NonVariableArgument {
                        pred: a.pred.to_string(),
                        var: v.clone(),
                    })
                }
            }
        }
        Ok(FoAtom::new(a.pred.clone(), args))
    }

    pub fn apply_literal(&self, l: &Literal) -> Result<Literal> {
        Ok(Literal {
            positive: l.positive,
            atom: self.apply_atom(&l.atom)?,
        })
    }

    pub fn apply_clause(&self, c: &ConstrainedClause) -> Result<ConstrainedClause> {
        let literals = c
            .literals
            .iter()
            .map(|l| self.apply_literal(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstrainedClause {
            id: c.id,
            name: c.name.clone(),
            constraint: c.constraint.iter().map(|a| self.apply_la_atom(a)).collect(),
            literals,
            provenance: c.provenance.clone(),
        })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, b)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} ↦ {b}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of two variable-only atoms.
///
/// Class representatives prefer variables of `a2` (earliest occurrence
/// first), then variables of `a1`, so `Q(x,x)` against `Q(u,v)` yields
/// `{x ↦ u, v ↦ u}`. The result is idempotent and binds only variables
/// occurring in the two atoms.
pub fn unify_atoms(a1: &FoAtom, a2: &FoAtom) -> Option<Substitution> {
    if a1.pred != a2.pred || a1.args.len() != a2.args.len() {
        return None;
    }
    // preference key: lower is a better representative
    let mut pref: HashMap<&Var, (u8, usize)> = HashMap::new();
    for (i, v) in a2.args.iter().enumerate() {
        pref.entry(v).or_insert((0, i));
    }
    for (i, v) in a1.args.iter().enumerate() {
        pref.entry(v).or_insert((1, i));
    }
    let mut parent: HashMap<&Var, &Var> = HashMap::new();
    fn find<'a>(parent: &HashMap<&'a Var, &'a Var>, mut v: &'a Var) -> &'a Var {
        while let Some(p) = parent.get(v) {
            v = p;
        }
        v
    }
    for (x, y) in a1.args.iter().zip(&a2.args) {
        let rx = find(&parent, x);
        let ry = find(&parent, y);
        if rx == ry {
            continue;
        }
        if pref[rx] <= pref[ry] {
            parent.insert(ry, rx);
        } else {
            parent.insert(rx, ry);
        }
    }
    let mut s = Substitution::identity();
    for v in a1.args.iter().chain(&a2.args) {
        let r = find(&parent, v);
        if r != v {
            s.bind_var(v.clone(), r.clone());
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{ClauseId, Symbol};
    use crate::term::{rat, Rel};

    fn v(n: &str) -> Var {
        Var::named(n)
    }
    fn atom(p: &str, args: &[&str]) -> FoAtom {
        FoAtom::new(Symbol::new(p), args.iter().map(|a| v(a)).collect())
    }

    #[test]
    fn unify_examples() {
        let s = unify_atoms(&atom("P", &["x"]), &atom("P", &["y"])).unwrap();
        assert_eq!(s.apply_var(&v("x")), Binding::Var(v("y")));
        assert_eq!(s.len(), 1);

        let s = unify_atoms(&atom("Q", &["x", "x"]), &atom("Q", &["u", "v"])).unwrap();
        assert_eq!(s.apply_var(&v("x")), Binding::Var(v("u")));
        assert_eq!(s.apply_var(&v("v")), Binding::Var(v("u")));
        assert_eq!(s.len(), 2);
        assert!(s.is_idempotent());

        assert!(unify_atoms(&atom("P", &["x"]), &atom("Q", &["y"])).is_none());
    }

    #[test]
    fn substitution_on_clauses() {
        let x_ge_3 = LaAtom::new(&LinTerm::var(v("x")), Rel::Ge, &LinTerm::constant(rat(3)));
        let c = ConstrainedClause::new(
            ClauseId(1),
            vec![x_ge_3],
            vec![Literal::pos(atom("P", &["x"]))],
        )
        .unwrap();
        let mut s = Substitution::identity();
        s.bind_var(v("x"), v("y"));
        let d = s.apply_clause(&c).unwrap();
        let y_ge_3 = LaAtom::new(&LinTerm::var(v("y")), Rel::Ge, &LinTerm::constant(rat(3)));
        assert_eq!(d.constraint, vec![y_ge_3]);
        assert_eq!(d.literals, vec![Literal::pos(atom("P", &["y"]))]);

        assert_eq!(Substitution::identity().apply_clause(&c).unwrap(), c);

        let mut s = Substitution::identity();
        s.bind_num(v("x"), rat(0));
        let pxy = atom("P", &["x", "y"]);
        assert!(matches!(
            s.apply_atom(&pxy),
            Err(Error::NonVariableArgument { .. })
        ));
        // numeric instantiation is fine inside the constraint
        let ground = s.apply_la_atom(&c.constraint[0]);
        assert_eq!(ground.ground_value(), Some(false));
    }
}
