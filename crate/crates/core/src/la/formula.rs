use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::term::{LaAtom, LinTerm, Rational, Rel, Var};

/// Boolean combination of linear arithmetic atoms.
///
/// `Exists` only appears transiently; every public output of the `la`
/// module is quantifier-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(LaAtom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(a: LaAtom) -> Formula {
        match a.ground_value() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(a),
        }
    }

    /// `lhs REL rhs`.
    pub fn rel(lhs: &LinTerm, rel: Rel, rhs: &LinTerm) -> Formula {
        Formula::atom(LaAtom::new(lhs, rel, rhs))
    }

    /// Conjunction with constant folding and flattening of nested `And`s.
    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(xs) => out.extend(xs),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with constant folding and flattening of nested `Or`s.
    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(xs) => out.extend(xs),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => Formula::Atom(a.negate()),
            Formula::Not(g) => *g,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        if body.free_vars().contains(&v) {
            Formula::Exists(v, Box::new(body))
        } else {
            body
        }
    }

    pub fn conjunction_of<'a>(atoms: impl IntoIterator<Item = &'a LaAtom>) -> Formula {
        Formula::and(atoms.into_iter().cloned().map(Formula::atom))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.extend(a.vars().cloned()),
            Formula::Not(f) => f.collect_free_vars(out),
            Formula::And(xs) | Formula::Or(xs) => {
                for x in xs {
                    x.collect_free_vars(out);
                }
            }
            Formula::Exists(v, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free_vars(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    pub fn has_quantifiers(&self) -> bool {
        match self {
            Formula::Exists(..) => true,
            Formula::Not(f) => f.has_quantifiers(),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().any(Formula::has_quantifiers),
            _ => false,
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Exists(_, f) => f.atom_count(),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().map(Formula::atom_count).sum(),
        }
    }

    pub fn atoms(&self) -> Vec<&LaAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a LaAtom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) | Formula::Exists(_, f) => f.collect_atoms(out),
            Formula::And(xs) | Formula::Or(xs) => {
                for x in xs {
                    x.collect_atoms(out);
                }
            }
        }
    }

    /// Rebuild the formula with every atom replaced by `f(atom)`.
    /// Bound variables are not treated specially.
    pub fn map_atoms(&self, f: &mut impl FnMut(&LaAtom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(xs) => Formula::and(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            Formula::Or(xs) => Formula::or(xs.iter().map(|x| x.map_atoms(f)).collect::<Vec<_>>()),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_atoms(f)),
        }
    }

    /// Rename free variables. The map must not capture bound variables.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::Exists(v, g) => {
                let mut inner = map.clone();
                inner.remove(v);
                Formula::exists(v.clone(), g.rename(&inner))
            }
            Formula::Not(g) => Formula::not(g.rename(map)),
            Formula::And(xs) => Formula::and(xs.iter().map(|x| x.rename(map)).collect::<Vec<_>>()),
            Formula::Or(xs) => Formula::or(xs.iter().map(|x| x.rename(map)).collect::<Vec<_>>()),
            Formula::Atom(a) => Formula::atom(a.rename(map)),
            Formula::True | Formula::False => self.clone(),
        }
    }

    /// Replace the free variable `v` by a term.
    pub fn substitute(&self, v: &Var, t: &LinTerm) -> Formula {
        match self {
            Formula::Exists(w, _) if w == v => self.clone(),
            Formula::Exists(w, g) => Formula::exists(w.clone(), g.substitute(v, t)),
            Formula::Not(g) => Formula::not(g.substitute(v, t)),
            Formula::And(xs) => Formula::and(xs.iter().map(|x| x.substitute(v, t)).collect::<Vec<_>>()),
            Formula::Or(xs) => Formula::or(xs.iter().map(|x| x.substitute(v, t)).collect::<Vec<_>>()),
            Formula::Atom(a) => Formula::atom(a.substitute(v, t)),
            Formula::True | Formula::False => self.clone(),
        }
    }

    /// Negation normal form: negations pushed into the atoms. Quantifiers
    /// under a negation are kept as `Not(Exists ..)`.
    pub fn nnf(&self) -> Formula {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Atom(a), true) => Formula::atom(a.clone()),
            (Formula::Atom(a), false) => Formula::atom(a.negate()),
            (Formula::Not(g), p) => g.nnf_pol(!p),
            (Formula::And(xs), true) | (Formula::Or(xs), false) => {
                Formula::and(xs.iter().map(|x| x.nnf_pol(positive)).collect::<Vec<_>>())
            }
            (Formula::Or(xs), true) | (Formula::And(xs), false) => {
                Formula::or(xs.iter().map(|x| x.nnf_pol(positive)).collect::<Vec<_>>())
            }
            (Formula::Exists(v, g), true) => Formula::exists(v.clone(), g.nnf_pol(true)),
            (Formula::Exists(v, g), false) => {
                Formula::Not(Box::new(Formula::exists(v.clone(), g.nnf_pol(true))))
            }
        }
    }
}

/// Rewrite an atom into the integer normal form used by Cooper
/// elimination: `<` becomes `≤ -1`, bounds are tightened by the gcd of the
/// variable coefficients, unsolvable equalities become false. With
/// `split_ne`, `≠` becomes a disjunction of two strict bounds.
pub(crate) fn lia_normalize_atom(a: &LaAtom, split_ne: bool) -> Formula {
    if let Some(b) = a.ground_value() {
        return if b { Formula::True } else { Formula::False };
    }
    let t = a.term();
    let form = t.without_constant();
    let c = t.constant_part().to_integer();
    let mut g = num_bigint::BigInt::zero();
    for (_, k) in form.coeffs() {
        g = g.gcd(&k.to_integer());
    }
    let scale = |term: &LinTerm| term.scale(&Rational::new(One::one(), g.clone()));
    match a.rel() {
        Rel::Le | Rel::Lt => {
            let c = if *a.rel() == Rel::Lt { c + 1 } else { c };
            // form + c <= 0  <=>  form/g + ceil(c/g) <= 0
            let k = Integer::div_ceil(&c, &g);
            let mut nt = scale(&form);
            nt.add_constant(&Rational::from_integer(k));
            Formula::atom(LaAtom::from_zero_form(nt, Rel::Le))
        }
        Rel::Eq => {
            if c.is_multiple_of(&g) {
                Formula::atom(a.clone())
            } else {
                Formula::False
            }
        }
        Rel::Ne => {
            if !c.is_multiple_of(&g) {
                Formula::True
            } else if split_ne {
                Formula::or([
                    lia_normalize_atom(&LaAtom::from_zero_form(t.clone(), Rel::Lt), false),
                    lia_normalize_atom(&LaAtom::from_zero_form(t.negated(), Rel::Lt), false),
                ])
            } else {
                Formula::atom(a.clone())
            }
        }
        _ => Formula::atom(a.clone()),
    }
}

/// Rational counterpart: only splits `≠` when asked.
pub(crate) fn lra_normalize_atom(a: &LaAtom, split_ne: bool) -> Formula {
    match a.rel() {
        Rel::Ne if split_ne => Formula::or([
            Formula::atom(LaAtom::from_zero_form(a.term().clone(), Rel::Lt)),
            Formula::atom(LaAtom::from_zero_form(a.term().negated(), Rel::Lt)),
        ]),
        _ => Formula::atom(a.clone()),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("⊤"),
            Formula::False => f.write_str("⊥"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "¬({g})"),
            Formula::And(xs) | Formula::Or(xs) => {
                let sep = if matches!(self, Formula::And(_)) { " ∧ " } else { " ∨ " };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if matches!(x, Formula::And(_) | Formula::Or(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Formula::Exists(v, g) => write!(f, "∃{v}. ({g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::rat;

    fn x() -> Var {
        Var::named("x")
    }

    #[test]
    fn constructors_fold_constants() {
        let a = Formula::rel(&LinTerm::var(x()), Rel::Le, &LinTerm::constant(rat(1)));
        assert_eq!(Formula::and([a.clone(), Formula::True]), a);
        assert_eq!(Formula::or([Formula::False, a.clone()]), a);
        assert_eq!(Formula::and([a.clone(), Formula::False]), Formula::False);
        assert_eq!(Formula::not(Formula::not(a.clone())), a);
    }

    #[test]
    fn lia_normalization() {
        // 2x < 3  =>  2x <= 2  =>  x <= 1
        let a = LaAtom::new(&LinTerm::scaled_var(rat(2), x()), Rel::Lt, &LinTerm::constant(rat(3)));
        let n = lia_normalize_atom(&a, true);
        let expected = Formula::rel(&LinTerm::var(x()), Rel::Le, &LinTerm::constant(rat(1)));
        assert_eq!(n, expected);
        // 2x = 3 has no integer solution
        let e = LaAtom::new(&LinTerm::scaled_var(rat(2), x()), Rel::Eq, &LinTerm::constant(rat(3)));
        assert_eq!(lia_normalize_atom(&e, true), Formula::False);
        assert_eq!(lia_normalize_atom(&e.negate(), true), Formula::True);
    }
}
