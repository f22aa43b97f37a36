//! Exact linear arithmetic terms and atoms.
//!
//! Atoms are stored in a canonical `term REL 0` form so that syntactically
//! different spellings of the same constraint compare equal. `>=` and `>` are
//! folded into `<=`/`<` by negating the term, and the term is scaled to
//! primitive integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Background theory of a problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theory {
    Lra,
    Lqa,
    Lia,
}

impl Theory {
    pub fn is_integer(self) -> bool {
        self == Theory::Lia
    }

    pub fn name(self) -> &'static str {
        match self {
            Theory::Lra => "lra",
            Theory::Lqa => "lqa",
            Theory::Lia => "lia",
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lra" => Ok(Theory::Lra),
            "lqa" => Ok(Theory::Lqa),
            "lia" => Ok(Theory::Lia),
            other => Err(Error::UnknownTheory(other.to_string())),
        }
    }
}

/// An arithmetic variable.
///
/// `Canon(i)` is the i-th variable of the global sequence `x1, x2, ...` used
/// by symbolic interpretations; it never collides with a clause variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Canon(u32),
    Named(Arc<str>),
}

impl Var {
    pub fn named(name: &str) -> Var {
        Var::Named(Arc::from(name))
    }

    /// 1-based canonical variable.
    pub fn canon(index: u32) -> Var {
        debug_assert!(index >= 1);
        Var::Canon(index)
    }

    /// `x1 .. x_arity`.
    pub fn canon_tuple(arity: usize) -> Vec<Var> {
        (1..=arity as u32).map(Var::Canon).collect()
    }

    pub fn canon_index(&self) -> Option<u32> {
        match self {
            Var::Canon(i) => Some(*i),
            Var::Named(_) => None,
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Canon(i) => write!(f, "x{i}"),
            Var::Named(s) => f.write_str(s),
        }
    }
}

/// Variable assignment with exact values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<Var, Rational>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Rational> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, value: Rational) {
        self.0.insert(v, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.0.contains_key(v)
    }

    pub fn remove(&mut self, v: &Var) -> Option<Rational> {
        self.0.remove(v)
    }

    /// Restrict to the given variables, assigning 0 to missing ones.
    pub fn restricted_to<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Assignment {
        vars.into_iter()
            .map(|v| (v.clone(), self.0.get(v).cloned().unwrap_or_else(Rational::zero)))
            .collect()
    }
}

impl FromIterator<(Var, Rational)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (Var, Rational)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.0 {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{v} = {c}")?;
        }
        if first {
            f.write_str("(empty)")?;
        }
        Ok(())
    }
}

/// Linear term `sum(c_i * v_i) + constant`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinTerm {
    coeffs: BTreeMap<Var, Rational>,
    constant: Rational,
}

impl LinTerm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        Self::scaled_var(Rational::one(), v)
    }

    pub fn scaled_var(c: Rational, v: Var) -> Self {
        let mut t = Self::zero();
        t.add_var(c, v);
        t
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, v: &Var) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Var, &Rational)> {
        self.coeffs.iter()
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    /// The term is exactly one variable with coefficient one.
    pub fn as_var(&self) -> Option<&Var> {
        if self.constant.is_zero() && self.coeffs.len() == 1 {
            let (v, c) = self.coeffs.iter().next().unwrap();
            if c.is_one() {
                return Some(v);
            }
        }
        None
    }

    pub fn add_var(&mut self, c: Rational, v: Var) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(v) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn without_constant(&self) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.clone(),
            constant: Rational::zero(),
        }
    }

    pub fn without_var(&self, v: &Var) -> LinTerm {
        let mut t = self.clone();
        t.coeffs.remove(v);
        t
    }

    pub fn scale(&self, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn plus(&self, other: &LinTerm) -> LinTerm {
        let mut t = self.clone();
        for (v, c) in &other.coeffs {
            t.add_var(c.clone(), v.clone());
        }
        t.constant += &other.constant;
        t
    }

    pub fn minus(&self, other: &LinTerm) -> LinTerm {
        self.plus(&other.negated())
    }

    pub fn negated(&self) -> LinTerm {
        self.scale(&-Rational::one())
    }

    /// Replace `v` by `replacement`.
    pub fn substitute(&self, v: &Var, replacement: &LinTerm) -> LinTerm {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => self.without_var(v).plus(&replacement.scale(c)),
        }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> LinTerm {
        let mut t = LinTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            let w = map.get(v).cloned().unwrap_or_else(|| v.clone());
            t.add_var(c.clone(), w);
        }
        t
    }

    /// Evaluate; `Err(v)` names the first unassigned variable.
    pub fn eval(&self, beta: &Assignment) -> Result<Rational, Var> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            match beta.get(v) {
                Some(x) => acc += c * x,
                None => return Err(v.clone()),
            }
        }
        Ok(acc)
    }

    /// Evaluate with the assigned variables only, leaving the rest symbolic.
    pub fn partial_eval(&self, beta: &Assignment) -> LinTerm {
        let mut t = LinTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match beta.get(v) {
                Some(x) => t.constant += c * x,
                None => t.add_var(c.clone(), v.clone()),
            }
        }
        t
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.values().all(is_integral) && is_integral(&self.constant)
    }

    /// Positive factor that turns every coefficient and the constant into
    /// coprime integers. Returns 1 for the zero term.
    fn primitive_factor(&self) -> Rational {
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            if c.is_zero() {
                continue;
            }
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        Rational::new(den_lcm, num_gcd)
    }

    pub(crate) fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if abs.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{abs}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if !self.constant.is_zero() {
            let neg = self.constant.is_negative();
            write!(f, " {} {}", if neg { "-" } else { "+" }, self.constant.abs())?;
        }
        Ok(())
    }
}

/// Arithmetic relation. `Divides`/`NotDivides` carry a positive modulus and
/// only arise from integer quantifier elimination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
    Ne,
    Ge,
    Gt,
    Divides(BigInt),
    NotDivides(BigInt),
}

impl Rel {
    pub fn symbol(&self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
            Rel::Ne => "distinct",
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Divides(_) => "div",
            Rel::NotDivides(_) => "not div",
        }
    }

    /// The relation obtained by swapping both sides.
    pub fn flipped(&self) -> Rel {
        match self {
            Rel::Le => Rel::Ge,
            Rel::Lt => Rel::Gt,
            Rel::Ge => Rel::Le,
            Rel::Gt => Rel::Lt,
            other => other.clone(),
        }
    }

    pub fn holds(&self, value: &Rational) -> bool {
        match self {
            Rel::Le => !value.is_positive(),
            Rel::Lt => value.is_negative(),
            Rel::Eq => value.is_zero(),
            Rel::Ne => !value.is_zero(),
            Rel::Ge => !value.is_negative(),
            Rel::Gt => value.is_positive(),
            Rel::Divides(m) => is_integral(value) && value.numer().mod_floor(m).is_zero(),
            Rel::NotDivides(m) => !(is_integral(value) && value.numer().mod_floor(m).is_zero()),
        }
    }
}

/// Linear arithmetic atom in canonical form `term REL 0`
/// (or `m | term` for divisibility).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaAtom {
    term: LinTerm,
    rel: Rel,
}

impl LaAtom {
    /// `lhs REL rhs`, canonicalized.
    pub fn new(lhs: &LinTerm, rel: Rel, rhs: &LinTerm) -> LaAtom {
        match rel {
            Rel::Divides(m) => LaAtom::divides(m, lhs.minus(rhs)),
            Rel::NotDivides(m) => LaAtom::divides(m, lhs.minus(rhs)).negate(),
            rel => LaAtom::from_zero_form(lhs.minus(rhs), rel),
        }
    }

    /// `term REL 0`, canonicalized.
    pub fn from_zero_form(term: LinTerm, rel: Rel) -> LaAtom {
        let (term, rel) = match rel {
            Rel::Ge => (term.negated(), Rel::Le),
            Rel::Gt => (term.negated(), Rel::Lt),
            Rel::Divides(m) => return LaAtom::divides(m, term),
            Rel::NotDivides(m) => return LaAtom::divides(m, term).negate(),
            rel => (term, rel),
        };
        let mut term = term.scale(&term.primitive_factor());
        if matches!(rel, Rel::Eq | Rel::Ne)
            && term.leading_coeff().is_some_and(|c| c.is_negative())
        {
            term = term.negated();
        }
        if term.is_constant() {
            // ground atoms keep only the sign of the constant
            let c = term.constant.clone();
            term = LinTerm::constant(if c.is_zero() {
                c
            } else if c.is_positive() {
                Rational::one()
            } else {
                -Rational::one()
            });
        }
        LaAtom { term, rel }
    }

    /// `m | term` with integer coefficients.
    pub fn divides(m: BigInt, term: LinTerm) -> LaAtom {
        let m = m.abs();
        assert!(!m.is_zero(), "divisibility by zero");
        assert!(term.has_integer_coeffs(), "divisibility atom needs integer coefficients");
        let mut reduced = LinTerm::zero();
        for (v, c) in term.coeffs() {
            let r = c.numer().mod_floor(&m);
            reduced.add_var(Rational::from_integer(r), v.clone());
        }
        reduced.constant = Rational::from_integer(term.constant.numer().mod_floor(&m));
        let mut g = m.clone();
        for c in reduced.coeffs.values().chain(std::iter::once(&reduced.constant)) {
            g = g.gcd(c.numer());
        }
        let (m, reduced) = if g.is_one() || g.is_zero() {
            (m, reduced)
        } else {
            let k = Rational::new(BigInt::one(), g.clone());
            (&m / &g, reduced.scale(&k))
        };
        if m.is_one() {
            return LaAtom {
                term: LinTerm::zero(),
                rel: Rel::Divides(BigInt::one()),
            };
        }
        LaAtom {
            term: reduced,
            rel: Rel::Divides(m),
        }
    }

    pub fn term(&self) -> &LinTerm {
        &self.term
    }

    pub fn rel(&self) -> &Rel {
        &self.rel
    }

    pub fn is_divisibility(&self) -> bool {
        matches!(self.rel, Rel::Divides(_) | Rel::NotDivides(_))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.term.vars()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term.mentions(v)
    }

    /// Complement, staying within the atom language.
    pub fn negate(&self) -> LaAtom {
        match &self.rel {
            Rel::Le => LaAtom::from_zero_form(self.term.negated(), Rel::Lt),
            Rel::Lt => LaAtom::from_zero_form(self.term.negated(), Rel::Le),
            Rel::Eq => LaAtom::from_zero_form(self.term.clone(), Rel::Ne),
            Rel::Ne => LaAtom::from_zero_form(self.term.clone(), Rel::Eq),
            Rel::Ge => LaAtom::from_zero_form(self.term.clone(), Rel::Lt),
            Rel::Gt => LaAtom::from_zero_form(self.term.clone(), Rel::Le),
            Rel::Divides(m) => LaAtom {
                term: self.term.clone(),
                rel: Rel::NotDivides(m.clone()),
            },
            Rel::NotDivides(m) => LaAtom {
                term: self.term.clone(),
                rel: Rel::Divides(m.clone()),
            },
        }
    }

    /// Truth value if the atom has no variables.
    pub fn ground_value(&self) -> Option<bool> {
        if self.term.is_constant() {
            Some(self.rel.holds(&self.term.constant))
        } else {
            None
        }
    }

    pub fn eval(&self, beta: &Assignment) -> Result<bool, Var> {
        let v = self.term.eval(beta)?;
        Ok(self.rel.holds(&v))
    }

    pub fn substitute(&self, v: &Var, replacement: &LinTerm) -> LaAtom {
        if !self.term.mentions(v) {
            return self.clone();
        }
        LaAtom::from_zero_form(self.term.substitute(v, replacement), self.rel.clone())
    }

    pub fn partial_eval(&self, beta: &Assignment) -> LaAtom {
        LaAtom::from_zero_form(self.term.partial_eval(beta), self.rel.clone())
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> LaAtom {
        LaAtom::from_zero_form(self.term.rename(map), self.rel.clone())
    }

    /// Two-sided presentation used by printers: variables with positive
    /// coefficients on the left, everything else moved right.
    pub fn sides(&self) -> (LinTerm, Rel, LinTerm) {
        if self.is_divisibility() {
            return (self.term.clone(), self.rel.clone(), LinTerm::zero());
        }
        let mut pos = LinTerm::zero();
        let mut neg = LinTerm::zero();
        for (v, c) in self.term.coeffs() {
            if c.is_positive() {
                pos.add_var(c.clone(), v.clone());
            } else {
                neg.add_var(-c.clone(), v.clone());
            }
        }
        let c = self.term.constant.clone();
        if pos.is_constant() && !neg.is_constant() {
            // -neg + c REL 0  <=>  neg REL' c
            (neg, self.rel.flipped(), LinTerm::constant(c))
        } else {
            // pos - neg + c REL 0  <=>  pos REL neg - c
            let mut rhs = neg;
            rhs.add_constant(&-c);
            (pos, self.rel.clone(), rhs)
        }
    }
}

impl fmt::Display for LaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rel {
            Rel::Divides(m) => write!(f, "{m} | {}", self.term),
            Rel::NotDivides(m) => write!(f, "{m} ∤ {}", self.term),
            _ => {
                let (l, r, rhs) = self.sides();
                let sym = match r {
                    Rel::Le => "≤",
                    Rel::Lt => "<",
                    Rel::Eq => "=",
                    Rel::Ne => "≠",
                    Rel::Ge => "≥",
                    Rel::Gt => ">",
                    _ => unreachable!(),
                };
                write!(f, "{l} {sym} {rhs}")
            }
        }
    }
}

pub(crate) fn vars_of_atoms<'a>(atoms: impl IntoIterator<Item = &'a LaAtom>) -> BTreeSet<Var> {
    atoms
        .into_iter()
        .flat_map(|a| a.vars().cloned().collect::<Vec<_>>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var::named("x")
    }
    fn y() -> Var {
        Var::named("y")
    }

    #[test]
    fn atoms_are_canonical() {
        let a = LaAtom::new(&LinTerm::var(x()), Rel::Ge, &LinTerm::constant(rat(3)));
        let b = LaAtom::new(
            &LinTerm::constant(rat(6)),
            Rel::Le,
            &LinTerm::scaled_var(rat(2), x()),
        );
        assert_eq!(a, b);
        assert_eq!(a.rel(), &Rel::Le);
        let e1 = LaAtom::new(&LinTerm::var(x()), Rel::Eq, &LinTerm::var(y()));
        let e2 = LaAtom::new(&LinTerm::var(y()), Rel::Eq, &LinTerm::var(x()));
        assert_eq!(e1, e2);
    }

    #[test]
    fn fractional_coefficients_scale_to_integers() {
        let t = LinTerm::scaled_var(ratio(1, 2), x()).plus(&LinTerm::constant(ratio(1, 3)));
        let a = LaAtom::from_zero_form(t, Rel::Le);
        assert_eq!(a.term().coeff(&x()), rat(3));
        assert_eq!(a.term().constant_part(), &rat(2));
    }

    #[test]
    fn negation_stays_in_language() {
        // not (x >= 42)  is  x < 42
        let a = LaAtom::new(&LinTerm::var(x()), Rel::Ge, &LinTerm::constant(rat(42)));
        let n = a.negate();
        let expected = LaAtom::new(&LinTerm::var(x()), Rel::Lt, &LinTerm::constant(rat(42)));
        assert_eq!(n, expected);
        assert_eq!(n.negate(), a);
    }

    #[test]
    fn sides_presentation() {
        let a = LaAtom::new(&LinTerm::var(x()), Rel::Ge, &LinTerm::constant(rat(1)));
        let (l, r, rhs) = a.sides();
        assert_eq!(l, LinTerm::var(x()));
        assert_eq!(r, Rel::Ge);
        assert_eq!(rhs, LinTerm::constant(rat(1)));
        assert_eq!(a.to_string(), "x ≥ 1");
    }

    #[test]
    fn divisibility_reduction() {
        let t = LinTerm::scaled_var(rat(7), x()).plus(&LinTerm::constant(rat(4)));
        let a = LaAtom::divides(BigInt::from(3), t);
        // 7x + 4 = x + 1 (mod 3)
        assert_eq!(a.term().coeff(&x()), rat(1));
        assert_eq!(a.term().constant_part(), &rat(1));
        let b = LaAtom::divides(BigInt::from(4), LinTerm::scaled_var(rat(2), x()));
        assert_eq!(b.rel(), &Rel::Divides(BigInt::from(2)));
        let beta: Assignment = [(x(), rat(4))].into_iter().collect();
        assert_eq!(a.eval(&beta), Ok(false));
        let beta: Assignment = [(x(), rat(2))].into_iter().collect();
        assert_eq!(a.eval(&beta), Ok(true));
    }
}
