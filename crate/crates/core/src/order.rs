//! Predicate precedence and the induced literal order.
//!
//! Literals are ordered by `(rank(P), polarity)` with `P(..) ≺ ¬P(..) ≺ Q(..)`
//! whenever `P ≺ Q`, independent of the arguments. Literals sharing predicate
//! and polarity but differing in their arguments are incomparable at the
//! non-ground level; ground literals are further ordered lexicographically by
//! [`universe_cmp`].

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Signed;

use crate::clause::{ConstrainedClause, GroundLiteral, Literal, Symbol};
use crate::error::{Error, Result};
use crate::term::Rational;

/// Strict total order on predicate symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecedenceOrder {
    order: Vec<Symbol>,
    rank: HashMap<Symbol, usize>,
}

impl PrecedenceOrder {
    /// Symbols listed from smallest to largest.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut rank = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if rank.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidPrecedence(format!("`{s}` listed twice")));
            }
        }
        Ok(PrecedenceOrder {
            order: symbols,
            rank,
        })
    }

    pub fn rank(&self, p: &Symbol) -> Result<usize> {
        self.rank
            .get(p)
            .copied()
            .ok_or_else(|| Error::UndeclaredPredicate(p.to_string()))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.order
    }

    pub fn contains(&self, p: &Symbol) -> bool {
        self.rank.contains_key(p)
    }

    fn literal_key(&self, l: &Literal) -> Result<(usize, bool)> {
        Ok((self.rank(l.pred())?, !l.positive))
    }
}

/// Outcome of comparing two non-ground literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiteralOrdering {
    Less,
    Greater,
    Equal,
    Incomparable,
}

pub fn compare_literals(l1: &Literal, l2: &Literal, ord: &PrecedenceOrder) -> Result<LiteralOrdering> {
    let k1 = ord.literal_key(l1)?;
    let k2 = ord.literal_key(l2)?;
    Ok(match k1.cmp(&k2) {
        Ordering::Less => LiteralOrdering::Less,
        Ordering::Greater => LiteralOrdering::Greater,
        Ordering::Equal if l1.atom.args == l2.atom.args => LiteralOrdering::Equal,
        Ordering::Equal => LiteralOrdering::Incomparable,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaximalLiteral {
    pub index: usize,
    pub strict: bool,
}

/// Maximal literals of a clause, with strictness.
///
/// A literal is maximal if no other literal is greater; it is strictly
/// maximal if in addition no other literal is equal to it. Incomparable
/// literals never block each other.
pub fn maximal_literals(c: &ConstrainedClause, ord: &PrecedenceOrder) -> Result<Vec<MaximalLiteral>> {
    if c.literals.is_empty() {
        return Err(Error::EmptyFirstOrderPart);
    }
    let mut out = Vec::new();
    for (i, l) in c.literals.iter().enumerate() {
        let mut maximal = true;
        let mut strict = true;
        for (j, k) in c.literals.iter().enumerate() {
            if i == j {
                continue;
            }
            match compare_literals(l, k, ord)? {
                LiteralOrdering::Less => {
                    maximal = false;
                    break;
                }
                LiteralOrdering::Equal => strict = false,
                LiteralOrdering::Greater | LiteralOrdering::Incomparable => {}
            }
        }
        if maximal {
            out.push(MaximalLiteral { index: i, strict });
        }
    }
    Ok(out)
}

/// Well-founded total order on rationals: by `|num| + |den|`, then sign,
/// then value.
pub fn universe_cmp(a: &Rational, b: &Rational) -> Ordering {
    let size = |r: &Rational| r.numer().abs() + r.denom().abs();
    size(a)
        .cmp(&size(b))
        .then_with(|| signum_key(a).cmp(&signum_key(b)))
        .then_with(|| a.cmp(b))
}

fn signum_key(r: &Rational) -> i8 {
    if r.is_negative() {
        -1
    } else if r.is_positive() {
        1
    } else {
        0
    }
}

/// Lexicographic extension of [`universe_cmp`].
pub fn tuple_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match universe_cmp(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Total order on ground literals.
pub fn compare_ground_literals(
    l1: &GroundLiteral,
    l2: &GroundLiteral,
    ord: &PrecedenceOrder,
) -> Result<Ordering> {
    let k1 = (ord.rank(&l1.atom.pred)?, !l1.positive);
    let k2 = (ord.rank(&l2.atom.pred)?, !l2.positive);
    Ok(k1
        .cmp(&k2)
        .then_with(|| tuple_cmp(&l1.atom.args, &l2.atom.args)))
}
