//! Finite unions of intervals over the value of a single linear form; used
//! by the simplifier to merge atoms that constrain the same form.

use std::cmp::Ordering;

use num_traits::{One, Signed};

use crate::term::{LaAtom, LinTerm, Rational, Rel};

/// Endpoint: value and whether it is included. `None` is infinite.
type End = Option<(Rational, bool)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Interval {
    lo: End,
    hi: End,
}

impl Interval {
    fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some((a, ca)), Some((b, cb))) => a > b || (a == b && !(*ca && *cb)),
            _ => false,
        }
    }

    fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: max_lo(&self.lo, &other.lo),
            hi: min_hi(&self.hi, &other.hi),
        }
    }

    fn is_point(&self) -> Option<&Rational> {
        match (&self.lo, &self.hi) {
            (Some((a, true)), Some((b, true))) if a == b => Some(a),
            _ => None,
        }
    }
}

fn cmp_lo(a: &End, b: &End) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Less,
        (_, None) => Ordering::Greater,
        // a closed lower end starts before an open one at the same value
        (Some((x, cx)), Some((y, cy))) => x.cmp(y).then(cy.cmp(cx)),
    }
}

fn cmp_hi(a: &End, b: &End) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Greater,
        (_, None) => Ordering::Less,
        (Some((x, cx)), Some((y, cy))) => x.cmp(y).then(cx.cmp(cy)),
    }
}

fn max_lo(a: &End, b: &End) -> End {
    if cmp_lo(a, b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

fn min_hi(a: &End, b: &End) -> End {
    if cmp_hi(a, b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

/// Sorted, disjoint, non-adjacent intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntervalSet {
    parts: Vec<Interval>,
    integer: bool,
}

impl IntervalSet {
    fn new(parts: Vec<Interval>, integer: bool) -> Self {
        let mut s = IntervalSet { parts, integer };
        s.normalize();
        s
    }

    /// Values `v` with `v REL k`.
    pub(crate) fn from_rel(rel: &Rel, k: Rational, integer: bool) -> Self {
        let below = |closed| Interval {
            lo: None,
            hi: Some((k.clone(), closed)),
        };
        let above = |closed| Interval {
            lo: Some((k.clone(), closed)),
            hi: None,
        };
        let parts = match rel {
            Rel::Le => vec![below(true)],
            Rel::Lt => vec![below(false)],
            Rel::Ge => vec![above(true)],
            Rel::Gt => vec![above(false)],
            Rel::Eq => vec![Interval {
                lo: Some((k.clone(), true)),
                hi: Some((k.clone(), true)),
            }],
            Rel::Ne => vec![below(false), above(false)],
            Rel::Divides(_) | Rel::NotDivides(_) => panic!("divisibility has no interval form"),
        };
        IntervalSet::new(parts, integer)
    }

    pub(crate) fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                parts.push(a.intersect(b));
            }
        }
        IntervalSet::new(parts, self.integer)
    }

    pub(crate) fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        IntervalSet::new(parts, self.integer)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].lo.is_none() && self.parts[0].hi.is_none()
    }

    fn normalize(&mut self) {
        if self.integer {
            for p in &mut self.parts {
                p.lo = p.lo.take().map(|(k, closed)| {
                    let c = k.ceil();
                    if !closed && c == k {
                        (c + Rational::one(), true)
                    } else {
                        (c, true)
                    }
                });
                p.hi = p.hi.take().map(|(k, closed)| {
                    let f = k.floor();
                    if !closed && f == k {
                        (f - Rational::one(), true)
                    } else {
                        (f, true)
                    }
                });
            }
        }
        self.parts.retain(|p| !p.is_empty());
        self.parts.sort_by(|a, b| cmp_lo(&a.lo, &b.lo));
        let mut out: Vec<Interval> = Vec::new();
        for p in self.parts.drain(..) {
            if let Some(last) = out.last_mut() {
                if touches(&last.hi, &p.lo, self.integer) {
                    last.hi = match (&last.hi, &p.hi) {
                        (None, _) | (_, None) => None,
                        _ => {
                            if cmp_hi(&last.hi, &p.hi) == Ordering::Less {
                                p.hi.clone()
                            } else {
                                last.hi.clone()
                            }
                        }
                    };
                    continue;
                }
            }
            out.push(p);
        }
        self.parts = out;
    }

    /// Formula over `form` denoting this set.
    pub(crate) fn to_formula(&self, form: &LinTerm) -> super::Formula {
        use super::Formula;
        if self.is_empty() {
            return Formula::False;
        }
        if self.is_full() {
            return Formula::True;
        }
        if let Some(holes) = self.single_point_holes() {
            let hull = Interval {
                lo: self.parts[0].lo.clone(),
                hi: self.parts.last().unwrap().hi.clone(),
            };
            let mut items = vec![interval_formula(form, &hull)];
            for h in holes {
                items.push(atom(form, Rel::Ne, &h));
            }
            return Formula::and(items);
        }
        Formula::or(self.parts.iter().map(|p| interval_formula(form, p)).collect::<Vec<_>>())
    }

    /// If the gaps between consecutive parts are all single points,
    /// return them.
    fn single_point_holes(&self) -> Option<Vec<Rational>> {
        let mut holes = Vec::new();
        for w in self.parts.windows(2) {
            let (Some((a, ca)), Some((b, cb))) = (&w[0].hi, &w[1].lo) else {
                return None;
            };
            if self.integer {
                if b - a != Rational::from_integer(2.into()) {
                    return None;
                }
                holes.push(a + Rational::one());
            } else {
                if a != b || *ca || *cb {
                    return None;
                }
                holes.push(a.clone());
            }
        }
        Some(holes)
    }
}

fn touches(hi: &End, lo: &End, integer: bool) -> bool {
    match (hi, lo) {
        (None, _) | (_, None) => true,
        (Some((a, ca)), Some((b, cb))) => {
            if integer {
                b <= &(a + Rational::one())
            } else {
                b < a || (a == b && (*ca || *cb))
            }
        }
    }
}

fn atom(form: &LinTerm, rel: Rel, k: &Rational) -> super::Formula {
    super::Formula::atom(LaAtom::new(form, rel, &LinTerm::constant(k.clone())))
}

fn interval_formula(form: &LinTerm, p: &Interval) -> super::Formula {
    if let Some(k) = p.is_point() {
        return atom(form, Rel::Eq, k);
    }
    let mut items = Vec::new();
    if let Some((k, closed)) = &p.lo {
        items.push(atom(form, if *closed { Rel::Ge } else { Rel::Gt }, k));
    }
    if let Some((k, closed)) = &p.hi {
        items.push(atom(form, if *closed { Rel::Le } else { Rel::Lt }, k));
    }
    super::Formula::and(items)
}

/// Split a non-divisibility atom into a primitive linear form (coprime
/// integer coefficients, first coefficient positive) and the set of values
/// of that form satisfying the atom.
pub(crate) fn split_atom(a: &LaAtom, integer: bool) -> Option<(LinTerm, IntervalSet)> {
    if a.is_divisibility() || a.term().is_constant() {
        return None;
    }
    let t = a.term();
    let mut g = num_bigint::BigInt::from(0);
    for (_, c) in t.coeffs() {
        g = num_integer::Integer::gcd(&g, &c.to_integer());
    }
    let mut scale = Rational::from_integer(g);
    if t.coeffs().next().unwrap().1.is_negative() {
        scale = -scale;
    }
    let form = t.without_constant().scale(&(Rational::one() / &scale));
    // scale·form + c REL 0  <=>  form REL' -c/scale
    let k = -t.constant_part() / &scale;
    let rel = if scale.is_negative() { a.rel().flipped() } else { a.rel().clone() };
    Some((form, IntervalSet::from_rel(&rel, k, integer)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::la::Formula;
    use crate::term::{rat, Var};

    fn x() -> LinTerm {
        LinTerm::var(Var::named("x"))
    }

    #[test]
    fn union_covers_line() {
        let a = IntervalSet::from_rel(&Rel::Lt, rat(0), false);
        let b = IntervalSet::from_rel(&Rel::Gt, rat(0), false);
        let c = IntervalSet::from_rel(&Rel::Le, rat(0), false);
        let u = a.union(&b);
        assert_eq!(u.to_formula(&x()), Formula::rel(&x(), Rel::Ne, &LinTerm::zero()));
        assert!(u.union(&c).is_full());
    }

    #[test]
    fn intersection_keeps_tighter_bound() {
        let a = IntervalSet::from_rel(&Rel::Lt, rat(1), false);
        let b = IntervalSet::from_rel(&Rel::Le, rat(0), false);
        assert_eq!(a.intersect(&b).to_formula(&x()), Formula::rel(&x(), Rel::Le, &LinTerm::zero()));
    }

    #[test]
    fn integer_mode_closes_ends() {
        let a = IntervalSet::from_rel(&Rel::Gt, rat(0), true);
        let b = IntervalSet::from_rel(&Rel::Lt, rat(2), true);
        assert_eq!(a.intersect(&b).to_formula(&x()), Formula::rel(&x(), Rel::Eq, &LinTerm::constant(rat(1))));
    }
}
