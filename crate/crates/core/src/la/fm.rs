//! Fourier–Motzkin elimination over conjunctions of rational constraints,
//! with witness reconstruction by back-substitution.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::term::{LaAtom, LinTerm, Rational, Rel, Var};

enum Step {
    /// `v` was solved from an equality.
    Defined(Var, LinTerm),
    /// `v` was eliminated; these were its bounds at that point.
    Bounded(Var, Vec<LaAtom>),
}

/// Rational satisfiability of a conjunction of `≤`, `<` and `=` atoms.
///
/// Atoms with other relations (`≠`, divisibility) are ignored, so for them
/// the answer is only a relaxation: `None` still proves unsatisfiability.
pub(crate) fn fm_sat(atoms: &[LaAtom]) -> Option<crate::term::Assignment> {
    let mut cur = BTreeSet::new();
    for a in atoms {
        if !matches!(a.rel(), Rel::Le | Rel::Lt | Rel::Eq) {
            continue;
        }
        if !insert_checked(&mut cur, a.clone()) {
            return None;
        }
    }
    let mut steps = Vec::new();
    loop {
        if let Some(eq) = cur.iter().find(|a| *a.rel() == Rel::Eq).cloned() {
            let (v, c) = eq
                .term()
                .coeffs()
                .next()
                .map(|(v, c)| (v.clone(), c.clone()))
                .expect("ground atoms are folded on insertion");
            let expr = eq.term().without_var(&v).scale(&-(Rational::one() / &c));
            let old = std::mem::take(&mut cur);
            for a in old {
                if a == eq {
                    continue;
                }
                if !insert_checked(&mut cur, a.substitute(&v, &expr)) {
                    return None;
                }
            }
            steps.push(Step::Defined(v, expr));
            continue;
        }
        let Some(v) = pick_var(&cur) else { break };
        let (with, without): (Vec<_>, Vec<_>) = std::mem::take(&mut cur).into_iter().partition(|a| a.mentions(&v));
        cur.extend(without);
        let lowers: Vec<_> = with.iter().filter(|a| a.term().coeff(&v).is_negative()).collect();
        let uppers: Vec<_> = with.iter().filter(|a| a.term().coeff(&v).is_positive()).collect();
        for l in &lowers {
            for u in &uppers {
                if !insert_checked(&mut cur, combine(l, u, &v)) {
                    return None;
                }
            }
        }
        steps.push(Step::Bounded(v, with));
    }
    let mut beta = crate::term::Assignment::new();
    for step in steps.into_iter().rev() {
        match step {
            Step::Defined(v, e) => {
                for w in e.vars() {
                    if !beta.contains(w) {
                        beta.insert(w.clone(), Rational::zero());
                    }
                }
                let val = e.eval(&beta).expect("all variables assigned");
                beta.insert(v, val);
            }
            Step::Bounded(v, bounds) => {
                for a in &bounds {
                    for w in a.vars() {
                        if *w != v && !beta.contains(w) {
                            beta.insert(w.clone(), Rational::zero());
                        }
                    }
                }
                let mut lo: Option<(Rational, bool)> = None;
                let mut hi: Option<(Rational, bool)> = None;
                for a in &bounds {
                    let t = a.term().partial_eval(&beta);
                    let c = t.coeff(&v);
                    let k = -t.constant_part() / &c;
                    let strict = *a.rel() == Rel::Lt;
                    if c.is_positive() {
                        tighten_upper(&mut hi, k, strict);
                    } else {
                        tighten_lower(&mut lo, k, strict);
                    }
                }
                beta.insert(v, pick_value(lo.as_ref(), hi.as_ref()));
            }
        }
    }
    Some(beta)
}

/// Insert an atom; returns false if it is a false ground atom.
fn insert_checked(set: &mut BTreeSet<LaAtom>, a: LaAtom) -> bool {
    match a.ground_value() {
        Some(b) => b,
        None => {
            set.insert(a);
            true
        }
    }
}

/// Variable with the smallest number of generated combinations.
fn pick_var(atoms: &BTreeSet<LaAtom>) -> Option<Var> {
    let vars = crate::term::vars_of_atoms(atoms.iter());
    vars.into_iter().min_by_key(|v| {
        let mut lo = 0usize;
        let mut hi = 0usize;
        for a in atoms {
            let c = a.term().coeff(v);
            if c.is_positive() {
                hi += 1;
            } else if c.is_negative() {
                lo += 1;
            }
        }
        (lo * hi) as isize - (lo + hi) as isize
    })
}

/// Combine a lower bound `l` (negative coefficient of `v`) with an upper
/// bound `u` (positive coefficient), eliminating `v`.
fn combine(l: &LaAtom, u: &LaAtom, v: &Var) -> LaAtom {
    let cl = -l.term().coeff(v);
    let cu = u.term().coeff(v);
    let t = l.term().scale(&cu).plus(&u.term().scale(&cl));
    let strict = *l.rel() == Rel::Lt || *u.rel() == Rel::Lt;
    LaAtom::from_zero_form(t, if strict { Rel::Lt } else { Rel::Le })
}

pub(crate) fn tighten_lower(lo: &mut Option<(Rational, bool)>, k: Rational, strict: bool) {
    match lo {
        Some((cur, s)) if *cur > k || (*cur == k && (*s || !strict)) => {}
        _ => *lo = Some((k, strict)),
    }
}

pub(crate) fn tighten_upper(hi: &mut Option<(Rational, bool)>, k: Rational, strict: bool) {
    match hi {
        Some((cur, s)) if *cur < k || (*cur == k && (*s || !strict)) => {}
        _ => *hi = Some((k, strict)),
    }
}

fn fits(v: &Rational, lo: Option<&(Rational, bool)>, hi: Option<&(Rational, bool)>) -> bool {
    let lo_ok = lo.is_none_or(|(k, s)| if *s { v > k } else { v >= k });
    let hi_ok = hi.is_none_or(|(k, s)| if *s { v < k } else { v <= k });
    lo_ok && hi_ok
}

/// A value inside the (assumed nonempty) interval, preferring 0, then the
/// integer closest to 0, then a closed endpoint, then the midpoint.
pub(crate) fn pick_value(lo: Option<&(Rational, bool)>, hi: Option<&(Rational, bool)>) -> Rational {
    let zero = Rational::zero();
    if fits(&zero, lo, hi) {
        return zero;
    }
    let candidate = match (lo, hi) {
        (Some((k, s)), _) if k.is_positive() || hi.is_none() => {
            let c = k.ceil();
            if *s && c == *k {
                c + Rational::one()
            } else {
                c
            }
        }
        (_, Some((k, s))) => {
            let c = k.floor();
            if *s && c == *k {
                c - Rational::one()
            } else {
                c
            }
        }
        (Some((k, _)), None) => k.ceil(),
        (None, None) => zero,
    };
    if fits(&candidate, lo, hi) {
        return candidate;
    }
    match (lo, hi) {
        (Some((k, false)), _) => k.clone(),
        (_, Some((k, false))) => k.clone(),
        (Some((a, _)), Some((b, _))) => (a + b) / Rational::from_integer(2.into()),
        _ => unreachable!("unbounded intervals always contain an integer"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{rat, ratio};

    fn x() -> Var {
        Var::named("x")
    }
    fn y() -> Var {
        Var::named("y")
    }
    fn le(t: LinTerm, k: i64) -> LaAtom {
        LaAtom::new(&t, Rel::Le, &LinTerm::constant(rat(k)))
    }

    #[test]
    fn witness_prefers_zero() {
        let a = le(LinTerm::var(x()), 0);
        let w = fm_sat(&[a]).unwrap();
        assert_eq!(w.get(&x()), Some(&rat(0)));
    }

    #[test]
    fn strict_contradiction() {
        let a = LaAtom::new(&LinTerm::var(x()), Rel::Lt, &LinTerm::zero());
        let b = LaAtom::new(&LinTerm::var(x()), Rel::Gt, &LinTerm::zero());
        assert!(fm_sat(&[a, b]).is_none());
    }

    #[test]
    fn dense_witness() {
        // 0 < 2x < 1
        let a = LaAtom::new(&LinTerm::scaled_var(rat(2), x()), Rel::Gt, &LinTerm::zero());
        let b = LaAtom::new(&LinTerm::scaled_var(rat(2), x()), Rel::Lt, &LinTerm::constant(rat(1)));
        let w = fm_sat(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(w.get(&x()), Some(&ratio(1, 4)));
        assert!(a.eval(&w).unwrap() && b.eval(&w).unwrap());
    }

    #[test]
    fn equalities_back_substitute() {
        // x = y + 1, y >= 3, x <= 10
        let e = LaAtom::new(&LinTerm::var(x()), Rel::Eq, &LinTerm::var(y()).plus(&LinTerm::constant(rat(1))));
        let b = LaAtom::new(&LinTerm::var(y()), Rel::Ge, &LinTerm::constant(rat(3)));
        let c = le(LinTerm::var(x()), 10);
        let w = fm_sat(&[e.clone(), b.clone(), c.clone()]).unwrap();
        for a in [e, b, c] {
            assert!(a.eval(&w).unwrap(), "{a} under {w}");
        }
    }
}
