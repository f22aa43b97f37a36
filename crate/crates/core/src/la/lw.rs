//! Loos–Weispfenning virtual substitution for ordered fields.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use super::formula::Formula;
use crate::term::{LaAtom, LinTerm, Rational, Rel, Var};

/// The value of `x` that makes `a` hold with equality: `-(a - c·x)/c`.
pub(crate) fn solve_for(a: &LaAtom, x: &Var) -> LinTerm {
    let c = a.term().coeff(x);
    a.term().without_var(x).scale(&-(Rational::one() / c))
}

/// Eliminate `x` from a formula in negation normal form over `≤ < = ≠`
/// atoms, using the lower-bound test points plus `-∞`.
pub(crate) fn lw_eliminate(x: &Var, f: &Formula) -> Formula {
    let atoms: Vec<&LaAtom> = f.atoms().into_iter().filter(|a| a.mentions(x)).collect();
    let lowers = atoms.iter().filter(|a| a.term().coeff(x).is_negative()).count();
    let uppers = atoms.iter().filter(|a| a.term().coeff(x).is_positive()).count();
    if uppers < lowers {
        // mirror so that the smaller side supplies the test points
        let flipped = f.substitute(x, &LinTerm::scaled_var(-Rational::one(), x.clone()));
        return lw_lower(x, &flipped);
    }
    lw_lower(x, f)
}

fn lw_lower(x: &Var, f: &Formula) -> Formula {
    let mut weak = BTreeSet::new();
    let mut strict = BTreeSet::new();
    for a in f.atoms() {
        let c = a.term().coeff(x);
        if !a.mentions(x) {
            continue;
        }
        match a.rel() {
            Rel::Eq => {
                weak.insert(solve_for(a, x));
            }
            Rel::Le if c.is_negative() => {
                weak.insert(solve_for(a, x));
            }
            Rel::Lt if c.is_negative() => {
                strict.insert(solve_for(a, x));
            }
            Rel::Ne => {
                strict.insert(solve_for(a, x));
            }
            _ => {}
        }
    }
    let mut out = vec![minus_infinity(x, f)];
    for s in &weak {
        out.push(f.substitute(x, s));
    }
    for s in &strict {
        out.push(substitute_epsilon(x, s, f));
    }
    Formula::or(out)
}

fn minus_infinity(x: &Var, f: &Formula) -> Formula {
    f.map_atoms(&mut |a| {
        if !a.mentions(x) {
            return Formula::atom(a.clone());
        }
        let positive = a.term().coeff(x).is_positive();
        match a.rel() {
            Rel::Le | Rel::Lt => {
                if positive {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Rel::Eq => Formula::False,
            Rel::Ne => Formula::True,
            _ => unreachable!("divisibility atoms do not occur over ordered fields"),
        }
    })
}

/// `f[x := s + ε]` for an infinitesimal `ε > 0`.
fn substitute_epsilon(x: &Var, s: &LinTerm, f: &Formula) -> Formula {
    f.map_atoms(&mut |a| {
        if !a.mentions(x) {
            return Formula::atom(a.clone());
        }
        let positive = a.term().coeff(x).is_positive();
        let v = a.term().substitute(x, s);
        match a.rel() {
            Rel::Le | Rel::Lt => {
                let rel = if positive { Rel::Lt } else { Rel::Le };
                Formula::atom(LaAtom::from_zero_form(v, rel))
            }
            Rel::Eq => Formula::False,
            Rel::Ne => Formula::True,
            _ => unreachable!("divisibility atoms do not occur over ordered fields"),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::rat;

    fn v(n: &str) -> Var {
        Var::named(n)
    }

    #[test]
    fn strict_interval_is_nonempty_iff_bounds_ordered() {
        // ∃y. a < y ∧ y < b   ≡   a < b
        let a = LinTerm::var(v("a"));
        let b = LinTerm::var(v("b"));
        let y = LinTerm::var(v("y"));
        let f = Formula::and([Formula::rel(&a, Rel::Lt, &y), Formula::rel(&y, Rel::Lt, &b)]);
        let g = lw_eliminate(&v("y"), &f);
        assert!(!g.free_vars().contains(&v("y")));
        let expected = Formula::rel(&a, Rel::Lt, &b);
        assert!(crate::la::equivalent(&g, &expected, crate::term::Theory::Lra));
    }

    #[test]
    fn disequality_alone_is_trivial() {
        let f = Formula::rel(&LinTerm::var(v("y")), Rel::Ne, &LinTerm::constant(rat(3)));
        assert_eq!(crate::la::simplify(&lw_eliminate(&v("y"), &f), crate::term::Theory::Lra), Formula::True);
    }
}
