//! Cooper's quantifier elimination for Presburger arithmetic.
//!
//! Inputs are in negation normal form with atoms normalized for integers
//! (`≤`, `=`, `≠` and divisibility only; see `lia_normalize_atom`).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::formula::Formula;
use super::fm::fm_sat;
use super::lw::solve_for;
use crate::term::{LaAtom, LinTerm, Rational, Rel, Theory, Var};

fn int_coeff(a: &LaAtom, x: &Var) -> BigInt {
    a.term().coeff(x).to_integer()
}

fn modulus(a: &LaAtom) -> Option<&BigInt> {
    match a.rel() {
        Rel::Divides(m) | Rel::NotDivides(m) => Some(m),
        _ => None,
    }
}

fn rebuild(term: LinTerm, rel: &Rel) -> LaAtom {
    match rel {
        Rel::Divides(m) => LaAtom::divides(m.clone(), term),
        Rel::NotDivides(m) => LaAtom::divides(m.clone(), term).negate(),
        r => LaAtom::from_zero_form(term, r.clone()),
    }
}

/// Eliminate `x` from `f`, returning a formula equivalent to `∃x. f` over
/// the integers.
pub(crate) fn cooper_eliminate(x: &Var, f: &Formula) -> Formula {
    if !f.free_vars().contains(x) {
        return f.clone();
    }
    let f = &f.map_atoms(&mut |a| super::formula::lia_normalize_atom(a, false));
    let atoms: Vec<&LaAtom> = f.atoms().into_iter().filter(|a| a.mentions(x)).collect();
    let count = |neg: bool| {
        atoms
            .iter()
            .filter(|a| match a.rel() {
                Rel::Le => a.term().coeff(x).is_negative() == neg,
                Rel::Eq | Rel::Ne => true,
                _ => false,
            })
            .count()
    };
    if count(false) < count(true) {
        let flipped = f.substitute(x, &LinTerm::scaled_var(-Rational::one(), x.clone()));
        return cooper_lower(x, &flipped);
    }
    cooper_lower(x, f)
}

fn cooper_lower(x: &Var, f: &Formula) -> Formula {
    // scale so that every bound on x has coefficient ±l, then read l·x as x
    let mut l = BigInt::one();
    for a in f.atoms() {
        if a.mentions(x) && !a.is_divisibility() {
            l = l.lcm(&int_coeff(a, x).abs());
        }
    }
    let scaled = f.map_atoms(&mut |a| {
        if !a.mentions(x) {
            return Formula::atom(a.clone());
        }
        let c = int_coeff(a, x);
        match a.rel() {
            Rel::Divides(m) | Rel::NotDivides(m) => {
                let g = c.gcd(&l);
                let k = &l / &g;
                let kr = Rational::from_integer(k.clone());
                let mut t = a.term().without_var(x).scale(&kr);
                t.add_var(Rational::from_integer(&c / &g), x.clone());
                let m2 = m * &k;
                let rel = if matches!(a.rel(), Rel::Divides(_)) {
                    Rel::Divides(m2)
                } else {
                    Rel::NotDivides(m2)
                };
                Formula::atom(rebuild(t, &rel))
            }
            rel => {
                let k = Rational::from_integer(&l / c.abs());
                let mut t = a.term().without_var(x).scale(&k);
                t.add_var(Rational::from_integer(c.signum()), x.clone());
                Formula::atom(rebuild(t, rel))
            }
        }
    });
    let scaled = if l.is_one() {
        scaled
    } else {
        Formula::and([
            scaled,
            Formula::atom(LaAtom::divides(l.clone(), LinTerm::var(x.clone()))),
        ])
    };

    let mut d = BigInt::one();
    let mut lower_points = BTreeSet::new();
    for a in scaled.atoms() {
        if !a.mentions(x) {
            continue;
        }
        if let Some(m) = modulus(a) {
            d = d.lcm(m);
            continue;
        }
        let s = solve_for(a, x);
        let one = LinTerm::constant(Rational::one());
        match a.rel() {
            // -x + t <= 0, i.e. x >= s
            Rel::Le if a.term().coeff(x).is_negative() => {
                lower_points.insert(s.minus(&one));
            }
            Rel::Eq => {
                lower_points.insert(s.minus(&one));
            }
            Rel::Ne => {
                lower_points.insert(s);
            }
            _ => {}
        }
    }

    let size = (lower_points.len() + 1).saturating_mul(num_traits::ToPrimitive::to_usize(&d).unwrap_or(usize::MAX));
    if super::over_step_budget(size.saturating_mul(scaled.atom_count())) {
        return Formula::False;
    }
    let mut out = Vec::new();
    let at_minus_inf = minus_infinity(x, &scaled);
    let periodic = at_minus_inf.free_vars().contains(x);
    let steps: Vec<BigInt> = num_iter(&d);
    if periodic {
        for j in &steps {
            out.extend(pruned(at_minus_inf.substitute(x, &LinTerm::constant(Rational::from_integer(j.clone())))));
        }
    } else {
        out.extend(pruned(at_minus_inf));
    }
    for b in &lower_points {
        for j in &steps {
            let mut t = b.clone();
            t.add_constant(&Rational::from_integer(j.clone()));
            out.extend(pruned(scaled.substitute(x, &t)));
        }
    }
    Formula::or(out)
}

/// Drop a disjunct whose top-level atoms are infeasible even over the
/// rationals.
fn pruned(f: Formula) -> Option<Formula> {
    let f = super::simplify::syntactic(&f, Theory::Lia);
    let atoms: Vec<LaAtom> = match &f {
        Formula::False => return None,
        Formula::Atom(a) => vec![a.clone()],
        Formula::And(xs) => xs
            .iter()
            .filter_map(|g| match g {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    };
    fm_sat(&atoms)?;
    Some(f)
}

fn num_iter(d: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut j = BigInt::one();
    while &j <= d {
        out.push(j.clone());
        j += 1;
    }
    out
}

fn minus_infinity(x: &Var, f: &Formula) -> Formula {
    f.map_atoms(&mut |a| {
        if !a.mentions(x) || a.is_divisibility() {
            return Formula::atom(a.clone());
        }
        match a.rel() {
            Rel::Le => {
                if a.term().coeff(x).is_positive() {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Rel::Eq => Formula::False,
            Rel::Ne => Formula::True,
            r => unreachable!("relation {r:?} is normalized away before Cooper elimination"),
        }
    })
}

/// `∃x. (c·x + t = 0 ∧ f)` over the integers for a top-level equality,
/// without case splitting: every atom is multiplied by `|c|` so that `c·x`
/// can be replaced by `-t`, and `|c|` must divide `t`.
pub(crate) fn eliminate_by_equality(x: &Var, eq: &LaAtom, f: &Formula) -> Formula {
    let c = eq.term().coeff(x);
    let t = eq.term().without_var(x);
    let abs = c.abs();
    let sign = if c.is_negative() { -Rational::one() } else { Rational::one() };
    let body = f.map_atoms(&mut |a| {
        if !a.mentions(x) {
            return Formula::atom(a.clone());
        }
        let b = a.term().coeff(x);
        let s = a.term().without_var(x);
        // |c|·(b·x + s) = sign·b·(c·x) + |c|·s = -sign·b·t + |c|·s
        let nt = t.scale(&(-&sign * &b)).plus(&s.scale(&abs));
        let rel = match a.rel() {
            Rel::Divides(m) => Rel::Divides(m * abs.to_integer()),
            Rel::NotDivides(m) => Rel::NotDivides(m * abs.to_integer()),
            r => r.clone(),
        };
        super::formula::lia_normalize_atom(&rebuild(nt, &rel), false)
    });
    if abs.is_one() {
        body
    } else {
        Formula::and([Formula::atom(LaAtom::divides(abs.to_integer(), t)), body])
    }
}

pub(crate) fn is_unit(c: &Rational) -> bool {
    c.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{rat, Assignment};

    fn v(n: &str) -> Var {
        Var::named(n)
    }

    fn eval(f: &Formula, beta: &Assignment) -> bool {
        crate::la::eval_formula(f, beta, crate::term::Theory::Lia).unwrap()
    }

    #[test]
    fn multiple_of_three_in_range() {
        // ∃x. 3x = y ∧ 0 <= y <= 5   ≡  y ∈ {0, 3}
        let y = LinTerm::var(v("y"));
        let f = Formula::and([
            Formula::rel(&LinTerm::scaled_var(rat(3), v("x")), Rel::Eq, &y),
            Formula::rel(&y, Rel::Ge, &LinTerm::zero()),
            Formula::rel(&y, Rel::Le, &LinTerm::constant(rat(5))),
        ]);
        let g = cooper_eliminate(&v("x"), &f);
        assert!(!g.free_vars().contains(&v("x")));
        for k in -3..=8 {
            let beta: Assignment = [(v("y"), rat(k))].into_iter().collect();
            assert_eq!(eval(&g, &beta), k == 0 || k == 3, "y = {k}: {g}");
        }
    }

    #[test]
    fn equality_elimination_introduces_divisibility() {
        // ∃x. 2x = y  ≡  2 | y
        let eq = LaAtom::new(&LinTerm::scaled_var(rat(2), v("x")), Rel::Eq, &LinTerm::var(v("y")));
        let g = eliminate_by_equality(&v("x"), &eq, &Formula::atom(eq.clone()));
        for k in -4..=4 {
            let beta: Assignment = [(v("y"), rat(k))].into_iter().collect();
            assert_eq!(eval(&g, &beta), k % 2 == 0);
        }
    }
}
