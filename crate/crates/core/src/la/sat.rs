//! Satisfiability with witnesses: a lazy DNF search whose conjunctions are
//! decided by Fourier–Motzkin (rationals) or by recursive Cooper
//! elimination with one-dimensional witness search (integers).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::cooper::{cooper_eliminate, is_unit};
use super::fm::{fm_sat, tighten_lower, tighten_upper};
use super::formula::{lia_normalize_atom, lra_normalize_atom, Formula};
use crate::term::{Assignment, LaAtom, LinTerm, Rational, Rel, Theory, Var};

/// Prepare a quantifier-free formula for the search: negation normal form,
/// `≠` split into strict bounds, integer normalization under LIA.
fn prepare(f: &Formula, theory: Theory) -> Formula {
    let f = f.nnf();
    if theory.is_integer() {
        f.map_atoms(&mut |a| lia_normalize_atom(a, true))
    } else {
        f.map_atoms(&mut |a| lra_normalize_atom(a, true))
    }
}

/// Search nodes tried before giving up on the disjunctive normal form.
const SEARCH_BUDGET: usize = 500;

pub(crate) fn satisfiable(f: &Formula, theory: Theory) -> Option<Assignment> {
    let g = prepare(f, theory);
    let mut budget = SEARCH_BUDGET;
    match search(&[&g], Vec::new(), theory, &mut budget) {
        Some(beta) => Some(beta.restricted_to(&f.free_vars())),
        None if budget == 0 => super::satisfiable_by_elimination(f, theory),
        None => None,
    }
}

/// Depth-first search over the disjunctive normal form of the conjunction
/// of `items`, collecting atoms into `atoms`. Gives up with `None` once
/// `budget` is spent.
fn search(items: &[&Formula], mut atoms: Vec<LaAtom>, theory: Theory, budget: &mut usize) -> Option<Assignment> {
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let mut ors: Vec<&Vec<Formula>> = Vec::new();
    let mut stack: Vec<&Formula> = items.to_vec();
    while let Some(f) = stack.pop() {
        match f {
            Formula::True => {}
            Formula::False => return None,
            Formula::Atom(a) => atoms.push(a.clone()),
            Formula::And(xs) => stack.extend(xs.iter()),
            Formula::Or(xs) => ors.push(xs),
            Formula::Not(_) | Formula::Exists(..) => {
                unreachable!("search expects a prepared quantifier-free formula")
            }
        }
    }
    if ors.is_empty() {
        return decide_conjunction(atoms, theory, budget);
    }
    // prune with the rational relaxation before branching
    fm_sat(&atoms)?;
    // branch on the smallest disjunction
    let (idx, _) = ors.iter().enumerate().min_by_key(|(_, xs)| xs.len()).unwrap();
    let branch = ors.swap_remove(idx);
    let rest: Vec<Formula> = ors.iter().map(|xs| Formula::Or((*xs).clone())).collect();
    for choice in branch {
        let mut next: Vec<&Formula> = rest.iter().collect();
        next.push(choice);
        if let Some(beta) = search(&next, atoms.clone(), theory, budget) {
            return Some(beta);
        }
    }
    None
}

fn decide_conjunction(atoms: Vec<LaAtom>, theory: Theory, budget: &mut usize) -> Option<Assignment> {
    if theory.is_integer() {
        lia_conjunction(atoms, budget)
    } else {
        fm_sat(&atoms)
    }
}

/// Integer satisfiability of a conjunction of normalized atoms
/// (`≤`, `=`, divisibility).
fn lia_conjunction(atoms: Vec<LaAtom>, budget: &mut usize) -> Option<Assignment> {
    let mut cur = Vec::new();
    for a in atoms {
        match lia_normalize_atom(&a, true) {
            Formula::True => {}
            Formula::False => return None,
            Formula::Atom(b) => cur.push(b),
            other => {
                // an atom that still needs case splitting
                return search(&[&other], cur.into_iter().collect(), Theory::Lia, budget);
            }
        }
    }
    cur.sort();
    cur.dedup();
    if cur.iter().any(|a| matches!(a.rel(), Rel::Divides(_) | Rel::NotDivides(_))) {
        return lia_conjunction(divisibility_as_equalities(cur), budget);
    }
    let vars = crate::term::vars_of_atoms(cur.iter());
    if vars.is_empty() {
        return Some(Assignment::new());
    }
    fm_sat(&cur)?;

    // unit-coefficient equality: substitute and recurse
    for a in &cur {
        if *a.rel() != Rel::Eq {
            continue;
        }
        if let Some((v, c)) = a.term().coeffs().find(|(_, c)| is_unit(c)).map(|(v, c)| (v.clone(), c.clone())) {
            let expr = a.term().without_var(&v).scale(&-(Rational::one() / c));
            let rest: Vec<LaAtom> = cur.iter().filter(|b| *b != a).map(|b| b.substitute(&v, &expr)).collect();
            let mut beta = lia_conjunction(rest, budget)?;
            for w in expr.vars() {
                if !beta.contains(w) {
                    beta.insert(w.clone(), Rational::zero());
                }
            }
            let val = expr.eval(&beta).expect("assigned");
            beta.insert(v, val);
            return Some(beta);
        }
    }

    // no unit coefficient: shrink an equality's coefficients instead
    if let Some((xk, e)) = cur.iter().find(|a| *a.rel() == Rel::Eq).and_then(|a| omega_substitution(a, &vars)) {
        let rest: Vec<LaAtom> = cur.iter().map(|b| b.substitute(&xk, &e)).collect();
        let mut beta = lia_conjunction(rest, budget)?;
        for w in e.vars() {
            if !beta.contains(w) {
                beta.insert(w.clone(), Rational::zero());
            }
        }
        let val = e.eval(&beta).expect("assigned");
        beta.insert(xk, val);
        return Some(beta);
    }

    let x = vars
        .iter()
        .min_by_key(|v| cur.iter().filter(|a| a.mentions(v)).count())
        .unwrap()
        .clone();
    let projected = cooper_eliminate(&x, &Formula::conjunction_of(&cur));
    let projected = super::simplify::syntactic(&projected, Theory::Lia);
    let mut beta = search(&[&projected], Vec::new(), Theory::Lia, budget)?;
    for v in &vars {
        if *v != x && !beta.contains(v) {
            beta.insert(v.clone(), Rational::zero());
        }
    }
    let value = one_dimensional_witness(&x, &cur, &beta)?;
    beta.insert(x, value);
    Some(beta)
}

/// `m | t` becomes `t = m·k` and `m ∤ t` becomes `t = m·k + r` with
/// `1 ≤ r < m`, for fresh `k` and `r`, so the equality steps apply.
fn divisibility_as_equalities(atoms: Vec<LaAtom>) -> Vec<LaAtom> {
    let mut used = crate::term::vars_of_atoms(atoms.iter());
    let mut fresh = || {
        let v = fresh_var(&used);
        used.insert(v.clone());
        v
    };
    let mut out = Vec::new();
    for a in atoms {
        match a.rel() {
            Rel::Divides(m) => {
                let k = LinTerm::scaled_var(Rational::from_integer(m.clone()), fresh());
                out.push(LaAtom::from_zero_form(a.term().minus(&k), Rel::Eq));
            }
            Rel::NotDivides(m) => {
                let k = LinTerm::scaled_var(Rational::from_integer(m.clone()), fresh());
                let r = LinTerm::var(fresh());
                out.push(LaAtom::from_zero_form(a.term().minus(&k).minus(&r), Rel::Eq));
                out.push(LaAtom::new(&LinTerm::constant(Rational::one()), Rel::Le, &r));
                out.push(LaAtom::new(&r, Rel::Le, &LinTerm::constant(Rational::from_integer(m - 1))));
            }
            _ => out.push(a),
        }
    }
    out
}

fn fresh_var(used: &std::collections::BTreeSet<Var>) -> Var {
    (1..).map(|k| Var::named(&format!("σ{k}"))).find(|v| !used.contains(v)).unwrap()
}

/// The omega test's equality step for `Σ a_i x_i + c = 0` with no unit
/// coefficient. For the smallest `|a_k|`, `m = |a_k| + 1` and a fresh `σ`,
/// `x_k = sign(a_k)·(Σ_{i≠k} â_i x_i + ĉ − m σ)` where `â` is the residue
/// of `a` modulo `m` nearest zero. Substituting it shrinks the equality.
fn omega_substitution(eq: &LaAtom, used: &std::collections::BTreeSet<Var>) -> Option<(Var, LinTerm)> {
    let t = eq.term();
    if !t.coeffs().all(|(_, a)| a.is_integer()) || !t.constant_part().is_integer() {
        return None;
    }
    let g = t.coeffs().fold(BigInt::zero(), |g, (_, a)| g.gcd(&a.to_integer()));
    let (xk, ak) = t.coeffs().min_by_key(|(_, a)| a.abs())?;
    let ak = ak.to_integer() / &g;
    if ak.abs().is_one() {
        let solved = t.without_var(xk).scale(&-(Rational::from_integer(ak) * Rational::from_integer(g)).recip());
        return Some((xk.clone(), solved));
    }
    let m: BigInt = ak.abs() + 1;
    let hat = |a: &BigInt| a - &m * (BigInt::from(2) * a + &m).div_floor(&(BigInt::from(2) * &m));
    let sigma = fresh_var(used);
    let mut e = LinTerm::constant(Rational::from_integer(hat(&(t.constant_part().to_integer() / &g))));
    for (v, a) in t.coeffs() {
        if v != xk {
            e = e.plus(&LinTerm::scaled_var(Rational::from_integer(hat(&(a.to_integer() / &g))), v.clone()));
        }
    }
    e = e.plus(&LinTerm::scaled_var(-Rational::from_integer(m.clone()), sigma));
    if ak.is_negative() {
        e = e.negated();
    }
    Some((xk.clone(), e))
}

/// Find an integer value of `x` satisfying every atom once the other
/// variables are fixed by `beta`. Solutions are periodic with the lcm of
/// the moduli, so scanning one period from a bound suffices.
fn one_dimensional_witness(x: &Var, atoms: &[LaAtom], beta: &Assignment) -> Option<Rational> {
    let mut lo: Option<(Rational, bool)> = None;
    let mut hi: Option<(Rational, bool)> = None;
    let mut period = BigInt::one();
    let mut fixed: Vec<LaAtom> = Vec::new();
    for a in atoms {
        if !a.mentions(x) {
            continue;
        }
        let b = a.partial_eval(beta);
        let t = b.term();
        let c = t.coeff(x);
        if c.is_zero() {
            continue;
        }
        let k = -t.constant_part() / &c;
        match b.rel() {
            Rel::Le => {
                if c.is_positive() {
                    tighten_upper(&mut hi, k.floor(), false);
                } else {
                    tighten_lower(&mut lo, k.ceil(), false);
                }
            }
            Rel::Eq => {
                if !k.is_integer() {
                    return None;
                }
                tighten_upper(&mut hi, k.clone(), false);
                tighten_lower(&mut lo, k, false);
            }
            Rel::Divides(m) | Rel::NotDivides(m) => period = period.lcm(m),
            _ => {}
        }
        fixed.push(b);
    }
    let start = match (&lo, &hi) {
        (Some((l, _)), _) => l.clone(),
        (None, Some((h, _))) => h - Rational::from_integer(&period - 1),
        (None, None) => Rational::zero(),
    };
    let mut v = start;
    let mut i = BigInt::zero();
    while i < period {
        if hi.as_ref().is_some_and(|(h, _)| v > *h) {
            break;
        }
        let beta1: Assignment = [(x.clone(), v.clone())].into_iter().collect();
        if fixed.iter().all(|a| a.eval(&beta1).unwrap_or(false)) {
            return Some(v);
        }
        v += Rational::one();
        i += 1;
    }
    None
}
