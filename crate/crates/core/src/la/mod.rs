//! Exact linear arithmetic: evaluation, satisfiability, entailment,
//! projection (quantifier elimination) and simplification.
//!
//! Rationals (`lra`, `lqa`) use Fourier–Motzkin for satisfiability and
//! Loos–Weispfenning virtual substitution for projection; integers (`lia`)
//! use Cooper's method for both.

mod cooper;
mod fm;
mod formula;
mod interval;
mod lw;
mod sat;
mod simplify;

use std::cell::Cell;
use std::collections::BTreeSet;

pub use formula::Formula;

use crate::error::{Error, Result};
use crate::term::{is_integral, Assignment, LaAtom, Rel, Theory, Var};

/// Truth value of `f` under `beta`.
pub fn eval_formula(f: &Formula, beta: &Assignment, theory: Theory) -> Result<bool> {
    let qf;
    let f = if f.has_quantifiers() {
        qf = eliminate_quantifiers(f, theory);
        &qf
    } else {
        f
    };
    if theory.is_integer() {
        for v in f.free_vars() {
            if let Some(x) = beta.get(&v) {
                if !is_integral(x) {
                    return Err(Error::NonIntegerValue(v));
                }
            }
        }
    }
    eval_qf(f, beta)
}

fn eval_qf(f: &Formula, beta: &Assignment) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => a.eval(beta).map_err(Error::UnassignedVariable)?,
        Formula::Not(g) => !eval_qf(g, beta)?,
        Formula::And(xs) => {
            for x in xs {
                if !eval_qf(x, beta)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(xs) => {
            for x in xs {
                if eval_qf(x, beta)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(..) => unreachable!("quantifiers are eliminated first"),
    })
}

/// A satisfying assignment of every free variable, or `None`.
pub fn is_satisfiable(f: &Formula, theory: Theory) -> Option<Assignment> {
    if f.has_quantifiers() {
        let g = eliminate_quantifiers(f, theory);
        let beta = sat::satisfiable(&g, theory)?;
        return Some(beta.restricted_to(&f.free_vars()));
    }
    sat::satisfiable(f, theory)
}

/// `f ⊨ g`, i.e. `f ∧ ¬g` is unsatisfiable.
pub fn entails(f: &Formula, g: &Formula, theory: Theory) -> bool {
    is_satisfiable(&Formula::and([f.clone(), Formula::not(g.clone())]), theory).is_none()
}

pub fn equivalent(f: &Formula, g: &Formula, theory: Theory) -> bool {
    entails(f, g, theory) && entails(g, f, theory)
}

/// Quantifier-free formula equivalent to `f` with fewer or equal atoms
/// in typical cases.
pub fn simplify(f: &Formula, theory: Theory) -> Formula {
    if f.has_quantifiers() {
        return simplify::simplify(&eliminate_quantifiers(f, theory), theory);
    }
    simplify::simplify(f, theory)
}

/// Quantifier-free equivalent of `∃(vars(f) \ keep). f`.
pub fn project(keep: &BTreeSet<Var>, f: &Formula, theory: Theory) -> Formula {
    let f = if f.has_quantifiers() {
        eliminate_quantifiers(f, theory)
    } else {
        f.clone()
    };
    if f.free_vars().is_disjoint(keep) {
        return if sat::satisfiable(&f, theory).is_some() { Formula::True } else { Formula::False };
    }
    let mut g = simplify::syntactic(&f, theory);
    loop {
        let fv = g.free_vars();
        let bound: Vec<&Var> = fv.iter().filter(|v| !keep.contains(*v)).collect();
        let Some(x) = bound
            .iter()
            .min_by_key(|v| g.atoms().iter().filter(|a| a.mentions(v)).count())
        else {
            break;
        };
        let x = (*x).clone();
        g = simplify::syntactic(&eliminate(&x, &g, theory), theory);
    }
    simplify::simplify(&g, theory)
}

thread_local! {
    static STEP_BUDGET: Cell<Option<usize>> = const { Cell::new(None) };
    static OVER_BUDGET: Cell<bool> = const { Cell::new(false) };
}

/// Charges a Cooper step of estimated output size `atoms` against the
/// budget of a running [`project_within`]; true once it is exhausted.
fn over_step_budget(atoms: usize) -> bool {
    let Some(left) = STEP_BUDGET.with(|b| b.get()) else {
        return false;
    };
    let over = atoms > left;
    STEP_BUDGET.with(|b| b.set(Some(left.saturating_sub(atoms))));
    if over {
        OVER_BUDGET.with(|o| o.set(true));
    }
    over
}

/// [`project`] that gives up with `None` when eliminating one variable
/// would produce more than `max_step_atoms` atoms or the result has more
/// than `max_atoms`.
pub fn project_within(keep: &BTreeSet<Var>, f: &Formula, theory: Theory, max_step_atoms: usize, max_atoms: usize) -> Option<Formula> {
    let f = if f.has_quantifiers() {
        eliminate_quantifiers(f, theory)
    } else {
        f.clone()
    };
    if f.free_vars().is_disjoint(keep) {
        return Some(project(keep, &f, theory));
    }
    let mut g = simplify::syntactic(&f, theory);
    loop {
        let fv = g.free_vars();
        let Some(x) = fv
            .iter()
            .filter(|v| !keep.contains(*v))
            .min_by_key(|v| g.atoms().iter().filter(|a| a.mentions(v)).count())
        else {
            break;
        };
        STEP_BUDGET.with(|b| b.set(Some(max_step_atoms)));
        OVER_BUDGET.with(|o| o.set(false));
        let step = eliminate(x, &g, theory);
        STEP_BUDGET.with(|b| b.set(None));
        if OVER_BUDGET.with(|o| o.replace(false)) || step.atom_count() > max_step_atoms {
            return None;
        }
        g = simplify::syntactic(&step, theory);
    }
    let g = simplify::simplify(&g, theory);
    (g.atom_count() <= max_atoms).then_some(g)
}

/// Replace every `∃` by its projection.
pub fn eliminate_quantifiers(f: &Formula, theory: Theory) -> Formula {
    match f {
        Formula::Exists(v, g) => {
            let body = eliminate_quantifiers(g, theory);
            let mut keep = body.free_vars();
            keep.remove(v);
            project(&keep, &body, theory)
        }
        Formula::Not(g) => Formula::not(eliminate_quantifiers(g, theory)),
        Formula::And(xs) => Formula::and(xs.iter().map(|x| eliminate_quantifiers(x, theory)).collect::<Vec<_>>()),
        Formula::Or(xs) => Formula::or(xs.iter().map(|x| eliminate_quantifiers(x, theory)).collect::<Vec<_>>()),
        other => other.clone(),
    }
}

/// `∃x. f` for a formula in negation normal form.
fn eliminate(x: &Var, f: &Formula, theory: Theory) -> Formula {
    if !f.free_vars().contains(x) {
        return f.clone();
    }
    match f {
        Formula::Or(xs) => Formula::or(xs.iter().map(|g| eliminate(x, g, theory)).collect::<Vec<_>>()),
        Formula::And(xs) => {
            let (with, without): (Vec<&Formula>, Vec<&Formula>) =
                xs.iter().partition(|g| g.free_vars().contains(x));
            let mut out: Vec<Formula> = without.into_iter().cloned().collect();
            if let [Formula::Or(_)] = with.as_slice() {
                out.push(eliminate(x, with[0], theory));
                return Formula::and(out);
            }
            if let Some(split) = distribute(&with) {
                let branches = split.iter().filter_map(|b| {
                    let atoms: Vec<LaAtom> = b.iter().filter_map(|g| match g {
                        Formula::Atom(a) => Some(a.clone()),
                        _ => None,
                    }).collect();
                    // the rational relaxation prunes dead branches cheaply
                    fm::fm_sat(&atoms)?;
                    Some(eliminate(x, &Formula::and(b.clone()), theory))
                });
                out.push(Formula::or(branches.collect::<Vec<_>>()));
                return Formula::and(out);
            }
            let core = Formula::and(with.iter().map(|g| (*g).clone()).collect::<Vec<_>>());
            let eq = with
                .iter()
                .filter_map(|g| match g {
                    Formula::Atom(a) if *a.rel() == Rel::Eq => Some(a),
                    _ => None,
                })
                .min_by_key(|a| a.term().coeff(x).abs());
            let res = match eq {
                Some(eq) if theory.is_integer() => cooper::eliminate_by_equality(x, eq, &core),
                Some(eq) => core.substitute(x, &lw::solve_for(eq, x)),
                None => eliminate_core(x, &core, theory),
            };
            out.push(res);
            Formula::and(out)
        }
        _ => eliminate_core(x, f, theory),
    }
}

/// Satisfiability by eliminating one variable at a time, for formulas whose
/// disjunctive normal form is too large to search. The witness is read back
/// in reverse: each intermediate projection becomes a formula in one
/// variable once the later ones are fixed.
fn satisfiable_by_elimination(f: &Formula, theory: Theory) -> Option<Assignment> {
    let f = if f.has_quantifiers() {
        eliminate_quantifiers(f, theory)
    } else {
        f.clone()
    };
    let mut g = simplify::syntactic(&f, theory);
    let mut chain = Vec::new();
    loop {
        let fv = g.free_vars();
        let Some(x) = fv.iter().min_by_key(|v| g.atoms().iter().filter(|a| a.mentions(v)).count()) else {
            break;
        };
        let next = simplify::syntactic(&eliminate(x, &g, theory), theory);
        chain.push((x.clone(), g));
        g = next;
    }
    if !eval_qf(&g, &Assignment::new()).ok()? {
        return None;
    }
    let mut beta = Assignment::new();
    for (x, phi) in chain.iter().rev() {
        let line = phi.map_atoms(&mut |a| Formula::atom(a.partial_eval(&beta)));
        let value = line_candidates(x, &line, theory).into_iter().find(|v| {
            let point: Assignment = [(x.clone(), v.clone())].into_iter().collect();
            eval_qf(&line, &point).unwrap_or(false)
        })?;
        beta.insert(x.clone(), value);
    }
    Some(beta.restricted_to(&f.free_vars()))
}

/// Values of `x` that meet every truth pattern of a formula in `x` alone.
/// Atoms change truth only at their roots, so over the rationals the roots,
/// the midpoints between them and one point beyond each end suffice. Over
/// the integers truth between roots is periodic, so one period on either
/// side of every root suffices.
fn line_candidates(x: &Var, f: &Formula, theory: Theory) -> Vec<crate::term::Rational> {
    use crate::term::Rational;
    use num_integer::Integer;
    use num_traits::One;
    let mut roots: Vec<Rational> = Vec::new();
    let mut period = num_bigint::BigInt::one();
    for a in f.atoms() {
        let c = a.term().coeff(x);
        if num_traits::Zero::is_zero(&c) {
            continue;
        }
        match a.rel() {
            Rel::Divides(m) | Rel::NotDivides(m) => period = period.lcm(&(m * c.denom())),
            _ => roots.push(-a.term().constant_part() / &c),
        }
    }
    roots.sort();
    roots.dedup();
    if !theory.is_integer() {
        let Some((first, last)) = roots.first().zip(roots.last()) else {
            return vec![Rational::from_integer(0.into())];
        };
        let mut out = vec![first - Rational::one(), last + Rational::one()];
        out.extend(roots.windows(2).map(|w| (&w[0] + &w[1]) / Rational::from_integer(2.into())));
        out.extend(roots.iter().cloned());
        return out;
    }
    let bases: Vec<num_bigint::BigInt> =
        if roots.is_empty() { vec![0.into()] } else { roots.iter().map(|r| r.floor().to_integer()).collect() };
    let mut out = Vec::new();
    for b in bases {
        let mut j = -period.clone();
        while j <= &period + 1 {
            out.push(Rational::from_integer(&b + &j));
            j += 1;
        }
    }
    out
}

/// Distribute a conjunction over its disjunctions when the number of
/// branches stays small. Cooper's method on each branch then works with
/// that branch's coefficients and bounds only, instead of all of them.
fn distribute(conjuncts: &[&Formula]) -> Option<Vec<Vec<Formula>>> {
    const MAX_BRANCHES: usize = 256;
    let mut product = 1usize;
    for g in conjuncts {
        if let Formula::Or(xs) = g {
            product = product.saturating_mul(xs.len());
        }
    }
    if product == 1 || product > MAX_BRANCHES {
        return None;
    }
    let mut branches = vec![Vec::new()];
    for g in conjuncts {
        match g {
            Formula::Or(xs) => {
                branches = branches
                    .iter()
                    .flat_map(|b| {
                        xs.iter().map(move |x| {
                            let mut nb: Vec<Formula> = b.clone();
                            match x {
                                Formula::And(ys) => nb.extend(ys.iter().cloned()),
                                other => nb.push(other.clone()),
                            }
                            nb
                        })
                    })
                    .collect();
            }
            other => branches.iter_mut().for_each(|b| b.push((*other).clone())),
        }
    }
    Some(branches)
}

fn eliminate_core(x: &Var, f: &Formula, theory: Theory) -> Formula {
    if let Some(g) = one_sided(x, f) {
        return g;
    }
    if theory.is_integer() {
        cooper::cooper_eliminate(x, f)
    } else {
        lw::lw_eliminate(x, f)
    }
}

/// If `x` is bounded on one side only (and no equality or divisibility
/// atom mentions it), every atom on `x` can be satisfied simultaneously by
/// a large enough value, so they all become true.
fn one_sided(x: &Var, f: &Formula) -> Option<Formula> {
    let mut lower = false;
    let mut upper = false;
    for a in f.atoms() {
        if !a.mentions(x) {
            continue;
        }
        match a.rel() {
            Rel::Le | Rel::Lt => {
                if a.term().coeff(x) > num_traits::Zero::zero() {
                    upper = true;
                } else {
                    lower = true;
                }
            }
            Rel::Ne => {}
            _ => return None,
        }
    }
    if lower && upper {
        return None;
    }
    Some(f.map_atoms(&mut |a| if a.mentions(x) { Formula::True } else { Formula::atom(a.clone()) }))
}

/// Simplify a constraint multiset. `None` if it is unsatisfiable.
pub fn simplify_constraint(atoms: &[LaAtom], theory: Theory) -> Option<Vec<LaAtom>> {
    let f = Formula::conjunction_of(atoms);
    match simplify(&f, theory) {
        Formula::False => None,
        Formula::True => Some(Vec::new()),
        Formula::Atom(a) => Some(vec![a]),
        Formula::And(xs) if xs.iter().all(|x| matches!(x, Formula::Atom(_))) => Some(
            xs.into_iter()
                .map(|x| match x {
                    Formula::Atom(a) => a,
                    _ => unreachable!(),
                })
                .collect(),
        ),
        _ => {
            is_satisfiable(&f, theory)?;
            let mut v = atoms.to_vec();
            v.sort();
            v.dedup();
            Some(v)
        }
    }
}

use num_traits::Signed as _;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{rat, LinTerm};

    fn v(n: &str) -> Var {
        Var::named(n)
    }
    fn t(n: &str) -> LinTerm {
        LinTerm::var(v(n))
    }
    fn k(n: i64) -> LinTerm {
        LinTerm::constant(rat(n))
    }

    #[test]
    fn eval_examples() {
        let f = Formula::and([Formula::rel(&t("x"), Rel::Le, &k(1)), Formula::rel(&t("y"), Rel::Eq, &k(5))]);
        let beta: Assignment = [(v("x"), rat(0)), (v("y"), rat(5))].into_iter().collect();
        assert!(eval_formula(&f, &beta, Theory::Lra).unwrap());
        let g = Formula::and([Formula::rel(&t("x"), Rel::Lt, &k(0)), Formula::rel(&t("x"), Rel::Gt, &k(0))]);
        assert!(!eval_formula(&g, &beta, Theory::Lra).unwrap());
        let box2 = Formula::and([
            Formula::rel(&t("x"), Rel::Ge, &k(0)),
            Formula::rel(&t("x"), Rel::Le, &k(2)),
            Formula::rel(&t("y"), Rel::Ge, &k(0)),
            Formula::rel(&t("y"), Rel::Le, &k(2)),
        ]);
        let beta: Assignment = [(v("x"), rat(3)), (v("y"), rat(1))].into_iter().collect();
        assert!(!eval_formula(&box2, &beta, Theory::Lia).unwrap());
    }

    #[test]
    fn eval_errors() {
        let f = Formula::rel(&t("x"), Rel::Le, &k(1));
        assert_eq!(
            eval_formula(&f, &Assignment::new(), Theory::Lra),
            Err(Error::UnassignedVariable(v("x")))
        );
        let beta: Assignment = [(v("x"), crate::term::ratio(1, 2))].into_iter().collect();
        assert_eq!(eval_formula(&f, &beta, Theory::Lia), Err(Error::NonIntegerValue(v("x"))));
    }

    #[test]
    fn satisfiability_examples() {
        let f = Formula::rel(&t("x"), Rel::Le, &k(0));
        let beta = is_satisfiable(&f, Theory::Lra).unwrap();
        assert_eq!(beta.get(&v("x")), Some(&rat(0)));
        let g = Formula::and([Formula::rel(&t("x"), Rel::Lt, &k(0)), Formula::rel(&t("x"), Rel::Gt, &k(0))]);
        assert!(is_satisfiable(&g, Theory::Lra).is_none());
    }

    #[test]
    fn projection_of_shifted_equality() {
        // ∃y1. x1 = y1 + 1 ∧ y1 = 0   ≡   x1 = 1
        let x1 = LinTerm::var(Var::canon(1));
        let f = Formula::and([
            Formula::rel(&x1, Rel::Eq, &t("y1").plus(&k(1))),
            Formula::rel(&t("y1"), Rel::Eq, &k(0)),
        ]);
        let keep: BTreeSet<Var> = [Var::canon(1)].into_iter().collect();
        for th in [Theory::Lra, Theory::Lia] {
            let p = project(&keep, &f, th);
            assert_eq!(p, Formula::rel(&x1, Rel::Eq, &k(1)), "{th}");
        }
        // nothing to eliminate
        let g = Formula::rel(&x1, Rel::Le, &k(3));
        assert!(equivalent(&project(&keep, &g, Theory::Lra), &g, Theory::Lra));
    }

    #[test]
    fn entailment_examples() {
        let le0 = Formula::rel(&t("x"), Rel::Le, &k(0));
        let lt1 = Formula::rel(&t("x"), Rel::Lt, &k(1));
        assert!(entails(&le0, &lt1, Theory::Lra));
        assert!(!entails(&lt1, &le0, Theory::Lra));
        assert!(entails(&lt1, &le0, Theory::Lia));
        let cover = Formula::or([
            Formula::rel(&t("x"), Rel::Lt, &k(0)),
            Formula::rel(&t("x"), Rel::Gt, &k(0)),
            le0,
        ]);
        assert!(equivalent(&cover, &Formula::True, Theory::Lra));
    }

    #[test]
    fn constraint_simplification() {
        let a = LaAtom::new(&t("x"), Rel::Lt, &k(1));
        let b = LaAtom::new(&t("x"), Rel::Le, &k(0));
        assert_eq!(simplify_constraint(&[a, b.clone()], Theory::Lra), Some(vec![b.clone()]));
        assert_eq!(simplify_constraint(&[b.clone(), b.negate()], Theory::Lra), None);
    }

    fn parsed(text: &str, theory: Theory) -> Formula {
        crate::frontend::parse_formula(text, theory).unwrap()
    }

    #[test]
    fn wide_divisibility_disjunction() {
        // the negation has 2^24 disjunctive normal form branches
        let mut parts = vec!["(div 3 y)".to_string(), "(div 3 (+ y 1))".into(), "(div 3 (+ y 2))".into()];
        for (a, b) in [(0, 0), (0, 4), (1, 3), (1, 7), (2, 2), (2, 6), (3, 1), (3, 5)] {
            parts.push(format!("(and (div 4 (+ y {a})) (div 8 (+ (* 7 y) {b})))"));
        }
        for (a, b) in [(1, 1), (1, 5), (2, 2), (2, 6), (4, 0), (4, 4), (5, 1), (5, 5), (7, 3), (7, 7), (8, 0), (8, 4), (10, 2), (10, 6), (11, 3), (11, 7)] {
            parts.push(format!("(and (div 12 (+ (* 3 y) {a})) (div 8 (+ (* 7 y) {b})))"));
        }
        let g = parsed(&format!("(or {})", parts.join(" ")), Theory::Lia);
        let f = parsed("(distinct (+ (* 3 x) y (* 3 z)) 2)", Theory::Lia);
        // g only constrains y modulo 24 and f holds for every y
        let expected = (0..24).all(|y| {
            let beta: Assignment = [(v("y"), rat(y))].into_iter().collect();
            eval_formula(&g, &beta, Theory::Lia).unwrap()
        });
        assert_eq!(entails(&f, &g, Theory::Lia), expected);
        let neg = Formula::not(g);
        match is_satisfiable(&neg, Theory::Lia) {
            Some(beta) => assert!(eval_formula(&neg, &beta, Theory::Lia).unwrap()),
            None => assert!(expected),
        }
    }

    #[test]
    fn elimination_agrees_with_search() {
        let cases = [
            "(and (<= 0 x 3) (= (+ x y) 5) (distinct y 3))",
            "(and (= (* 2 x) y) (= y 3))",
            "(or (and (< x 0) (> x -1)) (and (= (* 3 x) y) (<= 0 y 5) (> y 0)))",
            "(and (div 3 (+ x y 2)) (< 7 (* 2 x) 10) (<= y 0))",
            "(and (< x y) (< y z) (< z x))",
            "(and (distinct x 0) (distinct x 1) (<= 0 x 1))",
            "(or (< x 0) (> x 0))",
        ];
        for text in cases {
            for theory in [Theory::Lra, Theory::Lia] {
                if text.contains("div") && !theory.is_integer() {
                    continue;
                }
                let f = parsed(text, theory);
                let fallback = satisfiable_by_elimination(&f, theory);
                assert_eq!(fallback.is_some(), is_satisfiable(&f, theory).is_some(), "{text} {theory}");
                if let Some(beta) = fallback {
                    assert!(eval_formula(&f, &beta, theory).unwrap(), "{text} {theory}: {beta:?}");
                }
            }
        }
    }
}
