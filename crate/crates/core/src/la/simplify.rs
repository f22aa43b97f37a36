//! Equivalence-preserving formula simplification.
//!
//! A cheap syntactic pass (constant folding, flattening, deduplication,
//! absorption, interval merging per linear form) is followed, for small
//! formulas, by a semantic pass that drops conjuncts implied by their
//! siblings and disjuncts covered by theirs.

use std::collections::BTreeMap;

use super::formula::{lia_normalize_atom, Formula};
use super::interval::{split_atom, IntervalSet};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::term::{Assignment, LinTerm, Rational, Rel, Theory, Var};

/// Atom budget above which the semantic pass is skipped.
const SEMANTIC_BUDGET: usize = 24;

pub(crate) fn simplify(f: &Formula, theory: Theory) -> Formula {
    let g = syntactic(f, theory);
    if g.atom_count() > SEMANTIC_BUDGET {
        return g;
    }
    let g = semantic(&g, theory);
    syntactic(&g, theory)
}

/// Syntactic pass only. The result is in negation normal form.
pub(crate) fn syntactic(f: &Formula, theory: Theory) -> Formula {
    let g = f.nnf();
    let g = if theory.is_integer() {
        g.map_atoms(&mut |a| lia_normalize_atom(a, false))
    } else {
        g
    };
    rec(&g, theory.is_integer())
}

fn rec(f: &Formula, integer: bool) -> Formula {
    let g = match f {
        Formula::And(xs) => combine(xs.iter().map(|x| rec(x, integer)).collect(), true, integer),
        Formula::Or(xs) => combine(xs.iter().map(|x| rec(x, integer)).collect(), false, integer),
        Formula::Exists(v, g) => Formula::exists(v.clone(), rec(g, integer)),
        other => other.clone(),
    };
    if integer {
        fold_residues(g)
    } else {
        g
    }
}

/// Evaluations allowed when deciding a divisibility-only formula.
const RESIDUE_BUDGET: usize = 20_000;

/// A connective over divisibility atoms alone depends only on the residues
/// of its variables modulo the lcm of the moduli. When there are few
/// residue combinations, fold it to a constant if it is one.
fn fold_residues(f: Formula) -> Formula {
    if !matches!(f, Formula::And(_) | Formula::Or(_)) {
        return f;
    }
    let atoms = f.atoms();
    let mut period = BigInt::one();
    for a in &atoms {
        match a.rel() {
            Rel::Divides(m) | Rel::NotDivides(m) if a.term().coeffs().all(|(_, c)| c.is_integer()) => {
                period = period.lcm(m)
            }
            _ => return f,
        }
    }
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    let Some(l) = period.to_usize() else {
        return f;
    };
    let points = u32::try_from(vars.len()).ok().and_then(|n| l.checked_pow(n));
    if points.is_none_or(|p| p.saturating_mul(atoms.len()) > RESIDUE_BUDGET) {
        return f;
    }
    let mut residues = vec![0usize; vars.len()];
    let mut seen = [false; 2];
    loop {
        let beta: Assignment =
            vars.iter().zip(&residues).map(|(v, r)| (v.clone(), Rational::from_integer(BigInt::from(*r)))).collect();
        let Ok(holds) = super::eval_qf(&f, &beta) else {
            return f;
        };
        seen[usize::from(holds)] = true;
        if seen[0] && seen[1] {
            return f;
        }
        // next residue vector, odometer style
        let mut i = 0;
        while i < residues.len() && residues[i] + 1 == l {
            residues[i] = 0;
            i += 1;
        }
        if i == residues.len() {
            break;
        }
        residues[i] += 1;
    }
    if seen[1] {
        Formula::True
    } else {
        Formula::False
    }
}

/// Interval view of a formula built from atoms over one linear form.
fn as_interval(f: &Formula, integer: bool) -> Option<(LinTerm, IntervalSet)> {
    match f {
        Formula::Atom(a) => split_atom(a, integer),
        Formula::And(xs) | Formula::Or(xs) => {
            let conj = matches!(f, Formula::And(_));
            let mut it = xs.iter();
            let (form, mut set) = as_interval(it.next()?, integer)?;
            for x in it {
                let (g, s) = as_interval(x, integer)?;
                if g != form {
                    return None;
                }
                set = if conj { set.intersect(&s) } else { set.union(&s) };
            }
            Some((form, set))
        }
        _ => None,
    }
}

fn combine(items: Vec<Formula>, conj: bool, integer: bool) -> Formula {
    let mut flat = Vec::new();
    for x in items {
        match (x, conj) {
            (Formula::True, true) | (Formula::False, false) => {}
            (Formula::False, true) => return Formula::False,
            (Formula::True, false) => return Formula::True,
            (Formula::And(ys), true) | (Formula::Or(ys), false) => flat.extend(ys),
            (x, _) => flat.push(x),
        }
    }
    // merge children that constrain the same linear form
    let mut groups: BTreeMap<LinTerm, IntervalSet> = BTreeMap::new();
    let mut rest = Vec::new();
    for x in flat {
        match as_interval(&x, integer) {
            Some((form, set)) => {
                let merged = match groups.remove(&form) {
                    Some(prev) if conj => prev.intersect(&set),
                    Some(prev) => prev.union(&set),
                    None => set,
                };
                groups.insert(form, merged);
            }
            None => rest.push(x),
        }
    }
    for (form, set) in &groups {
        let g = set.to_formula(form);
        match (&g, conj) {
            (Formula::False, true) => return Formula::False,
            (Formula::True, false) => return Formula::True,
            _ => rest.push(g),
        }
    }
    let mut out = Vec::new();
    for x in rest {
        match (x, conj) {
            (Formula::True, true) | (Formula::False, false) => {}
            (Formula::False, true) => return Formula::False,
            (Formula::True, false) => return Formula::True,
            (Formula::And(ys), true) | (Formula::Or(ys), false) => out.extend(ys),
            (x, _) => out.push(x),
        }
    }
    out.sort();
    out.dedup();
    // absorption: a ∧ (a ∨ b) = a and a ∨ (a ∧ b) = a
    let snapshot = out.clone();
    out.retain(|x| {
        let inner = match (x, conj) {
            (Formula::Or(ys), true) | (Formula::And(ys), false) => ys,
            _ => return true,
        };
        !inner.iter().any(|y| snapshot.contains(y))
    });
    if conj {
        Formula::and(out)
    } else {
        Formula::or(out)
    }
}

fn semantic(f: &Formula, theory: Theory) -> Formula {
    if super::sat::satisfiable(f, theory).is_none() {
        return Formula::False;
    }
    if super::sat::satisfiable(&Formula::not(f.clone()), theory).is_none() {
        return Formula::True;
    }
    match f {
        Formula::And(xs) => {
            let mut kept: Vec<Formula> = xs.iter().map(|x| semantic_child(x, theory)).collect();
            let mut i = 0;
            while i < kept.len() {
                let others = Formula::and(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect::<Vec<_>>());
                if super::entails(&others, &kept[i], theory) {
                    kept.remove(i);
                } else {
                    i += 1;
                }
            }
            Formula::and(kept)
        }
        Formula::Or(xs) => {
            let mut kept: Vec<Formula> = xs.iter().map(|x| semantic_child(x, theory)).collect();
            let mut i = 0;
            while i < kept.len() {
                let others = Formula::or(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect::<Vec<_>>());
                if super::entails(&kept[i], &others, theory) {
                    kept.remove(i);
                } else {
                    i += 1;
                }
            }
            Formula::or(kept)
        }
        other => other.clone(),
    }
}

fn semantic_child(f: &Formula, theory: Theory) -> Formula {
    match f {
        Formula::And(_) | Formula::Or(_) => semantic(f, theory),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{rat, Rel, Var};

    fn x() -> LinTerm {
        LinTerm::var(Var::named("x"))
    }

    #[test]
    fn residue_cover_folds() {
        let y = LinTerm::var(Var::named("y"));
        let div = |m: i64, k: i64| Formula::atom(crate::term::LaAtom::divides(m.into(), y.plus(&LinTerm::constant(rat(k)))));
        let cover = Formula::or([div(3, 0), div(3, 1), div(3, 2)]);
        assert_eq!(syntactic(&cover, Theory::Lia), Formula::True);
        let clash = Formula::and([div(2, 0), div(4, 1)]);
        assert_eq!(syntactic(&clash, Theory::Lia), Formula::False);
        let open = Formula::or([div(3, 0), div(3, 1)]);
        assert_eq!(syntactic(&open, Theory::Lia), open);
    }

    #[test]
    fn tighter_bound_wins() {
        let f = Formula::and([
            Formula::rel(&x(), Rel::Lt, &LinTerm::constant(rat(1))),
            Formula::rel(&x(), Rel::Le, &LinTerm::zero()),
        ]);
        assert_eq!(simplify(&f, Theory::Lra), Formula::rel(&x(), Rel::Le, &LinTerm::zero()));
    }

    #[test]
    fn false_disjunct_dropped() {
        let a = Formula::rel(&x(), Rel::Lt, &LinTerm::constant(rat(1)));
        assert_eq!(simplify(&Formula::or([Formula::False, a.clone()]), Theory::Lra), a);
        assert_eq!(simplify(&Formula::and([a.clone(), Formula::True]), Theory::Lra), a);
    }

    #[test]
    fn covering_disjunction_is_true() {
        let f = Formula::Or(vec![
            Formula::rel(&x(), Rel::Lt, &LinTerm::zero()),
            Formula::rel(&x(), Rel::Gt, &LinTerm::zero()),
            Formula::rel(&x(), Rel::Le, &LinTerm::zero()),
        ]);
        assert_eq!(simplify(&f, Theory::Lra), Formula::True);
    }

    #[test]
    fn semantic_pass_drops_implied_conjunct() {
        // x <= y ∧ y <= 0 ∧ x <= 1: the last conjunct follows
        let y = LinTerm::var(Var::named("y"));
        let f = Formula::and([
            Formula::rel(&x(), Rel::Le, &y),
            Formula::rel(&y, Rel::Le, &LinTerm::zero()),
            Formula::rel(&x(), Rel::Le, &LinTerm::constant(rat(1))),
        ]);
        let g = simplify(&f, Theory::Lra);
        assert_eq!(g.atom_count(), 2, "{g}");
    }
}
