//! Brute-force least fixpoints on integer windows.
//!
//! Everything here works by enumeration and shares no code with saturation
//! or model construction beyond atom evaluation, so it can serve as an
//! independent check of both.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::clause::{ConstrainedClause, Symbol};
use crate::error::{Error, Result};
use crate::la;
use crate::model::{canonical_assignment, SymbolicInterpretation};
use crate::term::{rat, Assignment, Theory, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Window> {
        if lo > hi {
            return Err(Error::InvalidWindow(lo, hi));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn widened(&self, by: i64) -> Window {
        Window {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    /// All tuples of the given arity, in lexicographic order.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (self.lo..=self.hi).map(move |v| {
                        let mut u = t.clone();
                        u.push(v);
                        u
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Predicate extensions as explicit tuple sets. Empty extensions are not
/// stored, so structural equality is set equality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteInterpretation {
    entries: BTreeMap<Symbol, BTreeSet<Vec<i64>>>,
}

impl FiniteInterpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pred: &Symbol) -> Option<&BTreeSet<Vec<i64>>> {
        self.entries.get(pred)
    }

    pub fn contains(&self, pred: &Symbol, tuple: &[i64]) -> bool {
        self.entries.get(pred).is_some_and(|s| s.contains(tuple))
    }

    pub fn insert(&mut self, pred: Symbol, tuple: Vec<i64>) -> bool {
        self.entries.entry(pred).or_default().insert(tuple)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Vec<i64>)> {
        self.entries.iter().flat_map(|(p, s)| s.iter().map(move |t| (p, t)))
    }

    pub fn is_subset(&self, other: &FiniteInterpretation) -> bool {
        self.iter().all(|(p, t)| other.contains(p, t))
    }

    /// Tuples with every entry inside `w`.
    pub fn restricted_to(&self, w: Window) -> FiniteInterpretation {
        let mut out = FiniteInterpretation::new();
        for (p, t) in self.iter() {
            if t.iter().all(|v| w.contains(*v)) {
                out.insert(p.clone(), t.clone());
            }
        }
        out
    }

    /// Points in exactly one of the two interpretations, tagged with
    /// whether they belong to `self`.
    pub fn difference(&self, other: &FiniteInterpretation) -> Vec<(Symbol, Vec<i64>, bool)> {
        let mut out = Vec::new();
        for (p, t) in self.iter() {
            if !other.contains(p, t) {
                out.push((p.clone(), t.clone(), true));
            }
        }
        for (p, t) in other.iter() {
            if !self.contains(p, t) {
                out.push((p.clone(), t.clone(), false));
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for FiniteInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, s) in &self.entries {
            let pts: Vec<String> = s
                .iter()
                .map(|t| format!("({})", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            writeln!(f, "{p} = {{{}}}", pts.join(" "))?;
        }
        Ok(())
    }
}

fn require_lia(theory: Theory) -> Result<()> {
    if theory != Theory::Lia {
        return Err(Error::TheoryMismatch {
            required: Theory::Lia.name(),
            found: theory.name(),
        });
    }
    Ok(())
}

/// Bind `vars` to `tuple`; fails on a clash with an existing binding.
fn extend(beta: &BTreeMap<Var, i64>, vars: &[Var], tuple: &[i64]) -> Option<BTreeMap<Var, i64>> {
    let mut out = beta.clone();
    for (v, t) in vars.iter().zip(tuple) {
        match out.get(v) {
            Some(x) if x != t => return None,
            Some(_) => {}
            None => {
                out.insert(v.clone(), *t);
            }
        }
    }
    Some(out)
}

fn to_assignment(beta: &BTreeMap<Var, i64>) -> Assignment {
    beta.iter().map(|(v, k)| (v.clone(), rat(*k))).collect()
}

/// One application of the consequence operator: every head instance whose
/// body holds in `i` and whose constraint holds, with all variables ranging
/// over the window.
pub fn tn_step(n: &[ConstrainedClause], i: &FiniteInterpretation, w: Window, theory: Theory) -> Result<FiniteInterpretation> {
    require_lia(theory)?;
    let mut out = FiniteInterpretation::new();
    for c in n {
        let Some((_, head)) = c.positive_literal() else {
            continue;
        };
        // join the body against `i`
        let mut partial = vec![BTreeMap::new()];
        for (_, l) in c.negative_literals() {
            let Some(ext) = i.get(&l.atom.pred) else {
                partial.clear();
                break;
            };
            partial = partial
                .iter()
                .flat_map(|beta| ext.iter().filter_map(|t| extend(beta, &l.atom.args, t)))
                .collect();
        }
        for beta in partial {
            let free: Vec<Var> = c.vars().into_iter().filter(|v| !beta.contains_key(v)).collect();
            for rest in w.tuples(free.len()) {
                let full = extend(&beta, &free, &rest).expect("fresh variables");
                let a = to_assignment(&full);
                let mut ok = true;
                for atom in &c.constraint {
                    if !atom.eval(&a).map_err(Error::UnassignedVariable)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    let t = head.atom.args.iter().map(|v| full[v]).collect();
                    out.insert(head.atom.pred.clone(), t);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixpoint {
    pub interpretation: FiniteInterpretation,
    pub reached: bool,
    pub steps: usize,
}

/// Kleene iteration from the empty interpretation.
pub fn tn_lfp(n: &[ConstrainedClause], w: Window, max_steps: usize, theory: Theory) -> Result<Fixpoint> {
    let mut cur = FiniteInterpretation::new();
    let mut steps = 0;
    loop {
        steps += 1;
        let next = tn_step(n, &cur, w, theory)?;
        if next == cur {
            return Ok(Fixpoint {
                interpretation: cur,
                reached: true,
                steps,
            });
        }
        if steps >= max_steps {
            return Ok(Fixpoint {
                interpretation: next,
                reached: false,
                steps,
            });
        }
        cur = next;
    }
}

/// Grid evaluation of each predicate's formula.
pub fn restrict_model(s: &SymbolicInterpretation, w: Window) -> Result<FiniteInterpretation> {
    require_lia(s.theory)?;
    let mut out = FiniteInterpretation::new();
    for (p, arity, f) in s.iter() {
        if f.is_false() {
            continue;
        }
        for t in w.tuples(arity) {
            let args: Vec<_> = t.iter().map(|v| rat(*v)).collect();
            if la::eval_formula(f, &canonical_assignment(&args), s.theory)? {
                out.insert(p.clone(), t);
            }
        }
    }
    Ok(out)
}

/// Fixpoint bound large enough for any window: every step adds a point.
pub fn step_bound(n: &[ConstrainedClause], w: Window) -> usize {
    let preds: BTreeMap<&Symbol, usize> = n.iter().flat_map(|c| c.literals.iter().map(|l| (&l.atom.pred, l.atom.args.len()))).collect();
    let width = (w.hi - w.lo + 1) as usize;
    preds.values().map(|a| width.pow(*a as u32)).sum::<usize>() + 2
}

/// Widening the window by one adds no fixpoint points inside the original
/// window.
pub fn window_closed(n: &[ConstrainedClause], w: Window, theory: Theory) -> Result<bool> {
    let inner = tn_lfp(n, w, step_bound(n, w), theory)?;
    let wide = w.widened(1);
    let outer = tn_lfp(n, wide, step_bound(n, wide), theory)?;
    Ok(inner.reached && outer.reached && outer.interpretation.restricted_to(w) == inner.interpretation)
}

/// `T_N(I) ⊆ I`: the interpretation is a model within the window.
pub fn is_window_model(n: &[ConstrainedClause], i: &FiniteInterpretation, w: Window, theory: Theory) -> Result<bool> {
    Ok(tn_step(n, i, w, theory)?.is_subset(i))
}
