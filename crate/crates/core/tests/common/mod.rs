//! Shared helpers for the integration tests: fixture loading, random clause
//! sets and a small arithmetic language with its own evaluator and a
//! Fourier-Motzkin decision procedure, independent of the library's `la`.

#![allow(dead_code)]

use std::path::PathBuf;

use chcmodel::frontend::{self, Problem};
use chcmodel::{
    rat, ClauseId, ConstrainedClause, FoAtom, Formula, LaAtom, LinTerm, Literal, PrecedenceOrder, Rational, Rel,
    Symbol, Var,
};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn load(path: &PathBuf) -> Problem {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    frontend::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn example(name: &str) -> Problem {
    load(&repo_root().join("examples").join(name))
}

/// Every window-carrying LIA fixture: the test fixtures plus the integer
/// version of the square example.
pub fn lia_fixtures() -> Vec<(String, Problem)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "chc"))
        .collect();
    paths.sort();
    paths.push(repo_root().join("examples/ex3-lia.chc"));
    paths
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), load(&p)))
        .collect()
}

pub fn var(i: usize) -> Var {
    Var::named(["x", "y", "z", "u", "v", "w"][i])
}

// ---------------------------------------------------------------------------
// test-local arithmetic

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TRel {
    Le,
    Lt,
    Eq,
    Ne,
}

/// `Σ coeffs[i]·v_i + k  REL  0`.
#[derive(Clone, Debug)]
pub struct TAtom {
    pub coeffs: Vec<i64>,
    pub k: i64,
    pub rel: TRel,
}

#[derive(Clone, Debug)]
pub enum TForm {
    Atom(TAtom),
    Not(Box<TForm>),
    And(Vec<TForm>),
    Or(Vec<TForm>),
}

impl TAtom {
    fn value(&self, point: &[Rational]) -> Rational {
        let mut s = rat(self.k);
        for (c, x) in self.coeffs.iter().zip(point) {
            s += rat(*c) * x;
        }
        s
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        let v = self.value(point);
        match self.rel {
            TRel::Le => !v.is_positive(),
            TRel::Lt => v.is_negative(),
            TRel::Eq => v.is_zero(),
            TRel::Ne => !v.is_zero(),
        }
    }

    pub fn to_la(&self, vars: &[Var]) -> LaAtom {
        let mut t = LinTerm::constant(rat(self.k));
        for (c, v) in self.coeffs.iter().zip(vars) {
            t = t.plus(&LinTerm::scaled_var(rat(*c), v.clone()));
        }
        let rel = match self.rel {
            TRel::Le => Rel::Le,
            TRel::Lt => Rel::Lt,
            TRel::Eq => Rel::Eq,
            TRel::Ne => Rel::Ne,
        };
        LaAtom::new(&t, rel, &LinTerm::zero())
    }

    /// `lo <= v_i <= hi` as two atoms.
    pub fn bounds(i: usize, n: usize, lo: i64, hi: i64) -> [TAtom; 2] {
        let mut up = vec![0; n];
        up[i] = 1;
        let mut down = vec![0; n];
        down[i] = -1;
        [
            TAtom {
                coeffs: up,
                k: -hi,
                rel: TRel::Le,
            },
            TAtom {
                coeffs: down,
                k: lo,
                rel: TRel::Le,
            },
        ]
    }
}

impl TForm {
    pub fn holds(&self, point: &[Rational]) -> bool {
        match self {
            TForm::Atom(a) => a.holds(point),
            TForm::Not(f) => !f.holds(point),
            TForm::And(xs) => xs.iter().all(|x| x.holds(point)),
            TForm::Or(xs) => xs.iter().any(|x| x.holds(point)),
        }
    }

    pub fn to_formula(&self, vars: &[Var]) -> Formula {
        match self {
            TForm::Atom(a) => Formula::atom(a.to_la(vars)),
            TForm::Not(f) => Formula::not(f.to_formula(vars)),
            TForm::And(xs) => Formula::and(xs.iter().map(|x| x.to_formula(vars))),
            TForm::Or(xs) => Formula::or(xs.iter().map(|x| x.to_formula(vars))),
        }
    }
}

pub fn random_atom(rng: &mut impl Rng, n: usize, kmax: i64) -> TAtom {
    loop {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        if n > 0 && coeffs.iter().all(|c| *c == 0) {
            continue;
        }
        let rel = *[TRel::Le, TRel::Lt, TRel::Eq, TRel::Ne].choose(rng).unwrap();
        return TAtom {
            coeffs,
            k: rng.gen_range(-kmax..=kmax),
            rel,
        };
    }
}

pub fn random_form(rng: &mut impl Rng, n: usize, depth: u32) -> TForm {
    if depth == 0 || rng.gen_bool(0.35) {
        return TForm::Atom(random_atom(rng, n, 6));
    }
    match rng.gen_range(0..3) {
        0 => TForm::Not(Box::new(random_form(rng, n, depth - 1))),
        1 => TForm::And((0..rng.gen_range(2..=3)).map(|_| random_form(rng, n, depth - 1)).collect()),
        _ => TForm::Or((0..rng.gen_range(2..=3)).map(|_| random_form(rng, n, depth - 1)).collect()),
    }
}

/// `Σ coeffs[i]·v_i + k < 0` (strict) or `<= 0`.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<Rational>,
    k: Rational,
    strict: bool,
}

impl Ineq {
    fn from(a: &TAtom, negate: bool) -> Ineq {
        let s = if negate { -1 } else { 1 };
        Ineq {
            coeffs: a.coeffs.iter().map(|c| rat(s * c)).collect(),
            k: rat(s * a.k),
            strict: false,
        }
    }
}

/// Disjunctive normal form over `Ineq`.
fn dnf(f: &TForm, positive: bool) -> Vec<Vec<Ineq>> {
    match (f, positive) {
        (TForm::Atom(a), _) => {
            let rel = match (a.rel, positive) {
                (r, true) => r,
                (TRel::Le, false) => {
                    // t > 0, i.e. -t < 0
                    let mut i = Ineq::from(a, true);
                    i.strict = true;
                    return vec![vec![i]];
                }
                (TRel::Lt, false) => return vec![vec![Ineq::from(a, true)]],
                (TRel::Eq, false) => TRel::Ne,
                (TRel::Ne, false) => TRel::Eq,
            };
            match rel {
                TRel::Le => vec![vec![Ineq::from(a, false)]],
                TRel::Lt => {
                    let mut i = Ineq::from(a, false);
                    i.strict = true;
                    vec![vec![i]]
                }
                TRel::Eq => vec![vec![Ineq::from(a, false), Ineq::from(a, true)]],
                TRel::Ne => {
                    let mut lt = Ineq::from(a, false);
                    lt.strict = true;
                    let mut gt = Ineq::from(a, true);
                    gt.strict = true;
                    vec![vec![lt], vec![gt]]
                }
            }
        }
        (TForm::Not(g), p) => dnf(g, !p),
        (TForm::And(xs), true) | (TForm::Or(xs), false) => {
            let mut acc = vec![Vec::new()];
            for x in xs {
                let d = dnf(x, positive);
                let mut next = Vec::new();
                for a in &acc {
                    for b in &d {
                        let mut c: Vec<Ineq> = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        (TForm::Or(xs), true) | (TForm::And(xs), false) => xs.iter().flat_map(|x| dnf(x, positive)).collect(),
    }
}

fn fm_feasible(mut system: Vec<Ineq>, n: usize) -> bool {
    for v in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for i in system {
            if i.coeffs[v].is_positive() {
                pos.push(i);
            } else if i.coeffs[v].is_negative() {
                neg.push(i);
            } else {
                rest.push(i);
            }
        }
        for p in &pos {
            for q in &neg {
                // scale so the coefficients of v cancel
                let a = p.coeffs[v].clone();
                let b = -q.coeffs[v].clone();
                rest.push(Ineq {
                    coeffs: p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x * &b + y * &a).collect(),
                    k: &p.k * &b + &q.k * &a,
                    strict: p.strict || q.strict,
                });
            }
        }
        system = rest;
    }
    system
        .iter()
        .all(|i| if i.strict { i.k.is_negative() } else { !i.k.is_positive() })
}

/// Satisfiability over the reals by DNF and Fourier-Motzkin elimination.
pub fn fm_satisfiable(f: &TForm, n: usize) -> bool {
    dnf(f, true).into_iter().any(|c| fm_feasible(c, n))
}

// ---------------------------------------------------------------------------
// random Horn clause sets

pub struct RandomSignature {
    pub preds: Vec<(Symbol, usize)>,
}

pub fn random_signature(rng: &mut impl Rng, max_preds: usize) -> RandomSignature {
    let n = rng.gen_range(1..=max_preds);
    RandomSignature {
        preds: (0..n).map(|i| (Symbol::new(&format!("P{i}")), rng.gen_range(0..=2))).collect(),
    }
}

impl RandomSignature {
    pub fn random_order(&self, rng: &mut impl Rng) -> PrecedenceOrder {
        let mut syms: Vec<Symbol> = self.preds.iter().map(|(p, _)| p.clone()).collect();
        syms.shuffle(rng);
        PrecedenceOrder::new(syms).unwrap()
    }

    fn random_atom(&self, rng: &mut impl Rng, pool: usize) -> FoAtom {
        let (p, a) = self.preds.choose(rng).unwrap();
        FoAtom::new(p.clone(), (0..*a).map(|_| var(rng.gen_range(0..pool))).collect())
    }

    /// A Horn clause over at most `pool` variables with integer
    /// coefficients in [-3, 3].
    pub fn random_clause(&self, rng: &mut impl Rng, id: u32, pool: usize, goal_prob: f64) -> ConstrainedClause {
        let mut literals: Vec<Literal> = (0..rng.gen_range(0..=2)).map(|_| Literal::neg(self.random_atom(rng, pool))).collect();
        if literals.is_empty() || !rng.gen_bool(goal_prob) {
            literals.push(Literal::pos(self.random_atom(rng, pool)));
        }
        let constraint = (0..rng.gen_range(0..=2))
            .map(|_| {
                let a = random_atom(rng, pool, 3);
                a.to_la(&(0..pool).map(var).collect::<Vec<_>>())
            })
            .collect();
        ConstrainedClause::new(ClauseId(id), constraint, literals).unwrap()
    }

    pub fn random_clause_set(&self, rng: &mut impl Rng, goal_prob: f64) -> Vec<ConstrainedClause> {
        let n = rng.gen_range(2..=5);
        (1..=n).map(|id| self.random_clause(rng, id, 3, goal_prob)).collect()
    }
}
