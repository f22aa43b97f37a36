//! Hierarchic ordered resolution with tautology deletion and subsumption.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::clause::{ClauseId, ConstrainedClause, Literal, Provenance, Symbol};
use crate::error::Result;
use crate::la::{self, Formula};
use crate::order::{maximal_literals, PrecedenceOrder};
use crate::subst::unify_atoms;
use crate::term::{LaAtom, Theory, Var};

/// Fresh name `base_k` not in `used`.
fn fresh_name(base: &str, used: &BTreeSet<Var>) -> Var {
    (1..)
        .map(|k| Var::named(&format!("{base}_{k}")))
        .find(|v| !used.contains(v))
        .unwrap()
}

/// All hierarchical resolvents of `c` and `d` on ≺-maximal literals of
/// opposite polarity. `d` is renamed apart from `c` first. Constraints are
/// the plain multiset union, instantiated by the unifier; conclusions carry
/// [`ClauseId::UNASSIGNED`].
pub fn resolve(c: &ConstrainedClause, d: &ConstrainedClause, ord: &PrecedenceOrder) -> Result<Vec<ConstrainedClause>> {
    if c.is_empty_fo() || d.is_empty_fo() {
        return Ok(Vec::new());
    }
    let c_vars = c.vars();
    let mut used = c_vars.clone();
    used.extend(d.vars());
    let mut renaming = BTreeMap::new();
    let mut origin = BTreeMap::new();
    for v in d.vars() {
        if c_vars.contains(&v) {
            let w = fresh_name(&v.name(), &used);
            used.insert(w.clone());
            origin.insert(w.clone(), v.clone());
            renaming.insert(v, w);
        }
    }
    let d2 = d.rename(&renaming);
    let max_c = maximal_literals(c, ord)?;
    let max_d = maximal_literals(&d2, ord)?;
    let mut out = Vec::new();
    for mc in &max_c {
        for md in &max_d {
            let l1 = &c.literals[mc.index];
            let l2 = &d2.literals[md.index];
            if l1.positive == l2.positive {
                continue;
            }
            let Some(sigma) = unify_atoms(&l1.atom, &l2.atom) else {
                continue;
            };
            let mut literals: Vec<Literal> = Vec::new();
            for (i, l) in c.literals.iter().enumerate() {
                if i != mc.index {
                    literals.push(sigma.apply_literal(l)?);
                }
            }
            for (j, l) in d2.literals.iter().enumerate() {
                if j != md.index {
                    literals.push(sigma.apply_literal(l)?);
                }
            }
            let constraint = c
                .constraint
                .iter()
                .chain(&d2.constraint)
                .map(|a| sigma.apply_la_atom(a))
                .collect();
            let r = ConstrainedClause {
                id: ClauseId::UNASSIGNED,
                name: None,
                constraint,
                literals,
                provenance: Provenance::Resolvent {
                    left: c.id,
                    right: d.id,
                    left_literal: mc.index,
                    right_literal: md.index,
                    unifier: sigma,
                },
            };
            out.push(tidy(r, &origin));
        }
    }
    Ok(out)
}

/// Map renamed-apart variables back to their original names where that
/// causes no clash.
fn tidy(c: ConstrainedClause, origin: &BTreeMap<Var, Var>) -> ConstrainedClause {
    let vars = c.vars();
    let mut back = BTreeMap::new();
    let mut taken = vars.clone();
    for v in &vars {
        if let Some(o) = origin.get(v) {
            if !taken.contains(o) {
                taken.insert(o.clone());
                back.insert(v.clone(), o.clone());
            }
        }
    }
    if back.is_empty() {
        c
    } else {
        c.rename(&back)
    }
}

/// Tautology: unsatisfiable constraint or complementary identical atoms.
pub fn is_tautology(c: &ConstrainedClause, theory: Theory) -> bool {
    c.has_complementary_literals() || la::is_satisfiable(&Formula::conjunction_of(&c.constraint), theory).is_none()
}

/// `d` subsumes `c`: some `ρ` maps the first-order part of `d` into that of
/// `c` as a sub-multiset, and `Λc ⊨ ∃z. Λdρ` where `z` are the
/// constraint-only variables of `d`.
pub fn subsumes(d: &ConstrainedClause, c: &ConstrainedClause, theory: Theory) -> bool {
    if d.literals.len() > c.literals.len() {
        return false;
    }
    // every (polarity, predicate) must occur at least as often in c
    let mut counts: BTreeMap<(bool, &Symbol), isize> = BTreeMap::new();
    for l in &c.literals {
        *counts.entry((l.positive, &l.atom.pred)).or_default() += 1;
    }
    for l in &d.literals {
        let k = counts.entry((l.positive, &l.atom.pred)).or_default();
        *k -= 1;
        if *k < 0 {
            return false;
        }
    }
    // match the literals with the fewest candidates first
    let mut order: Vec<usize> = (0..d.literals.len()).collect();
    order.sort_by_key(|&i| {
        let l = &d.literals[i];
        c.literals.iter().filter(|m| m.positive == l.positive && m.atom.pred == l.atom.pred).count()
    });
    let mut used = vec![false; c.literals.len()];
    let mut rho = BTreeMap::new();
    match_literals(d, &order, c, 0, &mut used, &mut rho, &mut |rho| constraint_subsumes(d, c, rho, theory))
}

#[allow(clippy::too_many_arguments)]
fn match_literals(
    d: &ConstrainedClause,
    order: &[usize],
    c: &ConstrainedClause,
    i: usize,
    used: &mut [bool],
    rho: &mut BTreeMap<Var, Var>,
    accept: &mut dyn FnMut(&BTreeMap<Var, Var>) -> bool,
) -> bool {
    if i == order.len() {
        return accept(rho);
    }
    let ld = &d.literals[order[i]];
    for (j, lc) in c.literals.iter().enumerate() {
        if used[j] || lc.positive != ld.positive || lc.atom.pred != ld.atom.pred {
            continue;
        }
        let mut added = Vec::new();
        let mut ok = true;
        for (a, b) in ld.atom.args.iter().zip(&lc.atom.args) {
            match rho.get(a) {
                Some(x) if x != b => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    rho.insert(a.clone(), b.clone());
                    added.push(a.clone());
                }
            }
        }
        if ok {
            used[j] = true;
            if match_literals(d, order, c, i + 1, used, rho, accept) {
                return true;
            }
            used[j] = false;
        }
        for a in added {
            rho.remove(&a);
        }
    }
    false
}

/// Cheap sufficient test: some renaming of the constraint-only variables of
/// `d` into variables of `c` turns every atom of `d` into an atom of `c`.
fn constraint_included(d: &ConstrainedClause, c: &ConstrainedClause, rho: &BTreeMap<Var, Var>) -> bool {
    let targets: BTreeSet<&LaAtom> = c.constraint.iter().collect();
    let c_vars: Vec<Var> = c.vars().into_iter().collect();
    include_from(&d.constraint, &targets, &c_vars, &mut rho.clone())
}

fn include_from(atoms: &[LaAtom], targets: &BTreeSet<&LaAtom>, c_vars: &[Var], map: &mut BTreeMap<Var, Var>) -> bool {
    let Some((a, rest)) = atoms.split_first() else {
        return true;
    };
    let free: Vec<Var> = a.vars().filter(|v| !map.contains_key(*v)).cloned().collect();
    if c_vars.is_empty() && !free.is_empty() {
        return false;
    }
    let mut choice = vec![0usize; free.len()];
    loop {
        for (v, &k) in free.iter().zip(&choice) {
            map.insert(v.clone(), c_vars[k].clone());
        }
        if targets.contains(&a.rename(map)) && include_from(rest, targets, c_vars, map) {
            return true;
        }
        let mut j = 0;
        while j < choice.len() && choice[j] + 1 == c_vars.len() {
            choice[j] = 0;
            j += 1;
        }
        if j == choice.len() {
            break;
        }
        choice[j] += 1;
    }
    for v in &free {
        map.remove(v);
    }
    false
}

/// Limits on the projection a subsumption test may build.
const MAX_STEP_ATOMS: usize = 20_000;
const MAX_TARGET_ATOMS: usize = 64;

fn constraint_subsumes(d: &ConstrainedClause, c: &ConstrainedClause, rho: &BTreeMap<Var, Var>, theory: Theory) -> bool {
    if constraint_included(d, c, rho) {
        return true;
    }
    let c_vars = c.vars();
    let mut map = rho.clone();
    let mut taken = c_vars.clone();
    for v in d.vars() {
        if let std::collections::btree_map::Entry::Vacant(e) = map.entry(v) {
            let w = fresh_name(&e.key().name(), &taken);
            taken.insert(w.clone());
            e.insert(w);
        }
    }
    let dc = Formula::conjunction_of(&d.constraint).rename(&map);
    // a sound redundancy test may give up; large integer projections are
    // costly to build and to entail
    let Some(target) = la::project_within(&c_vars, &dc, theory, MAX_STEP_ATOMS, MAX_TARGET_ATOMS) else {
        return false;
    };
    la::entails(&Formula::conjunction_of(&c.constraint), &target, theory)
}

/// Sound approximation of redundancy: tautologies and clauses subsumed by
/// a member of `n`.
pub fn is_redundant<'a>(c: &ConstrainedClause, n: impl IntoIterator<Item = &'a ConstrainedClause>, theory: Theory) -> bool {
    if is_tautology(c, theory) {
        return true;
    }
    let Some(c) = normalize(c.clone(), theory) else {
        return true;
    };
    n.into_iter().any(|d| subsumes(d, &c, theory))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub max_derived: usize,
    pub max_seconds: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_derived: 10_000,
            max_seconds: 60.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Running,
    Saturated,
    Refuted(ClauseId),
    ResourceOut,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Saturated => "saturated",
            Status::Refuted(_) => "refuted",
            Status::ResourceOut => "resource_out",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    Input(ClauseId),
    Given(ClauseId),
    Derived { id: ClauseId, left: ClauseId, right: ClauseId },
    Tautology { left: ClauseId, right: ClauseId },
    Discarded { id: ClauseId },
    Redundant { left: ClauseId, right: ClauseId },
    ForwardSubsumed { id: ClauseId },
    BackwardSubsumed { id: ClauseId, by: ClauseId },
    Refuted(ClauseId),
    Finished(Status),
}

/// Persistent state of the given-clause loop.
#[derive(Clone, Debug)]
pub struct SaturationState {
    store: BTreeMap<ClauseId, ConstrainedClause>,
    usable: BTreeSet<(usize, usize, ClauseId)>,
    worked_off: BTreeSet<ClauseId>,
    pub derived_count: usize,
    pub status: Status,
    pub trace: Vec<TraceEvent>,
    next_id: u32,
}

impl SaturationState {
    fn new() -> Self {
        SaturationState {
            store: BTreeMap::new(),
            usable: BTreeSet::new(),
            worked_off: BTreeSet::new(),
            derived_count: 0,
            status: Status::Running,
            trace: Vec::new(),
            next_id: 1,
        }
    }

    pub fn clause(&self, id: ClauseId) -> Option<&ConstrainedClause> {
        self.store.get(&id)
    }

    pub fn worked_off(&self) -> Vec<&ConstrainedClause> {
        self.worked_off.iter().map(|id| &self.store[id]).collect()
    }

    pub fn usable(&self) -> Vec<&ConstrainedClause> {
        self.usable.iter().map(|(_, _, id)| &self.store[id]).collect()
    }

    /// Worked-off and usable clauses, ordered by id.
    pub fn clauses(&self) -> Vec<&ConstrainedClause> {
        let mut ids: Vec<ClauseId> = self.worked_off.iter().copied().collect();
        ids.extend(self.usable.iter().map(|(_, _, id)| *id));
        ids.sort();
        ids.iter().map(|id| &self.store[id]).collect()
    }

    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().map(|e| self.render(e)).collect()
    }

    fn render(&self, e: &TraceEvent) -> String {
        let show = |id: &ClauseId| match self.store.get(id) {
            Some(c) => format!("{id}: {c}"),
            None => id.to_string(),
        };
        match e {
            TraceEvent::Input(id) => format!("input {}", show(id)),
            TraceEvent::Given(id) => format!("given {id}"),
            TraceEvent::Derived { id, left, right } => format!("derived {} from {left} x {right}", show(id)),
            TraceEvent::Tautology { left, right } => format!("tautology from {left} x {right}"),
            TraceEvent::Discarded { id } => format!("discarded {id} as tautology"),
            TraceEvent::Redundant { left, right } => format!("redundant from {left} x {right}"),
            TraceEvent::ForwardSubsumed { id } => format!("subsumed {id}"),
            TraceEvent::BackwardSubsumed { id, by } => format!("subsumed {id} by {by}"),
            TraceEvent::Refuted(id) => format!("refuted {}", show(id)),
            TraceEvent::Finished(s) => format!("status {}", s.name()),
        }
    }

    fn register(&mut self, mut c: ConstrainedClause) -> ClauseId {
        if c.id == ClauseId::UNASSIGNED || self.store.contains_key(&c.id) {
            c.id = ClauseId(self.next_id);
        }
        self.next_id = self.next_id.max(c.id.0 + 1);
        let id = c.id;
        self.store.insert(id, c);
        id
    }

    fn push_usable(&mut self, id: ClauseId) {
        let c = &self.store[&id];
        self.usable.insert((c.literals.len(), c.atom_count(), id));
    }

    fn finish(&mut self, s: Status) {
        self.status = s;
        self.trace.push(TraceEvent::Finished(s));
    }
}

impl fmt::Display for SaturationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.trace_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Simplify the constraint of a fresh conclusion; `None` if it is
/// unsatisfiable.
fn normalize(mut c: ConstrainedClause, theory: Theory) -> Option<ConstrainedClause> {
    c.constraint = la::simplify_constraint(&c.constraint, theory)?;
    Some(c)
}

/// Given-clause saturation loop.
///
/// Clauses are selected by (literal count, atom count, id), resolved
/// against every worked-off clause, and conclusions are kept unless they
/// are tautologies or subsumed. New clauses also remove the clauses they
/// subsume.
pub fn saturate(
    n0: &[ConstrainedClause],
    ord: &PrecedenceOrder,
    theory: Theory,
    limits: Limits,
) -> Result<SaturationState> {
    let start = Instant::now();
    let budget = Duration::from_secs_f64(limits.max_seconds.max(0.0));
    let mut st = SaturationState::new();
    for c in n0 {
        for l in &c.literals {
            ord.rank(l.pred())?;
        }
        st.next_id = st.next_id.max(c.id.0 + 1);
    }
    for c in n0 {
        let id = st.register(c.clone());
        st.trace.push(TraceEvent::Input(id));
        if is_tautology(c, theory) {
            st.trace.push(TraceEvent::Discarded { id });
            continue;
        }
        if c.is_empty_fo() {
            st.trace.push(TraceEvent::Refuted(id));
            st.finish(Status::Refuted(id));
            return Ok(st);
        }
        st.push_usable(id);
    }

    while let Some(key) = st.usable.pop_first() {
        if start.elapsed() > budget {
            st.usable.insert(key);
            st.finish(Status::ResourceOut);
            return Ok(st);
        }
        let given_id = key.2;
        let given = st.store[&given_id].clone();
        if st.worked_off.iter().any(|id| subsumes(&st.store[id], &given, theory)) {
            st.trace.push(TraceEvent::ForwardSubsumed { id: given_id });
            continue;
        }
        st.trace.push(TraceEvent::Given(given_id));
        let victims: Vec<ClauseId> = st
            .worked_off
            .iter()
            .copied()
            .filter(|id| subsumes(&given, &st.store[id], theory))
            .collect();
        for id in victims {
            st.worked_off.remove(&id);
            st.trace.push(TraceEvent::BackwardSubsumed { id, by: given_id });
        }
        st.worked_off.insert(given_id);

        let partners: Vec<ClauseId> = st.worked_off.iter().copied().collect();
        for pid in partners {
            let partner = st.store[&pid].clone();
            for r in resolve(&given, &partner, ord)? {
                if start.elapsed() > budget {
                    st.finish(Status::ResourceOut);
                    return Ok(st);
                }
                st.derived_count += 1;
                let Some(r) = normalize(r, theory) else {
                    st.trace.push(TraceEvent::Tautology { left: given_id, right: pid });
                    continue;
                };
                if r.has_complementary_literals() {
                    st.trace.push(TraceEvent::Tautology { left: given_id, right: pid });
                    continue;
                }
                if r.is_empty_fo() {
                    let id = st.register(r);
                    st.trace.push(TraceEvent::Refuted(id));
                    st.finish(Status::Refuted(id));
                    return Ok(st);
                }
                let kept = st.worked_off.iter().chain(st.usable.iter().map(|(_, _, id)| id));
                if kept.into_iter().any(|id| subsumes(&st.store[id], &r, theory)) {
                    st.trace.push(TraceEvent::Redundant { left: given_id, right: pid });
                    continue;
                }
                let id = st.register(r);
                st.trace.push(TraceEvent::Derived { id, left: given_id, right: pid });
                let new = st.store[&id].clone();
                let victims: Vec<(usize, usize, ClauseId)> =
                    st.usable.iter().copied().filter(|k| subsumes(&new, &st.store[&k.2], theory)).collect();
                for k in victims {
                    st.usable.remove(&k);
                    st.trace.push(TraceEvent::BackwardSubsumed { id: k.2, by: id });
                }
                st.push_usable(id);
                if st.derived_count >= limits.max_derived || start.elapsed() > budget {
                    st.finish(Status::ResourceOut);
                    return Ok(st);
                }
            }
        }
    }
    st.finish(Status::Saturated);
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{FoAtom, Symbol};
    use crate::term::{rat, LaAtom, LinTerm, Rel};

    fn v(n: &str) -> Var {
        Var::named(n)
    }
    fn atom(p: &str, args: &[&str]) -> FoAtom {
        FoAtom::new(Symbol::new(p), args.iter().map(|a| v(a)).collect())
    }
    fn cmp(x: &str, rel: Rel, k: i64) -> LaAtom {
        LaAtom::new(&LinTerm::var(v(x)), rel, &LinTerm::constant(rat(k)))
    }
    fn ord(names: &[&str]) -> PrecedenceOrder {
        PrecedenceOrder::new(names.iter().map(|n| Symbol::new(n)).collect()).unwrap()
    }
    fn clause(id: u32, constraint: Vec<LaAtom>, lits: Vec<Literal>) -> ConstrainedClause {
        ConstrainedClause::new(ClauseId(id), constraint, lits).unwrap()
    }

    fn example4() -> Vec<ConstrainedClause> {
        vec![
            clause(1, vec![cmp("x", Rel::Lt, 0)], vec![Literal::pos(atom("P", &["x"]))]),
            clause(2, vec![cmp("x", Rel::Gt, 0)], vec![Literal::pos(atom("P", &["x"]))]),
            clause(3, vec![cmp("x", Rel::Lt, 1)], vec![Literal::pos(atom("Q", &["x"]))]),
            clause(
                4,
                vec![cmp("x", Rel::Le, 0)],
                vec![Literal::neg(atom("Q", &["x"])), Literal::pos(atom("P", &["x"]))],
            ),
        ]
    }

    #[test]
    fn resolvent_of_c3_and_c4() {
        let n = example4();
        let rs = resolve(&n[2], &n[3], &ord(&["P", "Q"])).unwrap();
        assert_eq!(rs.len(), 1);
        let r = &rs[0];
        assert_eq!(r.literals, vec![Literal::pos(atom("P", &["x"]))]);
        let mut expected = vec![cmp("x", Rel::Lt, 1), cmp("x", Rel::Le, 0)];
        expected.sort();
        let mut got = r.constraint.clone();
        got.sort();
        assert_eq!(got, expected);
        let simplified = la::simplify_constraint(&r.constraint, Theory::Lra).unwrap();
        assert_eq!(simplified, vec![cmp("x", Rel::Le, 0)]);
    }

    #[test]
    fn positive_maximal_literals_do_not_resolve() {
        // Example 3: both maximal literals are positive
        let c1 = clause(1, vec![], vec![Literal::pos(atom("P", &["x", "y"]))]);
        let c2 = clause(
            2,
            vec![],
            vec![Literal::neg(atom("P", &["xp", "yp"])), Literal::pos(atom("Q", &["xq", "yq"]))],
        );
        assert!(resolve(&c1, &c2, &ord(&["P", "Q"])).unwrap().is_empty());
    }

    #[test]
    fn complementary_units_give_empty_clause() {
        let c = clause(1, vec![], vec![Literal::pos(atom("P", &["x"]))]);
        let d = clause(2, vec![], vec![Literal::neg(atom("P", &["y"]))]);
        let rs = resolve(&c, &d, &ord(&["P"])).unwrap();
        assert_eq!(rs.len(), 1);
        assert!(rs[0].is_empty_fo() && rs[0].constraint.is_empty());
        let st = saturate(&[c, d], &ord(&["P"]), Theory::Lra, Limits::default()).unwrap();
        assert!(matches!(st.status, Status::Refuted(_)));
    }

    #[test]
    fn redundancy_examples() {
        let p = || vec![Literal::pos(atom("P", &["x"]))];
        let taut = clause(1, vec![cmp("x", Rel::Lt, 0), cmp("x", Rel::Gt, 0)], p());
        assert!(is_redundant(&taut, [], Theory::Lra));
        let weak = clause(2, vec![cmp("x", Rel::Lt, 1)], p());
        let strong = clause(3, vec![cmp("x", Rel::Le, 0)], p());
        assert!(is_redundant(&strong, [&weak], Theory::Lra));
        assert!(!is_redundant(&weak, [&strong], Theory::Lra));
        let n = example4();
        assert!(!is_redundant(&n[3], &n[..3], Theory::Lra));
    }

    #[test]
    fn subsumption_projects_constraint_only_variables() {
        // z > x ∥ P(x) is valid for every x, so it subsumes x >= 5 ∥ P(x)
        let gt = LaAtom::new(&LinTerm::var(v("z")), Rel::Gt, &LinTerm::var(v("x")));
        let d = clause(1, vec![gt], vec![Literal::pos(atom("P", &["x"]))]);
        let c = clause(2, vec![cmp("x", Rel::Ge, 5)], vec![Literal::pos(atom("P", &["x"]))]);
        assert!(subsumes(&d, &c, Theory::Lra));
    }

    #[test]
    fn example4_saturates_with_resolvent() {
        let st = saturate(&example4(), &ord(&["P", "Q"]), Theory::Lra, Limits::default()).unwrap();
        assert_eq!(st.status, Status::Saturated, "{st}");
        let ids: Vec<u32> = st.clauses().iter().map(|c| c.id.0).collect();
        // C5 subsumes C1 and C4
        assert_eq!(ids, vec![2, 3, 5], "{st}");
        let c5 = st.clause(ClauseId(5)).unwrap();
        assert_eq!(c5.constraint, vec![cmp("x", Rel::Le, 0)]);
        assert_eq!(c5.literals, vec![Literal::pos(atom("P", &["x"]))]);
    }
}
