//! Worked examples checked against values enumerated directly from the
//! clause constraints.

mod common;

use std::collections::BTreeSet;

use chcmodel::frontend::parse;
use chcmodel::model::construct_model;
use chcmodel::oracle::{restrict_model, tn_lfp, Window};
use chcmodel::saturation::{saturate, Limits, Status};
use chcmodel::{Symbol, Theory};

const REPAIR_LIA: &str = "
(theory lia)
(pred P 1)
(pred Q 1)
(clause C1 (< x 0) (P x))
(clause C2 (> x 0) (P x))
(clause C3 (< x 1) (Q x))
(clause C4 (<= x 0) (=> (Q x) (P x)))
";

fn points(xs: impl IntoIterator<Item = i64>) -> BTreeSet<Vec<i64>> {
    xs.into_iter().map(|x| vec![x]).collect()
}

#[test]
fn repair_example_fixpoint_on_window() {
    let p = parse(REPAIR_LIA).unwrap();
    let n = p.clause_set().unwrap();
    let w = Window::new(-2, 2).unwrap();
    let fp = tn_lfp(&n, w, 100, Theory::Lia).unwrap();
    assert!(fp.reached);
    // Q comes from C3 alone; P from C1, C2, and C4 applied to Q
    let q = points((-2..=2).filter(|&x| x < 1));
    let p_pts = points((-2..=2).filter(|&x| x != 0 || (x <= 0 && q.contains(&vec![x]))));
    assert_eq!(fp.interpretation.get(&Symbol::new("Q")), Some(&q));
    assert_eq!(fp.interpretation.get(&Symbol::new("P")), Some(&p_pts));
    assert_eq!(p_pts, points(-2..=2));
}

#[test]
fn repaired_model_covers_window() {
    let p = parse(REPAIR_LIA).unwrap();
    let n = p.clause_set().unwrap();
    let ord = p.order().unwrap();
    let st = saturate(&n, &ord, Theory::Lia, Limits::default()).unwrap();
    assert_eq!(st.status, Status::Saturated);
    let kept: Vec<_> = st.clauses().into_iter().cloned().collect();
    let m = construct_model(&kept, &ord, Theory::Lia).unwrap();
    let w = Window::new(-2, 2).unwrap();
    let r = restrict_model(&m.model, w).unwrap();
    assert_eq!(r.get(&Symbol::new("P")), Some(&points(-2..=2)));
    assert_eq!(r, tn_lfp(&n, w, 100, Theory::Lia).unwrap().interpretation);
}

#[test]
fn square_example_restricted_to_window() {
    let p = common::example("ex3-lia.chc");
    let n = p.clause_set().unwrap();
    let ord = p.order().unwrap();
    let m = construct_model(&n, &ord, Theory::Lia).unwrap();
    let r = restrict_model(&m.model, Window::new(0, 4).unwrap()).unwrap();
    let square = |lo: i64, hi: i64| -> BTreeSet<Vec<i64>> {
        (lo..=hi).flat_map(|x| (lo..=hi).map(move |y| vec![x, y])).collect()
    };
    assert_eq!(r.get(&Symbol::new("P")), Some(&square(0, 2)));
    assert_eq!(r.get(&Symbol::new("Q")), Some(&square(1, 4)));
}
