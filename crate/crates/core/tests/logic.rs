use std::collections::BTreeSet;

use lph::graph::*;
use lph::logic::ast::*;
use lph::logic::library::*;
use lph::logic::sugar::unfold_within;
use lph::logic::{classify, evaluate, evaluate_at, evaluate_with, expand_sugar, nesting_radius, parse};
use lph::logic::{Assignment, EvalOptions, Fragment, FragmentTag, Relation, SearchCaps};
use lph::logic::eval::Strategy as Search;
use lph::{Error, LabeledGraph, Structure};
use proptest::prelude::*;

fn s_of(g: &LabeledGraph) -> Structure {
    structural_representation(g).unwrap()
}

fn labeled(g: LabeledGraph, labels: &[&str]) -> LabeledGraph {
    g.with_labels(labels.iter().map(|s| s.to_string()).collect())
}

fn bits() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn sat(s: &Structure, f: &Formula) -> bool {
    evaluate(s, f, &Assignment::new()).unwrap()
}

/// Brute-force 3-coloring over all 3^n color vectors.
fn three_col_oracle(g: &LabeledGraph) -> bool {
    let n = g.node_count();
    (0..3usize.pow(n as u32)).any(|mut code| {
        let mut c = vec![0; n];
        for slot in c.iter_mut() {
            *slot = code % 3;
            code /= 3;
        }
        g.edges().iter().all(|&(a, b)| c[a] != c[b])
    })
}

#[test]
fn parse_examples() {
    assert_eq!(parse("A x . E y ~ x . bit1(y)").unwrap(), forall("x", exists_adj("y", "x", bit(1, "y"))));
    assert_eq!(parse("E2 X:1 . A x . X(x)").unwrap(), exists_so("X", 1, forall("x", rel("X", &["x"]))));
    assert!(matches!(parse("E y ~ y . true"), Err(Error::Syntax { .. })));
    assert!(matches!(parse("E2 X:1 . A x . X(x,x)"), Err(Error::ArityMismatch { .. })));
    assert!(matches!(parse("X(x) & X(x,y)"), Err(Error::ArityMismatch { .. })));
    assert!(matches!(parse("E x bit1(x)"), Err(Error::Syntax { .. })));
    assert!(matches!(parse("bit1(x) &"), Err(Error::Syntax { .. })));
}

#[test]
fn parse_precedence() {
    let f = parse("!bit1(x) & bit1(y) | x = y -> link1(x,y) -> link2(x,y) <-> true").unwrap();
    let expected = iff(
        implies(
            or(and(not(bit(1, "x")), bit(1, "y")), eq("x", "y")),
            implies(link(1, "x", "y"), link(2, "x", "y")),
        ),
        tt(),
    );
    assert_eq!(f, expected);
    assert_eq!(
        parse("EN <2> y ~ x . bit1(y) & bit1(x)").unwrap(),
        exists_within_node("y", "x", 2, and(bit(1, "y"), bit(1, "x")))
    );
}

#[test]
fn library_round_trips_through_printer() {
    for name in SENTENCES {
        let f = sentence(name).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f, "{name}");
    }
    for name in BODIES {
        let f = body(name).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f, "{name}");
    }
}

#[test]
fn sugar_examples() {
    let mut avoid = BTreeSet::from(["x".to_string(), "y".to_string()]);
    assert_eq!(unfold_within("y", "x", 0, bit(1, "y"), &mut avoid), bit(1, "x"));
    assert_eq!(expand_sugar(&exists_within("y", "x", 0, bit(1, "y"))), bit(1, "x"));
    assert_eq!(expand_sugar(&forall("x", bit(1, "x"))), not(exists("x", not(bit(1, "x")))));
    assert_eq!(
        expand_sugar(&exists_within("y", "x", 1, bit(1, "y"))),
        or(bit(1, "x"), exists_adj("y_1", "x", bit(1, "y_1")))
    );
}

#[test]
fn expanded_formulas_use_core_constructors_only() {
    for name in SENTENCES {
        let e = expand_sugar(&sentence(name).unwrap());
        e.walk(&mut |g| match g {
            Formula::And(..) | Formula::Implies(..) | Formula::Iff(..) => panic!("{name}: connective left"),
            Formula::Fo { q, range, node, .. } => {
                assert_eq!(*q, Quant::Exists);
                assert!(!node);
                assert!(!matches!(range, Range::Within(..)));
            }
            Formula::So { q, .. } => assert_eq!(*q, Quant::Exists),
            _ => {}
        });
    }
}

#[test]
fn substitution_avoids_capture() {
    // [y/x] under a binder of x's replacement must rename the binder.
    let f = exists_adj("y", "z", link(1, "x", "y"));
    let g = f.substitute("x", "y");
    assert!(g.free_fo().contains("y"));
    assert!(g.free_fo().contains("z"));
    assert_eq!(g.free_fo().len(), 2);
}

#[test]
fn classify_library() {
    let tag = |n: &str| classify(&sentence(n).unwrap()).unwrap();
    assert_eq!(tag("all-selected").class, Fragment::LFO);
    assert_eq!(tag("all-selected").level(), Some(0));
    assert_eq!(tag("3-colorable"), FragmentTag { class: Fragment::Sigma(1), monadic: true });
    assert_eq!(tag("exists-unselected"), FragmentTag { class: Fragment::Sigma(3), monadic: false });
    assert_eq!(tag("non-3-colorable").class, Fragment::Pi(4));
    assert_eq!(tag("hamiltonian").class, Fragment::Sigma(5));
    assert_eq!(tag("non-hamiltonian").class, Fragment::Pi(4));
}

#[test]
fn classify_other_shapes() {
    let c = |t: &str| classify(&parse(t).unwrap());
    assert_eq!(c("E y ~ x . bit1(y)").unwrap().class, Fragment::BFL);
    assert_eq!(c("A x . E y . x = y").unwrap().class, Fragment::FO);
    assert_eq!(c("!E x . !E y ~ x . bit1(y)").unwrap().class, Fragment::LFO);
    assert_eq!(c("!E2 X:1 . !A x . X(x)").unwrap().class, Fragment::Pi(1));
    assert!(matches!(c("!E2 X:1 . A x . X(x)"), Err(Error::NotClassifiable(_))));
    assert_eq!(c("A2 X:1 . A2 Y:1 . E2 Z:2 . A x . X(x)").unwrap().class, Fragment::Pi(2));
    assert!(matches!(c("A x . E2 X:1 . X(x)"), Err(Error::NotClassifiable(_))));
    assert!(matches!(c("E2 X:1 . A x . E y . X(y)"), Err(Error::NotClassifiable(_))));
}

#[test]
fn nesting_radius_examples() {
    assert_eq!(nesting_radius(&is_selected("x")), 2);
    assert_eq!(nesting_radius(&well_colored("x")), 1);
    assert_eq!(nesting_radius(&parse("bit1(x) & x = y").unwrap()), 0);
    assert_eq!(nesting_radius(&parse("E <3> y ~ x . E z ~ y . true").unwrap()), 4);
}

#[test]
fn evaluate_examples() {
    let f = all_selected();
    assert!(sat(&s_of(&labeled(LabeledGraph::path(2), &["1", "1"])), &f));
    assert!(!sat(&s_of(&labeled(LabeledGraph::path(2), &["1", "0"])), &f));
    assert!(!sat(&s_of(&labeled(LabeledGraph::path(2), &["1", "11"])), &f));
    let col = three_colorable();
    assert!(sat(&s_of(&LabeledGraph::complete(3)), &col));
    assert!(!sat(&s_of(&LabeledGraph::complete(4)), &col));
    let whole = parse("E2 X:1 . A x . X(x)").unwrap();
    assert!(sat(&s_of(&labeled(LabeledGraph::path(3), &["01", "", "1"])), &whole));
}

#[test]
fn exists_unselected_on_single_nodes() {
    let f = exists_unselected_node();
    for (label, expected) in [("1", false), ("0", true), ("", true), ("11", true)] {
        let g = LabeledGraph::build(&[("v", label)], &[]).unwrap();
        assert_eq!(sat(&s_of(&g), &f), expected, "label {label:?}");
    }
}

#[test]
fn all_selected_matches_label_check() {
    for g in enumerate_graphs(4, &bits()) {
        let expected = g.labels().iter().all(|l| l == "1");
        assert_eq!(sat(&s_of(&g), &all_selected()), expected);
    }
}

#[test]
fn three_colorable_matches_brute_force() {
    for g in enumerate_graphs(5, &[String::new()]) {
        assert_eq!(sat(&s_of(&g), &three_colorable()), three_col_oracle(&g));
    }
}

#[test]
fn strategies_agree_on_library() {
    let exhaustive = EvalOptions { strategy: Search::Exhaustive, caps: SearchCaps::default() };
    for g in enumerate_graphs(4, &[String::new()]) {
        let s = s_of(&g);
        for f in [three_colorable(), non_three_colorable()] {
            let a = evaluate(&s, &f, &Assignment::new()).unwrap();
            let b = evaluate_with(&s, &f, &Assignment::new(), &exhaustive).unwrap();
            assert_eq!(a, b);
        }
    }
    for g in enumerate_graphs(1, &bits()) {
        let s = s_of(&g);
        let f = exists_unselected_node();
        assert_eq!(sat(&s, &f), evaluate_with(&s, &f, &Assignment::new(), &exhaustive).unwrap());
    }
}

#[test]
fn hamiltonian_sentences_on_small_graphs() {
    let c3 = s_of(&LabeledGraph::cycle(3));
    let p3 = s_of(&LabeledGraph::path(3));
    assert!(sat(&c3, &hamiltonian()));
    assert!(!sat(&p3, &hamiltonian()));
    assert!(!sat(&c3, &non_hamiltonian()));
    assert!(sat(&p3, &non_hamiltonian()));
}

#[test]
fn evaluation_errors() {
    let s = s_of(&labeled(LabeledGraph::path(2), &["1", ""]));
    let a = Assignment::new();
    assert!(matches!(evaluate(&s, &parse("E x . bit2(x)").unwrap(), &a), Err(Error::SignatureMismatch(_))));
    assert!(matches!(evaluate(&s, &parse("E x . link3(x,x)").unwrap(), &a), Err(Error::SignatureMismatch(_))));
    assert!(matches!(evaluate(&s, &parse("bit1(x)").unwrap(), &a), Err(Error::UnboundVariable(_))));
    assert!(matches!(evaluate(&s, &parse("A x . X(x)").unwrap(), &a), Err(Error::UnboundVariable(_))));
    let big = s_of(&LabeledGraph::path(9));
    assert!(matches!(
        evaluate(&big, &parse("E2 X:1 . A x . X(x)").unwrap(), &a),
        Err(Error::SearchSpaceTooLarge { .. })
    ));
    assert!(matches!(
        evaluate(&s, &parse("E2 X:3 . true").unwrap(), &a),
        Err(Error::SearchSpaceTooLarge { .. })
    ));
    let loose = EvalOptions { caps: SearchCaps::unlimited(), ..Default::default() };
    assert!(evaluate_with(&big, &parse("E2 X:1 . A x . X(x)").unwrap(), &a, &loose).unwrap());
    let wrong = Assignment::new().with_so("X", Relation::new(2, []));
    assert!(matches!(evaluate(&s, &parse("E x . X(x)").unwrap(), &wrong), Err(Error::ArityMismatch { .. })));
}

#[test]
fn free_variables_are_read_from_the_assignment() {
    let g = labeled(LabeledGraph::path(2), &["1", "0"]);
    let s = s_of(&g);
    let x = is_selected("x");
    assert!(evaluate_at(&s, &x, "x", 0).unwrap());
    assert!(!evaluate_at(&s, &x, "x", 1).unwrap());
    let f = parse("A x . X(x) -> bit1(x)").unwrap();
    let ones = Relation::new(1, s.bit_set(1).into_iter().map(|e| vec![e]));
    assert!(evaluate(&s, &f, &Assignment::new().with_so("X", ones)).unwrap());
    let all = Relation::new(1, (0..s.len()).map(|e| vec![e]));
    assert!(!evaluate(&s, &f, &Assignment::new().with_so("X", all)).unwrap());
}

/// Random relation on a structure, as a deterministic function of a seed.
fn relation_from_seed(n: usize, arity: usize, seed: u64) -> Relation {
    let size = n.pow(arity as u32);
    let mut tuples = Vec::new();
    for idx in 0..size {
        let h = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left((idx % 64) as u32) ^ idx as u64;
        if h.wrapping_mul(0xBF58_476D_1CE4_E5B9) >> 63 == 1 {
            let mut t = vec![0; arity];
            let mut rest = idx;
            for slot in t.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            tuples.push(t);
        }
    }
    Relation::new(arity, tuples)
}

/// Library bodies paired with the relation variables they read.
fn bodies_with_relations() -> Vec<(&'static str, Formula, Vec<(&'static str, usize)>)> {
    let mut out = Vec::new();
    for name in BODIES {
        let f = body(name).unwrap();
        let mut rels: Vec<(&str, usize)> = Vec::new();
        for (r, k) in f.free_so() {
            let r: &'static str = ["C0", "C1", "C2", "P", "X", "Y", "H", "S", "C"]
                .into_iter()
                .find(|c| *c == r)
                .expect("known relation name");
            rels.push((r, k));
        }
        out.push((name, f, rels));
    }
    out
}

#[test]
fn bfl_bodies_are_local() {
    let graphs: Vec<LabeledGraph> =
        enumerate_graphs(4, &bits()).into_iter().chain(enumerate_graphs(4, &[String::new()])).collect();
    for (name, f, rels) in bodies_with_relations() {
        let r = nesting_radius(&f);
        for (gi, g) in graphs.iter().enumerate() {
            let full = s_of(g);
            for v in 0..g.node_count() {
                let local = structural_neighborhood(g, g.name(v), r).unwrap();
                let to_local: Vec<Option<usize>> = full.elements().iter().map(|e| local.find(e)).collect();
                let mut a_full = Assignment::new().with_fo("x", v);
                let mut a_local = Assignment::new().with_fo("x", local.find(full.element(v)).unwrap());
                for (ri, &(rname, k)) in rels.iter().enumerate() {
                    let rel = relation_from_seed(full.len(), k, (gi * 31 + v * 7 + ri) as u64);
                    let restricted = Relation::new(
                        k,
                        rel.tuples
                            .iter()
                            .filter_map(|t| t.iter().map(|&e| to_local[e]).collect::<Option<Vec<_>>>()),
                    );
                    a_full = a_full.with_so(rname, rel);
                    a_local = a_local.with_so(rname, restricted);
                }
                assert_eq!(
                    evaluate(&full, &f, &a_full).unwrap(),
                    evaluate(&local, &f, &a_local).unwrap(),
                    "{name} at {v} in graph {gi}"
                );
            }
        }
    }
}

/// Negation normal form, written independently of the sugar expander.
fn nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::Not(a) => nnf(a, !neg),
        Formula::And(a, b) if !neg => and(nnf(a, false), nnf(b, false)),
        Formula::And(a, b) => or(nnf(a, true), nnf(b, true)),
        Formula::Or(a, b) if !neg => or(nnf(a, false), nnf(b, false)),
        Formula::Or(a, b) => and(nnf(a, true), nnf(b, true)),
        Formula::Implies(a, b) => nnf(&or(not((**a).clone()), (**b).clone()), neg),
        Formula::Iff(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            nnf(&and(implies(a.clone(), b.clone()), implies(b, a)), neg)
        }
        Formula::Fo { q, var, range, node, body } => Formula::Fo {
            q: if neg { q.dual() } else { *q },
            var: var.clone(),
            range: range.clone(),
            node: *node,
            body: Box::new(nnf(body, neg)),
        },
        Formula::So { q, var, arity, body } => Formula::So {
            q: if neg { q.dual() } else { *q },
            var: var.clone(),
            arity: *arity,
            body: Box::new(nnf(body, neg)),
        },
        Formula::Const(b) => Formula::Const(*b != neg),
        atom if neg => not(atom.clone()),
        atom => atom.clone(),
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn arb_formula() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(VARS.to_vec());
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::Const),
        var.clone().prop_map(|v| bit(1, v)),
        (1..=2usize, var.clone(), var.clone()).prop_map(|(i, a, b)| link(i, a, b)),
        (var.clone(), var.clone()).prop_map(|(a, b)| eq(a, b)),
        (prop::sample::select(vec!["X", "Z"]), var.clone()).prop_map(|(r, a)| rel(r, &[a])),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let pair = (prop::sample::select(VARS.to_vec()), prop::sample::select(VARS.to_vec()));
        prop_oneof![
            inner.clone().prop_map(not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| iff(a, b)),
            (any::<bool>(), any::<bool>(), pair.clone(), 0..4usize, inner.clone()).prop_map(
                |(ex, node, (y, x), kind, body)| {
                    let q = if ex { Quant::Exists } else { Quant::Forall };
                    let range = match kind {
                        0 => Range::All,
                        1 | 2 => Range::Adjacent(x.to_string()),
                        _ => Range::Within(x.to_string(), 2),
                    };
                    let range = if range.anchor() == Some(y) { Range::All } else { range };
                    Formula::Fo { q, var: y.to_string(), range, node, body: Box::new(body) }
                }
            ),
            (any::<bool>(), inner).prop_map(|(ex, body)| {
                if ex {
                    exists_so("Z", 1, body)
                } else {
                    forall_so("Z", 1, body)
                }
            }),
        ]
    })
}

fn arb_graph() -> impl Strategy<Value = LabeledGraph> {
    (1..=3usize)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::sample::select(vec!["", "0", "1"]), n),
                prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
            )
        })
        .prop_map(|(n, labels, edge_bits)| {
            let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if edge_bits[k] {
                        edges.push((names[a].clone(), names[b].clone()));
                    }
                    k += 1;
                }
            }
            let nodes = names.iter().cloned().zip(labels.iter().map(|s| s.to_string()));
            LabeledGraph::from_parts(nodes, edges).unwrap()
        })
}

fn random_assignment(s: &Structure, seed: u64) -> Assignment {
    let n = s.len();
    let mut a = Assignment::new();
    for (i, v) in VARS.iter().enumerate() {
        a = a.with_fo(v, (seed as usize / (i + 1) + i) % n);
    }
    a.with_so("X", relation_from_seed(n, 1, seed)).with_so("Z", relation_from_seed(n, 1, seed ^ 0xABCD))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sugar_expansion_preserves_truth(f in arb_formula(), g in arb_graph(), seed in any::<u64>()) {
        let s = s_of(&g);
        let a = random_assignment(&s, seed);
        prop_assert_eq!(evaluate(&s, &f, &a).unwrap(), evaluate(&s, &expand_sugar(&f), &a).unwrap());
    }

    #[test]
    fn negation_normal_form_preserves_truth(f in arb_formula(), g in arb_graph(), seed in any::<u64>()) {
        let s = s_of(&g);
        let a = random_assignment(&s, seed);
        let v = evaluate(&s, &f, &a).unwrap();
        prop_assert_eq!(v, evaluate(&s, &nnf(&f, false), &a).unwrap());
        prop_assert_eq!(!v, evaluate(&s, &nnf(&f, true), &a).unwrap());
        prop_assert_eq!(!v, evaluate(&s, &not(not(not(f.clone()))), &a).unwrap());
    }

    #[test]
    fn strategies_agree(f in arb_formula(), g in arb_graph(), seed in any::<u64>()) {
        let s = s_of(&g);
        let a = random_assignment(&s, seed);
        let exhaustive = EvalOptions { strategy: Search::Exhaustive, caps: SearchCaps::default() };
        prop_assert_eq!(evaluate(&s, &f, &a).unwrap(), evaluate_with(&s, &f, &a, &exhaustive).unwrap());
    }

    #[test]
    fn printer_round_trips(f in arb_formula()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}
