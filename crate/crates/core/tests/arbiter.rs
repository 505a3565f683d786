use lph::arbiter::*;
use lph::graph::{enumerate_graphs, generate_small_ids};
use lph::logic::library::{all_selected, three_colorable};
use lph::logic::{evaluate, parse, Assignment};
use lph::oracles;
use lph::runtime::{AllSelected, Limits, Memory, NodeProgram, NodeView, Program, Step};
use lph::{Error, LabeledGraph};
use proptest::prelude::*;

/// Accepts iff the last certificate satisfies `pred`.
struct LastCert(fn(&str, &str) -> bool);

impl NodeProgram for LastCert {
    fn round(&self, view: &NodeView, _memory: &mut Memory, _incoming: &[String]) -> Step {
        let last = view.certs.last().map_or("", String::as_str);
        Step::accept((self.0)(view.label, last))
    }
}

/// Accepts iff its last certificate equals every neighbor's.
struct AllEqual;

impl NodeProgram for AllEqual {
    fn round(&self, view: &NodeView, _memory: &mut Memory, incoming: &[String]) -> Step {
        let last = view.certs.last().cloned().unwrap_or_default();
        if view.round == 1 {
            return Step::send(vec![last; view.degree]);
        }
        Step::accept(incoming.iter().all(|m| *m == last))
    }
}

/// Accepts iff the two certificates of a node differ.
struct Differ;

impl NodeProgram for Differ {
    fn round(&self, view: &NodeView, _memory: &mut Memory, _incoming: &[String]) -> Step {
        Step::accept(view.certs.len() == 2 && view.certs[0] != view.certs[1])
    }
}

fn ids(g: &LabeledGraph) -> Vec<String> {
    generate_small_ids(g, 2, 0)
}

fn labeled(g: LabeledGraph, labels: &[&str]) -> LabeledGraph {
    g.with_labels(labels.iter().map(|s| s.to_string()).collect())
}

fn binary() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

#[test]
fn level_zero_runs_the_arbiter_once() {
    let prog = Program::node(AllSelected);
    for g in enumerate_graphs(4, &binary()) {
        let spec = GameSpec::new(0, Player::Eve, 0);
        assert_eq!(arbitrate(&prog, &g, &ids(&g), &spec, Limits::default()).unwrap(), oracles::all_selected(&g));
    }
}

#[test]
fn one_level_games() {
    let g = LabeledGraph::path(3);
    let ones = Program::node(LastCert(|_, c| c == "1"));
    assert!(arbitrate(&ones, &g, &ids(&g), &GameSpec::new(1, Player::Eve, 1), Limits::default()).unwrap());
    assert!(!arbitrate(&ones, &g, &ids(&g), &GameSpec::new(1, Player::Adam, 1), Limits::default()).unwrap());
    let short = Program::node(LastCert(|_, c| c.len() <= 3));
    assert!(arbitrate(&short, &g, &ids(&g), &GameSpec::new(1, Player::Adam, 3), Limits::default()).unwrap());
}

#[test]
fn alternation_matters() {
    // Eve must differ from Adam's choice: she wins moving second, loses first.
    let g = LabeledGraph::path(2);
    let prog = Program::node(Differ);
    assert!(!arbitrate(&prog, &g, &ids(&g), &GameSpec::new(2, Player::Eve, 1), Limits::default()).unwrap());
    assert!(arbitrate(&prog, &g, &ids(&g), &GameSpec::new(2, Player::Adam, 1), Limits::default()).unwrap());
}

#[test]
fn restrictors_remove_moves() {
    let g = labeled(LabeledGraph::path(2), &["1", "0"]);
    let own = Program::node(LastCert(|l, c| l == c));
    // Adam is forced to copy the label, so Eve wins the copy game.
    let mut spec = GameSpec::new(1, Player::Adam, 1);
    spec.restrictors = vec![Some(own.clone())];
    assert!(arbitrate(&own, &g, &ids(&g), &spec, Limits::default()).unwrap());
    // Eve with no legal winning move left loses.
    let never = Program::node(LastCert(|_, _| false));
    let mut spec = GameSpec::new(1, Player::Eve, 1);
    spec.restrictors = vec![Some(never)];
    assert!(!arbitrate(&own, &g, &ids(&g), &spec, Limits::default()).unwrap());
    let spec = GameSpec { restrictors: Vec::new(), ..GameSpec::new(1, Player::Eve, 1) };
    assert!(matches!(arbitrate(&own, &g, &ids(&g), &spec, Limits::default()), Err(Error::Unsupported(_))));
}

#[test]
fn larger_caps_never_hurt_eve() {
    let g = LabeledGraph::path(2);
    let long = Program::node(LastCert(|_, c| c.len() >= 2));
    let wins: Vec<bool> = (0..4)
        .map(|cap| arbitrate(&long, &g, &ids(&g), &GameSpec::new(1, Player::Eve, cap), Limits::default()).unwrap())
        .collect();
    assert_eq!(wins, [false, false, true, true]);
}

#[test]
fn oversized_games_report_the_budget() {
    let g = LabeledGraph::cycle(6);
    let mut spec = GameSpec::new(2, Player::Eve, 8);
    spec.budget = 20.0;
    let prog = Program::node(Differ);
    assert!(matches!(arbitrate(&prog, &g, &ids(&g), &spec, Limits::default()), Err(Error::BudgetExceeded(_))));
}

#[test]
fn local_repairability_examples() {
    let g = labeled(LabeledGraph::path(2), &["1", "0"]);
    let spec = GameSpec::new(1, Player::Eve, 1);
    let own = Program::node(LastCert(|l, c| l == c));
    assert!(check_local_repairability(&own, &g, &ids(&g), &spec, Limits::default()).unwrap());
    let equal = Program::node(AllEqual);
    assert!(!check_local_repairability(&equal, &g, &ids(&g), &spec, Limits::default()).unwrap());
    let g1 = LabeledGraph::path(1);
    assert!(check_local_repairability(&equal, &g1, &ids(&g1), &spec, Limits::default()).unwrap());
}

#[test]
fn compile_shapes() {
    let ex1 = compile_formula_to_arbiter(&all_selected()).unwrap();
    assert_eq!((ex1.spec.level, ex1.radius), (0, 2));
    assert_eq!(ex1.scheme, CertScheme::Relations(Vec::new()));
    let ex2 = compile_formula_to_arbiter(&three_colorable()).unwrap();
    assert_eq!((ex2.spec.level, ex2.spec.first, ex2.radius, ex2.id_radius()), (1, Player::Eve, 1, 1));
    let CertScheme::Relations(blocks) = &ex2.scheme else { panic!() };
    assert_eq!(blocks[0].len(), 3);
    let binary = parse("E2 X:2 . A x . E y ~ x . X(x, y)").unwrap();
    assert_eq!(compile_formula_to_arbiter(&binary).unwrap().id_radius(), 2);
    let pi2 = parse("A2 X:1 . E2 Y:1 . A x . (X(x) <-> !Y(x))").unwrap();
    let arb = compile_formula_to_arbiter(&pi2).unwrap();
    assert_eq!((arb.spec.level, arb.spec.first, arb.radius), (2, Player::Adam, 0));
    for text in ["E x . x = x", "A x . E y . y = x"] {
        assert!(matches!(compile_formula_to_arbiter(&parse(text).unwrap()), Err(Error::NotClassifiable(_))));
    }
}

#[test]
fn compiled_three_colorability() {
    let ex2 = compile_formula_to_arbiter(&three_colorable()).unwrap();
    for (g, want) in [(LabeledGraph::cycle(5), true), (LabeledGraph::complete(4), false), (LabeledGraph::path(1), true)] {
        assert_eq!(ex2.arbitrate(&g, &ids(&g), Limits::default()).unwrap(), want);
    }
}

#[test]
fn compiled_sentences_match_evaluation() {
    let ex1 = compile_formula_to_arbiter(&all_selected()).unwrap();
    for g in enumerate_graphs(4, &binary()) {
        let want = evaluate(&lph::graph::structural_representation(&g).unwrap(), &all_selected(), &Assignment::new()).unwrap();
        for seed in 0..3 {
            let ids = generate_small_ids(&g, ex1.id_radius(), seed);
            assert_eq!(ex1.arbitrate(&g, &ids, Limits::default()).unwrap(), want, "{g:?} {ids:?}");
        }
    }
    let ex2 = compile_formula_to_arbiter(&three_colorable()).unwrap();
    for g in enumerate_graphs(4, &[String::new()]) {
        for seed in 0..3 {
            let ids = generate_small_ids(&g, ex2.id_radius(), seed);
            assert_eq!(ex2.arbitrate(&g, &ids, Limits::default()).unwrap(), oracles::colorable(&g, 3));
        }
    }
}

#[test]
fn second_level_compiled_game() {
    // Eve answers any X with its complement.
    let f = parse("A2 X:1 . E2 Y:1 . A x . (X(x) <-> !Y(x))").unwrap();
    let arb = compile_formula_to_arbiter(&f).unwrap();
    let g = LabeledGraph::path(2);
    assert!(arb.arbitrate(&g, &ids(&g), Limits::default()).unwrap());
    let f = parse("E2 Y:1 . A2 X:1 . A x . (X(x) <-> !Y(x))").unwrap();
    let arb = compile_formula_to_arbiter(&f).unwrap();
    assert!(!arb.arbitrate(&g, &ids(&g), Limits::default()).unwrap());
}

#[test]
fn binary_relation_certificates() {
    // Every node points at some neighbor through X.
    let f = parse("E2 X:2 . A x . E y ~ x . X(x, y)").unwrap();
    let arb = compile_formula_to_arbiter(&f).unwrap();
    let g = LabeledGraph::path(2);
    let ids = generate_small_ids(&g, arb.id_radius(), 0);
    assert!(arb.arbitrate(&g, &ids, Limits::default()).unwrap());
    let g = LabeledGraph::path(1);
    assert!(!arb.arbitrate(&g, &["".to_string()], Limits::default()).unwrap());
}

#[test]
fn decide_via_formula_agrees_and_checks_labels() {
    let g = LabeledGraph::cycle(4);
    assert!(decide_via_formula(&g, &three_colorable(), &ids(&g)).unwrap());
    let bad = labeled(LabeledGraph::path(2), &["1", "x"]);
    assert!(matches!(decide_via_formula(&bad, &all_selected(), &ids(&bad)), Err(Error::NonBinaryLabel(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compiled_verdict_ignores_identifiers(idx in 0usize..64, s1 in any::<u64>(), s2 in any::<u64>()) {
        let graphs = enumerate_graphs(4, &[String::new()]);
        let g = &graphs[idx % graphs.len()];
        let arb = compile_formula_to_arbiter(&three_colorable()).unwrap();
        let a = arb.arbitrate(g, &generate_small_ids(g, 1, s1), Limits::default()).unwrap();
        let b = arb.arbitrate(g, &generate_small_ids(g, 1, s2), Limits::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn eve_never_loses_from_a_larger_cap(cap in 0usize..3, label in "[01]{0,2}") {
        let g = labeled(LabeledGraph::path(2), &[&label, "1"]);
        let prog = Program::node(LastCert(|l, c| c.starts_with(l)));
        let small = arbitrate(&prog, &g, &ids(&g), &GameSpec::new(1, Player::Eve, cap), Limits::default()).unwrap();
        let large = arbitrate(&prog, &g, &ids(&g), &GameSpec::new(1, Player::Eve, cap + 1), Limits::default()).unwrap();
        prop_assert!(!small || large);
    }
}
