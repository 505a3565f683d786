use lph::graph::generate_small_ids;
use lph::runtime::*;
use lph::{Error, LabeledGraph};

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn kite(labels: [&str; 4]) -> LabeledGraph {
    LabeledGraph::build(
        &[("u1", labels[0]), ("u2", labels[1]), ("u3", labels[2]), ("u4", labels[3])],
        &[("u1", "u2"), ("u1", "u3"), ("u1", "u4"), ("u2", "u4"), ("u3", "u4")],
    )
    .unwrap()
}

const SCHEDULERS: [Scheduler; 3] = [Scheduler::Sequential, Scheduler::Reverse, Scheduler::Parallel];

/// Clears the internal tape, copies the receiving tape onto it and stops.
const COPY_RECEIVING: &str = "
state clr
state back
state cp
trans qstart > > > -> clr > > S R S
trans clr > 0 > -> clr _ > S R S
trans clr > 1 > -> clr _ > S R S
trans clr > # > -> clr _ > S R S
trans clr > _ > -> back _ > S L S
trans back > _ > -> back _ > S L S
trans back > > > -> cp > > R R S
trans cp 0 _ > -> cp 0 > R R S
trans cp 1 _ > -> cp 1 > R R S
trans cp # _ > -> cp # > R R S
trans cp _ _ > -> qstop _ > S S S
";

/// Round 1: sends "1" to every neighbor. Round 2: on seeing a 1, clears
/// the internal tape, writes 1 and stops.
const PING: &str = "
state scan
state sep
state clr
state back
state w
trans qstart > > > -> scan > > R S R
trans scan # > _ -> sep > 1 S S R
trans sep # > _ -> scan > # R S R
trans scan _ > _ -> qpause > _ S S S
trans scan 1 > _ -> clr > _ S R S
trans clr 1 0 _ -> clr _ _ S R S
trans clr 1 1 _ -> clr _ _ S R S
trans clr 1 # _ -> clr _ _ S R S
trans clr 1 _ _ -> back _ _ S L S
trans back 1 _ _ -> back _ _ S L S
trans back 1 > _ -> w > _ S R S
trans w 1 _ _ -> qstop 1 _ S S S
";

fn run(prog: &Program, g: &LabeledGraph, ids: &[String], s: Scheduler) -> ExecutionResult {
    execute(prog, g, ids, &[], Limits::default(), s).unwrap()
}

#[test]
fn sort_incoming_uses_prefix_first_order() {
    let msgs = vec![("10".into(), "a".into()), ("0".into(), "b".into()), ("01".into(), "c".into())];
    assert_eq!(sort_incoming(&msgs).unwrap(), "b#c#a#");
    assert_eq!(sort_incoming(&[]).unwrap(), "");
    let crafted = vec![
        ("1".to_string(), "11".to_string()),
        ("".into(), "0".into()),
        ("10".into(), "1".into()),
        ("0".into(), "".into()),
        ("100".into(), "10".into()),
    ];
    assert_eq!(sort_incoming(&crafted).unwrap(), "0##11#1#10#");
    let dup = vec![("1".into(), "a".into()), ("1".into(), "b".into())];
    assert_eq!(sort_incoming(&dup), Err(Error::DuplicateSenderId("1".into())));
}

#[test]
fn single_step() {
    let m = Machine::new(&[], &[("qstart", [Sym::Blank; 3], "qpause", Sym::One, Sym::Blank, [Move::S; 3])]).unwrap();
    let mut tape = Tape::new(&[]);
    tape.head = 1;
    let cfg = Config { state: QSTART, receiving: tape.clone(), internal: tape.clone(), sending: tape };
    let next = step_local(&m, &cfg).unwrap();
    assert_eq!(next.internal.content(), "1");
    assert_eq!(next.state, QPAUSE);
    assert_eq!(step_local(&m, &next), Err(Error::NotRunning));
    let bad = Config { state: QSTART, internal: Tape::new(&[Sym::Zero]), ..next };
    assert!(matches!(step_local(&m, &bad), Err(Error::UndefinedTransition { .. })));
}

#[test]
fn head_underflow_is_reported() {
    let m = Machine::new(&[], &[("qstart", [Sym::Blank; 3], "qpause", Sym::One, Sym::Blank, [Move::S, Move::L, Move::S])]).unwrap();
    let t = Tape { cells: vec![Sym::Blank], head: 0 };
    let cfg = Config { state: QSTART, receiving: t.clone(), internal: t.clone(), sending: t };
    assert_eq!(step_local(&m, &cfg), Err(Error::HeadUnderflow("internal")));
}

#[test]
fn static_validation() {
    let start = [Sym::Start; 3];
    assert!(matches!(
        Machine::new(&[], &[("qstart", start, "qpause", Sym::One, Sym::Start, [Move::S; 3])]),
        Err(Error::InvalidMachine(_))
    ));
    assert!(matches!(
        Machine::new(&[], &[("qstart", start, "qpause", Sym::Start, Sym::Start, [Move::L, Move::S, Move::S])]),
        Err(Error::InvalidMachine(_))
    ));
    assert!(matches!(
        Machine::new(&[], &[("qstop", start, "qpause", Sym::Start, Sym::Start, [Move::S; 3])]),
        Err(Error::InvalidMachine(_))
    ));
    assert!(matches!(Machine::parse("trans qstart > > > -> nowhere > > S S S"), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn divergence_hits_step_cap() {
    let m = Machine::parse("trans qstart > > > -> qstart > > S S S").unwrap();
    let g = LabeledGraph::path(2);
    let ids = strings(&["0", "1"]);
    let limits = Limits { max_rounds: 3, max_steps: 500 };
    assert!(matches!(
        execute(&m.into(), &g, &ids, &[], limits, Scheduler::Sequential),
        Err(Error::StepLimitExceeded { limit: 500, round: 1, .. })
    ));
}

#[test]
fn pausing_forever_hits_round_cap() {
    let m = Machine::parse("trans qstart > > > -> qpause > > S S S").unwrap();
    let g = LabeledGraph::path(2);
    let limits = Limits { max_rounds: 4, max_steps: 10 };
    assert_eq!(execute(&m.into(), &g, &strings(&["0", "1"]), &[], limits, Scheduler::Sequential), Err(Error::RoundLimitExceeded(4)));
}

#[test]
fn round_one_receiving_tape_is_separators() {
    let prog: Program = Machine::parse(COPY_RECEIVING).unwrap().into();
    for g in [LabeledGraph::complete(4), LabeledGraph::path(3), kite(["1", "0", "1", "1"]), LabeledGraph::path(1)] {
        let ids = generate_small_ids(&g, 1, 4);
        let res = run(&prog, &g, &ids, Scheduler::Sequential);
        assert_eq!(res.rounds, 1);
        for v in 0..g.node_count() {
            assert_eq!(res.outputs[v], "#".repeat(g.degree(v)));
            assert_eq!(res.graph.label(v), "");
            assert!(!res.verdicts[v]);
        }
    }
}

#[test]
fn internal_tape_starts_with_label_id_certificates() {
    // A machine that stops immediately exposes the initial internal tape.
    let m = Machine::parse("trans qstart > > > -> qstop > > S S S").unwrap();
    let g = LabeledGraph::build(&[("a", "01"), ("b", "")], &[("a", "b")]).unwrap();
    let certs = vec![strings(&["1", "00"]), vec![]];
    let res = execute(&m.into(), &g, &strings(&["0", "1"]), &certs, Limits::default(), Scheduler::Sequential).unwrap();
    assert_eq!(res.outputs, strings(&["01#0#1#00", "#1#"]));
    assert_eq!(res.graph.label(0), "010100");
}

#[test]
fn machine_messages_reach_neighbors() {
    let prog: Program = Machine::parse(PING).unwrap().into();
    let g = kite(["1", "0", "1", "1"]);
    let ids = strings(&["0", "1", "10", "11"]);
    let res = run(&prog, &g, &ids, Scheduler::Sequential);
    assert_eq!(res.rounds, 2);
    assert!(accepts(&res));
    for v in 0..4 {
        assert_eq!(res.steps[v][0], 2 + 2 * g.degree(v));
    }
    for s in SCHEDULERS {
        assert_eq!(run(&prog, &g, &ids, s), res);
    }
}

#[test]
fn accept_everything_in_one_round() {
    let one = "
state clr
state back
state w
trans qstart > > > -> clr > > S R S
trans clr > 0 > -> clr _ > S R S
trans clr > 1 > -> clr _ > S R S
trans clr > # > -> clr _ > S R S
trans clr > _ > -> back _ > S L S
trans back > _ > -> back _ > S L S
trans back > > > -> w > > S R S
trans w > _ > -> qstop 1 > S S S
";
    let prog: Program = Machine::parse(one).unwrap().into();
    let g = kite(["1", "0", "10", ""]);
    let res = run(&prog, &g, &strings(&["0", "1", "10", "11"]), Scheduler::Parallel);
    assert_eq!(res.rounds, 1);
    assert!(accepts(&res));
}

#[test]
fn allselected_program_on_overview_graph() {
    let prog = Program::node(AllSelected);
    let ids = strings(&["00", "01", "10", "11"]);
    let res = run(&prog, &kite(["1", "0", "1", "1"]), &ids, Scheduler::Sequential);
    assert_eq!(res.rounds, 2);
    assert_eq!(res.verdicts, vec![false, false, true, false]);
    assert!(!accepts(&res));
    let res = run(&prog, &kite(["1", "1", "1", "1"]), &ids, Scheduler::Sequential);
    assert!(accepts(&res));
}

#[test]
fn verdict_requires_exactly_one() {
    struct Echo;
    impl NodeProgram for Echo {
        fn round(&self, view: &NodeView, _m: &mut Memory, _i: &[String]) -> Step {
            Step::halt(view.label)
        }
    }
    let ids = strings(&["0", "1"]);
    let g = LabeledGraph::build(&[("a", "1"), ("b", "1")], &[("a", "b")]).unwrap();
    assert!(accepts(&run(&Program::node(Echo), &g, &ids, Scheduler::Sequential)));
    for bad in ["0", "11", ""] {
        let g = g.with_labels(strings(&["1", bad]));
        assert!(!accepts(&run(&Program::node(Echo), &g, &ids, Scheduler::Sequential)));
    }
}

#[test]
fn stopped_nodes_send_empty_messages() {
    struct Probe;
    impl NodeProgram for Probe {
        fn round(&self, view: &NodeView, _m: &mut Memory, incoming: &[String]) -> Step {
            match (view.label, view.round) {
                ("stop", 1) => Step { send: vec!["1".into(); view.degree], halt: Some("1".into()), steps: 1 },
                (_, 1) | (_, 2) => Step::send(vec!["1".into(); view.degree]),
                // round 3: the stopped neighbor's slot must be empty
                _ => Step::accept(incoming.iter().filter(|m| m.is_empty()).count() == 1),
            }
        }
    }
    let g = LabeledGraph::build(&[("a", "stop"), ("b", "go"), ("c", "go")], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
    let res = run(&Program::node(Probe), &g, &strings(&["0", "1", "10"]), Scheduler::Sequential);
    assert_eq!(res.rounds, 3);
    assert!(accepts(&res));
    assert_eq!(res.steps[0], vec![1, 0, 0]);
}

#[test]
fn execution_requires_locally_unique_ids() {
    let g = LabeledGraph::path(3);
    assert_eq!(
        execute(&Program::node(AcceptAll), &g, &strings(&["0", "1", "0"]), &[], Limits::default(), Scheduler::Sequential),
        Err(Error::NotLocallyUnique(1))
    );
}

#[test]
fn schedulers_agree_on_random_graphs() {
    let prog = Program::node(AllSelected);
    let ping: Program = Machine::parse(PING).unwrap().into();
    for g in lph::graph::enumerate_graphs(4, &strings(&["0", "1"])) {
        let ids = generate_small_ids(&g, 1, 11);
        let base = run(&prog, &g, &ids, Scheduler::Sequential);
        for s in SCHEDULERS {
            assert_eq!(run(&prog, &g, &ids, s), base);
        }
        if g.node_count() > 1 {
            let base = run(&ping, &g, &ids, Scheduler::Sequential);
            for s in SCHEDULERS {
                assert_eq!(run(&ping, &g, &ids, s), base);
            }
        }
    }
}
