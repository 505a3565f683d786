//! The ten acceptance checks, shared by the `acceptance` test target and
//! the `lph acceptance` subcommand. Every check is exact; each carries a
//! wall-clock limit.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arbiter::compile_formula_to_arbiter;
use crate::error::Result;
use crate::graph::{enumerate_graphs, generate_small_ids, structural_neighborhood, structural_representation};
use crate::logic::{evaluate, evaluate_with, library, nesting_radius, parse, Assignment, EvalOptions, Relation, SearchCaps, Strategy};
use crate::oracles::{self, check_property, colorable, Property};
use crate::pictures::*;
use crate::reductions::*;
use crate::runtime::{execute, sort_incoming, AllSelected, ExecutionResult, Limits, Machine, Program, Scheduler};
use crate::LabeledGraph;

#[derive(Debug, Clone)]
pub struct Report {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2}: {} ({}; {:.2}s of {}s, exact)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

/// (title, time limit in seconds) of criteria 1 to 10.
pub const CRITERIA: [(&str, u64); 10] = [
    ("reduction soundness sweeps", 60),
    ("figure replays", 60),
    ("formula-oracle agreement", 300),
    ("Sigma(5) stress check", 600),
    ("compiled-arbiter equivalence", 300),
    ("Cook-Levin translation", 300),
    ("BFL locality", 300),
    ("runtime semantics", 60),
    ("pictures", 120),
    ("oracle coherence", 60),
];

type Outcome = Result<(bool, String)>;

/// Runs criterion `id` (1 to 10); `seed` drives identifier generation.
pub fn run(id: usize, seed: u64) -> Result<Report> {
    let (title, limit) = CRITERIA[id - 1];
    let start = Instant::now();
    let (ok, detail) = match id {
        1 => reduction_sweeps(seed),
        2 => figure_replays(seed),
        3 => formula_oracle_agreement(),
        4 => sigma5_stress(),
        5 => compiled_arbiter(seed),
        6 => cook_levin(seed),
        7 => bfl_locality(seed),
        8 => runtime_semantics(seed),
        9 => pictures(),
        10 => oracle_coherence(),
        _ => unreachable!("criteria are numbered 1 to 10"),
    }?;
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    Ok(Report { id, title, passed: ok && elapsed <= limit, detail, elapsed, limit })
}

fn bits() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn empty() -> Vec<String> {
    vec![String::new()]
}

/// Counts agreements of `check` over `graphs`; names the first mismatch.
fn sweep(graphs: &[LabeledGraph], check: impl Fn(&LabeledGraph) -> Result<bool> + Sync) -> Outcome {
    let results: Vec<bool> = graphs.par_iter().map(&check).collect::<Result<_>>()?;
    let bad = results.iter().position(|ok| !ok);
    let agree = results.iter().filter(|ok| **ok).count();
    let mut detail = format!("{agree}/{} agree", graphs.len());
    if let Some(i) = bad {
        detail += &format!(", first mismatch on {:?}", graphs[i]);
    }
    Ok((bad.is_none(), detail))
}

fn join(parts: Vec<(bool, String)>) -> (bool, String) {
    let ok = parts.iter().all(|p| p.0);
    (ok, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "))
}

fn reduction_sweeps(seed: u64) -> Outcome {
    let graphs = enumerate_graphs(4, &bits());
    let ids = |g: &LabeledGraph| generate_small_ids(g, 1, seed);
    let eul = sweep(&graphs, |g| Ok(oracles::all_selected(g) == oracles::eulerian(&reduce(AllSelectedToEulerian, g, &ids(g))?.output)))?;
    let ham =
        sweep(&graphs, |g| Ok(oracles::all_selected(g) == oracles::hamiltonian(&reduce(AllSelectedToHamiltonian, g, &ids(g))?.output)))?;
    let nas = sweep(&graphs, |g| {
        Ok(!oracles::all_selected(g) == oracles::hamiltonian(&reduce(NotAllSelectedToHamiltonian, g, &ids(g))?.output))
    })?;
    Ok(join(vec![
        (eul.0, format!("as2eul {}", eul.1)),
        (ham.0, format!("as2ham {}", ham.1)),
        (nas.0, format!("nas2ham {}", nas.1)),
    ]))
}

fn figure_replays(seed: u64) -> Outcome {
    let ids = |g: &LabeledGraph| generate_small_ids(g, 1, seed);
    let ones = figures::all_selected;
    let eul = figures::eulerian_path();
    let ham = figures::hamiltonian_four();
    let layers = figures::two_layer_path();
    let clauses = figures::clause_pair();
    let verdicts = [
        ("Eulerian instance not Eulerian", !oracles::eulerian(&reduce(AllSelectedToEulerian, &eul, &ids(&eul))?.output)),
        ("Hamiltonian instance not Hamiltonian", !oracles::hamiltonian(&reduce(AllSelectedToHamiltonian, &ham, &ids(&ham))?.output)),
        ("its all-1 variant Hamiltonian", oracles::hamiltonian(&reduce(AllSelectedToHamiltonian, &ones(&ham), &ids(&ham))?.output)),
        ("two-layer instance Hamiltonian", oracles::hamiltonian(&reduce(NotAllSelectedToHamiltonian, &layers, &ids(&layers))?.output)),
        ("its all-1 variant not Hamiltonian", !oracles::hamiltonian(&reduce(NotAllSelectedToHamiltonian, &ones(&layers), &ids(&layers))?.output)),
        ("clause pair 3-colorable", colorable(&reduce(ThreeSatToThreeColorable, &clauses, &ids(&clauses))?.output, 3)),
    ];
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.1).map(|v| v.0).collect();
    let detail = if failed.is_empty() { "6/6 expected verdicts".to_string() } else { format!("wrong: {}", failed.join(", ")) };
    Ok((failed.is_empty(), detail))
}

fn holds(g: &LabeledGraph, f: &crate::logic::Formula, opts: &EvalOptions) -> Result<bool> {
    evaluate_with(&structural_representation(g)?, f, &Assignment::new(), opts)
}

fn formula_oracle_agreement() -> Outcome {
    let pruned = EvalOptions { caps: SearchCaps::unlimited(), ..Default::default() };
    let exhaustive = EvalOptions { strategy: Strategy::Exhaustive, caps: SearchCaps::unlimited() };
    let ex1 = library::all_selected();
    let ex2 = library::three_colorable();
    let ex3 = library::exists_unselected_node();
    let a = sweep(&enumerate_graphs(5, &bits()), |g| Ok(holds(g, &ex1, &pruned)? == oracles::all_selected(g)))?;
    let b = sweep(&enumerate_graphs(5, &empty()), |g| Ok(holds(g, &ex2, &pruned)? == colorable(g, 3)))?;
    let c = sweep(&enumerate_graphs(2, &bits()), |g| Ok(holds(g, &ex3, &exhaustive)? == !oracles::all_selected(g)))?;
    Ok(join(vec![
        (a.0, format!("all-selected {}", a.1)),
        (b.0, format!("3-colorable {}", b.1)),
        (c.0, format!("exists-unselected {}", c.1)),
    ]))
}

fn sigma5_stress() -> Outcome {
    let opts = EvalOptions::default();
    let (c3, p3) = (LabeledGraph::cycle(3), LabeledGraph::path(3));
    let ham = library::hamiltonian();
    let non = library::non_hamiltonian();
    let got = [holds(&c3, &ham, &opts)?, holds(&p3, &ham, &opts)?, holds(&c3, &non, &opts)?, holds(&p3, &non, &opts)?];
    let ok = got == [true, false, false, true];
    Ok((ok, format!("hamiltonian C3={} P3={}, non-hamiltonian C3={} P3={}", got[0], got[1], got[2], got[3])))
}

/// Up to three distinct small identifier assignments for `g`.
fn id_sets(g: &LabeledGraph, rho: usize, seed: u64) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for s in seed..seed + 64 {
        let ids = generate_small_ids(g, rho, s);
        if !out.contains(&ids) {
            out.push(ids);
        }
        if out.len() == 3 {
            break;
        }
    }
    out
}

fn compiled_arbiter(seed: u64) -> Outcome {
    let graphs = enumerate_graphs(4, &empty());
    let mut parts = Vec::new();
    for (name, f) in [("all-selected", library::all_selected()), ("3-colorable", library::three_colorable())] {
        let arb = compile_formula_to_arbiter(&f)?;
        let few = std::sync::atomic::AtomicUsize::new(0);
        let part = sweep(&graphs, |g| {
            let want = evaluate(&structural_representation(g)?, &f, &Assignment::new())?;
            let sets = id_sets(g, arb.id_radius(), seed);
            if sets.len() < 3 {
                few.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            for ids in sets {
                if arb.arbitrate(g, &ids, Limits::default())? != want {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        let few = few.into_inner();
        parts.push((part.0, format!("{name} {}, {few} with fewer than 3 id sets", part.1)));
    }
    Ok(join(parts))
}

fn cook_levin(seed: u64) -> Outcome {
    let f = library::three_colorable();
    let rho = CookLevin::new(&f)?.radius() + 1;
    let graphs = enumerate_graphs(4, &empty());
    let direct = sweep(&graphs, |g| {
        let out = cook_levin_translate(&f, g, &generate_small_ids(g, rho, seed))?;
        Ok(oracles::satgraph(&out)? == colorable(g, 3))
    })?;
    let composed = sweep(&graphs, |g| {
        let ids = generate_small_ids(g, rho, seed);
        let sat = cook_levin_translate(&f, g, &ids)?;
        let three = relabel(SatToThreeSat, &sat, &ids)?;
        let cg = reduce(ThreeSatToThreeColorable, &three, &ids)?;
        Ok(colorable(&cg.output, 3) == colorable(g, 3))
    })?;
    Ok(join(vec![(direct.0, format!("satgraph {}", direct.1)), (composed.0, format!("composition {}", composed.1))]))
}

fn random_relation(n: usize, arity: usize, rng: &mut ChaCha8Rng) -> Relation {
    let mut tuples = Vec::new();
    for mut idx in 0..n.pow(arity as u32) {
        if rng.random_bool(0.5) {
            let mut t = vec![0; arity];
            for slot in t.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            tuples.push(t);
        }
    }
    Relation::new(arity, tuples)
}

fn bfl_locality(seed: u64) -> Outcome {
    let graphs: Vec<LabeledGraph> = enumerate_graphs(5, &bits()).into_iter().chain(enumerate_graphs(5, &empty())).collect();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for name in library::BODIES {
        let f = library::body(name).expect("library body");
        let r = nesting_radius(&f);
        let rels: Vec<(String, usize)> = f.free_so().into_iter().collect();
        let results: Vec<(usize, bool)> = graphs
            .par_iter()
            .enumerate()
            .map(|(gi, g)| -> Result<(usize, bool)> {
                let full = structural_representation(g)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (gi as u64) << 8);
                let mut ok = true;
                for v in 0..g.node_count() {
                    let local = structural_neighborhood(g, g.name(v), r)?;
                    let to_local: Vec<Option<usize>> = full.elements().iter().map(|e| local.find(e)).collect();
                    let mut a_full = Assignment::new().with_fo("x", v);
                    let mut a_local = Assignment::new().with_fo("x", local.find(full.element(v)).expect("center"));
                    for (rname, k) in &rels {
                        let rel = random_relation(full.len(), *k, &mut rng);
                        let restricted = rel.tuples.iter().filter_map(|t| t.iter().map(|&e| to_local[e]).collect::<Option<Vec<_>>>());
                        a_local = a_local.with_so(rname, Relation::new(*k, restricted));
                        a_full = a_full.with_so(rname, rel);
                    }
                    ok &= evaluate(&full, &f, &a_full)? == evaluate(&local, &f, &a_local)?;
                }
                Ok((g.node_count(), ok))
            })
            .collect::<Result<_>>()?;
        checked += results.iter().map(|r| r.0).sum::<usize>();
        if results.iter().any(|r| !r.1) {
            failures.push(name);
        }
    }
    let detail = format!("{} bodies at {checked} (graph, node) pairs", library::BODIES.len());
    if failures.is_empty() {
        Ok((true, format!("100% agreement, {detail}")))
    } else {
        Ok((false, format!("{detail}; non-local: {}", failures.join(", "))))
    }
}

/// Clears the internal tape, copies the receiving tape onto it and stops.
pub const COPY_RECEIVING: &str = "
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

fn runtime_semantics(seed: u64) -> Outcome {
    let crafted: Vec<(String, String)> =
        [("1", "11"), ("", "0"), ("10", "1"), ("0", ""), ("100", "10"), ("01", "x")].map(|(a, b)| (a.into(), b.into())).into();
    let order_ok = sort_incoming(&crafted)? == "0##x#11#1#10#";
    let copy: Program = Machine::parse(COPY_RECEIVING)?.into();
    let graphs = enumerate_graphs(4, &bits());
    let run = |p: &Program, g: &LabeledGraph, s: Scheduler| -> Result<ExecutionResult> {
        execute(p, g, &generate_small_ids(g, 1, seed), &[], Limits::default(), s)
    };
    let mut tape_ok = true;
    let mut sched_ok = true;
    for g in &graphs {
        let res = run(&copy, g, Scheduler::Sequential)?;
        tape_ok &= res.rounds == 1 && (0..g.node_count()).all(|v| res.outputs[v] == "#".repeat(g.degree(v)));
        for p in [&copy, &Program::node(AllSelected)] {
            let base = run(p, g, Scheduler::Sequential)?;
            sched_ok &= run(p, g, Scheduler::Reverse)? == base && run(p, g, Scheduler::Parallel)? == base;
        }
    }
    Ok((
        order_ok && tape_ok && sched_ok,
        format!("prefix-first order {order_ok}, round-1 tape {tape_ok}, scheduler independence {sched_ok} on {} graphs", graphs.len()),
    ))
}

fn pictures() -> Outcome {
    let opts = EvalOptions { caps: SearchCaps::unlimited(), ..Default::default() };
    let ts = TilingSystem::even_width();
    let f = ts_to_formula(&ts);
    let upto34 = all_pictures(0, 3, 4);
    let upto33 = all_pictures(0, 3, 3);
    let mut parity = 0;
    let mut formula = 0;
    for p in &upto34 {
        let accepted = ts_accepts(&ts, p)?;
        parity += usize::from(accepted == (p.width() % 2 == 0));
        formula += usize::from(evaluate_with(&picture_structure(p), &f, &Assignment::new(), &opts)? == accepted);
    }
    let mut encoding = 0;
    let mut translated = 0;
    let vertical = parse("A x . E y ~ x . (link1(x, y) | link1(y, x))")?;
    let tv = translate_picture_formula(&vertical)?;
    for p in &upto33 {
        let g = encode_picture_as_graph(p)?;
        let nodes = g.node_count() == 5 * p.height() * p.width();
        let connected = crate::graph::validate_graph(&g).is_ok();
        let bounded = (0..g.node_count()).all(|v| g.structural_degree(v) <= 4);
        encoding += usize::from(nodes && connected && bounded);
        let on_picture = evaluate_with(&picture_structure(p), &vertical, &Assignment::new(), &opts)?;
        let on_graph = evaluate_with(&structural_representation(&g)?, &tv, &Assignment::new(), &opts)?;
        translated += usize::from(on_picture == on_graph && on_picture == (p.height() >= 2));
    }
    let (n34, n33) = (upto34.len(), upto33.len());
    Ok((
        parity == n34 && formula == n34 && encoding == n33 && translated == n33,
        format!("parity {parity}/{n34}, ts_to_formula {formula}/{n34}, encoding {encoding}/{n33}, translation {translated}/{n33}"),
    ))
}

fn oracle_coherence() -> Outcome {
    let binary = enumerate_graphs(4, &bits());
    let blank = enumerate_graphs(5, &empty());
    let mut pairs = 0;
    let mut negate = true;
    for g in &binary {
        for p in [Property::AllSelected, Property::Eulerian, Property::Hamiltonian, Property::Colorable(2), Property::Colorable(3)] {
            let q = p.complement().expect("paired property");
            negate &= check_property(p, g)? != check_property(q, g)?;
            pairs += 1;
        }
    }
    let monotone = blank.iter().all(|g| (1..5).all(|k| !colorable(g, k) || colorable(g, k + 1)));
    let squares: BTreeSet<usize> = (1..=12).filter(|&n| oracles::is_square(n)).collect();
    let primes: BTreeSet<usize> = (1..=12).filter(|&n| oracles::is_prime(n)).collect();
    let counts = squares == BTreeSet::from([1, 4, 9]) && primes == BTreeSet::from([2, 3, 5, 7, 11]);
    Ok((
        negate && monotone && counts,
        format!("complements {negate} ({pairs} pairs), colorable monotone {monotone}, square/prime {counts}"),
    ))
}
