//! `lph`: command-line front end for the `lph` library.
//!
//! Verdict subcommands print `true` or `false` on their last line and exit
//! 0 or 1; any error exits 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use lph::acceptance;
use lph::arbiter::{arbitrate, compile_formula_to_arbiter, GameSpec, Player};
use lph::graph::{enumerate_graphs, generate_small_ids, structural_representation};
use lph::io::{parse_graph, write_graph};
use lph::logic::{classify, evaluate, evaluate_with, library, nesting_radius, parse, Assignment, EvalOptions, Formula, SearchCaps, Strategy};
use lph::oracles::{self, check_property, Property};
use lph::pictures::{encode_picture_as_graph, picture_structure, translate_picture_formula, ts_accepts, ts_to_formula, Picture, TilingSystem};
use lph::reductions::{cook_levin_translate, reduce, relabel, ClusterGraph, CookLevin, Identity, SatToThreeSat, ThreeSatToThreeColorable};
use lph::reductions::{AllSelectedToEulerian, AllSelectedToHamiltonian, NotAllSelectedToHamiltonian};
use lph::runtime::{accepts, execute, AcceptAll, AllSelected, Limits, Machine, Program, Scheduler};
use lph::{Error, LabeledGraph, Polynomial};

#[derive(Parser)]
#[command(name = "lph", version, about = "Local second-order logic, distributed machines and certificate games on labeled graphs")]
struct Cli {
    /// Emit one JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for identifier generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sentence on a graph or a picture.
    Eval {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, conflicts_with = "picture", required_unless_present = "picture")]
        graph: Option<PathBuf>,
        #[arg(long)]
        picture: Option<PathBuf>,
        /// Enumerate every relation instead of pruning.
        #[arg(long)]
        exhaustive: bool,
        /// Lift the default search-space caps.
        #[arg(long)]
        no_caps: bool,
    },
    /// Print the fragment, level and nesting radius of a formula.
    Classify {
        #[arg(long)]
        formula: PathBuf,
    },
    /// Execute a machine or built-in program and print the trace.
    Run {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "program", required_unless_present = "program")]
        machine: Option<PathBuf>,
        #[arg(long, value_enum)]
        program: Option<BuiltIn>,
        /// Certificate file: `<node> <cert>...` per line, `.` for the empty string.
        #[arg(long)]
        certs: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
    },
    /// Solve a certificate game.
    Arbitrate {
        #[arg(long)]
        graph: PathBuf,
        /// Compile this sentence into the arbiter; level and player come from its prefix.
        #[arg(long, conflicts_with_all = ["machine", "program", "level", "player"])]
        formula: Option<PathBuf>,
        #[arg(long, conflicts_with = "program")]
        machine: Option<PathBuf>,
        #[arg(long, value_enum)]
        program: Option<BuiltIn>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_enum)]
        player: Option<PlayerArg>,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Certificate polynomial coefficients, constant first.
        #[arg(long, default_value = "0,1")]
        poly: String,
        /// Per-node certificate length cap.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Apply a named reduction; prints the output graph and its cluster map.
    Reduce {
        #[arg(long, value_enum)]
        name: ReductionName,
        #[arg(long)]
        graph: PathBuf,
        /// Sentence for `cooklevin` (default: 3-colorability).
        #[arg(long)]
        formula: Option<PathBuf>,
    },
    /// Check a reduction against the oracles on every small graph.
    VerifyReduction {
        #[arg(long, value_enum)]
        name: ReductionName,
        #[arg(long, default_value_t = 4)]
        max_nodes: usize,
        #[arg(long)]
        formula: Option<PathBuf>,
    },
    /// Decide a property with its ground-truth oracle.
    Oracle {
        /// allselected, eulerian, hamiltonian, colorable(k), satgraph, square, prime, or a complement.
        #[arg(long)]
        name: String,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Decide whether a tiling system accepts a picture.
    Tiling {
        #[arg(long)]
        ts: PathBuf,
        #[arg(long)]
        picture: PathBuf,
    },
    /// Print the existential monadic sentence of a tiling system.
    Ts2formula {
        #[arg(long)]
        ts: PathBuf,
    },
    /// Print the graph encoding of a 0-bit picture.
    EncodePicture {
        #[arg(long)]
        picture: PathBuf,
    },
    /// Translate a picture sentence into a sentence on encoded graphs.
    TranslateFormula {
        #[arg(long)]
        formula: PathBuf,
    },
    /// Print a graph with small locally unique identifiers.
    GenIds {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        rho: usize,
    },
    /// Print every connected graph up to renaming.
    Enumerate {
        #[arg(long)]
        max_nodes: usize,
        /// Comma-separated label alphabet; empty for unlabeled graphs.
        #[arg(long, default_value = "")]
        labels: String,
    },
    /// Run acceptance criteria.
    Acceptance {
        /// Criterion number, 1 to 10; all when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Option<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltIn {
    Allselected,
    Acceptall,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlayerArg {
    Eve,
    Adam,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReductionName {
    As2eul,
    As2ham,
    Nas2ham,
    #[value(name = "sat2_3sat")]
    SatTo3sat,
    #[value(name = "3sat2_3col")]
    ThreeSatTo3col,
    Cooklevin,
    Identity,
}

/// Text lines, a JSON record and an optional verdict.
struct Report {
    lines: Vec<String>,
    record: Value,
    verdict: Option<bool>,
}

impl Report {
    fn new(lines: Vec<String>, record: Value) -> Self {
        Report { lines, record, verdict: None }
    }

    fn verdict(mut self, v: bool) -> Self {
        self.verdict = Some(v);
        self.lines.push(v.to_string());
        if let Value::Object(map) = &mut self.record {
            map.insert("verdict".into(), v.into());
        }
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global().ok();
    }
    match dispatch(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = if cli.json {
                writeln!(out, "{}", report.record)
            } else {
                report.lines.iter().try_for_each(|line| writeln!(out, "{line}"))
            };
            match report.verdict {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Res<T> = std::result::Result<T, String>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn at<T>(path: &Path, r: lph::Result<T>) -> Res<T> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Res<(LabeledGraph, Option<Vec<String>>)> {
    let file = at(path, parse_graph(&read(path)?))?;
    Ok((file.graph, file.ids))
}

fn load_formula(path: &Path) -> Res<Formula> {
    at(path, parse(&read(path)?))
}

fn load_picture(path: &Path) -> Res<Picture> {
    at(path, Picture::parse(&read(path)?))
}

fn load_ts(path: &Path) -> Res<TilingSystem> {
    at(path, TilingSystem::parse(&read(path)?))
}

fn lib<T>(r: lph::Result<T>) -> Res<T> {
    r.map_err(|e: Error| e.to_string())
}

/// File identifiers if present, generated ones otherwise.
fn ids_for(g: &LabeledGraph, given: Option<Vec<String>>, rho: usize, seed: u64) -> Vec<String> {
    given.unwrap_or_else(|| generate_small_ids(g, rho, seed))
}

fn program(machine: &Option<PathBuf>, builtin: Option<BuiltIn>) -> Res<Program> {
    match (machine, builtin) {
        (Some(path), _) => Ok(at(path, Machine::parse(&read(path)?))?.into()),
        (None, Some(BuiltIn::Allselected)) => Ok(Program::node(AllSelected)),
        (None, Some(BuiltIn::Acceptall)) => Ok(Program::node(AcceptAll)),
        (None, None) => Err("one of --machine or --program is required".into()),
    }
}

fn load_certs(path: &Path, g: &LabeledGraph) -> Res<Vec<Vec<String>>> {
    let mut certs = vec![Vec::new(); g.node_count()];
    for (k, line) in read(path)?.lines().enumerate() {
        let mut words = line.split_whitespace();
        let Some(node) = words.next().filter(|w| !w.starts_with('#')) else { continue };
        let v = g.index_of(node).ok_or_else(|| format!("{}: line {}: unknown node {node}", path.display(), k + 1))?;
        certs[v] = words.map(|w| if w == "." { String::new() } else { w.to_string() }).collect();
    }
    Ok(certs)
}

fn dispatch(cli: &Cli) -> Res<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Eval { formula, graph, picture, exhaustive, no_caps } => {
            let f = load_formula(formula)?;
            let s = match (graph, picture) {
                (Some(g), _) => lib(structural_representation(&load_graph(g)?.0))?,
                (None, Some(p)) => picture_structure(&load_picture(p)?),
                (None, None) => return Err("one of --graph or --picture is required".into()),
            };
            let opts = EvalOptions {
                strategy: if *exhaustive { Strategy::Exhaustive } else { Strategy::Pruned },
                caps: if *no_caps { SearchCaps::unlimited() } else { SearchCaps::default() },
            };
            let v = lib(evaluate_with(&s, &f, &Assignment::new(), &opts))?;
            Ok(Report::new(vec![format!("formula: {f}")], json!({"command": "eval", "formula": f.to_string()})).verdict(v))
        }
        Command::Classify { formula } => {
            let f = load_formula(formula)?;
            let tag = lib(classify(&f))?;
            let r = nesting_radius(&f);
            Ok(Report::new(
                vec![format!("class: {tag}"), format!("radius: {r}")],
                json!({"command": "classify", "class": tag.to_string(), "monadic": tag.monadic, "radius": r}),
            ))
        }
        Command::Run { graph, machine, program: builtin, certs, max_rounds, max_steps } => {
            let (g, given) = load_graph(graph)?;
            let prog = program(machine, *builtin)?;
            let ids = ids_for(&g, given, prog.id_radius(), seed);
            let certs = match certs {
                Some(path) => load_certs(path, &g)?,
                None => Vec::new(),
            };
            let limits = Limits { max_rounds: *max_rounds, max_steps: *max_steps };
            let res = lib(execute(&prog, &g, &ids, &certs, limits, Scheduler::Sequential))?;
            let mut lines = vec![format!("rounds: {}", res.rounds)];
            let mut nodes = Vec::new();
            for v in 0..g.node_count() {
                let steps: Vec<String> = res.steps[v].iter().map(usize::to_string).collect();
                lines.push(format!(
                    "node {} id={} result={:?} verdict={} steps={}",
                    g.name(v),
                    ids[v],
                    res.outputs[v],
                    res.verdicts[v],
                    steps.join(",")
                ));
                nodes.push(json!({
                    "name": g.name(v), "id": ids[v], "output": res.outputs[v],
                    "verdict": res.verdicts[v], "steps": res.steps[v], "space": res.space[v],
                }));
            }
            let record = json!({"command": "run", "rounds": res.rounds, "nodes": nodes});
            Ok(Report::new(lines, record).verdict(accepts(&res)))
        }
        Command::Arbitrate { graph, formula, machine, program: builtin, level, player, radius, poly, cap } => {
            let (g, given) = load_graph(graph)?;
            if let Some(path) = formula {
                let arb = lib(compile_formula_to_arbiter(&load_formula(path)?))?;
                let ids = ids_for(&g, given, arb.id_radius(), seed);
                let v = lib(arb.arbitrate(&g, &ids, Limits::default()))?;
                let lines = vec![format!("level: {} first: {:?} radius: {}", arb.spec.level, arb.spec.first, arb.radius)];
                return Ok(Report::new(lines, json!({"command": "arbitrate", "level": arb.spec.level})).verdict(v));
            }
            let prog = program(machine, *builtin)?;
            let level = level.unwrap_or(0);
            let first = match player.unwrap_or(PlayerArg::Eve) {
                PlayerArg::Eve => Player::Eve,
                PlayerArg::Adam => Player::Adam,
            };
            let poly = Polynomial::parse(poly).ok_or_else(|| format!("bad polynomial {poly:?}"))?;
            let mut spec = GameSpec::new(level, first, 0);
            spec.radius = *radius;
            spec.poly = poly;
            spec.cap = *cap;
            spec.restrictors = vec![None; level];
            let ids = ids_for(&g, given, prog.id_radius(), seed);
            let v = lib(arbitrate(&prog, &g, &ids, &spec, Limits::default()))?;
            Ok(Report::new(vec![format!("level: {level} first: {first:?}")], json!({"command": "arbitrate", "level": level})).verdict(v))
        }
        Command::Reduce { name, graph, formula } => {
            let (g, given) = load_graph(graph)?;
            let out = apply(*name, &g, given, formula.as_deref(), seed)?;
            let mut text = write_graph(&out.output, None);
            let mut clusters = Vec::new();
            for (o, &v) in out.cluster_map.iter().enumerate() {
                text += &format!("# cluster {} {}\n", out.output.name(o), g.name(v));
                clusters.push(json!([out.output.name(o), g.name(v)]));
            }
            let lines = vec![text.trim_end().to_string()];
            Ok(Report::new(lines, json!({"command": "reduce", "graph": write_graph(&out.output, None), "clusters": clusters})))
        }
        Command::VerifyReduction { name, max_nodes, formula } => verify(*name, *max_nodes, formula.as_deref(), seed),
        Command::Oracle { name, graph } => {
            let p: Property = lib(name.parse())?;
            let (g, _) = load_graph(graph)?;
            let v = lib(check_property(p, &g))?;
            Ok(Report::new(vec![format!("property: {p}")], json!({"command": "oracle", "property": p.to_string()})).verdict(v))
        }
        Command::Tiling { ts, picture } => {
            let (t, p) = (load_ts(ts)?, load_picture(picture)?);
            let v = lib(ts_accepts(&t, &p))?;
            Ok(Report::new(vec![format!("picture: {}x{}", p.height(), p.width())], json!({"command": "tiling"})).verdict(v))
        }
        Command::Ts2formula { ts } => {
            let f = ts_to_formula(&load_ts(ts)?);
            Ok(Report::new(vec![f.to_string()], json!({"command": "ts2formula", "formula": f.to_string()})))
        }
        Command::EncodePicture { picture } => {
            let g = lib(encode_picture_as_graph(&load_picture(picture)?))?;
            let text = write_graph(&g, None);
            Ok(Report::new(vec![text.trim_end().to_string()], json!({"command": "encode-picture", "graph": text})))
        }
        Command::TranslateFormula { formula } => {
            let f = lib(translate_picture_formula(&load_formula(formula)?))?;
            Ok(Report::new(vec![f.to_string()], json!({"command": "translate-formula", "formula": f.to_string()})))
        }
        Command::GenIds { graph, rho } => {
            let (g, _) = load_graph(graph)?;
            let ids = generate_small_ids(&g, *rho, seed);
            let text = write_graph(&g, Some(&ids));
            Ok(Report::new(vec![text.trim_end().to_string()], json!({"command": "gen-ids", "ids": ids})))
        }
        Command::Enumerate { max_nodes, labels } => {
            if *max_nodes > 7 {
                return Err("--max-nodes is limited to 7".into());
            }
            let alphabet: Vec<String> = labels.split(',').map(str::to_string).collect();
            let graphs = enumerate_graphs(*max_nodes, &alphabet);
            let mut lines = vec![format!("# {} graphs", graphs.len())];
            for (k, g) in graphs.iter().enumerate() {
                lines.push(format!("# graph {k}"));
                lines.push(write_graph(g, None).trim_end().to_string());
            }
            let record = json!({"command": "enumerate", "graphs": graphs.iter().map(|g| write_graph(g, None)).collect::<Vec<_>>()});
            Ok(Report::new(lines, record))
        }
        Command::Acceptance { criterion } => {
            let ids: Vec<usize> = match criterion {
                Some(c) => vec![usize::from(*c)],
                None => (1..=10).collect(),
            };
            let mut lines = Vec::new();
            let mut records = Vec::new();
            let mut all = true;
            for id in ids {
                let r = lib(acceptance::run(id, seed))?;
                all &= r.passed;
                lines.push(r.to_string());
                records.push(json!({
                    "criterion": r.id, "title": r.title, "passed": r.passed, "detail": r.detail,
                    "seconds": r.elapsed.as_secs_f64(), "limit_seconds": r.limit.as_secs(),
                }));
            }
            Ok(Report::new(lines, json!({"command": "acceptance", "criteria": records})).verdict(all))
        }
    }
}

/// Runs reduction `name`; label reductions report the identity cluster map.
fn apply(name: ReductionName, g: &LabeledGraph, given: Option<Vec<String>>, formula: Option<&Path>, seed: u64) -> Res<ClusterGraph> {
    let same = |output: LabeledGraph| ClusterGraph { cluster_map: (0..output.node_count()).collect(), output };
    match name {
        ReductionName::Cooklevin => {
            let f = cook_levin_formula(formula)?;
            let rho = lib(CookLevin::new(&f))?.radius() + 1;
            let ids = ids_for(g, given, rho, seed);
            Ok(same(lib(cook_levin_translate(&f, g, &ids))?))
        }
        _ => {
            let ids = ids_for(g, given, 1, seed);
            lib(match name {
                ReductionName::As2eul => reduce(AllSelectedToEulerian, g, &ids),
                ReductionName::As2ham => reduce(AllSelectedToHamiltonian, g, &ids),
                ReductionName::Nas2ham => reduce(NotAllSelectedToHamiltonian, g, &ids),
                ReductionName::ThreeSatTo3col => reduce(ThreeSatToThreeColorable, g, &ids),
                ReductionName::Identity => reduce(Identity, g, &ids),
                ReductionName::SatTo3sat => relabel(SatToThreeSat, g, &ids).map(same),
                ReductionName::Cooklevin => unreachable!(),
            })
        }
    }
}

fn cook_levin_formula(path: Option<&Path>) -> Res<Formula> {
    match path {
        Some(p) => load_formula(p),
        None => Ok(library::three_colorable()),
    }
}

/// Source-side and target-side verdicts of one instance.
fn instance(name: ReductionName, g: &LabeledGraph, f: &Formula, seed: u64) -> Res<(bool, bool)> {
    let out = |n| apply(n, g, None, None, seed).map(|c| c.output);
    Ok(match name {
        ReductionName::As2eul => (oracles::all_selected(g), oracles::eulerian(&out(name)?)),
        ReductionName::As2ham => (oracles::all_selected(g), oracles::hamiltonian(&out(name)?)),
        ReductionName::Nas2ham => (!oracles::all_selected(g), oracles::hamiltonian(&out(name)?)),
        ReductionName::Identity => (oracles::all_selected(g), oracles::all_selected(&out(name)?)),
        ReductionName::Cooklevin => {
            let rho = lib(CookLevin::new(f))?.radius() + 1;
            let translated = lib(cook_levin_translate(f, g, &generate_small_ids(g, rho, seed)))?;
            (lib(evaluate(&lib(structural_representation(g))?, f, &Assignment::new()))?, lib(oracles::satgraph(&translated))?)
        }
        ReductionName::SatTo3sat | ReductionName::ThreeSatTo3col => unreachable!(),
    })
}

fn verify(name: ReductionName, max_nodes: usize, formula: Option<&Path>, seed: u64) -> Res<Report> {
    if matches!(name, ReductionName::SatTo3sat | ReductionName::ThreeSatTo3col) {
        return Err("verify-reduction sweeps graph-labeled reductions: as2eul, as2ham, nas2ham, cooklevin, identity".into());
    }
    if max_nodes > 7 {
        return Err("--max-nodes is limited to 7".into());
    }
    let f = cook_levin_formula(formula)?;
    let alphabet: Vec<String> = if name == ReductionName::Cooklevin { vec![String::new()] } else { vec!["0".into(), "1".into()] };
    let graphs = enumerate_graphs(max_nodes, &alphabet);
    let results: Vec<(bool, bool)> = graphs.par_iter().map(|g| instance(name, g, &f, seed)).collect::<Res<_>>()?;
    let mut lines = vec![format!("{:>5} {:>9} {:>6} {:>5}", "nodes", "instances", "agree", "true")];
    let mut rows = Vec::new();
    for n in 1..=max_nodes {
        let here: Vec<&(bool, bool)> = graphs.iter().zip(&results).filter(|(g, _)| g.node_count() == n).map(|(_, r)| r).collect();
        let agree = here.iter().filter(|(a, b)| a == b).count();
        let yes = here.iter().filter(|(a, _)| *a).count();
        lines.push(format!("{n:>5} {:>9} {agree:>6} {yes:>5}", here.len()));
        rows.push(json!({"nodes": n, "instances": here.len(), "agree": agree, "true": yes}));
    }
    let all = results.iter().all(|(a, b)| a == b);
    Ok(Report::new(lines, json!({"command": "verify-reduction", "rows": rows})).verdict(all))
}
