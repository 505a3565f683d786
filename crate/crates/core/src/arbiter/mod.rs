//! Certificate games between Eve and Adam, decided by a distributed
//! arbiter, and the compilation of second-order sentences into arbiters.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{all_strings_up_to, certificate_bound, structural_representation, LabeledGraph, Polynomial};
use crate::logic::classify::{lfo_parts, so_prefix};
use crate::logic::{classify, evaluate, nesting_radius, Assignment, Formula, Fragment, Quant, Relation};
use crate::runtime::{accepts, execute, GatherProgram, Limits, LocalInput, Program, Scheduler};
use crate::structure::{Element, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }
}

#[derive(Clone)]
pub struct GameSpec {
    pub level: usize,
    pub first: Player,
    pub radius: usize,
    pub poly: Polynomial,
    /// Extra per-node length cap on top of the polynomial bound.
    pub cap: Option<usize>,
    /// `restrictors[i]` must accept the certificates of levels 1..=i+1
    /// for a move at level i+1 to be legal; `None` allows every move.
    pub restrictors: Vec<Option<Program>>,
    /// Largest search, as log₂ of the number of certificate assignments.
    pub budget: f64,
}

impl GameSpec {
    /// Unrestricted game with certificates of at most `cap` bits.
    pub fn new(level: usize, first: Player, cap: usize) -> Self {
        GameSpec {
            level,
            first,
            radius: 1,
            poly: Polynomial(vec![0, 1]),
            cap: Some(cap),
            restrictors: vec![None; level],
            budget: 24.0,
        }
    }

    /// Player choosing the certificates of level `i` (0-based).
    pub fn player_at(&self, i: usize) -> Player {
        if i % 2 == 0 {
            self.first
        } else {
            self.first.other()
        }
    }

    fn check(&self) -> Result<()> {
        if self.restrictors.len() != self.level {
            return Err(Error::Unsupported(format!(
                "{} restrictors for a game with {} levels",
                self.restrictors.len(),
                self.level
            )));
        }
        Ok(())
    }

    /// Every certificate a node may receive at one level.
    fn raw_options(&self, g: &LabeledGraph, ids: &[String]) -> Result<Vec<Vec<String>>> {
        let mut out = Vec::new();
        let mut bits = 0.0;
        for v in 0..g.node_count() {
            let bound = certificate_bound(g, ids, g.name(v), self.radius, &self.poly)?;
            let len = self.cap.map_or(bound, |c| bound.min(c as u64));
            bits += (len + 1) as f64;
            if bits > self.budget {
                return Err(Error::BudgetExceeded(bits));
            }
            out.push(all_strings_up_to(len as usize).collect());
        }
        Ok(out)
    }
}

type Verdict<'a> = dyn Fn(&[Vec<String>]) -> Result<bool> + Sync + 'a;

/// Alternating search over certificate assignments.
struct Game<'a> {
    g: &'a LabeledGraph,
    ids: &'a [String],
    /// `options[level][node]`.
    options: Vec<Vec<Vec<String>>>,
    players: Vec<Player>,
    restrictors: &'a [Option<Program>],
    limits: Limits,
    verdict: &'a Verdict<'a>,
}

impl Game<'_> {
    fn log_size(&self) -> f64 {
        self.options.iter().flatten().map(|o| (o.len() as f64).log2()).sum()
    }

    fn count(&self, level: usize) -> u64 {
        self.options[level].iter().map(|o| o.len() as u64).product()
    }

    /// Certificates of `level` for assignment number `idx`, appended.
    fn assign(&self, level: usize, mut idx: u64, certs: &mut [Vec<String>]) {
        for (v, opts) in self.options[level].iter().enumerate() {
            let k = opts.len() as u64;
            certs[v].push(opts[(idx % k) as usize].clone());
            idx /= k;
        }
    }

    fn legal(&self, level: usize, certs: &[Vec<String>]) -> Result<bool> {
        match &self.restrictors.get(level).cloned().flatten() {
            None => Ok(true),
            Some(r) => Ok(accepts(&execute(r, self.g, self.ids, certs, self.limits, Scheduler::Sequential)?)),
        }
    }

    /// Value of the move `idx` at `level`; an illegal move loses for the
    /// player who made it.
    fn value_of(&self, level: usize, idx: u64, certs: &mut Vec<Vec<String>>) -> Result<bool> {
        self.assign(level, idx, certs);
        let value = if self.legal(level, certs)? {
            self.play(level + 1, certs)
        } else {
            Ok(self.players[level] == Player::Adam)
        };
        for c in certs.iter_mut() {
            c.pop();
        }
        value
    }

    fn play(&self, level: usize, certs: &mut Vec<Vec<String>>) -> Result<bool> {
        if level == self.options.len() {
            return (self.verdict)(certs);
        }
        let eve = self.players[level] == Player::Eve;
        for idx in 0..self.count(level) {
            if self.value_of(level, idx, certs)? == eve {
                return Ok(eve);
            }
        }
        Ok(!eve)
    }

    /// The first level is searched in parallel; the value is the same as
    /// in sequential order.
    fn solve(&self) -> Result<bool> {
        let n = self.g.node_count();
        if self.options.is_empty() {
            return (self.verdict)(&vec![Vec::new(); n]);
        }
        let eve = self.players[0] == Player::Eve;
        let decisive = (0..self.count(0)).into_par_iter().find_map_any(|idx| {
            match self.value_of(0, idx, &mut vec![Vec::new(); n]) {
                Ok(v) if v != eve => None,
                other => Some(other),
            }
        });
        decisive.unwrap_or(Ok(!eve))
    }
}

/// Winner of the certificate game: true iff Eve can force `prog` to
/// accept, with certificates bounded by `spec` and every move checked
/// by its level's restrictor.
pub fn arbitrate(prog: &Program, g: &LabeledGraph, ids: &[String], spec: &GameSpec, limits: Limits) -> Result<bool> {
    spec.check()?;
    let verdict = |certs: &[Vec<String>]| -> Result<bool> {
        Ok(accepts(&execute(prog, g, ids, certs, limits, Scheduler::Sequential)?))
    };
    let options = if spec.level == 0 {
        Vec::new()
    } else {
        let per_level = spec.raw_options(g, ids)?;
        vec![per_level; spec.level]
    };
    let game = Game {
        g,
        ids,
        options,
        players: (0..spec.level).map(|i| spec.player_at(i)).collect(),
        restrictors: &spec.restrictors,
        limits,
        verdict: &verdict,
    };
    if game.log_size() > spec.budget {
        return Err(Error::BudgetExceeded(game.log_size()));
    }
    game.solve()
}

/// Whenever a node rejects, changing only its own last-level certificate
/// can make it accept without changing any other node's verdict.
pub fn check_local_repairability(
    restrictor: &Program,
    g: &LabeledGraph,
    ids: &[String],
    spec: &GameSpec,
    limits: Limits,
) -> Result<bool> {
    if spec.level == 0 {
        return Ok(true);
    }
    let per_level = spec.raw_options(g, ids)?;
    let log_assignments: f64 = per_level.iter().map(|o| (o.len() as f64).log2()).sum::<f64>() * spec.level as f64;
    let repairs: usize = per_level.iter().map(Vec::len).sum();
    let cost = log_assignments + (repairs as f64).log2();
    if cost > spec.budget {
        return Err(Error::BudgetExceeded(cost));
    }
    let n = g.node_count();
    let per_round: u64 = per_level.iter().map(|o| o.len() as u64).product();
    let total = per_round.pow(spec.level as u32);
    let run = |certs: &[Vec<String>]| -> Result<Vec<bool>> {
        Ok(execute(restrictor, g, ids, certs, limits, Scheduler::Sequential)?.verdicts)
    };
    let broken = (0..total).into_par_iter().find_map_any(|mut idx| {
        let mut certs = vec![Vec::new(); n];
        for _ in 0..spec.level {
            for (v, opts) in per_level.iter().enumerate() {
                certs[v].push(opts[(idx % opts.len() as u64) as usize].clone());
                idx /= opts.len() as u64;
            }
        }
        let check = || -> Result<bool> {
            let before = run(&certs)?;
            for v in (0..n).filter(|&v| !before[v]) {
                let mut repaired = false;
                for alt in &per_level[v] {
                    let mut changed = certs.clone();
                    *changed[v].last_mut().unwrap() = alt.clone();
                    let after = run(&changed)?;
                    if after[v] && (0..n).all(|w| w == v || after[w] == before[w]) {
                        repaired = true;
                        break;
                    }
                }
                if !repaired {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        match check() {
            Ok(true) => None,
            other => Some(other),
        }
    });
    match broken {
        None => Ok(true),
        Some(Ok(_)) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

/// Second-order variables of one quantifier block.
pub type Block = Vec<(String, usize)>;

/// How certificates are chosen and read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertScheme {
    /// Bit strings bounded by the game spec.
    Raw,
    /// Per level, the relation variables whose tuples the certificates list.
    Relations(Vec<Block>),
}

/// Arbiter for a Σ(ℓ)/Π(ℓ) sentence. Every node gathers its r-neighborhood
/// with certificates, reads them as the tuples of the quantified relations
/// whose first element it owns, and checks the first-order body at its own
/// element and its labeling bits.
///
/// A certificate lists tuples as `X:a1,a2 Y:a1`, where an address is the
/// owner's identifier, followed by `.k` for its k-th labeling bit.
#[derive(Clone)]
pub struct CompiledArbiter {
    pub program: Program,
    pub radius: usize,
    pub scheme: CertScheme,
    pub spec: GameSpec,
    checker: Arc<LocalChecker>,
}

struct LocalChecker {
    blocks: Vec<Block>,
    var: String,
    node: bool,
    body: Formula,
}

fn address(e: &Element, ids: &dyn Fn(&str) -> Option<String>) -> Option<String> {
    match e {
        Element::Node(n) => ids(n),
        Element::Bit(n, k) => Some(format!("{}.{k}", ids(n)?)),
        Element::Pixel(..) => None,
    }
}

fn owner(e: &Element) -> Option<&str> {
    match e {
        Element::Node(n) | Element::Bit(n, _) => Some(n),
        Element::Pixel(..) => None,
    }
}

impl LocalChecker {
    /// Relations assembled from the certificates gathered in `input`.
    fn assignment(&self, s: &Structure, input: &LocalInput) -> Assignment {
        let mut tuples: HashMap<&str, (usize, BTreeSet<Vec<usize>>)> = HashMap::new();
        for block in &self.blocks {
            for (x, k) in block {
                tuples.insert(x, (*k, BTreeSet::new()));
            }
        }
        for r in input.records.values() {
            let holder = format!("n{}", r.id);
            for (level, cert) in r.certs.iter().enumerate() {
                let Some(block) = self.blocks.get(level) else { continue };
                for entry in cert.split(' ').filter(|t| !t.is_empty()) {
                    let Some((x, args)) = entry.split_once(':') else { continue };
                    let Some((_, k)) = block.iter().find(|(name, _)| name == x) else { continue };
                    let resolved: Option<Vec<usize>> = args
                        .split(',')
                        .map(|a| {
                            let e = match a.split_once('.') {
                                Some((id, k)) => Element::Bit(format!("n{id}"), k.parse().ok()?),
                                None => Element::Node(format!("n{a}")),
                            };
                            s.find(&e)
                        })
                        .collect();
                    let Some(tuple) = resolved else { continue };
                    if tuple.len() == *k && owner(s.element(tuple[0])) == Some(holder.as_str()) {
                        tuples.get_mut(x).unwrap().1.insert(tuple);
                    }
                }
            }
        }
        let mut a = Assignment::new();
        for (x, (k, set)) in tuples {
            a = a.with_so(x, Relation::new(k, set));
        }
        a
    }

    fn accepts(&self, input: &LocalInput) -> Result<bool> {
        let s = structural_representation(&input.ball_graph()?)?;
        let a = self.assignment(&s, input);
        let own = format!("n{}", input.id);
        let mut targets = vec![s.find(&Element::Node(own.clone())).expect("own record")];
        if !self.node {
            targets.extend((1..=input.label.len()).filter_map(|k| s.find(&Element::Bit(own.clone(), k))));
        }
        for e in targets {
            if !evaluate(&s, &self.body, &a.clone().with_fo(&self.var, e))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Compiles a Σ(ℓ) or Π(ℓ) sentence (or an LFO sentence, ℓ = 0).
pub fn compile_formula_to_arbiter(f: &Formula) -> Result<CompiledArbiter> {
    let tag = classify(f)?;
    if !matches!(tag.class, Fragment::LFO | Fragment::Sigma(_) | Fragment::Pi(_)) {
        return Err(Error::NotClassifiable(format!("{tag} sentence has no arbiter")));
    }
    let prefix = so_prefix(f);
    let lfo = lfo_parts(prefix.matrix, prefix.negated)
        .ok_or_else(|| Error::NotClassifiable("matrix is not a local first-order sentence".into()))?;
    let mut blocks: Vec<Block> = Vec::new();
    let mut quants: Vec<Quant> = Vec::new();
    for (q, x, k) in &prefix.vars {
        if *k == 0 {
            return Err(Error::Unsupported(format!("nullary relation variable {x}")));
        }
        if quants.last() != Some(q) {
            quants.push(*q);
            blocks.push(Vec::new());
        }
        blocks.last_mut().unwrap().push((x.to_string(), *k));
    }
    let radius = nesting_radius(&lfo.body);
    let monadic = blocks.iter().flatten().all(|(_, k)| *k == 1);
    // Foreign addresses reach 2r beyond the owner, so they are unambiguous
    // only when identifiers are unique within 4r.
    let id_radius = if monadic { radius } else { 2 * radius }.max(1);
    let checker = Arc::new(LocalChecker { blocks: blocks.clone(), var: lfo.var.to_string(), node: lfo.node, body: lfo.body });
    let c = checker.clone();
    let compute = move |input: &LocalInput| if c.accepts(input).unwrap_or(false) { "1".to_string() } else { "0".to_string() };
    let program = if radius == 0 {
        Program::node(GatherProgram::local(id_radius, compute))
    } else {
        Program::node(GatherProgram::new(radius, id_radius, compute))
    };
    let first = if quants.first() == Some(&Quant::Forall) { Player::Adam } else { Player::Eve };
    let mut spec = GameSpec::new(blocks.len(), first, 0);
    spec.radius = 2 * radius;
    spec.cap = None;
    Ok(CompiledArbiter { program, radius, scheme: CertScheme::Relations(blocks), spec, checker })
}

impl CompiledArbiter {
    /// Minimum ρ for which identifiers must be ρ-locally unique.
    pub fn id_radius(&self) -> usize {
        self.program.id_radius()
    }

    /// Certificates Eve or Adam may hand to each node at every level: all
    /// subsets of the tuples the node owns whose other elements lie within
    /// distance 2r of the first.
    pub fn relation_options(&self, g: &LabeledGraph, ids: &[String], budget: f64) -> Result<Vec<Vec<Vec<String>>>> {
        let s = structural_representation(g)?;
        let id_of = |n: &str| g.index_of(n).map(|v| ids[v].clone());
        let mut out = Vec::new();
        let mut bits = 0.0;
        for block in &self.checker.blocks {
            let mut per_node = vec![Vec::new(); g.node_count()];
            for e1 in 0..s.len() {
                let v = g.index_of(owner(s.element(e1)).expect("graph element")).expect("known node");
                let near: Vec<usize> = s.ball(e1, 2 * self.radius);
                for (x, k) in block {
                    let mut tuples: Vec<Vec<usize>> = vec![vec![e1]];
                    for _ in 1..*k {
                        tuples = tuples
                            .into_iter()
                            .flat_map(|t| near.iter().map(move |&e| [t.clone(), vec![e]].concat()))
                            .collect();
                    }
                    for t in tuples {
                        let addrs: Vec<String> =
                            t.iter().map(|&e| address(s.element(e), &id_of).expect("graph element")).collect();
                        per_node[v].push(format!("{x}:{}", addrs.join(",")));
                    }
                }
            }
            let mut level = Vec::new();
            for candidates in per_node {
                bits += candidates.len() as f64;
                if bits > budget {
                    return Err(Error::BudgetExceeded(bits));
                }
                let subsets = (0..1u64 << candidates.len())
                    .map(|m| {
                        (0..candidates.len())
                            .filter(|i| m >> i & 1 == 1)
                            .map(|i| candidates[i].as_str())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                level.push(subsets);
            }
            out.push(level);
        }
        Ok(out)
    }

    /// Plays the game with relation-encoded certificates.
    pub fn arbitrate(&self, g: &LabeledGraph, ids: &[String], limits: Limits) -> Result<bool> {
        if let Some(v) = (0..g.node_count()).find(|&v| !g.label(v).bytes().all(|b| b == b'0' || b == b'1')) {
            return Err(Error::NonBinaryLabel(g.name(v).to_string()));
        }
        let options = match &self.scheme {
            CertScheme::Relations(_) => self.relation_options(g, ids, self.spec.budget)?,
            CertScheme::Raw => vec![self.spec.raw_options(g, ids)?; self.spec.level],
        };
        let prog = &self.program;
        let verdict = |certs: &[Vec<String>]| -> Result<bool> {
            Ok(accepts(&execute(prog, g, ids, certs, limits, Scheduler::Sequential)?))
        };
        let game = Game {
            g,
            ids,
            options,
            players: (0..self.spec.level).map(|i| self.spec.player_at(i)).collect(),
            restrictors: &self.spec.restrictors,
            limits,
            verdict: &verdict,
        };
        game.solve()
    }
}

/// Compiles and arbitrates; falls back to direct evaluation when the game
/// is larger than the budget.
pub fn decide_via_formula(g: &LabeledGraph, f: &Formula, ids: &[String]) -> Result<bool> {
    let arb = compile_formula_to_arbiter(f)?;
    match arb.arbitrate(g, ids, Limits::default()) {
        Err(Error::BudgetExceeded(_)) => evaluate(&structural_representation(g)?, f, &Assignment::new()),
        other => other,
    }
}
