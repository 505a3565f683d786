//! Local reductions run as node programs, and the concrete constructions.
//!
//! Every node first gathers its neighborhood (identifiers, labels and
//! adjacency out to a fixed radius), then computes either a new label for
//! itself or a cluster of output nodes. Cluster descriptions refer to
//! neighbor clusters through identifiers; the assembler resolves them to
//! input node names, so output node `U__tag` belongs to input node `U`.

mod cook_levin;
pub mod figures;
mod hamiltonian;
mod sat;

pub use cook_levin::{cook_levin_translate, element_name, translate_body, CookLevin};
pub use hamiltonian::{AllSelectedToEulerian, AllSelectedToHamiltonian, NotAllSelectedToHamiltonian};
pub use sat::{clauses_of, to_3cnf, SatToThreeSat, ThreeSatToThreeColorable};

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{generate_small_ids, LabeledGraph};
use crate::oracles::{check_property, Property};
pub use crate::runtime::{LocalInput, Record};
use crate::runtime::{execute, ExecutionResult, GatherProgram, Limits, Memory, NodeProgram, NodeView, Program, Scheduler, Step};

/// Output of a cluster reduction: `cluster_map[o]` is the input node that
/// owns output node `o`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterGraph {
    pub output: LabeledGraph,
    pub cluster_map: Vec<usize>,
}

impl ClusterGraph {
    /// Output nodes owned by input node `v`.
    pub fn cluster(&self, v: usize) -> Vec<usize> {
        (0..self.cluster_map.len()).filter(|&o| self.cluster_map[o] == v).collect()
    }
}

/// Every output edge stays inside a cluster or joins clusters of adjacent
/// input nodes, and the output is connected.
pub fn validate_cluster_map(cg: &ClusterGraph, input: &LabeledGraph) -> Result<bool> {
    if cg.cluster_map.len() != cg.output.node_count() {
        let missing = cg.output.names().get(cg.cluster_map.len()).cloned().unwrap_or_default();
        return Err(Error::UnknownNode(missing));
    }
    if let Some(o) = cg.cluster_map.iter().position(|&v| v >= input.node_count()) {
        return Err(Error::UnknownNode(cg.output.name(o).to_string()));
    }
    let local = cg.output.edges().iter().all(|&(a, b)| {
        let (u, w) = (cg.cluster_map[a], cg.cluster_map[b]);
        u == w || input.has_edge(u, w)
    });
    Ok(local && crate::graph::validate_graph(&cg.output).is_ok())
}

/// Endpoint of an output edge: a node of the own cluster, or a node of the
/// cluster of the neighbor with the given identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ref {
    Own(String),
    Nbr(String, String),
}

/// Cluster description computed by one node. Tags may contain `@id`,
/// which stands for the name of the neighbor with identifier `id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cluster {
    pub nodes: Vec<(String, String)>,
    pub edges: Vec<(Ref, Ref)>,
}

impl Cluster {
    pub fn node(&mut self, tag: impl Into<String>, label: impl Into<String>) {
        self.nodes.push((tag.into(), label.into()));
    }

    pub fn edge(&mut self, a: &str, b: &str) {
        self.edges.push((Ref::Own(a.into()), Ref::Own(b.into())));
    }

    /// Edge from own node `a` to node `b` of neighbor `nid`'s cluster.
    pub fn cross(&mut self, a: &str, nid: &str, b: &str) {
        self.edges.push((Ref::Own(a.into()), Ref::Nbr(nid.into(), b.into())));
    }

    fn serialize(&self) -> String {
        let mut out = String::new();
        let r = |x: &Ref| match x {
            Ref::Own(t) => t.clone(),
            Ref::Nbr(n, t) => format!("^{n}/{t}"),
        };
        for (t, l) in &self.nodes {
            out.push_str(&format!("node\t{t}\t{l}\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("edge\t{}\t{}\n", r(a), r(b)));
        }
        out
    }

    fn deserialize(text: &str) -> Result<Cluster> {
        let bad = || Error::Unsupported(format!("malformed cluster description {text:?}"));
        let r = |s: &str| match s.strip_prefix('^') {
            Some(rest) => rest.split_once('/').map(|(n, t)| Ref::Nbr(n.into(), t.into())).ok_or_else(bad),
            None => Ok(Ref::Own(s.into())),
        };
        let mut c = Cluster::default();
        for line in text.lines() {
            let f: Vec<&str> = line.split('\t').collect();
            match f.as_slice() {
                ["node", t, l] => c.node(*t, *l),
                ["edge", a, b] => c.edges.push((r(a)?, r(b)?)),
                _ => return Err(bad()),
            }
        }
        Ok(c)
    }
}

/// A reduction whose nodes each emit a cluster of output nodes.
pub trait ClusterReduction: Send + Sync {
    fn name(&self) -> &'static str;

    /// Rejects labels the construction cannot handle.
    fn check_label(&self, _label: &str) -> Result<()> {
        Ok(())
    }

    /// 0 means only the neighbors' identifiers and labels are gathered.
    fn gather_radius(&self) -> usize {
        0
    }

    fn id_radius(&self) -> usize {
        1
    }

    fn cluster(&self, input: &LocalInput) -> Cluster;
}

/// A reduction that replaces every label and keeps the topology.
pub trait LabelReduction: Send + Sync {
    fn name(&self) -> &'static str;

    fn check_label(&self, _label: &str) -> Result<()> {
        Ok(())
    }

    fn gather_radius(&self) -> usize {
        0
    }

    fn id_radius(&self) -> usize {
        1
    }

    fn relabel(&self, input: &LocalInput) -> String;
}

fn check_labels(g: &LabeledGraph, check: impl Fn(&str) -> Result<()>) -> Result<()> {
    for v in 0..g.node_count() {
        check(g.label(v)).map_err(|e| match e {
            Error::Not3Cnf(_) => Error::Not3Cnf(g.name(v).to_string()),
            Error::NonBinaryLabel(_) => Error::NonBinaryLabel(g.name(v).to_string()),
            e => e,
        })?;
    }
    Ok(())
}

fn limits_for(gather: usize) -> Limits {
    Limits { max_rounds: gather + 2, ..Limits::default() }
}

/// Runs a cluster reduction and assembles its output.
pub fn run_cluster_reduction(
    red: &Arc<dyn ClusterReduction>,
    g: &LabeledGraph,
    ids: &[String],
    scheduler: Scheduler,
) -> Result<(ClusterGraph, ExecutionResult)> {
    check_labels(g, |l| red.check_label(l))?;
    let r = red.clone();
    let prog = GatherProgram::new(red.gather_radius(), red.id_radius(), move |input| r.cluster(input).serialize());
    let res = execute(&Program::node(prog), g, ids, &[], limits_for(red.gather_radius()), scheduler)?;
    let cg = assemble(g, ids, &res.outputs)?;
    Ok((cg, res))
}

pub fn reduce(red: impl ClusterReduction + 'static, g: &LabeledGraph, ids: &[String]) -> Result<ClusterGraph> {
    let red: Arc<dyn ClusterReduction> = Arc::new(red);
    Ok(run_cluster_reduction(&red, g, ids, Scheduler::Sequential)?.0)
}

/// Runs a label reduction; the output has the input's topology.
pub fn run_label_reduction(
    red: &Arc<dyn LabelReduction>,
    g: &LabeledGraph,
    ids: &[String],
    scheduler: Scheduler,
) -> Result<(LabeledGraph, ExecutionResult)> {
    check_labels(g, |l| red.check_label(l))?;
    let r = red.clone();
    let prog = GatherProgram::new(red.gather_radius(), red.id_radius(), move |input| r.relabel(input));
    let res = execute(&Program::node(prog), g, ids, &[], limits_for(red.gather_radius()), scheduler)?;
    Ok((g.with_labels(res.outputs.clone()), res))
}

pub fn relabel(red: impl LabelReduction + 'static, g: &LabeledGraph, ids: &[String]) -> Result<LabeledGraph> {
    let red: Arc<dyn LabelReduction> = Arc::new(red);
    Ok(run_label_reduction(&red, g, ids, Scheduler::Sequential)?.0)
}

/// Replaces every `@id` in `tag` by the name of `v`'s neighbor with that id.
fn resolve(g: &LabeledGraph, ids: &[String], v: usize, tag: &str) -> Result<String> {
    let mut out = String::new();
    let mut rest = tag;
    while let Some(pos) = rest.find('@') {
        out.push_str(&rest[..pos]);
        let after = &rest[pos + 1..];
        let len = after.bytes().take_while(|&b| b == b'0' || b == b'1').count();
        out.push_str(neighbor_by_id(g, ids, v, &after[..len]).map(|w| g.name(w))?);
        rest = &after[len..];
    }
    out.push_str(rest);
    Ok(out)
}

fn neighbor_by_id(g: &LabeledGraph, ids: &[String], v: usize, id: &str) -> Result<usize> {
    g.neighbors(v)
        .iter()
        .copied()
        .find(|&w| ids[w] == id)
        .ok_or_else(|| Error::UnknownNode(format!("neighbor {id:?} of {}", g.name(v))))
}

fn assemble(g: &LabeledGraph, ids: &[String], outputs: &[String]) -> Result<ClusterGraph> {
    let clusters: Vec<Cluster> = outputs.iter().map(|o| Cluster::deserialize(o)).collect::<Result<_>>()?;
    let full = |v: usize, tag: &str| -> Result<String> { Ok(format!("{}__{}", g.name(v), resolve(g, ids, v, tag)?)) };
    let mut nodes = Vec::new();
    let mut cluster_map = Vec::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (v, c) in clusters.iter().enumerate() {
        for (tag, label) in &c.nodes {
            nodes.push((full(v, tag)?, label.clone()));
            cluster_map.push(v);
        }
        for (a, b) in &c.edges {
            let end = |r: &Ref| match r {
                Ref::Own(t) => full(v, t),
                Ref::Nbr(nid, t) => full(neighbor_by_id(g, ids, v, nid)?, t),
            };
            let (a, b) = (end(a)?, end(b)?);
            let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if seen.insert(key) {
                edges.push((a, b));
            }
        }
    }
    let output = LabeledGraph::from_parts(nodes, edges)?;
    Ok(ClusterGraph { output, cluster_map })
}

/// Relabels every node by itself: the trivial cluster reduction.
pub struct Identity;

impl ClusterReduction for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn cluster(&self, input: &LocalInput) -> Cluster {
        let mut c = Cluster::default();
        c.node("self", input.label.clone());
        for (nid, _) in &input.neighbors {
            c.cross("self", nid, "self");
        }
        c
    }
}

/// Accepts iff the node's degree is even.
pub struct EvenDegree;

impl NodeProgram for EvenDegree {
    fn round(&self, view: &NodeView, _memory: &mut Memory, _incoming: &[String]) -> Step {
        Step::accept(view.degree % 2 == 0)
    }
}

/// Decides the target property of a reduction.
#[derive(Clone)]
pub enum Decider {
    Program(Program),
    Oracle(Property),
}

/// Runs `decider` on the reduction's output and reports, per input node,
/// whether every node of its cluster accepts.
///
/// An oracle decider yields one global verdict, copied to every node.
pub fn simulate_through_reduction_verdicts(
    decider: &Decider,
    red: &Arc<dyn ClusterReduction>,
    g: &LabeledGraph,
    ids: &[String],
    limits: Limits,
) -> Result<Vec<bool>> {
    let (cg, _) = run_cluster_reduction(red, g, ids, Scheduler::Sequential)?;
    match decider {
        Decider::Oracle(p) => Ok(vec![check_property(*p, &cg.output)?; g.node_count()]),
        Decider::Program(prog) => {
            let out_ids = generate_small_ids(&cg.output, prog.id_radius(), 0);
            let res = execute(prog, &cg.output, &out_ids, &[], limits, Scheduler::Sequential)?;
            let mut verdicts = vec![true; g.node_count()];
            for (o, &v) in cg.cluster_map.iter().enumerate() {
                verdicts[v] &= res.verdicts[o];
            }
            Ok(verdicts)
        }
    }
}

/// True iff every input node accepts in
/// [`simulate_through_reduction_verdicts`].
pub fn simulate_through_reduction(
    decider: &Decider,
    red: &Arc<dyn ClusterReduction>,
    g: &LabeledGraph,
    ids: &[String],
    limits: Limits,
) -> Result<bool> {
    Ok(simulate_through_reduction_verdicts(decider, red, g, ids, limits)?.into_iter().all(|b| b))
}
