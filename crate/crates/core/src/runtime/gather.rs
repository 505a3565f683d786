use std::collections::BTreeMap;
use std::sync::Arc;

use super::program::{Memory, NodeProgram, NodeView, Step};
use crate::error::Result;
use crate::graph::LabeledGraph;

/// One node's record in the gathered neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub label: String,
    /// Neighbor identifiers in ascending order.
    pub neighbors: Vec<String>,
    pub certs: Vec<String>,
}

/// What a node knows when it computes its output.
#[derive(Debug, Clone)]
pub struct LocalInput {
    pub id: String,
    pub label: String,
    pub certs: Vec<String>,
    /// (identifier, label) of each neighbor, ascending by identifier.
    pub neighbors: Vec<(String, String)>,
    /// Complete records of all nodes within the gather radius, keyed by id.
    pub records: BTreeMap<String, Record>,
}

impl LocalInput {
    /// The gathered ball as a graph with nodes named `n{id}`. An edge is
    /// kept only when both endpoints list each other, so an outside
    /// neighbor sharing an identifier with a node inside is never linked.
    pub fn ball_graph(&self) -> Result<LabeledGraph> {
        let name = |id: &str| format!("n{id}");
        let nodes = self.records.values().map(|r| (name(&r.id), r.label.clone()));
        let mut edges = Vec::new();
        for r in self.records.values() {
            for w in &r.neighbors {
                let mutual = self.records.get(w).is_some_and(|o| o.neighbors.contains(&r.id));
                if mutual && r.id < *w {
                    edges.push((name(&r.id), name(w)));
                }
            }
        }
        LabeledGraph::from_parts(nodes, edges)
    }
}

type Compute = Arc<dyn Fn(&LocalInput) -> String + Send + Sync>;

/// Gathers the `gather`-neighborhood, then halts with `compute`'s result.
/// Runs for `gather + 2` rounds, or a single round when built with
/// [`GatherProgram::local`].
pub struct GatherProgram {
    gather: Option<usize>,
    id_radius: usize,
    compute: Compute,
}

#[derive(Default)]
struct GatherState {
    neighbors: Vec<(String, String)>,
    records: BTreeMap<String, Record>,
}

fn encode_records<'a>(records: impl Iterator<Item = &'a Record>) -> String {
    records
        .map(|r| {
            let nbrs: String = r.neighbors.iter().map(|n| format!("{n};")).collect();
            let certs: String = r.certs.iter().map(|c| format!("{c}|")).collect();
            format!("{}\t{}\t{}\t{}\n", r.id, r.label, nbrs, certs)
        })
        .collect()
}

fn decode_records(text: &str) -> Vec<Record> {
    text.lines()
        .filter_map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            let [id, label, nbrs, certs] = f.as_slice() else { return None };
            Some(Record {
                id: id.to_string(),
                label: label.to_string(),
                neighbors: nbrs.split_terminator(';').map(String::from).collect(),
                certs: certs.split_terminator('|').map(String::from).collect(),
            })
        })
        .collect()
}

impl GatherProgram {
    pub fn new(gather: usize, id_radius: usize, compute: impl Fn(&LocalInput) -> String + Send + Sync + 'static) -> Self {
        GatherProgram { gather: Some(gather), id_radius, compute: Arc::new(compute) }
    }

    /// Computes from the node's own label, identifier and certificates.
    pub fn local(id_radius: usize, compute: impl Fn(&LocalInput) -> String + Send + Sync + 'static) -> Self {
        GatherProgram { gather: None, id_radius, compute: Arc::new(compute) }
    }

    fn own(view: &NodeView, neighbors: Vec<String>) -> Record {
        Record { id: view.id.to_string(), label: view.label.to_string(), neighbors, certs: view.certs.to_vec() }
    }

    fn finish(&self, view: &NodeView, st: &GatherState) -> Step {
        let input = LocalInput {
            id: view.id.to_string(),
            label: view.label.to_string(),
            certs: view.certs.to_vec(),
            neighbors: st.neighbors.clone(),
            records: st.records.clone(),
        };
        let mut step = Step::halt((self.compute)(&input));
        step.steps = 1 + st.records.len() + st.neighbors.len();
        step
    }
}

impl NodeProgram for GatherProgram {
    fn id_radius(&self) -> usize {
        self.id_radius
    }

    fn init(&self) -> Memory {
        Box::new(GatherState::default())
    }

    fn round(&self, view: &NodeView, memory: &mut Memory, incoming: &[String]) -> Step {
        let st = memory.downcast_mut::<GatherState>().expect("gather state");
        let Some(gather) = self.gather else {
            let own = Self::own(view, Vec::new());
            st.records.insert(own.id.clone(), own);
            return self.finish(view, st);
        };
        match view.round {
            1 => Step::send(vec![format!("{}\t{}", view.id, view.label); view.degree]),
            2 => {
                st.neighbors = incoming
                    .iter()
                    .map(|m| {
                        let (id, label) = m.split_once('\t').unwrap_or((m, ""));
                        (id.to_string(), label.to_string())
                    })
                    .collect();
                let own = Self::own(view, st.neighbors.iter().map(|(id, _)| id.clone()).collect());
                st.records.insert(own.id.clone(), own);
                if gather == 0 {
                    return self.finish(view, st);
                }
                Step::send(vec![encode_records(st.records.values()); view.degree])
            }
            k => {
                for m in incoming {
                    for r in decode_records(m) {
                        st.records.entry(r.id.clone()).or_insert(r);
                    }
                }
                if k - 2 >= gather {
                    return self.finish(view, st);
                }
                Step::send(vec![encode_records(st.records.values()); view.degree])
            }
        }
    }
}
