//! Synchronous execution of distributed machines and node programs.

mod gather;
mod machine;
mod program;

pub use gather::{GatherProgram, LocalInput, Record};
pub use machine::{step_local, Config, Machine, Move, Sym, Tape, Transition, QPAUSE, QSTART, QSTOP};
pub use program::{AcceptAll, AllSelected, Memory, NodeProgram, NodeView, Program, Step};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{check_locally_unique, id_compare, LabeledGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_rounds: usize,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_rounds: 64, max_steps: 1_000_000 }
    }
}

/// Order in which phase 2 visits the nodes of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduler {
    #[default]
    Sequential,
    Reverse,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionResult {
    /// Input topology with every label replaced by the node's result.
    pub graph: LabeledGraph,
    pub verdicts: Vec<bool>,
    pub rounds: usize,
    /// `steps[v][k]`: phase-2 steps of node `v` in round `k + 1`.
    pub steps: Vec<Vec<usize>>,
    /// `input_sizes[v][k]`: receiving plus internal tape length at the start of round `k + 1`.
    pub input_sizes: Vec<Vec<usize>>,
    /// Maximum number of tape cells touched by each node.
    pub space: Vec<usize>,
    /// Unfiltered final output per node (internal tape content or the
    /// string a node program halted with).
    pub outputs: Vec<String>,
}

/// True iff every node accepts.
pub fn accepts(res: &ExecutionResult) -> bool {
    res.verdicts.iter().all(|&v| v)
}

/// Payloads ordered by sender identifier, each followed by ⌗ (written `#`).
pub fn sort_incoming(messages: &[(String, String)]) -> Result<String> {
    let mut sorted: Vec<&(String, String)> = messages.iter().collect();
    sorted.sort_by(|a, b| id_compare(&a.0, &b.0));
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateSenderId(w[0].0.clone()));
    }
    Ok(sorted.iter().map(|(_, m)| format!("{m}#")).collect())
}

enum NodeState {
    Machine { internal: Tape, stopped: bool },
    Program { memory: Memory, stopped: bool },
}

struct RoundOutput {
    send: Vec<String>,
    stopped: bool,
    steps: usize,
    input_size: usize,
    space: usize,
}

fn bits_only(s: &str) -> String {
    s.chars().filter(|&c| c == '0' || c == '1').collect()
}

/// Splits a sending-tape content into the first `d` messages.
fn split_messages(content: &str, d: usize) -> Vec<String> {
    let mut out: Vec<String> = content.split('#').take(d).map(bits_only).collect();
    out.resize(d, String::new());
    out
}

struct Ctx<'a> {
    g: &'a LabeledGraph,
    ids: &'a [String],
    certs: &'a [Vec<String>],
    limits: Limits,
}

impl Ctx<'_> {
    fn certs(&self, v: usize) -> &[String] {
        self.certs.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    fn run_node(&self, prog: &Program, v: usize, round: usize, state: &mut NodeState, incoming: &[String]) -> Result<RoundOutput> {
        let d = self.g.degree(v);
        match (prog, state) {
            (Program::Machine(m), NodeState::Machine { internal, stopped }) => {
                if *stopped {
                    return Ok(RoundOutput { send: vec![String::new(); d], stopped: true, steps: 0, input_size: 0, space: 0 });
                }
                let recv: String = incoming.iter().map(|m| format!("{m}#")).collect();
                let mut cfg = Config {
                    state: QSTART,
                    receiving: Tape::from_str(&recv),
                    internal: Tape { cells: internal.cells.clone(), head: 0 },
                    sending: Tape::new(&[]),
                };
                let input_size = recv.len() + internal.cells.len() - 1;
                let mut steps = 0;
                let mut space = 0;
                while cfg.state != QPAUSE && cfg.state != QSTOP {
                    if steps == self.limits.max_steps {
                        return Err(Error::StepLimitExceeded {
                            node: self.g.name(v).to_string(),
                            round,
                            limit: self.limits.max_steps,
                        });
                    }
                    cfg = step_local(m, &cfg)?;
                    steps += 1;
                    space = space.max(cfg.receiving.used() + cfg.internal.used() + cfg.sending.used());
                }
                *internal = cfg.internal;
                *stopped = cfg.state == QSTOP;
                Ok(RoundOutput { send: split_messages(&cfg.sending.content(), d), stopped: *stopped, steps, input_size, space })
            }
            (Program::Node(p), NodeState::Program { memory, stopped }) => {
                if *stopped {
                    return Ok(RoundOutput { send: vec![String::new(); d], stopped: true, steps: 0, input_size: 0, space: 0 });
                }
                let view = NodeView { round, label: self.g.label(v), id: &self.ids[v], certs: self.certs(v), degree: d };
                let step = p.round(&view, memory, incoming);
                if step.steps > self.limits.max_steps {
                    return Err(Error::StepLimitExceeded { node: self.g.name(v).to_string(), round, limit: self.limits.max_steps });
                }
                let mut send: Vec<String> = step.send.into_iter().take(d).collect();
                send.resize(d, String::new());
                let input_size = incoming.iter().map(|m| m.len() + 1).sum::<usize>();
                let space = send.iter().map(|m| m.len() + 1).sum::<usize>();
                if let Some(result) = step.halt {
                    *memory = Box::new(result);
                    *stopped = true;
                }
                Ok(RoundOutput { send, stopped: *stopped, steps: step.steps, input_size, space })
            }
            _ => unreachable!("node state matches program kind"),
        }
    }
}

/// Runs `prog` on `g` in synchronous rounds until every node has stopped.
///
/// `certs[v]` is the certificate list of node `v` (may be empty or shorter
/// than the node count, meaning no certificates).
pub fn execute(
    prog: &Program,
    g: &LabeledGraph,
    ids: &[String],
    certs: &[Vec<String>],
    limits: Limits,
    scheduler: Scheduler,
) -> Result<ExecutionResult> {
    let n = g.node_count();
    let rho = prog.id_radius();
    if !check_locally_unique(g, ids, rho)? {
        return Err(Error::NotLocallyUnique(rho));
    }
    let ctx = Ctx { g, ids, certs, limits };
    let by_id: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut nb = g.neighbors(v).to_vec();
            nb.sort_by(|&a, &b| id_compare(&ids[a], &ids[b]));
            nb
        })
        .collect();
    let mut states: Vec<NodeState> = (0..n)
        .map(|v| match prog {
            Program::Machine(_) => {
                let init = format!("{}#{}#{}", g.label(v), ids[v], ctx.certs(v).join("#"));
                NodeState::Machine { internal: Tape::from_str(&init), stopped: false }
            }
            Program::Node(p) => NodeState::Program { memory: p.init(), stopped: false },
        })
        .collect();
    let mut inbox: Vec<Vec<String>> = (0..n).map(|v| vec![String::new(); g.degree(v)]).collect();
    let mut steps = vec![Vec::new(); n];
    let mut input_sizes = vec![Vec::new(); n];
    let mut space = vec![0; n];
    let mut round = 0;
    loop {
        round += 1;
        if round > limits.max_rounds {
            return Err(Error::RoundLimitExceeded(limits.max_rounds));
        }
        let outputs: Vec<Result<RoundOutput>> = match scheduler {
            Scheduler::Sequential => states
                .iter_mut()
                .enumerate()
                .map(|(v, s)| ctx.run_node(prog, v, round, s, &inbox[v]))
                .collect(),
            Scheduler::Reverse => {
                let mut out: Vec<Result<RoundOutput>> = states
                    .iter_mut()
                    .enumerate()
                    .rev()
                    .map(|(v, s)| ctx.run_node(prog, v, round, s, &inbox[v]))
                    .collect();
                out.reverse();
                out
            }
            Scheduler::Parallel => states
                .par_iter_mut()
                .enumerate()
                .map(|(v, s)| ctx.run_node(prog, v, round, s, &inbox[v]))
                .collect(),
        };
        let outputs: Vec<RoundOutput> = outputs.into_iter().collect::<Result<_>>()?;
        let mut next: Vec<Vec<String>> = (0..n).map(|v| vec![String::new(); g.degree(v)]).collect();
        for (v, out) in outputs.iter().enumerate() {
            for (k, &w) in by_id[v].iter().enumerate() {
                let slot = by_id[w].iter().position(|&x| x == v).unwrap();
                next[w][slot] = out.send[k].clone();
            }
            steps[v].push(out.steps);
            input_sizes[v].push(out.input_size);
            space[v] = space[v].max(out.space);
        }
        inbox = next;
        if outputs.iter().all(|o| o.stopped) {
            break;
        }
    }
    let outputs: Vec<String> = states
        .into_iter()
        .map(|s| match s {
            NodeState::Machine { internal, .. } => internal.content(),
            NodeState::Program { memory, .. } => memory.downcast_ref::<String>().expect("halted node stores its result").clone(),
        })
        .collect();
    let results: Vec<String> = outputs.iter().map(|o| bits_only(o)).collect();
    let verdicts = results.iter().map(|r| r == "1").collect();
    Ok(ExecutionResult { graph: g.with_labels(results), verdicts, rounds: round, steps, input_sizes, space, outputs })
}
