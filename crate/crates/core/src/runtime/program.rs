use std::any::Any;
use std::sync::Arc;

use super::machine::Machine;

/// What a node knows locally at the start of a round.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub round: usize,
    pub label: &'a str,
    pub id: &'a str,
    pub certs: &'a [String],
    pub degree: usize,
}

/// Private state carried by a node between rounds.
pub type Memory = Box<dyn Any + Send + Sync>;

/// Output of one round of a node program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Step {
    /// Messages for the neighbors in ascending identifier order; missing
    /// entries are sent as empty strings.
    pub send: Vec<String>,
    /// `Some(result)` stops the node with the given result label.
    pub halt: Option<String>,
    /// Local computation steps spent in this round.
    pub steps: usize,
}

impl Step {
    pub fn send(send: Vec<String>) -> Self {
        Step { send, halt: None, steps: 1 }
    }

    pub fn halt(result: impl Into<String>) -> Self {
        Step { send: Vec::new(), halt: Some(result.into()), steps: 1 }
    }

    pub fn accept(accept: bool) -> Self {
        Step::halt(if accept { "1" } else { "0" })
    }
}

/// A per-round procedure run at every node, subject to the same message
/// discipline as a distributed Turing machine.
pub trait NodeProgram: Send + Sync {
    /// Minimum ρ for which identifiers must be ρ-locally unique.
    fn id_radius(&self) -> usize {
        1
    }

    fn init(&self) -> Memory {
        Box::new(())
    }

    /// `incoming` holds one payload per neighbor in ascending identifier
    /// order; every payload is empty in round 1.
    fn round(&self, view: &NodeView, memory: &mut Memory, incoming: &[String]) -> Step;
}

/// Anything the scheduler can execute.
#[derive(Clone)]
pub enum Program {
    Machine(Arc<Machine>),
    Node(Arc<dyn NodeProgram>),
}

impl Program {
    pub fn node<P: NodeProgram + 'static>(p: P) -> Self {
        Program::Node(Arc::new(p))
    }

    pub fn id_radius(&self) -> usize {
        match self {
            Program::Machine(_) => 1,
            Program::Node(p) => p.id_radius().max(1),
        }
    }
}

impl From<Machine> for Program {
    fn from(m: Machine) -> Self {
        Program::Machine(Arc::new(m))
    }
}

/// Program accepting iff its label is "1" and every neighbor's label is "1".
pub struct AllSelected;

impl NodeProgram for AllSelected {
    fn round(&self, view: &NodeView, _memory: &mut Memory, incoming: &[String]) -> Step {
        if view.round == 1 {
            let bit = if view.label == "1" { "1" } else { "0" };
            return Step::send(vec![bit.to_string(); view.degree]);
        }
        Step::accept(view.label == "1" && incoming.iter().all(|m| m == "1"))
    }
}

/// Program accepting everything in one round.
pub struct AcceptAll;

impl NodeProgram for AcceptAll {
    fn round(&self, _view: &NodeView, _memory: &mut Memory, _incoming: &[String]) -> Step {
        Step::accept(true)
    }
}
