//! Inputs of the illustrated reduction examples.

use crate::graph::LabeledGraph;

fn graph(nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> LabeledGraph {
    LabeledGraph::build(nodes, edges).expect("figure graphs are well formed")
}

/// Path u – v – w with labels 1, 1, 0 (all-selected to Eulerian).
pub fn eulerian_path() -> LabeledGraph {
    graph(&[("u", "1"), ("v", "1"), ("w", "0")], &[("u", "v"), ("v", "w")])
}

/// Four nodes, u2 unselected (all-selected to Hamiltonian).
pub fn hamiltonian_four() -> LabeledGraph {
    graph(
        &[("u1", "1"), ("u2", "0"), ("u3", "1"), ("u4", "1")],
        &[("u1", "u2"), ("u1", "u3"), ("u1", "u4"), ("u2", "u4"), ("u3", "u4")],
    )
}

/// Path u – v – w with labels 1, 1, 0 (not-all-selected to Hamiltonian).
pub fn two_layer_path() -> LabeledGraph {
    eulerian_path()
}

/// Two adjacent clause nodes sharing x3 (3-SAT graph to 3-colorable).
pub fn clause_pair() -> LabeledGraph {
    graph(&[("u", "x1|!x2|!x3"), ("v", "x3|x4|!x5")], &[("u", "v")])
}

/// Same topology with every label replaced by `1`.
pub fn all_selected(g: &LabeledGraph) -> LabeledGraph {
    g.with_labels(vec!["1".into(); g.node_count()])
}
