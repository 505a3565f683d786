use super::{Cluster, ClusterReduction, LocalInput};

/// Two copies `0`, `1` of every node; all four edges between the copies of
/// adjacent nodes; the edge `0`–`1` iff the label is not `1`. Every copy
/// then has degree 2d or 2d + 1.
///
/// A single node labeled `1` becomes one isolated node instead of two.
pub struct AllSelectedToEulerian;

impl ClusterReduction for AllSelectedToEulerian {
    fn name(&self) -> &'static str {
        "allselected-to-eulerian"
    }

    fn cluster(&self, input: &LocalInput) -> Cluster {
        let mut c = Cluster::default();
        if input.neighbors.is_empty() && input.label == "1" {
            c.node("0", "");
            return c;
        }
        c.node("0", "");
        c.node("1", "");
        if input.label != "1" {
            c.edge("0", "1");
        }
        for (nid, _) in &input.neighbors {
            for a in ["0", "1"] {
                for b in ["0", "1"] {
                    c.cross(a, nid, b);
                }
            }
        }
        c
    }
}

/// Appends a cycle through `to_@w`, `from_@w` for every neighbor `w`
/// (padded to length three) and links it to the neighbors' cycles.
fn port_cycle(c: &mut Cluster, input: &LocalInput, prefix: &str, tail: &[&str]) -> Vec<String> {
    let mut cycle = Vec::new();
    for (nid, _) in &input.neighbors {
        cycle.push(format!("{prefix}to_@{nid}"));
        cycle.push(format!("{prefix}from_@{nid}"));
    }
    cycle.extend(tail.iter().map(|t| t.to_string()));
    for t in &cycle {
        c.node(t.clone(), "");
    }
    for i in 0..cycle.len() {
        c.edge(&cycle[i], &cycle[(i + 1) % cycle.len()]);
    }
    for (nid, _) in &input.neighbors {
        let me = &input.id;
        c.cross(&format!("{prefix}to_@{nid}"), nid, &format!("{prefix}from_@{me}"));
        c.cross(&format!("{prefix}from_@{nid}"), nid, &format!("{prefix}to_@{me}"));
    }
    cycle
}

/// A cycle of length max(3, 2d) per node with one port pair per neighbor;
/// a tour of a spanning tree threads all cycles into one. Unselected nodes
/// get a pendant `bad` node, which no Hamiltonian cycle can visit.
pub struct AllSelectedToHamiltonian;

impl ClusterReduction for AllSelectedToHamiltonian {
    fn name(&self) -> &'static str {
        "allselected-to-hamiltonian"
    }

    fn cluster(&self, input: &LocalInput) -> Cluster {
        let mut c = Cluster::default();
        let pad: &[&str] = match input.neighbors.len() {
            0 => &["c1", "c2", "c3"],
            1 => &["c1"],
            _ => &[],
        };
        let cycle = port_cycle(&mut c, input, "", pad);
        if input.label != "1" {
            c.node("bad", "");
            c.edge("bad", &cycle[0]);
        }
        c
    }
}

/// Two copies of the port-cycle construction (`top_`, `bot_`), each padded
/// by a chain of three nodes (`dn1..3`, `up1..3`). The rungs `dn2`–`up2`
/// and, for unselected nodes, `dn1`–`up1` are the only links between the
/// layers; a Hamiltonian cycle needs both rungs of one node.
pub struct NotAllSelectedToHamiltonian;

impl ClusterReduction for NotAllSelectedToHamiltonian {
    fn name(&self) -> &'static str {
        "notallselected-to-hamiltonian"
    }

    fn cluster(&self, input: &LocalInput) -> Cluster {
        let mut c = Cluster::default();
        port_cycle(&mut c, input, "top_", &["dn1", "dn2", "dn3"]);
        port_cycle(&mut c, input, "bot_", &["up1", "up2", "up3"]);
        c.edge("dn2", "up2");
        if input.label != "1" {
            c.edge("dn1", "up1");
        }
        c
    }
}
