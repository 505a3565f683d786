use std::cmp::Ordering;

use lph::graph::*;
use lph::io::{parse_graph, write_graph};
use lph::{Element, Error, LabeledGraph, Polynomial};
use proptest::prelude::*;

fn four_nodes() -> LabeledGraph {
    LabeledGraph::build(
        &[("u", "010"), ("v", "10"), ("w", "1101"), ("x", "001")],
        &[("u", "v"), ("u", "w"), ("u", "x"), ("v", "w")],
    )
    .unwrap()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Floyd–Warshall over the edge list, independent of the library's BFS.
fn all_pairs(g: &LabeledGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inf = usize::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in g.edges() {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

#[test]
fn validate_accepts_and_rejects() {
    assert!(LabeledGraph::build(&[("a", "")], &[]).is_ok());
    assert!(LabeledGraph::build(&[("a", ""), ("b", ""), ("c", "")], &[("a", "b"), ("b", "c"), ("c", "a")]).is_ok());
    assert_eq!(LabeledGraph::build(&[("a", ""), ("b", "")], &[]), Err(Error::Disconnected("b".into())));
    assert_eq!(LabeledGraph::build(&[("a", ""), ("b", "")], &[("a", "a"), ("a", "b")]), Err(Error::SelfLoop("a".into())));
    assert_eq!(
        LabeledGraph::build(&[("a", ""), ("b", "")], &[("a", "b"), ("b", "a")]),
        Err(Error::DuplicateEdge("b".into(), "a".into()))
    );
    assert_eq!(LabeledGraph::build(&[], &[]), Err(Error::Empty));
}

#[test]
fn neighborhood_of_upper_right_node() {
    let g = four_nodes();
    let n0 = neighborhood(&g, "x", 0).unwrap();
    assert_eq!(n0.node_count(), 1);
    assert_eq!(n0.label(0), "001");
    let n2 = neighborhood(&g, "x", 2).unwrap();
    assert!(isomorphic(&n2, &g));
    assert!(isomorphic(&neighborhood(&g, "v", 10).unwrap(), &g));
    assert_eq!(neighborhood(&g, "nope", 1), Err(Error::UnknownNode("nope".into())));
}

#[test]
fn structural_representation_cardinalities() {
    let g = four_nodes();
    assert_eq!(structural_representation(&g).unwrap().len(), 16);
    assert_eq!(structural_neighborhood(&g, "x", 0).unwrap().len(), 4);
    assert_eq!(structural_neighborhood(&g, "x", 1).unwrap().len(), 8);
    assert_eq!(structural_neighborhood(&g, "x", 5).unwrap().len(), 16);
}

#[test]
fn structural_representation_small_cases() {
    let s = structural_representation(&LabeledGraph::build(&[("v", "")], &[]).unwrap()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!((s.link_count(1), s.link_count(2), s.bit_set(1).len()), (0, 0, 0));

    let s = structural_representation(&LabeledGraph::build(&[("v", "1")], &[]).unwrap()).unwrap();
    assert_eq!(s.len(), 2);
    let v = s.find(&Element::Node("v".into())).unwrap();
    let b = s.find(&Element::Bit("v".into(), 1)).unwrap();
    assert!(s.link(2, v, b));
    assert_eq!(s.link_count(2), 1);
    assert_eq!(s.link_count(1), 0);
    assert_eq!(s.bit_set(1), vec![b]);
}

#[test]
fn structural_relations_match_definition() {
    let g = four_nodes();
    let s = structural_representation(&g).unwrap();
    let e = |x: Element| s.find(&x).unwrap();
    let node = |n: &str| e(Element::Node(n.into()));
    let bit = |n: &str, i| e(Element::Bit(n.into(), i));
    assert!(s.link(1, node("u"), node("x")) && s.link(1, node("x"), node("u")));
    assert!(!s.link(1, node("v"), node("x")));
    assert!(s.link(1, bit("w", 2), bit("w", 3)) && !s.link(1, bit("w", 3), bit("w", 2)));
    assert!(s.link(2, node("w"), bit("w", 4)) && !s.link(2, bit("w", 4), node("w")));
    assert_eq!(s.bit_set(1).len(), 1 + 1 + 3 + 1);
    // 4 edges both ways, 2 + 1 + 3 + 2 bit successors
    assert_eq!(s.link_count(1), 8 + 8);
    assert_eq!(s.link_count(2), 12);
}

#[test]
fn id_order_examples() {
    assert_eq!(id_compare("0", "01"), Ordering::Less);
    assert_eq!(id_compare("011", "10"), Ordering::Less);
    assert_eq!(id_compare("1", "1"), Ordering::Equal);
    assert_eq!(id_compare("", "0"), Ordering::Less);
    assert_eq!(id_compare("10", "1"), Ordering::Greater);
}

#[test]
fn local_uniqueness_on_six_cycle() {
    let g = LabeledGraph::cycle(6);
    let ids = strings(&["0", "1", "10", "0", "1", "10"]);
    let d = all_pairs(&g);
    let oracle = |rho: usize| (0..6).all(|a| (0..6).all(|b| a == b || d[a][b] > 2 * rho || ids[a] != ids[b]));
    assert!(oracle(1) && !oracle(2));
    assert_eq!(check_locally_unique(&g, &ids, 1), Ok(true));
    assert_eq!(check_locally_unique(&g, &ids, 2), Ok(false));
    let single = LabeledGraph::build(&[("a", "")], &[]).unwrap();
    assert_eq!(check_locally_unique(&single, &strings(&["101"]), 7), Ok(true));
    assert_eq!(check_locally_unique(&g, &strings(&["0"]), 1), Err(Error::MissingId("v2".into())));
}

#[test]
fn small_ids_examples() {
    let single = LabeledGraph::build(&[("a", "")], &[]).unwrap();
    for rho in 0..3 {
        assert_eq!(generate_small_ids(&single, rho, 9), vec![String::new()]);
    }
    let p2 = LabeledGraph::path(2);
    for seed in 0..10 {
        let ids = generate_small_ids(&p2, 1, seed);
        assert!(ids.iter().all(|i| i.len() <= 1));
        assert_ne!(ids[0], ids[1]);
    }
    let g = LabeledGraph::cycle(5);
    assert_eq!(generate_small_ids(&g, 1, 3), generate_small_ids(&g, 1, 3));
}

#[test]
fn small_ids_are_locally_unique_up_to_six_nodes() {
    let d = all_pairs(&LabeledGraph::path(1));
    assert_eq!(d, vec![vec![0]]);
    for g in enumerate_graphs(6, &[String::new()]) {
        let d = all_pairs(&g);
        for rho in 0..=2 {
            for seed in 0..3 {
                let ids = generate_small_ids(&g, rho, seed);
                assert_eq!(check_locally_unique(&g, &ids, rho), Ok(true));
                for v in 0..g.node_count() {
                    let ball = (0..g.node_count()).filter(|&u| d[v][u] <= 2 * rho).count();
                    let bound = (ball as f64).log2().ceil() as usize;
                    assert!(ids[v].len() <= bound, "{ids:?}");
                    for u in 0..g.node_count() {
                        assert!(u == v || d[u][v] > 2 * rho || ids[u] != ids[v]);
                    }
                }
            }
        }
    }
}

#[test]
fn certificate_bound_examples() {
    let g = LabeledGraph::build(&[("v", "1")], &[]).unwrap();
    let x = Polynomial(vec![0, 1]);
    assert_eq!(certificate_bound(&g, &strings(&[""]), "v", 1, &x), Ok(2));
    let k3 = LabeledGraph::complete(3);
    assert_eq!(certificate_bound(&k3, &strings(&["", "", ""]), "v1", 1, &x), Ok(3));
    assert_eq!(certificate_bound(&k3, &strings(&["", "", ""]), "v1", 1, &Polynomial(vec![0])), Ok(0));
    assert_eq!(certificate_bound(&k3, &strings(&["0", "1", "10"]), "v1", 0, &Polynomial(vec![1, 0, 2])), Ok(9));
}

#[test]
fn enumeration_counts() {
    let eps = [String::new()];
    assert_eq!(enumerate_graphs(1, &eps).len(), 1);
    assert_eq!(enumerate_graphs(2, &eps).len(), 2);
    assert_eq!(enumerate_graphs(3, &eps).len(), 4);
    // connected unlabeled graphs on 4 and 5 nodes: 6 and 21
    assert_eq!(enumerate_graphs(4, &eps).len(), 1 + 1 + 2 + 6);
    assert_eq!(enumerate_graphs(5, &eps).len(), 1 + 1 + 2 + 6 + 21);
}

#[test]
fn labeled_enumeration_has_no_duplicates() {
    let bits = strings(&["0", "1"]);
    let all = enumerate_graphs(4, &bits);
    // 2 single nodes, 3 edges, path: 6, triangle: 4
    assert_eq!(all.iter().filter(|g| g.node_count() <= 3).count(), 2 + 3 + 6 + 4);
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            assert!(!isomorphic(a, b));
        }
    }
    assert_eq!(all, enumerate_graphs(4, &bits));
}

#[test]
fn lg_round_trip() {
    let text = "# fig\nnode u label=010 id=0\nnode v label=10 id=1\nnode w label=1101 id=10\nnode x label=001 id=11\nedge u v\nedge u w\nedge u x\nedge v w\n";
    let f = parse_graph(text).unwrap();
    assert!(isomorphic(&f.graph, &four_nodes()));
    assert_eq!(f.ids, Some(strings(&["0", "1", "10", "11"])));
    let again = parse_graph(&write_graph(&f.graph, f.ids.as_deref())).unwrap();
    assert_eq!(again.graph, f.graph);
    assert!(matches!(parse_graph("node a\nedge a b\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_graph("node a\nnode b\n"), Err(Error::Disconnected(_))));
    let quoted = parse_graph("node a label=\"x | !y\"\n").unwrap();
    assert_eq!(quoted.graph.label(0), "x | !y");
}

fn arb_graph(max: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec("[01]{0,3}", n),
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
                proptest::collection::vec(0..1000usize, n),
            )
        })
        .prop_map(|(n, labels, extra, parents)| {
            // random spanning tree plus random extra edges keeps it connected
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((parents[v] % v, v));
            }
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if extra[k] && !edges.contains(&(a, b)) {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            LabeledGraph::new(
                (0..n).map(|i| (format!("n{i}"), labels[i].clone())),
                edges.into_iter().map(|(a, b)| (format!("n{a}"), format!("n{b}"))).collect::<Vec<_>>(),
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn cardinality_is_nodes_plus_bits(g in arb_graph(7)) {
        let s = structural_representation(&g).unwrap();
        prop_assert_eq!(s.len(), g.node_count() + g.labels().iter().map(String::len).sum::<usize>());
    }

    #[test]
    fn neighborhoods_grow(g in arb_graph(7), v in 0..7usize, r in 0..4usize) {
        let v = g.name(v % g.node_count()).to_string();
        let small = neighborhood(&g, &v, r).unwrap();
        let big = neighborhood(&g, &v, r + 1).unwrap();
        prop_assert!(small.names().iter().all(|n| big.index_of(n).is_some()));
    }

    #[test]
    fn id_order_is_strict_total(set in proptest::collection::btree_set("[01]{0,5}", 1..12)) {
        let v: Vec<String> = set.into_iter().collect();
        for a in &v {
            for b in &v {
                let ab = id_compare(a, b);
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                prop_assert_eq!(ab, id_compare(b, a).reverse());
                for c in &v {
                    if ab == Ordering::Less && id_compare(b, c) == Ordering::Less {
                        prop_assert_eq!(id_compare(a, c), Ordering::Less);
                    }
                }
            }
        }
    }

    #[test]
    fn generated_ids_are_small_and_unique(g in arb_graph(7), rho in 0..3usize, seed in any::<u64>()) {
        let ids = generate_small_ids(&g, rho, seed);
        prop_assert!(check_locally_unique(&g, &ids, rho).unwrap());
        prop_assert!(is_small(&g, &ids, rho));
    }
}
