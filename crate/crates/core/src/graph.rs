use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::structure::{Element, Structure};

/// Finite simple connected graph whose nodes carry string labels.
///
/// Labels are bit strings for most purposes; Boolean graphs reuse the same
/// type with formula labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    names: Vec<String>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    raw_edges: Vec<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl LabeledGraph {
    /// Builds a graph without checking simplicity or connectivity.
    /// Only unknown endpoints and repeated node names are rejected.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator<Item = (String, String)>,
        E: IntoIterator<Item = (String, String)>,
    {
        let mut names = Vec::new();
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        for (name, label) in nodes {
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::DuplicateNode(name));
            }
            names.push(name);
            labels.push(label);
        }
        let mut raw_edges = Vec::new();
        for (a, b) in edges {
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownNode(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownNode(b.clone()))?;
            raw_edges.push((ia, ib));
        }
        let mut set = HashSet::new();
        let mut adj = vec![Vec::new(); names.len()];
        let mut simple = Vec::new();
        for &(a, b) in &raw_edges {
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if set.insert(e) {
                simple.push(e);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        simple.sort_unstable();
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(LabeledGraph { names, labels, index, raw_edges, edges: simple, adj })
    }

    /// Checked constructor: the result satisfies [`validate_graph`].
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator<Item = (String, String)>,
        E: IntoIterator<Item = (String, String)>,
    {
        let g = Self::from_parts(nodes, edges)?;
        validate_graph(&g)?;
        Ok(g)
    }

    /// Convenience constructor from string slices.
    pub fn build(nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> Result<Self> {
        Self::new(
            nodes.iter().map(|(n, l)| (n.to_string(), l.to_string())),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
    }

    fn numbered(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let nodes = (1..=n).map(|i| (format!("v{i}"), String::new()));
        let edges = edges.into_iter().map(|(a, b)| (format!("v{}", a + 1), format!("v{}", b + 1)));
        Self::new(nodes, edges).expect("well-formed family graph")
    }

    /// Path v1 - v2 - ... - vn with empty labels.
    pub fn path(n: usize) -> Self {
        Self::numbered(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Cycle on n ≥ 3 nodes with empty labels.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three nodes");
        Self::numbered(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Complete graph with empty labels.
    pub fn complete(n: usize) -> Self {
        Self::numbered(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Deduplicated edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbors plus labeling bits: the element's degree in S(G).
    pub fn structural_degree(&self, v: usize) -> usize {
        self.degree(v) + self.labels[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Same topology with new labels.
    pub fn with_labels(&self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.node_count());
        LabeledGraph { labels, ..self.clone() }
    }

    /// BFS distances from `v`; `None` for unreachable nodes.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs distances; `usize::MAX` marks unreachable pairs.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.node_count())
            .map(|v| self.distances_from(v).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
            .collect()
    }

    /// Indices of the nodes at distance at most `r` from `v`, ascending.
    pub fn ball(&self, v: usize, r: usize) -> Vec<usize> {
        self.distances_from(v)
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= r))
            .map(|(u, _)| u)
            .collect()
    }

    /// Induced subgraph on `nodes`, kept in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let keep: HashSet<usize> = nodes.iter().copied().collect();
        let node_list = nodes.iter().map(|&v| (self.names[v].clone(), self.labels[v].clone()));
        let edge_list = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()));
        Self::from_parts(node_list, edge_list.collect::<Vec<_>>()).expect("subset of a valid graph")
    }

    /// Σ over nodes of (1 + label length + id length), the size measure
    /// that certificate bounds are expressed in.
    pub fn information(&self, nodes: &[usize], ids: &[String]) -> usize {
        nodes.iter().map(|&u| 1 + self.labels[u].len() + ids[u].len()).sum()
    }
}

/// Checks that `g` is nonempty, simple and connected.
pub fn validate_graph(g: &LabeledGraph) -> Result<()> {
    if g.names.is_empty() {
        return Err(Error::Empty);
    }
    let mut seen = HashSet::new();
    for &(a, b) in &g.raw_edges {
        if a == b {
            return Err(Error::SelfLoop(g.names[a].clone()));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::DuplicateEdge(g.names[a].clone(), g.names[b].clone()));
        }
    }
    if let Some(v) = g.distances_from(0).iter().position(Option::is_none) {
        return Err(Error::Disconnected(g.names[v].clone()));
    }
    Ok(())
}

/// Induced subgraph on the nodes within distance `r` of `v`.
pub fn neighborhood(g: &LabeledGraph, v: &str, r: usize) -> Result<LabeledGraph> {
    let i = g.require(v)?;
    Ok(g.induced(&g.ball(i, r)))
}

/// Structure of signature (1, 2): nodes and labeling bits as elements,
/// edges and bit successors in →₁, ownership in →₂, 1-bits in P₁.
pub fn structural_representation(g: &LabeledGraph) -> Result<Structure> {
    let n = g.node_count();
    let mut elements: Vec<Element> = g.names.iter().map(|s| Element::Node(s.clone())).collect();
    let mut ones = Vec::new();
    let mut succ = Vec::new();
    let mut owns = Vec::new();
    for v in 0..n {
        let label = &g.labels[v];
        if !label.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::NonBinaryLabel(g.names[v].clone()));
        }
        let first = elements.len();
        for (i, b) in label.bytes().enumerate() {
            let e = elements.len();
            elements.push(Element::Bit(g.names[v].clone(), i + 1));
            if b == b'1' {
                ones.push(e);
            }
            owns.push((v, e));
            if i > 0 {
                succ.push((e - 1, e));
            }
        }
        debug_assert_eq!(elements.len() - first, label.len());
    }
    for &(a, b) in &g.edges {
        succ.push((a, b));
        succ.push((b, a));
    }
    Structure::new(elements, vec![ones], vec![succ, owns])
}

/// Structural representation of the `r`-neighborhood of `v`.
pub fn structural_neighborhood(g: &LabeledGraph, v: &str, r: usize) -> Result<Structure> {
    structural_representation(&neighborhood(g, v, r)?)
}

/// Identifier order: lexicographic, with a proper prefix before its extensions.
/// For strings over {0, 1} this coincides with byte-wise string order.
pub fn id_compare(a: &str, b: &str) -> Ordering {
    a.as_bytes().cmp(b.as_bytes())
}

/// True iff distinct nodes within distance 2ρ of each other carry distinct ids.
pub fn check_locally_unique(g: &LabeledGraph, ids: &[String], rho: usize) -> Result<bool> {
    if ids.len() < g.node_count() {
        return Err(Error::MissingId(g.names[ids.len()].clone()));
    }
    for v in 0..g.node_count() {
        for u in g.ball(v, 2 * rho) {
            if u != v && ids[u] == ids[v] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every id is at most ⌈log₂ |N^{2ρ}(v)|⌉ bits long.
pub fn is_small(g: &LabeledGraph, ids: &[String], rho: usize) -> bool {
    (0..g.node_count()).all(|v| ids[v].len() <= ceil_log2(g.ball(v, 2 * rho).len()))
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Seeded greedy assignment of small ρ-locally-unique identifiers.
///
/// Nodes are visited in a seeded random order; each picks a random string
/// of admissible length not yet taken within distance 2ρ. There are
/// 2^{L+1} - 1 strings of length ≤ L and fewer than 2^L competitors, so a
/// free string always exists.
pub fn generate_small_ids(g: &LabeledGraph, rho: usize, seed: u64) -> Vec<String> {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut ids: Vec<Option<String>> = vec![None; n];
    for v in order {
        let ball = g.ball(v, 2 * rho);
        let bound = ceil_log2(ball.len());
        let taken: HashSet<&str> = ball.iter().filter_map(|&u| ids[u].as_deref()).collect();
        let free: Vec<String> = all_strings_up_to(bound).filter(|s| !taken.contains(s.as_str())).collect();
        let pick = free[rng.random_range(0..free.len())].clone();
        ids[v] = Some(pick);
    }
    ids.into_iter().map(Option::unwrap).collect()
}

/// All bit strings of length ≤ `len`, shortest first.
pub fn all_strings_up_to(len: usize) -> impl Iterator<Item = String> {
    (0..=len).flat_map(|l| {
        (0..1u64 << l).map(move |bits| (0..l).map(|i| if bits >> (l - 1 - i) & 1 == 1 { '1' } else { '0' }).collect())
    })
}

/// Polynomial with nonnegative integer coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial(pub Vec<u64>);

impl Polynomial {
    pub fn eval(&self, x: u64) -> u64 {
        self.0.iter().rev().fold(0u64, |acc, &c| acc.saturating_mul(x).saturating_add(c))
    }

    /// Parses a comma-separated coefficient list such as `0,1` (= x).
    pub fn parse(text: &str) -> Option<Self> {
        text.split(',').map(|t| t.trim().parse().ok()).collect::<Option<Vec<u64>>>().map(Polynomial)
    }
}

/// p evaluated at Σ over N^r(v) of (1 + |label| + |id|).
pub fn certificate_bound(g: &LabeledGraph, ids: &[String], v: &str, r: usize, p: &Polynomial) -> Result<u64> {
    let i = g.require(v)?;
    if ids.len() < g.node_count() {
        return Err(Error::MissingId(g.names[ids.len()].clone()));
    }
    Ok(p.eval(g.information(&g.ball(i, r), ids) as u64))
}

type CanonicalKey = (Vec<usize>, u64);

fn edge_bit(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    a * n + b
}

fn canonical_key(n: usize, labels: &[usize], adj: u64, perms: &[Vec<usize>]) -> CanonicalKey {
    perms
        .iter()
        .map(|p| {
            let l: Vec<usize> = (0..n).map(|i| labels[p[i]]).collect();
            let mut bits = 0u64;
            for a in 0..n {
                for b in a + 1..n {
                    if adj >> edge_bit(n, p[a], p[b]) & 1 == 1 {
                        bits |= 1 << edge_bit(n, a, b);
                    }
                }
            }
            (l, bits)
        })
        .min()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every connected labeled graph with at most `max_nodes` nodes and labels
/// drawn from `alphabet`, once per isomorphism class.
///
/// Graphs are ordered by node count and then by canonical form (the
/// smallest label vector and adjacency bitmask over all node orders).
/// Nodes are named v1, v2, ... in canonical order.
pub fn enumerate_graphs(max_nodes: usize, alphabet: &[String]) -> Vec<LabeledGraph> {
    assert!((1..=7).contains(&max_nodes), "enumeration supports 1 to 7 nodes");
    let mut alphabet: Vec<String> = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let mut out = Vec::new();
    if alphabet.is_empty() {
        return out;
    }
    for n in 1..=max_nodes {
        let perms = permutations(n);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut keys = HashSet::new();
        for mask in 0..1u64 << pairs.len() {
            let mut adj = 0u64;
            for (k, &(a, b)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    adj |= 1 << edge_bit(n, a, b);
                }
            }
            if !bitmask_connected(n, adj) {
                continue;
            }
            let mut labels = vec![0usize; n];
            loop {
                keys.insert(canonical_key(n, &labels, adj, &perms));
                if !next_tuple(&mut labels, alphabet.len()) {
                    break;
                }
            }
        }
        let mut keys: Vec<CanonicalKey> = keys.into_iter().collect();
        keys.sort();
        for (labels, adj) in keys {
            let nodes = (0..n).map(|i| (format!("v{}", i + 1), alphabet[labels[i]].clone()));
            let edges = pairs
                .iter()
                .filter(|&&(a, b)| adj >> edge_bit(n, a, b) & 1 == 1)
                .map(|&(a, b)| (format!("v{}", a + 1), format!("v{}", b + 1)));
            out.push(LabeledGraph::new(nodes, edges.collect::<Vec<_>>()).expect("connected by construction"));
        }
    }
    out
}

fn bitmask_connected(n: usize, adj: u64) -> bool {
    let mut seen = 1u64;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for w in 0..n {
            if w != u && seen >> w & 1 == 0 && adj >> edge_bit(n, u, w) & 1 == 1 {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen.count_ones() as usize == n
}

/// Odometer increment over `digits` in base `base`; false on wrap-around.
pub(crate) fn next_tuple(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Canonical form of a small graph, used to compare graphs up to renaming.
pub fn canonical_form(g: &LabeledGraph) -> (Vec<String>, Vec<(usize, usize)>) {
    let n = g.node_count();
    assert!(n <= 8, "canonical form is brute force");
    let mut alphabet: Vec<&String> = g.labels.iter().collect();
    alphabet.sort();
    alphabet.dedup();
    let labels: Vec<usize> = g.labels.iter().map(|l| alphabet.binary_search(&l).unwrap()).collect();
    let mut adj = 0u64;
    for &(a, b) in &g.edges {
        adj |= 1 << edge_bit(n, a, b);
    }
    let (l, bits) = canonical_key(n, &labels, adj, &permutations(n));
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| bits >> edge_bit(n, a, b) & 1 == 1)
        .collect();
    (l.into_iter().map(|i| alphabet[i].clone()).collect(), edges)
}

/// Graph equality up to a name bijection preserving edges and labels.
pub fn isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    a.node_count() == b.node_count() && a.edges.len() == b.edges.len() && canonical_form(a) == canonical_form(b)
}
