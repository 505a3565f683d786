//! Ground truth for the graph properties used elsewhere.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use varisat::{CnfFormula, ExtendFormula, Lit, Solver};

use crate::boolean::{parse_bool, satisfiable, BoolExpr};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    AllSelected,
    NotAllSelected,
    Eulerian,
    NonEulerian,
    Hamiltonian,
    NonHamiltonian,
    Colorable(usize),
    NonColorable(usize),
    SatGraph,
    Square,
    Prime,
}

impl Property {
    /// The complementary property, if the list has one.
    pub fn complement(self) -> Option<Property> {
        use Property::*;
        Some(match self {
            AllSelected => NotAllSelected,
            NotAllSelected => AllSelected,
            Eulerian => NonEulerian,
            NonEulerian => Eulerian,
            Hamiltonian => NonHamiltonian,
            NonHamiltonian => Hamiltonian,
            Colorable(k) => NonColorable(k),
            NonColorable(k) => Colorable(k),
            SatGraph | Square | Prime => return None,
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::AllSelected => write!(f, "allselected"),
            Property::NotAllSelected => write!(f, "notallselected"),
            Property::Eulerian => write!(f, "eulerian"),
            Property::NonEulerian => write!(f, "noneulerian"),
            Property::Hamiltonian => write!(f, "hamiltonian"),
            Property::NonHamiltonian => write!(f, "nonhamiltonian"),
            Property::Colorable(k) => write!(f, "colorable({k})"),
            Property::NonColorable(k) => write!(f, "noncolorable({k})"),
            Property::SatGraph => write!(f, "satgraph"),
            Property::Square => write!(f, "square"),
            Property::Prime => write!(f, "prime"),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let with_k = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
        };
        if let Some(k) = with_k("colorable") {
            return Ok(Property::Colorable(k));
        }
        if let Some(k) = with_k("noncolorable") {
            return Ok(Property::NonColorable(k));
        }
        Ok(match s.as_str() {
            "allselected" => Property::AllSelected,
            "notallselected" => Property::NotAllSelected,
            "eulerian" => Property::Eulerian,
            "noneulerian" => Property::NonEulerian,
            "hamiltonian" => Property::Hamiltonian,
            "nonhamiltonian" => Property::NonHamiltonian,
            "satgraph" => Property::SatGraph,
            "square" => Property::Square,
            "prime" => Property::Prime,
            _ => return Err(Error::Unsupported(format!("unknown property {s:?}"))),
        })
    }
}

pub fn check_property(p: Property, g: &LabeledGraph) -> Result<bool> {
    Ok(match p {
        Property::AllSelected => all_selected(g),
        Property::Eulerian => eulerian(g),
        Property::Hamiltonian => hamiltonian(g),
        Property::Colorable(k) => colorable(g, k),
        Property::SatGraph => satgraph(g)?,
        Property::Square => is_square(g.node_count()),
        Property::Prime => is_prime(g.node_count()),
        Property::NotAllSelected | Property::NonEulerian | Property::NonHamiltonian | Property::NonColorable(_) => {
            !check_property(p.complement().unwrap(), g)?
        }
    })
}

pub fn all_selected(g: &LabeledGraph) -> bool {
    g.labels().iter().all(|l| l == "1")
}

/// Even-degree criterion; connectivity is a graph invariant.
pub fn eulerian(g: &LabeledGraph) -> bool {
    (0..g.node_count()).all(|v| g.degree(v) % 2 == 0)
}

/// Searches for a closed walk through every edge exactly once.
pub fn eulerian_by_walks(g: &LabeledGraph) -> bool {
    let m = g.edges().len();
    if m == 0 {
        return true;
    }
    let mut used = vec![false; m];
    let incident: Vec<Vec<(usize, usize)>> = (0..g.node_count())
        .map(|v| {
            g.edges()
                .iter()
                .enumerate()
                .filter_map(|(i, &(a, b))| if a == v { Some((i, b)) } else if b == v { Some((i, a)) } else { None })
                .collect()
        })
        .collect();
    let start = g.edges()[0].0;
    fn walk(at: usize, start: usize, left: usize, used: &mut [bool], inc: &[Vec<(usize, usize)>]) -> bool {
        if left == 0 {
            return at == start;
        }
        for &(e, next) in &inc[at] {
            if !used[e] {
                used[e] = true;
                if walk(next, start, left - 1, used, inc) {
                    return true;
                }
                used[e] = false;
            }
        }
        false
    }
    walk(start, start, m, &mut used, &incident)
}

/// Cycle through all nodes; needs at least three nodes.
pub fn hamiltonian(g: &LabeledGraph) -> bool {
    hamiltonian_cycle(g).is_some()
}

/// Path extension from node 0; the direction is fixed by requiring the
/// second node to precede the last. A branch is cut when some unvisited
/// node has fewer than two usable neighbors or the unvisited nodes cannot
/// all be reached from the path's end.
pub fn hamiltonian_cycle(g: &LabeledGraph) -> Option<Vec<usize>> {
    let n = g.node_count();
    if n < 3 {
        return None;
    }
    let mut path = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    fn hopeless(g: &LabeledGraph, path: &[usize], seen: &[bool]) -> bool {
        let last = *path.last().unwrap();
        let open = |w: usize| !seen[w] || w == last || w == 0;
        for v in 0..seen.len() {
            if !seen[v] && g.neighbors(v).iter().filter(|&&w| open(w)).count() < 2 {
                return true;
            }
        }
        let mut reached = vec![false; seen.len()];
        let mut stack = vec![last];
        reached[last] = true;
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !seen[w] && !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..seen.len()).any(|v| !seen[v] && !reached[v])
    }
    fn extend(g: &LabeledGraph, path: &mut Vec<usize>, seen: &mut [bool]) -> bool {
        let n = seen.len();
        let last = *path.last().unwrap();
        if path.len() == n {
            return g.has_edge(last, 0) && path[1] < last;
        }
        if hopeless(g, path, seen) {
            return false;
        }
        for &w in g.neighbors(last) {
            if !seen[w] {
                seen[w] = true;
                path.push(w);
                if extend(g, path, seen) {
                    return true;
                }
                path.pop();
                seen[w] = false;
            }
        }
        false
    }
    extend(g, &mut path, &mut seen).then_some(path)
}

/// Proper coloring with colors 0..k, found by a CDCL solver on the direct
/// encoding: one variable per (node, color), at least one color per node,
/// at most one, and distinct colors across every edge.
pub fn coloring(g: &LabeledGraph, k: usize) -> Option<Vec<usize>> {
    let n = g.node_count();
    if k == 0 {
        return None;
    }
    let var = |v: usize, c: usize| Lit::from_index(v * k + c, true);
    let mut cnf = CnfFormula::new();
    for v in 0..n {
        cnf.add_clause(&(0..k).map(|c| var(v, c)).collect::<Vec<_>>());
        for c in 0..k {
            for d in c + 1..k {
                cnf.add_clause(&[!var(v, c), !var(v, d)]);
            }
        }
    }
    for &(a, b) in g.edges() {
        for c in 0..k {
            cnf.add_clause(&[!var(a, c), !var(b, c)]);
        }
    }
    let mut solver = Solver::new();
    solver.add_formula(&cnf);
    if !solver.solve().expect("solver without assumptions cannot fail") {
        return None;
    }
    let model = solver.model().expect("satisfiable formula has a model");
    let mut color = vec![0; n];
    for l in model.into_iter().filter(|l| l.is_positive()) {
        color[l.index() / k] = l.index() % k;
    }
    Some(color)
}

pub fn colorable(g: &LabeledGraph, k: usize) -> bool {
    coloring(g, k).is_some()
}

/// Per-node valuations that satisfy each label and agree with adjacent
/// nodes on shared variables.
///
/// Copies of a variable at adjacent nodes are merged; the merged classes
/// are the variables of one global satisfiability problem.
pub fn satgraph(g: &LabeledGraph) -> Result<bool> {
    let formulas: Vec<BoolExpr> = g.labels().iter().map(|l| parse_bool(l)).collect::<Result<_>>()?;
    Ok(satisfiable(&merge_shared_variables(g, &formulas)))
}

pub(crate) fn merge_shared_variables(g: &LabeledGraph, formulas: &[BoolExpr]) -> Vec<BoolExpr> {
    let mut key: HashMap<(usize, String), usize> = HashMap::new();
    for (v, f) in formulas.iter().enumerate() {
        for x in f.vars() {
            let n = key.len();
            key.insert((v, x), n);
        }
    }
    let mut parent: Vec<usize> = (0..key.len()).collect();
    fn find(p: &mut [usize], a: usize) -> usize {
        let mut r = a;
        while p[r] != r {
            r = p[r];
        }
        let mut c = a;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for &(a, b) in g.edges() {
        for x in formulas[a].vars() {
            if let Some(&kb) = key.get(&(b, x.clone())) {
                let (ra, rb) = (find(&mut parent, key[&(a, x)]), find(&mut parent, kb));
                parent[ra] = rb;
            }
        }
    }
    let mut roots = vec![0; key.len()];
    for (i, root) in roots.iter_mut().enumerate() {
        *root = find(&mut parent, i);
    }
    formulas.iter().enumerate().map(|(v, f)| f.rename(&|x| format!("c{}", roots[key[&(v, x.to_string())]]))).collect()
}

pub fn is_square(n: usize) -> bool {
    let r = (n as f64).sqrt() as usize;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == n)
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}
