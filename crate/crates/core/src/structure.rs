use std::fmt;

use crate::error::{Error, Result};

/// Name of a structure element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Node(String),
    /// Labeling bit ⟨v, i⟩ with 1-based index.
    Bit(String, usize),
    /// Picture pixel (row, column), 1-based.
    Pixel(usize, usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Node(v) => write!(f, "{v}"),
            Element::Bit(v, i) => write!(f, "<{v},{i}>"),
            Element::Pixel(i, j) => write!(f, "({i},{j})"),
        }
    }
}

/// Finite relational structure with `m` unary and `n` binary relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    elements: Vec<Element>,
    unary: Vec<Vec<bool>>,
    links: Vec<Vec<bool>>,
    succ: Vec<Vec<Vec<usize>>>,
    pred: Vec<Vec<Vec<usize>>>,
    adjacent: Vec<Vec<usize>>,
}

impl Structure {
    /// `unary[j]` lists the members of P_{j+1}; `links[i]` the pairs of →_{i+1}.
    pub fn new(elements: Vec<Element>, unary: Vec<Vec<usize>>, links: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let size = elements.len();
        if size == 0 {
            return Err(Error::Empty);
        }
        let out_of_range = |e: usize| Error::SignatureMismatch(format!("element {e} outside a domain of {size}"));
        let mut unary_sets = Vec::new();
        for set in unary {
            let mut member = vec![false; size];
            for e in set {
                *member.get_mut(e).ok_or_else(|| out_of_range(e))? = true;
            }
            unary_sets.push(member);
        }
        let mut matrices = Vec::new();
        let mut succ = Vec::new();
        let mut pred = Vec::new();
        let mut adjacent = vec![Vec::new(); size];
        for rel in links {
            let mut m = vec![false; size * size];
            let mut s = vec![Vec::new(); size];
            let mut p = vec![Vec::new(); size];
            for (a, b) in rel {
                if a >= size || b >= size {
                    return Err(out_of_range(a.max(b)));
                }
                if !m[a * size + b] {
                    m[a * size + b] = true;
                    s[a].push(b);
                    p[b].push(a);
                    adjacent[a].push(b);
                    adjacent[b].push(a);
                }
            }
            for list in s.iter_mut().chain(p.iter_mut()) {
                list.sort_unstable();
            }
            matrices.push(m);
            succ.push(s);
            pred.push(p);
        }
        for list in &mut adjacent {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Structure { elements, unary: unary_sets, links: matrices, succ, pred, adjacent })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// (number of unary relations, number of binary relations).
    pub fn signature(&self) -> (usize, usize) {
        (self.unary.len(), self.links.len())
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> &Element {
        &self.elements[e]
    }

    pub fn find(&self, e: &Element) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    /// Membership in P_j, 1-based.
    pub fn bit(&self, j: usize, e: usize) -> bool {
        self.unary[j - 1][e]
    }

    /// a →_i b, 1-based relation index.
    pub fn link(&self, i: usize, a: usize, b: usize) -> bool {
        self.links[i - 1][a * self.len() + b]
    }

    pub fn successors(&self, i: usize, a: usize) -> &[usize] {
        &self.succ[i - 1][a]
    }

    pub fn predecessors(&self, i: usize, b: usize) -> &[usize] {
        &self.pred[i - 1][b]
    }

    /// Elements linked to `a` in either direction by any relation.
    pub fn adjacent(&self, a: usize) -> &[usize] {
        &self.adjacent[a]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacent[a].binary_search(&b).is_ok()
    }

    /// Number of pairs in →_i.
    pub fn link_count(&self, i: usize) -> usize {
        self.links[i - 1].iter().filter(|&&x| x).count()
    }

    /// Members of P_j.
    pub fn bit_set(&self, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.unary[j - 1][e]).collect()
    }

    /// Elements within ↔-distance `r` of `a`, ascending.
    pub fn ball(&self, a: usize, r: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[a] = 0;
        let mut frontier = vec![a];
        for d in 1..=r {
            let mut next = Vec::new();
            for u in frontier {
                for &w in &self.adjacent[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = d;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        (0..self.len()).filter(|&e| dist[e] != usize::MAX).collect()
    }

    /// Substructure induced on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> Structure {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &e) in keep.iter().enumerate() {
            pos[e] = k;
        }
        let elements = keep.iter().map(|&e| self.elements[e].clone()).collect();
        let unary = self
            .unary
            .iter()
            .map(|set| keep.iter().enumerate().filter(|(_, &e)| set[e]).map(|(k, _)| k).collect())
            .collect();
        let links = (0..self.links.len())
            .map(|i| {
                keep.iter()
                    .flat_map(|&a| self.succ[i][a].iter().map(move |&b| (a, b)))
                    .filter(|&(_, b)| pos[b] != usize::MAX)
                    .map(|(a, b)| (pos[a], pos[b]))
                    .collect()
            })
            .collect();
        Structure::new(elements, unary, links).expect("nonempty induced structure")
    }
}
