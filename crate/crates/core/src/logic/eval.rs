//! Model checking on finite structures.
//!
//! Formulas are compiled to a slot-addressed form. Second-order quantifiers
//! are decided either by plain enumeration or by a pruned search over
//! partial relations: the body is evaluated in three-valued logic with the
//! undecided tuples unknown, a definite value ends the search, and
//! otherwise the search branches on the first unknown tuple the evaluation
//! ran into.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::{Formula, Quant, Range};
use crate::error::{Error, Result};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Pruned,
    /// All relations in order of increasing size, then lexicographically.
    Exhaustive,
}

/// Largest domain on which a relation variable of a given arity may be
/// quantified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub unary: usize,
    pub binary: usize,
    /// `None` refuses arity ≥ 3.
    pub higher: Option<usize>,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { unary: 8, binary: 5, higher: None }
    }
}

impl SearchCaps {
    pub fn unlimited() -> Self {
        SearchCaps { unary: usize::MAX, binary: usize::MAX, higher: Some(usize::MAX) }
    }

    pub fn allows(&self, domain: usize, arity: usize) -> bool {
        match arity {
            1 => domain <= self.unary,
            2 => domain <= self.binary,
            _ => self.higher.is_some_and(|m| domain <= m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub strategy: Strategy,
    pub caps: SearchCaps,
}

/// A relation given as a set of element tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Self {
        Relation { arity, tuples: tuples.into_iter().collect() }
    }
}

/// Interpretation of the free variables of a formula.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, Relation>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fo(mut self, var: &str, e: usize) -> Self {
        self.fo.insert(var.to_string(), e);
        self
    }

    pub fn with_so(mut self, var: &str, r: Relation) -> Self {
        self.so.insert(var.to_string(), r);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    F,
    U,
    T,
}

impl Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::T
        } else {
            Tri::F
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::F => Tri::T,
            Tri::U => Tri::U,
            Tri::T => Tri::F,
        }
    }
}

#[derive(Debug, Clone)]
enum Ir {
    Const(bool),
    Bit(usize, usize),
    Link(usize, usize, usize),
    Eq(usize, usize),
    Rel(usize, Vec<usize>),
    Not(Box<Ir>),
    And(Vec<Ir>),
    Or(Vec<Ir>),
    Implies(Box<Ir>, Box<Ir>),
    Iff(Box<Ir>, Box<Ir>),
    Fo { exists: bool, slot: usize, range: IrRange, node: bool, body: Box<Ir> },
    So { exists: bool, rslot: usize, body: Box<Ir> },
}

#[derive(Debug, Clone, Copy)]
enum IrRange {
    All,
    Adjacent(usize),
    Within(usize, usize),
}

/// Relation over an n-element domain where each tuple may be unknown.
#[derive(Debug, Clone)]
struct PartialRel {
    n: usize,
    arity: usize,
    size: usize,
    known: Vec<u64>,
    val: Vec<u64>,
}

impl PartialRel {
    fn unknown(n: usize, arity: usize) -> Self {
        let size = n.pow(arity as u32);
        let words = size.div_ceil(64).max(1);
        PartialRel { n, arity, size, known: vec![0; words], val: vec![0; words] }
    }

    fn from_relation(n: usize, r: &Relation) -> Self {
        let mut p = PartialRel::unknown(n, r.arity);
        p.known.iter_mut().for_each(|w| *w = u64::MAX);
        for t in &r.tuples {
            let idx = p.index(t.iter().copied());
            p.val[idx / 64] |= 1 << (idx % 64);
        }
        p
    }

    fn index(&self, args: impl Iterator<Item = usize>) -> usize {
        args.fold(0, |acc, e| acc * self.n + e)
    }

    fn get(&self, idx: usize) -> Option<bool> {
        let (w, b) = (idx / 64, idx % 64);
        if self.known[w] >> b & 1 == 1 {
            Some(self.val[w] >> b & 1 == 1)
        } else {
            None
        }
    }

    fn set(&mut self, idx: usize, v: bool) {
        let (w, b) = (idx / 64, idx % 64);
        self.known[w] |= 1 << b;
        if v {
            self.val[w] |= 1 << b;
        } else {
            self.val[w] &= !(1 << b);
        }
    }

    fn unset(&mut self, idx: usize) {
        let (w, b) = (idx / 64, idx % 64);
        self.known[w] &= !(1 << b);
        self.val[w] &= !(1 << b);
    }

    fn reset(&mut self) {
        self.known.iter_mut().for_each(|w| *w = 0);
        self.val.iter_mut().for_each(|w| *w = 0);
    }

    /// Makes every unknown tuple known-false.
    fn complete_false(&mut self) {
        self.known.iter_mut().for_each(|w| *w = u64::MAX);
    }

    fn load_members(&mut self, members: &[usize]) {
        self.known.iter_mut().for_each(|w| *w = u64::MAX);
        self.val.iter_mut().for_each(|w| *w = 0);
        for &idx in members {
            self.val[idx / 64] |= 1 << (idx % 64);
        }
    }
}

struct Compiler<'a> {
    s: &'a Structure,
    fo_scope: Vec<(String, usize)>,
    so_scope: Vec<(String, usize, usize)>,
    fo_init: Vec<usize>,
    so_init: Vec<PartialRel>,
    radii: BTreeSet<usize>,
    uses_nodes: bool,
    caps: SearchCaps,
    free_fo: &'a BTreeMap<String, usize>,
    free_so: &'a BTreeMap<String, Relation>,
    free_fo_slots: HashMap<String, usize>,
    free_so_slots: HashMap<String, usize>,
}

impl Compiler<'_> {
    fn fo_slot(&mut self, name: &str) -> Result<usize> {
        if let Some((_, slot)) = self.fo_scope.iter().rev().find(|(n, _)| n == name) {
            return Ok(*slot);
        }
        if let Some(&slot) = self.free_fo_slots.get(name) {
            return Ok(slot);
        }
        let e = *self.free_fo.get(name).ok_or_else(|| Error::UnboundVariable(name.to_string()))?;
        if e >= self.s.len() {
            return Err(Error::SignatureMismatch(format!("{name} is assigned element {e} outside the domain")));
        }
        let slot = self.fo_init.len();
        self.fo_init.push(e);
        self.free_fo_slots.insert(name.to_string(), slot);
        Ok(slot)
    }

    fn so_slot(&mut self, name: &str, arity: usize) -> Result<usize> {
        if let Some((_, slot, k)) = self.so_scope.iter().rev().find(|(n, _, _)| n == name) {
            if *k != arity {
                return Err(Error::ArityMismatch { var: name.to_string(), expected: *k, found: arity });
            }
            return Ok(*slot);
        }
        if let Some(&slot) = self.free_so_slots.get(name) {
            let k = self.so_init[slot].arity;
            if k != arity {
                return Err(Error::ArityMismatch { var: name.to_string(), expected: k, found: arity });
            }
            return Ok(slot);
        }
        let r = self.free_so.get(name).ok_or_else(|| Error::UnboundVariable(name.to_string()))?;
        if r.arity != arity {
            return Err(Error::ArityMismatch { var: name.to_string(), expected: r.arity, found: arity });
        }
        if r.tuples.iter().flatten().any(|&e| e >= self.s.len()) {
            return Err(Error::SignatureMismatch(format!("relation {name} mentions elements outside the domain")));
        }
        let slot = self.so_init.len();
        self.so_init.push(PartialRel::from_relation(self.s.len(), r));
        self.free_so_slots.insert(name.to_string(), slot);
        Ok(slot)
    }

    fn compile(&mut self, f: &Formula) -> Result<Ir> {
        let (m, n) = self.s.signature();
        Ok(match f {
            Formula::Const(b) => Ir::Const(*b),
            Formula::Bit(i, x) => {
                if *i == 0 || *i > m {
                    return Err(Error::SignatureMismatch(format!("bit{i} on a structure with {m} unary relations")));
                }
                Ir::Bit(*i, self.fo_slot(x)?)
            }
            Formula::Link(i, x, y) => {
                if *i == 0 || *i > n {
                    return Err(Error::SignatureMismatch(format!("link{i} on a structure with {n} binary relations")));
                }
                Ir::Link(*i, self.fo_slot(x)?, self.fo_slot(y)?)
            }
            Formula::Eq(x, y) => Ir::Eq(self.fo_slot(x)?, self.fo_slot(y)?),
            Formula::Rel(name, args) => {
                let r = self.so_slot(name, args.len())?;
                let slots = args.iter().map(|a| self.fo_slot(a)).collect::<Result<_>>()?;
                Ir::Rel(r, slots)
            }
            Formula::Not(a) => Ir::Not(Box::new(self.compile(a)?)),
            Formula::And(..) => {
                let mut parts = Vec::new();
                self.flatten(f, true, &mut parts)?;
                Ir::And(parts)
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                self.flatten(f, false, &mut parts)?;
                Ir::Or(parts)
            }
            Formula::Implies(a, b) => Ir::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Iff(a, b) => Ir::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Fo { q, var, range, node, body } => {
                if *node {
                    if n < 2 {
                        return Err(Error::SignatureMismatch("node-restricted quantifier needs →₂".into()));
                    }
                    self.uses_nodes = true;
                }
                let range = match range {
                    Range::All => IrRange::All,
                    Range::Adjacent(a) => IrRange::Adjacent(self.fo_slot(a)?),
                    Range::Within(a, r) => {
                        self.radii.insert(*r);
                        IrRange::Within(self.fo_slot(a)?, *r)
                    }
                };
                let slot = self.fo_init.len();
                self.fo_init.push(0);
                self.fo_scope.push((var.clone(), slot));
                let body = self.compile(body);
                self.fo_scope.pop();
                Ir::Fo { exists: *q == Quant::Exists, slot, range, node: *node, body: Box::new(body?) }
            }
            Formula::So { q, var, arity, body } => {
                if !self.caps.allows(self.s.len(), *arity) {
                    return Err(Error::SearchSpaceTooLarge { var: var.clone(), domain: self.s.len(), arity: *arity });
                }
                let rslot = self.so_init.len();
                self.so_init.push(PartialRel::unknown(self.s.len(), *arity));
                self.so_scope.push((var.clone(), rslot, *arity));
                let body = self.compile(body);
                self.so_scope.pop();
                Ir::So { exists: *q == Quant::Exists, rslot, body: Box::new(body?) }
            }
        })
    }

    fn flatten(&mut self, f: &Formula, conj: bool, out: &mut Vec<Ir>) -> Result<()> {
        match (f, conj) {
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                self.flatten(a, conj, out)?;
                self.flatten(b, conj, out)
            }
            _ => {
                out.push(self.compile(f)?);
                Ok(())
            }
        }
    }
}

/// A formula compiled against one structure.
pub struct Compiled<'a> {
    s: &'a Structure,
    ir: Ir,
    balls: HashMap<usize, Vec<Vec<usize>>>,
    is_node: Vec<bool>,
    fo: Vec<usize>,
    so: Vec<PartialRel>,
    strategy: Strategy,
}

struct Env {
    fo: Vec<usize>,
    so: Vec<PartialRel>,
}

impl<'a> Compiled<'a> {
    pub fn new(s: &'a Structure, f: &Formula, a: &Assignment, opts: &EvalOptions) -> Result<Self> {
        let mut c = Compiler {
            s,
            fo_scope: Vec::new(),
            so_scope: Vec::new(),
            fo_init: Vec::new(),
            so_init: Vec::new(),
            radii: BTreeSet::new(),
            uses_nodes: false,
            caps: opts.caps,
            free_fo: &a.fo,
            free_so: &a.so,
            free_fo_slots: HashMap::new(),
            free_so_slots: HashMap::new(),
        };
        let ir = c.compile(f)?;
        let balls = c.radii.iter().map(|&r| (r, (0..s.len()).map(|e| s.ball(e, r)).collect())).collect();
        let is_node = if c.uses_nodes { (0..s.len()).map(|e| s.predecessors(2, e).is_empty()).collect() } else { Vec::new() };
        Ok(Compiled { s, ir, balls, is_node, fo: c.fo_init, so: c.so_init, strategy: opts.strategy })
    }

    pub fn eval(&self) -> bool {
        let mut env = Env { fo: self.fo.clone(), so: self.so.clone() };
        self.exact(&self.ir, &mut env)
    }

    fn range<'b>(&'b self, range: IrRange, env: &Env) -> RangeIter<'b> {
        match range {
            IrRange::All => RangeIter::Count(0..self.s.len()),
            IrRange::Adjacent(a) => RangeIter::List(self.s.adjacent(env.fo[a]).iter()),
            IrRange::Within(a, r) => RangeIter::List(self.balls[&r][env.fo[a]].iter()),
        }
    }

    fn atom(&self, ir: &Ir, env: &Env) -> Option<bool> {
        Some(match ir {
            Ir::Const(b) => *b,
            Ir::Bit(i, x) => self.s.bit(*i, env.fo[*x]),
            Ir::Link(i, x, y) => self.s.link(*i, env.fo[*x], env.fo[*y]),
            Ir::Eq(x, y) => env.fo[*x] == env.fo[*y],
            _ => return None,
        })
    }

    /// Two-valued evaluation; every relation in scope is fully known.
    fn exact(&self, ir: &Ir, env: &mut Env) -> bool {
        if let Some(b) = self.atom(ir, env) {
            return b;
        }
        match ir {
            Ir::Rel(r, args) => {
                let rel = &env.so[*r];
                let idx = rel.index(args.iter().map(|&a| env.fo[a]));
                rel.get(idx).expect("relation fully known in exact evaluation")
            }
            Ir::Not(a) => !self.exact(a, env),
            Ir::And(parts) => parts.iter().all(|p| self.exact(p, env)),
            Ir::Or(parts) => parts.iter().any(|p| self.exact(p, env)),
            Ir::Implies(a, b) => !self.exact(a, env) || self.exact(b, env),
            Ir::Iff(a, b) => self.exact(a, env) == self.exact(b, env),
            Ir::Fo { exists, slot, range, node, body } => {
                for e in self.range(*range, env) {
                    if *node && !self.is_node[e] {
                        continue;
                    }
                    env.fo[*slot] = e;
                    if self.exact(body, env) == *exists {
                        return *exists;
                    }
                }
                !*exists
            }
            Ir::So { exists, rslot, body } => self.solve(*exists, *rslot, body, env),
            _ => unreachable!(),
        }
    }

    fn solve(&self, exists: bool, rslot: usize, body: &Ir, env: &mut Env) -> bool {
        match self.strategy {
            Strategy::Pruned => {
                env.so[rslot].reset();
                let r = self.branch(exists, rslot, body, env);
                env.so[rslot].reset();
                r
            }
            Strategy::Exhaustive => {
                let size = env.so[rslot].size;
                for k in 0..=size {
                    let mut comb: Vec<usize> = (0..k).collect();
                    loop {
                        env.so[rslot].load_members(&comb);
                        if self.exact(body, env) == exists {
                            return exists;
                        }
                        if !next_combination(&mut comb, size) {
                            break;
                        }
                    }
                }
                !exists
            }
        }
    }

    fn branch(&self, exists: bool, rslot: usize, body: &Ir, env: &mut Env) -> bool {
        let mut hit = None;
        match self.approx(body, env, rslot, &mut hit) {
            Tri::T => true,
            Tri::F => false,
            Tri::U => match hit {
                Some(t) => {
                    for v in [false, true] {
                        env.so[rslot].set(t, v);
                        if self.branch(exists, rslot, body, env) == exists {
                            env.so[rslot].unset(t);
                            return exists;
                        }
                    }
                    env.so[rslot].unset(t);
                    !exists
                }
                None => {
                    // The body never consulted an undecided tuple of this
                    // relation, so any completion gives the same value.
                    let saved = env.so[rslot].clone();
                    env.so[rslot].complete_false();
                    let r = self.exact(body, env);
                    env.so[rslot] = saved;
                    r
                }
            },
        }
    }

    /// Kleene evaluation; short-circuits only on definite values. Records
    /// the first undecided tuple of `target` that is read.
    fn approx(&self, ir: &Ir, env: &mut Env, target: usize, hit: &mut Option<usize>) -> Tri {
        if let Some(b) = self.atom(ir, env) {
            return Tri::from(b);
        }
        match ir {
            Ir::Rel(r, args) => {
                let rel = &env.so[*r];
                let idx = rel.index(args.iter().map(|&a| env.fo[a]));
                match rel.get(idx) {
                    Some(b) => Tri::from(b),
                    None => {
                        if *r == target && hit.is_none() {
                            *hit = Some(idx);
                        }
                        Tri::U
                    }
                }
            }
            Ir::Not(a) => self.approx(a, env, target, hit).not(),
            Ir::And(parts) => {
                let mut acc = Tri::T;
                for p in parts {
                    match self.approx(p, env, target, hit) {
                        Tri::F => return Tri::F,
                        Tri::U => acc = Tri::U,
                        Tri::T => {}
                    }
                }
                acc
            }
            Ir::Or(parts) => {
                let mut acc = Tri::F;
                for p in parts {
                    match self.approx(p, env, target, hit) {
                        Tri::T => return Tri::T,
                        Tri::U => acc = Tri::U,
                        Tri::F => {}
                    }
                }
                acc
            }
            Ir::Implies(a, b) => {
                let va = self.approx(a, env, target, hit);
                if va == Tri::F {
                    return Tri::T;
                }
                let vb = self.approx(b, env, target, hit);
                match (va, vb) {
                    (_, Tri::T) => Tri::T,
                    (Tri::T, vb) => vb,
                    _ => Tri::U,
                }
            }
            Ir::Iff(a, b) => {
                let va = self.approx(a, env, target, hit);
                let vb = self.approx(b, env, target, hit);
                match (va, vb) {
                    (Tri::U, _) | (_, Tri::U) => Tri::U,
                    (x, y) => Tri::from(x == y),
                }
            }
            Ir::Fo { exists, slot, range, node, body } => {
                let (win, lose) = if *exists { (Tri::T, Tri::F) } else { (Tri::F, Tri::T) };
                let mut acc = lose;
                for e in self.range(*range, env) {
                    if *node && !self.is_node[e] {
                        continue;
                    }
                    env.fo[*slot] = e;
                    match self.approx(body, env, target, hit) {
                        v if v == win => return win,
                        Tri::U => acc = Tri::U,
                        _ => {}
                    }
                }
                acc
            }
            Ir::So { rslot, body, .. } => {
                // Nothing is known about an inner relation: a definite value
                // holds for all of its interpretations.
                env.so[*rslot].reset();
                self.approx(body, env, target, hit)
            }
            _ => unreachable!(),
        }
    }
}

enum RangeIter<'a> {
    Count(std::ops::Range<usize>),
    List(std::slice::Iter<'a, usize>),
}

impl Iterator for RangeIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            RangeIter::Count(r) => r.next(),
            RangeIter::List(it) => it.next().copied(),
        }
    }
}

/// Next k-subset of 0..n in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn evaluate(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool> {
    evaluate_with(s, f, a, &EvalOptions::default())
}

pub fn evaluate_with(s: &Structure, f: &Formula, a: &Assignment, opts: &EvalOptions) -> Result<bool> {
    Ok(Compiled::new(s, f, a, opts)?.eval())
}

/// Evaluates a formula with one free first-order variable at element `e`.
pub fn evaluate_at(s: &Structure, f: &Formula, var: &str, e: usize) -> Result<bool> {
    evaluate(s, f, &Assignment::new().with_fo(var, e))
}
