use std::collections::BTreeSet;

use super::{Cluster, ClusterReduction, LabelReduction, LocalInput};
use crate::boolean::{format_cnf, parse_bool, BoolExpr, Clause, Literal};
use crate::error::{Error, Result};

fn lit(var: &str, positive: bool) -> Literal {
    Literal { var: var.to_string(), positive }
}

fn neg(l: &Literal) -> Literal {
    Literal { var: l.var.clone(), positive: !l.positive }
}

/// Negation normal form with constants folded.
fn nnf(e: &BoolExpr, negated: bool) -> BoolExpr {
    match e {
        BoolExpr::Const(b) => BoolExpr::Const(*b != negated),
        BoolExpr::Var(_) if negated => e.clone().negate(),
        BoolExpr::Var(_) => e.clone(),
        BoolExpr::Not(a) => nnf(a, !negated),
        BoolExpr::And(ps) if !negated => BoolExpr::and_all(ps.iter().map(|p| nnf(p, false))),
        BoolExpr::And(ps) => BoolExpr::or_all(ps.iter().map(|p| nnf(p, true))),
        BoolExpr::Or(ps) if !negated => BoolExpr::or_all(ps.iter().map(|p| nnf(p, false))),
        BoolExpr::Or(ps) => BoolExpr::and_all(ps.iter().map(|p| nnf(p, true))),
    }
}

fn as_literal(e: &BoolExpr) -> Option<Literal> {
    match e {
        BoolExpr::Var(v) => Some(lit(v, true)),
        BoolExpr::Not(a) => match &**a {
            BoolExpr::Var(v) => Some(lit(v, false)),
            _ => None,
        },
        _ => None,
    }
}

fn as_clause(e: &BoolExpr) -> Option<Clause> {
    match e {
        BoolExpr::Or(ps) => ps.iter().map(as_literal).collect(),
        e => Some(vec![as_literal(e)?]),
    }
}

struct Encoder<'a> {
    fresh: &'a mut dyn FnMut() -> String,
    clauses: Vec<Clause>,
}

impl Encoder<'_> {
    fn fresh(&mut self) -> Literal {
        lit(&(self.fresh)(), true)
    }

    /// (l1|l2|a1) & (!a1|l3|a2) & ... & (!ak|l_{n-1}|l_n).
    fn long_clause(&mut self, lits: &[Literal]) {
        if lits.len() <= 3 {
            self.clauses.push(lits.to_vec());
            return;
        }
        let a = self.fresh();
        self.clauses.push(vec![lits[0].clone(), lits[1].clone(), a.clone()]);
        let mut rest = vec![neg(&a)];
        rest.extend_from_slice(&lits[2..]);
        self.long_clause(&rest);
    }

    /// A literal that implies `e` (which is in NNF and constant-free).
    fn encode(&mut self, e: &BoolExpr) -> Literal {
        if let Some(l) = as_literal(e) {
            return l;
        }
        let t = self.fresh();
        match e {
            BoolExpr::And(ps) => {
                for p in ps {
                    let l = self.encode(p);
                    self.clauses.push(vec![neg(&t), l]);
                }
            }
            BoolExpr::Or(ps) => {
                let lits: Vec<Literal> = ps.iter().map(|p| self.encode(p)).collect();
                let mut clause = vec![neg(&t)];
                clause.extend(lits);
                self.long_clause(&clause);
            }
            _ => unreachable!("constants are folded and negations sit on variables"),
        }
        t
    }
}

/// Equisatisfiable 3-CNF. Clause-shaped conjuncts are kept (long ones are
/// split along a chain of fresh variables); other conjuncts get one fresh
/// variable per connective that implies the subformula. An empty result
/// means true.
pub fn to_3cnf(e: &BoolExpr, fresh: &mut dyn FnMut() -> String) -> Vec<Clause> {
    let mut enc = Encoder { fresh, clauses: Vec::new() };
    match nnf(e, false) {
        BoolExpr::Const(true) => {}
        BoolExpr::Const(false) => {
            let a = enc.fresh();
            enc.clauses.push(vec![a.clone()]);
            enc.clauses.push(vec![neg(&a)]);
        }
        e => {
            let conjuncts = match e {
                BoolExpr::And(ps) => ps,
                e => vec![e],
            };
            for c in &conjuncts {
                match as_clause(c) {
                    Some(lits) => enc.long_clause(&lits),
                    None => {
                        let root = enc.encode(c);
                        enc.clauses.push(vec![root]);
                    }
                }
            }
        }
    }
    enc.clauses
}

fn leading_qs(name: &str) -> usize {
    name.bytes().take_while(|&b| b == b'q').count()
}

/// Rewrites every label into 3-CNF. Fresh variables are `q…q{id}x{j}`,
/// with one more leading `q` than any variable of the node or its
/// neighbors, so they clash neither with original names nor with the
/// neighbors' fresh variables.
pub struct SatToThreeSat;

impl LabelReduction for SatToThreeSat {
    fn name(&self) -> &'static str {
        "satgraph-to-3satgraph"
    }

    fn check_label(&self, label: &str) -> Result<()> {
        parse_bool(label).map(|_| ())
    }

    fn relabel(&self, input: &LocalInput) -> String {
        let own = parse_bool(&input.label).expect("labels were checked");
        let mut k = own.vars().iter().map(|v| leading_qs(v)).max().unwrap_or(0);
        for (_, label) in &input.neighbors {
            let e = parse_bool(label).expect("labels were checked");
            k = k.max(e.vars().iter().map(|v| leading_qs(v)).max().unwrap_or(0));
        }
        let prefix = format!("{}{}x", "q".repeat(k + 1), input.id);
        let mut j = 0;
        let mut fresh = || {
            j += 1;
            format!("{prefix}{j}")
        };
        format_cnf(&to_3cnf(&own, &mut fresh))
    }
}

/// Clauses of a 3-CNF label; `1` is the empty conjunction.
pub fn clauses_of(label: &str) -> Result<Vec<Clause>> {
    match parse_bool(label)? {
        BoolExpr::Const(true) => Ok(Vec::new()),
        e => e.as_3cnf().ok_or_else(|| Error::Not3Cnf(String::new())),
    }
}

/// Per node: a `false`/`ground` pair, a pair `v_x`/`n_x` per variable
/// (both adjacent to `ground`), and two chained OR gadgets per clause whose
/// output `c6` is adjacent to `false` and `ground`. Across every input edge
/// a diamond (`k_@w_*` on both sides) forces equal colors on the two
/// `false` nodes, the two `ground` nodes, and the two `v_x` of every shared
/// variable.
pub struct ThreeSatToThreeColorable;

impl ClusterReduction for ThreeSatToThreeColorable {
    fn name(&self) -> &'static str {
        "3satgraph-to-3colorable"
    }

    fn check_label(&self, label: &str) -> Result<()> {
        clauses_of(label).map(|_| ())
    }

    fn cluster(&self, input: &LocalInput) -> Cluster {
        let clauses = clauses_of(&input.label).expect("labels were checked");
        let vars: BTreeSet<String> = clauses.iter().flatten().map(|l| l.var.clone()).collect();
        let mut c = Cluster::default();
        c.node("false", "");
        c.node("ground", "");
        c.edge("false", "ground");
        for x in &vars {
            let (v, n) = (format!("v_{x}"), format!("n_{x}"));
            c.node(v.clone(), "");
            c.node(n.clone(), "");
            c.edge(&v, &n);
            c.edge(&v, "ground");
            c.edge(&n, "ground");
        }
        let node_of = |l: &Literal| format!("{}_{}", if l.positive { "v" } else { "n" }, l.var);
        for (k, clause) in clauses.iter().enumerate() {
            let mut lits: Vec<String> = clause.iter().map(node_of).collect();
            while lits.len() < 3 {
                lits.push(lits.last().unwrap().clone());
            }
            let g: Vec<String> = (1..=6).map(|i| format!("c{}_{i}", k + 1)).collect();
            for t in &g {
                c.node(t.clone(), "");
            }
            for (a, b) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)] {
                c.edge(&g[a], &g[b]);
            }
            c.edge(&g[0], &lits[0]);
            c.edge(&g[1], &lits[1]);
            c.edge(&g[4], &lits[2]);
            c.edge(&g[5], "false");
            c.edge(&g[5], "ground");
        }
        let me = &input.id;
        for (nid, label) in &input.neighbors {
            let theirs: BTreeSet<String> =
                clauses_of(label).expect("labels were checked").iter().flatten().map(|l| l.var.clone()).collect();
            let mut tied = vec!["false".to_string(), "ground".to_string()];
            tied.extend(vars.intersection(&theirs).map(|x| format!("v_{x}")));
            for a in tied {
                let mine = format!("k_@{nid}_{a}");
                let other = format!("k_@{me}_{a}");
                c.node(mine.clone(), "");
                c.edge(&a, &mine);
                c.cross(&mine, nid, &other);
                c.cross(&a, nid, &other);
            }
        }
        c
    }
}
