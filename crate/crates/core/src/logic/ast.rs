use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

/// Range of a first-order quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Range {
    /// The whole domain.
    All,
    /// Elements linked to the anchor (either direction, any relation).
    Adjacent(String),
    /// Elements within link distance r of the anchor, anchor included.
    Within(String, usize),
}

impl Range {
    pub fn anchor(&self) -> Option<&str> {
        match self {
            Range::All => None,
            Range::Adjacent(a) | Range::Within(a, _) => Some(a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    /// Bit_i(x), 1-based.
    Bit(usize, String),
    /// x →_i y, 1-based.
    Link(usize, String, String),
    Eq(String, String),
    Rel(String, Vec<String>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// First-order quantifier; `node` restricts the range to elements
    /// without an →₂ predecessor.
    Fo { q: Quant, var: String, range: Range, node: bool, body: Box<Formula> },
    So { q: Quant, var: String, arity: usize, body: Box<Formula> },
}

pub fn tt() -> Formula {
    Formula::Const(true)
}

pub fn ff() -> Formula {
    Formula::Const(false)
}

pub fn bit(i: usize, x: &str) -> Formula {
    Formula::Bit(i, x.into())
}

pub fn link(i: usize, x: &str, y: &str) -> Formula {
    Formula::Link(i, x.into(), y.into())
}

pub fn eq(x: &str, y: &str) -> Formula {
    Formula::Eq(x.into(), y.into())
}

pub fn neq(x: &str, y: &str) -> Formula {
    not(eq(x, y))
}

pub fn rel(name: &str, args: &[&str]) -> Formula {
    Formula::Rel(name.into(), args.iter().map(|a| a.to_string()).collect())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    Formula::Iff(Box::new(a), Box::new(b))
}

/// Left-nested conjunction; `true` when empty.
pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fs.into_iter().reduce(and).unwrap_or(Formula::Const(true))
}

/// Left-nested disjunction; `false` when empty.
pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fs.into_iter().reduce(or).unwrap_or(Formula::Const(false))
}

fn fo(q: Quant, var: &str, range: Range, node: bool, body: Formula) -> Formula {
    Formula::Fo { q, var: var.into(), range, node, body: Box::new(body) }
}

pub fn exists(x: &str, body: Formula) -> Formula {
    fo(Quant::Exists, x, Range::All, false, body)
}

pub fn forall(x: &str, body: Formula) -> Formula {
    fo(Quant::Forall, x, Range::All, false, body)
}

pub fn exists_node(x: &str, body: Formula) -> Formula {
    fo(Quant::Exists, x, Range::All, true, body)
}

pub fn forall_node(x: &str, body: Formula) -> Formula {
    fo(Quant::Forall, x, Range::All, true, body)
}

/// ∃y~x φ.
pub fn exists_adj(y: &str, x: &str, body: Formula) -> Formula {
    fo(Quant::Exists, y, Range::Adjacent(x.into()), false, body)
}

pub fn forall_adj(y: &str, x: &str, body: Formula) -> Formula {
    fo(Quant::Forall, y, Range::Adjacent(x.into()), false, body)
}

pub fn exists_adj_node(y: &str, x: &str, body: Formula) -> Formula {
    fo(Quant::Exists, y, Range::Adjacent(x.into()), true, body)
}

pub fn forall_adj_node(y: &str, x: &str, body: Formula) -> Formula {
    fo(Quant::Forall, y, Range::Adjacent(x.into()), true, body)
}

/// ∃^{≤r} y~x φ.
pub fn exists_within(y: &str, x: &str, r: usize, body: Formula) -> Formula {
    fo(Quant::Exists, y, Range::Within(x.into(), r), false, body)
}

pub fn forall_within(y: &str, x: &str, r: usize, body: Formula) -> Formula {
    fo(Quant::Forall, y, Range::Within(x.into(), r), false, body)
}

pub fn exists_within_node(y: &str, x: &str, r: usize, body: Formula) -> Formula {
    fo(Quant::Exists, y, Range::Within(x.into(), r), true, body)
}

pub fn forall_within_node(y: &str, x: &str, r: usize, body: Formula) -> Formula {
    fo(Quant::Forall, y, Range::Within(x.into(), r), true, body)
}

pub fn exists_so(var: &str, arity: usize, body: Formula) -> Formula {
    Formula::So { q: Quant::Exists, var: var.into(), arity, body: Box::new(body) }
}

pub fn forall_so(var: &str, arity: usize, body: Formula) -> Formula {
    Formula::So { q: Quant::Forall, var: var.into(), arity, body: Box::new(body) }
}

/// Block of second-order quantifiers of one kind, outermost first.
pub fn so_block(q: Quant, vars: &[(&str, usize)], body: Formula) -> Formula {
    vars.iter()
        .rev()
        .fold(body, |acc, &(v, k)| Formula::So { q, var: v.into(), arity: k, body: Box::new(acc) })
}

impl Formula {
    /// Free first-order variables.
    pub fn free_fo(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_fo(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_fo(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Bit(_, x) => see(x, bound),
            Formula::Link(_, x, y) | Formula::Eq(x, y) => {
                see(x, bound);
                see(y, bound);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| see(a, bound)),
            Formula::Not(a) => a.collect_free_fo(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free_fo(bound, out);
                b.collect_free_fo(bound, out);
            }
            Formula::Fo { var, range, body, .. } => {
                if let Some(a) = range.anchor() {
                    see(&a.to_string(), bound);
                }
                bound.push(var.clone());
                body.collect_free_fo(bound, out);
                bound.pop();
            }
            Formula::So { body, .. } => body.collect_free_fo(bound, out),
        }
    }

    /// Free second-order variables with their arities as used.
    pub fn free_so(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.collect_free_so(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_so(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, usize)>) {
        match self {
            Formula::Rel(name, args) => {
                if !bound.contains(name) {
                    out.insert((name.clone(), args.len()));
                }
            }
            Formula::Not(a) => a.collect_free_so(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free_so(bound, out);
                b.collect_free_so(bound, out);
            }
            Formula::Fo { body, .. } => body.collect_free_so(bound, out),
            Formula::So { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free_so(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Bit(_, x) => {
                out.insert(x.clone());
            }
            Formula::Link(_, x, y) | Formula::Eq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Rel(n, args) => {
                out.insert(n.clone());
                out.extend(args.iter().cloned());
            }
            Formula::Fo { var, range, .. } => {
                out.insert(var.clone());
                if let Some(a) = range.anchor() {
                    out.insert(a.to_string());
                }
            }
            Formula::So { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Not(a) => a.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Fo { body, .. } | Formula::So { body, .. } => body.walk(visit),
            _ => {}
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Replaces every free occurrence of `from` by `to`, renaming bound
    /// variables that would capture `to`.
    pub fn substitute(&self, from: &str, to: &str) -> Formula {
        if from == to {
            return self.clone();
        }
        let mut avoid = self.all_names();
        avoid.insert(to.to_string());
        avoid.insert(from.to_string());
        self.subst(from, to, &mut avoid)
    }

    fn subst(&self, from: &str, to: &str, avoid: &mut BTreeSet<String>) -> Formula {
        let r = |x: &String| if x == from { to.to_string() } else { x.clone() };
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Bit(i, x) => Formula::Bit(*i, r(x)),
            Formula::Link(i, x, y) => Formula::Link(*i, r(x), r(y)),
            Formula::Eq(x, y) => Formula::Eq(r(x), r(y)),
            Formula::Rel(n, args) => Formula::Rel(n.clone(), args.iter().map(r).collect()),
            Formula::Not(a) => not(a.subst(from, to, avoid)),
            Formula::And(a, b) => and(a.subst(from, to, avoid), b.subst(from, to, avoid)),
            Formula::Or(a, b) => or(a.subst(from, to, avoid), b.subst(from, to, avoid)),
            Formula::Implies(a, b) => implies(a.subst(from, to, avoid), b.subst(from, to, avoid)),
            Formula::Iff(a, b) => iff(a.subst(from, to, avoid), b.subst(from, to, avoid)),
            Formula::Fo { q, var, range, node, body } => {
                let range = match range {
                    Range::All => Range::All,
                    Range::Adjacent(a) => Range::Adjacent(r(a)),
                    Range::Within(a, k) => Range::Within(r(a), *k),
                };
                if var == from {
                    // `from` is rebound here: the body has no free occurrence.
                    return Formula::Fo { q: *q, var: var.clone(), range, node: *node, body: body.clone() };
                }
                if var == to && body.free_fo().contains(from) {
                    let fresh = fresh_name(var, avoid);
                    let renamed = body.subst(var, &fresh, avoid);
                    return Formula::Fo { q: *q, var: fresh, range, node: *node, body: Box::new(renamed.subst(from, to, avoid)) };
                }
                Formula::Fo { q: *q, var: var.clone(), range, node: *node, body: Box::new(body.subst(from, to, avoid)) }
            }
            Formula::So { q, var, arity, body } => {
                Formula::So { q: *q, var: var.clone(), arity: *arity, body: Box::new(body.subst(from, to, avoid)) }
            }
        }
    }
}

/// A variant of `base` not in `avoid`; the result is added to `avoid`.
pub fn fresh_name(base: &str, avoid: &mut BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { base } else { stem };
    let name = (1..).map(|k| format!("{stem}_{k}")).find(|n| !avoid.contains(n)).unwrap();
    avoid.insert(name.clone());
    name
}

fn quant_word(q: Quant, node: bool) -> &'static str {
    match (q, node) {
        (Quant::Exists, false) => "E",
        (Quant::Forall, false) => "A",
        (Quant::Exists, true) => "EN",
        (Quant::Forall, true) => "AN",
    }
}

/// Fully parenthesized concrete syntax accepted by the parser.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => write!(f, "true"),
            Formula::Const(false) => write!(f, "false"),
            Formula::Bit(i, x) => write!(f, "bit{i}({x})"),
            Formula::Link(i, x, y) => write!(f, "link{i}({x},{y})"),
            Formula::Eq(x, y) => write!(f, "{x} = {y}"),
            Formula::Rel(n, args) => write!(f, "{n}({})", args.join(",")),
            Formula::Not(a) => write!(f, "!({a})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::Fo { q, var, range, node, body } => {
                let w = quant_word(*q, *node);
                match range {
                    Range::All => write!(f, "({w} {var} . {body})"),
                    Range::Adjacent(a) => write!(f, "({w} {var} ~ {a} . {body})"),
                    Range::Within(a, r) => write!(f, "({w} <{r}> {var} ~ {a} . {body})"),
                }
            }
            Formula::So { q, var, arity, body } => {
                let w = if *q == Quant::Exists { "E2" } else { "A2" };
                write!(f, "({w} {var}:{arity} . {body})")
            }
        }
    }
}
