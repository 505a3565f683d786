//! Propositional formulas used as node labels of Boolean graphs.
//!
//! Syntax: variables `[a-z][a-z0-9_]*`, constants `1` and `0`, operators
//! `!`, `&`, `|` (tightest first) and parentheses.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Var(String),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "!{}", self.var)
        }
    }
}

pub type Clause = Vec<Literal>;

impl BoolExpr {
    pub fn var(name: &str) -> Self {
        BoolExpr::Var(name.to_string())
    }

    pub fn negate(self) -> Self {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(!b),
            e => BoolExpr::Not(Box::new(e)),
        }
    }

    /// Conjunction with constants folded and nested conjunctions flattened.
    pub fn and_all(parts: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                BoolExpr::Const(true) => {}
                BoolExpr::Const(false) => return BoolExpr::Const(false),
                BoolExpr::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => BoolExpr::Const(true),
            1 => out.pop().unwrap(),
            _ => BoolExpr::And(out),
        }
    }

    /// Disjunction with constants folded and nested disjunctions flattened.
    pub fn or_all(parts: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                BoolExpr::Const(false) => {}
                BoolExpr::Const(true) => return BoolExpr::Const(true),
                BoolExpr::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => BoolExpr::Const(false),
            1 => out.pop().unwrap(),
            _ => BoolExpr::Or(out),
        }
    }

    pub fn from_clauses(clauses: &[Clause]) -> Self {
        BoolExpr::And(
            clauses
                .iter()
                .map(|c| {
                    BoolExpr::Or(
                        c.iter()
                            .map(|l| if l.positive { BoolExpr::var(&l.var) } else { BoolExpr::var(&l.var).negate() })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(v) => {
                out.insert(v.clone());
            }
            BoolExpr::Not(a) => a.collect_vars(out),
            BoolExpr::And(ps) | BoolExpr::Or(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    /// Value under a valuation; unassigned variables make the result `None`
    /// unless the known part already decides it.
    pub fn eval_partial(&self, val: &dyn Fn(&str) -> Option<bool>) -> Option<bool> {
        match self {
            BoolExpr::Const(b) => Some(*b),
            BoolExpr::Var(v) => val(v),
            BoolExpr::Not(a) => a.eval_partial(val).map(|b| !b),
            BoolExpr::And(ps) => {
                let mut all = Some(true);
                for p in ps {
                    match p.eval_partial(val) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
                all
            }
            BoolExpr::Or(ps) => {
                let mut any = Some(false);
                for p in ps {
                    match p.eval_partial(val) {
                        Some(true) => return Some(true),
                        None => any = None,
                        Some(false) => {}
                    }
                }
                any
            }
        }
    }

    pub fn eval(&self, val: &HashMap<String, bool>) -> bool {
        self.eval_partial(&|v| Some(val.get(v).copied().unwrap_or(false))).unwrap()
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Var(v) => BoolExpr::Var(f(v)),
            BoolExpr::Not(a) => BoolExpr::Not(Box::new(a.rename(f))),
            BoolExpr::And(ps) => BoolExpr::And(ps.iter().map(|p| p.rename(f)).collect()),
            BoolExpr::Or(ps) => BoolExpr::Or(ps.iter().map(|p| p.rename(f)).collect()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => 1,
            BoolExpr::Not(a) => 1 + a.size(),
            BoolExpr::And(ps) | BoolExpr::Or(ps) => 1 + ps.iter().map(BoolExpr::size).sum::<usize>(),
        }
    }

    /// Clauses of a conjunction of disjunctions of at most three literals.
    pub fn as_3cnf(&self) -> Option<Vec<Clause>> {
        fn literal(e: &BoolExpr) -> Option<Literal> {
            match e {
                BoolExpr::Var(v) => Some(Literal { var: v.clone(), positive: true }),
                BoolExpr::Not(a) => match &**a {
                    BoolExpr::Var(v) => Some(Literal { var: v.clone(), positive: false }),
                    _ => None,
                },
                _ => None,
            }
        }
        fn clause(e: &BoolExpr) -> Option<Clause> {
            let c: Clause = match e {
                BoolExpr::Or(ps) => ps.iter().map(literal).collect::<Option<_>>()?,
                e => vec![literal(e)?],
            };
            (1..=3).contains(&c.len()).then_some(c)
        }
        match self {
            BoolExpr::And(ps) => ps.iter().map(clause).collect(),
            e => Some(vec![clause(e)?]),
        }
    }
}

/// `(l|l|l)&(...)`.
pub fn format_cnf(clauses: &[Clause]) -> String {
    if clauses.is_empty() {
        return "1".into();
    }
    clauses
        .iter()
        .map(|c| format!("({})", c.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("|")))
        .collect::<Vec<_>>()
        .join("&")
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(e: &BoolExpr, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            // 0 = top, 1 = inside |, 2 = inside &, 3 = under !
            match e {
                BoolExpr::Const(b) => write!(f, "{}", if *b { 1 } else { 0 }),
                BoolExpr::Var(v) => write!(f, "{v}"),
                BoolExpr::Not(a) => {
                    write!(f, "!")?;
                    go(a, 3, f)
                }
                BoolExpr::And(ps) | BoolExpr::Or(ps) => {
                    let (own, sep) = if matches!(e, BoolExpr::And(_)) { (2, "&") } else { (1, "|") };
                    if ps.is_empty() {
                        return write!(f, "{}", if own == 2 { 1 } else { 0 });
                    }
                    let paren = parent > own;
                    if paren {
                        write!(f, "(")?;
                    }
                    for (i, p) in ps.iter().enumerate() {
                        if i > 0 {
                            write!(f, "{sep}")?;
                        }
                        go(p, own, f)?;
                    }
                    if paren {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

pub fn parse_bool(text: &str) -> Result<BoolExpr> {
    let err = |msg: String| Error::BooleanParse(text.to_string(), msg);
    let chars: Vec<char> = text.chars().collect();
    let mut toks: Vec<String> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_') {
                i += 1;
            }
            toks.push(chars[start..i].iter().collect());
        } else if matches!(c, '!' | '&' | '|' | '(' | ')' | '0' | '1') {
            toks.push(c.to_string());
            i += 1;
        } else {
            return Err(err(format!("unexpected character {c:?} at {i}")));
        }
    }

    struct P<'a> {
        toks: &'a [String],
        pos: usize,
    }
    impl P<'_> {
        fn peek(&self) -> Option<&str> {
            self.toks.get(self.pos).map(String::as_str)
        }
        fn or(&mut self) -> std::result::Result<BoolExpr, String> {
            let mut parts = vec![self.and()?];
            while self.peek() == Some("|") {
                self.pos += 1;
                parts.push(self.and()?);
            }
            Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::Or(parts) })
        }
        fn and(&mut self) -> std::result::Result<BoolExpr, String> {
            let mut parts = vec![self.unary()?];
            while self.peek() == Some("&") {
                self.pos += 1;
                parts.push(self.unary()?);
            }
            Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::And(parts) })
        }
        fn unary(&mut self) -> std::result::Result<BoolExpr, String> {
            let tok = self.peek().ok_or("unexpected end of formula")?.to_string();
            self.pos += 1;
            match tok.as_str() {
                "!" => Ok(BoolExpr::Not(Box::new(self.unary()?))),
                "(" => {
                    let e = self.or()?;
                    if self.peek() != Some(")") {
                        return Err("expected ')'".into());
                    }
                    self.pos += 1;
                    Ok(e)
                }
                "1" => Ok(BoolExpr::Const(true)),
                "0" => Ok(BoolExpr::Const(false)),
                t if t.starts_with(|c: char| c.is_ascii_lowercase()) => Ok(BoolExpr::Var(tok)),
                t => Err(format!("unexpected {t:?}")),
            }
        }
    }

    let mut p = P { toks: &toks, pos: 0 };
    let e = p.or().map_err(err)?;
    if p.pos != toks.len() {
        return Err(err(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Satisfiability of a conjunction of formulas by branching on variables
/// of undecided formulas.
pub fn satisfiable(formulas: &[BoolExpr]) -> bool {
    let mut ids: HashMap<String, usize> = HashMap::new();
    for f in formulas {
        for v in f.vars() {
            let n = ids.len();
            ids.entry(v).or_insert(n);
        }
    }
    let order: Vec<Vec<usize>> = formulas.iter().map(|f| f.vars().iter().map(|v| ids[v]).collect()).collect();
    let mut val: Vec<Option<bool>> = vec![None; ids.len()];
    fn go(formulas: &[BoolExpr], order: &[Vec<usize>], ids: &HashMap<String, usize>, val: &mut Vec<Option<bool>>) -> bool {
        let mut branch = None;
        for (f, vars) in formulas.iter().zip(order) {
            match f.eval_partial(&|v| val[ids[v]]) {
                Some(true) => {}
                Some(false) => return false,
                None => {
                    if branch.is_none() {
                        branch = vars.iter().copied().find(|&v| val[v].is_none());
                    }
                }
            }
        }
        let Some(v) = branch else { return true };
        for b in [true, false] {
            val[v] = Some(b);
            if go(formulas, order, ids, val) {
                val[v] = None;
                return true;
            }
        }
        val[v] = None;
        false
    }
    go(formulas, &order, &ids, &mut val)
}
