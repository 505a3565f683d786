use std::fmt;

use super::ast::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    FO,
    BFL,
    LFO,
    Sigma(usize),
    Pi(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FragmentTag {
    pub class: Fragment,
    pub monadic: bool,
}

impl FragmentTag {
    /// Number of second-order quantifier blocks; 0 for LFO.
    pub fn level(&self) -> Option<usize> {
        match self.class {
            Fragment::LFO => Some(0),
            Fragment::Sigma(l) | Fragment::Pi(l) => Some(l),
            _ => None,
        }
    }

    /// Kind of the outermost block, if any.
    pub fn first(&self) -> Option<Quant> {
        match self.class {
            Fragment::Sigma(_) => Some(Quant::Exists),
            Fragment::Pi(_) => Some(Quant::Forall),
            _ => None,
        }
    }
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.monadic { "monadic " } else { "" };
        match self.class {
            Fragment::FO => write!(f, "FO"),
            Fragment::BFL => write!(f, "BFL"),
            Fragment::LFO => write!(f, "LFO"),
            Fragment::Sigma(l) => write!(f, "{m}Sigma({l})"),
            Fragment::Pi(l) => write!(f, "{m}Pi({l})"),
        }
    }
}

/// A second-order prefix read through negations, and what follows it.
#[derive(Debug, Clone)]
pub struct Prefix<'a> {
    /// (effective quantifier, variable, arity), outermost first.
    pub vars: Vec<(Quant, &'a str, usize)>,
    pub matrix: &'a Formula,
    /// True when an odd number of negations sits above the matrix.
    pub negated: bool,
}

pub fn so_prefix(f: &Formula) -> Prefix<'_> {
    let mut vars = Vec::new();
    let mut negated = false;
    let mut cur = f;
    loop {
        match cur {
            Formula::Not(a) if has_so_prefix(a) => {
                negated = !negated;
                cur = a;
            }
            Formula::So { q, var, arity, body } => {
                let q = if negated { q.dual() } else { *q };
                vars.push((q, var.as_str(), *arity));
                cur = body;
            }
            _ => return Prefix { vars, matrix: cur, negated },
        }
    }
}

fn has_so_prefix(f: &Formula) -> bool {
    match f {
        Formula::So { .. } => true,
        Formula::Not(a) => has_so_prefix(a),
        _ => false,
    }
}

/// Number of alternating blocks in a quantifier sequence.
pub fn block_count(qs: impl IntoIterator<Item = Quant>) -> usize {
    let mut count = 0;
    let mut last = None;
    for q in qs {
        if last != Some(q) {
            count += 1;
            last = Some(q);
        }
    }
    count
}

fn contains_so(f: &Formula) -> bool {
    let mut found = false;
    f.walk(&mut |g| found |= matches!(g, Formula::So { .. }));
    found
}

/// All first-order quantifiers bounded, no second-order quantifiers.
pub fn is_bfl(f: &Formula) -> bool {
    let mut ok = true;
    f.walk(&mut |g| match g {
        Formula::So { .. } | Formula::Fo { range: Range::All, .. } => ok = false,
        _ => {}
    });
    ok
}

/// An LFO sentence ∀x ψ read through negations: ψ must hold at every
/// element (every node when `node` is set).
#[derive(Debug, Clone)]
pub struct Lfo<'a> {
    pub var: &'a str,
    pub node: bool,
    pub body: Formula,
}

/// Reads `f` (under `negated`) as ∀x ψ with ψ in BFL.
pub fn lfo_parts(f: &Formula, negated: bool) -> Option<Lfo<'_>> {
    let mut neg = negated;
    let mut cur = f;
    while let Formula::Not(a) = cur {
        neg = !neg;
        cur = a;
    }
    match cur {
        Formula::Fo { q, var, range: Range::All, node, body } => {
            let effective = if neg { q.dual() } else { *q };
            if effective != Quant::Forall || !is_bfl(body) || !f.free_fo().is_empty() {
                return None;
            }
            let body = if neg { not((**body).clone()) } else { (**body).clone() };
            Some(Lfo { var, node: *node, body })
        }
        _ => None,
    }
}

/// Smallest fragment containing `f`.
pub fn classify(f: &Formula) -> Result<FragmentTag> {
    let mut monadic = true;
    f.walk(&mut |g| {
        if let Formula::So { arity, .. } = g {
            monadic &= *arity == 1;
        }
    });
    let prefix = so_prefix(f);
    if prefix.vars.is_empty() {
        let class = if lfo_parts(f, false).is_some() {
            Fragment::LFO
        } else if contains_so(f) {
            return Err(Error::NotClassifiable("second-order quantifier below a first-order one or a connective".into()));
        } else if is_bfl(f) {
            Fragment::BFL
        } else {
            Fragment::FO
        };
        return Ok(FragmentTag { class, monadic });
    }
    if lfo_parts(prefix.matrix, prefix.negated).is_none() {
        return Err(Error::NotClassifiable(
            "the matrix after the second-order prefix is not of the form ∀x ψ with ψ bounded".into(),
        ));
    }
    let blocks = block_count(prefix.vars.iter().map(|v| v.0));
    let class = match prefix.vars[0].0 {
        Quant::Exists => Fragment::Sigma(blocks),
        Quant::Forall => Fragment::Pi(blocks),
    };
    Ok(FragmentTag { class, monadic })
}

/// Maximum nesting depth of bounded first-order quantifiers, where
/// ∃^{≤r} counts r. Node-restriction guards are not counted.
pub fn nesting_radius(f: &Formula) -> usize {
    match f {
        Formula::Not(a) => nesting_radius(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            nesting_radius(a).max(nesting_radius(b))
        }
        Formula::Fo { range, body, .. } => {
            let own = match range {
                Range::All => 0,
                Range::Adjacent(_) => 1,
                Range::Within(_, r) => *r,
            };
            own + nesting_radius(body)
        }
        Formula::So { body, .. } => nesting_radius(body),
        _ => 0,
    }
}
