use std::collections::HashMap;

use super::{relabel, LabelReduction, LocalInput};
use crate::boolean::BoolExpr;
use crate::error::{Error, Result};
use crate::graph::{structural_representation, LabeledGraph};
use crate::logic::classify::{lfo_parts, so_prefix};
use crate::logic::{classify, nesting_radius, Formula, Fragment, Quant, Range};
use crate::structure::{Element, Structure};

/// Element names used in variable names: `n{id}` for a node, `n{id}b{k}`
/// for its k-th labeling bit.
pub fn element_name(e: &Element) -> String {
    match e {
        Element::Node(n) => n.clone(),
        Element::Bit(n, k) => format!("{n}b{k}"),
        Element::Pixel(i, j) => format!("p{i}_{j}"),
    }
}

/// Translates a BFL formula at a fixed assignment into a Boolean formula.
/// Atoms over the structure are folded to constants; `X(e1..ek)` with `X`
/// the j-th entry of `so` becomes the variable `x{j}_{e1}_..._{ek}`.
pub fn translate_body(
    s: &Structure,
    f: &Formula,
    env: &mut HashMap<String, usize>,
    so: &HashMap<String, usize>,
) -> Result<BoolExpr> {
    let get = |env: &HashMap<String, usize>, x: &str| env.get(x).copied().ok_or_else(|| Error::UnboundVariable(x.into()));
    let (m, n) = s.signature();
    Ok(match f {
        Formula::Const(b) => BoolExpr::Const(*b),
        Formula::Bit(i, x) => {
            if *i == 0 || *i > m {
                return Err(Error::SignatureMismatch(format!("bit{i} on a structure with {m} unary relations")));
            }
            BoolExpr::Const(s.bit(*i, get(env, x)?))
        }
        Formula::Link(i, x, y) => {
            if *i == 0 || *i > n {
                return Err(Error::SignatureMismatch(format!("link{i} on a structure with {n} binary relations")));
            }
            BoolExpr::Const(s.link(*i, get(env, x)?, get(env, y)?))
        }
        Formula::Eq(x, y) => BoolExpr::Const(get(env, x)? == get(env, y)?),
        Formula::Rel(name, args) => {
            let j = *so.get(name).ok_or_else(|| Error::UnboundVariable(name.clone()))?;
            let mut var = format!("x{j}");
            for a in args {
                var.push('_');
                var.push_str(&element_name(s.element(get(env, a)?)));
            }
            BoolExpr::Var(var)
        }
        Formula::Not(a) => translate_body(s, a, env, so)?.negate(),
        Formula::And(a, b) => BoolExpr::and_all([translate_body(s, a, env, so)?, translate_body(s, b, env, so)?]),
        Formula::Or(a, b) => BoolExpr::or_all([translate_body(s, a, env, so)?, translate_body(s, b, env, so)?]),
        Formula::Implies(a, b) => {
            BoolExpr::or_all([translate_body(s, a, env, so)?.negate(), translate_body(s, b, env, so)?])
        }
        Formula::Iff(a, b) => {
            let (a, b) = (translate_body(s, a, env, so)?, translate_body(s, b, env, so)?);
            BoolExpr::or_all([
                BoolExpr::and_all([a.clone(), b.clone()]),
                BoolExpr::and_all([a.negate(), b.negate()]),
            ])
        }
        Formula::Fo { q, var, range, node, body } => {
            let domain: Vec<usize> = match range {
                Range::All => (0..s.len()).collect(),
                Range::Adjacent(a) => s.adjacent(get(env, a)?).to_vec(),
                Range::Within(a, r) => s.ball(get(env, a)?, *r),
            };
            let saved = env.get(var).copied();
            let mut parts = Vec::new();
            for e in domain {
                if *node && !s.predecessors(2, e).is_empty() {
                    continue;
                }
                env.insert(var.clone(), e);
                parts.push(translate_body(s, body, env, so));
            }
            match saved {
                Some(e) => env.insert(var.clone(), e),
                None => env.remove(var),
            };
            let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
            match q {
                Quant::Exists => BoolExpr::or_all(parts),
                Quant::Forall => BoolExpr::and_all(parts),
            }
        }
        Formula::So { .. } => return Err(Error::NotSigma1),
    })
}

/// Boolean graph for an existential second-order sentence: each node
/// asserts the body at its own element and, unless the first-order
/// quantifier is node-restricted, at each of its labeling bits.
#[derive(Debug, Clone)]
pub struct CookLevin {
    so: HashMap<String, usize>,
    var: String,
    node: bool,
    body: Formula,
    radius: usize,
}

impl CookLevin {
    pub fn new(f: &Formula) -> Result<Self> {
        let tag = classify(f).map_err(|_| Error::NotSigma1)?;
        if !matches!(tag.class, Fragment::Sigma(1) | Fragment::LFO) {
            return Err(Error::NotSigma1);
        }
        let prefix = so_prefix(f);
        let lfo = lfo_parts(prefix.matrix, prefix.negated).ok_or(Error::NotSigma1)?;
        let so = prefix.vars.iter().enumerate().map(|(j, (_, name, _))| (name.to_string(), j)).collect();
        let radius = nesting_radius(&lfo.body);
        let mut bad = None;
        lfo.body.walk(&mut |g| match g {
            Formula::Bit(i, _) if *i != 1 => bad = Some(format!("bit{i} on a graph structure")),
            Formula::Link(i, _, _) if *i == 0 || *i > 2 => bad = Some(format!("link{i} on a graph structure")),
            Formula::Rel(name, args) => match prefix.vars.iter().find(|v| v.1 == name) {
                None => bad = Some(format!("free relation variable {name}")),
                Some(v) if v.2 != args.len() => bad = Some(format!("{name} used with arity {}", args.len())),
                _ => {}
            },
            _ => {}
        });
        if let Some(msg) = bad {
            return Err(Error::SignatureMismatch(msg));
        }
        Ok(CookLevin { so, var: lfo.var.to_string(), node: lfo.node, body: lfo.body, radius })
    }

    /// Nesting radius r of the body; the nodes gather their r-neighborhood.
    pub fn radius(&self) -> usize {
        self.radius
    }

    fn translate(&self, input: &LocalInput) -> Result<BoolExpr> {
        let name = |id: &str| format!("n{id}");
        let ball = input.ball_graph()?;
        let s = structural_representation(&ball)?;
        let own = name(&input.id);
        let mut targets = vec![s.find(&Element::Node(own.clone())).expect("own record")];
        if !self.node {
            targets.extend((1..=input.label.len()).map(|k| s.find(&Element::Bit(own.clone(), k)).expect("own bit")));
        }
        let mut parts = Vec::new();
        for e in targets {
            let mut env = HashMap::from([(self.var.clone(), e)]);
            parts.push(translate_body(&s, &self.body, &mut env, &self.so)?);
        }
        Ok(BoolExpr::and_all(parts))
    }
}

impl LabelReduction for CookLevin {
    fn name(&self) -> &'static str {
        "cook-levin"
    }

    fn check_label(&self, label: &str) -> Result<()> {
        if label.bytes().all(|b| b == b'0' || b == b'1') {
            Ok(())
        } else {
            Err(Error::NonBinaryLabel(String::new()))
        }
    }

    fn gather_radius(&self) -> usize {
        self.radius
    }

    fn id_radius(&self) -> usize {
        self.radius + 1
    }

    fn relabel(&self, input: &LocalInput) -> String {
        self.translate(input).expect("sentence was checked").to_string()
    }
}

/// Boolean graph that is satisfiable iff the structural representation of
/// `g` satisfies the Σ(1) sentence `f`.
pub fn cook_levin_translate(f: &Formula, g: &LabeledGraph, ids: &[String]) -> Result<LabeledGraph> {
    let cl = CookLevin::new(f)?;
    relabel(cl, g, ids)
}
