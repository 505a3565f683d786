use std::collections::BTreeSet;

use super::ast::*;

/// IsNode(x) = ¬∃y~x (y →₂ x), with `y` chosen fresh.
pub fn is_node_guard(x: &str, avoid: &mut BTreeSet<String>) -> Formula {
    let y = fresh_name("n", avoid);
    not(exists_adj(&y, x, link(2, &y, x)))
}

/// Rewrites into the core constructors: atoms, ¬, ∨, ∃ (unbounded or
/// bounded by one link) and second-order ∃. Truth constants are kept.
pub fn expand_sugar(f: &Formula) -> Formula {
    let mut avoid = f.all_names();
    expand(f, &mut avoid)
}

fn core_and(a: Formula, b: Formula) -> Formula {
    not(or(not(a), not(b)))
}

fn expand(f: &Formula, avoid: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Const(_) | Formula::Bit(..) | Formula::Link(..) | Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(a) => not(expand(a, avoid)),
        Formula::Or(a, b) => or(expand(a, avoid), expand(b, avoid)),
        Formula::And(a, b) => core_and(expand(a, avoid), expand(b, avoid)),
        Formula::Implies(a, b) => or(not(expand(a, avoid)), expand(b, avoid)),
        Formula::Iff(a, b) => {
            let (ea, eb) = (expand(a, avoid), expand(b, avoid));
            core_and(or(not(ea.clone()), eb.clone()), or(not(eb), ea))
        }
        Formula::So { q: Quant::Exists, var, arity, body } => exists_so(var, *arity, expand(body, avoid)),
        Formula::So { q: Quant::Forall, var, arity, body } => not(exists_so(var, *arity, not(expand(body, avoid)))),
        Formula::Fo { q, var, range, node, body } => {
            let mut body = (**body).clone();
            if *node {
                let guard = is_node_guard(var, avoid);
                body = match q {
                    Quant::Exists => and(guard, body),
                    Quant::Forall => implies(guard, body),
                };
            }
            let existential = match q {
                Quant::Exists => body,
                Quant::Forall => not(body),
            };
            let core = match range {
                Range::All => exists(var, expand(&existential, avoid)),
                Range::Adjacent(a) => exists_adj(var, a, expand(&existential, avoid)),
                Range::Within(a, r) => {
                    let unfolded = unfold_within(var, a, *r, existential, avoid);
                    expand(&unfolded, avoid)
                }
            };
            match q {
                Quant::Exists => core,
                Quant::Forall => not(core),
            }
        }
    }
}

/// ∃^{≤0}y~x φ = φ[y/x];  ∃^{≤r+1}y~x φ = ∃^{≤r}y~x (φ ∨ ∃y'~y φ[y/y']).
pub fn unfold_within(y: &str, x: &str, r: usize, body: Formula, avoid: &mut BTreeSet<String>) -> Formula {
    if r == 0 {
        return body.substitute(y, x);
    }
    let y2 = fresh_name(y, avoid);
    let step = or(body.clone(), exists_adj(&y2, y, body.substitute(y, &y2)));
    unfold_within(y, x, r - 1, step, avoid)
}
