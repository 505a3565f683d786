//! Named formulas over structural representations of labeled graphs.
//!
//! Helpers build bound variables by priming their argument (`x`, `x'`,
//! `x''`), so a subformula built for `x` never captures anything but `x`.

use super::ast::*;

fn p(x: &str) -> String {
    format!("{x}'")
}

fn pp(x: &str) -> String {
    format!("{x}''")
}

/// ¬∃y~x (y →₂ x).
pub fn is_node(x: &str) -> Formula {
    let y = p(x);
    not(exists_adj(&y, x, link(2, &y, x)))
}

pub fn is_bit0(x: &str) -> Formula {
    and(not(is_node(x)), not(bit(1, x)))
}

pub fn is_bit1(x: &str) -> Formula {
    and(not(is_node(x)), bit(1, x))
}

/// Node `x` carries the one-bit label `1`.
pub fn is_selected(x: &str) -> Formula {
    let (y, z) = (p(x), pp(x));
    exists_adj(&y, x, and(is_bit1(&y), not(exists_adj(&z, &y, or(link(1, &z, &y), link(1, &y, &z))))))
}

pub fn all_selected() -> Formula {
    forall_node("x", is_selected("x"))
}

pub const COLORS: [&str; 3] = ["C0", "C1", "C2"];

pub fn well_colored(x: &str) -> Formula {
    let y = p(x);
    let some = or_all(COLORS.iter().map(|c| rel(c, &[x])));
    let mut excl = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            excl.push(not(and(rel(COLORS[i], &[x]), rel(COLORS[j], &[x]))));
        }
    }
    let proper = forall_adj_node(&y, x, and_all(COLORS.iter().map(|c| not(and(rel(c, &[x]), rel(c, &[&y]))))));
    and(and(some, and_all(excl)), proper)
}

pub fn three_colorable() -> Formula {
    so_block(Quant::Exists, &[("C0", 1), ("C1", 1), ("C2", 1)], forall_node("x", well_colored("x")))
}

/// Local check that `P` describes a spanning forest whose roots satisfy ψ,
/// with `X`/`Y` used to rule out cycles.
pub fn points_to(x: &str, psi: &dyn Fn(&str) -> Formula) -> Formula {
    let (y, z) = (p(x), pp(x));
    let unique_parent = exists_within_node(
        &y,
        x,
        1,
        and(rel("P", &[x, &y]), forall_within_node(&z, x, 1, implies(rel("P", &[x, &z]), eq(&z, &y)))),
    );
    let root_case = implies(rel("P", &[x, x]), and(psi(x), rel("Y", &[x])));
    let child_case = implies(
        not(rel("P", &[x, x])),
        exists_adj_node(
            &y,
            x,
            and(rel("P", &[x, &y]), iff(rel("Y", &[x]), not(iff(rel("Y", &[&y]), rel("X", &[x]))))),
        ),
    );
    and(and(unique_parent, root_case), child_case)
}

/// ∃P ∀X ∃Y ∀_N x PointsTo_ψ(x).
pub fn forest_to(psi: &dyn Fn(&str) -> Formula) -> Formula {
    exists_so("P", 2, forall_so("X", 1, exists_so("Y", 1, forall_node("x", points_to("x", psi)))))
}

pub fn exists_unselected_node() -> Formula {
    forest_to(&|x| not(is_selected(x)))
}

pub fn non_three_colorable() -> Formula {
    so_block(Quant::Forall, &[("C0", 1), ("C1", 1), ("C2", 1)], forest_to(&|x| not(well_colored(x))))
}

/// Exactly two `H`-neighbors of `x`, linked in both directions.
pub fn degree_two(x: &str) -> Formula {
    let (y1, y2, z) = (format!("{x}1"), format!("{x}2"), p(x));
    let both = |y: &str| and(rel("H", &[x, y]), rel("H", &[y, x]));
    let only = forall_adj_node(
        &z,
        x,
        implies(or(rel("H", &[x, &z]), rel("H", &[&z, x])), or(eq(&z, &y1), eq(&z, &y2))),
    );
    exists_adj_node(&y1, x, exists_adj_node(&y2, x, and_all([neq(&y1, &y2), both(&y1), both(&y2), only])))
}

pub fn in_agreement_on(r: &str, x: &str) -> Formula {
    let y = p(x);
    forall_adj_node(&y, x, iff(rel(r, &[x]), rel(r, &[&y])))
}

pub fn discontinuity_at(x: &str) -> Formula {
    let y = p(x);
    exists_adj_node(&y, x, and(rel("H", &[x, &y]), iff(rel("S", &[x]), not(rel("S", &[&y])))))
}

pub fn division_at(x: &str) -> Formula {
    not(in_agreement_on("S", x))
}

pub fn connectivity_test(x: &str) -> Formula {
    and_all([
        in_agreement_on("C", x),
        implies(not(rel("C", &[x])), in_agreement_on("S", x)),
        implies(rel("C", &[x]), points_to(x, &discontinuity_at)),
    ])
}

pub fn hamiltonian() -> Formula {
    let matrix = forall_node("x", and(degree_two("x"), connectivity_test("x")));
    exists_so(
        "H",
        2,
        forall_so(
            "S",
            1,
            so_block(Quant::Exists, &[("C", 1), ("P", 2)], forall_so("X", 1, exists_so("Y", 1, matrix))),
        ),
    )
}

pub fn non_hamiltonian() -> Formula {
    let x = "x";
    let matrix = forall_node(
        x,
        and_all([
            in_agreement_on("C", x),
            implies(not(rel("C", &[x])), points_to(x, &|v| not(degree_two(v)))),
            implies(rel("C", &[x]), and(not(discontinuity_at(x)), points_to(x, &division_at))),
        ]),
    );
    forall_so(
        "H",
        2,
        so_block(Quant::Exists, &[("C", 1), ("S", 1), ("P", 2)], forall_so("X", 1, exists_so("Y", 1, matrix))),
    )
}

/// Library sentences by name.
pub fn sentence(name: &str) -> Option<Formula> {
    Some(match name {
        "all-selected" => all_selected(),
        "3-colorable" => three_colorable(),
        "exists-unselected" => exists_unselected_node(),
        "non-3-colorable" => non_three_colorable(),
        "hamiltonian" => hamiltonian(),
        "non-hamiltonian" => non_hamiltonian(),
        _ => return None,
    })
}

pub const SENTENCES: [&str; 6] =
    ["all-selected", "3-colorable", "exists-unselected", "non-3-colorable", "hamiltonian", "non-hamiltonian"];

/// Library formulas with one free variable `x`, by name.
pub fn body(name: &str) -> Option<Formula> {
    Some(match name {
        "is-node" => is_node("x"),
        "is-selected" => is_selected("x"),
        "well-colored" => well_colored("x"),
        "degree-two" => degree_two("x"),
        "discontinuity-at" => discontinuity_at("x"),
        "division-at" => division_at("x"),
        "points-to-unselected" => points_to("x", &|v| not(is_selected(v))),
        _ => return None,
    })
}

pub const BODIES: [&str; 7] =
    ["is-node", "is-selected", "well-colored", "degree-two", "discontinuity-at", "division-at", "points-to-unselected"];
