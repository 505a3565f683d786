//! Local second-order logic on relational structures.

pub mod ast;
pub mod classify;
pub mod eval;
pub mod library;
pub mod parser;
pub mod sugar;

pub use ast::{Formula, Quant, Range};
pub use classify::{classify, nesting_radius, Fragment, FragmentTag};
pub use eval::{evaluate, evaluate_at, evaluate_with, Assignment, EvalOptions, Relation, SearchCaps, Strategy};
pub use parser::parse;
pub use sugar::expand_sugar;
