//! Translations from logic programs with arithmetic to first-order theories:
//! the formula representation of rules, Clark's completion and ordered
//! completion, plus a grounder, a stable-model oracle and a TPTP bridge.

pub mod completion;
pub mod fol;
pub mod ground;
pub mod ordered;
pub mod simplify;
pub mod syntax;
pub mod tau_star;
pub mod tptp;

pub use completion::{completion, completion_parts, is_tight, NamedFormula, Section, TheoryBundle};
pub use fol::{FoTerm, Formula, Sort, Variable};
pub use ordered::{ordered_completion, OcConfig, OrderVariant};
pub use simplify::{simplify_formula, simplify_with, SimplifyOptions};
pub use syntax::{parse_formula, parse_program, parse_spec, Predicate, Program, Rule};
pub use tau_star::{tau_star_program, tau_star_rule};
