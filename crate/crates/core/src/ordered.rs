//! Ordered completion: order predicates `less_p_q` or level functions
//! `lvl_p`, their axioms, and the ordered definitions of predicates.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::completion::{
    program_shapes, theory_shapes, Definition, RuleShape, Section, ShapeError, Shapes,
    TheoryBundle,
};
use crate::fol::{FoTerm, Formula, Relation, Variable};
use crate::syntax::{Predicate, Program};
use crate::tau_star::{form, form_ordered, ordered_support, FreshVarSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderedError {
    #[error("generated symbol `{0}` clashes with a predicate of the input")]
    NameCollision(String),
    #[error("generated symbol `{0}` stands for two different predicate pairs")]
    AmbiguousName(String),
    #[error("the unsimplified ordered definitions need a program, not a theory")]
    NeedsProgram,
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderVariant {
    /// Binary order predicates between atoms of each pair of predicates.
    #[default]
    Predicates,
    /// Integer level functions compared with `<`.
    Levels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OcConfig {
    pub variant: OrderVariant,
    /// Put the order conjunct inside the body translation instead of
    /// repeating each positive body literal.
    pub simplified: bool,
    pub complete_undefined: bool,
    /// Emit axiom instances only for pairs reachable from pairs that occur
    /// in some definition.
    pub minimal_axioms: bool,
}

impl Default for OcConfig {
    fn default() -> Self {
        OcConfig {
            variant: OrderVariant::Predicates,
            simplified: true,
            complete_undefined: false,
            minimal_axioms: false,
        }
    }
}

pub fn order_predicate_name(p: &str, q: &str) -> String {
    format!("less_{p}_{q}")
}

pub fn level_function_name(p: &str) -> String {
    format!("lvl_{p}")
}

/// The formula saying that `q(z)` is derived before `p(x)`.
pub fn ord_formula(variant: OrderVariant, q: &str, z: Vec<FoTerm>, p: &str, x: Vec<FoTerm>) -> Formula {
    match variant {
        OrderVariant::Predicates => {
            let mut args = z;
            args.extend(x);
            Formula::atom(&order_predicate_name(q, p), args)
        }
        OrderVariant::Levels => Formula::compare(
            Relation::Less,
            FoTerm::Level {
                predicate: q.to_string(),
                args: z,
            },
            FoTerm::Level {
                predicate: p.to_string(),
                args: x,
            },
        ),
    }
}

fn numbered(n: usize, from: usize) -> Vec<Variable> {
    (from..from + n).map(|i| Variable::general(&format!("X{i}"))).collect()
}

fn terms(vs: &[Variable]) -> Vec<FoTerm> {
    vs.iter().map(FoTerm::var).collect()
}

/// Pairs `(q, p)` such that some definition of `p` needs `q` before it,
/// closed under composition.
fn used_pairs(shapes: &Shapes) -> BTreeSet<(Predicate, Predicate)> {
    let mut pairs = BTreeSet::new();
    for d in &shapes.definitions {
        for r in &d.rules {
            for q in positive_predicates(&r.form) {
                pairs.insert((q, d.predicate.clone()));
            }
        }
    }
    loop {
        let mut added = Vec::new();
        for (a, b) in &pairs {
            for (c, d) in &pairs {
                if b == c && !pairs.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            return pairs;
        }
        pairs.extend(added);
    }
}

/// Axioms for the order vocabulary of `lang`: irreflexivity and
/// transitivity of the order predicates, or non-negative levels.
pub fn axioms(lang: &[Predicate], variant: OrderVariant, only: Option<&BTreeSet<(Predicate, Predicate)>>) -> TheoryBundle {
    let mut bundle = TheoryBundle::default();
    let wanted = |a: &Predicate, b: &Predicate| only.is_none_or(|s| s.contains(&(a.clone(), b.clone())));
    let mentioned = |a: &Predicate| only.is_none_or(|s| s.iter().any(|(x, y)| x == a || y == a));
    match variant {
        OrderVariant::Predicates => {
            for p in lang.iter().filter(|p| mentioned(p)) {
                let xs = numbered(p.arity, 1);
                let mut args = terms(&xs);
                args.extend(terms(&xs));
                let f = Formula::forall(
                    xs,
                    Formula::not(Formula::atom(&order_predicate_name(&p.name, &p.name), args)),
                );
                bundle.push(format!("irreflexivity_{}", p.name), Section::Axioms, f);
            }
            for p in lang {
                for q in lang {
                    for r in lang {
                        if !(wanted(p, q) && wanted(q, r)) {
                            continue;
                        }
                        let xs = numbered(p.arity, 1);
                        let ys = numbered(q.arity, 1 + p.arity);
                        let zs = numbered(r.arity, 1 + p.arity + q.arity);
                        let pq = ord_formula(OrderVariant::Predicates, &p.name, terms(&xs), &q.name, terms(&ys));
                        let qr = ord_formula(OrderVariant::Predicates, &q.name, terms(&ys), &r.name, terms(&zs));
                        let pr = ord_formula(OrderVariant::Predicates, &p.name, terms(&xs), &r.name, terms(&zs));
                        let vars = [xs, ys, zs].concat();
                        let f = Formula::forall(vars, Formula::implies(Formula::And(vec![pq, qr]), pr));
                        bundle.push(
                            format!("transitivity_{}_{}_{}", p.name, q.name, r.name),
                            Section::Axioms,
                            f,
                        );
                    }
                }
            }
        }
        OrderVariant::Levels => {
            for p in lang.iter().filter(|p| mentioned(p)) {
                let xs = numbered(p.arity, 1);
                let level = FoTerm::Level {
                    predicate: p.name.clone(),
                    args: terms(&xs),
                };
                let f = Formula::forall(
                    xs,
                    Formula::compare(Relation::GreaterEqual, level, FoTerm::numeral(0)),
                );
                bundle.push(format!("nat_{}", p.name), Section::Axioms, f);
            }
        }
    }
    bundle
}

/// Predicates of atoms occurring positively in `f`, that is, not inside
/// the antecedent of an implication.
fn positive_predicates(f: &Formula) -> Vec<Predicate> {
    let mut out = Vec::new();
    collect_positive(f, &mut out);
    out
}

fn collect_positive(f: &Formula, out: &mut Vec<Predicate>) {
    match f {
        Formula::Atom(a) => {
            let p = Predicate {
                name: a.predicate.clone(),
                arity: a.args.len(),
            };
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect_positive(g, out)),
        Formula::Forall(_, g) | Formula::Exists(_, g) => collect_positive(g, out),
        Formula::Implies(_, c) | Formula::ReverseImplies(c, _) => collect_positive(c, out),
        _ => {}
    }
}

/// Replaces every positive atom `q(t)` of `f` by `q(t) and ord(q(t), p(x))`.
pub fn attach_order(f: &Formula, ord: &dyn Fn(&str, Vec<FoTerm>) -> Formula) -> Formula {
    match f {
        Formula::Atom(a) => Formula::And(vec![f.clone(), ord(&a.predicate, a.args.clone())]),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| attach_order(g, ord)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| attach_order(g, ord)).collect()),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(attach_order(g, ord))),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(attach_order(g, ord))),
        Formula::Implies(a, c) => Formula::implies((**a).clone(), attach_order(c, ord)),
        Formula::ReverseImplies(c, a) => Formula::reverse_implies(attach_order(c, ord), (**a).clone()),
        _ => f.clone(),
    }
}

fn ordered_disjunct(
    d: &Definition,
    shape: &RuleShape,
    cfg: &OcConfig,
) -> Result<Formula, OrderedError> {
    let p = d.predicate.name.clone();
    let x = terms(&d.head);
    let variant = cfg.variant;
    let ord = move |q: &str, z: Vec<FoTerm>| ord_formula(variant, q, z, &p, x.clone());
    let inner = match (&shape.rule, cfg.simplified) {
        (Some(rule), simplified) => {
            let mut src = FreshVarSource::for_rule(rule);
            d.head.iter().for_each(|v| src.reserve(&v.name));
            if simplified {
                form_ordered(rule, &d.head, &mut src, &ord).expect("defining rules have heads")
            } else {
                let mut parts = match form(rule, &d.head, &mut src).expect("defining rules have heads") {
                    Formula::And(items) => items,
                    other => vec![other],
                };
                for atom in rule.positive_body() {
                    parts.push(ordered_support(atom, &mut src, &ord));
                }
                Formula::conjoin(parts)
            }
        }
        (None, true) => attach_order(&shape.form, &ord),
        (None, false) => return Err(OrderedError::NeedsProgram),
    };
    Ok(shape.closed(&d.head, &inner))
}

/// The ordered definition `forall x (p(x) -> ...)` of one predicate.
pub fn oc_definition(d: &Definition, cfg: &OcConfig) -> Result<Formula, OrderedError> {
    let disjuncts = d
        .rules
        .iter()
        .map(|r| ordered_disjunct(d, r, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Formula::forall(
        d.head.clone(),
        Formula::implies(d.head_atom(), Formula::disjoin(disjuncts)),
    ))
}

fn check_names(lang: &[Predicate], variant: OrderVariant) -> Result<(), OrderedError> {
    let names: BTreeSet<&str> = lang.iter().map(|p| p.name.as_str()).collect();
    let mut generated: BTreeMap<String, (&str, &str)> = BTreeMap::new();
    for p in lang {
        let candidates: Vec<(String, &str)> = match variant {
            OrderVariant::Predicates => lang
                .iter()
                .map(|q| (order_predicate_name(&p.name, &q.name), q.name.as_str()))
                .collect(),
            OrderVariant::Levels => vec![(level_function_name(&p.name), "")],
        };
        for (n, q) in candidates {
            if names.contains(n.as_str()) {
                return Err(OrderedError::NameCollision(n));
            }
            match generated.get(&n) {
                Some(&pair) if pair != (p.name.as_str(), q) => {
                    return Err(OrderedError::AmbiguousName(n))
                }
                _ => {
                    generated.insert(n, (&p.name, q));
                }
            }
        }
    }
    Ok(())
}

/// Assembles axioms, constraints, rule formulas and ordered definitions.
/// `lang` is the vocabulary the axioms range over.
pub fn ordered_completion_of_shapes(
    shapes: &Shapes,
    lang: &[Predicate],
    cfg: &OcConfig,
) -> Result<TheoryBundle, OrderedError> {
    check_names(lang, cfg.variant)?;
    let used = cfg.minimal_axioms.then(|| used_pairs(shapes));
    let mut bundle = axioms(lang, cfg.variant, used.as_ref());
    let parts = crate::completion::CompletionParts::from_shapes(shapes);
    let mut rest = parts.bundle();
    rest.formulas.retain(|f| f.section != Section::Definitions);
    bundle.extend(rest);
    for d in &shapes.definitions {
        bundle.push(
            format!("ordered_definition_{}_{}", d.predicate.name, d.predicate.arity),
            Section::Definitions,
            oc_definition(d, cfg)?,
        );
    }
    Ok(bundle)
}

pub fn ordered_completion(program: &Program, cfg: &OcConfig) -> Result<TheoryBundle, OrderedError> {
    let shapes = program_shapes(program, cfg.complete_undefined);
    ordered_completion_of_shapes(&shapes, &program.predicates(), cfg)
}

/// Ordered completion of sentences shaped like translated rules.
pub fn ordered_completion_of_theory(theory: &[Formula], cfg: &OcConfig) -> Result<TheoryBundle, OrderedError> {
    let shapes = theory_shapes(theory, cfg.complete_undefined)?;
    let mut lang: Vec<Predicate> = Vec::new();
    for d in &shapes.definitions {
        lang.push(d.predicate.clone());
    }
    for f in theory {
        for p in f.predicates() {
            if !lang.contains(&p) {
                lang.push(p);
            }
        }
    }
    ordered_completion_of_shapes(&shapes, &lang, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn program(text: &str) -> Program {
        parse_program(text).unwrap()
    }

    fn listing(bundle: &TheoryBundle) -> Vec<String> {
        bundle.ordered().iter().map(|f| f.formula.to_string()).collect()
    }

    #[test]
    fn axioms_for_the_tight_program() {
        let p = program("p(X) :- q(X).\np(X) :- not r(X).\nr(1).\nq(1).\n");
        let bundle = axioms(&p.predicates(), OrderVariant::Predicates, None);
        let text = listing(&bundle);
        assert_eq!(text.len(), 3 + 27);
        assert!(text.contains(&"forall X1 not less_p_p(X1, X1)".to_string()));
        assert!(text.contains(
            &"forall X1 X2 X3 (less_q_p(X1, X2) and less_p_r(X2, X3) -> less_q_r(X1, X3))".to_string()
        ));
    }

    #[test]
    fn level_axioms() {
        let bundle = axioms(&program("p.").predicates(), OrderVariant::Levels, None);
        assert_eq!(listing(&bundle), ["lvl_p >= 0"]);
        let bundle = axioms(&program("t(X, Y) :- e(X, Y).").predicates(), OrderVariant::Levels, None);
        assert_eq!(listing(&bundle), ["forall X1 X2 (lvl_t(X1, X2) >= 0)", "forall X1 X2 (lvl_e(X1, X2) >= 0)"]);
    }

    #[test]
    fn nullary_order_atoms_need_no_quantifiers() {
        let bundle = axioms(&program("p :- q.").predicates(), OrderVariant::Predicates, None);
        assert_eq!(bundle.formulas[0].formula.to_string(), "not less_p_p");
        assert_eq!(
            bundle.formulas[2].formula.to_string(),
            "less_p_p and less_p_p -> less_p_p"
        );
    }

    #[test]
    fn definition_of_a_single_rule() {
        let p = program("p(A) :- q(A-1).");
        let bundle = ordered_completion(&p, &OcConfig::default()).unwrap();
        assert_eq!(
            bundle.get("rules_p_1").unwrap().to_string(),
            "forall V1 (p(V1) <- exists A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and \
             I$i = A and J$i = 1) and q(Z))))"
        );
        assert_eq!(
            bundle.get("ordered_definition_p_1").unwrap().to_string(),
            "forall V1 (p(V1) -> exists A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and \
             I$i = A and J$i = 1) and (q(Z) and less_q_p(Z, V1)))))"
        );
        assert!(bundle.get("ordered_definition_q_1").is_none());
        let unsimplified = OcConfig {
            simplified: false,
            ..OcConfig::default()
        };
        let bundle = ordered_completion(&p, &unsimplified).unwrap();
        assert_eq!(
            bundle.get("ordered_definition_p_1").unwrap().to_string(),
            "forall V1 (p(V1) -> exists A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and \
             I$i = A and J$i = 1) and q(Z)) and exists Z1 (exists I1$i J1$i (Z1 = I1$i - J1$i and \
             I1$i = A and J1$i = 1) and q(Z1) and less_q_p(Z1, V1))))"
        );
    }

    #[test]
    fn level_definitions() {
        let p = program("t(X,Y) :- e(X,Y).\nt(X,Y) :- e(X,Z), t(Z,Y).");
        let cfg = OcConfig {
            variant: OrderVariant::Levels,
            ..OcConfig::default()
        };
        let bundle = ordered_completion(&p, &cfg).unwrap();
        let def = bundle.get("ordered_definition_t_2").unwrap().to_string();
        assert!(def.contains("(e(Z1, Z2) and lvl_e(Z1, Z2) < lvl_t(V1, V2))"), "{def}");
        assert!(def.contains("(t(Z3, Z4) and lvl_t(Z3, Z4) < lvl_t(V1, V2))"), "{def}");
    }

    #[test]
    fn theory_input_matches_program_input() {
        let p = program("p(X) :- q(X), not r(X).\n{q(X)} :- s(X, Y), not not r(Y).\nr(1).\n:- r(2).\n");
        let theory = crate::tau_star::tau_star_program(&p);
        let cfg = OcConfig::default();
        let a = ordered_completion(&p, &cfg).unwrap();
        let b = ordered_completion_of_theory(&theory, &cfg).unwrap();
        assert_eq!(a.formulas.len(), b.formulas.len());
        for (x, y) in a.formulas.iter().zip(&b.formulas) {
            assert_eq!(x.name, y.name);
            assert!(crate::fol::alpha_equivalent(&x.formula, &y.formula), "{}\n{}", x.formula, y.formula);
        }
        let unsimplified = OcConfig {
            simplified: false,
            ..cfg
        };
        assert_eq!(
            ordered_completion_of_theory(&theory, &unsimplified),
            Err(OrderedError::NeedsProgram)
        );
    }

    #[test]
    fn collisions_are_rejected() {
        let p = program("p :- less_p_p.");
        assert!(matches!(
            ordered_completion(&p, &OcConfig::default()),
            Err(OrderedError::NameCollision(_))
        ));
        let p = program("p_q :- r.\np :- q_r.");
        assert!(matches!(
            ordered_completion(&p, &OcConfig::default()),
            Err(OrderedError::AmbiguousName(_))
        ));
        let cfg = OcConfig {
            variant: OrderVariant::Levels,
            ..OcConfig::default()
        };
        assert!(matches!(
            ordered_completion(&program("lvl_p :- p."), &cfg),
            Err(OrderedError::NameCollision(_))
        ));
    }

    #[test]
    fn minimal_axioms_close_used_pairs() {
        let p = program("p :- q.\nq :- r.\ns.");
        let cfg = OcConfig {
            minimal_axioms: true,
            ..OcConfig::default()
        };
        let bundle = ordered_completion(&p, &cfg).unwrap();
        let names: Vec<&str> = bundle.section(Section::Axioms).map(|f| f.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "irreflexivity_p",
                "irreflexivity_q",
                "irreflexivity_r",
                "transitivity_r_q_p"
            ]
        );
    }

    #[test]
    fn empty_program() {
        let bundle = ordered_completion(&program(""), &OcConfig::default()).unwrap();
        assert_eq!(bundle.conjunction(), Formula::Top);
    }
}
