//! Translation of programs into two-sorted formulas: value formulas for
//! terms, body translations, and the per-rule sentences.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::fol::{fresh_name, ArithOp, FoTerm, Formula, Relation, Variable};
use crate::syntax::{
    Atom, BinaryOperator, BodyElement, Head, Literal, Program, ProgramTerm, Rule, Sign,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TauError {
    #[error("the constraint `{0}` has no head atom")]
    ConstraintHasNoForm(String),
    #[error("expected {expected} head variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Hands out variable names that clash neither with each other nor with the
/// names it was seeded with.
#[derive(Debug, Clone, Default)]
pub struct FreshVarSource {
    taken: BTreeSet<String>,
}

impl FreshVarSource {
    pub fn new(taken: impl IntoIterator<Item = String>) -> Self {
        FreshVarSource {
            taken: taken.into_iter().collect(),
        }
    }

    /// A source avoiding every variable of `rule`.
    pub fn for_rule(rule: &Rule) -> Self {
        Self::new(rule.variables())
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    fn name(&mut self, stem: &str) -> String {
        let name = if self.taken.contains(stem) {
            fresh_name(stem, &self.taken)
        } else {
            stem.to_string()
        };
        self.taken.insert(name.clone());
        name
    }

    pub fn general(&mut self, stem: &str) -> Variable {
        Variable::general(&self.name(stem))
    }

    pub fn integer(&mut self, stem: &str) -> Variable {
        Variable::integer(&self.name(stem))
    }

    /// `n` general variables `stem1, stem2, ...`, skipping taken names.
    pub fn numbered(&mut self, stem: &str, n: usize) -> Vec<Variable> {
        (0..n)
            .map(|_| {
                let name = fresh_name(stem, &self.taken);
                self.taken.insert(name.clone());
                Variable::general(&name)
            })
            .collect()
    }

    /// Variables for the arguments of a body atom: `Z` for one argument,
    /// `Z1, Z2, ...` for several.
    fn tuple(&mut self, stem: &str, n: usize) -> Vec<Variable> {
        if n == 1 {
            vec![self.general(stem)]
        } else {
            self.numbered(stem, n)
        }
    }
}

fn vars(vs: &[Variable]) -> Vec<FoTerm> {
    vs.iter().map(FoTerm::var).collect()
}

/// The formula stating that `v` is one of the values of `t`.
pub fn val_formula(t: &ProgramTerm, v: &Variable, src: &mut FreshVarSource) -> Formula {
    let value = FoTerm::var(v);
    match t {
        ProgramTerm::Precomputed(c) => Formula::equal(value, FoTerm::Const(c.clone())),
        ProgramTerm::Variable(name) => {
            Formula::equal(value, FoTerm::var(&Variable::general(name)))
        }
        ProgramTerm::Absolute(inner) => {
            let i = src.integer("I");
            let val_i = val_formula(inner, &i, src);
            Formula::exists(
                vec![i.clone()],
                Formula::And(vec![
                    Formula::equal(value, FoTerm::Abs(Box::new(FoTerm::var(&i)))),
                    val_i,
                ]),
            )
        }
        ProgramTerm::Binary { op, lhs, rhs } => {
            let i = src.integer("I");
            let j = src.integer("J");
            let (ti, tj) = (FoTerm::var(&i), FoTerm::var(&j));
            match op {
                BinaryOperator::Add | BinaryOperator::Subtract | BinaryOperator::Multiply => {
                    let arith = match op {
                        BinaryOperator::Add => ArithOp::Add,
                        BinaryOperator::Subtract => ArithOp::Subtract,
                        _ => ArithOp::Multiply,
                    };
                    let val_i = val_formula(lhs, &i, src);
                    let val_j = val_formula(rhs, &j, src);
                    Formula::exists(
                        vec![i, j],
                        Formula::And(vec![
                            Formula::equal(value, FoTerm::arith(arith, ti, tj)),
                            val_i,
                            val_j,
                        ]),
                    )
                }
                BinaryOperator::Divide | BinaryOperator::Modulo => {
                    let k = src.integer("K");
                    let tk = FoTerm::var(&k);
                    let val_i = val_formula(lhs, &i, src);
                    let val_j = val_formula(rhs, &j, src);
                    let abs_i = FoTerm::Abs(Box::new(ti.clone()));
                    let abs_j = FoTerm::Abs(Box::new(tj.clone()));
                    let k_plus_one = FoTerm::arith(ArithOp::Add, tk.clone(), FoTerm::numeral(1));
                    let sign = FoTerm::arith(ArithOp::Multiply, ti.clone(), tj.clone());
                    let k_times_j = FoTerm::arith(ArithOp::Multiply, tk.clone(), tj.clone());
                    let (same_sign, opposite_sign) = if *op == BinaryOperator::Divide {
                        (
                            tk.clone(),
                            FoTerm::arith(ArithOp::Subtract, FoTerm::numeral(0), tk.clone()),
                        )
                    } else {
                        (
                            FoTerm::arith(ArithOp::Subtract, ti.clone(), k_times_j.clone()),
                            FoTerm::arith(ArithOp::Add, ti.clone(), k_times_j),
                        )
                    };
                    Formula::exists(
                        vec![i, j, k],
                        Formula::And(vec![
                            val_i,
                            val_j,
                            Formula::compare(
                                Relation::LessEqual,
                                FoTerm::arith(ArithOp::Multiply, tk, abs_j.clone()),
                                abs_i.clone(),
                            ),
                            Formula::compare(
                                Relation::Less,
                                abs_i,
                                FoTerm::arith(ArithOp::Multiply, k_plus_one, abs_j),
                            ),
                            Formula::Or(vec![
                                Formula::And(vec![
                                    Formula::compare(
                                        Relation::GreaterEqual,
                                        sign.clone(),
                                        FoTerm::numeral(0),
                                    ),
                                    Formula::equal(value.clone(), same_sign),
                                ]),
                                Formula::And(vec![
                                    Formula::compare(Relation::Less, sign, FoTerm::numeral(0)),
                                    Formula::equal(value, opposite_sign),
                                ]),
                            ]),
                        ]),
                    )
                }
                BinaryOperator::Interval => {
                    let k = src.integer("K");
                    let tk = FoTerm::var(&k);
                    let val_i = val_formula(lhs, &i, src);
                    let val_j = val_formula(rhs, &j, src);
                    Formula::exists(
                        vec![i, j, k],
                        Formula::And(vec![
                            val_i,
                            val_j,
                            Formula::compare(Relation::LessEqual, ti, tk.clone()),
                            Formula::compare(Relation::LessEqual, tk.clone(), tj),
                            Formula::equal(value, tk),
                        ]),
                    )
                }
            }
        }
    }
}

/// Value formulas for a tuple of terms, one per variable.
pub fn val_tuple(ts: &[ProgramTerm], vs: &[Variable], src: &mut FreshVarSource) -> Vec<Formula> {
    ts.iter().zip(vs).map(|(t, v)| val_formula(t, v, src)).collect()
}

/// `exists Z (val(t, Z) and q(Z))` with the atom part supplied by `inner`.
fn literal_formula(
    atom: &Atom,
    src: &mut FreshVarSource,
    inner: impl FnOnce(Vec<FoTerm>) -> Formula,
) -> Formula {
    let zs = src.tuple("Z", atom.args.len());
    let mut parts = val_tuple(&atom.args, &zs, src);
    parts.push(inner(vars(&zs)));
    Formula::exists(zs, Formula::conjoin(parts))
}

/// The translation of one body element.
pub fn tau_b(element: &BodyElement, src: &mut FreshVarSource) -> Formula {
    match element {
        BodyElement::Literal(Literal { sign, atom }) => literal_formula(atom, src, |args| {
            let a = Formula::atom(&atom.predicate, args);
            match sign {
                Sign::NoSign => a,
                Sign::Negation => Formula::not(a),
                Sign::DoubleNegation => Formula::not(Formula::not(a)),
            }
        }),
        BodyElement::Comparison(c) => {
            let vs = src.numbered("Z", 2);
            let mut parts = vec![
                val_formula(&c.lhs, &vs[0], src),
                val_formula(&c.rhs, &vs[1], src),
            ];
            parts.push(Formula::compare(c.relation, FoTerm::var(&vs[0]), FoTerm::var(&vs[1])));
            Formula::exists(vs, Formula::And(parts))
        }
    }
}

/// Like [`tau_b`], but a positive literal `q(t)` also carries the order
/// formula `ord(q, Z)` next to its atom.
pub fn tau_b_ordered(
    element: &BodyElement,
    src: &mut FreshVarSource,
    ord: &dyn Fn(&str, Vec<FoTerm>) -> Formula,
) -> Formula {
    match element {
        BodyElement::Literal(Literal {
            sign: Sign::NoSign,
            atom,
        }) => literal_formula(atom, src, |args| {
            Formula::And(vec![
                Formula::atom(&atom.predicate, args.clone()),
                ord(&atom.predicate, args),
            ])
        }),
        _ => tau_b(element, src),
    }
}

/// The extra conjunct for a positive body atom in the unsimplified ordered
/// definitions: `exists Z (val(t, Z) and q(Z) and ord(q, Z))`.
pub fn ordered_support(
    atom: &Atom,
    src: &mut FreshVarSource,
    ord: &dyn Fn(&str, Vec<FoTerm>) -> Formula,
) -> Formula {
    let zs = src.tuple("Z", atom.args.len());
    let mut parts = val_tuple(&atom.args, &zs, src);
    parts.push(Formula::atom(&atom.predicate, vars(&zs)));
    parts.push(ord(&atom.predicate, vars(&zs)));
    Formula::exists(zs, Formula::And(parts))
}

fn assemble(rule: &Rule, head: &[Variable], src: &mut FreshVarSource, body: Vec<Formula>) -> Result<Formula, TauError> {
    let atom = rule
        .head_atom()
        .ok_or_else(|| TauError::ConstraintHasNoForm(rule.to_string()))?;
    if atom.args.len() != head.len() {
        return Err(TauError::ArityMismatch {
            expected: atom.args.len(),
            got: head.len(),
        });
    }
    let mut parts = val_tuple(&atom.args, head, src);
    if !body.is_empty() {
        parts.push(Formula::conjoin(body));
    }
    if let Head::Choice(_) = rule.head {
        let a = Formula::atom(&atom.predicate, vars(head));
        parts.push(Formula::not(Formula::not(a)));
    }
    Ok(Formula::conjoin(parts))
}

/// The antecedent shared by the rule sentence and the completion formulas of
/// a basic or choice rule, with `head` standing for the head arguments.
pub fn form(rule: &Rule, head: &[Variable], src: &mut FreshVarSource) -> Result<Formula, TauError> {
    let body = rule.body.iter().map(|e| tau_b(e, src)).collect();
    assemble(rule, head, src, body)
}

/// [`form`] with [`tau_b_ordered`] in place of [`tau_b`].
pub fn form_ordered(
    rule: &Rule,
    head: &[Variable],
    src: &mut FreshVarSource,
    ord: &dyn Fn(&str, Vec<FoTerm>) -> Formula,
) -> Result<Formula, TauError> {
    let body = rule.body.iter().map(|e| tau_b_ordered(e, src, ord)).collect();
    assemble(rule, head, src, body)
}

/// Universal closure over `first`, then the rule variables in order of
/// occurrence; only variables that occur free are bound.
fn closure(rule: &Rule, first: Vec<Variable>, body: Formula) -> Formula {
    let free = body.free_variables();
    let mut bound = first;
    bound.extend(rule.variables().iter().map(|n| Variable::general(n)));
    bound.retain(|v| free.contains(v));
    Formula::forall(bound, body)
}

pub fn tau_star_rule(rule: &Rule) -> Formula {
    let mut src = FreshVarSource::for_rule(rule);
    match &rule.head {
        Head::Constraint => {
            let body = Formula::conjoin(rule.body.iter().map(|e| tau_b(e, &mut src)).collect());
            closure(rule, Vec::new(), Formula::not(body))
        }
        Head::Basic(atom) | Head::Choice(atom) => {
            let head = src.numbered("V", atom.args.len());
            let antecedent = form(rule, &head, &mut src).expect("rule has a head");
            let consequent = Formula::atom(&atom.predicate, vars(&head));
            closure(rule, head, Formula::implies(antecedent, consequent))
        }
    }
}

pub fn tau_star_program(program: &Program) -> Vec<Formula> {
    program.rules.iter().map(tau_star_rule).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn rule(text: &str) -> Rule {
        parse_program(text).unwrap().rules.remove(0)
    }

    fn element(text: &str) -> BodyElement {
        rule(&format!(":- {text}.")).body.remove(0)
    }

    #[test]
    fn val_of_precomputed_and_variable() {
        let v = Variable::general("V");
        let mut src = FreshVarSource::default();
        assert_eq!(val_formula(&ProgramTerm::symbol("c"), &v, &mut src).to_string(), "V = c");
        assert_eq!(val_formula(&ProgramTerm::variable("A"), &v, &mut src).to_string(), "V = A");
    }

    #[test]
    fn val_of_arithmetic() {
        let Head::Basic(atom) = rule("p(A - 1).").head else { panic!() };
        let mut src = FreshVarSource::new(["A".to_string()]);
        let z = src.general("Z");
        assert_eq!(
            val_formula(&atom.args[0], &z, &mut src).to_string(),
            "exists I$i J$i (Z = I$i - J$i and I$i = A and J$i = 1)"
        );
    }

    #[test]
    fn val_of_interval_division_modulo() {
        let Head::Basic(atom) = rule("p(X..Y, X/Y, X\\Y, |X|).").head else { panic!() };
        let mut src = FreshVarSource::new(["X".to_string(), "Y".to_string()]);
        let v = src.general("V");
        assert_eq!(
            val_formula(&atom.args[0], &v, &mut src).to_string(),
            "exists I$i J$i K$i (I$i = X and J$i = Y and I$i <= K$i and K$i <= J$i and V = K$i)"
        );
        assert_eq!(
            val_formula(&atom.args[1], &v, &mut src).to_string(),
            "exists I1$i J1$i K1$i (I1$i = X and J1$i = Y and K1$i * |J1$i| <= |I1$i| and \
             |I1$i| < (K1$i + 1) * |J1$i| and (I1$i * J1$i >= 0 and V = K1$i or \
             I1$i * J1$i < 0 and V = 0 - K1$i))"
        );
        assert_eq!(
            val_formula(&atom.args[2], &v, &mut src).to_string(),
            "exists I2$i J2$i K2$i (I2$i = X and J2$i = Y and K2$i * |J2$i| <= |I2$i| and \
             |I2$i| < (K2$i + 1) * |J2$i| and (I2$i * J2$i >= 0 and V = I2$i - K2$i * J2$i or \
             I2$i * J2$i < 0 and V = I2$i + K2$i * J2$i))"
        );
        assert_eq!(
            val_formula(&atom.args[3], &v, &mut src).to_string(),
            "exists I3$i (V = |I3$i| and I3$i = X)"
        );
    }

    #[test]
    fn body_elements() {
        let mut src = FreshVarSource::new(["X".to_string()]);
        assert_eq!(
            tau_b(&element("not r(X)"), &mut src).to_string(),
            "exists Z (Z = X and not r(Z))"
        );
        assert_eq!(
            tau_b(&element("not not r(X)"), &mut src).to_string(),
            "exists Z1 (Z1 = X and not not r(Z1))"
        );
        assert_eq!(
            tau_b(&element("1 < 2"), &mut src).to_string(),
            "exists Z2 Z3 (Z2 = 1 and Z3 = 2 and Z2 < Z3)"
        );
        assert_eq!(tau_b(&element("q"), &mut src).to_string(), "q");
        assert_eq!(
            tau_b(&element("e(X, a)"), &mut src).to_string(),
            "exists Z4 Z5 (Z4 = X and Z5 = a and e(Z4, Z5))"
        );
    }

    #[test]
    fn rules() {
        assert_eq!(
            tau_star_rule(&rule("p(A) :- q(A-1).")).to_string(),
            "forall V1 A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and I$i = A and \
             J$i = 1) and q(Z)) -> p(V1))"
        );
        assert_eq!(
            tau_star_rule(&rule("{p(A)} :- r(A, B).")).to_string(),
            "forall V1 A B (V1 = A and exists Z1 Z2 (Z1 = A and Z2 = B and r(Z1, Z2)) and \
             not not p(V1) -> p(V1))"
        );
        assert_eq!(
            tau_star_rule(&rule(":- q(X).")).to_string(),
            "forall X not exists Z (Z = X and q(Z))"
        );
        assert_eq!(tau_star_rule(&rule("p.")).to_string(), "#true -> p");
        assert_eq!(tau_star_rule(&rule("r(1).")).to_string(), "forall V1 (V1 = 1 -> r(V1))");
        assert_eq!(
            tau_star_rule(&rule("p(X) :- q(X), not r(X).")).to_string(),
            "forall V1 X (V1 = X and (exists Z (Z = X and q(Z)) and exists Z1 (Z1 = X and \
             not r(Z1))) -> p(V1))"
        );
    }

    #[test]
    fn fresh_names_avoid_rule_variables() {
        let f = tau_star_rule(&rule("p(Z, V1) :- q(Z, I)."));
        assert_eq!(
            f.to_string(),
            "forall V2 V3 Z V1 I (V2 = Z and V3 = V1 and exists Z1 Z2 (Z1 = Z and Z2 = I and \
             q(Z1, Z2)) -> p(V2, V3))"
        );
        assert!(f.free_variables().is_empty());
    }

    #[test]
    fn form_rejects_constraints() {
        let r = rule(":- q.");
        assert!(matches!(
            form(&r, &[], &mut FreshVarSource::default()),
            Err(TauError::ConstraintHasNoForm(_))
        ));
    }

    #[test]
    fn programs() {
        assert!(tau_star_program(&parse_program("").unwrap()).is_empty());
        let tight = parse_program("p(X) :- q(X).\np(X) :- not r(X).\nr(1).\nq(1).\n").unwrap();
        assert_eq!(tau_star_program(&tight).len(), 4);
    }
}
