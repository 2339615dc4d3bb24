//! Finite-domain semantics: values of ground terms, the propositional
//! translation of rule instances, reducts, and stable, supported and
//! well-supported model checks.

mod models;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    Atom, BinaryOperator, BodyElement, Head, PrecomputedTerm, Program, ProgramTerm, Rule, Sign,
};
pub use models::{
    immediate_consequences, is_stable, is_supported, is_well_supported, minimal_model,
    normalize_reduct, strict_partial_orders, Clause, DerivationOrder, GroundProgram, ReductOutcome,
    ReductTheory,
};

/// Intervals longer than this are refused rather than expanded.
pub const MAX_INTERVAL: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("integer overflow while computing the values of `{0}`")]
    Overflow(String),
    #[error("term `{0}` is not ground")]
    NotGround(String),
    #[error("interval `{0}` has too many values")]
    IntervalTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<PrecomputedTerm>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: Vec<PrecomputedTerm>) -> Self {
        GroundAtom {
            predicate: predicate.to_string(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

pub type Interpretation = BTreeSet<GroundAtom>;

/// Elements substituted for variables when instantiating rules.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domain {
    pub general: BTreeSet<PrecomputedTerm>,
}

impl Domain {
    pub fn new(elements: impl IntoIterator<Item = PrecomputedTerm>) -> Self {
        Domain {
            general: elements.into_iter().collect(),
        }
    }

    pub fn integers(range: std::ops::RangeInclusive<i64>) -> Self {
        Domain::new(range.map(PrecomputedTerm::Numeral))
    }
}

pub fn values(t: &ProgramTerm) -> Result<BTreeSet<PrecomputedTerm>, ValueError> {
    let overflow = || ValueError::Overflow(t.to_string());
    match t {
        ProgramTerm::Precomputed(c) => Ok([c.clone()].into_iter().collect()),
        ProgramTerm::Variable(_) => Err(ValueError::NotGround(t.to_string())),
        ProgramTerm::Absolute(inner) => {
            let mut out = BTreeSet::new();
            for n in integers(&values(inner)?) {
                out.insert(PrecomputedTerm::Numeral(n.checked_abs().ok_or_else(overflow)?));
            }
            Ok(out)
        }
        ProgramTerm::Binary { op, lhs, rhs } => {
            let (left, right) = (integers(&values(lhs)?), integers(&values(rhs)?));
            let mut out = BTreeSet::new();
            for &a in &left {
                for &b in &right {
                    let result = match op {
                        BinaryOperator::Add => Some(a.checked_add(b).ok_or_else(overflow)?),
                        BinaryOperator::Subtract => Some(a.checked_sub(b).ok_or_else(overflow)?),
                        BinaryOperator::Multiply => Some(a.checked_mul(b).ok_or_else(overflow)?),
                        // Both round the quotient toward zero.
                        BinaryOperator::Divide if b == 0 => None,
                        BinaryOperator::Divide => Some(a.checked_div(b).ok_or_else(overflow)?),
                        BinaryOperator::Modulo if b == 0 => None,
                        BinaryOperator::Modulo => Some(a.checked_rem(b).ok_or_else(overflow)?),
                        BinaryOperator::Interval => {
                            if b >= a && b.checked_sub(a).is_none_or(|d| d >= MAX_INTERVAL) {
                                return Err(ValueError::IntervalTooLarge(t.to_string()));
                            }
                            out.extend((a..=b).map(PrecomputedTerm::Numeral));
                            None
                        }
                    };
                    if let Some(n) = result {
                        out.insert(PrecomputedTerm::Numeral(n));
                    }
                }
            }
            Ok(out)
        }
    }
}

fn integers(set: &BTreeSet<PrecomputedTerm>) -> Vec<i64> {
    set.iter().filter_map(|c| c.as_integer()).collect()
}

/// All ground atoms `p(r1, ..., rn)` with each `ri` a value of the i-th argument.
pub fn atom_values(atom: &Atom) -> Result<Vec<GroundAtom>, ValueError> {
    let mut tuples: Vec<Vec<PrecomputedTerm>> = vec![Vec::new()];
    for arg in &atom.args {
        let vals = values(arg)?;
        let mut next = Vec::with_capacity(tuples.len() * vals.len());
        for tuple in &tuples {
            for v in &vals {
                let mut extended = tuple.clone();
                extended.push(v.clone());
                next.push(extended);
            }
        }
        tuples = next;
    }
    Ok(tuples
        .into_iter()
        .map(|args| GroundAtom {
            predicate: atom.predicate.clone(),
            args,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropFormula {
    Atom(GroundAtom),
    Bottom,
    Top,
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Implies(Box::new(f), Box::new(PropFormula::Bottom))
    }

    pub fn implies(l: PropFormula, r: PropFormula) -> Self {
        PropFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn satisfied_by(&self, i: &Interpretation) -> bool {
        match self {
            PropFormula::Atom(a) => i.contains(a),
            PropFormula::Bottom => false,
            PropFormula::Top => true,
            PropFormula::And(fs) => fs.iter().all(|f| f.satisfied_by(i)),
            PropFormula::Or(fs) => fs.iter().any(|f| f.satisfied_by(i)),
            PropFormula::Implies(l, r) => !l.satisfied_by(i) || r.satisfied_by(i),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<GroundAtom>) {
        match self {
            PropFormula::Atom(a) => {
                out.insert(a.clone());
            }
            PropFormula::Bottom | PropFormula::Top => {}
            PropFormula::And(fs) | PropFormula::Or(fs) => fs.iter().for_each(|f| f.atoms(out)),
            PropFormula::Implies(l, r) => {
                l.atoms(out);
                r.atoms(out);
            }
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, fs: &[PropFormula], sep: &str, empty: &str| {
            if fs.is_empty() {
                return write!(f, "{empty}");
            }
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{g}")?;
            }
            write!(f, ")")
        };
        match self {
            PropFormula::Atom(a) => write!(f, "{a}"),
            PropFormula::Bottom => write!(f, "#false"),
            PropFormula::Top => write!(f, "#true"),
            PropFormula::And(fs) => list(f, fs, "and", "#true"),
            PropFormula::Or(fs) => list(f, fs, "or", "#false"),
            PropFormula::Implies(l, r) => write!(f, "({l} -> {r})"),
        }
    }
}

pub fn tau_body_element(element: &BodyElement) -> Result<PropFormula, ValueError> {
    match element {
        BodyElement::Literal(l) => {
            let atoms = atom_values(&l.atom)?;
            Ok(PropFormula::Or(
                atoms
                    .into_iter()
                    .map(|a| {
                        let a = PropFormula::Atom(a);
                        match l.sign {
                            Sign::NoSign => a,
                            Sign::Negation => PropFormula::not(a),
                            Sign::DoubleNegation => PropFormula::not(PropFormula::not(a)),
                        }
                    })
                    .collect(),
            ))
        }
        BodyElement::Comparison(c) => {
            let (left, right) = (values(&c.lhs)?, values(&c.rhs)?);
            let holds = left
                .iter()
                .any(|a| right.iter().any(|b| c.relation.holds(a.cmp(b))));
            Ok(if holds { PropFormula::Top } else { PropFormula::Bottom })
        }
    }
}

pub fn tau_ground_rule(rule: &Rule) -> Result<PropFormula, ValueError> {
    let body = PropFormula::And(
        rule.body
            .iter()
            .map(tau_body_element)
            .collect::<Result<_, _>>()?,
    );
    let head = match &rule.head {
        Head::Basic(a) => PropFormula::And(atom_values(a)?.into_iter().map(PropFormula::Atom).collect()),
        Head::Choice(a) => PropFormula::And(
            atom_values(a)?
                .into_iter()
                .map(|a| {
                    PropFormula::Or(vec![
                        PropFormula::Atom(a.clone()),
                        PropFormula::not(PropFormula::Atom(a)),
                    ])
                })
                .collect(),
        ),
        Head::Constraint => PropFormula::Bottom,
    };
    Ok(PropFormula::implies(body, head))
}

/// Every instance of every rule with variables replaced by domain elements.
pub fn instantiate(program: &Program, domain: &Domain) -> Vec<Rule> {
    let elements: Vec<&PrecomputedTerm> = domain.general.iter().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rule in &program.rules {
        let vars = rule.variables();
        if !vars.is_empty() && elements.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; vars.len()];
        'assignments: loop {
            let lookup = |name: &str| {
                vars.iter()
                    .position(|v| v == name)
                    .map(|i| elements[choice[i]].clone())
            };
            let instance = substitute_rule(rule, &lookup);
            if seen.insert(instance.clone()) {
                out.push(instance);
            }
            // Odometer over the assignments, rightmost variable fastest.
            let mut k = vars.len();
            loop {
                if k == 0 {
                    break 'assignments;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < elements.len() {
                    continue 'assignments;
                }
                choice[k] = 0;
            }
        }
    }
    out
}

fn substitute_rule(rule: &Rule, lookup: &dyn Fn(&str) -> Option<PrecomputedTerm>) -> Rule {
    let atom = |a: &Atom| Atom {
        predicate: a.predicate.clone(),
        args: a.args.iter().map(|t| t.substitute(lookup)).collect(),
    };
    Rule {
        head: match &rule.head {
            Head::Basic(a) => Head::Basic(atom(a)),
            Head::Choice(a) => Head::Choice(atom(a)),
            Head::Constraint => Head::Constraint,
        },
        body: rule
            .body
            .iter()
            .map(|e| match e {
                BodyElement::Literal(l) => BodyElement::Literal(crate::syntax::Literal {
                    sign: l.sign,
                    atom: atom(&l.atom),
                }),
                BodyElement::Comparison(c) => BodyElement::Comparison(crate::syntax::Comparison {
                    relation: c.relation,
                    lhs: c.lhs.substitute(lookup),
                    rhs: c.rhs.substitute(lookup),
                }),
            })
            .collect(),
    }
}

/// The reduct of `f` with respect to `i`.
pub fn reduct(f: &PropFormula, i: &Interpretation) -> PropFormula {
    if !f.satisfied_by(i) {
        return PropFormula::Bottom;
    }
    match f {
        PropFormula::Atom(_) | PropFormula::Top | PropFormula::Bottom => f.clone(),
        PropFormula::And(fs) => PropFormula::And(fs.iter().map(|g| reduct(g, i)).collect()),
        PropFormula::Or(fs) => PropFormula::Or(fs.iter().map(|g| reduct(g, i)).collect()),
        PropFormula::Implies(l, r) => PropFormula::implies(reduct(l, i), reduct(r, i)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn term(text: &str) -> ProgramTerm {
        let program = parse_program(&format!("p({text}).")).unwrap();
        program.rules[0].head_atom().unwrap().args[0].clone()
    }

    fn nums(ns: &[i64]) -> BTreeSet<PrecomputedTerm> {
        ns.iter().map(|n| PrecomputedTerm::Numeral(*n)).collect()
    }

    fn ga(p: &str, args: &[i64]) -> GroundAtom {
        GroundAtom::new(p, args.iter().map(|n| PrecomputedTerm::Numeral(*n)).collect())
    }

    #[test]
    fn division_and_modulo_round_toward_zero() {
        assert_eq!(values(&term("7 / 2")).unwrap(), nums(&[3]));
        assert_eq!(values(&term("-7 / 2")).unwrap(), nums(&[-3]));
        assert_eq!(values(&term("-7 \\ 2")).unwrap(), nums(&[-1]));
        assert_eq!(values(&term("7 \\ -2")).unwrap(), nums(&[1]));
        assert_eq!(values(&term("1 / 0")).unwrap(), nums(&[]));
    }

    #[test]
    fn intervals_and_symbols() {
        assert_eq!(values(&term("1..3")).unwrap(), nums(&[1, 2, 3]));
        assert_eq!(values(&term("3..1")).unwrap(), nums(&[]));
        assert_eq!(values(&term("a + 1")).unwrap(), nums(&[]));
        assert_eq!(
            values(&term("c")).unwrap(),
            [PrecomputedTerm::Symbol("c".into())].into_iter().collect()
        );
        assert_eq!(values(&term("(1..2) * 2")).unwrap(), nums(&[2, 4]));
        assert_eq!(values(&term("|0 - 3|")).unwrap(), nums(&[3]));
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(
            values(&term("9223372036854775807 + 1")),
            Err(ValueError::Overflow(_))
        ));
        assert!(matches!(values(&term("X + 1")), Err(ValueError::NotGround(_))));
    }

    #[test]
    fn rule_translation() {
        let rules = parse_program("p(1..2) :- q.\n{p(1)}.\n:- s(1).\nr :- 1 < 1..2.")
            .unwrap()
            .rules;
        let q = PropFormula::Atom(GroundAtom::new("q", vec![]));
        let p = |n| PropFormula::Atom(ga("p", &[n]));
        assert_eq!(
            tau_ground_rule(&rules[0]).unwrap(),
            PropFormula::implies(PropFormula::And(vec![PropFormula::Or(vec![q])]), PropFormula::And(vec![p(1), p(2)]))
        );
        assert_eq!(
            tau_ground_rule(&rules[1]).unwrap(),
            PropFormula::implies(
                PropFormula::And(vec![]),
                PropFormula::And(vec![PropFormula::Or(vec![p(1), PropFormula::not(p(1))])])
            )
        );
        assert_eq!(
            tau_ground_rule(&rules[2]).unwrap(),
            PropFormula::implies(
                PropFormula::And(vec![PropFormula::Or(vec![PropFormula::Atom(ga("s", &[1]))])]),
                PropFormula::Bottom
            )
        );
        assert_eq!(tau_body_element(&rules[3].body[0]).unwrap(), PropFormula::Top);
    }

    #[test]
    fn instantiation() {
        let program = parse_program("p(X) :- q(X).").unwrap();
        let instances = instantiate(&program, &Domain::integers(1..=2));
        let rendered: Vec<_> = instances.iter().map(|r| r.to_string()).collect();
        assert_eq!(rendered, vec!["p(1) :- q(1).", "p(2) :- q(2)."]);

        let ground = parse_program("p(1) :- q(2).").unwrap();
        assert_eq!(instantiate(&ground, &Domain::integers(1..=3)), ground.rules);

        let pair = parse_program("p(X,Y).").unwrap();
        let rendered: Vec<_> = instantiate(&pair, &Domain::integers(1..=1))
            .iter()
            .map(|r| r.to_string())
            .collect();
        assert_eq!(rendered, vec!["p(1, 1)."]);
        assert_eq!(instantiate(&pair, &Domain::integers(1..=3)).len(), 9);
    }

    #[test]
    fn reduct_clauses() {
        let p = PropFormula::Atom(GroundAtom::new("p", vec![]));
        let q = PropFormula::Atom(GroundAtom::new("q", vec![]));
        let only = |a: &str| -> Interpretation { [GroundAtom::new(a, vec![])].into_iter().collect() };
        assert_eq!(reduct(&p, &only("p")), p);
        assert_eq!(reduct(&PropFormula::not(q.clone()), &only("q")), PropFormula::Bottom);
        assert_eq!(
            reduct(&PropFormula::implies(p, q), &Interpretation::new()),
            PropFormula::implies(PropFormula::Bottom, PropFormula::Bottom)
        );
    }
}
