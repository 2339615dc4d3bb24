use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{ArithOp, FoTerm, Formula, Sort, Variable};
use crate::ground::{Domain, GroundAtom, Interpretation};
use crate::syntax::{PrecomputedTerm, Predicate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("an integer quantifier occurs but no integer range was given")]
    MissingIntegerRange,
    #[error("`{0}` does not denote an integer")]
    NotAnInteger(String),
    #[error("integer overflow while evaluating `{0}`")]
    Overflow(String),
    #[error("extension does not match the signature: {0}")]
    SignatureMismatch(String),
}

/// Which symbols beyond the program vocabulary an interpretation covers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SignatureExt {
    #[default]
    Sigma0,
    /// Order predicates `less_p_q` for the listed pairs.
    SigmaOrder(BTreeSet<(Predicate, Predicate)>),
    /// Level functions `lvl_p` for the listed predicates.
    SigmaLevel(BTreeSet<Predicate>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Extras {
    #[default]
    None,
    OrderFacts(BTreeSet<GroundAtom>),
    Levels(BTreeMap<GroundAtom, i64>),
}

/// A standard interpretation cut down to finitely many domain elements.
///
/// Order facts not listed are false; atoms without a level have level 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStdInterp {
    pub base: Interpretation,
    pub general_domain: Vec<PrecomputedTerm>,
    pub int_range: Option<(i64, i64)>,
    pub signature: SignatureExt,
    pub order_facts: BTreeSet<GroundAtom>,
    pub level_map: BTreeMap<GroundAtom, i64>,
}

pub fn extend_standard(
    base: &Interpretation,
    domain: &Domain,
    int_range: Option<(i64, i64)>,
    signature: SignatureExt,
    extras: Extras,
) -> Result<FiniteStdInterp, EvalError> {
    let mut order_facts = BTreeSet::new();
    let mut level_map = BTreeMap::new();
    match (&signature, extras) {
        (_, Extras::None) => {}
        (SignatureExt::SigmaOrder(pairs), Extras::OrderFacts(facts)) => {
            for fact in &facts {
                let known = pairs.iter().any(|(p, q)| {
                    fact.predicate == crate::ordered::order_predicate_name(&p.name, &q.name)
                        && fact.args.len() == p.arity + q.arity
                });
                if !known {
                    return Err(EvalError::SignatureMismatch(format!(
                        "`{fact}` is not an order atom of the signature"
                    )));
                }
            }
            order_facts = facts;
        }
        (SignatureExt::SigmaLevel(predicates), Extras::Levels(levels)) => {
            for atom in levels.keys() {
                let known = predicates
                    .iter()
                    .any(|p| p.name == atom.predicate && p.arity == atom.args.len());
                if !known {
                    return Err(EvalError::SignatureMismatch(format!(
                        "no level function for `{atom}`"
                    )));
                }
            }
            level_map = levels;
        }
        (_, Extras::OrderFacts(_)) => {
            return Err(EvalError::SignatureMismatch(
                "order facts need an order signature".into(),
            ))
        }
        (_, Extras::Levels(_)) => {
            return Err(EvalError::SignatureMismatch(
                "levels need a level signature".into(),
            ))
        }
    }
    // Integers are general elements too, so the general domain covers the
    // integer range.
    let mut general: BTreeSet<PrecomputedTerm> = domain.general.clone();
    if let Some((lo, hi)) = int_range {
        general.extend((lo..=hi).map(PrecomputedTerm::Numeral));
    }
    Ok(FiniteStdInterp {
        base: base.clone(),
        general_domain: general.into_iter().collect(),
        int_range,
        signature,
        order_facts,
        level_map,
    })
}

/// Drops everything outside the program vocabulary.
pub fn restrict(m: &FiniteStdInterp) -> FiniteStdInterp {
    FiniteStdInterp {
        signature: SignatureExt::Sigma0,
        order_facts: BTreeSet::new(),
        level_map: BTreeMap::new(),
        ..m.clone()
    }
}

pub fn atoms_of(m: &FiniteStdInterp) -> Interpretation {
    m.base.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub value: bool,
    /// Set when an integer quantifier was decided at an end of the range or
    /// arithmetic left the range; a wider range might change the value.
    pub hit_bound: bool,
}

pub fn evaluate(formula: &Formula, m: &FiniteStdInterp) -> Result<bool, EvalError> {
    evaluate_with_report(formula, m).map(|e| e.value)
}

pub fn evaluate_with_report(formula: &Formula, m: &FiniteStdInterp) -> Result<Evaluation, EvalError> {
    let mut evaluator = Evaluator {
        m,
        env: Vec::new(),
        hit_bound: false,
    };
    let value = evaluator.formula(formula)?;
    Ok(Evaluation {
        value,
        hit_bound: evaluator.hit_bound,
    })
}

struct Evaluator<'a> {
    m: &'a FiniteStdInterp,
    env: Vec<(&'a Variable, PrecomputedTerm)>,
    hit_bound: bool,
}

impl<'a> Evaluator<'a> {
    fn lookup(&self, v: &Variable) -> Result<PrecomputedTerm, EvalError> {
        self.env
            .iter()
            .rev()
            .find(|(w, _)| *w == v)
            .map(|(_, value)| value.clone())
            .ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }

    fn integer(&mut self, t: &FoTerm) -> Result<i64, EvalError> {
        match self.term(t)? {
            PrecomputedTerm::Numeral(n) => Ok(n),
            other => Err(EvalError::NotAnInteger(format!("{t} = {other}"))),
        }
    }

    fn term(&mut self, t: &FoTerm) -> Result<PrecomputedTerm, EvalError> {
        let value = match t {
            FoTerm::Var(v) => return self.lookup(v),
            FoTerm::Const(c) => return Ok(c.clone()),
            FoTerm::Abs(inner) => {
                let n = self.integer(inner)?;
                n.checked_abs().ok_or_else(|| EvalError::Overflow(t.to_string()))?
            }
            FoTerm::Arith(op, l, r) => {
                let (a, b) = (self.integer(l)?, self.integer(r)?);
                let result = match op {
                    ArithOp::Add => a.checked_add(b),
                    ArithOp::Subtract => a.checked_sub(b),
                    ArithOp::Multiply => a.checked_mul(b),
                };
                result.ok_or_else(|| EvalError::Overflow(t.to_string()))?
            }
            FoTerm::Level { predicate, args } => {
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let atom = GroundAtom {
                    predicate: predicate.clone(),
                    args,
                };
                return Ok(PrecomputedTerm::Numeral(
                    self.m.level_map.get(&atom).copied().unwrap_or(0),
                ));
            }
        };
        if let Some((lo, hi)) = self.m.int_range {
            if value < lo || value > hi {
                self.hit_bound = true;
            }
        }
        Ok(PrecomputedTerm::Numeral(value))
    }

    fn formula(&mut self, f: &'a Formula) -> Result<bool, EvalError> {
        match f {
            Formula::Atom(a) => {
                let args = a.args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                let atom = GroundAtom {
                    predicate: a.predicate.clone(),
                    args,
                };
                Ok(self.m.base.contains(&atom) || self.m.order_facts.contains(&atom))
            }
            Formula::Compare(rel, l, r) => {
                let (a, b) = (self.term(l)?, self.term(r)?);
                Ok(rel.holds(a.cmp(&b)))
            }
            Formula::Top => Ok(true),
            Formula::Bottom => Ok(false),
            Formula::And(fs) => {
                for g in fs {
                    if !self.formula(g)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.formula(g)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(l, r) | Formula::ReverseImplies(r, l) => {
                Ok(!self.formula(l)? || self.formula(r)?)
            }
            Formula::Forall(vs, body) => self.quantifier(vs, body, true),
            Formula::Exists(vs, body) => self.quantifier(vs, body, false),
        }
    }

    fn quantifier(
        &mut self,
        vars: &'a [Variable],
        body: &'a Formula,
        universal: bool,
    ) -> Result<bool, EvalError> {
        let Some((v, rest)) = vars.split_first() else {
            return self.formula(body);
        };
        let values: Vec<PrecomputedTerm> = match v.sort {
            Sort::General => self.m.general_domain.clone(),
            Sort::Integer => {
                let (lo, hi) = self.m.int_range.ok_or(EvalError::MissingIntegerRange)?;
                (lo..=hi).map(PrecomputedTerm::Numeral).collect()
            }
        };
        for value in values {
            let at_end = v.sort == Sort::Integer
                && self
                    .m
                    .int_range
                    .is_some_and(|(lo, hi)| value == PrecomputedTerm::Numeral(lo) || value == PrecomputedTerm::Numeral(hi));
            self.env.push((v, value));
            let result = self.quantifier(rest, body, universal);
            self.env.pop();
            // A universal fails and an existential succeeds on the first
            // deciding value.
            if result? != universal {
                if at_end {
                    self.hit_bound = true;
                }
                return Ok(!universal);
            }
        }
        Ok(universal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{FoAtom, Relation};

    fn atom(p: &str, args: &[i64]) -> GroundAtom {
        GroundAtom {
            predicate: p.into(),
            args: args.iter().map(|n| PrecomputedTerm::Numeral(*n)).collect(),
        }
    }

    fn interp(atoms: &[GroundAtom], domain: &[i64], range: Option<(i64, i64)>) -> FiniteStdInterp {
        extend_standard(
            &atoms.iter().cloned().collect(),
            &Domain::new(domain.iter().map(|n| PrecomputedTerm::Numeral(*n))),
            range,
            SignatureExt::Sigma0,
            Extras::None,
        )
        .unwrap()
    }

    #[test]
    fn universal_over_the_domain() {
        let x = Variable::general("X");
        let f = Formula::forall(vec![x.clone()], Formula::atom("p", vec![FoTerm::var(&x)]));
        assert!(evaluate(&f, &interp(&[atom("p", &[1])], &[1], None)).unwrap());
        assert!(!evaluate(&f, &interp(&[atom("p", &[1])], &[1, 2], None)).unwrap());
    }

    #[test]
    fn numerals_precede_symbols() {
        let f = Formula::compare(
            Relation::Less,
            FoTerm::numeral(5),
            FoTerm::Const(PrecomputedTerm::Symbol("a".into())),
        );
        assert!(evaluate(&f, &interp(&[], &[1], None)).unwrap());
    }

    #[test]
    fn integer_quantifier() {
        let i = Variable::integer("I");
        let f = Formula::exists(
            vec![i.clone()],
            Formula::And(vec![
                Formula::equal(FoTerm::var(&i), FoTerm::numeral(1)),
                Formula::atom("p", vec![FoTerm::var(&i)]),
            ]),
        );
        let m = interp(&[atom("p", &[1])], &[1], Some((-2, 2)));
        let report = evaluate_with_report(&f, &m).unwrap();
        assert!(report.value);
        assert!(!report.hit_bound);
        assert_eq!(
            evaluate(&f, &interp(&[], &[1], None)),
            Err(EvalError::MissingIntegerRange)
        );
    }

    #[test]
    fn bound_sensitivity() {
        let i = Variable::integer("I");
        let f = Formula::exists(
            vec![i.clone()],
            Formula::compare(Relation::GreaterEqual, FoTerm::var(&i), FoTerm::numeral(2)),
        );
        assert!(evaluate_with_report(&f, &interp(&[], &[1], Some((-2, 2)))).unwrap().hit_bound);
        let g = Formula::equal(
            FoTerm::arith(ArithOp::Add, FoTerm::numeral(2), FoTerm::numeral(1)),
            FoTerm::numeral(3),
        );
        assert!(evaluate_with_report(&g, &interp(&[], &[1], Some((-2, 2)))).unwrap().hit_bound);
    }

    #[test]
    fn overflow_is_reported() {
        let f = Formula::equal(
            FoTerm::arith(ArithOp::Add, FoTerm::numeral(i64::MAX), FoTerm::numeral(1)),
            FoTerm::numeral(0),
        );
        assert!(matches!(
            evaluate(&f, &interp(&[], &[1], None)),
            Err(EvalError::Overflow(_))
        ));
    }

    #[test]
    fn order_facts_are_closed_world() {
        let base: Interpretation = [atom("q", &[1]), atom("p", &[1])].into_iter().collect();
        let p = Predicate {
            name: "p".into(),
            arity: 1,
        };
        let q = Predicate {
            name: "q".into(),
            arity: 1,
        };
        let signature = SignatureExt::SigmaOrder([(q.clone(), p.clone())].into_iter().collect());
        let fact = atom("less_q_p", &[1, 1]);
        let m = extend_standard(
            &base,
            &Domain::new([PrecomputedTerm::Numeral(1)]),
            None,
            signature.clone(),
            Extras::OrderFacts([fact].into_iter().collect()),
        )
        .unwrap();
        let holds = |pred: &str| {
            let f = Formula::Atom(FoAtom::new(pred, vec![FoTerm::numeral(1), FoTerm::numeral(1)]));
            evaluate(&f, &m).unwrap()
        };
        assert!(holds("less_q_p"));
        assert!(!holds("less_p_q"));
        assert_eq!(atoms_of(&m), base);
        assert_eq!(restrict(&m).order_facts.len(), 0);
        assert_eq!(atoms_of(&restrict(&m)), base);

        let bogus = extend_standard(
            &base,
            &Domain::new([PrecomputedTerm::Numeral(1)]),
            None,
            signature,
            Extras::OrderFacts([atom("less_p_p", &[1, 1])].into_iter().collect()),
        );
        assert!(matches!(bogus, Err(EvalError::SignatureMismatch(_))));
        let wrong_kind = extend_standard(
            &base,
            &Domain::new([PrecomputedTerm::Numeral(1)]),
            None,
            SignatureExt::Sigma0,
            Extras::Levels(BTreeMap::new()),
        );
        assert!(wrong_kind.is_err());
    }

    #[test]
    fn levels_default_to_zero() {
        let m = extend_standard(
            &Interpretation::new(),
            &Domain::new([PrecomputedTerm::Numeral(1)]),
            None,
            SignatureExt::SigmaLevel(
                [Predicate {
                    name: "p".into(),
                    arity: 1,
                }]
                .into_iter()
                .collect(),
            ),
            Extras::Levels([(atom("p", &[1]), 3)].into_iter().collect()),
        )
        .unwrap();
        let level = |n| FoTerm::Level {
            predicate: "p".into(),
            args: vec![FoTerm::numeral(n)],
        };
        assert!(evaluate(&Formula::equal(level(1), FoTerm::numeral(3)), &m).unwrap());
        assert!(evaluate(&Formula::equal(level(2), FoTerm::numeral(0)), &m).unwrap());
    }
}
