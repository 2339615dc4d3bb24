use std::collections::{BTreeMap, BTreeSet};

use super::{atom_values, instantiate, values, Domain, GroundAtom, Interpretation, ValueError};
use crate::syntax::{BodyElement, Head, Program, Rule, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HeadKind {
    Basic,
    Choice,
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum GroundBody {
    /// The atoms `p(r)` for every value tuple `r` of the literal's arguments.
    Literal { sign: Sign, atoms: Vec<GroundAtom> },
    /// A comparison, already decided.
    Truth(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GroundRule {
    kind: HeadKind,
    head: Vec<GroundAtom>,
    body: Vec<GroundBody>,
}

/// Rule instances with all term values computed once, so that many
/// interpretations can be checked against the same instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    rules: Vec<GroundRule>,
}

/// A negation-free clause: every listed disjunction implies every head atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause {
    pub body: Vec<Vec<GroundAtom>>,
    pub head: BTreeSet<GroundAtom>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductTheory {
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductOutcome {
    Theory(ReductTheory),
    /// Some rule's reduct is falsity: the interpretation violates the program.
    Unsatisfied,
}

/// Pairs `(a, b)` meaning `a` precedes `b`.
pub type DerivationOrder = BTreeSet<(GroundAtom, GroundAtom)>;

impl GroundProgram {
    pub fn new(program: &Program, domain: &Domain) -> Result<Self, ValueError> {
        Self::from_instances(&instantiate(program, domain))
    }

    pub fn from_instances(instances: &[Rule]) -> Result<Self, ValueError> {
        let mut rules = Vec::with_capacity(instances.len());
        for rule in instances {
            let (kind, head) = match &rule.head {
                Head::Basic(a) => (HeadKind::Basic, atom_values(a)?),
                Head::Choice(a) => (HeadKind::Choice, atom_values(a)?),
                Head::Constraint => (HeadKind::Constraint, Vec::new()),
            };
            let mut body = Vec::with_capacity(rule.body.len());
            for element in &rule.body {
                body.push(match element {
                    BodyElement::Literal(l) => GroundBody::Literal {
                        sign: l.sign,
                        atoms: atom_values(&l.atom)?,
                    },
                    BodyElement::Comparison(c) => {
                        let (left, right) = (values(&c.lhs)?, values(&c.rhs)?);
                        GroundBody::Truth(
                            left.iter()
                                .any(|a| right.iter().any(|b| c.relation.holds(a.cmp(b)))),
                        )
                    }
                });
            }
            rules.push(GroundRule { kind, head, body });
        }
        Ok(GroundProgram { rules })
    }

    /// Atoms some rule instance can make true; every supported
    /// interpretation is a subset.
    pub fn head_atoms(&self) -> BTreeSet<GroundAtom> {
        self.rules.iter().flat_map(|r| r.head.iter().cloned()).collect()
    }

    fn body_holds(body: &[GroundBody], i: &Interpretation) -> bool {
        body.iter().all(|element| match element {
            GroundBody::Truth(b) => *b,
            GroundBody::Literal { sign, atoms } => match sign {
                Sign::NoSign | Sign::DoubleNegation => atoms.iter().any(|a| i.contains(a)),
                Sign::Negation => atoms.iter().any(|a| !i.contains(a)),
            },
        })
    }

    fn rule_holds(rule: &GroundRule, i: &Interpretation) -> bool {
        if !Self::body_holds(&rule.body, i) {
            return true;
        }
        match rule.kind {
            HeadKind::Basic => rule.head.iter().all(|a| i.contains(a)),
            HeadKind::Choice => true,
            HeadKind::Constraint => false,
        }
    }

    /// Whether `i` satisfies the propositional translation of every instance.
    pub fn satisfied_by(&self, i: &Interpretation) -> bool {
        self.rules.iter().all(|r| Self::rule_holds(r, i))
    }

    pub fn normalize_reduct(&self, i: &Interpretation) -> ReductOutcome {
        let mut clauses = Vec::new();
        for rule in &self.rules {
            if !Self::body_holds(&rule.body, i) {
                // The body reduces to falsity and the clause is a tautology.
                continue;
            }
            let head: BTreeSet<GroundAtom> = match rule.kind {
                HeadKind::Constraint => return ReductOutcome::Unsatisfied,
                HeadKind::Basic => {
                    if rule.head.iter().any(|a| !i.contains(a)) {
                        return ReductOutcome::Unsatisfied;
                    }
                    rule.head.iter().cloned().collect()
                }
                HeadKind::Choice => rule.head.iter().filter(|a| i.contains(a)).cloned().collect(),
            };
            if head.is_empty() {
                continue;
            }
            // Negated literals hold in `i` and reduce to truth; positive ones
            // keep only their disjuncts true in `i`.
            let body = rule
                .body
                .iter()
                .filter_map(|element| match element {
                    GroundBody::Literal {
                        sign: Sign::NoSign,
                        atoms,
                    } => Some(atoms.iter().filter(|a| i.contains(a)).cloned().collect()),
                    _ => None,
                })
                .collect();
            clauses.push(Clause { body, head });
        }
        ReductOutcome::Theory(ReductTheory { clauses })
    }

    pub fn is_stable(&self, i: &Interpretation) -> bool {
        match self.normalize_reduct(i) {
            ReductOutcome::Unsatisfied => false,
            ReductOutcome::Theory(theory) => minimal_model(&theory) == *i,
        }
    }

    /// Instances whose head can produce `atom` and whose body holds in `i`.
    fn supporting<'a>(
        &'a self,
        atom: &'a GroundAtom,
        i: &'a Interpretation,
    ) -> impl Iterator<Item = &'a GroundRule> + 'a {
        self.rules.iter().filter(move |r| {
            r.kind != HeadKind::Constraint && r.head.contains(atom) && Self::body_holds(&r.body, i)
        })
    }

    pub fn is_supported(&self, i: &Interpretation) -> bool {
        self.satisfied_by(i) && i.iter().all(|a| self.supporting(a, i).next().is_some())
    }

    /// Layer index (from 1) of every atom of `i` in the well-support
    /// construction, or `None` when `i` is not well-supported.
    ///
    /// Layer `n` holds the atoms with a supporting instance whose positive
    /// body literals each have a witness in layers before `n`.
    pub fn well_support_ranks(&self, i: &Interpretation) -> Option<BTreeMap<GroundAtom, usize>> {
        if !self.satisfied_by(i) {
            return None;
        }
        let mut ranks: BTreeMap<GroundAtom, usize> = BTreeMap::new();
        let mut layer = 0;
        while ranks.len() < i.len() {
            layer += 1;
            let derived: Vec<GroundAtom> = i
                .iter()
                .filter(|a| !ranks.contains_key(*a))
                .filter(|a| {
                    self.supporting(a, i)
                        .any(|r| self.positive_witnesses(r, |b| ranks.contains_key(b)))
                })
                .cloned()
                .collect();
            if derived.is_empty() {
                return None;
            }
            for a in derived {
                ranks.insert(a, layer);
            }
        }
        Some(ranks)
    }

    fn positive_witnesses(&self, rule: &GroundRule, precedes: impl Fn(&GroundAtom) -> bool) -> bool {
        rule.body.iter().all(|element| match element {
            GroundBody::Literal {
                sign: Sign::NoSign,
                atoms,
            } => atoms.iter().any(&precedes),
            _ => true,
        })
    }

    pub fn is_well_supported(&self, i: &Interpretation) -> bool {
        self.well_support_ranks(i).is_some()
    }

    /// Whether `order` witnesses that `i` is well-supported. The order must
    /// be irreflexive and transitive over `i`.
    pub fn is_well_supported_by(&self, i: &Interpretation, order: &DerivationOrder) -> bool {
        self.satisfied_by(i)
            && i.iter().all(|a| {
                self.supporting(a, i).any(|r| {
                    self.positive_witnesses(r, |b| {
                        i.contains(b) && order.contains(&(b.clone(), a.clone()))
                    })
                })
            })
    }

    /// Decides well-support by trying every strict partial order on `i`.
    /// Returns `None` when `i` has more than four atoms.
    pub fn is_well_supported_exhaustive(&self, i: &Interpretation) -> Option<bool> {
        if i.len() > 4 {
            return None;
        }
        Some(strict_partial_orders(i).iter().any(|order| self.is_well_supported_by(i, order)))
    }

    /// Every stable model whose atoms are heads of some instance.
    ///
    /// Candidates are fixed by a guess on the atoms occurring under negation
    /// or in choice heads; each candidate is then checked directly.
    pub fn stable_models(&self) -> Vec<Interpretation> {
        let mut guessable: BTreeSet<GroundAtom> = BTreeSet::new();
        for rule in &self.rules {
            if rule.kind == HeadKind::Choice {
                guessable.extend(rule.head.iter().cloned());
            }
            for element in &rule.body {
                if let GroundBody::Literal { sign, atoms } = element {
                    if *sign != Sign::NoSign {
                        guessable.extend(atoms.iter().cloned());
                    }
                }
            }
        }
        let heads = self.head_atoms();
        guessable.retain(|a| heads.contains(a));
        let guessable: Vec<GroundAtom> = guessable.into_iter().collect();
        let mut found = BTreeSet::new();
        for mask in 0u64..(1u64 << guessable.len()) {
            let guess: Interpretation = guessable
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, a)| a.clone())
                .collect();
            let candidate = self.least_model_under(&guess);
            if self.is_stable(&candidate) {
                found.insert(candidate);
            }
        }
        found.into_iter().collect()
    }

    /// Least fixpoint where negation and choice are resolved by `guess`.
    fn least_model_under(&self, guess: &Interpretation) -> Interpretation {
        let mut model = Interpretation::new();
        loop {
            let mut changed = false;
            for rule in &self.rules {
                if rule.kind == HeadKind::Constraint {
                    continue;
                }
                let fires = rule.body.iter().all(|element| match element {
                    GroundBody::Truth(b) => *b,
                    GroundBody::Literal { sign, atoms } => match sign {
                        Sign::NoSign => atoms.iter().any(|a| model.contains(a)),
                        Sign::Negation => atoms.iter().any(|a| !guess.contains(a)),
                        Sign::DoubleNegation => atoms.iter().any(|a| guess.contains(a)),
                    },
                });
                if !fires {
                    continue;
                }
                for a in &rule.head {
                    if (rule.kind == HeadKind::Basic || guess.contains(a)) && model.insert(a.clone()) {
                        changed = true;
                    }
                }
            }
            if !changed {
                return model;
            }
        }
    }
}

/// All irreflexive, transitive relations over the atoms of `i`.
pub fn strict_partial_orders(i: &Interpretation) -> Vec<DerivationOrder> {
    let atoms: Vec<&GroundAtom> = i.iter().collect();
    let pairs: Vec<(usize, usize)> = (0..atoms.len())
        .flat_map(|a| (0..atoms.len()).filter(move |b| *b != a).map(move |b| (a, b)))
        .collect();
    let n = atoms.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut related = vec![vec![false; n]; n];
        for (k, (a, b)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                related[*a][*b] = true;
            }
        }
        let transitive = (0..n).all(|a| {
            (0..n).all(|b| !related[a][b] || (0..n).all(|c| !related[b][c] || related[a][c]))
        });
        let irreflexive = (0..n).all(|a| !related[a][a]);
        if transitive && irreflexive {
            out.push(
                pairs
                    .iter()
                    .filter(|(a, b)| related[*a][*b])
                    .map(|(a, b)| (atoms[*a].clone(), atoms[*b].clone()))
                    .collect(),
            );
        }
    }
    out
}

pub fn normalize_reduct(
    program: &Program,
    i: &Interpretation,
    domain: &Domain,
) -> Result<ReductOutcome, ValueError> {
    Ok(GroundProgram::new(program, domain)?.normalize_reduct(i))
}

pub fn immediate_consequences(theory: &ReductTheory, i: &Interpretation) -> Interpretation {
    theory
        .clauses
        .iter()
        .filter(|c| c.body.iter().all(|d| d.iter().any(|a| i.contains(a))))
        .flat_map(|c| c.head.iter().cloned())
        .collect()
}

pub fn minimal_model(theory: &ReductTheory) -> Interpretation {
    let mut model = Interpretation::new();
    loop {
        let next = immediate_consequences(theory, &model);
        if next == model {
            return model;
        }
        model = next;
    }
}

pub fn is_stable(program: &Program, i: &Interpretation, domain: &Domain) -> Result<bool, ValueError> {
    Ok(GroundProgram::new(program, domain)?.is_stable(i))
}

pub fn is_supported(program: &Program, i: &Interpretation, domain: &Domain) -> Result<bool, ValueError> {
    Ok(GroundProgram::new(program, domain)?.is_supported(i))
}

pub fn is_well_supported(
    program: &Program,
    i: &Interpretation,
    domain: &Domain,
) -> Result<bool, ValueError> {
    Ok(GroundProgram::new(program, domain)?.is_well_supported(i))
}
