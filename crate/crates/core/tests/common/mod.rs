//! The small exhaustive corpus shared by the integration tests, plus a
//! stable-model oracle that works on the corpus description directly.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ocomp_core::fol::{evaluate, extend_standard, Extras, FiniteStdInterp, Formula, SignatureExt};
use ocomp_core::ground::{Domain, GroundAtom, Interpretation};
use ocomp_core::syntax::{parse_program, PrecomputedTerm, Program};

pub const PREDICATES: [&str; 2] = ["p", "q"];
pub const DOMAIN: [i64; 2] = [1, 2];

/// Which of `p` and `q` take one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub unary: [bool; 2],
}

pub const CONFIGS: [Config; 3] = [
    Config { unary: [false, false] },
    Config { unary: [true, true] },
    Config { unary: [false, true] },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HeadSpec {
    Basic(usize),
    Choice(usize),
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleSpec {
    pub head: HeadSpec,
    /// `(predicate index, negated)`.
    pub body: Vec<(usize, bool)>,
}

#[derive(Debug, Clone)]
pub struct CorpusProgram {
    pub config: Config,
    pub rules: Vec<RuleSpec>,
    pub program: Program,
}

impl CorpusProgram {
    pub fn text(&self) -> String {
        program_text(self.config, &self.rules)
    }
}

fn atom_text(config: Config, p: usize) -> String {
    if config.unary[p] {
        format!("{}(X)", PREDICATES[p])
    } else {
        PREDICATES[p].to_string()
    }
}

fn rule_text(config: Config, rule: &RuleSpec) -> String {
    let head = match rule.head {
        HeadSpec::Basic(p) => atom_text(config, p),
        HeadSpec::Choice(p) => format!("{{{}}}", atom_text(config, p)),
        HeadSpec::Constraint => String::new(),
    };
    let body: Vec<String> = rule
        .body
        .iter()
        .map(|&(p, neg)| format!("{}{}", if neg { "not " } else { "" }, atom_text(config, p)))
        .collect();
    match (head.is_empty(), body.is_empty()) {
        (false, true) => format!("{head}."),
        (false, false) => format!("{head} :- {}.", body.join(", ")),
        (true, _) => format!(":- {}.", body.join(", ")),
    }
}

pub fn program_text(config: Config, rules: &[RuleSpec]) -> String {
    rules.iter().map(|r| rule_text(config, r) + "\n").collect()
}

/// Bodies of at most two distinct elements with at most one negation.
fn bodies() -> Vec<Vec<(usize, bool)>> {
    let elements = [(0, false), (1, false), (0, true), (1, true)];
    let mut out = vec![vec![]];
    for &e in &elements {
        out.push(vec![e]);
    }
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            if elements[i].1 && elements[j].1 {
                continue;
            }
            out.push(vec![elements[i], elements[j]]);
        }
    }
    out
}

pub fn rule_specs() -> Vec<RuleSpec> {
    let heads = [
        HeadSpec::Basic(0),
        HeadSpec::Basic(1),
        HeadSpec::Choice(0),
        HeadSpec::Choice(1),
        HeadSpec::Constraint,
    ];
    let mut out = Vec::new();
    for head in heads {
        for body in bodies() {
            // `:-.` would only say that nothing is a model.
            if head == HeadSpec::Constraint && body.is_empty() {
                continue;
            }
            out.push(RuleSpec { head, body });
        }
    }
    out
}

/// Every program of at most three distinct rules, for every configuration.
pub fn corpus() -> Vec<CorpusProgram> {
    let specs = rule_specs();
    let n = specs.len();
    let mut selections: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..n {
        selections.push(vec![a]);
        for b in a + 1..n {
            selections.push(vec![a, b]);
            for c in b + 1..n {
                selections.push(vec![a, b, c]);
            }
        }
    }
    let mut out = Vec::with_capacity(selections.len() * CONFIGS.len());
    for config in CONFIGS {
        for sel in &selections {
            let rules: Vec<RuleSpec> = sel.iter().map(|&k| specs[k].clone()).collect();
            let program = parse_program(&program_text(config, &rules)).expect("corpus programs parse");
            out.push(CorpusProgram {
                config,
                rules,
                program,
            });
        }
    }
    out
}

pub fn domain() -> Domain {
    Domain::integers(DOMAIN[0]..=DOMAIN[1])
}

pub fn ground_atoms(config: Config, p: usize) -> Vec<GroundAtom> {
    if config.unary[p] {
        DOMAIN
            .iter()
            .map(|&n| GroundAtom::new(PREDICATES[p], vec![PrecomputedTerm::Numeral(n)]))
            .collect()
    } else {
        vec![GroundAtom::new(PREDICATES[p], vec![])]
    }
}

pub fn all_atoms(config: Config) -> Vec<GroundAtom> {
    (0..2).flat_map(|p| ground_atoms(config, p)).collect()
}

pub fn subsets(atoms: &[GroundAtom]) -> Vec<Interpretation> {
    (0u32..1 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

pub fn interpretations(config: Config) -> Vec<Interpretation> {
    subsets(&all_atoms(config))
}

/// Ground atoms of the predicates that occur in the program.
pub fn program_atoms(cp: &CorpusProgram) -> Vec<GroundAtom> {
    let used: BTreeSet<String> = cp.program.predicates().into_iter().map(|p| p.name).collect();
    (0..2)
        .filter(|&p| used.contains(PREDICATES[p]))
        .flat_map(|p| ground_atoms(cp.config, p))
        .collect()
}

pub fn program_interpretations(cp: &CorpusProgram) -> Vec<Interpretation> {
    subsets(&program_atoms(cp))
}

/// Every strict partial order on `atoms`, as lists of pairs `(a, b)` with
/// `a` before `b`.
pub fn strict_orders(atoms: &[GroundAtom]) -> Vec<Vec<(GroundAtom, GroundAtom)>> {
    let n = atoms.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let rel = |a: usize, b: usize| {
            pairs
                .iter()
                .position(|&pair| pair == (a, b))
                .is_some_and(|k| mask & (1 << k) != 0)
        };
        let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(rel(a, b) && rel(b, c)) || rel(a, c))));
        let irreflexive = (0..n).all(|a| (0..n).all(|b| !(rel(a, b) && rel(b, a))));
        if transitive && irreflexive {
            out.push(
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &(a, b))| (atoms[a].clone(), atoms[b].clone()))
                    .collect(),
            );
        }
    }
    out
}

/// The order atom `less_p_q(a.., b..)` saying that `a` precedes `b`.
pub fn order_fact(a: &GroundAtom, b: &GroundAtom) -> GroundAtom {
    let mut args = a.args.clone();
    args.extend(b.args.iter().cloned());
    GroundAtom::new(&format!("less_{}_{}", a.predicate, b.predicate), args)
}

/// Propositional formulas for the independent oracle.
#[derive(Debug, Clone)]
enum Prop {
    Atom(GroundAtom),
    Bottom,
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn not(f: Prop) -> Prop {
        Prop::Implies(Box::new(f), Box::new(Prop::Bottom))
    }

    fn holds(&self, i: &Interpretation) -> bool {
        match self {
            Prop::Atom(a) => i.contains(a),
            Prop::Bottom => false,
            Prop::And(fs) => fs.iter().all(|f| f.holds(i)),
            Prop::Or(fs) => fs.iter().any(|f| f.holds(i)),
            Prop::Implies(a, b) => !a.holds(i) || b.holds(i),
        }
    }

    /// Replaces every maximal subformula false in `i` by falsity.
    fn reduct(&self, i: &Interpretation) -> Prop {
        if !self.holds(i) {
            return Prop::Bottom;
        }
        match self {
            Prop::Atom(_) | Prop::Bottom => self.clone(),
            Prop::And(fs) => Prop::And(fs.iter().map(|f| f.reduct(i)).collect()),
            Prop::Or(fs) => Prop::Or(fs.iter().map(|f| f.reduct(i)).collect()),
            Prop::Implies(a, b) => Prop::Implies(Box::new(a.reduct(i)), Box::new(b.reduct(i))),
        }
    }
}

/// The program as one propositional formula, grounded over the domain.
fn propositional(cp: &CorpusProgram) -> Prop {
    let config = cp.config;
    let uses_x = |r: &RuleSpec| {
        let head = match r.head {
            HeadSpec::Basic(p) | HeadSpec::Choice(p) => config.unary[p],
            HeadSpec::Constraint => false,
        };
        head || r.body.iter().any(|&(p, _)| config.unary[p])
    };
    let atom = |p: usize, x: i64| {
        let args = if config.unary[p] {
            vec![PrecomputedTerm::Numeral(x)]
        } else {
            vec![]
        };
        Prop::Atom(GroundAtom::new(PREDICATES[p], args))
    };
    let mut conjuncts = Vec::new();
    for r in &cp.rules {
        let values: &[i64] = if uses_x(r) { &DOMAIN } else { &DOMAIN[..1] };
        for &x in values {
            let body = Prop::And(
                r.body
                    .iter()
                    .map(|&(p, neg)| if neg { Prop::not(atom(p, x)) } else { atom(p, x) })
                    .collect(),
            );
            let head = match r.head {
                HeadSpec::Basic(p) => atom(p, x),
                HeadSpec::Choice(p) => Prop::Or(vec![atom(p, x), Prop::not(atom(p, x))]),
                HeadSpec::Constraint => Prop::Bottom,
            };
            conjuncts.push(Prop::Implies(Box::new(body), Box::new(head)));
        }
    }
    Prop::And(conjuncts)
}

/// `i` is stable when it satisfies the program and no proper subset of it
/// satisfies the reduct.
pub fn oracle_is_stable(cp: &CorpusProgram, i: &Interpretation) -> bool {
    let f = propositional(cp);
    if !f.holds(i) {
        return false;
    }
    let reduct = f.reduct(i);
    let atoms: Vec<GroundAtom> = i.iter().cloned().collect();
    subsets(&atoms).iter().all(|j| j.len() == i.len() || !reduct.holds(j))
}

/// `i` extended to the program signature, with integers 1 and 2.
pub fn standard(i: &Interpretation) -> FiniteStdInterp {
    extend_standard(i, &domain(), Some((DOMAIN[0], DOMAIN[1])), SignatureExt::Sigma0, Extras::None)
        .expect("plain extension")
}

pub fn holds(f: &Formula, m: &FiniteStdInterp) -> bool {
    evaluate(f, m).expect("corpus formulas evaluate")
}

pub fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}
