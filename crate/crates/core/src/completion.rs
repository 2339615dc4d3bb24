//! Clark completion: per-predicate rule and definition formulas, the
//! constraint formula, named theory bundles, and the tightness check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::fol::{FoTerm, Formula, Sort, Variable};
use crate::syntax::{Predicate, Program, Rule};
use crate::tau_star::{form, tau_b, FreshVarSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("`{0}` is neither `F -> p(V1, ..., Vn)` with distinct variables nor `F -> #false`")]
    NotRuleShaped(String),
    #[error("predicate `{name}` is used with arities {first} and {second}")]
    ArityConflict {
        name: String,
        first: usize,
        second: usize,
    },
}

/// Where a formula belongs in a theory bundle; the order of the variants is
/// the order in which sections are listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Axioms,
    Constraints,
    Rules,
    Definitions,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Axioms => "axioms",
            Section::Constraints => "constraints",
            Section::Rules => "rules",
            Section::Definitions => "definitions",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: String,
    pub section: Section,
    pub formula: Formula,
}

/// A theory whose conjuncts keep their names and sections.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheoryBundle {
    pub formulas: Vec<NamedFormula>,
}

impl TheoryBundle {
    pub fn push(&mut self, name: impl Into<String>, section: Section, formula: Formula) {
        self.formulas.push(NamedFormula {
            name: name.into(),
            section,
            formula,
        });
    }

    /// Formulas in section order, keeping the order within each section.
    pub fn ordered(&self) -> Vec<&NamedFormula> {
        let mut out: Vec<&NamedFormula> = self.formulas.iter().collect();
        out.sort_by_key(|f| f.section);
        out
    }

    pub fn section(&self, section: Section) -> impl Iterator<Item = &NamedFormula> {
        self.formulas.iter().filter(move |f| f.section == section)
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.formulas.iter().find(|f| f.name == name).map(|f| &f.formula)
    }

    pub fn conjunction(&self) -> Formula {
        Formula::conjoin(self.ordered().into_iter().map(|f| f.formula.clone()).collect())
    }

    pub fn map(&self, mut f: impl FnMut(&Formula) -> Formula) -> TheoryBundle {
        TheoryBundle {
            formulas: self
                .formulas
                .iter()
                .map(|n| NamedFormula {
                    name: n.name.clone(),
                    section: n.section,
                    formula: f(&n.formula),
                })
                .collect(),
        }
    }

    pub fn extend(&mut self, other: TheoryBundle) {
        self.formulas.extend(other.formulas);
    }
}

/// One defining rule of a predicate, with its antecedent written over the
/// predicate's shared head variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleShape {
    pub form: Formula,
    /// Candidates for the existential prefix, in binding order.
    pub bound: Vec<Variable>,
    pub rule: Option<Rule>,
}

impl RuleShape {
    /// `exists y (F)` over the free variables of `F` other than `head`.
    pub fn closed(&self, head: &[Variable], form: &Formula) -> Formula {
        let free = form.free_variables();
        let mut ys: Vec<Variable> = self
            .bound
            .iter()
            .filter(|v| free.contains(v) && !head.contains(v))
            .cloned()
            .collect();
        for v in &free {
            if !head.contains(v) && !ys.contains(v) {
                ys.push(v.clone());
            }
        }
        Formula::exists(ys, form.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub predicate: Predicate,
    pub head: Vec<Variable>,
    pub rules: Vec<RuleShape>,
}

impl Definition {
    pub fn head_atom(&self) -> Formula {
        Formula::atom(
            &self.predicate.name,
            self.head.iter().map(FoTerm::var).collect(),
        )
    }

    fn rules_formula(&self) -> Formula {
        let body = Formula::disjoin(self.rules.iter().map(|r| r.closed(&self.head, &r.form)).collect());
        Formula::forall(self.head.clone(), Formula::reverse_implies(self.head_atom(), body))
    }

    fn definition_formula(&self) -> Formula {
        let body = Formula::disjoin(self.rules.iter().map(|r| r.closed(&self.head, &r.form)).collect());
        Formula::forall(self.head.clone(), Formula::implies(self.head_atom(), body))
    }
}

/// Rules grouped by head predicate, plus the constraint sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shapes {
    pub definitions: Vec<Definition>,
    pub constraints: Vec<Formula>,
}

fn head_variables(names: &BTreeSet<String>, arity: usize) -> Vec<Variable> {
    FreshVarSource::new(names.iter().cloned()).numbered("V", arity)
}

fn ordered_predicates(program: &Program, complete_undefined: bool) -> Vec<Predicate> {
    let mut out = program.head_predicates();
    if complete_undefined {
        for p in program.predicates() {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Groups the rules of `program` by head predicate. Predicates without
/// rules are included (with no rules) when `complete_undefined` is set.
pub fn program_shapes(program: &Program, complete_undefined: bool) -> Shapes {
    let mut definitions = Vec::new();
    for p in ordered_predicates(program, complete_undefined) {
        let rules: Vec<&Rule> = program
            .rules
            .iter()
            .filter(|r| r.head_atom().map(|a| a.predicate()) == Some(p.clone()))
            .collect();
        let names: BTreeSet<String> = rules.iter().flat_map(|r| r.variables()).collect();
        let head = head_variables(&names, p.arity);
        let rules = rules
            .into_iter()
            .map(|r| {
                let mut src = FreshVarSource::for_rule(r);
                head.iter().for_each(|v| src.reserve(&v.name));
                RuleShape {
                    form: form(r, &head, &mut src).expect("defining rules have heads"),
                    bound: r.variables().iter().map(|n| Variable::general(n)).collect(),
                    rule: Some(r.clone()),
                }
            })
            .collect();
        definitions.push(Definition {
            predicate: p,
            head,
            rules,
        });
    }
    let constraints = program
        .rules
        .iter()
        .filter(|r| r.head_atom().is_none())
        .map(constraint_formula)
        .collect();
    Shapes {
        definitions,
        constraints,
    }
}

/// The sentence `forall y not B` for a constraint `:- B`.
pub fn constraint_formula(rule: &Rule) -> Formula {
    let mut src = FreshVarSource::for_rule(rule);
    let body = Formula::conjoin(rule.body.iter().map(|e| tau_b(e, &mut src)).collect());
    let vars: Vec<Variable> = rule.variables().iter().map(|n| Variable::general(n)).collect();
    Formula::forall(vars, Formula::not(body))
}

/// Reads sentences of the shape produced by the rule translation back into
/// rule shapes: `forall ... (F -> p(V1, ..., Vn))` or `forall ... not F`.
pub fn theory_shapes(theory: &[Formula], complete_undefined: bool) -> Result<Shapes, ShapeError> {
    struct Raw {
        predicate: Predicate,
        head: Vec<Variable>,
        form: Formula,
        bound: Vec<Variable>,
    }
    let mut raws = Vec::new();
    let mut constraints = Vec::new();
    for sentence in theory {
        let (prefix, matrix) = match sentence {
            Formula::Forall(vs, body) => (vs.clone(), (**body).clone()),
            other => (Vec::new(), other.clone()),
        };
        let (antecedent, consequent) = match &matrix {
            Formula::Implies(a, c) => ((**a).clone(), (**c).clone()),
            Formula::ReverseImplies(c, a) => ((**a).clone(), (**c).clone()),
            _ => return Err(ShapeError::NotRuleShaped(sentence.to_string())),
        };
        match consequent {
            Formula::Bottom => constraints.push(sentence.clone()),
            Formula::Atom(atom) => {
                let mut head = Vec::new();
                for t in &atom.args {
                    match t {
                        FoTerm::Var(v) if v.sort == Sort::General && !head.contains(v) => {
                            head.push(v.clone())
                        }
                        _ => return Err(ShapeError::NotRuleShaped(sentence.to_string())),
                    }
                }
                if !matrix.free_variables().iter().all(|v| prefix.contains(v)) {
                    return Err(ShapeError::NotRuleShaped(sentence.to_string()));
                }
                raws.push(Raw {
                    predicate: Predicate {
                        name: atom.predicate.clone(),
                        arity: head.len(),
                    },
                    head,
                    form: antecedent,
                    bound: prefix,
                });
            }
            _ => return Err(ShapeError::NotRuleShaped(sentence.to_string())),
        }
    }

    let mut order: Vec<Predicate> = Vec::new();
    for r in &raws {
        if !order.contains(&r.predicate) {
            order.push(r.predicate.clone());
        }
    }
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    let mut mentioned: Vec<Predicate> = order.clone();
    for f in theory {
        for p in ordered_atoms(f) {
            if !mentioned.contains(&p) {
                mentioned.push(p);
            }
        }
    }
    for p in &mentioned {
        if let Some(&a) = arities.get(&p.name) {
            if a != p.arity {
                return Err(ShapeError::ArityConflict {
                    name: p.name.clone(),
                    first: a,
                    second: p.arity,
                });
            }
        }
        arities.insert(p.name.clone(), p.arity);
    }
    if complete_undefined {
        order = mentioned;
    }

    let mut definitions = Vec::new();
    for p in order {
        let group: Vec<&Raw> = raws.iter().filter(|r| r.predicate == p).collect();
        let mut avoid = BTreeSet::new();
        for r in &group {
            let own: BTreeSet<&str> = r.head.iter().map(|v| v.name.as_str()).collect();
            let mut names = r.form.variable_names();
            names.extend(r.bound.iter().map(|v| v.name.clone()));
            avoid.extend(names.into_iter().filter(|n| !own.contains(n.as_str())));
        }
        let head = head_variables(&avoid, p.arity);
        let rules = group
            .into_iter()
            .map(|r| {
                let mut f = r.form.clone();
                let temps: Vec<Variable> = (0..r.head.len())
                    .map(|i| Variable::general(&format!("__head{i}")))
                    .collect();
                for (h, t) in r.head.iter().zip(&temps) {
                    f = f.substitute(h, &FoTerm::var(t));
                }
                for (t, x) in temps.iter().zip(&head) {
                    f = f.substitute(t, &FoTerm::var(x));
                }
                RuleShape {
                    form: f,
                    bound: r.bound.iter().filter(|v| !r.head.contains(v)).cloned().collect(),
                    rule: None,
                }
            })
            .collect();
        definitions.push(Definition {
            predicate: p,
            head,
            rules,
        });
    }
    Ok(Shapes {
        definitions,
        constraints,
    })
}

/// Predicates of the atoms in `f`, in order of occurrence.
fn ordered_atoms(f: &Formula) -> Vec<Predicate> {
    let mut out = Vec::new();
    f.visit(&mut |g| {
        if let Formula::Atom(a) = g {
            let p = Predicate {
                name: a.predicate.clone(),
                arity: a.args.len(),
            };
            if !out.contains(&p) {
                out.push(p);
            }
        }
    });
    out
}

/// The completion split into its named parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionParts {
    /// `(p, rules formula, definition formula)` per predicate.
    pub predicates: Vec<(Predicate, Formula, Formula)>,
    pub constraints: Vec<Formula>,
}

impl CompletionParts {
    pub fn from_shapes(shapes: &Shapes) -> Self {
        CompletionParts {
            predicates: shapes
                .definitions
                .iter()
                .map(|d| (d.predicate.clone(), d.rules_formula(), d.definition_formula()))
                .collect(),
            constraints: shapes.constraints.clone(),
        }
    }

    pub fn comp_rules(&self, p: &Predicate) -> Option<&Formula> {
        self.predicates.iter().find(|(q, ..)| q == p).map(|(_, r, _)| r)
    }

    pub fn comp_def(&self, p: &Predicate) -> Option<&Formula> {
        self.predicates.iter().find(|(q, ..)| q == p).map(|(.., d)| d)
    }

    /// The conjunction of the constraint sentences; `#true` if there are none.
    pub fn cons(&self) -> Formula {
        Formula::conjoin(self.constraints.clone())
    }

    pub fn bundle(&self) -> TheoryBundle {
        let mut bundle = TheoryBundle::default();
        for (i, c) in self.constraints.iter().enumerate() {
            bundle.push(format!("constraint_{i}"), Section::Constraints, c.clone());
        }
        for (p, r, _) in &self.predicates {
            bundle.push(format!("rules_{}_{}", p.name, p.arity), Section::Rules, r.clone());
        }
        for (p, _, d) in &self.predicates {
            bundle.push(format!("definition_{}_{}", p.name, p.arity), Section::Definitions, d.clone());
        }
        bundle
    }

    pub fn completion(&self) -> Formula {
        self.bundle().conjunction()
    }
}

pub fn completion_parts(program: &Program, complete_undefined: bool) -> CompletionParts {
    CompletionParts::from_shapes(&program_shapes(program, complete_undefined))
}

/// The completion with every predicate of the program completed.
pub fn completion(program: &Program) -> Formula {
    completion_parts(program, true).completion()
}

/// Edge `p -> q` when `q` occurs in a positive body literal of a rule whose
/// head predicate is `p`.
pub fn dependency_graph(program: &Program) -> DiGraph<Predicate, ()> {
    let mut graph = DiGraph::new();
    let mut index = BTreeMap::new();
    for p in program.predicates() {
        index.insert(p.clone(), graph.add_node(p));
    }
    for rule in &program.rules {
        if let Some(head) = rule.head_atom() {
            for atom in rule.positive_body() {
                graph.update_edge(index[&head.predicate()], index[&atom.predicate()], ());
            }
        }
    }
    graph
}

pub fn is_tight(program: &Program) -> bool {
    !is_cyclic_directed(&dependency_graph(program))
}
