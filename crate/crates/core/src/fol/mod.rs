//! Two-sorted first-order formulas, their listing syntax, and bounded
//! evaluation over finite standard interpretations.

mod eval;

use std::collections::BTreeSet;
use std::fmt;

pub use crate::syntax::Relation;
use crate::syntax::{PrecomputedTerm, Predicate};
pub use eval::{
    atoms_of, evaluate, evaluate_with_report, extend_standard, restrict, EvalError, Evaluation,
    Extras, FiniteStdInterp, SignatureExt,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    General,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn general(name: &str) -> Self {
        Variable {
            name: name.to_string(),
            sort: Sort::General,
        }
    }

    pub fn integer(name: &str) -> Self {
        Variable {
            name: name.to_string(),
            sort: Sort::Integer,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sort {
            Sort::General => write!(f, "{}", self.name),
            Sort::Integer => write!(f, "{}$i", self.name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Subtract,
    Multiply,
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "+",
            ArithOp::Subtract => "-",
            ArithOp::Multiply => "*",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoTerm {
    Var(Variable),
    Const(PrecomputedTerm),
    Abs(Box<FoTerm>),
    Arith(ArithOp, Box<FoTerm>, Box<FoTerm>),
    /// Integer-valued level of an atom, `lvl_p(args)`.
    Level { predicate: String, args: Vec<FoTerm> },
}

impl FoTerm {
    pub fn var(v: &Variable) -> Self {
        FoTerm::Var(v.clone())
    }

    pub fn numeral(n: i64) -> Self {
        FoTerm::Const(PrecomputedTerm::Numeral(n))
    }

    pub fn arith(op: ArithOp, lhs: FoTerm, rhs: FoTerm) -> Self {
        FoTerm::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn sort(&self) -> Sort {
        match self {
            FoTerm::Var(v) => v.sort,
            FoTerm::Const(PrecomputedTerm::Numeral(_)) => Sort::Integer,
            FoTerm::Const(_) => Sort::General,
            FoTerm::Abs(_) | FoTerm::Arith(..) | FoTerm::Level { .. } => Sort::Integer,
        }
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            FoTerm::Var(v) => {
                out.insert(v.clone());
            }
            FoTerm::Const(_) => {}
            FoTerm::Abs(t) => t.collect_variables(out),
            FoTerm::Arith(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            FoTerm::Level { args, .. } => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    pub fn contains(&self, v: &Variable) -> bool {
        match self {
            FoTerm::Var(w) => w == v,
            FoTerm::Const(_) => false,
            FoTerm::Abs(t) => t.contains(v),
            FoTerm::Arith(_, l, r) => l.contains(v) || r.contains(v),
            FoTerm::Level { args, .. } => args.iter().any(|a| a.contains(v)),
        }
    }

    pub fn substitute(&self, v: &Variable, replacement: &FoTerm) -> FoTerm {
        match self {
            FoTerm::Var(w) if w == v => replacement.clone(),
            FoTerm::Var(_) | FoTerm::Const(_) => self.clone(),
            FoTerm::Abs(t) => FoTerm::Abs(Box::new(t.substitute(v, replacement))),
            FoTerm::Arith(op, l, r) => {
                FoTerm::arith(*op, l.substitute(v, replacement), r.substitute(v, replacement))
            }
            FoTerm::Level { predicate, args } => FoTerm::Level {
                predicate: predicate.clone(),
                args: args.iter().map(|a| a.substitute(v, replacement)).collect(),
            },
        }
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTerm::Var(v) => write!(f, "{v}"),
            FoTerm::Const(c) => write!(f, "{c}"),
            FoTerm::Abs(t) => write!(f, "|{t}|"),
            FoTerm::Arith(op, l, r) => {
                let tight = |t: &FoTerm| match t {
                    FoTerm::Arith(inner, ..) => {
                        *op == ArithOp::Multiply && *inner != ArithOp::Multiply
                    }
                    _ => false,
                };
                if tight(l) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {op} ")?;
                // Arithmetic is left-associative, so a compound right operand
                // is parenthesized unless multiplication binds it anyway.
                match r.as_ref() {
                    FoTerm::Arith(inner, ..) if *op != ArithOp::Multiply && *inner == ArithOp::Multiply => {
                        write!(f, "{r}")
                    }
                    FoTerm::Arith(..) => write!(f, "({r})"),
                    FoTerm::Const(PrecomputedTerm::Numeral(n)) if *n < 0 => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            FoTerm::Level { predicate, args } => {
                write!(f, "lvl_{predicate}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FoAtom {
    pub predicate: String,
    pub args: Vec<FoTerm>,
}

impl FoAtom {
    pub fn new(predicate: &str, args: Vec<FoTerm>) -> Self {
        FoAtom {
            predicate: predicate.to_string(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(FoAtom),
    Compare(Relation, FoTerm, FoTerm),
    Top,
    Bottom,
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `consequent <- antecedent`; same meaning as `Implies` with the
    /// operands swapped, kept apart so listings print in rule order.
    ReverseImplies(Box<Formula>, Box<Formula>),
    Forall(Vec<Variable>, Box<Formula>),
    Exists(Vec<Variable>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: &str, args: Vec<FoTerm>) -> Self {
        Formula::Atom(FoAtom::new(predicate, args))
    }

    pub fn compare(relation: Relation, lhs: FoTerm, rhs: FoTerm) -> Self {
        Formula::Compare(relation, lhs, rhs)
    }

    pub fn equal(lhs: FoTerm, rhs: FoTerm) -> Self {
        Formula::Compare(Relation::Equal, lhs, rhs)
    }

    pub fn implies(antecedent: Formula, consequent: Formula) -> Self {
        Formula::Implies(Box::new(antecedent), Box::new(consequent))
    }

    pub fn reverse_implies(consequent: Formula, antecedent: Formula) -> Self {
        Formula::ReverseImplies(Box::new(consequent), Box::new(antecedent))
    }

    pub fn not(f: Formula) -> Self {
        Formula::implies(f, Formula::Bottom)
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(vec![
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::reverse_implies(lhs, rhs),
        ])
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn conjoin(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::Top,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// Disjunction that collapses the empty and singleton cases.
    pub fn disjoin(mut items: Vec<Formula>) -> Self {
        match items.len() {
            0 => Formula::Bottom,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    pub fn forall(vars: Vec<Variable>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<Variable>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// The operand of a negation `F -> #false`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(f, g) if **g == Formula::Bottom => Some(f),
            Formula::ReverseImplies(g, f) if **g == Formula::Bottom => Some(f),
            _ => None,
        }
    }

    pub fn free_variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
        let mut terms = BTreeSet::new();
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_variables(&mut terms)),
            Formula::Compare(_, l, r) => {
                l.collect_variables(&mut terms);
                r.collect_variables(&mut terms);
            }
            Formula::Top | Formula::Bottom => {}
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out));
            }
            Formula::Implies(l, r) | Formula::ReverseImplies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
        out.extend(terms.into_iter().filter(|v| !bound.contains(v)));
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut terms = BTreeSet::new();
            match f {
                Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_variables(&mut terms)),
                Formula::Compare(_, l, r) => {
                    l.collect_variables(&mut terms);
                    r.collect_variables(&mut terms);
                }
                Formula::Forall(vs, _) | Formula::Exists(vs, _) => terms.extend(vs.iter().cloned()),
                _ => {}
            }
            out.extend(terms.into_iter().map(|v| v.name));
        });
        out
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(l, r) | Formula::ReverseImplies(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.visit(f),
            _ => {}
        }
    }

    /// Predicate symbols applied in the formula, with their arities.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.insert(Predicate {
                    name: a.predicate.clone(),
                    arity: a.args.len(),
                });
            }
        });
        out
    }

    /// Number of formula nodes; terms are not counted.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Capture-avoiding substitution of a term for a free variable.
    pub fn substitute(&self, v: &Variable, replacement: &FoTerm) -> Formula {
        let mut avoid = BTreeSet::new();
        replacement.collect_variables(&mut avoid);
        self.substitute_avoiding(v, replacement, &avoid)
    }

    fn substitute_avoiding(
        &self,
        v: &Variable,
        replacement: &FoTerm,
        avoid: &BTreeSet<Variable>,
    ) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(FoAtom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(|t| t.substitute(v, replacement)).collect(),
            }),
            Formula::Compare(rel, l, r) => Formula::Compare(
                *rel,
                l.substitute(v, replacement),
                r.substitute(v, replacement),
            ),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::And(fs) => Formula::And(
                fs.iter()
                    .map(|f| f.substitute_avoiding(v, replacement, avoid))
                    .collect(),
            ),
            Formula::Or(fs) => Formula::Or(
                fs.iter()
                    .map(|f| f.substitute_avoiding(v, replacement, avoid))
                    .collect(),
            ),
            Formula::Implies(l, r) => Formula::implies(
                l.substitute_avoiding(v, replacement, avoid),
                r.substitute_avoiding(v, replacement, avoid),
            ),
            Formula::ReverseImplies(l, r) => Formula::reverse_implies(
                l.substitute_avoiding(v, replacement, avoid),
                r.substitute_avoiding(v, replacement, avoid),
            ),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                if vs.contains(v) || !body.free_variables().contains(v) {
                    return self.clone();
                }
                let mut vars = vs.clone();
                let mut body = (**body).clone();
                let mut taken = body.variable_names();
                taken.extend(avoid.iter().map(|w| w.name.clone()));
                taken.insert(v.name.clone());
                for var in vars.iter_mut() {
                    if avoid.iter().any(|w| w.name == var.name) {
                        let fresh = Variable {
                            name: fresh_name(&var.name, &taken),
                            sort: var.sort,
                        };
                        taken.insert(fresh.name.clone());
                        body = body.substitute(var, &FoTerm::Var(fresh.clone()));
                        *var = fresh;
                    }
                }
                let body = Box::new(body.substitute_avoiding(v, replacement, avoid));
                match self {
                    Formula::Forall(..) => Formula::Forall(vars, body),
                    _ => Formula::Exists(vars, body),
                }
            }
        }
    }
}

/// `base`, or `base` followed by the smallest number making it unused.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { base } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !taken.contains(n))
        .unwrap()
}

/// Renames bound variables to `_B1, _B2, ...` in order of binding so that
/// alpha-equivalent formulas become identical.
pub fn canonical(formula: &Formula) -> Formula {
    let mut counter = 0;
    canonical_with(formula, &mut counter)
}

fn canonical_with(formula: &Formula, counter: &mut usize) -> Formula {
    match formula {
        Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
            let mut body = (**body).clone();
            let mut renamed = Vec::new();
            for v in vs {
                *counter += 1;
                let fresh = Variable {
                    name: format!("_B{counter}"),
                    sort: v.sort,
                };
                body = body.substitute(v, &FoTerm::Var(fresh.clone()));
                renamed.push(fresh);
            }
            let body = Box::new(canonical_with(&body, counter));
            match formula {
                Formula::Forall(..) => Formula::Forall(renamed, body),
                _ => Formula::Exists(renamed, body),
            }
        }
        Formula::And(fs) => Formula::And(fs.iter().map(|f| canonical_with(f, counter)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| canonical_with(f, counter)).collect()),
        Formula::Implies(l, r) => {
            let l = canonical_with(l, counter);
            Formula::implies(l, canonical_with(r, counter))
        }
        Formula::ReverseImplies(l, r) => {
            let l = canonical_with(l, counter);
            Formula::reverse_implies(l, canonical_with(r, counter))
        }
        _ => formula.clone(),
    }
}

pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    canonical(a) == canonical(b)
}

#[derive(PartialEq, PartialOrd)]
enum Level {
    Arrow,
    Or,
    And,
    Prefix,
}

fn level(f: &Formula) -> Level {
    match f {
        Formula::Implies(..) | Formula::ReverseImplies(..) if f.negated().is_none() => Level::Arrow,
        Formula::Or(fs) | Formula::And(fs) if fs.len() == 1 => level(&fs[0]),
        Formula::Or(fs) if fs.len() > 1 => Level::Or,
        Formula::And(fs) if fs.len() > 1 => Level::And,
        _ => Level::Prefix,
    }
}

impl Formula {
    /// Writes `self` as an operand of a connective at `parent` level.
    /// Operands at the same level are parenthesized so the tree shape is
    /// visible, except for the unary prefix forms.
    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parent: Level) -> fmt::Result {
        let own = level(self);
        if own == Level::Prefix || own > parent {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(inner) = self.negated() {
            write!(f, "not ")?;
            return inner.fmt_operand(f, Level::And);
        }
        match self {
            Formula::Atom(a) => {
                write!(f, "{}", a.predicate)?;
                if !a.args.is_empty() {
                    write!(f, "(")?;
                    for (i, t) in a.args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{t}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Compare(rel, l, r) => write!(f, "{l} {rel} {r}"),
            Formula::Top => write!(f, "#true"),
            Formula::Bottom => write!(f, "#false"),
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
                write!(f, "{}", if matches!(self, Formula::And(_)) { "#true" } else { "#false" })
            }
            Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => write!(f, "{}", fs[0]),
            Formula::And(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " and ")?;
                    }
                    g.fmt_operand(f, Level::And)?;
                }
                Ok(())
            }
            Formula::Or(fs) => {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " or ")?;
                    }
                    g.fmt_operand(f, Level::Or)?;
                }
                Ok(())
            }
            Formula::Implies(l, r) => {
                l.fmt_operand(f, Level::Arrow)?;
                write!(f, " -> ")?;
                r.fmt_operand(f, Level::Arrow)
            }
            Formula::ReverseImplies(l, r) => {
                l.fmt_operand(f, Level::Arrow)?;
                write!(f, " <- ")?;
                r.fmt_operand(f, Level::Arrow)
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                write!(f, "{}", if matches!(self, Formula::Forall(..)) { "forall" } else { "exists" })?;
                for v in vs {
                    write!(f, " {v}")?;
                }
                if level(body) == Level::Prefix && !matches!(**body, Formula::Compare(..)) {
                    write!(f, " {body}")
                } else {
                    write!(f, " ({body})")
                }
            }
        }
    }
}
