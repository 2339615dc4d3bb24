//! Mini-gringo programs: terms, rules, parsers and the total order on
//! precomputed terms.

mod formula;
mod lexer;
mod program;

use std::fmt;

use thiserror::Error;

pub use formula::{parse_formula, parse_spec};
pub use program::parse_program;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown operator `{operator}`")]
    UnknownOperator {
        line: usize,
        column: usize,
        operator: String,
    },
    #[error("{line}:{column}: integer literal `{literal}` does not fit in 64 bits")]
    IntegerOverflow {
        line: usize,
        column: usize,
        literal: String,
    },
    #[error("predicate `{predicate}` is used with arities {first} and {second}")]
    ArityConflict {
        predicate: String,
        first: usize,
        second: usize,
    },
    #[error("variable `{variable}` is not bound by any quantifier")]
    FreeVariable { variable: String },
}

/// A ground term without operations.
///
/// The derived order is the total order used for comparisons: the infimum,
/// then numerals by value, then symbolic constants by name, then the supremum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrecomputedTerm {
    Infimum,
    Numeral(i64),
    Symbol(String),
    Supremum,
}

pub fn precomputed_compare(a: &PrecomputedTerm, b: &PrecomputedTerm) -> std::cmp::Ordering {
    a.cmp(b)
}

impl PrecomputedTerm {
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            PrecomputedTerm::Numeral(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for PrecomputedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecomputedTerm::Infimum => write!(f, "#inf"),
            PrecomputedTerm::Numeral(n) => write!(f, "{n}"),
            PrecomputedTerm::Symbol(s) => write!(f, "{s}"),
            PrecomputedTerm::Supremum => write!(f, "#sup"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOperator {
    Add,
    Subtract,
    Multiply,
    Divide,
    Modulo,
    Interval,
}

impl fmt::Display for BinaryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbol = match self {
            BinaryOperator::Add => "+",
            BinaryOperator::Subtract => "-",
            BinaryOperator::Multiply => "*",
            BinaryOperator::Divide => "/",
            BinaryOperator::Modulo => "\\",
            BinaryOperator::Interval => "..",
        };
        f.write_str(symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProgramTerm {
    Precomputed(PrecomputedTerm),
    Variable(String),
    Absolute(Box<ProgramTerm>),
    Binary {
        op: BinaryOperator,
        lhs: Box<ProgramTerm>,
        rhs: Box<ProgramTerm>,
    },
}

impl ProgramTerm {
    pub fn numeral(n: i64) -> Self {
        ProgramTerm::Precomputed(PrecomputedTerm::Numeral(n))
    }

    pub fn symbol(name: &str) -> Self {
        ProgramTerm::Precomputed(PrecomputedTerm::Symbol(name.to_string()))
    }

    pub fn variable(name: &str) -> Self {
        ProgramTerm::Variable(name.to_string())
    }

    pub fn binary(op: BinaryOperator, lhs: ProgramTerm, rhs: ProgramTerm) -> Self {
        ProgramTerm::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            ProgramTerm::Precomputed(_) => true,
            ProgramTerm::Variable(_) => false,
            ProgramTerm::Absolute(t) => t.is_ground(),
            ProgramTerm::Binary { lhs, rhs, .. } => lhs.is_ground() && rhs.is_ground(),
        }
    }

    pub fn is_precomputed(&self) -> bool {
        matches!(self, ProgramTerm::Precomputed(_))
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            ProgramTerm::Precomputed(_) => {}
            ProgramTerm::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            ProgramTerm::Absolute(t) => t.collect_variables(out),
            ProgramTerm::Binary { lhs, rhs, .. } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
        }
    }

    pub fn collect_precomputed(&self, out: &mut Vec<PrecomputedTerm>) {
        match self {
            ProgramTerm::Precomputed(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            ProgramTerm::Variable(_) => {}
            ProgramTerm::Absolute(t) => t.collect_precomputed(out),
            ProgramTerm::Binary { lhs, rhs, .. } => {
                lhs.collect_precomputed(out);
                rhs.collect_precomputed(out);
            }
        }
    }

    /// Replaces variables by the terms the assignment gives them.
    pub fn substitute(&self, assignment: &dyn Fn(&str) -> Option<PrecomputedTerm>) -> ProgramTerm {
        match self {
            ProgramTerm::Precomputed(_) => self.clone(),
            ProgramTerm::Variable(v) => match assignment(v) {
                Some(c) => ProgramTerm::Precomputed(c),
                None => self.clone(),
            },
            ProgramTerm::Absolute(t) => ProgramTerm::Absolute(Box::new(t.substitute(assignment))),
            ProgramTerm::Binary { op, lhs, rhs } => ProgramTerm::binary(
                *op,
                lhs.substitute(assignment),
                rhs.substitute(assignment),
            ),
        }
    }
}

impl fmt::Display for ProgramTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramTerm::Precomputed(c) => write!(f, "{c}"),
            ProgramTerm::Variable(v) => write!(f, "{v}"),
            ProgramTerm::Absolute(t) => write!(f, "|{t}|"),
            ProgramTerm::Binary { op, lhs, rhs } => {
                let wrap = |t: &ProgramTerm, f: &mut fmt::Formatter<'_>| match t {
                    ProgramTerm::Binary { .. } => write!(f, "({t})"),
                    _ => write!(f, "{t}"),
                };
                wrap(lhs, f)?;
                match op {
                    BinaryOperator::Interval => write!(f, "..")?,
                    _ => write!(f, " {op} ")?,
                }
                wrap(rhs, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<ProgramTerm>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<ProgramTerm>) -> Self {
        Atom {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn predicate(&self) -> Predicate {
        Predicate {
            name: self.predicate.clone(),
            arity: self.args.len(),
        }
    }
}

fn write_application<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    args: &[T],
) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{arg}")?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_application(f, &self.predicate, &self.args)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    NoSign,
    Negation,
    DoubleNegation,
}

impl Sign {
    pub fn negation_count(self) -> usize {
        match self {
            Sign::NoSign => 0,
            Sign::Negation => 1,
            Sign::DoubleNegation => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub sign: Sign,
    pub atom: Atom,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::NoSign => write!(f, "{}", self.atom),
            Sign::Negation => write!(f, "not {}", self.atom),
            Sign::DoubleNegation => write!(f, "not not {}", self.atom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Equal,
    NotEqual,
    Less,
    LessEqual,
    Greater,
    GreaterEqual,
}

impl Relation {
    pub fn holds(self, ordering: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Relation::Equal => ordering == Equal,
            Relation::NotEqual => ordering != Equal,
            Relation::Less => ordering == Less,
            Relation::LessEqual => ordering != Greater,
            Relation::Greater => ordering == Greater,
            Relation::GreaterEqual => ordering != Less,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbol = match self {
            Relation::Equal => "=",
            Relation::NotEqual => "!=",
            Relation::Less => "<",
            Relation::LessEqual => "<=",
            Relation::Greater => ">",
            Relation::GreaterEqual => ">=",
        };
        f.write_str(symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparison {
    pub relation: Relation,
    pub lhs: ProgramTerm,
    pub rhs: ProgramTerm,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.relation, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyElement {
    Literal(Literal),
    Comparison(Comparison),
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Literal(l) => write!(f, "{l}"),
            BodyElement::Comparison(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Basic(Atom),
    Choice(Atom),
    Constraint,
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::Basic(a) | Head::Choice(a) => Some(a),
            Head::Constraint => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElement>,
}

impl Rule {
    /// The head atom; `None` stands for the falsity head of a constraint.
    pub fn head_atom(&self) -> Option<&Atom> {
        self.head.atom()
    }

    /// Atoms of the literals without negation, in body order.
    pub fn positive_body(&self) -> Vec<&Atom> {
        self.body
            .iter()
            .filter_map(|e| match e {
                BodyElement::Literal(Literal {
                    sign: Sign::NoSign,
                    atom,
                }) => Some(atom),
                _ => None,
            })
            .collect()
    }

    /// Variables in order of first occurrence, head first.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(atom) = self.head_atom() {
            for t in &atom.args {
                t.collect_variables(&mut out);
            }
        }
        for element in &self.body {
            match element {
                BodyElement::Literal(l) => {
                    for t in &l.atom.args {
                        t.collect_variables(&mut out);
                    }
                }
                BodyElement::Comparison(c) => {
                    c.lhs.collect_variables(&mut out);
                    c.rhs.collect_variables(&mut out);
                }
            }
        }
        out
    }

    fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head_atom().into_iter().chain(self.body.iter().filter_map(|e| match e {
            BodyElement::Literal(l) => Some(&l.atom),
            BodyElement::Comparison(_) => None,
        }))
    }

    fn terms(&self) -> Vec<&ProgramTerm> {
        let mut out: Vec<&ProgramTerm> = Vec::new();
        for atom in self.atoms() {
            out.extend(atom.args.iter());
        }
        for element in &self.body {
            if let BodyElement::Comparison(c) = element {
                out.push(&c.lhs);
                out.push(&c.rhs);
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Basic(a) => write!(f, "{a}")?,
            Head::Choice(a) => write!(f, "{{{a}}}")?,
            Head::Constraint => {}
        }
        if !self.body.is_empty() || matches!(self.head, Head::Constraint) {
            if matches!(self.head, Head::Constraint) {
                write!(f, ":-")?;
            } else {
                write!(f, " :-")?;
            }
            for (i, element) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, " {element}")?;
            }
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Result<Self, ParseError> {
        let program = Program { rules };
        program.check_arities()?;
        Ok(program)
    }

    pub fn check_arities(&self) -> Result<(), ParseError> {
        let mut seen: Vec<Predicate> = Vec::new();
        for atom in self.rules.iter().flat_map(|r| r.atoms()) {
            match seen.iter().find(|p| p.name == atom.predicate) {
                Some(p) if p.arity != atom.args.len() => {
                    return Err(ParseError::ArityConflict {
                        predicate: atom.predicate.clone(),
                        first: p.arity,
                        second: atom.args.len(),
                    })
                }
                Some(_) => {}
                None => seen.push(atom.predicate()),
            }
        }
        Ok(())
    }

    /// Every predicate occurring in the program, in order of first occurrence.
    pub fn predicates(&self) -> Vec<Predicate> {
        let mut out: Vec<Predicate> = Vec::new();
        for atom in self.rules.iter().flat_map(|r| r.atoms()) {
            let p = atom.predicate();
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Predicates occurring in some basic or choice head, in order of first
    /// occurrence.
    pub fn head_predicates(&self) -> Vec<Predicate> {
        let mut out: Vec<Predicate> = Vec::new();
        for atom in self.rules.iter().filter_map(|r| r.head_atom()) {
            let p = atom.predicate();
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Precomputed terms written anywhere in the program.
    pub fn constants(&self) -> Vec<PrecomputedTerm> {
        let mut out = Vec::new();
        for rule in &self.rules {
            for t in rule.terms() {
                t.collect_precomputed(&mut out);
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}
