use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::completion::NamedFormula;
use crate::fol::{ArithOp, FoTerm, Formula, Relation, Sort, Variable};
use crate::syntax::PrecomputedTerm;

const INJECTION: &str = "f__integer__";
const GENERAL_LESS: &str = "less__general";
const ABS: &str = "abs__";
const INFIMUM: &str = "c__inf";
const SUPREMUM: &str = "c__sup";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("`{0}` is used with two different arities")]
    ArityConflict(String),
    #[error("formula `{0}` has free variables")]
    FreeVariables(String),
    #[error("`{0}` is not a valid TPTP name")]
    BadName(String),
}

/// A typed first-order problem: declarations, axioms and conjectures, each
/// rendered as one `tff` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TptpProblem {
    pub declarations: Vec<String>,
    pub axioms: Vec<String>,
    pub conjectures: Vec<String>,
}

impl fmt::Display for TptpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.declarations.iter().chain(&self.axioms).chain(&self.conjectures) {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Vocabulary {
    predicates: BTreeMap<String, usize>,
    levels: BTreeMap<String, usize>,
    symbols: BTreeSet<String>,
    bounds: bool,
    abs: bool,
    general_order: bool,
}

impl Vocabulary {
    fn predicate(&mut self, name: &str, arity: usize, levels: bool) -> Result<(), EmitError> {
        let map = if levels { &mut self.levels } else { &mut self.predicates };
        match map.insert(name.to_string(), arity) {
            Some(old) if old != arity => Err(EmitError::ArityConflict(name.to_string())),
            _ => Ok(()),
        }
    }

    fn term(&mut self, t: &FoTerm) -> Result<(), EmitError> {
        match t {
            FoTerm::Var(_) | FoTerm::Const(PrecomputedTerm::Numeral(_)) => Ok(()),
            FoTerm::Const(PrecomputedTerm::Symbol(s)) => {
                self.symbols.insert(s.clone());
                Ok(())
            }
            FoTerm::Const(_) => {
                self.bounds = true;
                Ok(())
            }
            FoTerm::Abs(inner) => {
                self.abs = true;
                self.term(inner)
            }
            FoTerm::Arith(_, l, r) => {
                self.term(l)?;
                self.term(r)
            }
            FoTerm::Level { predicate, args } => {
                self.predicate(predicate, args.len(), true)?;
                args.iter().try_for_each(|a| self.term(a))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<(), EmitError> {
        match f {
            Formula::Atom(a) => {
                self.predicate(&a.predicate, a.args.len(), false)?;
                a.args.iter().try_for_each(|t| self.term(t))
            }
            Formula::Compare(rel, l, r) => {
                let mixed = l.sort() == Sort::General || r.sort() == Sort::General;
                if mixed && !matches!(rel, Relation::Equal | Relation::NotEqual) {
                    self.general_order = true;
                    self.bounds = true;
                }
                self.term(l)?;
                self.term(r)
            }
            Formula::Top | Formula::Bottom => Ok(()),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|g| self.formula(g)),
            Formula::Implies(a, b) | Formula::ReverseImplies(a, b) => {
                self.formula(a)?;
                self.formula(b)
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => self.formula(g),
        }
    }
}

struct Renderer {
    /// Symbols renamed because they clash with a predicate or function.
    renamed: BTreeMap<String, String>,
}

fn valid_lower(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn variable(v: &Variable) -> String {
    match v.sort {
        Sort::General => v.name.clone(),
        Sort::Integer => format!("{}__int", v.name),
    }
}

fn binder(v: &Variable) -> String {
    match v.sort {
        Sort::General => format!("{}: general", variable(v)),
        Sort::Integer => format!("{}: $int", variable(v)),
    }
}

impl Renderer {
    fn symbol(&self, c: &PrecomputedTerm) -> String {
        match c {
            PrecomputedTerm::Symbol(s) => self.renamed.get(s).cloned().unwrap_or_else(|| s.clone()),
            PrecomputedTerm::Infimum => INFIMUM.to_string(),
            PrecomputedTerm::Supremum => SUPREMUM.to_string(),
            PrecomputedTerm::Numeral(n) => format!("{INJECTION}({n})"),
        }
    }

    fn integer(&self, t: &FoTerm) -> String {
        match t {
            FoTerm::Var(v) => variable(v),
            FoTerm::Const(PrecomputedTerm::Numeral(n)) => n.to_string(),
            FoTerm::Const(c) => self.symbol(c),
            FoTerm::Abs(inner) => format!("{ABS}({})", self.integer(inner)),
            FoTerm::Arith(op, l, r) => {
                let f = match op {
                    ArithOp::Add => "$sum",
                    ArithOp::Subtract => "$difference",
                    ArithOp::Multiply => "$product",
                };
                format!("{f}({}, {})", self.integer(l), self.integer(r))
            }
            FoTerm::Level { predicate, args } => {
                let name = format!("lvl_{predicate}");
                if args.is_empty() {
                    name
                } else {
                    format!("{name}({})", self.arguments(args))
                }
            }
        }
    }

    fn general(&self, t: &FoTerm) -> String {
        match t {
            FoTerm::Var(v) if v.sort == Sort::General => variable(v),
            FoTerm::Const(c @ (PrecomputedTerm::Symbol(_) | PrecomputedTerm::Infimum | PrecomputedTerm::Supremum)) => {
                self.symbol(c)
            }
            _ => format!("{INJECTION}({})", self.integer(t)),
        }
    }

    fn arguments(&self, args: &[FoTerm]) -> String {
        args.iter().map(|a| self.general(a)).collect::<Vec<_>>().join(", ")
    }

    fn comparison(&self, rel: Relation, l: &FoTerm, r: &FoTerm) -> String {
        if l.sort() == Sort::Integer && r.sort() == Sort::Integer {
            let (a, b) = (self.integer(l), self.integer(r));
            return match rel {
                Relation::Equal => format!("{a} = {b}"),
                Relation::NotEqual => format!("{a} != {b}"),
                Relation::Less => format!("$less({a}, {b})"),
                Relation::LessEqual => format!("$lesseq({a}, {b})"),
                Relation::Greater => format!("$greater({a}, {b})"),
                Relation::GreaterEqual => format!("$greatereq({a}, {b})"),
            };
        }
        let (a, b) = (self.general(l), self.general(r));
        match rel {
            Relation::Equal => format!("{a} = {b}"),
            Relation::NotEqual => format!("{a} != {b}"),
            Relation::Less => format!("{GENERAL_LESS}({a}, {b})"),
            Relation::Greater => format!("{GENERAL_LESS}({b}, {a})"),
            Relation::LessEqual => format!("({GENERAL_LESS}({a}, {b}) | {a} = {b})"),
            Relation::GreaterEqual => format!("({GENERAL_LESS}({b}, {a}) | {a} = {b})"),
        }
    }

    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::Atom(a) if a.args.is_empty() => a.predicate.clone(),
            Formula::Atom(a) => format!("{}({})", a.predicate, self.arguments(&a.args)),
            Formula::Compare(rel, l, r) => self.comparison(*rel, l, r),
            Formula::Top => "$true".into(),
            Formula::Bottom => "$false".into(),
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
                if matches!(f, Formula::And(_)) { "$true" } else { "$false" }.into()
            }
            Formula::And(fs) => self.joined(fs, " & "),
            Formula::Or(fs) => self.joined(fs, " | "),
            _ if f.negated().is_some() => format!("~({})", self.formula(f.negated().unwrap())),
            Formula::Implies(a, c) => format!("({} => {})", self.formula(a), self.formula(c)),
            Formula::ReverseImplies(c, a) => format!("({} <= {})", self.formula(c), self.formula(a)),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let q = if matches!(f, Formula::Forall(..)) { '!' } else { '?' };
                let vars: Vec<String> = vs.iter().map(binder).collect();
                format!("({q}[{}]: {})", vars.join(", "), self.formula(g))
            }
        }
    }

    fn joined(&self, fs: &[Formula], sep: &str) -> String {
        let parts: Vec<String> = fs.iter().map(|g| self.formula(g)).collect();
        format!("({})", parts.join(sep))
    }
}

fn signature(arity: usize, result: &str) -> String {
    match arity {
        0 => result.to_string(),
        1 => format!("general > {result}"),
        n => format!("({}) > {result}", vec!["general"; n].join(" * ")),
    }
}

/// Encodes `axioms` and `conjectures` as one typed first-order problem.
///
/// General terms live in the sort `general`; integers are mapped into it by
/// an injective function, and distinct symbols are distinct elements
/// different from every integer. A total order on `general` extending the
/// integer order is added only when a comparison needs it.
pub fn emit_tptp(axioms: &[NamedFormula], conjectures: &[NamedFormula]) -> Result<TptpProblem, EmitError> {
    let mut vocab = Vocabulary::default();
    for n in axioms.iter().chain(conjectures) {
        if !n.formula.free_variables().is_empty() {
            return Err(EmitError::FreeVariables(n.formula.to_string()));
        }
        if !valid_lower(&n.name) {
            return Err(EmitError::BadName(n.name.clone()));
        }
        vocab.formula(&n.formula)?;
    }
    for name in vocab.predicates.keys().chain(vocab.symbols.iter()) {
        if !valid_lower(name) {
            return Err(EmitError::BadName(name.clone()));
        }
    }

    let mut reserved: BTreeSet<String> = vocab.predicates.keys().cloned().collect();
    reserved.extend(vocab.levels.keys().map(|p| format!("lvl_{p}")));
    reserved.extend([INJECTION, GENERAL_LESS, ABS, INFIMUM, SUPREMUM, "general"].map(String::from));
    let mut renamed = BTreeMap::new();
    for s in &vocab.symbols {
        if reserved.contains(s) {
            renamed.insert(s.clone(), format!("{s}__c"));
        }
    }
    let r = Renderer { renamed };

    let mut decl = vec![
        "tff(general_type, type, general: $tType).".to_string(),
        format!("tff(integer_injection_type, type, {INJECTION}: $int > general)."),
    ];
    let mut constants: Vec<String> = vocab
        .symbols
        .iter()
        .map(|s| r.symbol(&PrecomputedTerm::Symbol(s.clone())))
        .collect();
    if vocab.bounds {
        constants.insert(0, INFIMUM.to_string());
        constants.push(SUPREMUM.to_string());
    }
    for c in &constants {
        decl.push(format!("tff({c}_type, type, {c}: general)."));
    }
    for (p, arity) in &vocab.predicates {
        decl.push(format!("tff(predicate_{p}_type, type, {p}: {}).", signature(*arity, "$o")));
    }
    for (p, arity) in &vocab.levels {
        decl.push(format!("tff(level_{p}_type, type, lvl_{p}: {}).", signature(*arity, "$int")));
    }
    if vocab.abs {
        decl.push(format!("tff(abs_type, type, {ABS}: $int > $int)."));
    }
    if vocab.general_order {
        decl.push(format!("tff(general_order_type, type, {GENERAL_LESS}: (general * general) > $o)."));
    }

    let mut background = vec![format!(
        "tff(integer_injection, axiom, ![X: $int, Y: $int]: ({INJECTION}(X) = {INJECTION}(Y) => X = Y))."
    )];
    for (i, a) in constants.iter().enumerate() {
        background.push(format!(
            "tff(not_integer_{a}, axiom, ![X: $int]: {a} != {INJECTION}(X))."
        ));
        for b in &constants[i + 1..] {
            background.push(format!("tff(distinct_{a}_{b}, axiom, {a} != {b})."));
        }
    }
    if vocab.abs {
        background.push(format!(
            "tff(abs_nonnegative, axiom, ![X: $int]: ($greatereq(X, 0) => {ABS}(X) = X))."
        ));
        background.push(format!(
            "tff(abs_negative, axiom, ![X: $int]: ($less(X, 0) => {ABS}(X) = $uminus(X)))."
        ));
    }
    if vocab.general_order {
        let l = GENERAL_LESS;
        background.extend([
            format!("tff(general_order_irreflexive, axiom, ![X: general]: ~{l}(X, X))."),
            format!(
                "tff(general_order_transitive, axiom, ![X: general, Y: general, Z: general]: \
                 (({l}(X, Y) & {l}(Y, Z)) => {l}(X, Z)))."
            ),
            format!(
                "tff(general_order_total, axiom, ![X: general, Y: general]: \
                 ({l}(X, Y) | X = Y | {l}(Y, X)))."
            ),
            format!(
                "tff(general_order_integers, axiom, ![X: $int, Y: $int]: \
                 ({l}({INJECTION}(X), {INJECTION}(Y)) <=> $less(X, Y)))."
            ),
            format!("tff(general_order_infimum, axiom, ![X: general]: (X = {INFIMUM} | {l}({INFIMUM}, X)))."),
            format!("tff(general_order_supremum, axiom, ![X: general]: (X = {SUPREMUM} | {l}(X, {SUPREMUM})))."),
        ]);
        let symbols: Vec<String> = constants[1..constants.len() - 1].to_vec();
        if let Some(first) = symbols.first() {
            background.push(format!(
                "tff(general_order_integers_first, axiom, ![X: $int]: {l}({INJECTION}(X), {first}))."
            ));
        }
        for pair in symbols.windows(2) {
            background.push(format!(
                "tff(general_order_{}_{}, axiom, {l}({}, {})).",
                pair[0], pair[1], pair[0], pair[1]
            ));
        }
    }

    let line = |n: &NamedFormula, role: &str| format!("tff({}, {role}, {}).", n.name, r.formula(&n.formula));
    Ok(TptpProblem {
        declarations: decl,
        axioms: background
            .into_iter()
            .chain(axioms.iter().map(|n| line(n, "axiom")))
            .collect(),
        conjectures: conjectures.iter().map(|n| line(n, "conjecture")).collect(),
    })
}
