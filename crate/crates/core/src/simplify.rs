//! Equivalence-preserving rewriting of formulas into compact forms.
//!
//! Rewrites are applied bottom-up until nothing changes:
//! truth-constant absorption, flattening of conjunctions and disjunctions,
//! `F <- G` turned into `G -> F`, optional removal of double negations,
//! dropping and merging of quantifiers, inlining of equations under `exists`
//! and in antecedents under `forall`, pulling `exists` out of conjunctions and
//! antecedents, and removal of conjuncts implied by a sibling.

use std::collections::{BTreeMap, BTreeSet};

use crate::fol::{fresh_name, FoTerm, Formula, Relation, Sort, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyOptions {
    /// Rewrite `not not F` to `F`.
    pub double_negation: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            double_negation: true,
        }
    }
}

pub fn simplify_formula(f: &Formula) -> Formula {
    simplify_with(f, SimplifyOptions::default())
}

pub fn simplify_with(f: &Formula, options: SimplifyOptions) -> Formula {
    let mut current = f.clone();
    loop {
        let next = pass(&current, options);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn pass(f: &Formula, o: SimplifyOptions) -> Formula {
    let f = match f {
        Formula::And(fs) => Formula::And(fs.iter().map(|g| pass(g, o)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| pass(g, o)).collect()),
        Formula::Implies(a, c) => Formula::implies(pass(a, o), pass(c, o)),
        Formula::ReverseImplies(c, a) => Formula::implies(pass(a, o), pass(c, o)),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(pass(g, o))),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(pass(g, o))),
        _ => return f.clone(),
    };
    match f {
        Formula::And(fs) => conjunction(fs),
        Formula::Or(fs) => disjunction(fs),
        Formula::Implies(a, c) => implication(*a, *c, o),
        Formula::Forall(vs, g) => universal(vs, *g),
        Formula::Exists(vs, g) => existential(vs, *g),
        other => other,
    }
}

fn conjuncts(f: Formula) -> Vec<Formula> {
    match f {
        Formula::And(fs) => fs,
        other => vec![other],
    }
}

fn conjunction(fs: Vec<Formula>) -> Formula {
    let mut items: Vec<Formula> = Vec::new();
    for f in fs.into_iter().flat_map(conjuncts) {
        match f {
            Formula::Top => {}
            Formula::Bottom => return Formula::Bottom,
            f if items.contains(&f) => {}
            f => items.push(f),
        }
    }
    let mut i = 0;
    while i < items.len() {
        let implied = (0..items.len()).any(|j| j != i && implies(&items[j], &items[i]));
        if implied {
            items.remove(i);
        } else {
            i += 1;
        }
    }
    if let Some(k) = items.iter().position(|f| matches!(f, Formula::Exists(..))) {
        let Formula::Exists(vs, body) = items.remove(k) else { unreachable!() };
        let others = Formula::conjoin(items.clone());
        let (vs, body) = avoid_capture(vs, *body, &others);
        items.insert(k, body);
        return Formula::Exists(vs, Box::new(Formula::conjoin(items)));
    }
    Formula::conjoin(items)
}

fn disjunction(fs: Vec<Formula>) -> Formula {
    let mut items: Vec<Formula> = Vec::new();
    for f in fs {
        let parts = match f {
            Formula::Or(gs) => gs,
            other => vec![other],
        };
        for g in parts {
            match g {
                Formula::Bottom => {}
                Formula::Top => return Formula::Top,
                g if items.contains(&g) => {}
                g => items.push(g),
            }
        }
    }
    Formula::disjoin(items)
}

fn implication(a: Formula, c: Formula, o: SimplifyOptions) -> Formula {
    match (a, c) {
        (Formula::Top, c) => c,
        (Formula::Bottom, _) | (_, Formula::Top) => Formula::Top,
        (Formula::Implies(inner, bottom), Formula::Bottom)
            if o.double_negation && *bottom == Formula::Bottom =>
        {
            *inner
        }
        (Formula::Exists(vs, body), c) => {
            let (vs, body) = avoid_capture(vs, *body, &c);
            Formula::Forall(vs, Box::new(Formula::implies(body, c)))
        }
        (a, c) => Formula::implies(a, c),
    }
}

/// Renames the variables of `vs` that occur free in `other`, so `body` can
/// be moved into a scope shared with `other`.
fn avoid_capture(vs: Vec<Variable>, body: Formula, other: &Formula) -> (Vec<Variable>, Formula) {
    let free = other.free_variables();
    let mut taken = other.variable_names();
    taken.extend(body.variable_names());
    taken.extend(vs.iter().map(|v| v.name.clone()));
    let mut body = body;
    let mut out = Vec::new();
    for v in vs {
        if free.contains(&v) {
            let renamed = Variable {
                name: fresh_name(&v.name, &taken),
                sort: v.sort,
            };
            taken.insert(renamed.name.clone());
            body = body.substitute(&v, &FoTerm::var(&renamed));
            out.push(renamed);
        } else {
            out.push(v);
        }
    }
    (out, body)
}

/// Variables of `vs` that occur free in `body`, innermost binding wins.
fn used(vs: Vec<Variable>, body: &Formula) -> Vec<Variable> {
    let free = body.free_variables();
    let mut out: Vec<Variable> = Vec::new();
    for v in vs.into_iter().rev() {
        if free.contains(&v) && !out.contains(&v) {
            out.push(v);
        }
    }
    out.reverse();
    out
}

fn merge(vs: Vec<Variable>, inner: Vec<Variable>) -> Vec<Variable> {
    let mut out: Vec<Variable> = vs.into_iter().filter(|v| !inner.contains(v)).collect();
    out.extend(inner);
    out
}

/// `v = t` with `v` in `vs`, `t` free of `v`, and `t` of a sort `v` can
/// take; the first such equation among `items`.
fn inlinable(
    vs: &[Variable],
    items: &[Formula],
    keep_constants: bool,
) -> Option<(usize, Variable, FoTerm)> {
    for (k, f) in items.iter().enumerate() {
        let Formula::Compare(Relation::Equal, l, r) = f else { continue };
        for (x, t) in [(l, r), (r, l)] {
            let FoTerm::Var(v) = x else { continue };
            if !vs.contains(v) || t.contains(v) {
                continue;
            }
            if keep_constants && matches!(t, FoTerm::Const(_)) {
                continue;
            }
            if v.sort == Sort::Integer && t.sort() != Sort::Integer {
                continue;
            }
            return Some((k, v.clone(), t.clone()));
        }
    }
    None
}

fn existential(vs: Vec<Variable>, body: Formula) -> Formula {
    let (vs, body) = match body {
        Formula::Exists(inner, b) => (merge(vs, inner), *b),
        other => (vs, other),
    };
    let vs = used(vs, &body);
    if vs.is_empty() {
        return body;
    }
    let mut items = conjuncts(body);
    if let Some((k, v, t)) = inlinable(&vs, &items, false) {
        items.remove(k);
        let body = Formula::conjoin(items).substitute(&v, &t);
        let rest: Vec<Variable> = vs.into_iter().filter(|w| *w != v).collect();
        return Formula::exists(rest, body);
    }
    Formula::Exists(vs, Box::new(Formula::conjoin(items)))
}

fn universal(vs: Vec<Variable>, body: Formula) -> Formula {
    let (vs, body) = match body {
        Formula::Forall(inner, b) => (merge(vs, inner), *b),
        other => (vs, other),
    };
    let vs = used(vs, &body);
    if vs.is_empty() {
        return body;
    }
    if let Formula::Implies(a, c) = &body {
        if **c != Formula::Bottom {
            let mut items = conjuncts((**a).clone());
            // Equalities with constants stay, so facts keep the shape `X = c -> p(X)`.
            if let Some((k, v, t)) = inlinable(&vs, &items, true) {
                items.remove(k);
                let body = Formula::implies(Formula::conjoin(items), (**c).clone()).substitute(&v, &t);
                let rest: Vec<Variable> = vs.into_iter().filter(|w| *w != v).collect();
                return Formula::forall(rest, body);
            }
        }
    }
    Formula::Forall(vs, Box::new(body))
}

fn split(f: &Formula) -> (&[Variable], Vec<&Formula>) {
    match f {
        Formula::Exists(vs, body) => match &**body {
            Formula::And(fs) => (vs, fs.iter().collect()),
            other => (vs, vec![other]),
        },
        Formula::And(fs) => (&[], fs.iter().collect()),
        other => (&[], vec![other]),
    }
}

/// Whether `y` implies `x` because, after instantiating the existential
/// variables of `x`, every conjunct of `x` is a conjunct of `y`.
fn implies(y: &Formula, x: &Formula) -> bool {
    let (xv, xs) = split(x);
    let (yv, ys) = split(y);
    let free = x.free_variables();
    if yv.iter().any(|v| free.contains(v)) {
        return false;
    }
    let mut binding = BTreeMap::new();
    cover(&xs, &ys, xv, &mut binding)
}

fn cover(
    xs: &[&Formula],
    ys: &[&Formula],
    pattern: &[Variable],
    binding: &mut BTreeMap<Variable, FoTerm>,
) -> bool {
    let Some((first, rest)) = xs.split_first() else { return true };
    for y in ys {
        let mut attempt = binding.clone();
        if match_formula(first, y, pattern, &mut attempt, &BTreeSet::new())
            && cover(rest, ys, pattern, &mut attempt)
        {
            *binding = attempt;
            return true;
        }
    }
    false
}

fn match_formula(
    p: &Formula,
    t: &Formula,
    pattern: &[Variable],
    b: &mut BTreeMap<Variable, FoTerm>,
    shadowed: &BTreeSet<Variable>,
) -> bool {
    match (p, t) {
        (Formula::Atom(a), Formula::Atom(c)) => {
            a.predicate == c.predicate
                && a.args.len() == c.args.len()
                && a.args.iter().zip(&c.args).all(|(x, y)| match_term(x, y, pattern, b, shadowed))
        }
        (Formula::Compare(r1, l1, r1t), Formula::Compare(r2, l2, r2t)) => {
            r1 == r2
                && match_term(l1, l2, pattern, b, shadowed)
                && match_term(r1t, r2t, pattern, b, shadowed)
        }
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys)) => {
            xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| match_formula(x, y, pattern, b, shadowed))
        }
        (Formula::Implies(a1, c1), Formula::Implies(a2, c2))
        | (Formula::ReverseImplies(c1, a1), Formula::ReverseImplies(c2, a2)) => {
            match_formula(a1, a2, pattern, b, shadowed) && match_formula(c1, c2, pattern, b, shadowed)
        }
        (Formula::Forall(v1, g1), Formula::Forall(v2, g2))
        | (Formula::Exists(v1, g1), Formula::Exists(v2, g2)) => {
            if v1 != v2 || v1.iter().any(|v| pattern.contains(v)) {
                return false;
            }
            let mut inner = shadowed.clone();
            inner.extend(v1.iter().cloned());
            match_formula(g1, g2, pattern, b, &inner)
        }
        _ => false,
    }
}

fn match_term(
    p: &FoTerm,
    t: &FoTerm,
    pattern: &[Variable],
    b: &mut BTreeMap<Variable, FoTerm>,
    shadowed: &BTreeSet<Variable>,
) -> bool {
    match p {
        FoTerm::Var(v) if pattern.contains(v) => {
            if shadowed.iter().any(|s| t.contains(s)) {
                return false;
            }
            if let Some(bound) = b.get(v) {
                return bound == t;
            }
            if v.sort == Sort::Integer && t.sort() != Sort::Integer {
                return false;
            }
            b.insert(v.clone(), t.clone());
            true
        }
        FoTerm::Abs(x) => matches!(t, FoTerm::Abs(y) if match_term(x, y, pattern, b, shadowed)),
        FoTerm::Arith(op, x1, x2) => matches!(t, FoTerm::Arith(op2, y1, y2)
            if op == op2
                && match_term(x1, y1, pattern, b, shadowed)
                && match_term(x2, y2, pattern, b, shadowed)),
        FoTerm::Level { predicate, args } => matches!(t, FoTerm::Level { predicate: q, args: ys }
            if predicate == q
                && args.len() == ys.len()
                && args.iter().zip(ys).all(|(x, y)| match_term(x, y, pattern, b, shadowed))),
        _ => p == t,
    }
}
