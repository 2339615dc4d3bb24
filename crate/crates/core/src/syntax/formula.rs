use super::lexer::{tokenize, Cursor, Mode, Token};
use super::{ParseError, PrecomputedTerm, Relation};
use crate::fol::{ArithOp, FoTerm, Formula, Sort, Variable};

const KEYWORDS: &[&str] = &["not", "and", "or", "forall", "exists"];

/// Parses `.`-terminated closed formulas.
pub fn parse_spec(text: &str) -> Result<Vec<Formula>, ParseError> {
    let mut cursor = Cursor::new(tokenize(text, Mode::Formula)?, text);
    let mut out = Vec::new();
    while !cursor.at_end() {
        let f = formula(&mut cursor)?;
        cursor.expect_punct(".")?;
        if let Some(v) = f.free_variables().into_iter().next() {
            return Err(ParseError::FreeVariable {
                variable: v.to_string(),
            });
        }
        out.push(f);
    }
    Ok(out)
}

/// Parses a single formula, optionally followed by `.`; free variables are
/// allowed.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cursor = Cursor::new(tokenize(text, Mode::Formula)?, text);
    let f = formula(&mut cursor)?;
    cursor.eat_punct(".");
    if !cursor.at_end() {
        return Err(cursor.error("expected end of formula"));
    }
    Ok(f)
}

fn formula(c: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = disjunction(c)?;
    if c.eat_punct("->") {
        return Ok(Formula::implies(lhs, formula(c)?));
    }
    if c.eat_punct("<->") {
        return Ok(Formula::iff(lhs, disjunction(c)?));
    }
    let mut lhs = lhs;
    while c.eat_punct("<-") {
        lhs = Formula::reverse_implies(lhs, disjunction(c)?);
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor) -> Result<Formula, ParseError> {
    let mut items = vec![conjunction(c)?];
    while c.is_name("or") {
        c.next();
        items.push(conjunction(c)?);
    }
    Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
}

fn conjunction(c: &mut Cursor) -> Result<Formula, ParseError> {
    let mut items = vec![prefix(c)?];
    while c.is_name("and") {
        c.next();
        items.push(prefix(c)?);
    }
    Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
}

fn prefix(c: &mut Cursor) -> Result<Formula, ParseError> {
    if c.is_name("not") {
        c.next();
        return Ok(Formula::not(prefix(c)?));
    }
    if c.is_name("forall") || c.is_name("exists") {
        let universal = c.is_name("forall");
        c.next();
        let mut vars = Vec::new();
        while let Some(Token::Variable { .. }) = c.peek() {
            vars.push(variable(c)?);
        }
        if vars.is_empty() {
            return Err(c.error("expected a variable"));
        }
        let body = Box::new(prefix(c)?);
        return Ok(if universal {
            Formula::Forall(vars, body)
        } else {
            Formula::Exists(vars, body)
        });
    }
    primary(c)
}

fn variable(c: &mut Cursor) -> Result<Variable, ParseError> {
    match c.next() {
        Some(Token::Variable { name, mark }) => {
            let sort = match mark.as_deref() {
                None | Some("$g") => Sort::General,
                _ => Sort::Integer,
            };
            Ok(Variable { name, sort })
        }
        _ => {
            c.position -= 1;
            Err(c.error("expected a variable"))
        }
    }
}

fn relation(c: &Cursor) -> Option<Relation> {
    match c.peek() {
        Some(Token::Punct(p)) => match *p {
            "=" => Some(Relation::Equal),
            "!=" => Some(Relation::NotEqual),
            "<" => Some(Relation::Less),
            "<=" => Some(Relation::LessEqual),
            ">" => Some(Relation::Greater),
            ">=" => Some(Relation::GreaterEqual),
            _ => None,
        },
        _ => None,
    }
}

fn comparison(c: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = term(c)?;
    let rel = relation(c).ok_or_else(|| c.error("expected a comparison operator"))?;
    c.next();
    let rhs = term(c)?;
    Ok(Formula::compare(rel, lhs, rhs))
}

fn primary(c: &mut Cursor) -> Result<Formula, ParseError> {
    match c.peek().cloned() {
        Some(Token::Special(s)) if s == "#true" => {
            c.next();
            Ok(Formula::Top)
        }
        Some(Token::Special(s)) if s == "#false" => {
            c.next();
            Ok(Formula::Bottom)
        }
        Some(Token::Punct("(")) => {
            let start = c.position;
            if let Ok(f) = comparison(c) {
                return Ok(f);
            }
            c.position = start;
            c.next();
            let f = formula(c)?;
            c.expect_punct(")")?;
            Ok(f)
        }
        Some(Token::Name(name)) if !KEYWORDS.contains(&name.as_str()) => {
            let start = c.position;
            c.next();
            let mut args = Vec::new();
            if c.eat_punct("(") {
                args.push(term(c)?);
                while c.eat_punct(",") {
                    args.push(term(c)?);
                }
                c.expect_punct(")")?;
            }
            if relation(c).is_some() || is_arith(c) {
                c.position = start;
                return comparison(c);
            }
            Ok(Formula::atom(&name, args))
        }
        Some(_) => comparison(c),
        None => Err(c.error("expected a formula")),
    }
}

fn is_arith(c: &Cursor) -> bool {
    matches!(c.peek(), Some(Token::Punct(p)) if ["+", "-", "*"].contains(p))
}

fn term(c: &mut Cursor) -> Result<FoTerm, ParseError> {
    let mut lhs = product(c)?;
    loop {
        let op = if c.eat_punct("+") {
            ArithOp::Add
        } else if c.eat_punct("-") {
            ArithOp::Subtract
        } else {
            return Ok(lhs);
        };
        lhs = FoTerm::arith(op, lhs, product(c)?);
    }
}

fn product(c: &mut Cursor) -> Result<FoTerm, ParseError> {
    let mut lhs = unary(c)?;
    while c.eat_punct("*") {
        lhs = FoTerm::arith(ArithOp::Multiply, lhs, unary(c)?);
    }
    if c.is_punct("/") || c.is_punct("\\") || c.is_punct("..") {
        return Err(c.error("division, modulo and intervals are not formula operations"));
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> Result<FoTerm, ParseError> {
    if c.eat_punct("-") {
        if let Some(Token::Integer(n)) = c.peek() {
            let n = *n;
            c.next();
            return Ok(FoTerm::numeral(-n));
        }
        return Ok(FoTerm::arith(ArithOp::Subtract, FoTerm::numeral(0), unary(c)?));
    }
    match c.peek().cloned() {
        Some(Token::Integer(n)) => {
            c.next();
            Ok(FoTerm::numeral(n))
        }
        Some(Token::Variable { .. }) => Ok(FoTerm::Var(variable(c)?)),
        Some(Token::Special(s)) if s == "#inf" || s == "#sup" => {
            c.next();
            Ok(FoTerm::Const(if s == "#inf" {
                PrecomputedTerm::Infimum
            } else {
                PrecomputedTerm::Supremum
            }))
        }
        Some(Token::Name(name)) if !KEYWORDS.contains(&name.as_str()) => {
            c.next();
            if let (Some(predicate), true) = (name.strip_prefix("lvl_"), c.is_punct("(")) {
                c.next();
                let mut args = vec![term(c)?];
                while c.eat_punct(",") {
                    args.push(term(c)?);
                }
                c.expect_punct(")")?;
                return Ok(FoTerm::Level {
                    predicate: predicate.to_string(),
                    args,
                });
            }
            Ok(FoTerm::Const(PrecomputedTerm::Symbol(name)))
        }
        Some(Token::Punct("|")) => {
            c.next();
            let inner = term(c)?;
            c.expect_punct("|")?;
            Ok(FoTerm::Abs(Box::new(inner)))
        }
        Some(Token::Punct("(")) => {
            c.next();
            let inner = term(c)?;
            c.expect_punct(")")?;
            Ok(inner)
        }
        _ => Err(c.error("expected a term")),
    }
}
