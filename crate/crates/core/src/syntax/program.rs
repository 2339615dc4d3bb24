use super::lexer::{tokenize, Cursor, Mode, Token};
use super::{
    Atom, BinaryOperator, BodyElement, Comparison, Head, Literal, ParseError, PrecomputedTerm,
    Program, ProgramTerm, Relation, Rule, Sign,
};

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut cursor = Cursor::new(tokenize(text, Mode::Program)?, text);
    let mut rules = Vec::new();
    while !cursor.at_end() {
        rules.push(rule(&mut cursor)?);
    }
    Program::new(rules)
}

fn rule(c: &mut Cursor) -> Result<Rule, ParseError> {
    let head = if c.is_punct(":-") {
        Head::Constraint
    } else if c.eat_punct("{") {
        let a = atom(c)?;
        c.expect_punct("}")?;
        Head::Choice(a)
    } else {
        Head::Basic(atom(c)?)
    };
    let mut body = Vec::new();
    if c.eat_punct(":-") {
        if !c.is_punct(".") {
            body.push(body_element(c)?);
            while c.eat_punct(",") {
                body.push(body_element(c)?);
            }
        }
    } else if head == Head::Constraint {
        return Err(c.error("expected `:-`"));
    }
    c.expect_punct(".")?;
    Ok(Rule { head, body })
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

fn body_element(c: &mut Cursor) -> Result<BodyElement, ParseError> {
    if c.is_name("not") {
        c.next();
        let sign = if c.is_name("not") {
            c.next();
            Sign::DoubleNegation
        } else {
            Sign::Negation
        };
        return Ok(BodyElement::Literal(Literal { sign, atom: atom(c)? }));
    }

    // A lowercase name starts an atom unless a relation follows the term it
    // begins, as in `a < X`.
    let start = c.position;
    if matches!(c.peek(), Some(Token::Name(_))) {
        let a = atom(c)?;
        if relation(c).is_none() && !starts_operator(c) {
            return Ok(BodyElement::Literal(Literal {
                sign: Sign::NoSign,
                atom: a,
            }));
        }
        c.position = start;
    }

    let lhs = term(c)?;
    let rel = relation(c).ok_or_else(|| c.error("expected a comparison operator"))?;
    c.next();
    let rhs = term(c)?;
    Ok(BodyElement::Comparison(Comparison {
        relation: rel,
        lhs,
        rhs,
    }))
}

fn starts_operator(c: &Cursor) -> bool {
    matches!(c.peek(), Some(Token::Punct(p)) if ["+", "-", "*", "/", "\\", ".."].contains(p))
}

fn atom(c: &mut Cursor) -> Result<Atom, ParseError> {
    let name = match c.peek() {
        Some(Token::Name(n)) if n != "not" => n.clone(),
        _ => return Err(c.error("expected a predicate name")),
    };
    c.next();
    let mut args = Vec::new();
    if c.eat_punct("(") {
        args.push(term(c)?);
        while c.eat_punct(",") {
            args.push(term(c)?);
        }
        c.expect_punct(")")?;
    }
    Ok(Atom {
        predicate: name,
        args,
    })
}

/// Terms, loosest first: intervals, then `+ -`, then `* / \`, then unary minus.
pub(crate) fn term(c: &mut Cursor) -> Result<ProgramTerm, ParseError> {
    let lhs = additive(c)?;
    if c.eat_punct("..") {
        let rhs = additive(c)?;
        return Ok(ProgramTerm::binary(BinaryOperator::Interval, lhs, rhs));
    }
    Ok(lhs)
}

fn additive(c: &mut Cursor) -> Result<ProgramTerm, ParseError> {
    let mut lhs = multiplicative(c)?;
    loop {
        let op = if c.eat_punct("+") {
            BinaryOperator::Add
        } else if c.eat_punct("-") {
            BinaryOperator::Subtract
        } else {
            return Ok(lhs);
        };
        let rhs = multiplicative(c)?;
        lhs = ProgramTerm::binary(op, lhs, rhs);
    }
}

fn multiplicative(c: &mut Cursor) -> Result<ProgramTerm, ParseError> {
    let mut lhs = unary(c)?;
    loop {
        let op = if c.eat_punct("*") {
            BinaryOperator::Multiply
        } else if c.eat_punct("/") {
            BinaryOperator::Divide
        } else if c.eat_punct("\\") {
            BinaryOperator::Modulo
        } else {
            return Ok(lhs);
        };
        let rhs = unary(c)?;
        lhs = ProgramTerm::binary(op, lhs, rhs);
    }
}

fn unary(c: &mut Cursor) -> Result<ProgramTerm, ParseError> {
    if c.eat_punct("-") {
        // A minus sign directly before a literal is part of the numeral.
        if let Some(Token::Integer(n)) = c.peek() {
            let n = *n;
            c.next();
            return Ok(ProgramTerm::numeral(-n));
        }
        let operand = unary(c)?;
        return Ok(ProgramTerm::binary(
            BinaryOperator::Subtract,
            ProgramTerm::numeral(0),
            operand,
        ));
    }
    primary(c)
}

fn primary(c: &mut Cursor) -> Result<ProgramTerm, ParseError> {
    match c.peek().cloned() {
        Some(Token::Integer(n)) => {
            c.next();
            Ok(ProgramTerm::numeral(n))
        }
        Some(Token::Name(n)) if n != "not" => {
            c.next();
            Ok(ProgramTerm::Precomputed(PrecomputedTerm::Symbol(n)))
        }
        Some(Token::Variable { name, mark: None }) => {
            c.next();
            Ok(ProgramTerm::Variable(name))
        }
        Some(Token::Special(s)) if s == "#inf" || s == "#sup" => {
            c.next();
            Ok(ProgramTerm::Precomputed(if s == "#inf" {
                PrecomputedTerm::Infimum
            } else {
                PrecomputedTerm::Supremum
            }))
        }
        Some(Token::Punct("|")) => {
            c.next();
            let inner = term(c)?;
            c.expect_punct("|")?;
            Ok(ProgramTerm::Absolute(Box::new(inner)))
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_program() {
        let program = parse_program("p(X) :- q(X).\np(X) :- not r(X).\nr(1).\nq(1).").unwrap();
        assert_eq!(program.rules.len(), 4);
        let lang: Vec<_> = program.predicates().iter().map(|p| p.to_string()).collect();
        assert_eq!(lang, vec!["p/1", "q/1", "r/1"]);
        assert!(program.rules[2].body.is_empty());
        assert_eq!(program.rules[2].head, Head::Basic(Atom::new("r", vec![ProgramTerm::numeral(1)])));
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_program("").unwrap(), Program::default());
        assert_eq!(parse_program("% only a comment\n").unwrap(), Program::default());
    }

    #[test]
    fn choice_rule() {
        let program = parse_program("{p(A)} :- r(A,B).").unwrap();
        assert_eq!(program.rules.len(), 1);
        assert_eq!(
            program.rules[0].head,
            Head::Choice(Atom::new("p", vec![ProgramTerm::variable("A")]))
        );
    }

    #[test]
    fn unary_minus_is_subtraction_from_zero() {
        let program = parse_program("p(-X) :- q(-3).").unwrap();
        let head = program.rules[0].head_atom().unwrap();
        assert_eq!(
            head.args[0],
            ProgramTerm::binary(
                BinaryOperator::Subtract,
                ProgramTerm::numeral(0),
                ProgramTerm::variable("X")
            )
        );
        let BodyElement::Literal(l) = &program.rules[0].body[0] else { panic!() };
        assert_eq!(l.atom.args[0], ProgramTerm::numeral(-3));
    }

    #[test]
    fn operator_precedence() {
        let program = parse_program("p(1 + 2 * 3 .. 4 - 1 / 2 \\ 3).").unwrap();
        let t = &program.rules[0].head_atom().unwrap().args[0];
        assert_eq!(t.to_string(), "(1 + (2 * 3))..(4 - ((1 / 2) \\ 3))");
    }

    #[test]
    fn comparisons_with_symbols_and_negative_numbers() {
        let program = parse_program(":- p(X), a < X, X<-1, X != 2.").unwrap();
        let rendered: Vec<_> = program.rules[0].body.iter().map(|e| e.to_string()).collect();
        assert_eq!(rendered, vec!["p(X)", "a < X", "X < -1", "X != 2"]);
    }

    #[test]
    fn arity_conflict_names_the_predicate() {
        let error = parse_program("p(1). p(1,2).").unwrap_err();
        assert_eq!(
            error,
            ParseError::ArityConflict {
                predicate: "p".into(),
                first: 1,
                second: 2
            }
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_program("p(X) :- q(X)\nr.") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_program("p(X) :- q(X$).").is_err());
        assert!(parse_program("{p} :- .").is_ok());
        assert!(parse_program("p :- q; r.").is_err());
    }
}
