use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    /// Lowercase identifier: predicate, symbolic constant or keyword.
    Name(String),
    /// Uppercase identifier with an optional sort mark (`$`, `$i`, `$g`).
    Variable { name: String, mark: Option<String> },
    Integer(i64),
    /// `#inf`, `#sup`, `#true`, `#false` and their long forms.
    Special(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Program,
    Formula,
}

const PROGRAM_OPERATORS: &[&str] = &[":-", "!=", "<=", ">=", "<", ">", "="];
const FORMULA_OPERATORS: &[&str] = &["<->", "->", "<-", "!=", "<=", ">=", "<", ">", "="];

pub(crate) fn tokenize(text: &str, mode: Mode) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);

    let advance = |i: &mut usize, line: &mut usize, column: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_column) = (line, column);
        let push = |tokens: &mut Vec<Spanned>, token| {
            tokens.push(Spanned {
                token,
                line: start_line,
                column: start_column,
            })
        };

        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut column, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut column, 1);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut column, 1);
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_ascii_uppercase() {
                let mut mark = None;
                if i < chars.len() && chars[i] == '$' {
                    advance(&mut i, &mut line, &mut column, 1);
                    let mut m = String::from("$");
                    if i < chars.len() && (chars[i] == 'i' || chars[i] == 'g') {
                        m.push(chars[i]);
                        advance(&mut i, &mut line, &mut column, 1);
                    }
                    mark = Some(m);
                }
                push(&mut tokens, Token::Variable { name: word, mark });
            } else if c.is_ascii_lowercase() {
                push(&mut tokens, Token::Name(word));
            } else {
                return Err(ParseError::Syntax {
                    line: start_line,
                    column: start_column,
                    message: format!("identifier `{word}` must start with a letter"),
                });
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut column, 1);
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal.parse::<i64>().map_err(|_| ParseError::IntegerOverflow {
                line: start_line,
                column: start_column,
                literal: literal.clone(),
            })?;
            push(&mut tokens, Token::Integer(value));
            continue;
        }
        if c == '#' {
            let start = i;
            advance(&mut i, &mut line, &mut column, 1);
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                advance(&mut i, &mut line, &mut column, 1);
            }
            let word: String = chars[start..i].iter().collect();
            let normalized = match word.as_str() {
                "#inf" | "#infimum" => "#inf",
                "#sup" | "#supremum" => "#sup",
                "#true" if mode == Mode::Formula => "#true",
                "#false" if mode == Mode::Formula => "#false",
                _ => {
                    return Err(ParseError::Syntax {
                        line: start_line,
                        column: start_column,
                        message: format!("unknown directive `{word}`"),
                    })
                }
            };
            push(&mut tokens, Token::Special(normalized.to_string()));
            continue;
        }
        if c == '.' {
            if i + 1 < chars.len() && chars[i + 1] == '.' {
                advance(&mut i, &mut line, &mut column, 2);
                push(&mut tokens, Token::Punct(".."));
            } else {
                advance(&mut i, &mut line, &mut column, 1);
                push(&mut tokens, Token::Punct("."));
            }
            continue;
        }
        if let Some(p) = ["(", ")", "{", "}", ",", "|", "+", "*", "/", "\\"]
            .iter()
            .find(|p| p.starts_with(c))
        {
            advance(&mut i, &mut line, &mut column, 1);
            push(&mut tokens, Token::Punct(p));
            continue;
        }

        // Runs of operator characters are matched as a whole so that
        // unsupported operators such as `=>` are reported instead of being
        // split into valid pieces.
        let is_operator_char = |c: char| "=<>!:&~^-".contains(c);
        if is_operator_char(c) {
            let start = i;
            let mut end = i;
            while end < chars.len() && is_operator_char(chars[end]) {
                end += 1;
            }
            let run: String = chars[start..end].iter().collect();
            let operators = match mode {
                Mode::Program => PROGRAM_OPERATORS,
                Mode::Formula => FORMULA_OPERATORS,
            };
            let matched = if run.starts_with('-') {
                // A minus sign is never glued to what follows, except in `->`.
                if mode == Mode::Formula && run.starts_with("->") {
                    Some("->")
                } else {
                    Some("-")
                }
            } else if let Some(op) = operators.iter().find(|op| run == **op) {
                Some(*op)
            } else {
                // `<-1`, `=-1` and the like: an operator followed by a minus sign.
                let trimmed = run.trim_end_matches('-');
                operators
                    .iter()
                    .find(|op| trimmed == **op && !(mode == Mode::Formula && **op == "<"))
                    .copied()
            };
            match matched {
                Some(op) => {
                    advance(&mut i, &mut line, &mut column, op.len());
                    push(&mut tokens, Token::Punct(op));
                }
                None => {
                    return Err(ParseError::UnknownOperator {
                        line: start_line,
                        column: start_column,
                        operator: run,
                    })
                }
            }
            continue;
        }

        return Err(ParseError::UnknownOperator {
            line: start_line,
            column: start_column,
            operator: c.to_string(),
        });
    }
    Ok(tokens)
}

/// Cursor over a token stream shared by both parsers.
pub(crate) struct Cursor {
    tokens: Vec<Spanned>,
    pub position: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(tokens: Vec<Spanned>, text: &str) -> Self {
        let lines = text.split('\n').collect::<Vec<_>>();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Cursor {
            tokens,
            position: 0,
            end,
        }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.position).map(|s| &s.token)
    }

    pub fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.position).map(|s| s.token.clone());
        if token.is_some() {
            self.position += 1;
        }
        token
    }

    pub fn at_end(&self) -> bool {
        self.position >= self.tokens.len()
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Token::Punct(q)) if *q == p)
    }

    pub fn is_name(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Name(n)) if n == word)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.position += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{p}`")))
        }
    }

    pub fn error(&self, message: &str) -> ParseError {
        let (line, column) = match self.tokens.get(self.position) {
            Some(s) => (s.line, s.column),
            None => self.end,
        };
        let found = match self.peek() {
            Some(t) => describe(t),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            line,
            column,
            message: format!("{message}, found {found}"),
        }
    }
}

fn describe(token: &Token) -> String {
    match token {
        Token::Name(n) => format!("`{n}`"),
        Token::Variable { name, mark } => format!("`{name}{}`", mark.as_deref().unwrap_or("")),
        Token::Integer(n) => format!("`{n}`"),
        Token::Special(s) => format!("`{s}`"),
        Token::Punct(p) => format!("`{p}`"),
    }
}
