use thiserror::Error;

use crate::completion::{completion_parts, theory_shapes, CompletionParts, NamedFormula, Section, ShapeError, TheoryBundle};
use crate::fol::Formula;
use crate::ordered::{ordered_completion, ordered_completion_of_theory, OcConfig, OrderedError};
use crate::simplify::{simplify_formula, simplify_with, SimplifyOptions};
use crate::syntax::{parse_program, parse_spec, ParseError, Program};

/// A program, or a theory read from specification syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Program(Program),
    Theory(Vec<Formula>),
}

impl Input {
    /// Reads `text` as a program if it is one, and as a theory otherwise.
    /// When neither works the theory error is reported if the text looks
    /// like formulas (it mentions a quantifier or connective keyword).
    pub fn parse(text: &str) -> Result<Input, ParseError> {
        match parse_program(text) {
            Ok(p) => Ok(Input::Program(p)),
            Err(program_error) => match parse_spec(text) {
                Ok(fs) => Ok(Input::Theory(fs)),
                Err(spec_error) => {
                    let formula_like = text
                        .split(|c: char| !c.is_alphanumeric() && c != '_')
                        .any(|w| matches!(w, "forall" | "exists" | "and" | "or"))
                        || text.contains("->")
                        || text.contains("<-");
                    Err(if formula_like { spec_error } else { program_error })
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Translation {
    TauStar,
    Completion,
    OrderedCompletion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    pub with: Translation,
    /// Include the order axioms of ordered completion.
    pub axioms: bool,
    pub simplify: bool,
}

impl TranslateOptions {
    pub fn new(with: Translation) -> Self {
        TranslateOptions {
            with,
            axioms: false,
            simplify: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("the rule translation needs a program as input")]
    NeedsProgram,
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Ordered(#[from] OrderedError),
}

fn simplified(bundle: TheoryBundle, simplify: bool) -> TheoryBundle {
    if simplify {
        bundle.map(simplify_formula)
    } else {
        bundle
    }
}

/// The formulas printed by `translate`, in output order.
pub fn translate(input: &Input, options: TranslateOptions) -> Result<Vec<NamedFormula>, TranslateError> {
    let bundle = match (options.with, input) {
        (Translation::TauStar, Input::Program(p)) => {
            let mut bundle = TheoryBundle::default();
            for (i, f) in crate::tau_star::tau_star_program(p).into_iter().enumerate() {
                let f = if options.simplify {
                    simplify_with(&f, SimplifyOptions { double_negation: false })
                } else {
                    f
                };
                bundle.push(format!("rule_{i}"), Section::Rules, f);
            }
            return Ok(bundle.formulas);
        }
        (Translation::TauStar, Input::Theory(_)) => return Err(TranslateError::NeedsProgram),
        (Translation::Completion, Input::Program(p)) => completion_parts(p, true).bundle(),
        (Translation::Completion, Input::Theory(fs)) => CompletionParts::from_shapes(&theory_shapes(fs, true)?).bundle(),
        (Translation::OrderedCompletion, input) => {
            let cfg = OcConfig::default();
            let mut bundle = match input {
                Input::Program(p) => ordered_completion(p, &cfg)?,
                Input::Theory(fs) => ordered_completion_of_theory(fs, &cfg)?,
            };
            if !options.axioms {
                bundle.formulas.retain(|f| f.section != Section::Axioms);
            }
            bundle
        }
    };
    Ok(simplified(bundle, options.simplify).ordered().into_iter().cloned().collect())
}

/// One formula per line, each ending with a full stop.
pub fn render(formulas: &[NamedFormula]) -> String {
    formulas.iter().map(|f| format!("{}.\n", f.formula)).collect()
}
