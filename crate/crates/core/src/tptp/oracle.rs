use thiserror::Error;

use crate::ground::{Domain, GroundProgram, Interpretation, ValueError};
use crate::syntax::{PrecomputedTerm, Program};

/// Integers added on each side of the program's integers when no domain
/// is given.
pub const DEFAULT_RADIUS: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("`{0}` is not a domain element (expected an integer or a lowercase symbol)")]
    BadElement(String),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Parses a comma-separated list such as `a1,a2,b,-1,3`.
pub fn parse_domain(text: &str) -> Result<Domain, OracleError> {
    let mut elements = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let element = match item {
            "#inf" => PrecomputedTerm::Infimum,
            "#sup" => PrecomputedTerm::Supremum,
            _ => match item.parse::<i64>() {
                Ok(n) => PrecomputedTerm::Numeral(n),
                Err(_) => {
                    let mut chars = item.chars();
                    let symbol = chars.next().is_some_and(|c| c.is_ascii_lowercase())
                        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !symbol {
                        return Err(OracleError::BadElement(item.to_string()));
                    }
                    PrecomputedTerm::Symbol(item.to_string())
                }
            },
        };
        elements.push(element);
    }
    Ok(Domain::new(elements))
}

/// The constants of `program` plus every integer within `radius` of the
/// integers it mentions (or of 0 when it mentions none).
pub fn default_domain(program: &Program, radius: i64) -> Domain {
    let constants = program.constants();
    let integers: Vec<i64> = constants.iter().filter_map(PrecomputedTerm::as_integer).collect();
    let lo = integers.iter().copied().min().unwrap_or(0).saturating_sub(radius);
    let hi = integers.iter().copied().max().unwrap_or(0).saturating_add(radius);
    let mut domain = Domain::integers(lo..=hi);
    domain.general.extend(constants);
    domain
}

/// The stable models of `program` whose atoms are built from `domain`.
pub fn oracle(program: &Program, domain: &Domain) -> Result<Vec<Interpretation>, OracleError> {
    Ok(GroundProgram::new(program, domain)?.stable_models())
}

/// `{a, b(1)}` style rendering of a model.
pub fn render_model(model: &Interpretation) -> String {
    let atoms: Vec<String> = model.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", atoms.join(", "))
}
