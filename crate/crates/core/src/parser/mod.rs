//! Text formats: the expression grammar and scenario documents.

mod expr;
mod scenario;

pub use expr::{
    parse_even_expression, parse_expression, ParseError, ParseErrorKind, MAX_DEPTH, MAX_EXPONENT,
};
pub use scenario::{parse_scenario, ScenarioDocument, ScenarioError};
