//! Exact arithmetic for Z2-graded superfunctions on a coordinate chart.
//!
//! Coefficients live in the fraction field of integer polynomials in the even
//! coordinates and in jet symbols of declared function symbols, so equality
//! is decided by comparing canonical forms.

mod chart;
mod even;
mod poly;
mod scalar;
mod var;

use thiserror::Error;

pub use chart::{Chart, Coordinate, FunctionSymbol, Parity, SymbolTable, MAX_ODD};
pub use even::EvenScalar;
pub use poly::{Monomial, Poly};
pub use scalar::{Grading, OddMonomial, SuperScalar};
pub use var::{Jet, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`")]
    BadName(String),
    #[error("invalid function symbol: {0}")]
    BadSymbol(String),
    #[error("at most {MAX_ODD} odd coordinates are supported, got {0}")]
    TooManyOdd(usize),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("parity error: {0}")]
    Parity(String),
}
