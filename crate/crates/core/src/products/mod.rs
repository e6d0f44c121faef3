//! Twisted products `g1 ⊕ h² g2`, the closed-form statements about their
//! geometry, and a verifier that compares each statement with a direct
//! computation on the product metric.

mod claims;
mod formulas;
mod spec;
mod verify;
mod warped;

use thiserror::Error;

use crate::geometry::{GeometryError, MetricDefect};
use crate::graded::GradedError;

pub use claims::{ClaimId, Tier};
pub use formulas::{TwistedProduct, Value};
pub use spec::{build_twisted_product, Factor, TwistedProductSpec};
pub use verify::{
    verify, verify_claim, verify_product, CaseResult, ClaimResult, Summary, VerificationReport,
};
pub use warped::{
    mixed_ricci_flat_residuals, w2_flat_check, warped_factorization, Factorization, KBranch,
    MixedRicci, W2FlatReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error(transparent)]
    Geometry(GeometryError),
    #[error("invalid product: {0}")]
    InvalidSpec(String),
    #[error("{0} is not a valid metric: {}", .1.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMetric(String, Vec<MetricDefect>),
    #[error("{0}")]
    WrongFactor(String),
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
}

impl From<GradedError> for ProductError {
    fn from(e: GradedError) -> Self {
        ProductError::Geometry(GeometryError::Graded(e))
    }
}

/// The right-hand side of `claim` on the given frames.
pub fn closed_form(
    spec: &TwistedProductSpec,
    claim: ClaimId,
    frames: &[usize],
) -> Result<Value, ProductError> {
    TwistedProduct::new(spec)?.closed_form(claim, frames)
}

/// The left-hand side of `claim`, computed on the product metric.
pub fn direct_value(
    spec: &TwistedProductSpec,
    claim: ClaimId,
    frames: &[usize],
) -> Result<Value, ProductError> {
    TwistedProduct::new(spec)?.direct_value(claim, frames)
}
