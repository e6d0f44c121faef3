//! Riemannian supergeometry on a coordinate chart, computed from the metric
//! entries alone.
//!
//! Vector fields carry their coefficients on the left of the frame vectors,
//! and every sign below follows from that convention.

mod connection;
mod metric;
mod vector;

use thiserror::Error;

use crate::graded::{GradedError, SuperScalar};

pub use connection::ConnectionTable;
pub use metric::{Metric, MetricDefect};
pub use vector::VectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("`{0}` is not a direction of this metric")]
    OutsideFrame(String),
    #[error("metric is degenerate")]
    Degenerate,
    #[error("inhomogeneous {0}")]
    Inhomogeneous(String),
    #[error("undefined denominator: {0} = 0")]
    UndefinedDenominator(String),
    #[error("{0}")]
    Shape(String),
}

pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    x.lie_bracket(y)
}

pub fn metric_apply(
    g: &Metric,
    x: &VectorField,
    y: &VectorField,
) -> Result<SuperScalar, GeometryError> {
    g.apply(x, y)
}

pub fn validate_metric(g: &Metric) -> Vec<MetricDefect> {
    g.validate()
}

pub fn inverse_metric(g: &Metric) -> Result<Vec<Vec<SuperScalar>>, GeometryError> {
    g.inverse()
}

pub fn levi_civita(g: &Metric) -> Result<ConnectionTable, GeometryError> {
    ConnectionTable::levi_civita(g)
}

pub fn frame_coefficient(v: &VectorField, index: usize) -> SuperScalar {
    v.coefficient(index)
}

pub fn gradient(g: &Metric, f: &SuperScalar) -> Result<VectorField, GeometryError> {
    levi_civita(g)?.gradient(f)
}

pub fn laplacian(g: &Metric, f: &SuperScalar) -> Result<SuperScalar, GeometryError> {
    levi_civita(g)?.laplacian(f)
}

pub fn k_tensor(
    g: &Metric,
    x: &VectorField,
    y: &VectorField,
    t: &VectorField,
) -> Result<VectorField, GeometryError> {
    levi_civita(g)?.k_tensor(x, y, t)
}

pub fn w2(
    g: &Metric,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    t: &VectorField,
) -> Result<SuperScalar, GeometryError> {
    levi_civita(g)?.w2(x, y, z, t)
}
