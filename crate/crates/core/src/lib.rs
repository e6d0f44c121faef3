//! Exact symbolic Riemannian supergeometry on coordinate charts.

pub mod geometry;
pub mod graded;
pub mod parser;
pub mod products;
