use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{GeometryError, VectorField};
use crate::graded::{Chart, EvenScalar, Parity, SuperScalar};

/// Graded-symmetric, even, nondegenerate bilinear form on a subset of the
/// chart's coordinate frame.
///
/// Entries are indexed by position in `frame`; vector fields are indexed by
/// chart coordinate. Operators built on a metric act on the frame subset and
/// treat the remaining coordinates as parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    chart: Arc<Chart>,
    frame: Vec<usize>,
    slot: Vec<Option<usize>>,
    entries: Vec<Vec<SuperScalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MetricDefect {
    /// `g_IJ != (-1)^{|I||J|} g_JI`.
    NotGradedSymmetric { row: String, col: String },
    /// The entry is not homogeneous of parity `|I| + |J|`.
    WrongParity { row: String, col: String },
    /// The body of the matrix is singular.
    Degenerate,
}

impl fmt::Display for MetricDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricDefect::NotGradedSymmetric { row, col } => {
                write!(f, "g({row},{col}) violates graded symmetry")
            }
            MetricDefect::WrongParity { row, col } => {
                write!(f, "g({row},{col}) has the wrong parity")
            }
            MetricDefect::Degenerate => f.write_str("metric body is singular"),
        }
    }
}

impl Metric {
    /// Wraps a square matrix over `frame` without validating it.
    pub fn new(
        chart: &Arc<Chart>,
        frame: Vec<usize>,
        entries: Vec<Vec<SuperScalar>>,
    ) -> Result<Self, GeometryError> {
        let n = frame.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!("expected a {n}x{n} matrix")));
        }
        let mut slot = vec![None; chart.dim()];
        for (k, &i) in frame.iter().enumerate() {
            if i >= chart.dim() || slot[i].is_some() {
                return Err(GeometryError::Shape(format!("bad frame index {i}")));
            }
            slot[i] = Some(k);
        }
        for row in &entries {
            for e in row {
                if !e.chart().same_as(chart) {
                    return Err(GeometryError::Graded(
                        crate::graded::GradedError::ChartMismatch,
                    ));
                }
            }
        }
        Ok(Metric {
            chart: chart.clone(),
            frame,
            slot,
            entries,
        })
    }

    /// Builds a metric on the full chart from its listed entries; the
    /// missing mirror entries follow from graded symmetry and the rest are 0.
    pub fn from_entries(
        chart: &Arc<Chart>,
        frame: Vec<usize>,
        given: &BTreeMap<(usize, usize), SuperScalar>,
    ) -> Result<Self, GeometryError> {
        let n = frame.len();
        let pos = |i: usize| frame.iter().position(|&f| f == i);
        let mut entries = vec![vec![SuperScalar::zero(chart); n]; n];
        let mut set = vec![vec![false; n]; n];
        for (&(i, j), v) in given {
            let (Some(a), Some(b)) = (pos(i), pos(j)) else {
                return Err(GeometryError::OutsideFrame(
                    chart.coord(i.max(j)).name.to_string(),
                ));
            };
            let mirror = if chart.parity(i).koszul(chart.parity(j)) {
                -v
            } else {
                v.clone()
            };
            for (r, c, val) in [(a, b, v.clone()), (b, a, mirror)] {
                if set[r][c] && entries[r][c] != val {
                    return Err(GeometryError::Shape(format!(
                        "conflicting entries for ({},{})",
                        chart.coord(frame[r]).name,
                        chart.coord(frame[c]).name
                    )));
                }
                entries[r][c] = val;
                set[r][c] = true;
            }
        }
        Metric::new(chart, frame, entries)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// Chart indices spanned by the metric, in matrix order.
    pub fn frame(&self) -> &[usize] {
        &self.frame
    }

    /// Matrix position of a chart index.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.slot.get(index).copied().flatten()
    }

    pub fn entries(&self) -> &[Vec<SuperScalar>] {
        &self.entries
    }

    /// `g_IJ` by chart indices.
    pub fn entry(&self, i: usize, j: usize) -> Result<&SuperScalar, GeometryError> {
        Ok(&self.entries[self.require(i)?][self.require(j)?])
    }

    pub(crate) fn require(&self, index: usize) -> Result<usize, GeometryError> {
        self.position(index)
            .ok_or_else(|| GeometryError::OutsideFrame(self.chart.coord(index).name.to_string()))
    }

    pub fn frame_parity(&self, k: usize) -> Parity {
        self.chart.parity(self.frame[k])
    }

    /// `m - n` for a frame of `m` even and `n` odd directions.
    pub fn graded_dimension(&self) -> i64 {
        let odd = (0..self.frame.len())
            .filter(|&k| self.frame_parity(k).is_odd())
            .count() as i64;
        self.frame.len() as i64 - 2 * odd
    }

    /// Every defect found; empty when the metric is admissible.
    pub fn validate(&self) -> Vec<MetricDefect> {
        let n = self.frame.len();
        let name = |k: usize| self.chart.coord(self.frame[k]).name.to_string();
        let mut defects = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let (pa, pb) = (self.frame_parity(a), self.frame_parity(b));
                let e = &self.entries[a][b];
                if !e.is_zero() && e.parity() != Some(pa + pb) {
                    defects.push(MetricDefect::WrongParity {
                        row: name(a),
                        col: name(b),
                    });
                }
                if b >= a {
                    let mirror = &self.entries[b][a];
                    let ok = if pa.koszul(pb) {
                        *e == -mirror
                    } else {
                        e == mirror
                    };
                    if !ok {
                        defects.push(MetricDefect::NotGradedSymmetric {
                            row: name(a),
                            col: name(b),
                        });
                    }
                }
            }
        }
        if body_inverse(&self.body_matrix()).is_none() {
            defects.push(MetricDefect::Degenerate);
        }
        defects
    }

    fn body_matrix(&self) -> Vec<Vec<EvenScalar>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(SuperScalar::body).collect())
            .collect()
    }

    /// `g^{-1}` with `g · g^{-1} = g^{-1} · g = 1`, indexed like `entries`.
    ///
    /// The body is inverted over the coefficient field; the nilpotent rest is
    /// absorbed by a terminating Neumann series.
    pub fn inverse(&self) -> Result<Vec<Vec<SuperScalar>>, GeometryError> {
        let n = self.frame.len();
        let body = self.body_matrix();
        let binv = body_inverse(&body).ok_or(GeometryError::Degenerate)?;
        let binv: Matrix = binv
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| SuperScalar::from_even(&self.chart, e))
                    .collect()
            })
            .collect();
        let nil: Matrix = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        &self.entries[a][b]
                            - &SuperScalar::from_even(&self.chart, body[a][b].clone())
                    })
                    .collect()
            })
            .collect();
        // (B + N)^{-1} = Σ_k (-B^{-1} N)^k B^{-1}
        let step: Matrix = mat_mul(&binv, &nil)
            .into_iter()
            .map(|r| r.iter().map(|e| -e).collect())
            .collect();
        let mut term = binv.clone();
        let mut acc = binv;
        for _ in 0..=self.chart.odd_count() {
            term = mat_mul(&step, &term);
            if term.iter().all(|r| r.iter().all(SuperScalar::is_zero)) {
                break;
            }
            for (ra, rt) in acc.iter_mut().zip(&term) {
                for (a, t) in ra.iter_mut().zip(rt) {
                    *a = &*a + t;
                }
            }
        }
        Ok(acc)
    }

    /// `<X, Y> = Σ X^I (-1)^{|I||Y^J|} Y^J g_IJ`.
    pub fn apply(&self, x: &VectorField, y: &VectorField) -> Result<SuperScalar, GeometryError> {
        if !x.chart().same_as(&self.chart) || !y.chart().same_as(&self.chart) {
            return Err(GeometryError::Graded(
                crate::graded::GradedError::ChartMismatch,
            ));
        }
        let mut acc = SuperScalar::zero(&self.chart);
        for (&i, xi) in x.components() {
            let a = self.require(i)?;
            let pi = self.chart.parity(i);
            for (&j, yj) in y.components() {
                let b = self.require(j)?;
                let g = &self.entries[a][b];
                if g.is_zero() {
                    continue;
                }
                acc = &acc + &(&(xi * &yj.twist(pi)) * g);
            }
        }
        Ok(acc)
    }
}

type Matrix = Vec<Vec<SuperScalar>>;

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let chart = a
        .iter()
        .flatten()
        .next()
        .map(|e| e.chart().clone())
        .expect("nonempty matrix");
    let mut out = vec![vec![SuperScalar::zero(&chart); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = &a[i][k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !bk[j].is_zero() {
                    out[i][j] = &out[i][j] + &(aik * &bk[j]);
                }
            }
        }
    }
    out
}

/// Gauss-Jordan elimination over the coefficient field.
pub(crate) fn body_inverse(m: &[Vec<EvenScalar>]) -> Option<Vec<Vec<EvenScalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<EvenScalar>> = m.to_vec();
    let mut inv: Vec<Vec<EvenScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        EvenScalar::one()
                    } else {
                        EvenScalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].size())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                }
                if !inv[col][j].is_zero() {
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
    }
    Some(inv)
}
