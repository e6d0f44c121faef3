use std::collections::BTreeMap;
use std::sync::Arc;

use super::ProductError;
use crate::geometry::{Metric, MetricDefect};
use crate::graded::{Chart, Parity, SuperScalar};

/// Two factor metrics on one shared chart plus an even twisting function.
///
/// `g1` spans the first factor's frame and `g2` the second's; together the
/// frames cover the chart. The product metric is `g1 ⊕ h² g2`.
#[derive(Clone, Debug)]
pub struct TwistedProductSpec {
    chart: Arc<Chart>,
    g1: Metric,
    g2: Metric,
    h: SuperScalar,
}

impl TwistedProductSpec {
    pub fn new(g1: Metric, g2: Metric, h: SuperScalar) -> Result<Self, ProductError> {
        let chart = g1.chart().clone();
        if !g2.chart().same_as(&chart) || !h.chart().same_as(&chart) {
            return Err(ProductError::InvalidSpec(
                "factors and twist must share one chart".into(),
            ));
        }
        let mut covered = vec![0u8; chart.dim()];
        for &i in g1.frame().iter().chain(g2.frame()) {
            covered[i] += 1;
        }
        if covered.iter().any(|&c| c != 1) {
            return Err(ProductError::InvalidSpec(
                "factor frames must partition the chart".into(),
            ));
        }
        for (label, g, other) in [("g1", &g1, &g2), ("g2", &g2, &g1)] {
            let defects = g.validate();
            if !defects.is_empty() {
                return Err(ProductError::InvalidMetric(label.into(), defects));
            }
            for row in g.entries() {
                for e in row {
                    if let Some(&j) = other.frame().iter().find(|&&j| !e.partial(j).is_zero()) {
                        return Err(ProductError::InvalidSpec(format!(
                            "{label} depends on `{}` of the other factor",
                            chart.coords()[j].name
                        )));
                    }
                }
            }
        }
        match h.parity() {
            Some(Parity::Even) => {}
            _ => {
                return Err(ProductError::InvalidSpec(format!(
                    "twist `{h}` is not even"
                )))
            }
        }
        h.invert()
            .map_err(|e| ProductError::InvalidSpec(format!("twist is not invertible: {e}")))?;
        Ok(TwistedProductSpec { chart, g1, g2, h })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn g1(&self) -> &Metric {
        &self.g1
    }

    pub fn g2(&self) -> &Metric {
        &self.g2
    }

    pub fn twist(&self) -> &SuperScalar {
        &self.h
    }

    pub fn mu(&self) -> SuperScalar {
        &self.h * &self.h
    }

    /// `n1 = p - m1`.
    pub fn n1(&self) -> i64 {
        self.g1.graded_dimension()
    }

    /// `n2 = q - m2`.
    pub fn n2(&self) -> i64 {
        self.g2.graded_dimension()
    }

    pub fn factor_of(&self, index: usize) -> Option<Factor> {
        if self.g1.position(index).is_some() {
            Some(Factor::First)
        } else if self.g2.position(index).is_some() {
            Some(Factor::Second)
        } else {
            None
        }
    }

    /// The block metric `g1 ⊕ h² g2` over the frame `g1.frame() ++ g2.frame()`.
    pub fn build(&self) -> Result<Metric, ProductError> {
        let mu = self.mu();
        let mut given = BTreeMap::new();
        for (g, scale) in [(&self.g1, None), (&self.g2, Some(&mu))] {
            for (a, &i) in g.frame().iter().enumerate() {
                for (b, &j) in g.frame().iter().enumerate().skip(a) {
                    let e = &g.entries()[a][b];
                    if e.is_zero() {
                        continue;
                    }
                    let v = match scale {
                        Some(s) => s * e,
                        None => e.clone(),
                    };
                    given.insert((i, j), v);
                }
            }
        }
        let frame: Vec<usize> = self
            .g1
            .frame()
            .iter()
            .chain(self.g2.frame())
            .copied()
            .collect();
        let metric = Metric::from_entries(&self.chart, frame, &given)?;
        let defects: Vec<MetricDefect> = metric.validate();
        if !defects.is_empty() {
            return Err(ProductError::InvalidMetric("product".into(), defects));
        }
        Ok(metric)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    First,
    Second,
}

/// The product metric of `spec`.
pub fn build_twisted_product(spec: &TwistedProductSpec) -> Result<Metric, ProductError> {
    spec.build()
}
