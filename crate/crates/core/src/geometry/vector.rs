use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::graded::{Chart, Grading, Parity, SuperScalar};

/// `Σ X^I ∂_I` with each coefficient written to the left of its frame vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: BTreeMap<usize, SuperScalar>,
}

impl VectorField {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        VectorField {
            chart: chart.clone(),
            comps: BTreeMap::new(),
        }
    }

    /// The coordinate frame field `∂_index`.
    pub fn frame(chart: &Arc<Chart>, index: usize) -> Self {
        VectorField::zero(chart).with(index, SuperScalar::one(chart))
    }

    /// Adds `coeff ∂_index`.
    pub fn with(mut self, index: usize, coeff: SuperScalar) -> Self {
        self.add_component(index, &coeff);
        self
    }

    fn add_component(&mut self, index: usize, coeff: &SuperScalar) {
        if coeff.is_zero() {
            return;
        }
        let sum = match self.comps.get(&index) {
            Some(existing) => existing + coeff,
            None => coeff.clone(),
        };
        if sum.is_zero() {
            self.comps.remove(&index);
        } else {
            self.comps.insert(index, sum);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &BTreeMap<usize, SuperScalar> {
        &self.comps
    }

    /// The left coefficient of `∂_index`.
    pub fn coefficient(&self, index: usize) -> SuperScalar {
        self.comps
            .get(&index)
            .cloned()
            .unwrap_or_else(|| SuperScalar::zero(&self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn size(&self) -> usize {
        self.comps.values().map(SuperScalar::size).sum()
    }

    pub fn grading(&self) -> Grading {
        let mut found: Option<Parity> = None;
        for (&i, c) in &self.comps {
            let frame = self.chart.parity(i);
            for m in c.terms().keys() {
                let p = m.parity() + frame;
                match found {
                    None => found = Some(p),
                    Some(q) if q != p => return Grading::Inhomogeneous,
                    _ => {}
                }
            }
        }
        Grading::Homogeneous(found.unwrap_or(Parity::Even))
    }

    pub fn parity(&self) -> Option<Parity> {
        self.grading().parity()
    }

    /// The homogeneous component of the given parity.
    pub fn part(&self, parity: Parity) -> VectorField {
        let mut out = VectorField::zero(&self.chart);
        for (&i, c) in &self.comps {
            out.add_component(i, &c.part(parity + self.chart.parity(i)));
        }
        out
    }

    /// Nonzero homogeneous parts with their parities.
    pub fn homogeneous_parts(&self) -> Vec<(Parity, VectorField)> {
        match self.grading() {
            Grading::Homogeneous(p) => vec![(p, self.clone())],
            Grading::Inhomogeneous => [Parity::Even, Parity::Odd]
                .into_iter()
                .map(|p| (p, self.part(p)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// `f X`.
    pub fn scale_left(&self, f: &SuperScalar) -> VectorField {
        let mut out = VectorField::zero(&self.chart);
        for (&i, c) in &self.comps {
            out.add_component(i, &(f * c));
        }
        out
    }

    /// `X · f`, equal to `(-1)^{|X||f|} f X` for homogeneous arguments.
    pub fn scale_right(&self, f: &SuperScalar) -> VectorField {
        let mut out = VectorField::zero(&self.chart);
        for (&i, c) in &self.comps {
            out.add_component(i, &(c * &f.twist(self.chart.parity(i))));
        }
        out
    }

    /// Derivation action `X(f) = Σ X^I ∂_I f`.
    pub fn apply(&self, f: &SuperScalar) -> SuperScalar {
        let mut acc = SuperScalar::zero(&self.chart);
        for (&i, c) in &self.comps {
            let d = f.partial(i);
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    /// Graded commutator `XY - (-1)^{|X||Y|} YX`, split over homogeneous parts.
    pub fn lie_bracket(&self, other: &VectorField) -> VectorField {
        let mut out = VectorField::zero(&self.chart);
        for (px, x) in self.homogeneous_parts() {
            for (py, y) in other.homogeneous_parts() {
                let sign = px.koszul(py);
                for (&j, yj) in &y.comps {
                    out.add_component(j, &x.apply(yj));
                }
                for (&j, xj) in &x.comps {
                    let t = y.apply(xj);
                    out.add_component(j, &if sign { t } else { -&t });
                }
            }
        }
        out
    }
}

impl Add for &VectorField {
    type Output = VectorField;

    fn add(self, rhs: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (&i, c) in &rhs.comps {
            out.add_component(i, c);
        }
        out
    }
}

impl Sub for &VectorField {
    type Output = VectorField;

    fn sub(self, rhs: &VectorField) -> VectorField {
        self + &(-rhs)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;

    fn neg(self) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|(&i, c)| (i, -c)).collect(),
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        for (n, (&i, c)) in self.comps.iter().enumerate() {
            let name = &self.chart.coord(i).name;
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "d_{name}")?;
            } else if (-c).is_one() {
                write!(f, "-d_{name}")?;
            } else {
                write!(f, "({c}) d_{name}")?;
            }
        }
        Ok(())
    }
}
