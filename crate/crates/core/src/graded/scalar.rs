//! Superfunctions on a chart: polynomials in the odd generators with
//! coefficients in the even field.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::chart::{Chart, Parity};
use super::even::EvenScalar;
use super::var::Var;
use super::GradedError;

/// Strictly increasing set of odd generator slots, stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct OddMonomial(u32);

impl OddMonomial {
    pub const ONE: OddMonomial = OddMonomial(0);

    pub fn generator(slot: u32) -> Self {
        OddMonomial(1 << slot)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.degree())
    }

    pub fn contains(self, slot: u32) -> bool {
        self.0 & (1 << slot) != 0
    }

    pub fn slots(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..32).filter(move |s| bits & (1 << s) != 0)
    }

    /// Product in canonical order: `None` on a repeated generator, otherwise
    /// the merged monomial and whether sorting needed an odd permutation.
    pub fn merge(self, other: OddMonomial) -> Option<(OddMonomial, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0;
        for j in other.slots() {
            swaps += (self.0 >> (j + 1)).count_ones();
        }
        Some((OddMonomial(self.0 | other.0), swaps % 2 == 1))
    }

    /// Left derivative by generator `slot`: the remaining monomial and
    /// whether an odd number of generators preceded `slot`.
    pub fn left_partial(self, slot: u32) -> Option<(OddMonomial, bool)> {
        if !self.contains(slot) {
            return None;
        }
        let before = (self.0 & ((1u32 << slot) - 1)).count_ones();
        Some((OddMonomial(self.0 & !(1 << slot)), before % 2 == 1))
    }
}

impl PartialOrd for OddMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OddMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.slots().cmp(other.slots()))
    }
}

/// Homogeneity of a superfunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Homogeneous(Parity),
    Inhomogeneous,
}

impl Grading {
    pub fn parity(self) -> Option<Parity> {
        match self {
            Grading::Homogeneous(p) => Some(p),
            Grading::Inhomogeneous => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuperScalar {
    chart: Arc<Chart>,
    terms: BTreeMap<OddMonomial, EvenScalar>,
}

impl PartialEq for SuperScalar {
    fn eq(&self, other: &Self) -> bool {
        self.chart.same_as(&other.chart) && self.terms == other.terms
    }
}

impl Eq for SuperScalar {}

impl SuperScalar {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        SuperScalar {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        SuperScalar::from_even(chart, EvenScalar::one())
    }

    pub fn constant(chart: &Arc<Chart>, c: i64) -> Self {
        SuperScalar::from_even(chart, EvenScalar::from_int(c))
    }

    pub fn from_even(chart: &Arc<Chart>, value: EvenScalar) -> Self {
        SuperScalar::from_term(chart, OddMonomial::ONE, value)
    }

    pub fn from_term(chart: &Arc<Chart>, mono: OddMonomial, value: EvenScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(mono, value);
        }
        SuperScalar {
            chart: chart.clone(),
            terms,
        }
    }

    /// The coordinate function named `name` (an even indeterminate or an odd generator).
    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<Self, GradedError> {
        let index = chart
            .index_of(name)
            .ok_or_else(|| GradedError::UnknownCoordinate(name.to_string()))?;
        Ok(SuperScalar::coordinate_at(chart, index))
    }

    pub fn coordinate_at(chart: &Arc<Chart>, index: usize) -> Self {
        match chart.odd_slot(index) {
            Some(slot) => {
                SuperScalar::from_term(chart, OddMonomial::generator(slot), EvenScalar::one())
            }
            None => SuperScalar::from_even(
                chart,
                EvenScalar::var(Var::Coord(chart.coord(index).name.clone())),
            ),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> &BTreeMap<OddMonomial, EvenScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.body().is_one()
    }

    /// Total number of polynomial terms across coefficients.
    pub fn size(&self) -> usize {
        self.terms.values().map(EvenScalar::size).sum()
    }

    pub fn grading(&self) -> Grading {
        let mut parities = self.terms.keys().map(|m| m.parity());
        let Some(first) = parities.next() else {
            return Grading::Homogeneous(Parity::Even);
        };
        if parities.all(|p| p == first) {
            Grading::Homogeneous(first)
        } else {
            Grading::Inhomogeneous
        }
    }

    pub fn parity(&self) -> Option<Parity> {
        self.grading().parity()
    }

    /// Value with every odd generator set to zero.
    pub fn body(&self) -> EvenScalar {
        self.terms
            .get(&OddMonomial::ONE)
            .cloned()
            .unwrap_or_default()
    }

    /// Part of the given parity.
    pub fn part(&self, parity: Parity) -> SuperScalar {
        SuperScalar {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.parity() == parity)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// `(-1)^{|p||self|} self`, applied per homogeneous part.
    pub fn twist(&self, p: Parity) -> SuperScalar {
        if !p.is_odd() {
            return self.clone();
        }
        SuperScalar {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        *m,
                        if m.parity().is_odd() {
                            c.neg()
                        } else {
                            c.clone()
                        },
                    )
                })
                .collect(),
        }
    }

    fn same_chart(&self, other: &SuperScalar) -> Result<(), GradedError> {
        if self.chart.same_as(&other.chart) {
            Ok(())
        } else {
            Err(GradedError::ChartMismatch)
        }
    }

    pub fn checked_add(&self, other: &SuperScalar) -> Result<SuperScalar, GradedError> {
        self.same_chart(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(existing) => {
                    let sum = existing.add(c);
                    if sum.is_zero() {
                        terms.remove(m);
                    } else {
                        *existing = sum;
                    }
                }
                None => {
                    terms.insert(*m, c.clone());
                }
            }
        }
        Ok(SuperScalar {
            chart: self.chart.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &SuperScalar) -> Result<SuperScalar, GradedError> {
        self.checked_add(&other.neg_ref())
    }

    /// Graded-commutative product; merging odd monomials applies the sign of
    /// the sorting permutation and drops repeated generators.
    pub fn checked_mul(&self, other: &SuperScalar) -> Result<SuperScalar, GradedError> {
        self.same_chart(other)?;
        let mut acc: BTreeMap<OddMonomial, EvenScalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let Some((m, negative)) = ma.merge(*mb) else {
                    continue;
                };
                let prod = ca.mul(cb);
                let prod = if negative { prod.neg() } else { prod };
                let slot = acc.entry(m).or_default();
                *slot = slot.add(&prod);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(SuperScalar {
            chart: self.chart.clone(),
            terms: acc,
        })
    }

    pub fn neg_ref(&self) -> SuperScalar {
        SuperScalar {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &EvenScalar) -> SuperScalar {
        if c.is_zero() {
            return SuperScalar::zero(&self.chart);
        }
        SuperScalar {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, t)| (*m, t.mul(c))).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> SuperScalar {
        self.scale(&EvenScalar::from_int(c))
    }

    pub fn pow(&self, e: u32) -> SuperScalar {
        let mut acc = SuperScalar::one(&self.chart);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative along coordinate `index`. Odd coordinates act as
    /// left derivatives.
    pub fn partial(&self, index: usize) -> SuperScalar {
        let chart = &self.chart;
        match chart.odd_slot(index) {
            None => {
                let name = chart.coord(index).name.clone();
                let mut terms = BTreeMap::new();
                for (m, c) in &self.terms {
                    let d = c.partial(&name, chart.symbols());
                    if !d.is_zero() {
                        terms.insert(*m, d);
                    }
                }
                SuperScalar {
                    chart: chart.clone(),
                    terms,
                }
            }
            Some(slot) => {
                let mut terms = BTreeMap::new();
                for (m, c) in &self.terms {
                    if let Some((rest, negative)) = m.left_partial(slot) {
                        terms.insert(rest, if negative { c.neg() } else { c.clone() });
                    }
                }
                SuperScalar {
                    chart: chart.clone(),
                    terms,
                }
            }
        }
    }

    pub fn partial_by_name(&self, coord: &str) -> Result<SuperScalar, GradedError> {
        let index = self
            .chart
            .index_of(coord)
            .ok_or_else(|| GradedError::UnknownCoordinate(coord.to_string()))?;
        Ok(self.partial(index))
    }

    /// Inverse of an even superfunction with invertible body, via the finite
    /// Neumann series `a⁻¹ Σ (-a⁻¹ n)^k` where `n` is the nilpotent part.
    pub fn invert(&self) -> Result<SuperScalar, GradedError> {
        if self.grading() != Grading::Homogeneous(Parity::Even) {
            return Err(GradedError::Parity(
                "only even superfunctions can be inverted".into(),
            ));
        }
        let body = self.body();
        self.check_invertible_body(&body)?;
        let body_inv = body.inv().expect("nonzero body");
        let mut nil = self.clone();
        nil.terms.remove(&OddMonomial::ONE);
        let step = nil.scale(&body_inv.neg());
        let mut power = SuperScalar::one(&self.chart);
        let mut sum = SuperScalar::one(&self.chart);
        loop {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&body_inv))
    }

    fn check_invertible_body(&self, body: &EvenScalar) -> Result<(), GradedError> {
        if body.is_zero() {
            return Err(GradedError::NotInvertible(format!("{self} has zero body")));
        }
        for v in body.numer().vars() {
            if let Var::Jet(jet) = v {
                if jet.total_order() > 0 {
                    continue;
                }
                let invertible = self
                    .chart
                    .symbol(&jet.symbol)
                    .is_some_and(|s| s.is_invertible());
                if !invertible {
                    return Err(GradedError::NotInvertible(format!(
                        "`{}` is not declared invertible",
                        jet.symbol
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn checked_div(&self, other: &SuperScalar) -> Result<SuperScalar, GradedError> {
        self.checked_mul(&other.invert()?)
    }
}

impl Add for &SuperScalar {
    type Output = SuperScalar;

    fn add(self, rhs: &SuperScalar) -> SuperScalar {
        self.checked_add(rhs)
            .expect("superfunctions on different charts")
    }
}

impl Sub for &SuperScalar {
    type Output = SuperScalar;

    fn sub(self, rhs: &SuperScalar) -> SuperScalar {
        self.checked_sub(rhs)
            .expect("superfunctions on different charts")
    }
}

impl Mul for &SuperScalar {
    type Output = SuperScalar;

    fn mul(self, rhs: &SuperScalar) -> SuperScalar {
        self.checked_mul(rhs)
            .expect("superfunctions on different charts")
    }
}

impl Neg for &SuperScalar {
    type Output = SuperScalar;

    fn neg(self) -> SuperScalar {
        self.neg_ref()
    }
}

impl fmt::Display for SuperScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let gens: Vec<&str> = m
                .slots()
                .map(|s| self.chart.coord(self.chart.odd_coord(s)).name.as_ref())
                .collect();
            let gens = gens.join("*");
            let term = if gens.is_empty() {
                c.to_string()
            } else if c.is_one() {
                gens
            } else if c.neg().is_one() {
                format!("-{gens}")
            } else if c.is_atomic_product() {
                format!("{c}*{gens}")
            } else {
                format!("({c})*{gens}")
            };
            if i == 0 {
                f.write_str(&term)?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {term}")?;
            }
        }
        Ok(())
    }
}
