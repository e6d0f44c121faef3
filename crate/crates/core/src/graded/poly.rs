//! Sparse multivariate polynomials with integer coefficients.
//!
//! Terms are kept sorted in descending graded-lex order with no zero
//! coefficients, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::var::Var;

/// Power product of indeterminates, sorted by variable with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((v.clone(), e - f)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `v`: returns `(e, m)` with `self = v^e * m`.
    fn split(&self, v: &Var) -> (u32, Monomial) {
        match self.0.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(i);
                (e, Monomial(rest))
            }
            Err(_) => (0, self.clone()),
        }
    }

    fn with_power(&self, v: &Var, e: u32) -> Monomial {
        if e == 0 {
            return self.clone();
        }
        self.mul(&Monomial(vec![(v.clone(), e)]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lex; among variables the smaller one (by `Var` order) is more significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        for ((va, ea), (vb, eb)) in self.0.iter().zip(&other.0) {
            match va.cmp(vb) {
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => continue,
                    o => return o,
                },
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(v: Var) -> Self {
        Poly {
            terms: vec![(Monomial::var(v), BigInt::one())],
        }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        Poly {
            terms: acc
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn lead(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> BigInt {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        Poly {
            terms: acc
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Multiplication by a single term preserves the term order.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, tc)| (m.clone(), tc * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Positive gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_integer(&self, d: &BigInt) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c / d)).collect(),
        }
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        Poly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.split(v);
            (e > 0).then(|| (rest.with_power(v, e - 1), c * BigInt::from(e)))
        }))
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.as_constant() {
            if self.terms.iter().all(|(_, tc)| tc.is_multiple_of(&c)) {
                return Some(self.div_integer(&c));
            }
            return None;
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !c.is_multiple_of(dc) {
                    return None;
                }
                out.push((m.checked_div(dm)?, c / dc));
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = &d.terms[0];
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.terms.first() {
            let qm = rm.checked_div(dm)?;
            if !rc.is_multiple_of(dc) {
                return None;
            }
            let qc = rc / dc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(quot))
    }

    /// Coefficients as a polynomial in `v`: `self = Σ c_e v^e`.
    fn coeffs_in(&self, v: &Var) -> BTreeMap<u32, Poly> {
        let mut parts: BTreeMap<u32, Vec<(Monomial, BigInt)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            parts.entry(e).or_default().push((rest, c.clone()));
        }
        parts
            .into_iter()
            .map(|(e, ts)| (e, Poly::from_terms(ts)))
            .collect()
    }

    fn from_coeffs_in(v: &Var, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        Poly::from_terms(coeffs.iter().flat_map(|(e, p)| {
            p.terms
                .iter()
                .map(move |(m, c)| (m.with_power(v, *e), c.clone()))
        }))
    }

    fn degree_in(&self, v: &Var) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent(v))
            .max()
            .unwrap_or(0)
    }

    /// Flip the sign so that the leading coefficient is positive.
    pub fn with_positive_lead(self) -> Poly {
        if self.lead_coeff().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        gcd(self, other).with_positive_lead()
    }
}

fn monomial_gcd_with(m: &Monomial, c: &BigInt, p: &Poly) -> Poly {
    let mut gm = m.clone();
    let mut gc = c.abs();
    for (pm, pc) in &p.terms {
        if !gm.is_one() {
            gm = gm.gcd(pm);
        }
        if !gc.is_one() {
            gc = gc.gcd(pc);
        }
        if gm.is_one() && gc.is_one() {
            break;
        }
    }
    Poly::monomial(gm, gc)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.terms.len() == 1 {
        let (m, c) = &a.terms[0];
        return monomial_gcd_with(m, c, b);
    }
    if b.terms.len() == 1 {
        let (m, c) = &b.terms[0];
        return monomial_gcd_with(m, c, a);
    }
    if a == b {
        return a.clone();
    }
    let va = a.vars();
    let vb = b.vars();
    // A variable present in only one argument is eliminated through the content.
    if let Some(v) = va.difference(&vb).next() {
        return gcd(&content_in(a, v), b);
    }
    if let Some(v) = vb.difference(&va).next() {
        return gcd(a, &content_in(b, v));
    }
    let v = va
        .iter()
        .next()
        .expect("non-constant polynomials have variables")
        .clone();
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = gcd(&ca, &cb);
    let mut p = a.exact_div(&ca).expect("content divides");
    let mut q = b.exact_div(&cb).expect("content divides");
    if p.degree_in(&v) < q.degree_in(&v) {
        std::mem::swap(&mut p, &mut q);
    }
    // Primitive polynomial remainder sequence in `v`.
    while !q.is_zero() {
        if q.degree_in(&v) == 0 {
            p = Poly::one();
            break;
        }
        let r = pseudo_rem(&p, &q, &v);
        p = q;
        q = if r.is_zero() { r } else { primitive_in(&r, &v) };
    }
    let p = primitive_in(&p, &v);
    p.mul(&c)
}

fn content_in(p: &Poly, v: &Var) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(v).values() {
        g = gcd(&g, c).with_positive_lead();
        if g.as_constant().is_some_and(|k| k.is_one()) {
            break;
        }
    }
    g
}

fn primitive_in(p: &Poly, v: &Var) -> Poly {
    let c = content_in(p, v);
    p.exact_div(&c)
        .expect("content divides")
        .with_positive_lead()
}

fn pseudo_rem(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let n = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc[&n].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let d = r.degree_in(v);
        if d < n {
            return r;
        }
        let lr = r.coeffs_in(v).remove(&d).expect("leading coefficient");
        let shift = Poly::from_coeffs_in(v, &BTreeMap::from([(d - n, lr)]));
        r = r.mul(&lb).sub(&shift.mul(b));
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::coord("x"))
    }
    fn y() -> Poly {
        Poly::var(Var::coord("y"))
    }
    fn k(c: i64) -> Poly {
        Poly::constant(BigInt::from(c))
    }

    #[test]
    fn arithmetic_and_rendering() {
        let p = x().add(&y()).pow(2);
        assert_eq!(p.to_string(), "x^2 + 2*x*y + y^2");
        assert_eq!(x().sub(&x()), Poly::zero());
        assert_eq!(x().mul(&k(-3)).to_string(), "-3*x");
    }

    #[test]
    fn exact_division() {
        let p = x().pow(2).sub(&y().pow(2));
        let q = p.exact_div(&x().sub(&y())).unwrap();
        assert_eq!(q, x().add(&y()));
        assert!(p.exact_div(&x().add(&k(1))).is_none());
    }

    #[test]
    fn gcd_univariate_and_multivariate() {
        let a = x().pow(2).sub(&x());
        let b = x().sub(&k(1));
        assert_eq!(a.gcd(&b), b);
        let common = x().mul(&y()).add(&k(1));
        let a = common.mul(&x().add(&y()));
        let b = common.mul(&x().sub(&y())).mul(&k(6));
        assert_eq!(a.gcd(&b), common);
        assert_eq!(k(4).mul(&x()).gcd(&k(6).mul(&x().pow(2))), k(2).mul(&x()));
        assert_eq!(x().gcd(&y()), k(1));
    }

    #[test]
    fn derivative_power_rule() {
        let p = x().pow(3).mul(&y());
        assert_eq!(
            p.derivative(&Var::coord("x")),
            k(3).mul(&x().pow(2)).mul(&y())
        );
        assert!(p.derivative(&Var::coord("z")).is_zero());
    }
}
