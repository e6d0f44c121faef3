//! The even coefficient field: reduced fractions of integer polynomials in
//! even coordinates and jet symbols.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::chart::SymbolTable;
use super::poly::Poly;
use super::var::{Jet, Var};

/// Canonical fraction `num/den`: `gcd(num, den) = 1`, the leading
/// coefficient of `den` is positive, and zero is `0/1`. Two values are equal
/// iff their representations are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvenScalar {
    num: Poly,
    den: Poly,
}

impl Default for EvenScalar {
    fn default() -> Self {
        EvenScalar::zero()
    }
}

impl EvenScalar {
    pub fn zero() -> Self {
        EvenScalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        EvenScalar::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        EvenScalar::from_poly(Poly::constant(BigInt::from(c)))
    }

    pub fn from_bigint(c: BigInt) -> Self {
        EvenScalar::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        EvenScalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        EvenScalar::from_poly(Poly::var(v))
    }

    pub fn coord(name: &str) -> Self {
        EvenScalar::var(Var::coord(name))
    }

    /// Builds `num/den` in canonical form. Panics if `den` is zero.
    pub fn fraction(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return EvenScalar::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        EvenScalar::signed(num, den)
    }

    fn signed(num: Poly, den: Poly) -> Self {
        if den.lead_coeff().is_negative() {
            EvenScalar {
                num: num.neg(),
                den: den.neg(),
            }
        } else {
            EvenScalar { num, den }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Number of polynomial terms, used as an expression-size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn neg(&self) -> Self {
        EvenScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &EvenScalar) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return EvenScalar::from_poly(num);
            }
            return EvenScalar::fraction(num, self.den.clone());
        }
        let g = self.den.gcd(&other.den);
        let (sd, od) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (
                self.den.exact_div(&g).expect("gcd divides"),
                other.den.exact_div(&g).expect("gcd divides"),
            )
        };
        let num = self.num.mul(&od).add(&other.num.mul(&sd));
        let den = sd.mul(&other.den);
        if num.is_zero() {
            return EvenScalar::zero();
        }
        if g.is_one() {
            return EvenScalar::signed(num, den);
        }
        let g2 = num.gcd(&g);
        if g2.is_one() {
            EvenScalar::signed(num, den)
        } else {
            EvenScalar::signed(
                num.exact_div(&g2).expect("gcd divides"),
                den.exact_div(&g2).expect("gcd divides"),
            )
        }
    }

    pub fn sub(&self, other: &EvenScalar) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &EvenScalar) -> Self {
        if self.is_zero() || other.is_zero() {
            return EvenScalar::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return EvenScalar::from_poly(self.num.mul(&other.num));
        }
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let div = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.exact_div(g).expect("gcd divides")
            }
        };
        let num = div(&self.num, &g1).mul(&div(&other.num, &g2));
        let den = div(&self.den, &g2).mul(&div(&other.den, &g1));
        EvenScalar::signed(num, den)
    }

    pub fn scale(&self, c: i64) -> Self {
        self.mul(&EvenScalar::from_int(c))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(EvenScalar::signed(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &EvenScalar) -> Option<Self> {
        Some(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        EvenScalar {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Derivative along the even coordinate `coord`, with jets of opaque
    /// symbols advancing by one order and registered closed forms applied.
    pub fn partial(&self, coord: &str, symbols: &SymbolTable) -> Self {
        let dn = poly_partial(&self.num, coord, symbols);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_partial(&self.den, coord, symbols);
        let den = EvenScalar::from_poly(self.den.clone());
        // (n/d)' = n'/d - (n/d) d'/d
        dn.sub(&self.mul(&dd))
            .mul(&den.inv().expect("nonzero denominator"))
    }
}

fn var_partial(v: &Var, coord: &str, symbols: &SymbolTable) -> EvenScalar {
    match v {
        Var::Coord(name) => {
            if name.as_ref() == coord {
                EvenScalar::one()
            } else {
                EvenScalar::zero()
            }
        }
        Var::Jet(jet) => {
            let Some(pos) = jet.deps.iter().position(|d| d.as_ref() == coord) else {
                return EvenScalar::zero();
            };
            if jet.total_order() == 0 {
                if let Some(closed) = symbols
                    .get(jet.symbol.as_ref())
                    .and_then(|s| s.registered_derivative(coord))
                {
                    return closed.clone();
                }
            }
            EvenScalar::var(Var::Jet(Arc::new(Jet::bumped(jet, pos))))
        }
    }
}

fn poly_partial(p: &Poly, coord: &str, symbols: &SymbolTable) -> EvenScalar {
    let mut acc = EvenScalar::zero();
    for v in p.vars() {
        let dv = var_partial(&v, coord, symbols);
        if dv.is_zero() {
            continue;
        }
        let dp = EvenScalar::from_poly(p.derivative(&v));
        acc = acc.add(&dp.mul(&dv));
    }
    acc
}

fn is_single_factor(p: &Poly) -> bool {
    match p.terms() {
        [(m, c)] => m.is_one() || (c.is_one() && m.factors().len() == 1),
        _ => false,
    }
}

impl EvenScalar {
    /// Whether the rendering is a single signed product without `+`/`-`
    /// between terms and without a denominator.
    pub(crate) fn is_atomic_product(&self) -> bool {
        self.den.is_one() && self.num.len() <= 1
    }
}

impl fmt::Display for EvenScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if is_single_factor(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl From<i64> for EvenScalar {
    fn from(c: i64) -> Self {
        EvenScalar::from_int(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> EvenScalar {
        EvenScalar::coord("x")
    }
    fn y() -> EvenScalar {
        EvenScalar::coord("y")
    }

    #[test]
    fn fraction_addition_normalizes() {
        // (1/x) + (1/y) = (x + y)/(x y)
        let s = x().inv().unwrap().add(&y().inv().unwrap());
        let expected =
            EvenScalar::fraction(x().numer().add(y().numer()), x().numer().mul(y().numer()));
        assert_eq!(s, expected);
        assert_eq!(s.to_string(), "(x + y)/(x*y)");
    }

    #[test]
    fn cancellation_is_canonical() {
        // x/(x^2 - x) - 1/(x - 1) = 0
        let one = EvenScalar::one();
        let a = x().div(&x().pow(2).sub(&x())).unwrap();
        let b = one.div(&x().sub(&one)).unwrap();
        assert!(a.sub(&b).is_zero());
        assert_eq!(a, b);
    }

    #[test]
    fn sign_lives_in_the_numerator() {
        let v = EvenScalar::one().div(&x().neg()).unwrap();
        assert_eq!(v.to_string(), "-1/x");
        assert_eq!(v.denom(), x().numer());
    }

    #[test]
    fn rendering() {
        assert_eq!(
            x().scale(3)
                .div(&EvenScalar::from_int(6))
                .unwrap()
                .to_string(),
            "x/2"
        );
        let q = x().div(&y().pow(2)).unwrap();
        assert_eq!(q.to_string(), "x/y^2");
        let q = x()
            .div(&x().mul(&y()).scale(2).add(&EvenScalar::one()))
            .unwrap();
        assert_eq!(q.to_string(), "x/(2*x*y + 1)");
    }

    #[test]
    fn quotient_rule() {
        let table = SymbolTable::default();
        // d/dx (x/(x+y)) = y/(x+y)^2
        let s = x().add(&y());
        let q = x().div(&s).unwrap();
        let expected = y().div(&s.pow(2)).unwrap();
        assert_eq!(q.partial("x", &table), expected);
    }
}
