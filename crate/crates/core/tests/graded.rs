use std::sync::Arc;

use proptest::prelude::*;
use supertwist::graded::{Chart, EvenScalar, FunctionSymbol, Parity, SuperScalar};

const EVEN: [&str; 3] = ["x", "y", "z"];
const ODD: [&str; 4] = ["a", "b", "c", "d"];

fn chart() -> Arc<Chart> {
    Chart::from_names(&EVEN, &ODD)
        .unwrap()
        .with_symbol(FunctionSymbol::new("f", &["x", "y"], true))
        .unwrap()
        .into_shared()
}

/// One term: coefficient, exponents of x, y, z, f and an odd subset.
type Term = (i64, [u32; 4], u32);

fn term() -> impl Strategy<Value = Term> {
    (
        -4i64..=4,
        [0u32..=2, 0u32..=2, 0u32..=1, 0u32..=1],
        0u32..16,
    )
        .prop_filter("total degree at most 4", |(_, e, odd)| {
            e.iter().sum::<u32>() + odd.count_ones() <= 4
        })
}

fn build(ch: &Arc<Chart>, terms: &[Term]) -> SuperScalar {
    let f = ch.symbol("f").unwrap().value();
    let mut out = SuperScalar::zero(ch);
    for (c, e, odd) in terms {
        let mut body = EvenScalar::from_int(*c);
        for (k, name) in EVEN.iter().enumerate() {
            body = body.mul(&EvenScalar::coord(name).pow(e[k]));
        }
        body = body.mul(&f.pow(e[3]));
        let mut t = SuperScalar::from_even(ch, body);
        for (k, name) in ODD.iter().enumerate() {
            if odd & (1 << k) != 0 {
                t = &t * &SuperScalar::coordinate(ch, name).unwrap();
            }
        }
        out = &out + &t;
    }
    out
}

fn expr() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(term(), 0..5)
}

fn homogeneous() -> impl Strategy<Value = (Vec<Term>, bool)> {
    (expr(), any::<bool>())
}

fn part(ch: &Arc<Chart>, (t, odd): &(Vec<Term>, bool)) -> SuperScalar {
    build(ch, t).part(if *odd { Parity::Odd } else { Parity::Even })
}

fn sign(ch: &Arc<Chart>, minus: bool) -> SuperScalar {
    SuperScalar::constant(ch, if minus { -1 } else { 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn graded_commutativity(p in homogeneous(), q in homogeneous()) {
        let ch = chart();
        let (a, b) = (part(&ch, &p), part(&ch, &q));
        let s = sign(&ch, p.1 && q.1);
        prop_assert_eq!(&a * &b, &s * &(&b * &a));
    }

    #[test]
    fn ring_laws(p in expr(), q in expr(), r in expr()) {
        let ch = chart();
        let (a, b, c) = (build(&ch, &p), build(&ch, &q), build(&ch, &r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn leibniz_rule(p in homogeneous(), q in expr(), i in 0usize..7) {
        let ch = chart();
        let (a, b) = (part(&ch, &p), build(&ch, &q));
        let s = sign(&ch, p.1 && ch.parity(i).is_odd());
        let lhs = (&a * &b).partial(i);
        let rhs = &(&a.partial(i) * &b) + &(&s * &(&a * &b.partial(i)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_derivatives_graded_commute(p in expr(), i in 0usize..7, j in 0usize..7) {
        let ch = chart();
        let a = build(&ch, &p);
        let s = sign(&ch, ch.parity(i).is_odd() && ch.parity(j).is_odd());
        let ij = a.partial(j).partial(i);
        let ji = a.partial(i).partial(j);
        prop_assert_eq!(&ij, &(&s * &ji));
        if i == j && ch.parity(i).is_odd() {
            prop_assert!(ij.is_zero());
        }
    }

    #[test]
    fn partials_respect_parity(p in homogeneous(), i in 0usize..7) {
        let ch = chart();
        let a = part(&ch, &p);
        let d = a.partial(i);
        if !d.is_zero() {
            let expected = if p.1 ^ ch.parity(i).is_odd() { Parity::Odd } else { Parity::Even };
            prop_assert_eq!(d.parity(), Some(expected));
        }
    }

    #[test]
    fn inverse_is_two_sided(p in expr(), q in expr()) {
        let ch = chart();
        let a = build(&ch, &p).part(Parity::Even);
        let shift = build(&ch, &q).body().mul(&EvenScalar::coord("x")).add(&EvenScalar::one());
        let unit = &a + &SuperScalar::from_even(&ch, shift);
        prop_assume!(!unit.body().is_zero());
        let inv = unit.invert().unwrap();
        prop_assert!((&unit * &inv).is_one());
        prop_assert!((&inv * &unit).is_one());
        prop_assert_eq!(inv.invert().unwrap(), unit);
    }

    #[test]
    fn nilpotents_are_not_invertible(p in expr()) {
        let ch = chart();
        let a = build(&ch, &p);
        let body = SuperScalar::from_even(&ch, a.body());
        prop_assert!((&a - &body).part(Parity::Even).invert().is_err());
        prop_assert!(a.part(Parity::Odd).invert().is_err());
    }

    #[test]
    fn zero_test_is_a_congruence(p in expr(), q in expr(), r in expr()) {
        let ch = chart();
        let (a, b, c) = (build(&ch, &p), build(&ch, &q), build(&ch, &r));
        prop_assert!((&(&(&a + &b) - &b) - &a).is_zero());
        let ab = &a - &b;
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert!((&(&(&a + &c) - &c) - &a).is_zero());
        // Equal inputs give equal products and derivatives.
        let a2 = &(&a + &c) - &c;
        prop_assert_eq!(&a2 * &b, &a * &b);
        prop_assert_eq!(a2.partial(0), a.partial(0));
        let q2 = &(&a * &c) - &(&b * &c);
        prop_assert_eq!(q2, &ab * &c);
    }

    #[test]
    fn quotient_round_trip(p in expr(), q in expr()) {
        let ch = chart();
        let a = build(&ch, &p);
        let shift = SuperScalar::from_even(&ch, EvenScalar::coord("y").add(&EvenScalar::one()));
        let d = &build(&ch, &q).part(Parity::Even) + &shift;
        prop_assume!(!d.body().is_zero());
        let quot = a.checked_div(&d).unwrap();
        prop_assert_eq!(&quot * &d, a);
    }
}

#[test]
fn odd_square_vanishes() {
    let ch = chart();
    let a = SuperScalar::coordinate(&ch, "a").unwrap();
    let b = SuperScalar::coordinate(&ch, "b").unwrap();
    assert!((&a * &a).is_zero());
    assert_eq!(&a * &b, -&(&b * &a));
    assert_eq!((&a * &b).partial(ch.index_of("b").unwrap()), -&a);
}
