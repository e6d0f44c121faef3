use std::fmt;
use std::sync::Arc;

use super::claims::ClaimId;
use super::spec::{Factor, TwistedProductSpec};
use super::ProductError;
use crate::geometry::{ConnectionTable, GeometryError, Metric, VectorField};
use crate::graded::{Chart, EvenScalar, Parity, SuperScalar};

/// A tensor value: either a vector field or a scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Vector(VectorField),
    Scalar(SuperScalar),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Vector(v) => v.is_zero(),
            Value::Scalar(s) => s.is_zero(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Value::Vector(v) => v.size(),
            Value::Scalar(s) => s.size(),
        }
    }

    /// `self - other`; both sides must have the same kind.
    pub fn difference(&self, other: &Value) -> Result<Value, ProductError> {
        match (self, other) {
            (Value::Vector(a), Value::Vector(b)) => Ok(Value::Vector(a - b)),
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a - b)),
            _ => Err(ProductError::InvalidSpec("mismatched value kinds".into())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Vector(v) => v.fmt(f),
            Value::Scalar(s) => s.fmt(f),
        }
    }
}

/// A twisted product with its connections and the twist-derived quantities
/// that the closed forms share, computed once.
#[derive(Clone, Debug)]
pub struct TwistedProduct {
    spec: TwistedProductSpec,
    metric: Metric,
    lc: ConnectionTable,
    lc1: ConnectionTable,
    lc2: ConnectionTable,
    h_inv: SuperScalar,
    grad1_h: VectorField,
    grad2_h: VectorField,
    lap1_h: SuperScalar,
    grad1_h_h: SuperScalar,
}

fn signed<T>(minus: bool, v: T) -> T
where
    for<'a> &'a T: std::ops::Neg<Output = T>,
{
    if minus {
        -&v
    } else {
        v
    }
}

fn ratio(num: i64, den: i64) -> EvenScalar {
    EvenScalar::from_int(num)
        .div(&EvenScalar::from_int(den))
        .expect("nonzero denominator")
}

impl TwistedProduct {
    pub fn new(spec: &TwistedProductSpec) -> Result<Self, ProductError> {
        let metric = spec.build()?;
        let lc = ConnectionTable::levi_civita(&metric)?;
        let lc1 = ConnectionTable::levi_civita(spec.g1())?;
        let lc2 = ConnectionTable::levi_civita(spec.g2())?;
        let h = spec.twist();
        let h_inv = h.invert()?;
        let grad1_h = lc1.gradient(h)?;
        let grad2_h = lc2.gradient(h)?;
        let lap1_h = lc1.laplacian(h)?;
        let grad1_h_h = grad1_h.apply(h);
        Ok(TwistedProduct {
            spec: spec.clone(),
            metric,
            lc,
            lc1,
            lc2,
            h_inv,
            grad1_h,
            grad2_h,
            lap1_h,
            grad1_h_h,
        })
    }

    pub fn spec(&self) -> &TwistedProductSpec {
        &self.spec
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.spec.chart()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn connection(&self) -> &ConnectionTable {
        &self.lc
    }

    pub fn first_connection(&self) -> &ConnectionTable {
        &self.lc1
    }

    pub fn second_connection(&self) -> &ConnectionTable {
        &self.lc2
    }

    /// Every frame tuple matching a claim's signature, in lexicographic
    /// frame order.
    pub fn frame_tuples(&self, claim: ClaimId) -> Vec<Vec<usize>> {
        let mut tuples = vec![Vec::new()];
        for f in claim.signature() {
            let frame = match f {
                Factor::First => self.spec.g1().frame(),
                Factor::Second => self.spec.g2().frame(),
            };
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    frame.iter().map(move |&i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        tuples
    }

    fn check_args(&self, claim: ClaimId, args: &[usize]) -> Result<(), ProductError> {
        let sig = claim.signature();
        if sig.len() != args.len() {
            return Err(ProductError::WrongFactor(format!(
                "{claim} takes {} frame arguments",
                sig.len()
            )));
        }
        for (&i, &want) in args.iter().zip(sig) {
            if i >= self.chart().dim() || self.spec.factor_of(i) != Some(want) {
                let name = if i < self.chart().dim() {
                    format!("d{}", self.chart().coord(i).name)
                } else {
                    format!("#{i}")
                };
                return Err(ProductError::WrongFactor(format!(
                    "{claim}: `{name}` is not a frame of factor {}",
                    match want {
                        Factor::First => "M1",
                        Factor::Second => "M2",
                    }
                )));
            }
        }
        Ok(())
    }

    fn frame(&self, i: usize) -> VectorField {
        VectorField::frame(self.chart(), i)
    }

    fn par(&self, i: usize) -> Parity {
        self.chart().parity(i)
    }

    fn h(&self) -> &SuperScalar {
        self.spec.twist()
    }

    /// `X(h)/h` for the frame `X = ∂_i`.
    fn log_deriv(&self, i: usize) -> SuperScalar {
        &self.h().partial(i) * &self.h_inv
    }

    fn scalar(&self, e: EvenScalar) -> SuperScalar {
        SuperScalar::from_even(self.chart(), e)
    }

    fn g2(&self, a: usize, b: usize) -> Result<SuperScalar, ProductError> {
        Ok(self.spec.g2().entry(a, b)?.clone())
    }

    fn g_mu(&self, a: usize, b: usize) -> Result<SuperScalar, ProductError> {
        Ok(self.metric.entry(a, b)?.clone())
    }

    /// `num/den · bracket`, where a vanishing denominator is tolerated only
    /// when the bracket it multiplies is exactly zero.
    fn guarded(
        &self,
        num: i64,
        den: i64,
        bracket: VectorField,
        what: &str,
    ) -> Result<VectorField, ProductError> {
        if den == 0 {
            if bracket.is_zero() {
                return Ok(bracket);
            }
            return Err(GeometryError::UndefinedDenominator(what.into()).into());
        }
        Ok(bracket.scale_left(&self.scalar(ratio(num, den))))
    }

    /// `X·Ric(Y,T) - (-1)^{|Y||T|} Ric(X,T) Y` for a given connection.
    fn ricci_bracket(
        &self,
        lc: &ConnectionTable,
        x: usize,
        y: usize,
        t: usize,
    ) -> Result<VectorField, ProductError> {
        let (fx, fy, ft) = (self.frame(x), self.frame(y), self.frame(t));
        let a = fx.scale_right(&lc.ricci(&fy, &ft)?);
        let b = fy.scale_left(&lc.ricci(&fx, &ft)?);
        Ok(&a - &signed(self.par(y).koszul(self.par(t)), b))
    }

    /// Factor-level `K` with denominator `n - 1`.
    fn factor_k(
        &self,
        lc: &ConnectionTable,
        n: i64,
        label: &str,
        x: usize,
        y: usize,
        t: usize,
    ) -> Result<VectorField, ProductError> {
        let r = lc.curvature(&self.frame(x), &self.frame(y), &self.frame(t))?;
        let b = self.ricci_bracket(lc, x, y, t)?;
        Ok(&r - &self.guarded(1, n - 1, b, label)?)
    }

    fn mn(&self) -> i64 {
        self.spec.n1() + self.spec.n2()
    }

    /// The quantity on the left of the claim, computed on the product metric.
    pub fn direct_value(&self, claim: ClaimId, args: &[usize]) -> Result<Value, ProductError> {
        self.check_args(claim, args)?;
        let f: Vec<VectorField> = args.iter().map(|&i| self.frame(i)).collect();
        let lc = &self.lc;
        Ok(match claim {
            ClaimId::L311 | ClaimId::L312 | ClaimId::L313 | ClaimId::L314 => {
                Value::Vector(lc.covariant_derivative(&f[0], &f[1])?)
            }
            ClaimId::P321
            | ClaimId::P322
            | ClaimId::P323
            | ClaimId::P324
            | ClaimId::P325
            | ClaimId::P326 => Value::Vector(lc.curvature(&f[0], &f[1], &f[2])?),
            ClaimId::P331 | ClaimId::P332 | ClaimId::P333 | ClaimId::P334 | ClaimId::T42 => {
                Value::Scalar(lc.ricci(&f[0], &f[1])?)
            }
            ClaimId::T341
            | ClaimId::T342
            | ClaimId::T343
            | ClaimId::T344
            | ClaimId::T345
            | ClaimId::T346
            | ClaimId::T43 => Value::Vector(lc.k_tensor(&f[0], &f[1], &f[2])?),
        })
    }

    /// The right-hand side of the claim exactly as stated, built from
    /// factor-level quantities.
    pub fn closed_form(&self, claim: ClaimId, args: &[usize]) -> Result<Value, ProductError> {
        self.check_args(claim, args)?;
        let p = |k: usize| self.par(args[k]);
        let f = |k: usize| self.frame(args[k]);
        let q_m2 = self.spec.n2();
        let mn = self.mn();
        match claim {
            ClaimId::L311 => Ok(Value::Vector(self.lc1.covariant_derivative(&f(0), &f(1))?)),
            ClaimId::L312 => Ok(Value::Vector(f(1).scale_left(&self.log_deriv(args[0])))),
            ClaimId::L313 => Ok(Value::Vector(signed(
                p(0).koszul(p(1)),
                f(0).scale_left(&self.log_deriv(args[1])),
            ))),
            ClaimId::L314 => {
                let (u, w) = (args[0], args[1]);
                let g2uw = self.g2(u, w)?;
                let a = f(1).scale_left(&self.log_deriv(u));
                let b = signed(p(0).koszul(p(1)), f(0).scale_left(&self.log_deriv(w)));
                // the sign's free index is read off each gradient component
                let mut c = VectorField::zero(self.chart());
                for (&v, coeff) in self.grad2_h.components() {
                    let term = VectorField::frame(self.chart(), v)
                        .scale_left(&(&(&g2uw * &self.h_inv) * coeff));
                    c = &c + &signed(self.par(v).koszul(p(0) + p(1)), term);
                }
                let d = self.grad1_h.scale_left(&(self.h() * &g2uw));
                let e = self.lc2.covariant_derivative(&f(0), &f(1))?;
                Ok(Value::Vector(&(&(&(&a + &b) - &c) - &d) + &e))
            }
            ClaimId::P321 => Ok(Value::Vector(self.lc1.curvature(&f(0), &f(1), &f(2))?)),
            ClaimId::P322 => {
                let (v, x, y) = (args[0], &f(1), &f(2));
                let hess = self.lc1.hessian(self.h(), x, y)?;
                let val = f(0).scale_left(&(&hess * &self.h_inv));
                Ok(Value::Vector(signed(!self.par(v).koszul(p(1) + p(2)), val)))
            }
            ClaimId::P323 => Ok(Value::Vector(VectorField::zero(self.chart()))),
            ClaimId::P324 => {
                let lx = self.log_deriv(args[2]);
                let a = signed(p(1).koszul(p(2)), f(1).scale_left(&f(0).apply(&lx)));
                let b = signed(p(0).koszul(p(1) + p(2)), f(0).scale_left(&f(1).apply(&lx)));
                Ok(Value::Vector(&a - &b))
            }
            ClaimId::P325 => {
                let (x, v, w) = (args[0], args[1], args[2]);
                let lx = self.log_deriv(x);
                let a = signed(
                    (p(0) + p(1)).koszul(p(2)),
                    f(1).scale_left(&f(2).apply(&lx)),
                );
                let grad = self.lc2.gradient(&lx)?;
                let b = grad.scale_left(&self.g2(w, v)?);
                let b_sign = p(0).koszul(p(1) + p(2)) ^ p(1).koszul(p(2));
                let nabla = self.lc1.covariant_derivative(&f(0), &self.grad1_h)?;
                let c = nabla.scale_left(&(&self.g_mu(v, w)? * &self.h_inv));
                let c_sign = p(0).koszul(p(1) + p(2));
                Ok(Value::Vector(
                    &(&a - &signed(b_sign, b)) - &signed(c_sign, c),
                ))
            }
            ClaimId::P326 => {
                let (v, w, u) = (args[0], args[1], args[2]);
                let r2 = self.lc2.curvature(&f(0), &f(1), &f(2))?;
                let a = self
                    .lc1
                    .gradient(&self.log_deriv(w))?
                    .scale_left(&self.g_mu(v, u)?);
                let a = signed(p(2).koszul(p(1)), a);
                let b = self
                    .lc1
                    .gradient(&self.log_deriv(v))?
                    .scale_left(&self.g_mu(w, u)?);
                let b = signed((p(2) + p(1)).koszul(p(0)), b);
                let k = &self.grad1_h_h * &self.h_inv.pow(2);
                let c = f(0).scale_left(&(&k * &self.g2(w, u)?));
                let c = signed(p(0).koszul(p(1) + p(2)), c);
                let d = f(1).scale_left(&(&k * &self.g2(v, u)?));
                let d = signed(p(1).koszul(p(2)), d);
                Ok(Value::Vector(&(&(&(&r2 + &a) - &b) - &c) + &d))
            }
            ClaimId::P331 => {
                let ric = self.lc1.ricci(&f(0), &f(1))?;
                let hess = self.lc1.hessian(self.h(), &f(0), &f(1))?;
                let t = (&hess * &self.h_inv).scale_int(q_m2);
                Ok(Value::Scalar(&ric - &t))
            }
            ClaimId::P332 | ClaimId::P333 => {
                let (l, j) = if claim == ClaimId::P332 {
                    (args[0], args[1])
                } else {
                    (args[1], args[0])
                };
                let val = self.log_deriv(l).partial(j).scale_int(-(q_m2 - 1));
                let minus = claim == ClaimId::P332 && self.par(l).koszul(self.par(j));
                Ok(Value::Scalar(signed(minus, val)))
            }
            ClaimId::P334 => {
                let ric = self.lc2.ricci(&f(0), &f(1))?;
                let bracket = &(&self.lap1_h * &self.h_inv)
                    + &(&self.grad1_h_h * &self.h_inv.pow(2)).scale_int(q_m2 - 1);
                let t = &self.g_mu(args[0], args[1])? * &bracket;
                Ok(Value::Scalar(&ric - &t))
            }
            ClaimId::T341 => {
                let (x, y, z) = (args[0], args[1], args[2]);
                let k1 = self.factor_k(&self.lc1, self.spec.n1(), "n1-1", x, y, z)?;
                let b1 = self.ricci_bracket(&self.lc1, x, y, z)?;
                let n1 = self.spec.n1();
                let t2 = self.guarded(self.spec.n2(), (mn - 1) * (n1 - 1), b1, "(m-n-1)(n1-1)")?;
                let hyz = self.lc1.hessian(self.h(), &f(1), &f(2))?;
                let hxz = self.lc1.hessian(self.h(), &f(0), &f(2))?;
                let hb =
                    &f(0).scale_right(&hyz) - &signed(p(1).koszul(p(2)), f(1).scale_left(&hxz));
                let hb = hb.scale_left(&self.h_inv);
                let t3 = self.guarded(q_m2, mn - 1, hb, "m-n-1")?;
                Ok(Value::Vector(&(&k1 + &t2) + &t3))
            }
            ClaimId::T342 | ClaimId::T43 => {
                let (x, y, q) = (args[0], args[1], args[2]);
                let a = f(1).scale_left(&self.log_deriv(x).partial(q));
                let a = signed(p(1).koszul(p(2)), a);
                let b = f(0).scale_right(&self.log_deriv(y).partial(q));
                let val = self.guarded(-(q_m2 - 1), mn - 1, &a - &b, "m-n-1")?;
                Ok(Value::Vector(val))
            }
            ClaimId::T343 => {
                let (u, x) = (args[0], args[2]);
                let lx = self.log_deriv(x);
                let a = signed(p(1).koszul(p(2)), f(1).scale_left(&f(0).apply(&lx)));
                let b = signed(p(0).koszul(p(1) + p(2)), f(0).scale_left(&f(1).apply(&lx)));
                // `U·X(X(h)/h)` as printed
                let c = signed(p(1).koszul(p(2)), f(0).scale_right(&f(2).apply(&lx)));
                let d = signed(
                    p(2).koszul(p(1) + p(0)),
                    f(1).scale_left(&f(2).apply(&self.log_deriv(u))),
                );
                let t = self.guarded(q_m2 - 1, mn - 1, &c - &d, "m-n-1")?;
                Ok(Value::Vector(&(&a + &b) + &t))
            }
            ClaimId::T344 => {
                let v = args[1];
                let hess = self.lc1.hessian(self.h(), &f(0), &f(2))?;
                let ric = self.lc1.ricci(&f(0), &f(2))?;
                let s = &hess.scale_int(mn - q_m2 - 1) + &ric;
                let a = signed(p(1).koszul(p(2)), f(1).scale_left(&s));
                let a = self.guarded(1, mn - 1, a, "m-n-1")?;
                let b = f(0).scale_right(&f(2).apply(&self.log_deriv(v)));
                let b = self.guarded(q_m2 - 1, mn - 1, b, "m-n-1")?;
                Ok(Value::Vector(&a + &b))
            }
            ClaimId::T345 => {
                let (u, v) = (args[1], args[2]);
                let lx = self.log_deriv(args[0]);
                let a = signed(p(0).koszul(p(2) + p(1)), f(1).scale_left(&f(2).apply(&lx)));
                let s = &(self.h() * &self.lap1_h) + &self.grad1_h_h.scale_int(q_m2 - 1);
                // scalar term in a vector slot, attached to X
                let b = f(0).scale_right(&(&self.g2(u, v)? * &s));
                let b = signed(p(0).koszul(p(2) + p(1)) ^ p(1).koszul(p(2)), b);
                let c = signed(p(2).koszul(p(1)), f(1).scale_left(&f(2).apply(&lx)));
                let c = self.guarded(q_m2 - 1, mn - 1, c, "m-n-1")?;
                Ok(Value::Vector(&(&a - &b) + &c))
            }
            ClaimId::T346 => {
                let (u, v, q) = (args[0], args[1], args[2]);
                let k2 = self.factor_k(&self.lc2, self.spec.n2(), "n2-1", u, v, q)?;
                let b2 = self.ricci_bracket(&self.lc2, u, v, q)?;
                let n2 = self.spec.n2();
                let t2 = self.guarded(self.spec.n1(), (mn - 1) * (n2 - 1), b2, "(m-n-1)(n2-1)")?;
                let a = self
                    .lc2
                    .gradient(&self.log_deriv(v))?
                    .scale_left(&self.g_mu(u, q)?);
                let a = signed(p(1).koszul(p(2)), a);
                let b = self
                    .lc2
                    .gradient(&self.log_deriv(u))?
                    .scale_left(&self.g_mu(v, q)?);
                let b = signed(p(0).koszul(p(1) + p(2)), b);
                let k = &self.grad1_h_h * &self.h_inv.pow(2);
                let c = signed(
                    p(0).koszul(p(1) + p(2)),
                    f(0).scale_left(&(&k * &self.g2(v, q)?)),
                );
                let d = signed(p(1).koszul(p(2)), f(1).scale_left(&(&k * &self.g2(u, q)?)));
                let s = &(self.h() * &self.lap1_h) + &self.grad1_h_h.scale_int(q_m2 - 1);
                let e = f(0).scale_right(&(&self.g2(v, q)? * &s));
                let e = self.guarded(1, mn - 1, e, "m-n-1")?;
                let g = signed(p(1).koszul(p(2)), f(1).scale_left(&(&self.g2(u, q)? * &s)));
                let g = self.guarded(1, mn - 1, g, "m-n-1")?;
                let sum = &(&(&(&(&(&k2 + &t2) + &a) - &b) - &c) + &d);
                Ok(Value::Vector(&(sum + &e) - &g))
            }
            ClaimId::T42 => {
                let (x, v) = (args[0], args[1]);
                let val = self.log_deriv(x).partial(v).scale_int(-(q_m2 - 1));
                Ok(Value::Scalar(signed(self.par(x).koszul(self.par(v)), val)))
            }
        }
    }

    /// The separability numerator `h ∂_J ∂_I h - (-1)^{|I||J|} ∂_I h ∂_J h`
    /// for `I` in the first factor and `J` in the second.
    pub fn separability_residual(&self, i: usize, j: usize) -> SuperScalar {
        let h = self.h();
        let hi = h.partial(i);
        let a = h * &hi.partial(j);
        let b = &hi * &h.partial(j);
        &a - &signed(self.par(i).koszul(self.par(j)), b)
    }
}

impl From<GeometryError> for ProductError {
    fn from(e: GeometryError) -> Self {
        ProductError::Geometry(e)
    }
}
