use rayon::prelude::*;
use serde::Serialize;

use super::claims::ClaimId;
use super::formulas::TwistedProduct;
use super::spec::{Factor, TwistedProductSpec};
use super::verify::{frame_names, CaseResult, ClaimResult};
use super::ProductError;
use crate::geometry::{GeometryError, VectorField};
use crate::graded::{EvenScalar, Monomial, Poly, SuperScalar, Var};

/// Direct mixed Ricci component for one pair of frames.
#[derive(Clone, Debug)]
pub struct MixedRicci {
    pub frames: Vec<String>,
    /// `Ric(X,V)` on the product metric.
    pub ricci: SuperScalar,
    /// `V(X(h)/h)`.
    pub log_mixed: SuperScalar,
    /// The closed-form prefactor `-(q - m2 - 1)`.
    pub prefactor: i64,
}

/// Mixed Ricci components over all pairs `(X, V)`; the product is mixed
/// Ricci-flat iff every `ricci` entry vanishes.
pub fn mixed_ricci_flat_residuals(tp: &TwistedProduct) -> Result<Vec<MixedRicci>, ProductError> {
    let prefactor = -(tp.spec().n2() - 1);
    tp.frame_tuples(ClaimId::T42)
        .par_iter()
        .map(|args| {
            let ricci = match tp.direct_value(ClaimId::T42, args)? {
                super::Value::Scalar(s) => s,
                super::Value::Vector(_) => unreachable!("Ricci is a scalar"),
            };
            let h = tp.spec().twist();
            let log_mixed = (&h.partial(args[0]) * &h.invert()?).partial(args[1]);
            Ok(MixedRicci {
                frames: frame_names(tp, args),
                ricci,
                log_mixed,
                prefactor,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Factorization {
    /// Every mixed second derivative of `ln h` vanishes. The factors are the
    /// first- and second-factor parts of `h` when it is a product of
    /// single-factor terms.
    Separable { factors: Option<(String, String)> },
    /// Mixed pairs whose separability numerator is nonzero.
    NotSeparable {
        witnesses: Vec<(Vec<String>, String)>,
    },
}

impl Factorization {
    pub fn is_separable(&self) -> bool {
        matches!(self, Factorization::Separable { .. })
    }
}

/// Decides whether `ln h` splits as a sum over the two factors.
pub fn warped_factorization(tp: &TwistedProduct) -> Factorization {
    let mut witnesses = Vec::new();
    for args in tp.frame_tuples(ClaimId::T42) {
        let r = tp.separability_residual(args[0], args[1]);
        if !r.is_zero() {
            witnesses.push((frame_names(tp, &args), r.to_string()));
        }
    }
    if !witnesses.is_empty() {
        return Factorization::NotSeparable { witnesses };
    }
    Factorization::Separable {
        factors: split_monomial(tp.spec()),
    }
}

fn split_monomial(spec: &TwistedProductSpec) -> Option<(String, String)> {
    let h = spec.twist();
    if h.terms().len() != 1 {
        return None;
    }
    let body = h.body();
    if !body.denom().is_one() || body.numer().len() != 1 {
        return None;
    }
    let (mono, coeff) = &body.numer().terms()[0];
    let chart = spec.chart();
    let side = |name: &str| chart.index_of(name).and_then(|i| spec.factor_of(i));
    let mut first = Poly::constant(coeff.clone());
    let mut second = Poly::one();
    for (v, e) in mono.factors() {
        let owner = match v {
            Var::Coord(name) => side(name)?,
            Var::Jet(j) => {
                if j.total_order() != 0 {
                    return None;
                }
                let owners: Vec<Factor> = j.deps.iter().map(|d| side(d)).collect::<Option<_>>()?;
                if owners.iter().all(|&o| o == Factor::First) {
                    Factor::First
                } else if owners.iter().all(|&o| o == Factor::Second) {
                    Factor::Second
                } else {
                    return None;
                }
            }
        };
        let m = Poly::monomial(Monomial::var(v.clone()), 1.into()).pow(*e);
        match owner {
            Factor::First => first = first.mul(&m),
            Factor::Second => second = second.mul(&m),
        }
    }
    Some((
        EvenScalar::from_poly(first).to_string(),
        EvenScalar::from_poly(second).to_string(),
    ))
}

/// Which mixed `K` components decide warpedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KBranch {
    /// `K(X,Y)Q`, used when `q - m2 - 1 != 0`.
    XYQ,
    /// `K(U,V)X`, used when `q - m2 - 1 = 0`.
    UVX,
}

#[derive(Clone, Debug)]
pub struct W2FlatReport {
    /// The branch whose components decide warpedness.
    pub branch: KBranch,
    /// `K(X,Y)Q` over all frame tuples.
    pub xyq: Vec<(Vec<String>, VectorField)>,
    /// `K(U,V)X` over all frame tuples.
    pub uvx: Vec<(Vec<String>, VectorField)>,
    pub separable: bool,
}

impl W2FlatReport {
    /// Components of the deciding branch, plus `K(X,Y)Q` which the
    /// equivalence is phrased in.
    pub fn checked(&self) -> impl Iterator<Item = &(Vec<String>, VectorField)> {
        let extra: &[_] = match self.branch {
            KBranch::XYQ => &[],
            KBranch::UVX => &self.uvx,
        };
        self.xyq.iter().chain(extra)
    }

    pub fn all_zero(&self) -> bool {
        self.checked().all(|(_, k)| k.is_zero())
    }

    /// Vanishing of the checked components coincides with separability.
    pub fn equivalence_holds(&self) -> bool {
        self.all_zero() == self.separable
    }
}

fn k_components(
    tp: &TwistedProduct,
    a: Factor,
    b: Factor,
) -> Result<Vec<(Vec<String>, VectorField)>, ProductError> {
    let frame = |f: Factor| match f {
        Factor::First => tp.spec().g1().frame(),
        Factor::Second => tp.spec().g2().frame(),
    };
    let mut tuples = Vec::new();
    for &i in frame(a) {
        for &j in frame(a) {
            for &k in frame(b) {
                tuples.push([i, j, k]);
            }
        }
    }
    let chart = tp.chart();
    let lc = tp.connection();
    tuples
        .par_iter()
        .map(|t| {
            let f: Vec<VectorField> = t.iter().map(|&i| VectorField::frame(chart, i)).collect();
            Ok((frame_names(tp, t), lc.k_tensor(&f[0], &f[1], &f[2])?))
        })
        .collect()
}

/// Evaluates `K(X,Y)Q` and `K(U,V)X` on every frame tuple and compares their
/// vanishing with separability of `ln h`.
pub fn w2_flat_check(tp: &TwistedProduct) -> Result<W2FlatReport, ProductError> {
    let mn = tp.spec().n1() + tp.spec().n2();
    if mn - 1 == 0 {
        return Err(GeometryError::UndefinedDenominator("m-n-1".into()).into());
    }
    let branch = if tp.spec().n2() - 1 != 0 {
        KBranch::XYQ
    } else {
        KBranch::UVX
    };
    Ok(W2FlatReport {
        branch,
        xyq: k_components(tp, Factor::First, Factor::Second)?,
        uvx: k_components(tp, Factor::Second, Factor::First)?,
        separable: warped_factorization(tp).is_separable(),
    })
}

pub(crate) fn mixed_ricci_check(tp: &TwistedProduct) -> ClaimResult {
    let id = ClaimId::T42;
    let residuals = match mixed_ricci_flat_residuals(tp) {
        Ok(r) => r,
        Err(e) => return failed(id, format!("error: {e}")),
    };
    let applies = tp.spec().n2() - 1 != 0;
    let cases: Vec<CaseResult> = residuals
        .iter()
        .map(|r| {
            let pass = !applies || r.ricci.is_zero() == r.log_mixed.is_zero();
            CaseResult {
                frames: r.frames.clone(),
                residual: r.ricci.to_string(),
                pass,
                direct: None,
                closed: None,
            }
        })
        .collect();
    let pass = cases.iter().all(|c| c.pass);
    ClaimResult {
        id,
        tier: id.tier(),
        cases,
        pass,
        note: (!applies).then(|| "q-m2-1 = 0: the equivalence is not asserted".to_string()),
    }
}

pub(crate) fn k_mixed_check(tp: &TwistedProduct) -> ClaimResult {
    let id = ClaimId::T43;
    let report = match w2_flat_check(tp) {
        Ok(r) => r,
        Err(e) => return failed(id, format!("error: {e}")),
    };
    let cases: Vec<CaseResult> = report
        .checked()
        .map(|(frames, k)| CaseResult {
            frames: frames.clone(),
            residual: k.to_string(),
            pass: k.is_zero() || !report.separable,
            direct: None,
            closed: None,
        })
        .collect();
    let pass = cases.iter().all(|c| c.pass) && report.equivalence_holds();
    let branch = match report.branch {
        KBranch::XYQ => "K(X,Y)Q",
        KBranch::UVX => "K(U,V)X",
    };
    let note = if report.equivalence_holds() {
        format!("{branch} checked; separable = {}", report.separable)
    } else {
        format!(
            "{branch} checked: components vanish = {}, separable = {}",
            report.all_zero(),
            report.separable
        )
    };
    ClaimResult {
        id,
        tier: id.tier(),
        cases,
        pass,
        note: Some(note),
    }
}

fn failed(id: ClaimId, note: String) -> ClaimResult {
    ClaimResult {
        id,
        tier: id.tier(),
        cases: Vec::new(),
        pass: false,
        note: Some(note),
    }
}
