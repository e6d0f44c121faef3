use rayon::prelude::*;
use serde::Serialize;

use super::claims::{ClaimId, Tier};
use super::formulas::{TwistedProduct, Value};
use super::warped::{k_mixed_check, mixed_ricci_check};
use super::ProductError;

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub frames: Vec<String>,
    pub residual: String,
    pub pass: bool,
    #[serde(skip)]
    pub direct: Option<Value>,
    #[serde(skip)]
    pub closed: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub id: ClaimId,
    pub tier: Tier,
    pub cases: Vec<CaseResult>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    /// Claims that hold.
    pub passed: usize,
    /// MUST-PASS claims that do not hold.
    pub failed: usize,
    /// REPORT claims that do not hold.
    pub reported: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub claims: Vec<ClaimResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn claim(&self, id: ClaimId) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn must_pass_ok(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn all_ok(&self) -> bool {
        self.summary.failed == 0 && self.summary.reported == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn frame_names(tp: &TwistedProduct, args: &[usize]) -> Vec<String> {
    args.iter()
        .map(|&i| format!("d{}", tp.chart().coord(i).name))
        .collect()
}

fn formula_case(tp: &TwistedProduct, claim: ClaimId, args: &[usize]) -> CaseResult {
    let frames = frame_names(tp, args);
    let direct = tp.direct_value(claim, args);
    let closed = tp.closed_form(claim, args);
    match (direct, closed) {
        (Ok(d), Ok(c)) => match d.difference(&c) {
            Ok(r) => CaseResult {
                frames,
                residual: r.to_string(),
                pass: r.is_zero(),
                direct: Some(d),
                closed: Some(c),
            },
            Err(e) => error_case(frames, &e),
        },
        (Err(e), _) | (_, Err(e)) => error_case(frames, &e),
    }
}

fn error_case(frames: Vec<String>, e: &ProductError) -> CaseResult {
    CaseResult {
        frames,
        residual: format!("error: {e}"),
        pass: false,
        direct: None,
        closed: None,
    }
}

/// Checks one claim on every frame tuple of its signature.
pub fn verify_claim(tp: &TwistedProduct, claim: ClaimId) -> ClaimResult {
    if !claim.is_formula() {
        return match claim {
            ClaimId::T42 => mixed_ricci_check(tp),
            _ => k_mixed_check(tp),
        };
    }
    let tuples = tp.frame_tuples(claim);
    let cases: Vec<CaseResult> = tuples
        .par_iter()
        .map(|args| formula_case(tp, claim, args))
        .collect();
    let pass = cases.iter().all(|c| c.pass);
    ClaimResult {
        id: claim,
        tier: claim.tier(),
        cases,
        pass,
        note: None,
    }
}

/// Verifies the selected claims; the report order is the claim order, then
/// the frame-tuple order, whatever the scheduling.
pub fn verify_product(
    tp: &TwistedProduct,
    scenario: &str,
    claims: &[ClaimId],
) -> VerificationReport {
    let mut ids = claims.to_vec();
    ids.sort();
    ids.dedup();
    let results: Vec<ClaimResult> = ids.par_iter().map(|&c| verify_claim(tp, c)).collect();
    let mut summary = Summary::default();
    for r in &results {
        match (r.pass, r.tier) {
            (true, _) => summary.passed += 1,
            (false, Tier::MustPass) => summary.failed += 1,
            (false, Tier::Report) => summary.reported += 1,
        }
    }
    VerificationReport {
        scenario: scenario.to_string(),
        claims: results,
        summary,
    }
}

/// Builds the product and verifies the selected claims.
pub fn verify(
    spec: &super::TwistedProductSpec,
    scenario: &str,
    claims: &[ClaimId],
) -> Result<VerificationReport, ProductError> {
    let tp = TwistedProduct::new(spec)?;
    Ok(verify_product(&tp, scenario, claims))
}
