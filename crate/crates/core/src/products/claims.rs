use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::spec::Factor;
use super::ProductError;

/// The closed-form statements checked against direct computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimId {
    L311,
    L312,
    L313,
    L314,
    P321,
    P322,
    P323,
    P324,
    P325,
    P326,
    P331,
    P332,
    P333,
    P334,
    T341,
    T342,
    T343,
    T344,
    T345,
    T346,
    /// Mixed Ricci-flatness is equivalent to separability of `ln h`.
    T42,
    /// Vanishing of the mixed `K` components is equivalent to separability.
    T43,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    MustPass,
    Report,
}

impl Serialize for Tier {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::MustPass => "MUST-PASS",
            Tier::Report => "REPORT",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const NAMES: [(ClaimId, &str); 22] = [
    (ClaimId::L311, "L3.1.1"),
    (ClaimId::L312, "L3.1.2"),
    (ClaimId::L313, "L3.1.3"),
    (ClaimId::L314, "L3.1.4"),
    (ClaimId::P321, "P3.2.1"),
    (ClaimId::P322, "P3.2.2"),
    (ClaimId::P323, "P3.2.3"),
    (ClaimId::P324, "P3.2.4"),
    (ClaimId::P325, "P3.2.5"),
    (ClaimId::P326, "P3.2.6"),
    (ClaimId::P331, "P3.3.1"),
    (ClaimId::P332, "P3.3.2"),
    (ClaimId::P333, "P3.3.3"),
    (ClaimId::P334, "P3.3.4"),
    (ClaimId::T341, "T3.4.1"),
    (ClaimId::T342, "T3.4.2"),
    (ClaimId::T343, "T3.4.3"),
    (ClaimId::T344, "T3.4.4"),
    (ClaimId::T345, "T3.4.5"),
    (ClaimId::T346, "T3.4.6"),
    (ClaimId::T42, "T4.2"),
    (ClaimId::T43, "T4.3"),
];

impl ClaimId {
    pub fn all() -> Vec<ClaimId> {
        NAMES.iter().map(|(c, _)| *c).collect()
    }

    pub fn as_str(self) -> &'static str {
        NAMES
            .iter()
            .find(|(c, _)| *c == self)
            .map(|(_, n)| *n)
            .expect("every claim is named")
    }

    pub fn tier(self) -> Tier {
        match self {
            ClaimId::T343 | ClaimId::T344 | ClaimId::T345 | ClaimId::T346 | ClaimId::T43 => {
                Tier::Report
            }
            _ => Tier::MustPass,
        }
    }

    /// Factor of each frame argument, in argument order.
    pub fn signature(self) -> &'static [Factor] {
        use Factor::{First as A, Second as B};
        match self {
            ClaimId::L311 => &[A, A],
            ClaimId::L312 => &[A, B],
            ClaimId::L313 => &[B, A],
            ClaimId::L314 => &[B, B],
            ClaimId::P321 => &[A, A, A],
            ClaimId::P322 => &[B, A, A],
            ClaimId::P323 => &[A, A, B],
            ClaimId::P324 => &[B, B, A],
            ClaimId::P325 => &[A, B, B],
            ClaimId::P326 => &[B, B, B],
            ClaimId::P331 => &[A, A],
            ClaimId::P332 => &[A, B],
            ClaimId::P333 => &[B, A],
            ClaimId::P334 => &[B, B],
            ClaimId::T341 => &[A, A, A],
            ClaimId::T342 => &[A, A, B],
            ClaimId::T343 => &[B, B, A],
            ClaimId::T344 => &[A, B, A],
            ClaimId::T345 => &[A, B, B],
            ClaimId::T346 => &[B, B, B],
            ClaimId::T42 => &[A, B],
            ClaimId::T43 => &[A, A, B],
        }
    }

    /// Whether the claim compares a closed form with a direct value frame by
    /// frame, as opposed to an equivalence over the whole scenario.
    pub fn is_formula(self) -> bool {
        !matches!(self, ClaimId::T42 | ClaimId::T43)
    }

    /// Parses a comma-separated list, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<ClaimId>, ProductError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(ClaimId::all());
        }
        let mut out: Vec<ClaimId> = s
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = ProductError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "C4.4" {
            return Ok(ClaimId::T43);
        }
        NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(c, _)| *c)
            .ok_or_else(|| ProductError::UnknownClaim(s.to_string()))
    }
}

impl Serialize for ClaimId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}
