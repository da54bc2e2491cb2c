//! Built-in links shipped under `fixtures/`.

use serde::Deserialize;

use crate::braid::BraidWord;
use crate::diagram::GaussDiagram;
use crate::parse::parse_gauss_code;

const HOPF: &str = include_str!("../../../fixtures/hopf.json");
const BORROMEAN: &str = include_str!("../../../fixtures/borromean.json");
const HUGHES: &str = include_str!("../../../fixtures/hughes.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureStatus {
    Verified,
    Unverified,
    Surrogate,
}

impl FixtureStatus {
    pub fn is_verified(self) -> bool {
        self == FixtureStatus::Verified
    }

    pub fn name(self) -> &'static str {
        match self {
            FixtureStatus::Verified => "verified",
            FixtureStatus::Unverified => "unverified",
            FixtureStatus::Surrogate => "surrogate",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct HopfFixture {
    pub status: FixtureStatus,
    pub positive: String,
    pub negative: String,
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BorromeanFixture {
    pub status: FixtureStatus,
    pub strands: usize,
    pub braid: String,
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct HughesFixture {
    pub status: FixtureStatus,
    pub strands: usize,
    pub h1: String,
    pub h2: String,
    pub note: String,
}

pub fn hopf() -> HopfFixture {
    serde_json::from_str(HOPF).expect("hopf fixture is well formed")
}

pub fn borromean() -> BorromeanFixture {
    serde_json::from_str(BORROMEAN).expect("borromean fixture is well formed")
}

pub fn hughes() -> HughesFixture {
    serde_json::from_str(HUGHES).expect("hughes fixture is well formed")
}

impl HopfFixture {
    pub fn diagrams(&self) -> (GaussDiagram, GaussDiagram) {
        (
            parse_gauss_code(&self.positive).expect("fixture parses"),
            parse_gauss_code(&self.negative).expect("fixture parses"),
        )
    }
}

impl BorromeanFixture {
    pub fn braid(&self) -> BraidWord {
        BraidWord::parse(self.strands, &self.braid).expect("fixture parses")
    }

    pub fn diagram(&self) -> GaussDiagram {
        self.braid().closure()
    }
}

impl HughesFixture {
    pub fn braids(&self) -> (BraidWord, BraidWord) {
        (
            BraidWord::parse(self.strands, &self.h1).expect("fixture parses"),
            BraidWord::parse(self.strands, &self.h2).expect("fixture parses"),
        )
    }

    pub fn diagrams(&self) -> (GaussDiagram, GaussDiagram) {
        let (a, b) = self.braids();
        (a.closure(), b.closure())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let (p, m) = hopf().diagrams();
        assert_eq!((p.n(), m.n()), (2, 2));
        assert_eq!(borromean().diagram().n(), 3);
        let h = hughes();
        let (a, b) = h.diagrams();
        assert_eq!((a.n(), b.n()), (4, 4));
        assert_eq!(h.status, FixtureStatus::Surrogate);
    }
}
